//! Finitely supported sequences on `Z^d` (`d = 1, 2`), torus grids, and the
//! exact Fourier transforms between them.
//!
//! Frequency nodes are `xi_j = -1/2 + j/N` per axis with `N` a power of two.
//! For a sequence supported in the fundamental domain `(-N/2, N/2]^d` the
//! grid transform is exact (a trigonometric polynomial sampled on a grid that
//! resolves it), and `inverse_transform . torus_transform = id`.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

pub type Point = [i64; 2];

/// A finitely supported complex sequence on `Z^d`; zero entries are pruned.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSequence {
    dim: usize,
    entries: BTreeMap<Point, Complex64>,
}

impl LatticeSequence {
    pub fn new(dim: usize, entries: impl IntoIterator<Item = (Point, Complex64)>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::DimensionMismatch(format!(
                "dim must be 1 or 2, got {dim}"
            )));
        }
        let mut map = BTreeMap::new();
        for (p, v) in entries {
            if dim == 1 && p[1] != 0 {
                return Err(Error::DimensionMismatch(
                    "one-dimensional sequence with a nonzero second coordinate".into(),
                ));
            }
            if v != Complex64::new(0.0, 0.0) {
                let slot = map.entry(p).or_insert(Complex64::new(0.0, 0.0));
                *slot += v;
                if *slot == Complex64::new(0.0, 0.0) {
                    map.remove(&p);
                }
            }
        }
        Ok(Self { dim, entries: map })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// The Kronecker delta at `p`.
    pub fn delta(dim: usize, p: Point) -> Self {
        Self::new(dim, [(p, Complex64::new(1.0, 0.0))]).expect("valid delta")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, p: Point) -> Complex64 {
        self.entries
            .get(&p)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, &Complex64)> {
        self.entries.iter()
    }

    /// Max per-axis coordinate magnitude over the support; 0 when empty.
    pub fn support_radius(&self) -> i64 {
        self.entries
            .keys()
            .map(|p| p[0].abs().max(p[1].abs()))
            .max()
            .unwrap_or(0)
    }

    /// `l^p` norm, `p > 0` finite or `f64::INFINITY` for the sup norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        assert!(p > 0.0, "lp_norm requires p > 0");
        if p.is_infinite() {
            return self
                .entries
                .values()
                .map(|v| v.norm())
                .fold(0.0, f64::max);
        }
        if p == 2.0 {
            // exact sum of squares, the common case
            return self
                .entries
                .values()
                .map(|v| v.norm_sqr())
                .sum::<f64>()
                .sqrt();
        }
        self.entries
            .values()
            .map(|v| v.norm().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// Pointwise product with another sequence of the same dimension.
    pub fn pointwise_mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(
                "pointwise product of sequences with different dimensions".into(),
            ));
        }
        let entries = self
            .entries
            .iter()
            .filter_map(|(p, v)| other.entries.get(p).map(|w| (*p, v * w)));
        Self::new(self.dim, entries)
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self::new(self.dim, self.entries.iter().map(|(p, v)| (*p, c * v))).expect("same dim")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch("adding sequences of different dimensions".into()));
        }
        Self::new(
            self.dim,
            self.entries
                .iter()
                .map(|(p, v)| (*p, *v))
                .chain(other.entries.iter().map(|(p, v)| (*p, *v))),
        )
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    /// `l^2` distance to another sequence.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        self.sub(other).map(|d| d.lp_norm(2.0)).unwrap_or(f64::NAN)
    }

    /// `l^2` mass of entries with max-norm coordinate beyond `radius`.
    pub fn tail_mass(&self, radius: i64) -> f64 {
        self.entries
            .iter()
            .filter(|(p, _)| p[0].abs().max(p[1].abs()) > radius)
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Uniform `N^d` sampling of the torus `(-1/2, 1/2]^d` carrying complex data.
#[derive(Debug, Clone)]
pub struct TorusGrid {
    dim: usize,
    n: usize,
    values: Vec<Complex64>,
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize, values: Vec<Complex64>) -> Result<Self> {
        check_grid_size(n)?;
        if dim != 1 && dim != 2 {
            return Err(Error::DimensionMismatch(format!(
                "dim must be 1 or 2, got {dim}"
            )));
        }
        if values.len() != n.pow(dim as u32) {
            return Err(Error::InvalidArgument(format!(
                "grid data length {} does not match N^d = {}",
                values.len(),
                n.pow(dim as u32)
            )));
        }
        Ok(Self { dim, n, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Torus coordinate of axis index `j`.
    #[inline]
    pub fn xi_axis(&self, j: usize) -> f64 {
        -0.5 + j as f64 / self.n as f64
    }

    /// Torus coordinates of a flattened node index.
    pub fn xi(&self, idx: usize) -> [f64; 2] {
        match self.dim {
            1 => [self.xi_axis(idx), 0.0],
            _ => [self.xi_axis(idx / self.n), self.xi_axis(idx % self.n)],
        }
    }

    /// `|Sin(xi)|` per node, computed from an exactly mirror-symmetric axis
    /// table so that equal spectral values compare equal bitwise.
    pub fn sin_abs_values(&self) -> Vec<f64> {
        let q = sin_sq_axis(self.n);
        match self.dim {
            1 => q.iter().map(|&s| 2.0 * s.sqrt()).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.values.len());
                for j1 in 0..self.n {
                    for j2 in 0..self.n {
                        out.push(2.0 * (q[j1] + q[j2]).sqrt());
                    }
                }
                out
            }
        }
    }

    /// `l^2(T^d)` norm of the grid data under the exact `N`-point rule,
    /// `(N^{-d} sum |g|^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let scale = (self.n as f64).powi(self.dim as i32);
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / scale).sqrt()
    }
}

/// `sin^2(pi xi_j)` for every axis index, via the canonical form
/// `sin^2(pi |2j - N| / (2N))`: exactly symmetric under `j -> N - j`,
/// exactly 0 at the zero frequency and exactly 1 at the half-integer node.
pub(crate) fn sin_sq_axis(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let num = (2 * j as i64 - n as i64).unsigned_abs();
            let s = (std::f64::consts::PI * num as f64 / (2.0 * n as f64)).sin();
            s * s
        })
        .collect()
}

/// `|Sin(xi)| = 2 (sum_j sin^2(pi xi_j))^{1/2}` at an arbitrary torus point.
pub fn sin_symbol(xi: &[f64], dim: usize) -> f64 {
    assert!(dim == 1 || dim == 2);
    let mut s = 0.0;
    for &x in xi.iter().take(dim) {
        let t = (std::f64::consts::PI * x).sin();
        s += t * t;
    }
    2.0 * s.sqrt()
}

/// `l^p` norm free function (spec-facing alias of [`LatticeSequence::lp_norm`]).
pub fn lp_norm(f: &LatticeSequence, p: f64) -> f64 {
    f.lp_norm(p)
}

fn check_grid_size(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "grid size must be a power of two >= 2, got {n}"
        )));
    }
    Ok(())
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((n, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

/// In-place unnormalized DFT along every axis of a flattened `N^d` array.
/// `forward` uses the `e^{-2 pi i jk/N}` kernel.
pub(crate) fn fft_axes(values: &mut [Complex64], n: usize, dim: usize, forward: bool) {
    let fft = plan(n, forward);
    match dim {
        1 => fft.process(values),
        _ => {
            for row in values.chunks_exact_mut(n) {
                fft.process(row);
            }
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for j2 in 0..n {
                for j1 in 0..n {
                    col[j1] = values[j1 * n + j2];
                }
                fft.process(&mut col);
                for j1 in 0..n {
                    values[j1 * n + j2] = col[j1];
                }
            }
        }
    }
}

#[inline]
fn fold_index(v: i64, n: usize) -> usize {
    (v.rem_euclid(n as i64)) as usize
}

fn check_resolves(f: &LatticeSequence, n: usize) -> Result<()> {
    let half = (n / 2) as i64;
    for (p, _) in f.iter() {
        for l in 0..f.dim() {
            if p[l] <= -half || p[l] > half {
                return Err(Error::GridTooSmall {
                    n,
                    radius: f.support_radius(),
                });
            }
        }
    }
    Ok(())
}

/// `F f(xi) = sum_n f(n) e^{2 pi i n . xi}` sampled at all grid nodes.
///
/// Exact (one FFT, no truncation) whenever the support of `f` lies in the
/// fundamental domain `(-N/2, N/2]^d`; otherwise rejected.
pub fn torus_transform(f: &LatticeSequence, n: usize) -> Result<TorusGrid> {
    check_grid_size(n)?;
    check_resolves(f, n)?;
    let dim = f.dim();
    let mut data = vec![Complex64::new(0.0, 0.0); n.pow(dim as u32)];
    for (p, v) in f.iter() {
        // e^{2 pi i m (-1/2)} = (-1)^m per axis
        let sign = if (p[0] + p[1]).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        let idx = match dim {
            1 => fold_index(p[0], n),
            _ => fold_index(p[0], n) * n + fold_index(p[1], n),
        };
        data[idx] += sign * v;
    }
    fft_axes(&mut data, n, dim, false);
    TorusGrid::new(dim, n, data)
}

/// `f(n) = N^{-d} sum_xi g(xi) e^{-2 pi i n . xi}`, the exact inverse of
/// [`torus_transform`] on grid data; output indices lie in `(-N/2, N/2]^d`.
pub fn inverse_transform(g: &TorusGrid) -> LatticeSequence {
    let n = g.n();
    let dim = g.dim();
    let mut data = g.values().to_vec();
    fft_axes(&mut data, n, dim, true);
    let scale = 1.0 / (n as f64).powi(dim as i32);
    let unfold = |k: usize| -> i64 {
        if k <= n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    };
    let mut entries = Vec::with_capacity(data.len());
    match dim {
        1 => {
            for (k, v) in data.iter().enumerate() {
                let m = unfold(k);
                let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                entries.push(([m, 0], sign * scale * v));
            }
        }
        _ => {
            for (k, v) in data.iter().enumerate() {
                let m1 = unfold(k / n);
                let m2 = unfold(k % n);
                let sign = if (m1 + m2).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                entries.push(([m1, m2], sign * scale * v));
            }
        }
    }
    LatticeSequence::new(dim, entries).expect("dims are valid")
}
