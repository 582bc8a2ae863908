//! Paradifferential machinery: dyadic partitions, localized-symbol Fourier
//! coefficients with decay diagnostics, square and maximal functions, the
//! three-way scale split of a bilinear multiplier, and the spectral-support
//! property checker for the lattice setting.

use crate::discrete::{apply_linear_multiplier, bilinear_driver, spectral_index, symbol_table};
use crate::error::{Error, Result};
use crate::lattice::{inverse_transform, torus_transform, LatticeSequence, TorusGrid};
use crate::quadrature::{composite_on_edges, log_edges, uniform_edges};
use crate::symbols::{CutoffFunction, Symbol2D, UnivariateSymbol};
use num_complex::Complex64;
use rayon::prelude::*;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A dyadic Littlewood-Paley partition: `psi` supported in `[1/2, 2]` with
/// `sum_k psi(2^{-k} lambda) = 1` for every `lambda > 0`.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    pub psi: CutoffFunction,
    pub k_range: (i32, i32),
}

/// Build the canonical partition with a default scale range wide enough for
/// every lattice spectrum this crate produces.
pub fn make_dyadic_partition() -> DyadicPartition {
    DyadicPartition {
        psi: CutoffFunction::band(),
        k_range: (-20, 4),
    }
}

/// Scales `k` whose band `[2^{k-1}, 2^{k+1}]` meets the grid spectrum
/// `[min positive |Sin|, 2 sqrt(d)]`.
pub fn default_k_range(dim: usize, n: usize) -> (i32, i32) {
    let sidx = spectral_index(dim, n);
    let min_pos = sidx
        .values
        .iter()
        .copied()
        .find(|&v| v > 0.0)
        .unwrap_or(1.0);
    let max = 2.0 * (dim as f64).sqrt();
    (
        (min_pos.log2().floor() as i32) - 1,
        (max.log2().ceil() as i32) + 1,
    )
}

/// Localization mode for [`localize_and_expand`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalizeMode {
    /// `psi_k (x) phi_k` with `phi = sum_{|j| <= b+2} psi_j` (comparable
    /// scales); Fourier box half-width `a = 2^{b+4}`.
    Diagonal,
    /// `psi_k (x) phi_k` with `phi = sum_{j < -(b+2)} psi_j` (second variable
    /// far below the first); Fourier box half-width `a = 2`.
    LowHigh,
}

/// One scale of a localized-symbol double Fourier expansion: the coefficients
/// `c_{n,k}` of `M_k(lambda) = m_k(2^k lambda)` on its box `[-a, a]^2`,
/// truncated to `|n_i| <= n_max`.
#[derive(Debug, Clone)]
pub struct DyadicPiece {
    pub k: i32,
    pub mode: LocalizeMode,
    pub box_halfwidth_a: f64,
    pub n_max: usize,
    /// Row-major `(2 n_max + 1)^2` array, index `(n1 + n_max, n2 + n_max)`.
    coeffs: Vec<Complex64>,
    /// Largest coefficient change in the final quadrature refinement.
    pub quadrature_delta: f64,
}

impl DyadicPiece {
    #[inline]
    pub fn coeff(&self, n1: i64, n2: i64) -> Complex64 {
        let nn = 2 * self.n_max as i64 + 1;
        let (i, j) = (n1 + self.n_max as i64, n2 + self.n_max as i64);
        if i < 0 || j < 0 || i >= nn || j >= nn {
            return ZERO;
        }
        self.coeffs[(i * nn + j) as usize]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Truncated Fourier synthesis `sum_{|n| <= n_max} c_n e^{i pi n.l / a}`.
    pub fn reconstruct(&self, l1: f64, l2: f64) -> Complex64 {
        let a = self.box_halfwidth_a;
        let m = self.n_max as i64;
        let mut acc = ZERO;
        for n1 in -m..=m {
            let p1 = std::f64::consts::PI * n1 as f64 * l1 / a;
            let e1 = Complex64::new(p1.cos(), p1.sin());
            let mut row = ZERO;
            for n2 in -m..=m {
                let p2 = std::f64::consts::PI * n2 as f64 * l2 / a;
                row += self.coeff(n1, n2) * Complex64::new(p2.cos(), p2.sin());
            }
            acc += e1 * row;
        }
        acc
    }

    /// `sup |c_n| (1 + |n|_inf)^s` over `|n|_inf <= limit`.
    pub fn weighted_sup(&self, s: f64, limit: usize) -> f64 {
        let m = (self.n_max.min(limit)) as i64;
        let mut sup = 0.0_f64;
        for n1 in -m..=m {
            for n2 in -m..=m {
                let r = n1.abs().max(n2.abs()) as f64;
                sup = sup.max(self.coeff(n1, n2).norm() * (1.0 + r).powf(s));
            }
        }
        sup
    }

    /// Least-squares decay exponent of the dyadic-shell envelope
    /// `log max_{|n1|<=2, r <= |n2| < 2r} |c|` against `log r`, shells
    /// starting at `r_lo`; more negative means faster decay in the second
    /// (low-frequency) variable.
    pub fn axis2_decay_exponent(&self, r_lo: usize) -> f64 {
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut r = r_lo.max(1);
        while r <= self.n_max {
            let hi = (2 * r - 1).min(self.n_max);
            let mut mag = 0.0_f64;
            for n2 in r..=hi {
                for n1 in -2i64..=2 {
                    mag = mag.max(self.coeff(n1, n2 as i64).norm());
                    mag = mag.max(self.coeff(n1, -(n2 as i64)).norm());
                }
            }
            if mag > 0.0 {
                xs.push(((r + hi) as f64 * 0.5).ln());
                ys.push(mag.ln());
            }
            r *= 2;
        }
        linear_slope(&xs, &ys)
    }
}

fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return 0.0;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// Expand the localized symbol at scale `k` into double Fourier coefficients
/// on its box, by panel-doubling tensor Gauss-Legendre quadrature (panels
/// double until the largest coefficient change drops below 1e-12).
pub fn localize_and_expand(
    m: &Symbol2D,
    k: i32,
    mode: LocalizeMode,
    n_max: usize,
    b: f64,
) -> Result<DyadicPiece> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let psi = CutoffFunction::band();
    let (phi, a, lo2, hi2) = match mode {
        LocalizeMode::Diagonal => {
            let phi = CutoffFunction::diag_companion(b);
            let (lo, hi) = phi.support();
            (phi, (b + 4.0).exp2(), lo * 0.99, hi)
        }
        LocalizeMode::LowHigh => {
            let phi = CutoffFunction::low_companion(b);
            let (_, hi) = phi.support();
            // the integrand is bounded, so the [0, hi * 1e-12] sliver
            // contributes below the quadrature tolerance and is skipped
            (phi, 2.0, hi * 1e-12, hi)
        }
    };

    let scale = (k as f64).exp2();
    let tol = 1e-12;
    let mut panels1 = 8usize;
    let mut panels2 = 32usize;
    let cap = 4096usize;
    let mut prev: Option<Vec<Complex64>> = None;
    let mut delta = f64::INFINITY;

    loop {
        let rule1 = composite_on_edges(&uniform_edges(0.5, 2.0, panels1), 10);
        let rule2 = composite_on_edges(&log_edges(lo2, hi2, panels2), 10);
        let coeffs = fourier_coefficients(m, scale, &psi, &phi, &rule1, &rule2, a, n_max)?;
        if let Some(p) = &prev {
            delta = p
                .iter()
                .zip(&coeffs)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            if delta < tol {
                prev = Some(coeffs);
                break;
            }
        }
        prev = Some(coeffs);
        if panels1 >= cap || panels2 >= cap {
            return Err(Error::Numerical(format!(
                "coefficient quadrature did not converge (achieved {delta:.3e}, target {tol:.0e})"
            )));
        }
        panels1 *= 2;
        panels2 *= 2;
    }

    Ok(DyadicPiece {
        k,
        mode,
        box_halfwidth_a: a,
        n_max,
        coeffs: prev.unwrap(),
        quadrature_delta: delta,
    })
}

/// Tensor-rule evaluation of
/// `c_n = (1/(2a)^2) int int psi(x1) phi(x2) m(2^k x1, 2^k x2)
///        e^{-i pi (n1 x1 + n2 x2)/a} dx`.
fn fourier_coefficients(
    m: &Symbol2D,
    scale: f64,
    psi: &CutoffFunction,
    phi: &CutoffFunction,
    rule1: &[(f64, f64)],
    rule2: &[(f64, f64)],
    a: f64,
    n_max: usize,
) -> Result<Vec<Complex64>> {
    let nn = 2 * n_max + 1;
    let pi_over_a = std::f64::consts::PI / a;

    // oscillation table along axis 2
    let e2: Vec<Complex64> = rule2
        .par_iter()
        .flat_map_iter(|&(x2, _)| {
            (0..nn).map(move |j| {
                let n2 = j as i64 - n_max as i64;
                let p = -pi_over_a * n2 as f64 * x2;
                Complex64::new(p.cos(), p.sin())
            })
        })
        .collect();

    // stage 1: integrate over x2 for every x1 node
    let inner: Result<Vec<Vec<Complex64>>> = rule1
        .par_iter()
        .map(|&(x1, _)| {
            let c1 = psi.value(x1);
            let mut row = vec![ZERO; nn];
            if c1 == 0.0 {
                return Ok(row);
            }
            for (i2, &(x2, w2)) in rule2.iter().enumerate() {
                let c2 = phi.value(x2);
                if c2 == 0.0 {
                    continue;
                }
                let f = m.eval(scale * x1, scale * x2)? * (c1 * c2 * w2);
                let etab = &e2[i2 * nn..(i2 + 1) * nn];
                for (slot, e) in row.iter_mut().zip(etab) {
                    *slot += f * e;
                }
            }
            Ok(row)
        })
        .collect();
    let inner = inner?;

    // stage 2: integrate over x1 against the axis-1 oscillation
    let norm = 1.0 / (4.0 * a * a);
    let coeffs: Vec<Complex64> = (0..nn)
        .into_par_iter()
        .flat_map_iter(|i| {
            let n1 = i as i64 - n_max as i64;
            let column: Vec<Complex64> = (0..nn)
                .map(|j| {
                    let mut acc = ZERO;
                    for (i1, &(x1, w1)) in rule1.iter().enumerate() {
                        let p = -pi_over_a * n1 as f64 * x1;
                        acc += inner[i1][j] * (w1 * Complex64::new(p.cos(), p.sin()));
                    }
                    acc * norm
                })
                .collect();
            column.into_iter()
        })
        .collect();
    Ok(coeffs)
}

/// `l^p` norm of the square function `S(n) = (sum_k |psi_k(L) f(n)|^2)^{1/2}`.
pub fn square_function(
    f: &LatticeSequence,
    psi: &CutoffFunction,
    k_range: (i32, i32),
    p: f64,
    n: usize,
) -> Result<f64> {
    let parts = scale_parts(f, psi, k_range, n)?;
    let mut sq: std::collections::BTreeMap<[i64; 2], f64> = std::collections::BTreeMap::new();
    for part in &parts {
        for (pt, v) in part.iter() {
            *sq.entry(*pt).or_insert(0.0) += v.norm_sqr();
        }
    }
    let seq = LatticeSequence::new(
        f.dim(),
        sq.into_iter()
            .map(|(pt, v)| (pt, Complex64::new(v.sqrt(), 0.0))),
    )?;
    Ok(seq.lp_norm(p))
}

/// Pointwise maximal function `M(n) = sup_k |phi_k(L) f(n)|`.
pub fn maximal_function(
    f: &LatticeSequence,
    phi: &CutoffFunction,
    k_range: (i32, i32),
    n: usize,
) -> Result<LatticeSequence> {
    let parts = scale_parts(f, phi, k_range, n)?;
    let mut sup: std::collections::BTreeMap<[i64; 2], f64> = std::collections::BTreeMap::new();
    for part in &parts {
        for (pt, v) in part.iter() {
            let e = sup.entry(*pt).or_insert(0.0);
            *e = e.max(v.norm());
        }
    }
    LatticeSequence::new(
        f.dim(),
        sup.into_iter().map(|(pt, v)| (pt, Complex64::new(v, 0.0))),
    )
}

fn scale_parts(
    f: &LatticeSequence,
    cut: &CutoffFunction,
    k_range: (i32, i32),
    n: usize,
) -> Result<Vec<LatticeSequence>> {
    (k_range.0..=k_range.1)
        .map(|k| {
            let mu = UnivariateSymbol::from_cutoff_scaled(cut.clone(), k);
            apply_linear_multiplier(&mu, f, n)
        })
        .collect()
}

const ACTIVE_MAX: usize = 3;

/// Per-node list of active dyadic scales `(k, psi_k(s))`; at most two entries
/// since `psi` is supported in one octave around 1.
#[derive(Clone, Copy)]
struct ActiveScales {
    ks: [(i32, f64); ACTIVE_MAX],
    len: usize,
}

fn active_scales(psi: &CutoffFunction, s: f64) -> ActiveScales {
    let mut out = ActiveScales {
        ks: [(0, 0.0); ACTIVE_MAX],
        len: 0,
    };
    if s <= 0.0 {
        return out;
    }
    let k0 = s.log2().floor() as i32;
    for k in (k0 - 1)..=(k0 + 1) {
        let v = psi.at_scale(k, s);
        if v != 0.0 && out.len < ACTIVE_MAX {
            out.ks[out.len] = (k, v);
            out.len += 1;
        }
    }
    out
}

/// Verify class-A membership on the grid: no frequency mass at zero spectrum.
fn check_class_a(g: &TorusGrid, label: &str) -> Result<()> {
    let svals = g.sin_abs_values();
    let max = g.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
    for (v, s) in g.values().iter().zip(&svals) {
        if *s == 0.0 && v.norm() > 1e-12 * max.max(1.0) {
            return Err(Error::Precondition(format!(
                "{label} is not class A: nonzero mass at zero spectral value"
            )));
        }
    }
    Ok(())
}

/// The three-way paradifferential split of `B_m(f1, f2)` by relative dyadic
/// scale: comparable (`|k1 - k2| <= b+2`), first dominant (`k1 > k2 + b+2`),
/// second dominant (`k2 > k1 + b+2`). The three outputs sum to the full
/// bilinear application.
pub fn paradiff_split(
    m: &Symbol2D,
    f1: &LatticeSequence,
    f2: &LatticeSequence,
    b: f64,
    n: usize,
) -> Result<(LatticeSequence, LatticeSequence, LatticeSequence)> {
    if b <= 0.0 {
        return Err(Error::InvalidArgument("split requires b > 0".into()));
    }
    if f1.dim() != f2.dim() {
        return Err(Error::DimensionMismatch("split requires equal dims".into()));
    }
    let dim = f1.dim();
    let g1 = torus_transform(f1, n)?;
    let g2 = torus_transform(f2, n)?;
    check_class_a(&g1, "f1")?;
    check_class_a(&g2, "f2")?;

    let sidx = spectral_index(dim, n);
    let table = symbol_table(m, &sidx, g1.values(), g2.values())?;
    let s = sidx.values.len();
    let psi = CutoffFunction::band();
    let active_by_value: Vec<ActiveScales> = sidx
        .values
        .iter()
        .map(|&v| active_scales(&psi, v))
        .collect();
    let node_index = &sidx.node_index;
    let active_ref = &active_by_value;
    let threshold = b + 2.0;

    let [t1, t2, t3] = bilinear_driver::<3, _, _>(dim, n, g1.values(), g2.values(), |i| {
        let ia = node_index[i] as usize;
        let row = &table[ia * s..(ia + 1) * s];
        let act1 = active_ref[ia];
        move |j: usize| {
            let jb = node_index[j] as usize;
            let act2 = active_ref[jb];
            let mut w = [0.0_f64; 3];
            for (k1, w1) in act1.ks.iter().take(act1.len) {
                for (k2, w2) in act2.ks.iter().take(act2.len) {
                    let dk = (k1 - k2) as f64;
                    let c = if dk.abs() <= threshold {
                        0
                    } else if dk > threshold {
                        1
                    } else {
                        2
                    };
                    w[c] += w1 * w2;
                }
            }
            let mv = row[jb];
            [w[0] * mv, w[1] * mv, w[2] * mv]
        }
    });
    Ok((
        inverse_transform(&TorusGrid::new(dim, n, t1)?),
        inverse_transform(&TorusGrid::new(dim, n, t2)?),
        inverse_transform(&TorusGrid::new(dim, n, t3)?),
    ))
}

/// Which concrete setting a spectral-support check runs in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PfSetting {
    Discrete { dim: usize },
    Jacobi,
    Dunkl,
}

/// Configuration of the spectral-support property: the setting's band
/// enlargement constant `b`, the functional-calculus order `rho` it cites,
/// and the leakage tolerance.
#[derive(Debug, Clone, Copy)]
pub struct PFConfig {
    pub setting: PfSetting,
    pub b: f64,
    pub rho: f64,
    pub tol: f64,
}

impl PFConfig {
    pub fn discrete(dim: usize) -> Self {
        Self {
            setting: PfSetting::Discrete { dim },
            b: 7.0 + 0.5 * (dim as f64).log2(),
            rho: (dim / 2) as f64 + 1.0,
            tol: 1e-10,
        }
    }

    pub fn jacobi(alpha: f64, beta: f64) -> Self {
        Self {
            setting: PfSetting::Jacobi,
            b: 3.0,
            rho: 2.0 * alpha + 2.0 * beta + 6.5,
            tol: 1e-10,
        }
    }

    pub fn dunkl(kappa: f64) -> Self {
        Self {
            setting: PfSetting::Dunkl,
            b: 2.0,
            rho: kappa + 1.0,
            tol: 1e-4,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Outcome of a spectral-support check.
#[derive(Debug, Clone, Copy)]
pub struct PfOutcome {
    pub pass: bool,
    /// Fraction of squared frequency mass outside the enlarged band.
    pub leaked_energy: f64,
    /// True when the low-pass/band product vanished identically.
    pub product_zero: bool,
}

/// Check the spectral-support property in the lattice setting: form
/// `g = phi_k(L) f1 . psi_k(L) f2` on the grid and measure the fraction of
/// `||F g||^2` mass at nodes with `|Sin xi|` outside
/// `[2^{k-3-b}, 2^{k+3+b}]`.
pub fn check_pf_support(
    f1: &LatticeSequence,
    f2: &LatticeSequence,
    k: i32,
    cfg: &PFConfig,
    n: usize,
) -> Result<PfOutcome> {
    let dim = match cfg.setting {
        PfSetting::Discrete { dim } => dim,
        _ => {
            return Err(Error::InvalidArgument(
                "check_pf_support runs the lattice setting only".into(),
            ))
        }
    };
    if f1.dim() != dim || f2.dim() != dim {
        return Err(Error::DimensionMismatch(
            "inputs do not match the configured dimension".into(),
        ));
    }
    let low = UnivariateSymbol::from_cutoff_scaled(CutoffFunction::lowpass(cfg.b), k);
    let band = UnivariateSymbol::from_cutoff_scaled(CutoffFunction::band(), k);
    let u = apply_linear_multiplier(&low, f1, n)?;
    let v = apply_linear_multiplier(&band, f2, n)?;
    let g = u.pointwise_mul(&v)?;
    if g.is_empty() {
        return Ok(PfOutcome {
            pass: true,
            leaked_energy: 0.0,
            product_zero: true,
        });
    }
    let grid = torus_transform(&g, n)?;
    let svals = grid.sin_abs_values();
    let lo = (k as f64 - 3.0 - cfg.b).exp2();
    let hi = (k as f64 + 3.0 + cfg.b).exp2();
    let mut total = 0.0;
    let mut outside = 0.0;
    for (val, s) in grid.values().iter().zip(&svals) {
        let e = val.norm_sqr();
        total += e;
        if *s < lo || *s > hi {
            outside += e;
        }
    }
    let leaked = if total == 0.0 { 0.0 } else { outside / total };
    Ok(PfOutcome {
        pass: leaked < cfg.tol,
        leaked_energy: leaked,
        product_zero: total == 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::bilinear_apply;
    use crate::symbols::parse_symbol;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Quick class-A sample: random data masked onto the spectral annulus.
    fn class_a(dim: usize, n: usize, eps: f64, seed: u64) -> LatticeSequence {
        let mut rng = StdRng::seed_from_u64(seed);
        let count = n.pow(dim as u32);
        let mut values = vec![ZERO; count];
        let grid = TorusGrid::new(dim, n, values.clone()).unwrap();
        let svals = grid.sin_abs_values();
        for (v, &s) in values.iter_mut().zip(&svals) {
            if s >= eps && s <= 1.0 / eps {
                *v = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        let f = inverse_transform(&TorusGrid::new(dim, n, values).unwrap());
        f.scaled(Complex64::new(1.0 / f.lp_norm(2.0), 0.0))
    }

    #[test]
    fn partition_sums_to_one_on_grid_spectrum() {
        let part = make_dyadic_partition();
        let sidx = spectral_index(1, 64);
        for &s in sidx.values.iter().filter(|&&v| v > 0.0) {
            let mut sum = 0.0;
            for k in part.k_range.0..=part.k_range.1 {
                sum += part.psi.at_scale(k, s);
            }
            assert!((sum - 1.0).abs() < 1e-12, "s={s}");
        }
        // pointwise examples
        assert_eq!(part.psi.value(0.4), 0.0);
        assert_eq!(part.psi.value(2.1), 0.0);
        let mut at_one = 0.0;
        for k in -5..=5 {
            at_one += part.psi.at_scale(k, 1.0);
        }
        assert!((at_one - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_symbol_expands_to_zero() {
        let zero = Symbol2D::constant(0.0);
        let piece = localize_and_expand(&zero, 0, LocalizeMode::Diagonal, 4, 2.0).unwrap();
        for c in piece.coeffs() {
            assert_eq!(*c, ZERO);
        }
    }

    #[test]
    fn constant_symbol_dc_coefficient_matches_plain_quadrature() {
        // c_{0,k} for m = 1 is (1/4a^2) int int psi phi: compare against an
        // independent direct quadrature of the cutoff product
        let one = Symbol2D::one();
        let b = 2.0;
        let piece = localize_and_expand(&one, 0, LocalizeMode::Diagonal, 2, b).unwrap();
        let psi = CutoffFunction::band();
        let phi = CutoffFunction::diag_companion(b);
        let a = piece.box_halfwidth_a;
        // simple midpoint oracle on both axes
        let m = 200_000usize;
        let int1: f64 = (0..m)
            .map(|i| psi.value(0.5 + 1.5 * (i as f64 + 0.5) / m as f64) * 1.5 / m as f64)
            .sum();
        let (lo, hi) = phi.support();
        let int2: f64 = (0..m)
            .map(|i| phi.value(lo + (hi - lo) * (i as f64 + 0.5) / m as f64) * (hi - lo) / m as f64)
            .sum();
        let expect = int1 * int2 / (4.0 * a * a);
        let got = piece.coeff(0, 0).re;
        assert!(
            (got - expect).abs() < 1e-7 * expect.abs(),
            "got {got}, expect {expect}"
        );
        assert!(piece.coeff(0, 0).im.abs() < 1e-14);
    }

    #[test]
    fn piece_reconstructs_symbol_on_box() {
        let m = parse_symbol("l1/(l1+l2)").unwrap();
        // small b keeps the low-frequency factor wide enough that the
        // coefficient decay is visible within |n| <= n_max
        let b = 0.5;
        let k = 0;
        let n_max = 48;
        let piece = localize_and_expand(&m, k, LocalizeMode::LowHigh, n_max, b).unwrap();
        let psi = CutoffFunction::band();
        let phi = CutoffFunction::low_companion(b);
        // sample points on the support rectangle
        let mut max_err = 0.0_f64;
        let mut max_val = 0.0_f64;
        for i in 0..20 {
            for j in 1..20 {
                let l1 = 0.5 + 1.5 * i as f64 / 19.0;
                let l2 = phi.support().1 * j as f64 / 19.0;
                let direct = psi.value(l1)
                    * phi.value(l2)
                    * m.eval((k as f64).exp2() * l1, (k as f64).exp2() * l2)
                        .unwrap()
                        .re;
                let rec = piece.reconstruct(l1, l2).re;
                max_err = max_err.max((rec - direct).abs());
                max_val = max_val.max(direct.abs());
            }
        }
        // truncation-level agreement: the tail bound implied by the fitted
        // decay, with a safety factor
        let fit = piece.axis2_decay_exponent(16);
        assert!(fit < -1.0, "expected visible decay, fit = {fit}");
        let c = piece.weighted_sup(-fit, piece.n_max);
        let tail = c * (1.0 + n_max as f64).powf(fit + 1.0) * 8.0;
        assert!(
            max_err <= tail.max(1e-6 * max_val),
            "reconstruction error {max_err} vs tail bound {tail}"
        );
    }

    #[test]
    fn mh_symbol_coefficients_stable_under_nmax_doubling() {
        let m = parse_symbol("l1/(l1+l2)").unwrap();
        for mode in [LocalizeMode::Diagonal, LocalizeMode::LowHigh] {
            let small = localize_and_expand(&m, 1, mode, 16, 2.0).unwrap();
            let big = localize_and_expand(&m, 1, mode, 32, 2.0).unwrap();
            let s_small = small.weighted_sup(6.0, 16);
            let s_big_on_16 = big.weighted_sup(6.0, 16);
            assert!(
                (s_small - s_big_on_16).abs() <= 0.05 * s_small,
                "{mode:?}: {s_small} vs {s_big_on_16}"
            );
        }
    }

    #[test]
    fn square_function_l2_identity() {
        let n = 64;
        let f = class_a(1, n, 0.15, 3);
        let psi = CutoffFunction::band();
        let k_range = default_k_range(1, n);
        let lhs = square_function(&f, &psi, k_range, 2.0, n).unwrap();
        let mut rhs_sq = 0.0;
        for k in k_range.0..=k_range.1 {
            let part = apply_linear_multiplier(
                &UnivariateSymbol::from_cutoff_scaled(psi.clone(), k),
                &f,
                n,
            )
            .unwrap();
            rhs_sq += part.lp_norm(2.0).powi(2);
        }
        assert!((lhs * lhs - rhs_sq).abs() < 1e-12 * rhs_sq.max(1.0));
    }

    #[test]
    fn square_function_two_sided_at_p2() {
        let n = 64;
        let psi = CutoffFunction::band();
        let k_range = default_k_range(1, n);
        // numeric frame bounds of sum_k psi_k^2 on the grid spectrum
        let sidx = spectral_index(1, n);
        let (mut cmin, mut cmax) = (f64::INFINITY, 0.0_f64);
        for &s in sidx.values.iter().filter(|&&v| v > 0.0) {
            let mut sum = 0.0;
            for k in k_range.0..=k_range.1 {
                sum += psi.at_scale(k, s).powi(2);
            }
            cmin = cmin.min(sum);
            cmax = cmax.max(sum);
        }
        assert!(cmin > 0.0);
        for seed in 0..5 {
            let f = class_a(1, n, 0.15, seed);
            let s = square_function(&f, &psi, k_range, 2.0, n).unwrap();
            let l2 = f.lp_norm(2.0);
            assert!(s * s >= cmin * l2 * l2 - 1e-10);
            assert!(s * s <= cmax * l2 * l2 + 1e-10);
        }
    }

    #[test]
    fn square_function_trivial_cases() {
        let n = 32;
        let zero = LatticeSequence::zero(1);
        let psi = CutoffFunction::band();
        assert_eq!(square_function(&zero, &psi, (-4, 4), 2.0, n).unwrap(), 0.0);

        // a band cutoff with a real plateau; data supported where it equals 1
        // at scale 0 and no other scale touches it: S = |f|, norms agree
        let plat = CutoffFunction::plateau(0.5, 0.7, 1.4, 2.0);
        let mut values = vec![ZERO; n];
        let grid = TorusGrid::new(1, n, values.clone()).unwrap();
        let svals = grid.sin_abs_values();
        let mut hit = false;
        for (v, &s) in values.iter_mut().zip(&svals) {
            if (plat.value(s) - 1.0).abs() < 1e-15 {
                *v = Complex64::new(1.0, 0.5);
                hit = true;
            }
        }
        assert!(hit, "grid has a node where the plateau equals 1");
        let f = inverse_transform(&TorusGrid::new(1, n, values).unwrap());
        let s = square_function(&f, &plat, (0, 0), 2.0, n).unwrap();
        assert!((s - f.lp_norm(2.0)).abs() < 1e-10 * f.lp_norm(2.0));
    }

    #[test]
    fn maximal_function_dominates_single_scale() {
        let n = 64;
        let f = class_a(1, n, 0.15, 9);
        // phi with phi_1 = 1 on the whole spectrum [0, 2]: support [0, 4]
        let phi = CutoffFunction::lowpass(-1.0);
        let m = maximal_function(&f, &phi, (1, 1), n).unwrap();
        for (p, v) in f.iter() {
            assert!(m.get(*p).re + 1e-10 >= v.norm(), "at {p:?}");
        }
        let zero = LatticeSequence::zero(1);
        assert!(maximal_function(&zero, &phi, (0, 1), n).unwrap().is_empty());
    }

    #[test]
    fn split_sums_to_bilinear_identity_symbol() {
        let n = 64;
        let f1 = class_a(1, n, 0.15, 11);
        let f2 = class_a(1, n, 0.15, 12);
        let one = Symbol2D::one();
        let (t1, t2, t3) = paradiff_split(&one, &f1, &f2, 7.0, n).unwrap();
        let sum = t1.add(&t2).unwrap().add(&t3).unwrap();
        let prod = f1.pointwise_mul(&f2).unwrap();
        assert!(sum.l2_distance(&prod) <= 1e-11 * prod.lp_norm(2.0));
    }

    #[test]
    fn split_matches_bilinear_oracle_generic_symbol() {
        let n = 64;
        let f1 = class_a(1, n, 0.15, 13);
        let f2 = class_a(1, n, 0.15, 14);
        let m = parse_symbol("l1/(l1+l2)").unwrap();
        let b = 7.0;
        let (t1, t2, t3) = paradiff_split(&m, &f1, &f2, b, n).unwrap();
        let sum = t1.add(&t2).unwrap().add(&t3).unwrap();
        let full = bilinear_apply(&m, &f1, &f2, n).unwrap();
        assert!(sum.l2_distance(&full) <= 1e-11 * full.lp_norm(2.0));
    }

    #[test]
    fn split_off_diagonal_terms_vanish_for_single_band_pair() {
        let n = 64;
        // both inputs in the band |Sin| in (1, 2): adjacent scales only
        let mut rng = StdRng::seed_from_u64(5);
        let mut values = vec![ZERO; n];
        let grid = TorusGrid::new(1, n, values.clone()).unwrap();
        let svals = grid.sin_abs_values();
        for (v, &s) in values.iter_mut().zip(&svals) {
            if s > 1.0 && s < 2.0 {
                *v = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        let f = inverse_transform(&TorusGrid::new(1, n, values).unwrap());
        let m = Symbol2D::one();
        let (_, t2, t3) = paradiff_split(&m, &f, &f, 3.0, n).unwrap();
        assert!(t2.lp_norm(2.0) <= 1e-12);
        assert!(t3.lp_norm(2.0) <= 1e-12);
    }

    #[test]
    fn split_rejects_non_class_a() {
        let d0 = LatticeSequence::delta(1, [0, 0]); // full band incl. DC
        let m = Symbol2D::one();
        assert!(matches!(
            paradiff_split(&m, &d0, &d0, 2.0, 16),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pf_support_discrete_d1() {
        let n = 256;
        let cfg = PFConfig::discrete(1);
        assert!((cfg.b - 7.0).abs() < 1e-15);
        for k in -2..=2 {
            for seed in 0..3 {
                let f1 = class_a(1, n, 0.02, 100 + seed);
                let f2 = class_a(1, n, 0.02, 200 + seed);
                let out = check_pf_support(&f1, &f2, k, &cfg, n).unwrap();
                assert!(out.pass, "k={k} seed={seed} leaked={}", out.leaked_energy);
            }
        }
    }

    #[test]
    fn pf_band_piece_vanishes_above_spectral_top() {
        // psi_k(L) f2 = 0 exactly once 2^{k-1} > 2 sqrt(d)
        let n = 64;
        let cfg = PFConfig::discrete(1);
        let f1 = LatticeSequence::delta(1, [0, 0]);
        let f2 = LatticeSequence::delta(1, [1, 0]);
        for k in 3..6 {
            let band = UnivariateSymbol::from_cutoff_scaled(CutoffFunction::band(), k);
            let v = apply_linear_multiplier(&band, &f2, n).unwrap();
            assert!(v.is_empty(), "k={k}");
            let out = check_pf_support(&f1, &f2, k, &cfg, n).unwrap();
            assert!(out.product_zero && out.pass);
        }
    }

    #[test]
    fn pf_passes_even_for_full_band_inputs() {
        // deltas are not class A, but the cutoffs enforce the band themselves
        let n = 256;
        let cfg = PFConfig::discrete(1);
        let d0 = LatticeSequence::delta(1, [0, 0]);
        for k in 0..=2 {
            let out = check_pf_support(&d0, &d0, k, &cfg, n).unwrap();
            assert!(out.pass, "k={k} leaked={}", out.leaked_energy);
        }
    }
}
