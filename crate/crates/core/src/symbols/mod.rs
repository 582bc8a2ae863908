//! Bivariate multiplier symbols: parsing, evaluation, builtins, and
//! Mikhlin-Hormander norm estimation on dyadic grids.

mod cutoffs;
pub mod parser;

pub use cutoffs::{bump, smoothstep, CutoffFunction};

use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::sync::Arc;

type ClosureFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;
type DerivFn = Arc<dyn Fn(usize, usize, f64, f64) -> Complex64 + Send + Sync>;

enum SymbolKind {
    Expr(parser::Ast),
    Closure(ClosureFn),
}

/// A bivariate multiplier `m(l1, l2)` on `(0, inf)^2`.
///
/// Values are complex; expression-based symbols evaluate in real arithmetic.
/// Evaluation is pure and the type is safe to share across threads.
pub struct Symbol2D {
    name: String,
    params: BTreeMap<String, f64>,
    kind: SymbolKind,
    derivative: Option<DerivFn>,
    mh_smooth: bool,
}

impl std::fmt::Debug for Symbol2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Symbol2D")
            .field("name", &self.name)
            .field("params", &self.params)
            .finish()
    }
}

impl Clone for Symbol2D {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            params: self.params.clone(),
            kind: match &self.kind {
                SymbolKind::Expr(a) => SymbolKind::Expr(a.clone()),
                SymbolKind::Closure(c) => SymbolKind::Closure(c.clone()),
            },
            derivative: self.derivative.clone(),
            mh_smooth: self.mh_smooth,
        }
    }
}

impl Symbol2D {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    /// Registry marker: true when the symbol satisfies the Mikhlin-Hormander
    /// condition of every order (used to pick diagnostic corpora).
    pub fn is_mh_smooth(&self) -> bool {
        self.mh_smooth
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.derivative.is_some()
    }

    fn from_closure(name: &str, f: ClosureFn) -> Self {
        Self {
            name: name.to_string(),
            params: BTreeMap::new(),
            kind: SymbolKind::Closure(f),
            derivative: None,
            mh_smooth: false,
        }
    }

    /// The constant symbol `m == c`.
    pub fn constant(c: f64) -> Self {
        let mut s = Self::from_closure("one", Arc::new(move |_, _| Complex64::new(c, 0.0)));
        s.derivative = Some(Arc::new(move |a1, a2, _, _| {
            if a1 == 0 && a2 == 0 {
                Complex64::new(c, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }));
        s.mh_smooth = true;
        s
    }

    pub fn one() -> Self {
        Self::constant(1.0)
    }

    /// Evaluate at `(l1, l2)`, `l1, l2 > 0`. A non-finite value is reported as
    /// an evaluation failure with the offending point.
    pub fn eval(&self, l1: f64, l2: f64) -> Result<Complex64> {
        let v = match &self.kind {
            SymbolKind::Expr(ast) => match parser::eval(ast, l1, l2) {
                Ok(x) => Complex64::new(x, 0.0),
                Err(msg) => return Err(Error::SymbolEval { l1, l2, msg }),
            },
            SymbolKind::Closure(f) => f(l1, l2),
        };
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::SymbolEval {
                l1,
                l2,
                msg: "non-finite value".into(),
            });
        }
        Ok(v)
    }
}

/// Parse an expression-DSL symbol.
pub fn parse_symbol(expr: &str) -> Result<Symbol2D> {
    let ast = parser::parse(expr)?;
    Ok(Symbol2D {
        name: format!("expr:{expr}"),
        params: BTreeMap::new(),
        kind: SymbolKind::Expr(ast),
        derivative: None,
        mh_smooth: false,
    })
}

/// Evaluate a symbol at a point (free-function form of [`Symbol2D::eval`]).
pub fn eval_symbol(sym: &Symbol2D, l: (f64, f64)) -> Result<Complex64> {
    sym.eval(l.0, l.1)
}

/// `t^w` for `t >= 0` real and complex `w`, principal branch.
///
/// At `t = 0` the convention is `1` for `w = 0` and `0` otherwise (this covers
/// both `Re w > 0`, where it is the limit, and purely imaginary `w`, where no
/// limit exists).
pub fn real_base_cpow(t: f64, w: Complex64) -> Complex64 {
    if t == 0.0 {
        return if w == Complex64::new(0.0, 0.0) {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    (w * t.ln()).exp()
}

fn get_z(name: &str, params: &BTreeMap<String, f64>) -> Result<Complex64> {
    let re = params.get("s").or_else(|| params.get("zre")).copied();
    let im = params.get("v").or_else(|| params.get("zim")).copied();
    if re.is_none() && im.is_none() {
        return Err(Error::MissingParam {
            name: name.to_string(),
            param: "s (or zre/v/zim)".into(),
        });
    }
    Ok(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0)))
}

/// The quotient-power family behind the fractional Leibniz argument on the
/// lattice. `sign = +1` gives the sum branch, `sign = -1` the difference
/// branch; `swap` exchanges the roles of the two variables (the "tilde"
/// variants).
fn quotient_power(z: Complex64, sign: f64, swap: bool) -> ClosureFn {
    let phi = CutoffFunction::ratio_partition();
    let eta0 = CutoffFunction::low_eta0();
    Arc::new(move |l1: f64, l2: f64| {
        if l1 <= 0.0 || l2 <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (num_a, num_b, denom, ratio) = if swap {
            (l1, l2, l2, l1 / l2)
        } else {
            (l1, l2, l1, l2 / l1)
        };
        let cut = phi.value(ratio) * eta0.value(l1) * eta0.value(l2);
        if cut == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        // eta0 support keeps l <= 1/4, so the square roots stay real
        let a = num_a * (1.0 - num_b * num_b / 4.0).sqrt();
        let b = num_b * (1.0 - num_a * num_a / 4.0).sqrt();
        let core = (a + sign * b).abs();
        let w = 2.0 * z;
        cut * real_base_cpow(core, w) * real_base_cpow(denom, -w)
    })
}

/// Construct a builtin symbol from the documented registry.
///
/// Registry:
/// - `one`: the constant 1.
/// - `m11`, `m11t`, `m1m1`, `m1m1t`: quotient-power cutoff symbols
///   (parameter `z` via `s`/`zre` and `v`/`zim`).
/// - `sum_ratio`: `((l1+l2)^{2z}/l1^{2z}) phi(l2/l1)`, the radial profile used
///   in the Dunkl-side Leibniz argument.
/// - `phi_eta`: `phi(l2/l1) eta0(l1) eta0(l2)`.
/// - `abs_iv`: `|l|^{iv}` (parameter `v`).
/// - `sinlog`: `sin(log l1) sin(log l2)`, a bounded product symbol that
///   satisfies the Marcinkiewicz product condition but not the full
///   Mikhlin-Hormander condition.
pub fn builtin_symbol(name: &str, params: &BTreeMap<String, f64>) -> Result<Symbol2D> {
    let mut sym = match name {
        "one" => Symbol2D::one(),
        "m11" | "m11t" | "m1m1" | "m1m1t" => {
            let z = get_z(name, params)?;
            let sign = if name.starts_with("m11") { 1.0 } else { -1.0 };
            let swap = name.ends_with('t');
            let mut s = Symbol2D::from_closure(name, quotient_power(z, sign, swap));
            s.mh_smooth = z.im == 0.0;
            s
        }
        "sum_ratio" => {
            let z = get_z(name, params)?;
            let phi = CutoffFunction::ratio_partition();
            let mut s = Symbol2D::from_closure(
                name,
                Arc::new(move |l1: f64, l2: f64| {
                    if l1 <= 0.0 || l2 <= 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let cut = phi.value(l2 / l1);
                    if cut == 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    let w = 2.0 * z;
                    cut * real_base_cpow(l1 + l2, w) * real_base_cpow(l1, -w)
                }),
            );
            s.mh_smooth = z.im == 0.0;
            s
        }
        "phi_eta" => {
            let phi = CutoffFunction::ratio_partition();
            let eta0 = CutoffFunction::low_eta0();
            let mut s = Symbol2D::from_closure(
                name,
                Arc::new(move |l1: f64, l2: f64| {
                    if l1 <= 0.0 || l2 <= 0.0 {
                        return Complex64::new(0.0, 0.0);
                    }
                    Complex64::new(phi.value(l2 / l1) * eta0.value(l1) * eta0.value(l2), 0.0)
                }),
            );
            s.mh_smooth = true;
            s
        }
        "abs_iv" => {
            let v = *params.get("v").ok_or_else(|| Error::MissingParam {
                name: name.to_string(),
                param: "v".into(),
            })?;
            let mut s = Symbol2D::from_closure(
                name,
                Arc::new(move |l1: f64, l2: f64| {
                    let r = l1.hypot(l2);
                    real_base_cpow(r, Complex64::new(0.0, v))
                }),
            );
            s.mh_smooth = true;
            s
        }
        "sinlog" => Symbol2D::from_closure(
            name,
            Arc::new(|l1: f64, l2: f64| {
                if l1 <= 0.0 || l2 <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                Complex64::new(l1.ln().sin() * l2.ln().sin(), 0.0)
            }),
        ),
        other => return Err(Error::UnknownBuiltin(other.to_string())),
    };
    sym.name = name.to_string();
    sym.params = params.clone();
    Ok(sym)
}

/// Parse a CLI-facing symbol spec: `expr:<expression>` or
/// `builtin:<name>[:key=value,...]`.
pub fn parse_symbol_spec(spec: &str) -> Result<Symbol2D> {
    if let Some(expr) = spec.strip_prefix("expr:") {
        return parse_symbol(expr);
    }
    if let Some(rest) = spec.strip_prefix("builtin:") {
        let mut parts = rest.splitn(2, ':');
        let name = parts.next().unwrap_or_default();
        let mut params = BTreeMap::new();
        if let Some(kvs) = parts.next() {
            for kv in kvs.split(',') {
                if kv.is_empty() {
                    continue;
                }
                let (k, v) = kv.split_once('=').ok_or_else(|| Error::InvalidArgument(
                    format!("builtin parameter `{kv}` is not of the form key=value"),
                ))?;
                let val: f64 = v.parse().map_err(|_| {
                    Error::InvalidArgument(format!("parameter `{k}` has non-numeric value `{v}`"))
                })?;
                params.insert(k.to_string(), val);
            }
        }
        return builtin_symbol(name, &params);
    }
    Err(Error::InvalidArgument(format!(
        "symbol spec `{spec}` must start with `expr:` or `builtin:`"
    )))
}

/// A univariate multiplier `mu(lambda)` on `[0, inf)`.
#[derive(Clone)]
pub struct UnivariateSymbol {
    name: String,
    kind: UniKind,
}

#[derive(Clone)]
enum UniKind {
    Constant(Complex64),
    /// `lambda^{w}` with the `real_base_cpow` convention at 0.
    Power(Complex64),
    Cutoff(CutoffFunction),
    CutoffScaled(CutoffFunction, i32),
    Closure(Arc<dyn Fn(f64) -> Complex64 + Send + Sync>),
}

impl std::fmt::Debug for UnivariateSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "UnivariateSymbol({})", self.name)
    }
}

impl UnivariateSymbol {
    pub fn constant(c: f64) -> Self {
        Self {
            name: format!("const({c})"),
            kind: UniKind::Constant(Complex64::new(c, 0.0)),
        }
    }

    /// `mu(lambda) = lambda^w`, principal branch, `mu(0) = 0` unless `w = 0`.
    pub fn power(w: Complex64) -> Self {
        Self {
            name: format!("power({w})"),
            kind: UniKind::Power(w),
        }
    }

    pub fn from_cutoff(c: CutoffFunction) -> Self {
        Self {
            name: format!("cutoff({})", c.name()),
            kind: UniKind::Cutoff(c),
        }
    }

    /// The dyadic dilate `lambda -> c(2^{-k} lambda)`.
    pub fn from_cutoff_scaled(c: CutoffFunction, k: i32) -> Self {
        Self {
            name: format!("cutoff({},k={k})", c.name()),
            kind: UniKind::CutoffScaled(c, k),
        }
    }

    pub fn from_fn(name: &str, f: Arc<dyn Fn(f64) -> Complex64 + Send + Sync>) -> Self {
        Self {
            name: name.to_string(),
            kind: UniKind::Closure(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, lambda: f64) -> Result<Complex64> {
        let v = match &self.kind {
            UniKind::Constant(c) => *c,
            UniKind::Power(w) => real_base_cpow(lambda, *w),
            UniKind::Cutoff(c) => Complex64::new(c.value(lambda), 0.0),
            UniKind::CutoffScaled(c, k) => Complex64::new(c.at_scale(*k, lambda), 0.0),
            UniKind::Closure(f) => f(lambda),
        };
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::SymbolEval {
                l1: lambda,
                l2: f64::NAN,
                msg: "non-finite univariate symbol value".into(),
            });
        }
        Ok(v)
    }
}

/// Dyadic evaluation grid for the Mikhlin-Hormander estimator:
/// `lambda in { 2^(k/per_octave) : |k| <= per_octave * k_max }` per axis.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MHGridSpec {
    pub k_max: u32,
    pub per_octave: u32,
}

impl Default for MHGridSpec {
    fn default() -> Self {
        Self {
            k_max: 10,
            per_octave: 8,
        }
    }
}

impl MHGridSpec {
    pub fn lambdas(&self) -> Vec<f64> {
        let m = (self.k_max * self.per_octave) as i64;
        (-m..=m)
            .map(|k| (k as f64 / self.per_octave as f64).exp2())
            .collect()
    }
}

/// Result of a grid-based Mikhlin-Hormander norm estimate.
#[derive(Debug, Clone, Serialize)]
pub struct MHReport {
    pub order_s: usize,
    pub norm_estimate: f64,
    pub grid: MHGridSpec,
    /// `(|alpha|, sup over the grid of |lambda|^{|alpha|} |d^alpha m|)`,
    /// maximised over multi-indices of each total order.
    pub per_order_sups: Vec<(usize, f64)>,
}

fn fd_step(x: f64) -> f64 {
    (1e-5_f64).max(1e-5 * x)
}

/// `d^(a1,a2) m` by nested second-order central differences, with the
/// scale-aware step. Uses the analytic derivative evaluator when present.
fn partial(sym: &Symbol2D, a1: usize, a2: usize, l1: f64, l2: f64) -> Result<Complex64> {
    if let Some(d) = &sym.derivative {
        return Ok(d(a1, a2, l1, l2));
    }
    if a1 > 0 {
        let h = fd_step(l1);
        let hi = partial(sym, a1 - 1, a2, l1 + h, l2)?;
        let lo = partial(sym, a1 - 1, a2, l1 - h, l2)?;
        Ok((hi - lo) / (2.0 * h))
    } else if a2 > 0 {
        let h = fd_step(l2);
        let hi = partial(sym, a1, a2 - 1, l1, l2 + h)?;
        let lo = partial(sym, a1, a2 - 1, l1, l2 - h)?;
        Ok((hi - lo) / (2.0 * h))
    } else {
        sym.eval(l1, l2)
    }
}

/// Estimate the Mikhlin-Hormander norm of order `s` on the dyadic grid.
pub fn estimate_mh_norm(sym: &Symbol2D, s: usize, grid: MHGridSpec) -> Result<MHReport> {
    let lambdas = grid.lambdas();
    let per_order: Vec<Result<f64>> = (0..=s)
        .map(|j| {
            let sups: Result<Vec<f64>> = lambdas
                .par_iter()
                .map(|&l1| {
                    let mut row_sup = 0.0_f64;
                    for &l2 in &lambdas {
                        let r = l1.hypot(l2);
                        for a1 in 0..=j {
                            let a2 = j - a1;
                            let d = partial(sym, a1, a2, l1, l2)?;
                            row_sup = row_sup.max(r.powi(j as i32) * d.norm());
                        }
                    }
                    Ok(row_sup)
                })
                .collect();
            Ok(sups?.into_iter().fold(0.0, f64::max))
        })
        .collect();
    let mut per_order_sups = Vec::with_capacity(s + 1);
    for (j, r) in per_order.into_iter().enumerate() {
        per_order_sups.push((j, r?));
    }
    let norm_estimate = per_order_sups.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    Ok(MHReport {
        order_s: s,
        norm_estimate,
        grid,
        per_order_sups,
    })
}
