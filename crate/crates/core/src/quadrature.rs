//! Gauss-Legendre rules and composite panel quadrature.

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `(-1, 1)`,
/// by Newton iteration on the Legendre recurrence. Stable into the tens of
/// thousands of nodes.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_n(x) and its derivative by the three-term recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `n`-point Gauss-Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    x.iter()
        .zip(&w)
        .map(|(&xi, &wi)| (mid + half * xi, half * wi))
        .collect()
}

/// Composite rule: `pts`-point Gauss-Legendre on each panel
/// `[edges[i], edges[i+1]]`.
pub fn composite_on_edges(edges: &[f64], pts: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(pts * (edges.len().saturating_sub(1)));
    for win in edges.windows(2) {
        out.extend(gauss_legendre_on(pts, win[0], win[1]));
    }
    out
}

/// `panels + 1` uniformly spaced edges on `[a, b]`.
pub fn uniform_edges(a: f64, b: f64, panels: usize) -> Vec<f64> {
    (0..=panels)
        .map(|i| a + (b - a) * i as f64 / panels as f64)
        .collect()
}

/// `panels + 1` geometrically spaced edges on `[a, b]`, `0 < a < b`.
pub fn log_edges(a: f64, b: f64, panels: usize) -> Vec<f64> {
    assert!(a > 0.0 && b > a);
    let la = a.ln();
    let lb = b.ln();
    (0..=panels)
        .map(|i| (la + (lb - la) * i as f64 / panels as f64).exp())
        .collect()
}
