//! Gauss-Legendre quadrature for the aperture and reflectivity integrals.
//!
//! Node counts follow the oscillation of the integrands: the mode products
//! `phi_j phi_l` oscillate at up to `N pi / X`, so rules are sized per
//! wavelength rather than per polynomial degree.

use std::f64::consts::PI;

/// Nodes and weights of an `n`-point Gauss-Legendre rule on [-1, 1].
///
/// Newton iteration on the Legendre polynomial `P_n`, seeded with the
/// Chebyshev-like asymptotic roots; converges to machine precision in a
/// handful of steps for any practical `n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // root estimate (Abramowitz & Stegun 22.16.6)
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                let (_, d2) = legendre_with_derivative(n, x);
                dp = d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_with_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A reusable rule mapped onto arbitrary intervals.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Mapped nodes and weights on [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Node count for an oscillatory integrand: `per_wavelength` nodes per
/// `wavelength` over `length`, at least `min_nodes`.
pub fn oscillatory_node_count(
    length: f64,
    wavelength: f64,
    per_wavelength: f64,
    min_nodes: usize,
) -> usize {
    let n = (length / wavelength * per_wavelength).ceil() as usize;
    n.max(min_nodes)
}

/// Outcome of an adaptive integration; `converged = false` flags a
/// quadrature warning (the value is still usable, with `rel_error` attached).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub rel_error: f64,
    pub converged: bool,
}

/// Composite Gauss-Legendre with an 8-node rule per panel.
fn composite(f: &impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &GaussLegendre) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        acc += rule.integrate(lo, lo + h, f);
    }
    acc
}

/// Integrates `f` on `[a, b]` with a composite Gauss-Legendre rule,
/// doubling the panel count (Richardson comparison of two node counts)
/// until the relative change drops below `rel_tol` or the refinement cap is
/// reached. `initial_nodes` sets the first total node budget.
pub fn smooth_quadrature(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    initial_nodes: usize,
    rel_tol: f64,
    max_refinements: u32,
) -> QuadratureResult {
    const PANEL_NODES: usize = 8;
    let rule = GaussLegendre::new(PANEL_NODES);
    let mut panels = initial_nodes.div_ceil(PANEL_NODES).max(1);
    let mut prev = composite(&f, a, b, panels, &rule);
    let mut rel = f64::INFINITY;
    for refinement in 0..=max_refinements {
        panels *= 2;
        let next = composite(&f, a, b, panels, &rule);
        let scale = next.abs().max(prev.abs()).max(f64::MIN_POSITIVE);
        rel = (next - prev).abs() / scale;
        prev = next;
        if rel <= rel_tol {
            return QuadratureResult {
                value: next,
                rel_error: rel,
                converged: true,
            };
        }
        if refinement == max_refinements {
            break;
        }
    }
    log::warn!(
        "quadrature did not reach rel_tol {rel_tol:.2e} on [{a}, {b}]: rel change {rel:.2e}"
    );
    QuadratureResult {
        value: prev,
        rel_error: rel,
        converged: false,
    }
}
