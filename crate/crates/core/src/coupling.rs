//! Source coherence, apertures and the mode-coupling matrices S and D.
//!
//! `S_{jl}` projects the source coherence kernel theta onto mode pairs over
//! the source aperture; `D_{jl}` restricts mode products to the detector
//! aperture. Their diagonals weight the Phi kernel sums, and the scalars
//! `C_D = tr(D)/N` and `C_S = (sum_j S_jj beta_j)^2 / (N(N+1))` are the only
//! way apertures enter the strongly scattered imaging functions.

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::quadrature::{oscillatory_node_count, GaussLegendre};
use crate::waveguide::ModeBasis;
use ndarray::Array2;
use std::f64::consts::PI;

/// Default quadrature density for kernel integrals (nodes per carrier
/// wavelength and per dimension).
pub const DEFAULT_NODES_PER_WAVELENGTH: f64 = 4.0;

/// A transverse interval `[lo, hi]` inside the cross-section `[0, X]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aperture {
    lo: f64,
    hi: f64,
}

impl Aperture {
    pub fn new(lo: f64, hi: f64, width: f64) -> Result<Self> {
        if !(0.0 <= lo && lo < hi && hi <= width) {
            return Err(Error::Domain {
                quantity: "aperture",
                value: if lo < 0.0 { lo } else { hi },
                lo: 0.0,
                hi: width,
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn full(width: f64) -> Self {
        Self {
            lo: 0.0,
            hi: width,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Spatial coherence of the source.
#[derive(Debug, Clone)]
pub enum SourceCoherence {
    /// Delta-correlated source: `theta(xi, xi') = delta(xi - xi')` on the
    /// aperture. Collapses the double integral; handled analytically.
    Incoherent,
    /// `theta(xi, xi') = exp(-(xi - xi')^2 / (2 corr^2))` on the aperture.
    Gaussian { correlation_length: f64 },
    /// Tabulated symmetric positive semidefinite kernel on a uniform grid.
    Grid(GridKernel),
}

/// Sampled coherence kernel `theta(x_p, x_q)` on a uniform grid.
#[derive(Debug, Clone)]
pub struct GridKernel {
    points: Vec<f64>,
    values: Array2<f64>,
}

impl GridKernel {
    /// Validates grid uniformity, symmetry (1e-12) and positive
    /// semidefiniteness (eigenvalue floor at -1e-8 of the top eigenvalue).
    pub fn new(points: Vec<f64>, values: Array2<f64>) -> Result<Self> {
        let m = points.len();
        if m < 2 {
            return Err(Error::InvalidKernel(
                "grid kernel needs at least two sample points".into(),
            ));
        }
        if values.nrows() != m || values.ncols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: values.nrows(),
            });
        }
        let h = points[1] - points[0];
        if h <= 0.0 {
            return Err(Error::InvalidKernel("grid points must increase".into()));
        }
        for w in points.windows(2) {
            if ((w[1] - w[0]) - h).abs() > 1e-9 * h {
                return Err(Error::InvalidKernel("grid must be uniform".into()));
            }
        }
        let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
        for p in 0..m {
            for q in (p + 1)..m {
                if (values[[p, q]] - values[[q, p]]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidKernel(format!(
                        "kernel not symmetric at ({p}, {q})"
                    )));
                }
            }
        }
        let (eigvals, _) = symmetric_eigen(&values);
        let max_ev = eigvals.iter().cloned().fold(f64::MIN, f64::max);
        let min_ev = eigvals.iter().cloned().fold(f64::MAX, f64::min);
        if min_ev < -1e-8 * max_ev.max(0.0) {
            return Err(Error::InvalidKernel(format!(
                "kernel not positive semidefinite: min eigenvalue {min_ev:.3e}, max {max_ev:.3e}"
            )));
        }
        Ok(Self { points, values })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }
}

/// Partially coherent source over an aperture.
#[derive(Debug, Clone)]
pub struct SourceModel {
    pub aperture: Aperture,
    pub coherence: SourceCoherence,
    /// Quadrature density for non-analytic kernels (nodes per wavelength).
    pub nodes_per_wavelength: f64,
}

impl SourceModel {
    pub fn new(aperture: Aperture, coherence: SourceCoherence) -> Self {
        Self {
            aperture,
            coherence,
            nodes_per_wavelength: DEFAULT_NODES_PER_WAVELENGTH,
        }
    }

    pub fn incoherent(aperture: Aperture) -> Self {
        Self::new(aperture, SourceCoherence::Incoherent)
    }

    pub fn with_quadrature_density(mut self, nodes_per_wavelength: f64) -> Self {
        self.nodes_per_wavelength = nodes_per_wavelength;
        self
    }
}

/// Energy-flux detector over an aperture.
#[derive(Debug, Clone)]
pub struct DetectorModel {
    pub aperture: Aperture,
}

impl DetectorModel {
    pub fn new(aperture: Aperture) -> Self {
        Self { aperture }
    }
}

/// Exact overlap `int_a^b phi_j(x) phi_l(x) dx` of two mode shapes.
pub fn mode_overlap(width: f64, j: usize, l: usize, a: f64, b: f64) -> f64 {
    let sine_term = |m: i64| -> f64 {
        // int cos(pi m x / X) dx / X  from a to b
        if m == 0 {
            (b - a) / width
        } else {
            let f = PI * m as f64 / width;
            ((f * b).sin() - (f * a).sin()) / (PI * m as f64)
        }
    };
    sine_term(j as i64 - l as i64) - sine_term((j + l) as i64)
}

/// Source coupling matrix `S_{jl} = iint theta(xi, xi') phi_j(xi) phi_l(xi')`.
pub fn source_coupling_matrix(source: &SourceModel, basis: &ModeBasis) -> Result<Array2<f64>> {
    let n = basis.mode_count();
    let width = basis.geometry().width;
    let (lo, hi) = (source.aperture.lo(), source.aperture.hi());
    if hi > width {
        return Err(Error::Domain {
            quantity: "source aperture",
            value: hi,
            lo: 0.0,
            hi: width,
        });
    }
    let mut s = Array2::<f64>::zeros((n, n));
    match &source.coherence {
        SourceCoherence::Incoherent => {
            // the delta kernel collapses to the single overlap integral
            for j in 0..n {
                for l in j..n {
                    let v = mode_overlap(width, j + 1, l + 1, lo, hi);
                    s[[j, l]] = v;
                    s[[l, j]] = v;
                }
            }
        }
        SourceCoherence::Gaussian { correlation_length } => {
            if !(correlation_length > &0.0) {
                return Err(Error::InvalidKernel(
                    "gaussian correlation length must be positive".into(),
                ));
            }
            let nodes = oscillatory_node_count(
                hi - lo,
                basis.geometry().wavelength(),
                source.nodes_per_wavelength,
                24,
            );
            let rule = GaussLegendre::new(nodes);
            let pts: Vec<(f64, f64)> = rule.mapped(lo, hi).collect();
            let m = pts.len();
            // phi_j at all nodes
            let mut shapes = Array2::<f64>::zeros((n, m));
            for (p, &(x, _)) in pts.iter().enumerate() {
                for j in 0..n {
                    shapes[[j, p]] = basis.shape(j + 1, x);
                }
            }
            let inv2c2 = 1.0 / (2.0 * correlation_length * correlation_length);
            let mut theta_w = Array2::<f64>::zeros((m, m));
            for (p, &(xp, wp)) in pts.iter().enumerate() {
                for (q, &(xq, wq)) in pts.iter().enumerate() {
                    let d = xp - xq;
                    theta_w[[p, q]] = wp * wq * (-d * d * inv2c2).exp();
                }
            }
            let tmp = shapes.dot(&theta_w); // (n, m)
            let full = tmp.dot(&shapes.t()); // (n, n)
            for j in 0..n {
                for l in j..n {
                    let v = 0.5 * (full[[j, l]] + full[[l, j]]);
                    s[[j, l]] = v;
                    s[[l, j]] = v;
                }
            }
        }
        SourceCoherence::Grid(kernel) => {
            let pts = kernel.points();
            if pts[0] < lo - 1e-12 * width || *pts.last().unwrap() > hi + 1e-12 * width {
                return Err(Error::InvalidKernel(
                    "grid kernel samples fall outside the source aperture".into(),
                ));
            }
            let m = pts.len();
            let h = pts[1] - pts[0];
            // trapezoid weights on the sample grid (the kernel is the data)
            let wts: Vec<f64> = (0..m)
                .map(|p| if p == 0 || p == m - 1 { 0.5 * h } else { h })
                .collect();
            let mut shapes = Array2::<f64>::zeros((n, m));
            for (p, &x) in pts.iter().enumerate() {
                for j in 0..n {
                    shapes[[j, p]] = basis.shape(j + 1, x);
                }
            }
            let mut theta_w = kernel.values().clone();
            for p in 0..m {
                for q in 0..m {
                    theta_w[[p, q]] *= wts[p] * wts[q];
                }
            }
            let full = shapes.dot(&theta_w).dot(&shapes.t());
            for j in 0..n {
                for l in j..n {
                    let v = 0.5 * (full[[j, l]] + full[[l, j]]);
                    s[[j, l]] = v;
                    s[[l, j]] = v;
                }
            }
        }
    }
    Ok(s)
}

/// Detector coupling matrix `D_{jl} = int_det phi_j phi_l`, exact.
pub fn detector_coupling_matrix(detector: &DetectorModel, basis: &ModeBasis) -> Array2<f64> {
    let n = basis.mode_count();
    let width = basis.geometry().width;
    let (lo, hi) = (detector.aperture.lo(), detector.aperture.hi());
    let mut d = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        for l in j..n {
            let v = mode_overlap(width, j + 1, l + 1, lo, hi);
            d[[j, l]] = v;
            d[[l, j]] = v;
        }
    }
    d
}

/// The aperture constants `C_D = tr(D)/N` and
/// `C_S = (sum_j S_jj beta_j)^2 / (N (N+1))`.
pub fn coupling_constants(s: &Array2<f64>, d: &Array2<f64>, basis: &ModeBasis) -> (f64, f64) {
    let n = basis.mode_count();
    let c_d = (0..n).map(|m| d[[m, m]]).sum::<f64>() / n as f64;
    let weighted: f64 = (0..n).map(|j| s[[j, j]] * basis.beta(j + 1)).sum();
    let c_s = weighted * weighted / (n as f64 * (n + 1) as f64);
    (c_d, c_s)
}

/// S, D and their scalar constants, assembled for one mode basis.
#[derive(Debug, Clone)]
pub struct CouplingMatrices {
    pub s: Array2<f64>,
    pub d: Array2<f64>,
    pub c_d: f64,
    pub c_s: f64,
}

impl CouplingMatrices {
    pub fn assemble(
        source: &SourceModel,
        detector: &DetectorModel,
        basis: &ModeBasis,
    ) -> Result<Self> {
        let s = source_coupling_matrix(source, basis)?;
        let d = detector_coupling_matrix(detector, basis);
        let (c_d, c_s) = coupling_constants(&s, &d, basis);
        Ok(Self { s, d, c_d, c_s })
    }

    /// Identity S and D (incoherent full-aperture source, full detector).
    pub fn identity(basis: &ModeBasis) -> Self {
        let n = basis.mode_count();
        let s = Array2::<f64>::eye(n);
        let d = Array2::<f64>::eye(n);
        let (c_d, c_s) = coupling_constants(&s, &d, basis);
        Self { s, d, c_d, c_s }
    }

    pub fn mode_count(&self) -> usize {
        self.s.nrows()
    }

    pub fn s_diag(&self) -> Vec<f64> {
        (0..self.mode_count()).map(|j| self.s[[j, j]]).collect()
    }

    pub fn d_diag(&self) -> Vec<f64> {
        (0..self.mode_count()).map(|j| self.d[[j, j]]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveguide::WaveguideGeometry;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn basis40() -> ModeBasis {
        let g = WaveguideGeometry::from_mode_ratio(40.5, 1.0).unwrap();
        ModeBasis::new(&g).unwrap()
    }

    #[test]
    fn incoherent_full_aperture_gives_identity() {
        let basis = basis40();
        let width = basis.geometry().width;
        let source = SourceModel::incoherent(Aperture::full(width));
        let s = source_coupling_matrix(&source, &basis).unwrap();
        for j in 0..40 {
            for l in 0..40 {
                let expect = if j == l { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(s[[j, l]], expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn full_detector_gives_identity() {
        let basis = basis40();
        let width = basis.geometry().width;
        let d = detector_coupling_matrix(&DetectorModel::new(Aperture::full(width)), &basis);
        for j in 0..40 {
            for l in 0..40 {
                let expect = if j == l { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(d[[j, l]], expect, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn partial_aperture_diagonal_matches_closed_form() {
        // D_jj = (a/X) [1 - sinc(2 j pi a / X)]
        let basis = basis40();
        let width = basis.geometry().width;
        let a = 0.37 * width;
        let d = detector_coupling_matrix(
            &DetectorModel::new(Aperture::new(0.0, a, width).unwrap()),
            &basis,
        );
        for j in 1..=40 {
            let t = 2.0 * j as f64 * PI * a / width;
            let expect = (a / width) * (1.0 - t.sin() / t);
            assert_relative_eq!(d[[j - 1, j - 1]], expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn half_aperture_off_diagonal_sine_integral() {
        // int_0^{X/2} phi_1 phi_2 = 4 / (3 pi)
        let basis = basis40();
        let width = basis.geometry().width;
        let d = detector_coupling_matrix(
            &DetectorModel::new(Aperture::new(0.0, width / 2.0, width).unwrap()),
            &basis,
        );
        assert_relative_eq!(d[[0, 1]], 4.0 / (3.0 * PI), max_relative = 1e-12);
        assert_relative_eq!(d[[1, 0]], d[[0, 1]], max_relative = 1e-15);
    }

    #[test]
    fn quadrature_oracle_for_incoherent_partial_aperture() {
        // closed-form overlaps vs direct Gauss-Legendre integration
        let basis = basis40();
        let width = basis.geometry().width;
        let (lo, hi) = (0.13 * width, 0.78 * width);
        let rule = GaussLegendre::new(600);
        for (j, l) in [(1, 1), (1, 2), (7, 19), (40, 40), (39, 40)] {
            let direct = rule.integrate(lo, hi, |x| basis.shape(j, x) * basis.shape(l, x));
            assert_abs_diff_eq!(mode_overlap(width, j, l, lo, hi), direct, epsilon = 1e-10);
        }
    }

    #[test]
    fn gaussian_long_correlation_tends_to_rank_one() {
        let basis = basis40();
        let width = basis.geometry().width;
        let source = SourceModel::new(
            Aperture::full(width),
            SourceCoherence::Gaussian {
                correlation_length: 1e7 * width,
            },
        )
        .with_quadrature_density(12.0);
        let s = source_coupling_matrix(&source, &basis).unwrap();
        // rank-one limit: S_{jl} -> (int phi_j)(int phi_l)
        let moment = |j: usize| -> f64 {
            let jf = j as f64;
            (2.0 * width).sqrt() / (PI * jf) * (1.0 - (PI * jf).cos())
        };
        for (j, l) in [(1, 1), (1, 3), (3, 5), (2, 2), (1, 40)] {
            let expect = moment(j) * moment(l);
            assert_abs_diff_eq!(s[[j - 1, l - 1]], expect, epsilon = 2e-4 * width);
        }
    }

    #[test]
    fn gaussian_kernel_matrix_is_psd() {
        let basis = basis40();
        let width = basis.geometry().width;
        let source = SourceModel::new(
            Aperture::new(0.1 * width, 0.8 * width, width).unwrap(),
            SourceCoherence::Gaussian {
                correlation_length: 0.05 * width,
            },
        );
        let s = source_coupling_matrix(&source, &basis).unwrap();
        let (eigvals, _) = symmetric_eigen(&s);
        let max_ev = eigvals.iter().cloned().fold(f64::MIN, f64::max);
        assert!(eigvals[0] >= -1e-10 * max_ev);
        // restriction bound on the diagonal
        for j in 0..40 {
            assert!(s[[j, j]] >= -1e-12);
        }
    }

    #[test]
    fn grid_kernel_validation() {
        let pts: Vec<f64> = (0..9).map(|i| i as f64 / 8.0).collect();
        // symmetric PSD kernel (gaussian samples)
        let mut v = Array2::<f64>::zeros((9, 9));
        for p in 0..9 {
            for q in 0..9 {
                let d: f64 = pts[p] - pts[q];
                v[[p, q]] = (-d * d / 0.02).exp();
            }
        }
        assert!(GridKernel::new(pts.clone(), v.clone()).is_ok());

        let mut asym = v.clone();
        asym[[0, 3]] += 1e-3;
        assert!(matches!(
            GridKernel::new(pts.clone(), asym),
            Err(Error::InvalidKernel(_))
        ));

        // indefinite symmetric kernel must be rejected
        let mut indef = Array2::<f64>::zeros((9, 9));
        for p in 0..9 {
            for q in 0..9 {
                indef[[p, q]] = if p == q { -1.0 } else { 0.0 };
            }
        }
        assert!(matches!(
            GridKernel::new(pts, indef),
            Err(Error::InvalidKernel(_))
        ));
    }

    #[test]
    fn grid_kernel_source_matches_incoherent_scaling() {
        // a narrow tabulated gaussian behaves like a mildly coherent source:
        // S stays symmetric and its diagonal stays nonnegative
        let basis = basis40();
        let width = basis.geometry().width;
        let m = 321;
        let pts: Vec<f64> = (0..m).map(|i| i as f64 * width / (m - 1) as f64).collect();
        let corr = 0.02 * width;
        let mut v = Array2::<f64>::zeros((m, m));
        for p in 0..m {
            for q in 0..m {
                let d: f64 = pts[p] - pts[q];
                v[[p, q]] = (-d * d / (2.0 * corr * corr)).exp();
            }
        }
        let kernel = GridKernel::new(pts, v).unwrap();
        let grid_source =
            SourceModel::new(Aperture::full(width), SourceCoherence::Grid(kernel));
        let s_grid = source_coupling_matrix(&grid_source, &basis).unwrap();

        let gauss_source = SourceModel::new(
            Aperture::full(width),
            SourceCoherence::Gaussian {
                correlation_length: corr,
            },
        )
        .with_quadrature_density(12.0);
        let s_gauss = source_coupling_matrix(&gauss_source, &basis).unwrap();

        for j in 0..40 {
            assert!(s_grid[[j, j]] >= -1e-10);
            assert_relative_eq!(s_grid[[j, j]], s_gauss[[j, j]], max_relative = 2e-2);
        }
    }

    #[test]
    fn constants_for_identity_matrices() {
        let basis = basis40();
        let cm = CouplingMatrices::identity(&basis);
        assert_relative_eq!(cm.c_d, 1.0, max_relative = 1e-15);
        let sum_beta: f64 = basis.betas().iter().sum();
        assert_relative_eq!(
            cm.c_s,
            sum_beta * sum_beta / (40.0 * 41.0),
            max_relative = 1e-14
        );
    }

    #[test]
    fn c_s_equals_theta_phi1_double_integral() {
        // C_S = [iint theta Phi_1]^2 / (N(N+1)) for the incoherent kernel:
        // iint delta(xi-xi') Phi_1(xi,xi') = int Phi_1(xi,xi) = sum_j S_jj beta_j
        let basis = basis40();
        let width = basis.geometry().width;
        let ap = Aperture::new(0.0, 0.4 * width, width).unwrap();
        let source = SourceModel::incoherent(ap);
        let s = source_coupling_matrix(&source, &basis).unwrap();
        let d = detector_coupling_matrix(&DetectorModel::new(Aperture::full(width)), &basis);
        let (_, c_s) = coupling_constants(&s, &d, &basis);

        let rule = GaussLegendre::new(800);
        let diag_phi1 = rule.integrate(ap.lo(), ap.hi(), |x| {
            (1..=40)
                .map(|j| basis.beta(j) * basis.shape(j, x) * basis.shape(j, x))
                .sum::<f64>()
        });
        assert_relative_eq!(c_s, diag_phi1 * diag_phi1 / (40.0 * 41.0), max_relative = 1e-9);
    }

    #[test]
    fn c_d_tracks_detector_fraction() {
        // C_D approaches a_d/X from below as the aperture widens; the
        // agreement is within 2% only for wide apertures (the low modes
        // violate D_jj ~ a_d/X when a_d is a small fraction of X).
        let basis = basis40();
        let width = basis.geometry().width;
        let mut prev = 0.0;
        for frac in [0.1, 0.2, 0.3, 0.5, 0.8, 1.0] {
            let d = detector_coupling_matrix(
                &DetectorModel::new(Aperture::new(0.0, frac * width, width).unwrap()),
                &basis,
            );
            let c_d = (0..40).map(|m| d[[m, m]]).sum::<f64>() / 40.0;
            assert!(c_d >= prev, "C_D must be nondecreasing in a_d");
            prev = c_d;
            for m in 0..40 {
                assert!((-1e-12..=1.0 + 1e-12).contains(&d[[m, m]]));
            }
            if frac >= 0.8 {
                assert_relative_eq!(c_d, frac, max_relative = 0.02);
            }
        }
    }
}
