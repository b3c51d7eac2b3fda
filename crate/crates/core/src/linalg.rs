//! Small dense symmetric eigensolver (cyclic Jacobi).
//!
//! The transport generators and coherence kernels are N x N with N of order
//! tens, so a Jacobi sweep is simple, robust and accurate to machine
//! precision; no external LAPACK needed.

use ndarray::Array2;

/// Eigen-decomposition of a symmetric matrix: `a = q diag(values) q^T`,
/// eigenvalues ascending, eigenvectors in the columns of `q`.
pub fn symmetric_eigen(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "matrix must be square");
    let mut m = a.clone();
    let mut q = Array2::<f64>::eye(n);
    if n == 1 {
        return (vec![m[[0, 0]]], q);
    }

    let scale: f64 = m.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1.0);
    for _sweep in 0..64 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for r in (p + 1)..n {
                off += m[[p, r]] * m[[p, r]];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n - 1 {
            for r in (p + 1)..n {
                let apq = m[[p, r]];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[[r, r]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rows/cols p and r of m
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkr = m[[k, r]];
                    m[[k, p]] = c * mkp - s * mkr;
                    m[[k, r]] = s * mkp + c * mkr;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mrk = m[[r, k]];
                    m[[p, k]] = c * mpk - s * mrk;
                    m[[r, k]] = s * mpk + c * mrk;
                }
                for k in 0..n {
                    let qkp = q[[k, p]];
                    let qkr = q[[k, r]];
                    q[[k, p]] = c * qkp - s * qkr;
                    q[[k, r]] = s * qkp + c * qkr;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[[i, i]]).collect();
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vectors[[k, new]] = q[[k, old]];
        }
    }
    (values, vectors)
}
