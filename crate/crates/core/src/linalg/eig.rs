//! Cyclic Jacobi eigensolver for Hermitian matrices.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-14;
const HERMITIAN_TOL: f64 = 1e-8;

/// Eigendecomposition `m = V diag(values) V†`, eigenvalues sorted nonincreasing.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_values(|x| x)
    }

    /// `V f(D) V†`
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fv: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * fv[k]).sum()
        })
    }
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEig> {
    check_hermitian(m)?;
    let (values, vectors) = jacobi(m, true);
    Ok(HermitianEig {
        values,
        vectors: vectors.expect("vectors requested"),
    })
}

/// Eigenvalues only (nonincreasing); skips accumulating the rotation.
pub fn hermitian_eigvals(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    Ok(jacobi(m, false).0)
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "{}x{} matrix is not square",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::InvalidMatrix("non-finite entry".into()));
    }
    let herm = m.hermiticity_error();
    let scale = m.max_abs().max(1.0);
    if herm > HERMITIAN_TOL * scale {
        return Err(Error::InvalidMatrix(format!(
            "not Hermitian (deviation {herm:.3e})"
        )));
    }
    Ok(())
}

fn jacobi(m: &ComplexMatrix, want_vectors: bool) -> (Vec<f64>, Option<ComplexMatrix>) {
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    let fro = a.frobenius_norm();
    let target = OFF_DIAGONAL_TOL * fro;

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= target || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let gabs = g.norm();
                if gabs == 0.0 || gabs < 1e-300 {
                    continue;
                }
                rotate(&mut a, v.as_mut(), p, q, g, gabs);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|v| ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]));
    (values, vectors)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p,q]` with the unitary `J = diag-phase · real rotation` on (p, q).
fn rotate(
    a: &mut ComplexMatrix,
    v: Option<&mut ComplexMatrix>,
    p: usize,
    q: usize,
    g: Complex64,
    gabs: f64,
) {
    let n = a.rows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = g / gabs;
    let theta = (aqq - app) / (2.0 * gabs);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on columns (p, q)
    let jpp = Complex64::new(c, 0.0);
    let jpq = Complex64::new(s, 0.0);
    let jqp = -phase.conj() * s;
    let jqq = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * jpp + vkq * jqp;
            v[(k, q)] = vkp * jpq + vkq * jqq;
        }
    }
}

/// Householder QR of a square matrix: `m = Q R`, R upper triangular.
pub fn qr(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    assert!(m.is_square(), "qr expects a square matrix");
    let n = m.rows();
    let mut r = m.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(1) {
        let norm: f64 = (k..n).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = r[(k, k)];
        let alpha = if x0.norm() == 0.0 {
            -Complex64::new(norm, 0.0)
        } else {
            -(x0 / x0.norm()) * norm
        };
        let mut u: Vec<Complex64> = (k..n).map(|i| r[(i, k)]).collect();
        u[0] -= alpha;
        let unorm: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if unorm == 0.0 {
            continue;
        }
        for z in u.iter_mut() {
            *z /= unorm;
        }
        // R <- (I - 2uu†) R
        for j in 0..n {
            let dot: Complex64 = (k..n).map(|i| u[i - k].conj() * r[(i, j)]).sum();
            for i in k..n {
                r[(i, j)] -= u[i - k] * dot * 2.0;
            }
        }
        // Q <- Q (I - 2uu†)
        for i in 0..n {
            let dot: Complex64 = (k..n).map(|j| q[(i, j)] * u[j - k]).sum();
            for j in k..n {
                q[(i, j)] -= dot * u[j - k].conj() * 2.0;
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            r[(i, j)] = ZERO;
        }
    }
    (q, r)
}
