//! Entanglement distribution through a depolarizing line of length `l` with one assisting node.
//!
//! Without catalysts the node cannot beat the direct limit `αl < ln 3`; with catalysts placed
//! at the midpoint the reach doubles to `αl < 2 ln 3`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::depolarizing_length;
use crate::error::{Error, Result};
use crate::linalg::density::max_entangled_vector;
use crate::linalg::matrix::ONE;
use crate::linalg::{hermitian_eigvals, ComplexMatrix, DensityMatrix};

/// `det(ρ^{T_A})` below this is entanglement; within it the state is on the boundary.
pub const DET_TOL: f64 = 1e-12;
/// `ln 3`, the direct-transmission limit of `αl`.
pub const LN3: f64 = 1.098_612_288_668_109_8;

#[derive(Clone, Debug, PartialEq)]
pub struct NodeScenario {
    pub alpha: f64,
    pub l: f64,
    pub s: f64,
    pub beta: f64,
    pub kraus_node: Option<ComplexMatrix>,
}

impl NodeScenario {
    pub fn new(alpha: f64, l: f64, s: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "alpha = {alpha} must be positive"
            )));
        }
        if !(l >= 0.0 && l.is_finite() && (0.0..=l).contains(&s)) {
            return Err(Error::InvalidArgument(format!(
                "need 0 <= s <= l (got s = {s}, l = {l})"
            )));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidArgument("beta must be finite".into()));
        }
        Ok(Self {
            alpha,
            l,
            s,
            beta,
            kraus_node: None,
        })
    }

    /// Uses a node operator `K` (`K†K ≤ I`) instead of the `β` family.
    pub fn with_kraus(mut self, k: ComplexMatrix) -> Result<Self> {
        if (k.rows(), k.cols()) != (2, 2) {
            return Err(Error::InvalidArgument(
                "node Kraus operator must be 2x2".into(),
            ));
        }
        let top = hermitian_eigvals(&k.adjoint().matmul(&k))?
            .into_iter()
            .fold(f64::MIN, f64::max);
        if top > 1.0 + 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "K†K has eigenvalue {top} above 1"
            )));
        }
        self.kraus_node = Some(k);
        Ok(self)
    }
}

fn psi_beta(beta: f64) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 4];
    v[0] = Complex64::new(beta.cos(), 0.0);
    v[3] = Complex64::new(beta.sin(), 0.0);
    v
}

/// `σ` from the four-term mixture of `|ψ><ψ|`, `I/2 ⊗ ψ^B`, `ψ^A ⊗ I/2` and `I/4`.
pub fn sigma_closed_form(alpha: f64, l: f64, s: f64, psi: &DensityMatrix) -> Result<DensityMatrix> {
    let (near, far) = ((-alpha * s).exp(), (-alpha * (l - s)).exp());
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    let pa = psi.partial_trace(&[0])?;
    let pb = psi.partial_trace(&[1])?;
    let m = &(&(&psi.matrix().scale_real(near * far)
        + &half.kron(pb.matrix()).scale_real(far * (1.0 - near)))
        + &pa.matrix().kron(&half).scale_real((1.0 - far) * near))
        + &half.kron(&half).scale_real((1.0 - far) * (1.0 - near));
    DensityMatrix::new(m, vec![2, 2])
}

/// Shared state between Alice and Bob: closed form on the `β` path, the operational pipeline on the `K` path.
pub fn sigma_state(sc: &NodeScenario) -> Result<DensityMatrix> {
    match &sc.kraus_node {
        None => {
            let psi = DensityMatrix::from_pure(&psi_beta(sc.beta), vec![2, 2])?;
            sigma_closed_form(sc.alpha, sc.l, sc.s, &psi)
        }
        Some(k) => {
            let phi = DensityMatrix::from_pure(&max_entangled_vector(2), vec![2, 2])?;
            node_pipeline(sc.alpha, sc.l, sc.s, &phi, k)
        }
    }
}

/// `(1⊗Λ_{l−s})[(1⊗K)(1⊗Λ_s)(ρ)(1⊗K†)]`, normalized.
pub fn node_pipeline(
    alpha: f64,
    l: f64,
    s: f64,
    rho: &DensityMatrix,
    k: &ComplexMatrix,
) -> Result<DensityMatrix> {
    let first = depolarizing_length(alpha, s)?.apply_to_half(rho)?;
    let kk = ComplexMatrix::identity(2).kron(k);
    let filtered = kk.conjugate(first.matrix());
    let q = filtered.trace().re;
    if q <= 1e-14 {
        return Err(Error::DegenerateKraus);
    }
    let mid = DensityMatrix::from_clamped(filtered.scale_real(1.0 / q), vec![2, 2])?;
    depolarizing_length(alpha, l - s)?.apply_to_half(&mid)
}

fn pt_det(rho: &DensityMatrix) -> Result<f64> {
    let pt = rho.partial_transpose(0)?;
    Ok(hermitian_eigvals(&pt.hermitian_part())?.iter().product())
}

/// `det(σ^{T_A})` at `l = ln 3/α` as a function of `s' = αs` and `β`.
pub fn det_pt(s_prime: f64, beta: f64) -> Result<f64> {
    if !(-1e-12..=LN3 + 1e-12).contains(&s_prime) {
        return Err(Error::InvalidArgument(format!(
            "s' = {s_prime} outside [0, ln 3]"
        )));
    }
    let e2 = (2.0 * s_prime).exp();
    let f = 9.0 - 10.0 * e2 + e2 * e2;
    let (c, s) = ((2.0 * beta).cos(), (2.0 * beta).sin());
    Ok((-4.0 * s_prime).exp() * c * c / 20736.0 * (f * f - f * (3.0 + e2).powi(2) * s * s))
}

/// Same determinant from the dense partial transpose of [`sigma_state`].
pub fn det_pt_numeric(sc: &NodeScenario) -> Result<f64> {
    pt_det(&sigma_state(sc)?)
}

/// Two-qubit entanglement by the sign of `det(ρ^{T_A})`.
pub fn is_entangled_2q(rho: &DensityMatrix) -> Result<bool> {
    if rho.dims() != [2, 2] {
        return Err(Error::InvalidArgument(format!(
            "need a two-qubit state, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(pt_det(rho)? < -DET_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    DirectOK,
    CatalyticOnly,
    Impossible,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Feasibility {
    pub verdict: Verdict,
    pub alpha_l: f64,
    /// `det` of the partially transposed Choi state of the half-length channel.
    pub half_choi_det: f64,
    pub half_choi_entangled: bool,
    /// Half-channel determinant within `DET_TOL` of zero.
    pub boundary: bool,
}

/// Direct distribution needs `αl < ln 3`; a catalyst at the midpoint extends this to `αl < 2 ln 3`.
pub fn feasibility(alpha: f64, l: f64) -> Result<Feasibility> {
    if !(alpha > 0.0 && alpha.is_finite() && l >= 0.0 && l.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need alpha > 0 and l >= 0 (got {alpha}, {l})"
        )));
    }
    let alpha_l = alpha * l;
    let verdict = if alpha_l < LN3 {
        Verdict::DirectOK
    } else if alpha_l < 2.0 * LN3 {
        Verdict::CatalyticOnly
    } else {
        Verdict::Impossible
    };
    let choi = depolarizing_length(alpha, l / 2.0)?.choi_state()?;
    let half_choi_det = pt_det(&choi)?;
    Ok(Feasibility {
        verdict,
        alpha_l,
        half_choi_det,
        half_choi_entangled: half_choi_det < -DET_TOL,
        boundary: half_choi_det.abs() <= DET_TOL,
    })
}

/// Length at which the Choi state of `Λ_l` stops being entangled, by bisection to `tol` in `l`.
pub fn entanglement_breaking_length(alpha: f64, tol: f64) -> Result<f64> {
    let entangled =
        |l: f64| -> Result<bool> { is_entangled_2q(&depolarizing_length(alpha, l)?.choi_state()?) };
    let (mut lo, mut hi) = (0.0, 1.0 / alpha);
    while entangled(hi)? {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if entangled(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetCell {
    pub s_prime: f64,
    pub beta: f64,
    pub det: f64,
}

/// Closed-form determinant on an `ns × nb` grid over `s' ∈ [0, ln 3]`, `β ∈ [0, π/2]`.
pub fn det_grid(ns: usize, nb: usize) -> Result<Vec<DetCell>> {
    if ns < 2 || nb < 2 {
        return Err(Error::InvalidArgument(
            "grid needs at least 2 points per axis".into(),
        ));
    }
    (0..ns * nb)
        .into_par_iter()
        .map(|idx| {
            let s_prime = LN3 * (idx / nb) as f64 / (ns - 1) as f64;
            let beta = FRAC_PI_2 * (idx % nb) as f64 / (nb - 1) as f64;
            Ok(DetCell {
                s_prime,
                beta,
                det: det_pt(s_prime, beta)?,
            })
        })
        .collect()
}

pub fn det_grid_csv(cells: &[DetCell]) -> String {
    let mut out = String::from("s_prime,beta,det\n");
    for c in cells {
        out.push_str(&format!("{:.6},{:.6},{:.6e}\n", c.s_prime, c.beta, c.det));
    }
    out
}

/// `K = diag(cos β, sin β)` rescaled to a contraction; it filters `φ+` into the `β` state.
pub fn beta_kraus(beta: f64) -> ComplexMatrix {
    let (c, s) = (beta.cos(), beta.sin());
    let m = c.abs().max(s.abs());
    let mut k = ComplexMatrix::zeros(2, 2);
    k[(0, 0)] = ONE * (c / m);
    k[(1, 1)] = ONE * (s / m);
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_density, seeded_rng};
    use std::f64::consts::FRAC_PI_4;

    /// Gaussian elimination with partial pivoting.
    fn det_oracle(m: &ComplexMatrix) -> f64 {
        let n = m.rows();
        let mut a: Vec<Vec<Complex64>> = (0..n)
            .map(|i| (0..n).map(|j| m[(i, j)]).collect())
            .collect();
        let mut det = ONE;
        for c in 0..n {
            let p = (c..n)
                .max_by(|&x, &y| a[x][c].norm().total_cmp(&a[y][c].norm()))
                .unwrap();
            if a[p][c].norm() == 0.0 {
                return 0.0;
            }
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= a[c][c];
            let pivot = a[c].clone();
            for row in a.iter_mut().skip(c + 1) {
                let f = row[c] / pivot[c];
                for (x, v) in row[c..].iter_mut().zip(&pivot[c..]) {
                    *x -= f * v;
                }
            }
        }
        det.re
    }

    fn sc(s_prime: f64, beta: f64) -> NodeScenario {
        NodeScenario::new(1.0, LN3, s_prime, beta).unwrap()
    }

    #[test]
    fn scenario_validation() {
        assert!(NodeScenario::new(0.0, 1.0, 0.5, 0.1).is_err());
        assert!(NodeScenario::new(1.0, 1.0, 1.5, 0.1).is_err());
        let k = ComplexMatrix::identity(2).scale_real(1.1);
        assert!(NodeScenario::new(1.0, 1.0, 0.5, 0.1)
            .unwrap()
            .with_kraus(k)
            .is_err());
    }

    #[test]
    fn noiseless_is_pure() {
        let s = sigma_state(&NodeScenario::new(1.0, 0.0, 0.0, 0.3).unwrap()).unwrap();
        let psi = DensityMatrix::from_pure(&psi_beta(0.3), vec![2, 2]).unwrap();
        assert!((s.matrix() - psi.matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn bell_at_origin_is_isotropic() {
        let l = 0.7;
        let s = sigma_state(&NodeScenario::new(1.0, l, 0.0, FRAC_PI_4).unwrap()).unwrap();
        let lam = (-l).exp();
        let bell = DensityMatrix::max_entangled(2);
        let want = &bell.matrix().scale_real(lam)
            + &ComplexMatrix::identity(4).scale_real((1.0 - lam) / 4.0);
        assert!((s.matrix() - &want).max_abs() < 1e-14);
        let direct = depolarizing_length(1.0, l)
            .unwrap()
            .apply_to_half(&bell)
            .unwrap();
        assert!((s.matrix() - direct.matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_pipeline() {
        for i in 0..5 {
            for j in 0..5 {
                for b in 0..5 {
                    let l = 0.2 + 0.6 * i as f64;
                    let s = l * j as f64 / 4.0;
                    let beta = FRAC_PI_2 * b as f64 / 4.0;
                    let closed = sigma_state(&NodeScenario::new(0.9, l, s, beta).unwrap()).unwrap();
                    // the closed form's ψ is φ+ filtered by K at the node
                    let phi = DensityMatrix::max_entangled(2);
                    let pipe = node_pipeline(0.9, l, s, &phi, &beta_kraus(beta)).unwrap();
                    assert!(
                        (closed.matrix() - pipe.matrix()).max_abs() < 1e-10,
                        "{l} {s} {beta}"
                    );
                    let via_k = NodeScenario::new(0.9, l, s, beta)
                        .unwrap()
                        .with_kraus(beta_kraus(beta))
                        .unwrap();
                    assert!(
                        (closed.matrix() - sigma_state(&via_k).unwrap().matrix()).max_abs() < 1e-10
                    );
                }
            }
        }
    }

    #[test]
    fn degenerate_kraus() {
        let k = ComplexMatrix::zeros(2, 2);
        let sc = NodeScenario::new(1.0, 1.0, 0.5, 0.0)
            .unwrap()
            .with_kraus(k)
            .unwrap();
        assert_eq!(sigma_state(&sc), Err(Error::DegenerateKraus));
    }

    #[test]
    fn determinant_closed_form() {
        assert!(det_pt(0.4, FRAC_PI_4).unwrap().abs() < 1e-18);
        assert!(det_pt(LN3, 0.3).unwrap().abs() < 1e-15);
        assert!(det_pt(1.2, 0.3).is_err());
        for (sp, beta) in [
            (2f64.ln(), std::f64::consts::PI / 8.0),
            (0.1, 0.2),
            (0.9, 1.3),
            (0.0, 0.5),
        ] {
            let closed = det_pt(sp, beta).unwrap();
            let s = sigma_state(&sc(sp, beta)).unwrap();
            let oracle = det_oracle(&s.partial_transpose(0).unwrap());
            assert!(
                (closed - oracle).abs() < 1e-10,
                "{sp} {beta}: {closed} vs {oracle}"
            );
            assert!((det_pt_numeric(&sc(sp, beta)).unwrap() - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn determinant_nonnegative_on_grid() {
        let cells = det_grid(200, 200).unwrap();
        assert_eq!(cells.len(), 40_000);
        assert!(cells.iter().all(|c| c.det >= -DET_TOL));
        let csv = det_grid_csv(&cells[..3]);
        assert!(csv.starts_with("s_prime,beta,det\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn entanglement_test_examples() {
        assert!(is_entangled_2q(&DensityMatrix::max_entangled(2)).unwrap());
        assert!(!is_entangled_2q(&DensityMatrix::maximally_mixed(vec![2, 2])).unwrap());
        let werner = |v: f64| {
            let m = &DensityMatrix::max_entangled(2).matrix().scale_real(v)
                + &ComplexMatrix::identity(4).scale_real((1.0 - v) / 4.0);
            DensityMatrix::new(m, vec![2, 2]).unwrap()
        };
        assert!(is_entangled_2q(&werner(1.0 / 3.0 + 1e-3)).unwrap());
        assert!(!is_entangled_2q(&werner(1.0 / 3.0 - 1e-3)).unwrap());
    }

    #[test]
    fn determinant_agrees_with_min_eigenvalue() {
        let mut rng = seeded_rng(13, 0);
        let mut disagree = 0;
        for i in 0..10_000 {
            let rank = 1 + i % 4;
            let rho = random_density(&[2, 2], rank, &mut rng);
            let min = hermitian_eigvals(&rho.partial_transpose(0).unwrap())
                .unwrap()
                .into_iter()
                .fold(f64::MAX, f64::min);
            let by_det = is_entangled_2q(&rho).unwrap();
            // skip states whose PT eigenvalue is numerically on the boundary
            if min.abs() > 1e-6 && by_det != (min < 0.0) {
                disagree += 1;
            }
        }
        assert_eq!(disagree, 0);
    }

    #[test]
    fn feasibility_verdicts() {
        let f = feasibility(2.0, 0.5 * LN3 / 2.0).unwrap();
        assert_eq!(f.verdict, Verdict::DirectOK);
        let f = feasibility(2.0, 1.5 * LN3 / 2.0).unwrap();
        assert_eq!(f.verdict, Verdict::CatalyticOnly);
        assert!(f.half_choi_entangled);
        let f = feasibility(2.0, 2.5 * LN3 / 2.0).unwrap();
        assert_eq!(f.verdict, Verdict::Impossible);
        assert!(!f.half_choi_entangled);
        let f = feasibility(1.0, 2.0 * LN3).unwrap();
        assert_eq!(f.verdict, Verdict::Impossible);
        assert!(f.boundary);
        assert!(feasibility(0.0, 1.0).is_err());
    }

    #[test]
    fn feasibility_depends_on_product_only() {
        for al in [0.3, 1.0, 1.5, 2.0, 2.5, 3.0] {
            let base = feasibility(1.0, al).unwrap().verdict;
            for c in [0.5, 2.0, 10.0] {
                assert_eq!(
                    feasibility(c, al / c).unwrap().verdict,
                    base,
                    "αl = {al}, c = {c}"
                );
            }
        }
    }

    #[test]
    fn breaking_length_is_ln3() {
        for alpha in [0.5, 1.0, 3.0] {
            let l = entanglement_breaking_length(alpha, 1e-9).unwrap();
            assert!((l - LN3 / alpha).abs() <= 1e-5, "{alpha}: {l}");
        }
        assert!((LN3 - 3f64.ln()).abs() < 1e-16);
    }
}
