//! Entropies and entanglement measures, all in bits.

mod squashed;

pub use squashed::{squashed_ub_mc, MC_CHUNK};

use num_complex::Complex64;
use serde::Serialize;

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::density::normalize_subsystems;
use crate::linalg::{
    hermitian_eig, hermitian_eigvals, pauli, ComplexMatrix, DensityMatrix, ProbDist,
};

/// Eigenvalues at or below this are dropped from entropy sums.
pub const ENTROPY_CUTOFF: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Measure {
    Entropy,
    LogNegativity,
    EoF,
    CoherentInfo,
    MutualInfo,
    SquashedUB,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasureValue {
    pub value: f64,
    pub measure: Measure,
}

impl MeasureValue {
    fn new(value: f64, measure: Measure) -> Self {
        Self { value, measure }
    }
}

/// `−Σ p log₂ p` over entries above the cutoff.
pub fn entropy_bits(p: &[f64]) -> f64 {
    p.iter()
        .filter(|&&x| x > ENTROPY_CUTOFF)
        .map(|&x| -x * x.log2())
        .sum::<f64>()
        .max(0.0)
}

pub fn shannon_entropy(p: &ProbDist) -> MeasureValue {
    MeasureValue::new(entropy_bits(p.probs()), Measure::Entropy)
}

pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!(
            "binary entropy argument {x} outside [0,1]"
        )));
    }
    Ok(h2(x))
}

/// Binary entropy clamped to `[0,1]` arguments.
pub(crate) fn h2(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    entropy_bits(&[x, 1.0 - x])
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> MeasureValue {
    MeasureValue::new(matrix_entropy(rho.matrix()), Measure::Entropy)
}

/// Entropy of the spectrum of a Hermitian PSD matrix; closed form for 2×2.
pub(crate) fn matrix_entropy(m: &ComplexMatrix) -> f64 {
    if m.rows() == 2 {
        let (a, d) = (m[(0, 0)].re, m[(1, 1)].re);
        let b = m[(0, 1)].norm();
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        return entropy_bits(&[mean + rad, mean - rad]);
    }
    entropy_bits(&hermitian_eigvals(m).expect("state matrices are Hermitian"))
}

/// Entropy of the marginal on `keep`; the empty marginal has entropy 0.
fn marginal_entropy(rho: &DensityMatrix, keep: &[usize]) -> Result<f64> {
    if keep.is_empty() {
        return Ok(0.0);
    }
    Ok(von_neumann_entropy(&rho.partial_trace(keep)?).value)
}

/// `log₂‖ρ^{T_A}‖₁` for the bipartition A = subsystems `0..cut`, B = the rest.
pub fn log_negativity(rho: &DensityMatrix, cut: usize) -> Result<MeasureValue> {
    let n = rho.dims().len();
    if cut == 0 || cut >= n {
        return Err(Error::InvalidArgument(format!(
            "cut {cut} does not split {n} subsystems"
        )));
    }
    let mut m = rho.matrix().clone();
    for k in 0..cut {
        m = crate::linalg::partial_transpose(&m, rho.dims(), k)?;
    }
    let norm = crate::linalg::trace_norm(&m)?;
    Ok(MeasureValue::new(
        norm.log2().max(0.0),
        Measure::LogNegativity,
    ))
}

/// `√d·ε/ln 2`: how far log-negativity can move between states `ε` apart in trace norm.
pub fn negativity_continuity_bound(d: usize, eps: f64) -> f64 {
    (d as f64).sqrt() * eps / std::f64::consts::LN_2
}

/// Wootters concurrence of a two-qubit state.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::InvalidArgument(format!(
            "concurrence needs dims [2,2], got {:?}",
            rho.dims()
        )));
    }
    // √ρ ρ̃ √ρ = A A† with A = √ρ (Y⊗Y) √ρ*, so the λ_i are the singular values of A. Reading
    // them off the Hermitian dilation [[0, A], [A†, 0]] avoids square roots of noisy eigenvalues.
    let yy = pauli(2).kron(&pauli(2));
    let sqrt_rho = hermitian_eig(rho.matrix())?.map_values(|x| x.max(0.0).sqrt());
    let a = sqrt_rho.matmul(&yy).matmul(&sqrt_rho.conj());
    let dilation = ComplexMatrix::from_fn(8, 8, |i, j| match (i < 4, j < 4) {
        (true, false) => a[(i, j - 4)],
        (false, true) => a[(j, i - 4)].conj(),
        _ => Complex64::new(0.0, 0.0),
    });
    let lam: Vec<f64> = hermitian_eigvals(&dilation)?
        .iter()
        .take(4)
        .map(|x| x.max(0.0))
        .collect();
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

/// Entanglement of formation of a two-qubit state.
pub fn eof_two_qubit(rho: &DensityMatrix) -> Result<MeasureValue> {
    let c = concurrence(rho)?.min(1.0);
    let x = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    Ok(MeasureValue::new(h2(x), Measure::EoF))
}

/// `h(½ + √(p(1−p)))` for `p > ½`, else 0.
pub fn eof_bell_diagonal(pmax: f64) -> Result<MeasureValue> {
    if !(0.0..=1.0).contains(&pmax) {
        return Err(Error::InvalidArgument(format!(
            "p_max {pmax} outside [0,1]"
        )));
    }
    let v = if pmax > 0.5 {
        h2(0.5 + (pmax * (1.0 - pmax)).sqrt())
    } else {
        0.0
    };
    Ok(MeasureValue::new(v, Measure::EoF))
}

/// `S(Λ[ρ]) − S((1⊗Λ)[ψ_ρ])` using the spectral purification of `ρ`.
pub fn coherent_information(rho: &DensityMatrix, ch: &QuantumChannel) -> Result<MeasureValue> {
    if rho.dim() != ch.dim_in() {
        return Err(Error::InvalidArgument(format!(
            "state dimension {} does not match channel input {}",
            rho.dim(),
            ch.dim_in()
        )));
    }
    let eig = hermitian_eig(rho.matrix())?;
    let d = rho.dim();
    let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
    for (i, &l) in eig.values.iter().enumerate() {
        let s = l.max(0.0).sqrt();
        for k in 0..d {
            psi[i * d + k] = eig.vectors[(k, i)] * s;
        }
    }
    coherent_information_of_purification(&psi, d, ch)
}

/// Coherent information from an explicit purification `psi` on `R ⊗ S` with `dim R = ref_dim`.
pub fn coherent_information_of_purification(
    psi: &[Complex64],
    ref_dim: usize,
    ch: &QuantumChannel,
) -> Result<MeasureValue> {
    let d = ch.dim_in();
    if psi.len() != ref_dim * d {
        return Err(Error::InvalidArgument(format!(
            "purification length {} is not {ref_dim}x{d}",
            psi.len()
        )));
    }
    let joint = DensityMatrix::from_pure(psi, vec![ref_dim, d])?;
    let out = ch.apply_to_half(&joint)?;
    let s_out = von_neumann_entropy(&out.partial_trace(&[1])?).value;
    let s_joint = von_neumann_entropy(&out).value;
    Ok(MeasureValue::new(s_out - s_joint, Measure::CoherentInfo))
}

fn check_partition(n: usize, parts: &[&[usize]], exhaustive: bool) -> Result<()> {
    let mut seen = vec![false; n];
    for part in parts {
        normalize_subsystems(part, n)?;
        for &i in *part {
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument(format!(
                    "subsystem {i} appears in more than one part"
                )));
            }
        }
    }
    if exhaustive && seen.iter().any(|s| !s) {
        return Err(Error::InvalidArgument(
            "parts do not cover every subsystem".into(),
        ));
    }
    Ok(())
}

fn union(parts: &[&[usize]]) -> Vec<usize> {
    let mut v: Vec<usize> = parts.iter().flat_map(|p| p.iter().copied()).collect();
    v.sort_unstable();
    v
}

/// `S(A) + S(B) − S(AB)` for a bipartition of all subsystems.
pub fn mutual_information(rho: &DensityMatrix, a: &[usize], b: &[usize]) -> Result<MeasureValue> {
    check_partition(rho.dims().len(), &[a, b], true)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument(
            "mutual information needs two nonempty parts".into(),
        ));
    }
    let v = marginal_entropy(rho, a)? + marginal_entropy(rho, b)? - von_neumann_entropy(rho).value;
    Ok(MeasureValue::new(v, Measure::MutualInfo))
}

/// `S(AE) + S(BE) − S(ABE) − S(E)`.
pub fn conditional_mutual_information(
    rho: &DensityMatrix,
    a: &[usize],
    b: &[usize],
    e: &[usize],
) -> Result<f64> {
    check_partition(rho.dims().len(), &[a, b, e], true)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument(
            "conditional mutual information needs nonempty A and B".into(),
        ));
    }
    Ok(
        marginal_entropy(rho, &union(&[a, e]))? + marginal_entropy(rho, &union(&[b, e]))?
            - von_neumann_entropy(rho).value
            - marginal_entropy(rho, e)?,
    )
}
