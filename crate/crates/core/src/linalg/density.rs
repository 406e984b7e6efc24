//! Density matrices with subsystem structure, plus the probability-vector newtypes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eig::{hermitian_eig, hermitian_eigvals};
use super::matrix::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `(-PSD_CLAMP, 0)` count as rounding noise.
pub const PSD_CLAMP: f64 = 1e-9;

/// Hermitian, unit-trace, positive semidefinite matrix over `dims[0] ⊗ dims[1] ⊗ ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates every invariant and names the first one violated.
    pub fn new(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&mat, &dims)?;
        if !mat.is_finite() {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        let herm = mat.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState {
                invariant: "hermiticity",
                magnitude: herm,
            });
        }
        let tr_err = (mat.trace() - ONE).norm();
        if tr_err > TRACE_TOL {
            return Err(Error::InvalidState {
                invariant: "unit trace",
                magnitude: tr_err,
            });
        }
        let min = hermitian_eigvals(&mat)?.last().copied().unwrap_or(0.0);
        if min < -PSD_CLAMP {
            return Err(Error::InvalidState {
                invariant: "positive semidefinite",
                magnitude: -min,
            });
        }
        Ok(Self { mat, dims })
    }

    /// For callers that already guarantee the invariants (products of valid states etc).
    pub fn from_parts_unchecked(mat: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(mat.rows(), dims.iter().product::<usize>());
        Self { mat, dims }
    }

    /// Hermitizes, clamps eigenvalues in `(-1e-9, 0)` to zero and renormalizes.
    /// More negative eigenvalues mean the input is genuinely unphysical.
    pub fn from_clamped(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&mat, &dims)?;
        let h = mat.hermitian_part();
        let eig = hermitian_eig(&h)?;
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -PSD_CLAMP {
            return Err(Error::NonPhysical(min));
        }
        let m = if min < 0.0 {
            eig.map_values(|x| x.max(0.0))
        } else {
            h
        };
        let tr = m.trace().re;
        if tr <= 0.0 {
            return Err(Error::NonPhysical(tr));
        }
        Ok(Self {
            mat: m.scale_real(1.0 / tr),
            dims,
        })
    }

    /// `|v><v|` for a normalized state vector.
    pub fn from_pure(v: &[Complex64], dims: Vec<usize>) -> Result<Self> {
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidState {
                invariant: "unit norm",
                magnitude: (norm - 1.0).abs(),
            });
        }
        let m = ComplexMatrix::outer(v, v);
        check_dims(&m, &dims)?;
        Ok(Self { mat: m, dims })
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self {
            mat: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            dims,
        }
    }

    /// Computational basis projector `|idx><idx|`.
    pub fn basis(dims: Vec<usize>, idx: usize) -> Self {
        let d: usize = dims.iter().product();
        let mut m = ComplexMatrix::zeros(d, d);
        m[(idx, idx)] = ONE;
        Self { mat: m, dims }
    }

    /// `|φ_d+> = Σ_i |ii>/√d` on `d ⊗ d`.
    pub fn max_entangled(d: usize) -> Self {
        Self::from_pure(&max_entangled_vector(d), vec![d, d]).expect("normalized by construction")
    }

    /// Diagonal in the Bell basis with weights for `Φ+, Ψ+, Ψ-, Φ-` (the images of
    /// `Φ+` under `I, X, Y, Z` on the second qubit).
    pub fn bell_diagonal(weights: [f64; 4]) -> Self {
        let phi = max_entangled_vector(2);
        let mut m = ComplexMatrix::zeros(4, 4);
        for (k, &w) in weights.iter().enumerate() {
            let u = ComplexMatrix::identity(2).kron(&super::matrix::pauli(k));
            let v = u.matvec(&phi);
            m = &m + &ComplexMatrix::outer(&v, &v).scale_real(w);
        }
        Self {
            mat: m,
            dims: vec![2, 2],
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigvals(&self.mat).expect("density matrix is Hermitian")
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&x| x > tol).count()
    }

    /// Marginal on the subsystems in `keep` (kept in their original order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let keep = normalize_subsystems(keep, self.dims.len())?;
        if keep.is_empty() {
            return Err(Error::InvalidArgument(
                "partial trace must keep at least one subsystem".into(),
            ));
        }
        let traced: Vec<usize> = (0..self.dims.len()).filter(|i| !keep.contains(i)).collect();
        let strides = strides(&self.dims);
        let kept_offsets = offsets(&keep, &self.dims, &strides);
        let traced_offsets = offsets(&traced, &self.dims, &strides);
        let dk = kept_offsets.len();
        let mut out = ComplexMatrix::zeros(dk, dk);
        for (a, &oa) in kept_offsets.iter().enumerate() {
            for (b, &ob) in kept_offsets.iter().enumerate() {
                let mut s = ZERO;
                for &t in &traced_offsets {
                    s += self.mat[(oa + t, ob + t)];
                }
                out[(a, b)] = s;
            }
        }
        let dims = keep.iter().map(|&i| self.dims[i]).collect();
        Ok(Self { mat: out, dims })
    }

    /// Reorders subsystems so that new position `k` holds old subsystem `perm[k]`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidArgument(format!(
                "{perm:?} is not a permutation of {n} subsystems"
            )));
        }
        let map = permutation_map(&self.dims, perm);
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] = self.mat[(map[i], map[j])];
            }
        }
        Ok(Self {
            mat: out,
            dims: perm.iter().map(|&p| self.dims[p]).collect(),
        })
    }

    /// Partial transpose on one subsystem.
    pub fn partial_transpose(&self, subsystem: usize) -> Result<ComplexMatrix> {
        partial_transpose(&self.mat, &self.dims, subsystem)
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            mat: self.mat.kron(&other.mat),
            dims,
        }
    }

    /// `‖a − b‖₁` (no ½ factor).
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        trace_distance(self, other)
    }

    /// Unitary conjugation `U ρ U†` on the full space.
    pub fn evolve(&self, u: &ComplexMatrix) -> Self {
        Self {
            mat: u.conjugate(&self.mat),
            dims: self.dims.clone(),
        }
    }

    pub fn with_dims(mut self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&self.mat, &dims)?;
        self.dims = dims;
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        let d = self.dim();
        let re = (0..d)
            .map(|i| (0..d).map(|j| self.mat[(i, j)].re).collect())
            .collect();
        let im = (0..d)
            .map(|i| (0..d).map(|j| self.mat[(i, j)].im).collect())
            .collect();
        serde_json::to_string(&StateJson {
            dims: self.dims.clone(),
            re,
            im,
        })
        .expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: StateJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }
}

/// JSON layout `{"dims":[...],"re":[[...]],"im":[[...]]}`.
#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct StateJson {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl TryFrom<StateJson> for DensityMatrix {
    type Error = Error;

    fn try_from(raw: StateJson) -> Result<Self> {
        let d = raw.re.len();
        if raw.im.len() != d || raw.re.iter().chain(&raw.im).any(|row| row.len() != d) {
            return Err(Error::Parse(
                "re and im must be square arrays of equal size".into(),
            ));
        }
        let data = raw
            .re
            .iter()
            .zip(&raw.im)
            .flat_map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| Complex64::new(a, b)))
            .collect();
        DensityMatrix::new(ComplexMatrix::from_vec(d, d, data)?, raw.dims)
    }
}

pub fn max_entangled_vector(d: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; d * d];
    let a = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = Complex64::new(a, 0.0);
    }
    v
}

fn check_dims(mat: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    if !mat.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "{}x{} matrix is not square",
            mat.rows(),
            mat.cols()
        )));
    }
    let prod: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || prod != mat.rows() {
        return Err(Error::InvalidArgument(format!(
            "dims {dims:?} do not factor dimension {}",
            mat.rows()
        )));
    }
    Ok(())
}

/// Sorted, deduplicated copy; rejects out-of-range indices.
pub(crate) fn normalize_subsystems(set: &[usize], n: usize) -> Result<Vec<usize>> {
    if let Some(&bad) = set.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidArgument(format!(
            "subsystem {bad} out of range for {n} subsystems"
        )));
    }
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Full-space offsets of every basis label of the subsystems in `set`, in lexicographic order.
fn offsets(set: &[usize], dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &k in set {
        out = out
            .iter()
            .flat_map(|&o| (0..dims[k]).map(move |x| o + x * strides[k]))
            .collect();
    }
    out
}

/// `map[new_index] = old_index` for the subsystem permutation `perm`.
pub(crate) fn permutation_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let old_strides = strides(dims);
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let d: usize = dims.iter().product();
    let mut map = Vec::with_capacity(d);
    let mut digits = vec![0usize; dims.len()];
    for _ in 0..d {
        map.push(
            digits
                .iter()
                .zip(perm)
                .map(|(&x, &p)| x * old_strides[p])
                .sum(),
        );
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < new_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    map
}

/// Marginal on `keep` of the pure state `v` over `dims`, computed as `M M†` with `M` the
/// reshaped amplitude matrix. `keep` must be sorted, nonempty and in range.
pub fn pure_marginal(v: &[Complex64], dims: &[usize], keep: &[usize]) -> ComplexMatrix {
    let st = strides(dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let ko = offsets(keep, dims, &st);
    let to = offsets(&traced, dims, &st);
    let dk = ko.len();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in a..dk {
            let s: Complex64 = to.iter().map(|&t| v[ko[a] + t] * v[ko[b] + t].conj()).sum();
            out[(a, b)] = s;
            out[(b, a)] = s.conj();
        }
    }
    out
}

/// Partial transpose of `m` on subsystem `subsystem` of `dims`.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: &[usize],
    subsystem: usize,
) -> Result<ComplexMatrix> {
    if subsystem >= dims.len() {
        return Err(Error::InvalidArgument(format!(
            "subsystem {subsystem} out of range for {} subsystems",
            dims.len()
        )));
    }
    check_dims(m, dims)?;
    let stride = strides(dims)[subsystem];
    let ds = dims[subsystem];
    let d = m.rows();
    Ok(ComplexMatrix::from_fn(d, d, |i, j| {
        let (di, dj) = ((i / stride) % ds, (j / stride) % ds);
        let si = i - di * stride + dj * stride;
        let sj = j - dj * stride + di * stride;
        m[(si, sj)]
    }))
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "{}x{} matrix is not square",
            m.rows(),
            m.cols()
        )));
    }
    if m.hermiticity_error() <= 1e-12 * m.max_abs().max(1.0) {
        return Ok(hermitian_eigvals(&m.hermitian_part())?
            .iter()
            .map(|x| x.abs())
            .sum());
    }
    let g = m.adjoint().matmul(m);
    Ok(hermitian_eigvals(&g.hermitian_part())?
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .sum())
}

pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidArgument(format!(
            "dimension mismatch {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    trace_norm(&(&a.mat - &b.mat))
}

/// Nonincreasing probability vector; squared Schmidt coefficients of a pure bipartite state.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SchmidtVector(Vec<f64>);

impl SchmidtVector {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty Schmidt vector".into()));
        }
        if let Some(x) = probs
            .iter()
            .find(|x| !x.is_finite() || **x < 0.0 || **x > 1.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "entry {x} outside [0,1]"
            )));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {s}")));
        }
        if probs.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidDistribution(
                "entries not sorted nonincreasing".into(),
            ));
        }
        Ok(Self(probs))
    }

    /// Sorts, clips tiny negatives and renormalizes; for vectors produced by computation.
    pub fn from_unsorted(mut probs: Vec<f64>) -> Result<Self> {
        if let Some(x) = probs.iter().find(|x| !x.is_finite() || **x < -1e-12) {
            return Err(Error::InvalidDistribution(format!(
                "entry {x} is negative or non-finite"
            )));
        }
        for x in probs.iter_mut() {
            *x = x.max(0.0);
        }
        let s: f64 = probs.iter().sum();
        if s <= 0.0 {
            return Err(Error::InvalidDistribution("entries sum to zero".into()));
        }
        for x in probs.iter_mut() {
            *x /= s;
        }
        probs.sort_by(|a, b| b.total_cmp(a));
        Ok(Self(probs))
    }

    /// Schmidt coefficients of a pure state `v` on `da ⊗ db`.
    pub fn of_pure_state(v: &[Complex64], da: usize, db: usize) -> Result<Self> {
        let rho = DensityMatrix::from_pure(v, vec![da, db])?;
        let (keep, n) = if da <= db { (0, da) } else { (1, db) };
        let mut e = rho.partial_trace(&[keep])?.eigenvalues();
        e.truncate(n);
        Self::from_unsorted(e)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Pads with zeros to length `d`.
    pub fn padded(&self, d: usize) -> Self {
        let mut v = self.0.clone();
        v.resize(d.max(v.len()), 0.0);
        Self(v)
    }

    /// `Σ_i √p_i |ii>` on `d ⊗ d`.
    pub fn state_vector(&self) -> Vec<Complex64> {
        let d = self.0.len();
        let mut v = vec![ZERO; d * d];
        for (i, &p) in self.0.iter().enumerate() {
            v[i * d + i] = Complex64::new(p.sqrt(), 0.0);
        }
        v
    }

    pub fn to_density(&self) -> DensityMatrix {
        let d = self.0.len();
        DensityMatrix::from_parts_unchecked(
            ComplexMatrix::outer(&self.state_vector(), &self.state_vector()),
            vec![d, d],
        )
    }

    /// Entanglement entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.0
            .iter()
            .filter(|&&p| p > 1e-12)
            .map(|&p| -p * p.log2())
            .sum()
    }

    /// Trace distance `2√(1 − |<a|b>|²)` between the two pure states in the shared Schmidt basis.
    pub fn pure_trace_distance(&self, other: &Self) -> f64 {
        let d = self.len().max(other.len());
        let (a, b) = (self.padded(d), other.padded(d));
        let overlap: f64 = a.0.iter().zip(&b.0).map(|(x, y)| (x * y).sqrt()).sum();
        2.0 * (1.0 - (overlap * overlap).min(1.0)).max(0.0).sqrt()
    }
}

impl<'de> Deserialize<'de> for SchmidtVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        SchmidtVector::new(v).map_err(serde::de::Error::custom)
    }
}

/// Finite probability vector (entries ≥ 0, summing to 1 within 1e-9).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ProbDist(Vec<f64>);

impl ProbDist {
    pub const SUM_TOL: f64 = 1e-9;

    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        if let Some(x) = probs.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "entry {x} is negative or non-finite"
            )));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {s}")));
        }
        Ok(Self(probs))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

impl<'de> Deserialize<'de> for ProbDist {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        ProbDist::new(v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_density, seeded_rng};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        (a - b).max_abs() <= tol
    }

    /// Brute-force index contraction over explicit basis labels for three qubits, tracing the last.
    fn trace_last_qubit_oracle(m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(4, 4);
        for a in 0..2 {
            for b in 0..2 {
                for a2 in 0..2 {
                    for b2 in 0..2 {
                        for c in 0..2 {
                            let i = a * 4 + b * 2 + c;
                            let j = a2 * 4 + b2 * 2 + c;
                            out[(a * 2 + b, a2 * 2 + b2)] += m[(i, j)];
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn marginal_of_max_entangled_is_mixed() {
        let phi = DensityMatrix::max_entangled(2);
        let a = phi.partial_trace(&[0]).unwrap();
        assert!(close(
            a.matrix(),
            DensityMatrix::maximally_mixed(vec![2]).matrix(),
            1e-15
        ));
        assert_eq!(a.dims(), &[2]);
    }

    #[test]
    fn partial_trace_of_product() {
        let mut rng = seeded_rng(1, 0);
        let r = random_density(&[2], 2, &mut rng);
        let s = random_density(&[3], 3, &mut rng);
        let rs = r.tensor(&s);
        assert!(close(
            rs.partial_trace(&[0]).unwrap().matrix(),
            r.matrix(),
            1e-12
        ));
        assert!(close(
            rs.partial_trace(&[1]).unwrap().matrix(),
            s.matrix(),
            1e-12
        ));
    }

    #[test]
    fn partial_trace_matches_index_oracle() {
        let mut rng = seeded_rng(2, 0);
        for _ in 0..20 {
            let rho = random_density(&[2, 2, 2], 8, &mut rng);
            let got = rho.partial_trace(&[0, 1]).unwrap();
            assert!(close(
                got.matrix(),
                &trace_last_qubit_oracle(rho.matrix()),
                1e-14
            ));
            assert!((got.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_marginal_matches_partial_trace() {
        let mut rng = seeded_rng(9, 0);
        let v = crate::linalg::random::random_pure_vector(12, &mut rng);
        let rho = DensityMatrix::from_pure(&v, vec![2, 3, 2]).unwrap();
        for keep in [vec![0], vec![1], vec![0, 2], vec![1, 2]] {
            let want = rho.partial_trace(&keep).unwrap();
            assert!(close(
                &pure_marginal(&v, &[2, 3, 2], &keep),
                want.matrix(),
                1e-14
            ));
        }
    }

    #[test]
    fn partial_trace_rejects_empty_keep() {
        let rho = DensityMatrix::max_entangled(2);
        assert!(matches!(
            rho.partial_trace(&[]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            rho.partial_trace(&[2]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn partial_transpose_cases() {
        let mut rng = seeded_rng(3, 0);
        let r = random_density(&[2], 2, &mut rng);
        let s = random_density(&[3], 3, &mut rng);
        let pt = r.tensor(&s).partial_transpose(0).unwrap();
        assert!(close(&pt, &r.matrix().transpose().kron(s.matrix()), 1e-15));

        let phi = DensityMatrix::max_entangled(2);
        let ev = hermitian_eigvals(&phi.partial_transpose(0).unwrap()).unwrap();
        let want = [0.5, 0.5, 0.5, -0.5];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((trace_norm(&phi.partial_transpose(1).unwrap()).unwrap() - 2.0).abs() < 1e-13);

        let diag = DensityMatrix::new(
            ComplexMatrix::from_real_diag(&[0.1, 0.2, 0.3, 0.4]),
            vec![2, 2],
        )
        .unwrap();
        assert_eq!(&diag.partial_transpose(1).unwrap(), diag.matrix());
        assert!(diag.partial_transpose(2).is_err());
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let mut rng = seeded_rng(4, 0);
        let rho = random_density(&[2, 3], 6, &mut rng);
        let once = rho.partial_transpose(1).unwrap();
        assert!(once.hermiticity_error() < 1e-15);
        let twice = partial_transpose(&once, rho.dims(), 1).unwrap();
        assert_eq!(&twice, rho.matrix());
    }

    #[test]
    fn trace_norm_cases() {
        assert_eq!(trace_norm(&ComplexMatrix::zeros(3, 3)).unwrap(), 0.0);
        assert!(trace_norm(&ComplexMatrix::zeros(2, 3)).is_err());
        let mut rng = seeded_rng(5, 0);
        let rho = random_density(&[4], 4, &mut rng);
        assert!((trace_norm(rho.matrix()).unwrap() - 1.0).abs() < 1e-12);
        // non-Hermitian: |0><1| has one singular value 1
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = ONE;
        assert!((trace_norm(&m).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tensor_dims_and_mixed() {
        let m = DensityMatrix::maximally_mixed(vec![2]);
        let mm = m.tensor(&m);
        assert_eq!(mm.dims(), &[2, 2]);
        assert!(close(
            mm.matrix(),
            DensityMatrix::maximally_mixed(vec![2, 2]).matrix(),
            1e-15
        ));
        let p = DensityMatrix::basis(vec![2], 1).tensor(&DensityMatrix::max_entangled(2));
        assert_eq!(p.rank(1e-10), 1);
    }

    #[test]
    fn trace_distance_cases() {
        let z = DensityMatrix::basis(vec![2], 0);
        let o = DensityMatrix::basis(vec![2], 1);
        assert!((z.trace_distance(&o).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(z.trace_distance(&z).unwrap(), 0.0);
        assert!(z.trace_distance(&DensityMatrix::max_entangled(2)).is_err());

        let mut rng = seeded_rng(6, 0);
        let a = random_density(&[2], 2, &mut rng);
        let b = random_density(&[2], 2, &mut rng);
        let ev = hermitian_eigvals(&(a.matrix() - b.matrix())).unwrap();
        let oracle: f64 = ev.iter().map(|x| x.abs()).sum();
        assert!((a.trace_distance(&b).unwrap() - oracle).abs() < 1e-14);
        assert!((a.trace_distance(&b).unwrap() - b.trace_distance(&a).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn permute_subsystems_swaps_factors() {
        let mut rng = seeded_rng(7, 0);
        let r = random_density(&[2], 2, &mut rng);
        let s = random_density(&[3], 3, &mut rng);
        let swapped = r.tensor(&s).permute_subsystems(&[1, 0]).unwrap();
        assert_eq!(swapped.dims(), &[3, 2]);
        assert!(close(swapped.matrix(), s.tensor(&r).matrix(), 1e-15));
        assert!(r.tensor(&s).permute_subsystems(&[0, 0]).is_err());
    }

    #[test]
    fn validation_names_invariant() {
        let bad_trace = ComplexMatrix::from_real_diag(&[0.6, 0.6]);
        match DensityMatrix::new(bad_trace, vec![2]) {
            Err(Error::InvalidState {
                invariant,
                magnitude,
            }) => {
                assert_eq!(invariant, "unit trace");
                assert!((magnitude - 0.2).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        let neg = ComplexMatrix::from_real_diag(&[1.1, -0.1]);
        assert!(matches!(
            DensityMatrix::new(neg, vec![2]),
            Err(Error::InvalidState {
                invariant: "positive semidefinite",
                ..
            })
        ));
        let mut nh = ComplexMatrix::from_real_diag(&[0.5, 0.5]);
        nh[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(matches!(
            DensityMatrix::new(nh, vec![2]),
            Err(Error::InvalidState {
                invariant: "hermiticity",
                ..
            })
        ));
    }

    #[test]
    fn clamp_tolerates_noise_only() {
        let noisy = ComplexMatrix::from_real_diag(&[1.0 + 5e-10, -5e-10]);
        let rho = DensityMatrix::from_clamped(noisy, vec![2]).unwrap();
        assert!(rho.eigenvalues().iter().all(|&x| x >= 0.0));
        let bad = ComplexMatrix::from_real_diag(&[1.01, -0.01]);
        assert!(matches!(
            DensityMatrix::from_clamped(bad, vec![2]),
            Err(Error::NonPhysical(_))
        ));
    }

    #[test]
    fn json_round_trip_and_diagnostics() {
        let mut rng = seeded_rng(8, 0);
        let rho = random_density(&[2, 2], 3, &mut rng);
        let back = DensityMatrix::from_json(&rho.to_json()).unwrap();
        assert_eq!(back, rho);
        let err =
            DensityMatrix::from_json(r#"{"dims":[2],"re":[[0.7,0],[0,0.7]],"im":[[0,0],[0,0]]}"#);
        assert!(err.unwrap_err().to_string().contains("unit trace"));
        assert!(matches!(
            DensityMatrix::from_json("{"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn schmidt_vector_validation() {
        assert!(SchmidtVector::new(vec![0.5, 0.5]).is_ok());
        assert!(SchmidtVector::new(vec![0.4, 0.6]).is_err());
        assert!(SchmidtVector::new(vec![0.5, 0.4]).is_err());
        let s = SchmidtVector::from_unsorted(vec![1.0, 3.0]).unwrap();
        assert_eq!(s.probs(), &[0.75, 0.25]);
        let back = SchmidtVector::of_pure_state(&s.state_vector(), 2, 2).unwrap();
        assert!((back.probs()[0] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn pure_trace_distance_matches_matrix_form() {
        let a = SchmidtVector::new(vec![0.7, 0.2, 0.1]).unwrap();
        let b = SchmidtVector::new(vec![0.5, 0.3, 0.2]).unwrap();
        let direct = a.to_density().trace_distance(&b.to_density()).unwrap();
        assert!((a.pure_trace_distance(&b) - direct).abs() < 1e-10);
    }
}
