//! Quantum channels in Kraus form, the channel families used throughout, and Choi states.

mod families;
mod format;

pub use families::{
    completely_depolarizing, dephasing, depolarizing_length, gad_channel, identity, pauli_channel,
    random_channel, unitary_mixture, PauliWeights,
};
pub use format::{ChannelJson, MatrixJson};

use crate::error::{Error, Result};
use crate::linalg::density::{max_entangled_vector, normalize_subsystems, permutation_map};
use crate::linalg::{hermitian_eig, ComplexMatrix, DensityMatrix, ProbDist};

/// Completeness tolerance `max |Σ K†K − I|`.
pub const CPTP_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannel {
    kraus: Vec<ComplexMatrix>,
    dim_in: usize,
    dim_out: usize,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidArgument(
                "zero-dimensional Kraus operator".into(),
            ));
        }
        if let Some(k) = kraus
            .iter()
            .find(|k| (k.rows(), k.cols()) != (dim_out, dim_in))
        {
            return Err(Error::InvalidArgument(format!(
                "Kraus operator is {}x{}, expected {dim_out}x{dim_in}",
                k.rows(),
                k.cols()
            )));
        }
        if kraus.iter().any(|k| !k.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite Kraus entry".into()));
        }
        let ch = Self {
            kraus,
            dim_in,
            dim_out,
        };
        let err = ch.completeness_error();
        if err > CPTP_TOL {
            return Err(Error::InvalidArgument(format!(
                "Kraus operators not trace preserving (deviation {err:.3e})"
            )));
        }
        Ok(ch)
    }

    pub(crate) fn from_kraus_unchecked(kraus: Vec<ComplexMatrix>) -> Self {
        let (dim_out, dim_in) = (kraus[0].rows(), kraus[0].cols());
        Self {
            kraus,
            dim_in,
            dim_out,
        }
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn completeness_error(&self) -> f64 {
        let mut s = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            s = &s + &k.adjoint().matmul(k);
        }
        (&s - &ComplexMatrix::identity(self.dim_in)).max_abs()
    }

    /// `Σ K ρ K†` on the whole input space.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim_in {
            return Err(Error::InvalidArgument(format!(
                "state dimension {} does not match channel input {}",
                rho.dim(),
                self.dim_in
            )));
        }
        let dims = if self.dim_in == self.dim_out {
            rho.dims().to_vec()
        } else {
            vec![self.dim_out]
        };
        DensityMatrix::from_clamped(self.apply_matrix(rho.matrix()), dims)
    }

    fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = &out + &k.conjugate(m);
        }
        out
    }

    /// `(1 ⊗ Λ)(ρ)` with the channel on the last subsystem.
    pub fn apply_to_half(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let last = rho.dims().len().checked_sub(1).expect("dims nonempty");
        self.apply_on(rho, &[last])
    }

    /// Applies the channel to the joint system formed by `subsystems` (in the listed order),
    /// leaving the others untouched. A channel that changes dimension must act on a single subsystem.
    pub fn apply_on(&self, rho: &DensityMatrix, subsystems: &[usize]) -> Result<DensityMatrix> {
        let n = rho.dims().len();
        let sorted = normalize_subsystems(subsystems, n)?;
        if sorted.len() != subsystems.len() || sorted.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "bad subsystem list {subsystems:?}"
            )));
        }
        let target: usize = subsystems.iter().map(|&i| rho.dims()[i]).product();
        if target != self.dim_in {
            return Err(Error::InvalidArgument(format!(
                "subsystems {subsystems:?} have dimension {target}, channel expects {}",
                self.dim_in
            )));
        }
        if self.dim_in != self.dim_out && subsystems.len() != 1 {
            return Err(Error::InvalidArgument(
                "dimension-changing channel must act on one subsystem".into(),
            ));
        }
        // Move targets to the end, act blockwise on (rest) x (target), move back.
        let rest: Vec<usize> = (0..n).filter(|i| !subsystems.contains(i)).collect();
        let perm: Vec<usize> = rest.iter().chain(subsystems).copied().collect();
        let moved = rho.permute_subsystems(&perm)?;
        let dr = rho.dim() / target;
        let m = moved.matrix();
        let (di, dout) = (self.dim_in, self.dim_out);
        let mut out = ComplexMatrix::zeros(dr * dout, dr * dout);
        for a in 0..dr {
            for b in 0..dr {
                let block = ComplexMatrix::from_fn(di, di, |i, j| m[(a * di + i, b * di + j)]);
                let img = self.apply_matrix(&block);
                for i in 0..dout {
                    for j in 0..dout {
                        out[(a * dout + i, b * dout + j)] = img[(i, j)];
                    }
                }
            }
        }
        let mut moved_dims: Vec<usize> = rest.iter().map(|&i| rho.dims()[i]).collect();
        if subsystems.len() == 1 {
            moved_dims.push(dout);
        } else {
            moved_dims.extend(subsystems.iter().map(|&i| rho.dims()[i]));
        }
        // inverse permutation restores the original subsystem order
        let mut inv = vec![0; n];
        for (pos, &p) in perm.iter().enumerate() {
            inv[p] = pos;
        }
        let map = permutation_map(&moved_dims, &inv);
        let d = out.rows();
        let back = ComplexMatrix::from_fn(d, d, |i, j| out[(map[i], map[j])]);
        let dims = inv.iter().map(|&p| moved_dims[p]).collect();
        DensityMatrix::from_clamped(back, dims)
    }

    /// `(1 ⊗ Λ)(φ_d+)`.
    pub fn choi_state(&self) -> Result<DensityMatrix> {
        if self.dim_in != self.dim_out {
            return Err(Error::InvalidArgument(
                "Choi state needs a square channel".into(),
            ));
        }
        let d = self.dim_in;
        let phi = DensityMatrix::from_pure(&max_entangled_vector(d), vec![d, d])?;
        self.apply_to_half(&phi)
    }

    /// Outcome probabilities `Tr[K_i†K_i]/d` on half of a maximally entangled state.
    pub fn kraus_outcome_dist(&self) -> ProbDist {
        let d = self.dim_in as f64;
        let p: Vec<f64> = self
            .kraus
            .iter()
            .map(|k| k.frobenius_norm().powi(2) / d)
            .collect();
        let s: f64 = p.iter().sum();
        ProbDist::new(p.iter().map(|x| x / s).collect()).expect("nonnegative by construction")
    }

    /// True when `Tr[K_i†K_j] = 0` for `i ≠ j`.
    pub fn is_kraus_orthogonal(&self, tol: f64) -> bool {
        for (i, a) in self.kraus.iter().enumerate() {
            for b in &self.kraus[i + 1..] {
                let ip: num_complex::Complex64 = a
                    .data()
                    .iter()
                    .zip(b.data())
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                if ip.norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Minimal orthogonal Kraus representation read off the Choi eigendecomposition.
    pub fn canonical(&self) -> Result<Self> {
        let d = self.dim_in;
        let dout = self.dim_out;
        let phi = DensityMatrix::from_pure(&max_entangled_vector(d), vec![d, d])?;
        // Choi matrix for possibly rectangular channels, built directly.
        let mut choi = ComplexMatrix::zeros(d * dout, d * dout);
        for k in &self.kraus {
            let lifted = ComplexMatrix::identity(d).kron(k);
            choi = &choi + &lifted.conjugate(phi.matrix());
        }
        let eig = hermitian_eig(&choi.hermitian_part())?;
        let mut kraus = Vec::new();
        for (col, &lambda) in eig.values.iter().enumerate() {
            if lambda <= 1e-12 {
                continue;
            }
            let scale = (lambda * d as f64).sqrt();
            kraus.push(ComplexMatrix::from_fn(dout, d, |a, i| {
                eig.vectors[(i * dout + a, col)] * scale
            }));
        }
        Self::new(kraus)
    }

    /// `Λ ⊗ Γ`.
    pub fn tensor(&self, other: &Self) -> Self {
        let kraus = self
            .kraus
            .iter()
            .flat_map(|a| other.kraus.iter().map(move |b| a.kron(b)))
            .collect();
        Self {
            kraus,
            dim_in: self.dim_in * other.dim_in,
            dim_out: self.dim_out * other.dim_out,
        }
    }

    /// `after ∘ self`.
    pub fn then(&self, after: &Self) -> Result<Self> {
        if self.dim_out != after.dim_in {
            return Err(Error::InvalidArgument(
                "composition dimension mismatch".into(),
            ));
        }
        let kraus = after
            .kraus
            .iter()
            .flat_map(|b| self.kraus.iter().map(move |a| b.matmul(a)))
            .collect();
        Ok(Self {
            kraus,
            dim_in: self.dim_in,
            dim_out: after.dim_out,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ChannelJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        format::parse_channel(s)
    }
}
