use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::matrix::{pauli, ONE};
use crate::linalg::random::haar_unitary;
use crate::linalg::ComplexMatrix;

/// Weights of `I, X, Y, Z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PauliWeights([f64; 4]);

impl PauliWeights {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "Pauli weight {x} is negative or non-finite"
            )));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "Pauli weights sum to {s}"
            )));
        }
        Ok(Self(p))
    }

    /// `(p_max, (1−p_max)/3, (1−p_max)/3, (1−p_max)/3)`, the highest-entropy weights with a given maximum.
    pub fn symmetric(pmax: f64) -> Result<Self> {
        let r = (1.0 - pmax) / 3.0;
        Self::new([pmax, r, r, r])
    }

    pub fn weights(&self) -> [f64; 4] {
        self.0
    }

    pub fn pmax(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }
}

impl<'de> Deserialize<'de> for PauliWeights {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = <[f64; 4]>::deserialize(d)?;
        PauliWeights::new(p).map_err(serde::de::Error::custom)
    }
}

/// Kraus `{√p_i σ_i}`; zero weights are kept so the outcome distribution mirrors the weights.
pub fn pauli_channel(w: &PauliWeights) -> QuantumChannel {
    QuantumChannel::from_kraus_unchecked(
        (0..4).map(|i| pauli(i).scale_real(w.0[i].sqrt())).collect(),
    )
}

/// `ρ ↦ pρ + (1−p) ZρZ`.
pub fn dephasing(p: f64) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "dephasing parameter {p} outside [0,1]"
        )));
    }
    Ok(pauli_channel(&PauliWeights::new([p, 0.0, 0.0, 1.0 - p])?))
}

/// `ρ ↦ (1−p)ρ + p UρU†` for `p ∈ [0, ½]`.
pub fn unitary_mixture(u: &ComplexMatrix, p: f64) -> Result<QuantumChannel> {
    if !u.is_square() || u.unitarity_error() > 1e-10 {
        return Err(Error::InvalidArgument(
            "mixing operator is not unitary".into(),
        ));
    }
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "mixing weight {p} outside [0, 1/2]"
        )));
    }
    let d = u.rows();
    QuantumChannel::new(vec![
        ComplexMatrix::identity(d).scale_real((1.0 - p).sqrt()),
        u.scale_real(p.sqrt()),
    ])
}

/// Generalized amplitude damping: `K_0 = |0><0| + √(1−p) Σ_{i≥1}|i><i|`, `K_m = √p |0><m|`.
pub fn gad_channel(d: usize, p: f64) -> Result<QuantumChannel> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("dimension {d} < 2")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "damping parameter {p} outside [0,1]"
        )));
    }
    let mut k0 = ComplexMatrix::identity(d).scale_real((1.0 - p).sqrt());
    k0[(0, 0)] = ONE;
    let mut kraus = vec![k0];
    for m in 1..d {
        let mut k = ComplexMatrix::zeros(d, d);
        k[(0, m)] = Complex64::new(p.sqrt(), 0.0);
        kraus.push(k);
    }
    QuantumChannel::new(kraus)
}

/// Qubit depolarizing channel `e^{−αl}ρ + (1−e^{−αl}) I/2` for a fiber of length `l`.
pub fn depolarizing_length(alpha: f64, l: f64) -> Result<QuantumChannel> {
    if !(alpha >= 0.0 && l >= 0.0 && alpha.is_finite() && l.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need alpha, l >= 0 (got {alpha}, {l})"
        )));
    }
    let lambda = (-alpha * l).exp();
    let r = (1.0 - lambda) / 4.0;
    Ok(pauli_channel(&PauliWeights::new([1.0 - 3.0 * r, r, r, r])?))
}

pub fn identity(d: usize) -> QuantumChannel {
    QuantumChannel::from_kraus_unchecked(vec![ComplexMatrix::identity(d)])
}

/// `ρ ↦ I/d`, Kraus `{|i><j|/√d}`.
pub fn completely_depolarizing(d: usize) -> QuantumChannel {
    let s = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    let kraus = (0..d * d)
        .map(|ij| {
            let mut k = ComplexMatrix::zeros(d, d);
            k[(ij / d, ij % d)] = s;
            k
        })
        .collect();
    QuantumChannel::from_kraus_unchecked(kraus)
}

/// Random channel with `k` Kraus operators from a Haar isometry `d_in → d_out·k`.
pub fn random_channel<R: Rng + ?Sized>(
    d_in: usize,
    d_out: usize,
    k: usize,
    rng: &mut R,
) -> QuantumChannel {
    assert!(d_out * k >= d_in, "isometry needs d_out*k >= d_in");
    let u = haar_unitary(d_out * k, rng);
    let kraus = (0..k)
        .map(|m| ComplexMatrix::from_fn(d_out, d_in, |a, i| u[(m * d_out + a, i)]))
        .collect();
    QuantumChannel::from_kraus_unchecked(kraus)
}
