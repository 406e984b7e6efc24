//! JSON forms: explicit `{"dim_in","dim_out","kraus":[{"re","im"}]}` or a `{"family": ...}` shorthand.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    completely_depolarizing, dephasing, depolarizing_length, gad_channel, identity, pauli_channel,
    unitary_mixture, PauliWeights, QuantumChannel,
};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        if self.im.len() != rows || self.re.iter().chain(&self.im).any(|r| r.len() != cols) {
            return Err(Error::Parse(
                "re and im must be rectangular arrays of equal shape".into(),
            ));
        }
        let data = self
            .re
            .iter()
            .zip(&self.im)
            .flat_map(|(r, i)| r.iter().zip(i).map(|(&a, &b)| Complex64::new(a, b)))
            .collect();
        ComplexMatrix::from_vec(rows, cols, data)
    }
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let re = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m[(i, j)].re).collect())
            .collect();
        let im = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m[(i, j)].im).collect())
            .collect();
        Self { re, im }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
}

impl From<&QuantumChannel> for ChannelJson {
    fn from(ch: &QuantumChannel) -> Self {
        Self {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: ch.kraus().iter().map(MatrixJson::from).collect(),
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum Family {
    Pauli { p: PauliWeights },
    Dephasing { p: f64 },
    UnitaryMixture { u: MatrixJson, p: f64 },
    Gad { d: usize, p: f64 },
    Depolarizing { alpha: f64, l: f64 },
    Identity { d: usize },
    CompletelyDepolarizing { d: usize },
}

pub(super) fn parse_channel(s: &str) -> Result<QuantumChannel> {
    let value: serde_json::Value =
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    if value.get("family").is_some() {
        let fam: Family = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
        return match fam {
            Family::Pauli { p } => Ok(pauli_channel(&p)),
            Family::Dephasing { p } => dephasing(p),
            Family::UnitaryMixture { u, p } => unitary_mixture(&u.to_matrix()?, p),
            Family::Gad { d, p } => gad_channel(d, p),
            Family::Depolarizing { alpha, l } => depolarizing_length(alpha, l),
            Family::Identity { d } => Ok(identity(d)),
            Family::CompletelyDepolarizing { d } => Ok(completely_depolarizing(d)),
        };
    }
    let raw: ChannelJson =
        serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let kraus = raw
        .kraus
        .iter()
        .map(MatrixJson::to_matrix)
        .collect::<Result<Vec<_>>>()?;
    let ch = QuantumChannel::new(kraus)?;
    if (ch.dim_in(), ch.dim_out()) != (raw.dim_in, raw.dim_out) {
        return Err(Error::Parse(format!(
            "declared dims ({}, {}) disagree with Kraus shape ({}, {})",
            raw.dim_in,
            raw.dim_out,
            ch.dim_in(),
            ch.dim_out()
        )));
    }
    Ok(ch)
}
