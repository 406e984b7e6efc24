//! Monte-Carlo upper bound on squashed entanglement for two-qubit states of rank at most two.
//!
//! The purification `Σ_i √λ_i |v_i> ⊗ |0 i>` on `A B E1 E2` is rotated by a Haar-random
//! two-qubit unitary on `E1 E2`; each sample contributes `I(A;B|E1)/2` of the reduced state.
//! Sampling is split into fixed-size chunks, chunk `c` drawing from substream `c` of the seed,
//! so the minimum depends only on `(seed, samples)`, never on thread count.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{matrix_entropy, Measure, MeasureValue};
use crate::error::{Error, Result};
use crate::linalg::density::pure_marginal;
use crate::linalg::random::{haar_unitary, seeded_rng};
use crate::linalg::{hermitian_eig, DensityMatrix};

pub const MC_CHUNK: usize = 4096;
const RANK_TOL: f64 = 1e-10;
const DIMS: [usize; 4] = [2, 2, 2, 2];

pub fn squashed_ub_mc(rho: &DensityMatrix, samples: usize, seed: u64) -> Result<MeasureValue> {
    if rho.dims() != [2, 2] {
        return Err(Error::InvalidArgument(format!(
            "need a two-qubit state, got dims {:?}",
            rho.dims()
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let eig = hermitian_eig(rho.matrix())?;
    let rank = eig.values.iter().filter(|&&x| x > RANK_TOL).count();
    if rank > 2 {
        return Err(Error::UnsupportedRank(rank));
    }
    let branches: Vec<Vec<Complex64>> = (0..2)
        .map(|i| {
            let s = eig.values[i].max(0.0).sqrt();
            (0..4).map(|k| eig.vectors[(k, i)] * s).collect()
        })
        .collect();

    let chunks = samples.div_ceil(MC_CHUNK);
    let best = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = seeded_rng(seed, c as u64);
            let n = MC_CHUNK.min(samples - c * MC_CHUNK);
            (0..n)
                .map(|_| half_cmi(&branches, &haar_unitary(4, &mut rng)))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(MeasureValue {
        value: best.max(0.0),
        measure: Measure::SquashedUB,
    })
}

/// `I(A;B|E1)/2` for the purification rotated by `u` on `E1 E2`.
fn half_cmi(branches: &[Vec<Complex64>], u: &crate::linalg::ComplexMatrix) -> f64 {
    let mut psi = [Complex64::new(0.0, 0.0); 16];
    for ab in 0..4 {
        for e in 0..4 {
            psi[ab * 4 + e] = branches[0][ab] * u[(e, 0)] + branches[1][ab] * u[(e, 1)];
        }
    }
    // The global state is pure: S(ABE1) = S(E2).
    let s_ae1 = matrix_entropy(&pure_marginal(&psi, &DIMS, &[0, 2]));
    let s_be1 = matrix_entropy(&pure_marginal(&psi, &DIMS, &[1, 2]));
    let s_e2 = matrix_entropy(&pure_marginal(&psi, &DIMS, &[3]));
    let s_e1 = matrix_entropy(&pure_marginal(&psi, &DIMS, &[2]));
    0.5 * (s_ae1 + s_be1 - s_e2 - s_e1)
}
