//! Bounds on catalytic quantum capacity: Choi-entropy and Kraus-count sufficient conditions,
//! Pauli-channel thresholds, amplitude-damping ranges and a bracketing report.

use serde::Serialize;

use crate::channels::{gad_channel, QuantumChannel};
use crate::error::{Error, Result};
use crate::linalg::density::max_entangled_vector;
use crate::linalg::{pauli, ComplexMatrix, DensityMatrix};
use crate::measures::{
    entropy_bits, eof_bell_diagonal, eof_two_qubit, shannon_entropy, squashed_ub_mc,
    von_neumann_entropy,
};

/// Bisection width for the Pauli thresholds.
pub const PAULI_TOL: f64 = 1e-6;
/// Bisection width for the amplitude-damping range.
pub const ADC_TOL: f64 = 1e-4;
/// Margin below `m/n` that the Monte-Carlo bound must clear to rule out transmission.
pub const ESQ_MARGIN: f64 = 1e-4;
const SLACK: f64 = 1e-9;

/// `S(ρ^A) − S(ρ^{AB})` with `A` the first subsystem.
pub fn hashing_bound(rho: &DensityMatrix) -> Result<f64> {
    if rho.dims().len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "hashing bound needs a bipartite state, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(von_neumann_entropy(&rho.partial_trace(&[0])?).value - von_neumann_entropy(rho).value)
}

fn check_square(ch: &QuantumChannel) -> Result<usize> {
    if ch.dim_in() != ch.dim_out() {
        return Err(Error::InvalidArgument(
            "capacity bounds need a square channel".into(),
        ));
    }
    Ok(ch.dim_in())
}

/// Sufficient condition `S(Choi) ≤ log₂ d − m` for sending `m` qubits.
pub fn choi_entropy_transmit(ch: &QuantumChannel, m: u32) -> Result<bool> {
    let d = check_square(ch)?;
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let s = von_neumann_entropy(&ch.choi_state()?).value;
    Ok(s <= (d as f64).log2() - m as f64 + SLACK)
}

/// `max(0, ⌊log₂ d − H(p_i)⌋)` from the Kraus outcome distribution.
pub fn qc_lower_kraus(ch: &QuantumChannel) -> Result<u32> {
    let d = check_square(ch)?;
    let h = shannon_entropy(&ch.kraus_outcome_dist()).value;
    Ok(((d as f64).log2() - h + SLACK).floor().max(0.0) as u32)
}

/// Entropy of `(p_max, (1−p_max)/3, (1−p_max)/3, (1−p_max)/3)`, the largest among
/// four-outcome distributions with maximal entry `p_max`.
pub fn worst_case_entropy(pmax: f64) -> Result<f64> {
    if !(0.25..=1.0).contains(&pmax) {
        return Err(Error::InvalidArgument(format!(
            "p_max {pmax} outside [1/4, 1]"
        )));
    }
    let r = (1.0 - pmax) / 3.0;
    Ok(entropy_bits(&[pmax, r, r, r]))
}

/// Bisection for the crossing of a monotone predicate on `[lo, hi]`: `pred(lo)` false, `pred(hi)` true.
fn bisect(mut lo: f64, mut hi: f64, tol: f64, pred: impl Fn(f64) -> bool) -> f64 {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn check_copies(n: u32, m: u32) -> Result<f64> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("n and m must be at least 1".into()));
    }
    let ratio = m as f64 / n as f64;
    if ratio > 1.0 {
        return Err(Error::Infeasible(format!(
            "{m} qubits through {n} qubit channels"
        )));
    }
    Ok(ratio)
}

/// Smallest `p_max` above which `n` Pauli channels provably carry `m` qubits.
pub fn pauli_transmit_threshold(n: u32, m: u32) -> Result<f64> {
    let target = 1.0 - check_copies(n, m)?;
    Ok(entropy_crossing(target))
}

/// `p_max` where the worst-case entropy falls to `target`.
fn entropy_crossing(target: f64) -> f64 {
    if target <= 0.0 {
        return 1.0;
    }
    bisect(0.25, 1.0, PAULI_TOL, |p| {
        worst_case_entropy(p).expect("in range") <= target
    })
}

/// Large-`n` limit of the transmit threshold: worst-case entropy equal to one bit.
pub fn pauli_transmit_limit() -> f64 {
    entropy_crossing(1.0)
}

/// `p_max` below which `n` Pauli channels cannot carry `m` qubits, from the formation bound.
pub fn pauli_converse_ef(n: u32, m: u32) -> Result<f64> {
    let target = check_copies(n, m)?;
    if target >= 1.0 {
        return Ok(1.0);
    }
    Ok(bisect(0.5, 1.0, PAULI_TOL, |p| {
        eof_bell_diagonal(p).expect("in range").value >= target
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Impossible,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EsqConverse {
    pub bound: f64,
    pub target: f64,
    pub verdict: Verdict,
}

/// Monte-Carlo squashed-entanglement converse for `n` copies of the dephasing channel.
pub fn pauli_converse_esq_mc(
    p: f64,
    n: u32,
    m: u32,
    samples: usize,
    seed: u64,
) -> Result<EsqConverse> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("n and m must be at least 1".into()));
    }
    let target = m as f64 / n as f64;
    let choi = crate::channels::dephasing(p)?.choi_state()?;
    let bound = squashed_ub_mc(&choi, samples, seed)?.value;
    let verdict = if bound < target - ESQ_MARGIN {
        Verdict::Impossible
    } else {
        Verdict::Inconclusive
    };
    Ok(EsqConverse {
        bound,
        target,
        verdict,
    })
}

/// Hashing bound of the amplitude-damping Choi state from its closed-form spectrum
/// `{(d−(d−1)p)/d, p/d (×(d−1)), 0 (×d(d−1))}`.
pub fn adc_hashing_closed_form(d: usize, p: f64) -> f64 {
    let df = d as f64;
    let mut spec = vec![(df - (df - 1.0) * p) / df];
    spec.extend(std::iter::repeat_n(p / df, d - 1));
    df.log2() - entropy_bits(&spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AdcRange {
    pub d: usize,
    pub m: u32,
    pub p_star: f64,
    /// Closed-form hashing bound at `p_star`.
    pub hashing_closed: f64,
    /// Same quantity from the numerically built Choi state.
    pub hashing_numeric: f64,
}

/// Largest damping `p*` with hashing bound at least `m` on `[0, p*]`.
pub fn adc_transmit_range(d: usize, m: u32) -> Result<AdcRange> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("dimension {d} < 3")));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    let need = m as f64;
    if adc_hashing_closed_form(d, 0.0) < need {
        return Err(Error::Infeasible(format!("log2({d}) < {m}")));
    }
    let p_star = if adc_hashing_closed_form(d, 1.0) >= need {
        1.0
    } else {
        // predicate "hashing < m" flips from false to true as p grows; keep the feasible side
        let first_bad = bisect(0.0, 1.0, ADC_TOL, |p| adc_hashing_closed_form(d, p) < need);
        (first_bad - ADC_TOL).max(0.0)
    };
    let hashing_closed = adc_hashing_closed_form(d, p_star);
    let hashing_numeric = hashing_bound(&gad_channel(d, p_star)?.choi_state()?)?;
    Ok(AdcRange {
        d,
        m,
        p_star,
        hashing_closed,
        hashing_numeric,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fig2Row {
    pub n: u32,
    pub solid_pmax: f64,
    pub dashed_pmax: f64,
}

pub fn fig2_curves(ns: &[u32]) -> Result<Vec<Fig2Row>> {
    ns.iter()
        .map(|&n| {
            Ok(Fig2Row {
                n,
                solid_pmax: pauli_transmit_threshold(n, 1)?,
                dashed_pmax: pauli_converse_ef(n, 1)?,
            })
        })
        .collect()
}

pub fn fig2_csv(rows: &[Fig2Row]) -> String {
    let mut s = String::from("n,solid_pmax,dashed_pmax\n");
    for r in rows {
        s.push_str(&format!(
            "{},{:.4},{:.4}\n",
            r.n, r.solid_pmax, r.dashed_pmax
        ));
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fig3Row {
    pub p: f64,
    pub ef: f64,
    pub esq_mc: f64,
}

/// `E_f` and the sampled squashed bound of the dephasing Choi state `pΦ+ + (1−p)Φ−`, same seed at every point.
pub fn fig3_rows(ps: &[f64], samples: usize, seed: u64) -> Result<Vec<Fig3Row>> {
    ps.iter()
        .map(|&p| {
            if !(0.5..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("p = {p} outside [1/2, 1]")));
            }
            let choi = crate::channels::dephasing(p)?.choi_state()?;
            Ok(Fig3Row {
                p,
                ef: eof_bell_diagonal(p)?.value,
                esq_mc: squashed_ub_mc(&choi, samples, seed)?.value,
            })
        })
        .collect()
}

/// `k` evenly spaced points over `[½, 1]`.
pub fn fig3_grid(k: usize) -> Vec<f64> {
    match k {
        0 => vec![],
        1 => vec![1.0],
        _ => (0..k)
            .map(|i| 0.5 + 0.5 * i as f64 / (k - 1) as f64)
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub verdict: bool,
}

/// Bracket `[qc_lower, qc_upper]` on the catalytic capacity plus the evidence behind it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityReport {
    pub channel: String,
    pub dim: usize,
    pub hashing_bound: f64,
    pub choi_entropy: f64,
    pub kraus_entropy: f64,
    pub qc_lower: u32,
    pub qc_upper: u32,
    pub ef_converse: Option<f64>,
    pub esq_mc_converse: Option<f64>,
    pub criteria_log: Vec<Criterion>,
}

/// Matrix of the Choi state in the Bell basis `Φ+, Ψ+, Ψ−, Φ−` (as `I, X, Y, Z` on the second qubit).
fn bell_basis_offdiag(choi: &DensityMatrix) -> f64 {
    let phi = max_entangled_vector(2);
    let basis: Vec<_> = (0..4)
        .map(|k| ComplexMatrix::identity(2).kron(&pauli(k)).matvec(&phi))
        .collect();
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        let mv = choi.matrix().matvec(&basis[i]);
        for (j, b) in basis.iter().enumerate() {
            if i != j {
                let z: num_complex::Complex64 = b.iter().zip(&mv).map(|(x, y)| x.conj() * y).sum();
                worst = worst.max(z.norm());
            }
        }
    }
    worst
}

/// Builds the report. `mc` runs the squashed-entanglement converse with `(samples, seed)` when
/// the channel is a qubit Pauli channel whose Choi state has rank at most two.
pub fn capacity_report(
    ch: &QuantumChannel,
    descriptor: &str,
    mc: Option<(usize, u64)>,
) -> Result<CapacityReport> {
    let d = check_square(ch)?;
    let log_d = (d as f64).log2();
    let choi = ch.choi_state()?;
    let choi_entropy = von_neumann_entropy(&choi).value;
    let hashing = hashing_bound(&choi)?;
    let kraus_entropy = shannon_entropy(&ch.kraus_outcome_dist()).value;
    let kraus_lower = qc_lower_kraus(ch)?;
    let choi_lower = (log_d - choi_entropy + SLACK).floor().max(0.0) as u32;
    let qc_lower = kraus_lower.max(choi_lower);

    let mut criteria_log = vec![
        Criterion {
            name: "choi_entropy <= log2(d) - 1".into(),
            value: choi_entropy,
            threshold: log_d - 1.0,
            verdict: choi_entropy <= log_d - 1.0 + SLACK,
        },
        Criterion {
            name: "hashing_bound >= 1".into(),
            value: hashing,
            threshold: 1.0,
            verdict: hashing >= 1.0 - SLACK,
        },
        Criterion {
            name: "log2(d) - H(kraus) >= 1".into(),
            value: log_d - kraus_entropy,
            threshold: 1.0,
            verdict: kraus_lower >= 1,
        },
    ];

    let mut qc_upper = log_d.floor() as u32;
    let mut ef_converse = None;
    let mut esq_mc_converse = None;
    let is_pauli = d == 2 && bell_basis_offdiag(&choi) < 1e-12;
    if is_pauli {
        let ef = eof_two_qubit(&choi)?.value;
        ef_converse = Some(ef);
        qc_upper = qc_upper.min((ef + SLACK).floor() as u32);
        criteria_log.push(Criterion {
            name: "E_f(choi) >= 1".into(),
            value: ef,
            threshold: 1.0,
            verdict: ef >= 1.0 - SLACK,
        });
        if let Some((samples, seed)) = mc {
            if choi.rank(1e-10) <= 2 {
                let b = squashed_ub_mc(&choi, samples, seed)?.value;
                esq_mc_converse = Some(b);
                qc_upper = qc_upper.min((b + ESQ_MARGIN).floor() as u32);
                criteria_log.push(Criterion {
                    name: "E_sq_mc(choi) >= 1".into(),
                    value: b,
                    threshold: 1.0,
                    verdict: b >= 1.0 - ESQ_MARGIN,
                });
            }
        }
    }
    debug_assert!(qc_lower <= qc_upper);
    Ok(CapacityReport {
        channel: descriptor.to_string(),
        dim: d,
        hashing_bound: hashing,
        choi_entropy,
        kraus_entropy,
        qc_lower,
        qc_upper,
        ef_converse,
        esq_mc_converse,
        criteria_log,
    })
}
