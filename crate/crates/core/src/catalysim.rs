//! Dense simulation of turning an asymptotic protocol `Λ_n` on `n` copies into an exact
//! single-copy catalytic one, and of reusing one catalyst across several copies.
//!
//! Register layout for the single-copy construction: `S_1 … S_n C K`, where `S_1` is the fresh
//! copy, `S_2 … S_n C K` hold the catalyst `τ'`, and `K` is an `n`-level classical counter.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::linalg::density::permutation_map;
use crate::linalg::matrix::ONE;
use crate::linalg::{trace_norm, ComplexMatrix, DensityMatrix};
use crate::measures::{h2, mutual_information};

/// Tolerance on the catalyst being handed back unchanged.
pub const RETURN_TOL: f64 = 1e-10;
/// Drift allowed on the catalyst marginal across repeated use.
pub const DRIFT_TOL: f64 = 1e-8;
/// Largest Hilbert-space dimension simulated.
pub const MAX_DIM: usize = 256;

#[derive(Clone, Debug)]
pub struct CatalystPrime {
    pub n: usize,
    /// State on `S^{n−1} C K`.
    pub state: DensityMatrix,
    /// `μ_0 = τ_n, μ_1, …, μ_n = μ`; `μ_j` lives on `S^j C`.
    pub components: Vec<DensityMatrix>,
}

fn kron_all(parts: &[&ComplexMatrix]) -> ComplexMatrix {
    parts
        .iter()
        .fold(ComplexMatrix::identity(1), |acc, m| acc.kron(m))
}

fn power(m: &ComplexMatrix, k: usize) -> ComplexMatrix {
    (0..k).fold(ComplexMatrix::identity(1), |acc, _| acc.kron(m))
}

fn projector(n: usize, k: usize) -> ComplexMatrix {
    let mut p = ComplexMatrix::zeros(n, n);
    p[(k, k)] = ONE;
    p
}

fn sc_dims(ds: usize, dc: usize, copies: usize) -> Vec<usize> {
    let mut d = vec![ds; copies];
    d.push(dc);
    d
}

/// Marginals `μ_j` of `μ` on `S_1 … S_j C`, for `j = 0..=n`.
fn marginals(mu: &DensityMatrix, n: usize) -> Result<Vec<DensityMatrix>> {
    (0..=n)
        .map(|j| {
            let keep: Vec<usize> = (0..j).chain([n]).collect();
            mu.partial_trace(&keep)
        })
        .collect()
}

fn check_budget(dim: usize) -> Result<()> {
    if dim > MAX_DIM {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} exceeds simulation budget {MAX_DIM}"
        )));
    }
    Ok(())
}

/// `τ' = (1/n) Σ_k ρ^{⊗(k−1)} ⊗ μ_{n−k} ⊗ |k><k|`.
pub fn build_catalyst_prime(
    rho: &DensityMatrix,
    mu: &DensityMatrix,
    tau: &DensityMatrix,
    n: usize,
) -> Result<CatalystPrime> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "copy count must be at least 1".into(),
        ));
    }
    let (ds, dc) = (rho.dim(), tau.dim());
    if mu.dim() != ds.pow(n as u32) * dc {
        return Err(Error::InvalidArgument(format!(
            "mu has dimension {}, expected {}",
            mu.dim(),
            ds.pow(n as u32) * dc
        )));
    }
    check_budget(mu.dim() * n / ds)?;
    let mu = mu.clone().with_dims(sc_dims(ds, dc, n))?;
    let components = marginals(&mu, n)?;
    let residual = (components[0].matrix() - tau.matrix()).max_abs();
    if residual > RETURN_TOL {
        return Err(Error::CatalystNotReturned(residual));
    }
    let d = ds.pow(n as u32 - 1) * dc * n;
    let mut state = ComplexMatrix::zeros(d, d);
    for k in 1..=n {
        let block = kron_all(&[
            &power(rho.matrix(), k - 1),
            components[n - k].matrix(),
            &projector(n, k - 1),
        ]);
        state = &state + &block;
    }
    let mut dims = vec![ds; n - 1];
    dims.extend([dc, n]);
    let state = DensityMatrix::from_parts_unchecked(state.scale_real(1.0 / n as f64), dims);
    Ok(CatalystPrime {
        n,
        state,
        components,
    })
}

/// `(1/n) Σ_k ρ^{⊗(k−1)} ⊗ μ_{n+1−k} ⊗ |k><k|`, the expected state after relabelling the counter.
pub fn expected_after_relabel(rho: &DensityMatrix, cat: &CatalystPrime) -> ComplexMatrix {
    let n = cat.n;
    let d = rho.dim().pow(n as u32) * cat.components[0].dim() * n;
    let mut m = ComplexMatrix::zeros(d, d);
    for k in 1..=n {
        let block = kron_all(&[
            &power(rho.matrix(), k - 1),
            cat.components[n + 1 - k].matrix(),
            &projector(n, k - 1),
        ]);
        m = &m + &block;
    }
    m.scale_real(1.0 / n as f64)
}

/// Trace norm of a matrix block-diagonal in its last register of dimension `n`.
fn counter_block_trace_norm(m: &ComplexMatrix, n: usize) -> Result<f64> {
    let d = m.rows() / n;
    let mut off = 0.0f64;
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if i % n != j % n {
                off = off.max(m[(i, j)].norm());
            }
        }
    }
    if off > 1e-14 {
        return trace_norm(m);
    }
    let mut total = 0.0;
    for k in 0..n {
        total += trace_norm(&ComplexMatrix::from_fn(d, d, |x, y| {
            m[(x * n + k, y * n + k)]
        }))?;
    }
    Ok(total)
}

fn permutation_unitary(dims: &[usize], perm: &[usize]) -> ComplexMatrix {
    let map = permutation_map(dims, perm);
    let d = map.len();
    let mut u = ComplexMatrix::zeros(d, d);
    for (i, &j) in map.iter().enumerate() {
        u[(i, j)] = ONE;
    }
    u
}

fn check_unitary(u: &ComplexMatrix, what: &'static str) -> Result<()> {
    let err = u.unitarity_error();
    if err > 1e-12 {
        return Err(Error::InvalidState {
            invariant: what,
            magnitude: err,
        });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct ProtocolRun {
    pub mu: DensityMatrix,
    pub eps_in: f64,
    pub catalyst: CatalystPrime,
    /// State after the counter relabelling.
    pub after_relabel: DensityMatrix,
    /// Output on `S ⊗ (S^{n−1} C K)`.
    pub mu_prime: DensityMatrix,
    pub eps_out: f64,
    pub catalyst_residual: f64,
}

/// Single-copy catalytic protocol built from `Λ_n`, which must map `ρ^{⊗n} ⊗ τ` close to
/// `σ^{⊗n} ⊗ τ` while leaving the `C` marginal exactly `τ`.
pub fn run_protocol(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    tau: &DensityMatrix,
    lam_n: &QuantumChannel,
    n: usize,
) -> Result<ProtocolRun> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "copy count must be at least 1".into(),
        ));
    }
    if sigma.dim() != rho.dim() {
        return Err(Error::InvalidArgument(
            "rho and sigma differ in dimension".into(),
        ));
    }
    let (ds, dc) = (rho.dim(), tau.dim());
    let dsc = ds.pow(n as u32) * dc;
    check_budget(dsc * n)?;
    if lam_n.dim_in() != dsc || lam_n.dim_out() != dsc {
        return Err(Error::InvalidArgument(format!(
            "lam_n maps {} -> {}, expected {dsc} -> {dsc}",
            lam_n.dim_in(),
            lam_n.dim_out()
        )));
    }
    let sc = sc_dims(ds, dc, n);
    let input = DensityMatrix::from_parts_unchecked(
        kron_all(&[&power(rho.matrix(), n), tau.matrix()]),
        sc.clone(),
    );
    let target = DensityMatrix::from_parts_unchecked(
        kron_all(&[&power(sigma.matrix(), n), tau.matrix()]),
        sc.clone(),
    );
    let mu = lam_n.apply(&input)?.with_dims(sc)?;
    let eps_in = mu.trace_distance(&target)?;
    if eps_in >= 2.0 {
        return Err(Error::InvalidArgument(format!(
            "lam_n output is orthogonal to the target (eps = {eps_in:.6})"
        )));
    }
    let catalyst = build_catalyst_prime(rho, &mu, tau, n)?;

    let mut dims = vec![ds; n];
    dims.extend([dc, n]);
    let full = ComplexMatrix::identity(1)
        .kron(rho.matrix())
        .kron(catalyst.state.matrix());
    let full = DensityMatrix::from_parts_unchecked(full, dims.clone());

    // (i) read the counter; on the last value run Λ_n on S^n C
    let eye_sc = ComplexMatrix::identity(dsc);
    let mut kraus: Vec<ComplexMatrix> = (0..n - 1).map(|k| eye_sc.kron(&projector(n, k))).collect();
    kraus.extend(lam_n.kraus().iter().map(|kj| kj.kron(&projector(n, n - 1))));
    let step_i = QuantumChannel::new(kraus)?;
    let after_i = step_i.apply(&full)?;

    // (ii) counter relabel n -> 1, i -> i+1
    let mut shift = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        shift[((k + 1) % n, k)] = ONE;
    }
    let u_ii = eye_sc.kron(&shift);
    check_unitary(&u_ii, "counter relabel unitarity")?;
    let after_relabel = after_i.evolve(&u_ii);

    // (iii) hand the last S slot out and move the catalyst copies back into place
    let perm: Vec<usize> = [n - 1]
        .into_iter()
        .chain(0..n - 1)
        .chain([n, n + 1])
        .collect();
    let u_iii = permutation_unitary(&dims, &perm);
    check_unitary(&u_iii, "slot shift unitarity")?;
    let mu_prime = after_relabel.evolve(&u_iii);
    let tr = mu_prime.matrix().trace();
    if (tr - ONE).norm() > RETURN_TOL {
        return Err(Error::InvalidState {
            invariant: "trace preservation",
            magnitude: (tr - ONE).norm(),
        });
    }

    let returned = mu_prime.partial_trace(&(1..n + 2).collect::<Vec<_>>())?;
    let catalyst_residual =
        counter_block_trace_norm(&(returned.matrix() - catalyst.state.matrix()), n)?;
    if catalyst_residual > RETURN_TOL {
        return Err(Error::CatalystNotReturned(catalyst_residual));
    }
    let ideal = sigma.matrix().kron(catalyst.state.matrix());
    let eps_out = counter_block_trace_norm(&(mu_prime.matrix() - &ideal), n)?;
    Ok(ProtocolRun {
        mu,
        eps_in,
        catalyst,
        after_relabel,
        mu_prime,
        eps_out,
        catalyst_residual,
    })
}

#[derive(Clone, Debug)]
pub struct SequentialRun {
    /// State on `S^n C` after all applications.
    pub joint: DensityMatrix,
    /// Single-use error `‖Λ(ρ⊗τ) − σ⊗τ‖₁`.
    pub eps: f64,
    /// Distance to `σ^{⊗j}⊗τ` after each use `j = 1..=n`.
    pub dists: Vec<f64>,
}

impl SequentialRun {
    pub fn dist(&self) -> f64 {
        *self.dists.last().expect("at least one step")
    }
}

/// Applies one catalytic channel on `S_j C` for `j = 1..=n` in turn.
pub fn sequential_reuse(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    cat_channel: &QuantumChannel,
    tau: &DensityMatrix,
    n: usize,
) -> Result<SequentialRun> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "repetitions must be at least 1".into(),
        ));
    }
    let (ds, dc) = (rho.dim(), tau.dim());
    check_budget(ds.pow(n as u32) * dc)?;
    let single = DensityMatrix::from_parts_unchecked(rho.matrix().kron(tau.matrix()), vec![ds, dc]);
    let out = cat_channel.apply(&single)?.with_dims(vec![ds, dc])?;
    let drift = (out.partial_trace(&[1])?.matrix() - tau.matrix()).max_abs();
    if drift > DRIFT_TOL {
        return Err(Error::CatalystNotReturned(drift));
    }
    let eps = trace_norm(&(out.matrix() - &sigma.matrix().kron(tau.matrix())))?;

    let dims = sc_dims(ds, dc, n);
    let mut joint = DensityMatrix::from_parts_unchecked(
        kron_all(&[&power(rho.matrix(), n), tau.matrix()]),
        dims.clone(),
    );
    let mut dists = Vec::with_capacity(n);
    for j in 0..n {
        joint = cat_channel.apply_on(&joint, &[j, n])?;
        let drift = (joint.partial_trace(&[n])?.matrix() - tau.matrix()).max_abs();
        if drift > DRIFT_TOL {
            return Err(Error::CatalystNotReturned(drift));
        }
        let ideal = kron_all(&[
            &power(sigma.matrix(), j + 1),
            &power(rho.matrix(), n - j - 1),
            tau.matrix(),
        ]);
        dists.push(trace_norm(&(joint.matrix() - &ideal))?);
    }
    Ok(SequentialRun { joint, eps, dists })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecouplingCheck {
    pub mi: f64,
    pub bound: f64,
    pub ok: bool,
}

/// `32 ε log₂ d + 2 h(8ε)`, defined for `ε < 1/16`.
pub fn decoupling_bound(eps: f64, d_ab: usize) -> Result<f64> {
    if !(0.0..1.0 / 16.0).contains(&eps) {
        return Err(Error::BoundOutOfRange(format!(
            "eps = {eps} must lie in [0, 1/16)"
        )));
    }
    Ok(32.0 * eps * (d_ab as f64).log2() + 2.0 * h2(8.0 * eps))
}

/// Mutual information between `system` and the remaining subsystems, against the decoupling bound.
pub fn decoupling_mi_check(
    state: &DensityMatrix,
    system: &[usize],
    eps: f64,
    d_ab: usize,
) -> Result<DecouplingCheck> {
    let bound = decoupling_bound(eps, d_ab)?;
    let rest: Vec<usize> = (0..state.dims().len())
        .filter(|i| !system.contains(i))
        .collect();
    let mi = mutual_information(state, system, &rest)?.value;
    Ok(DecouplingCheck {
        mi,
        bound,
        ok: mi <= bound + 1e-9,
    })
}

/// Everything needed for a single-copy protocol run.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
    pub tau: DensityMatrix,
    pub lam_n: QuantumChannel,
    pub n: usize,
}

pub const PRESETS: [&str; 3] = ["identity", "flip", "correlated"];

fn ket(d: usize, i: usize) -> DensityMatrix {
    DensityMatrix::basis(vec![d], i)
}

fn trivial() -> DensityMatrix {
    DensityMatrix::basis(vec![1], 0)
}

fn x_all(n: usize) -> ComplexMatrix {
    power(&crate::linalg::pauli(1), n)
}

/// `R_x(θ)` on `S_1` controlled by a qubit `C`, with `n − 1` idle copies in between.
fn controlled_rx(n: usize, theta: f64) -> ComplexMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let rx = ComplexMatrix::from_fn(2, 2, |i, j| {
        if i == j {
            Complex64::new(c, 0.0)
        } else {
            Complex64::new(0.0, -s)
        }
    });
    let rest = ComplexMatrix::identity(1 << (n - 1));
    let off = ComplexMatrix::identity(2)
        .kron(&rest)
        .kron(&projector(2, 0));
    let on = rx.kron(&rest).kron(&projector(2, 1));
    &off + &on
}

/// Built-in scenarios on qubit copies:
/// `identity` (`σ = ρ`, no-op, `ε = 0`), `flip` (`|0> → |1>` via `X^{⊗n}` mixed with white noise,
/// trivial `C`), `correlated` (`X^{⊗n}` then a `C`-controlled rotation, `τ = I/2`).
pub fn preset(name: &str, n: usize, eps: f64) -> Result<Scenario> {
    if n == 0 || n > 4 {
        return Err(Error::InvalidArgument(format!(
            "preset copy count {n} outside 1..=4"
        )));
    }
    let dsn = 1usize << n;
    match name {
        "identity" => {
            let rho = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.7, 0.3]), vec![2])?;
            Ok(Scenario {
                sigma: rho.clone(),
                rho,
                tau: trivial(),
                lam_n: crate::channels::identity(dsn),
                n,
            })
        }
        "flip" => {
            let max = 2.0 * (dsn - 1) as f64 / dsn as f64;
            if !(0.0..=max).contains(&eps) {
                return Err(Error::InvalidArgument(format!(
                    "flip preset needs eps in [0, {max}]"
                )));
            }
            let w = eps * dsn as f64 / (2.0 * (dsn - 1) as f64);
            let mut kraus = vec![x_all(n).scale_real((1.0 - w).sqrt())];
            let amp = (w / dsn as f64).sqrt();
            for i in 0..dsn {
                for j in 0..dsn {
                    let mut k = ComplexMatrix::zeros(dsn, dsn);
                    k[(i, j)] = Complex64::new(amp, 0.0);
                    kraus.push(k);
                }
            }
            Ok(Scenario {
                rho: ket(2, 0),
                sigma: ket(2, 1),
                tau: trivial(),
                lam_n: QuantumChannel::new(kraus)?,
                n,
            })
        }
        "correlated" => {
            if !(0.0..1.0).contains(&eps) {
                return Err(Error::InvalidArgument(
                    "correlated preset needs eps in [0, 1)".into(),
                ));
            }
            let u = controlled_rx(n, 2.0 * eps.asin())
                .matmul(&x_all(n).kron(&ComplexMatrix::identity(2)));
            Ok(Scenario {
                rho: ket(2, 0),
                sigma: ket(2, 1),
                tau: DensityMatrix::maximally_mixed(vec![2]),
                lam_n: QuantumChannel::new(vec![u])?,
                n,
            })
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown preset {other:?}; known: {PRESETS:?}"
        ))),
    }
}

/// Single-copy catalytic channel for repeated use: `X` on `S`, then an `R_x` on `S` controlled by `C = I/2`.
pub fn sequential_preset(
    eps: f64,
) -> Result<(DensityMatrix, DensityMatrix, QuantumChannel, DensityMatrix)> {
    let s = preset("correlated", 1, eps)?;
    Ok((s.rho, s.sigma, s.lam_n, s.tau))
}

/// Scenario file: either `preset` (with optional `eps`) or explicit `rho`, `sigma`, `tau`, `lam_n`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioJson {
    n: usize,
    preset: Option<String>,
    eps: Option<f64>,
    rho: Option<serde_json::Value>,
    sigma: Option<serde_json::Value>,
    tau: Option<serde_json::Value>,
    lam_n: Option<serde_json::Value>,
}

/// Default error for presets when the scenario file does not give one.
pub const DEFAULT_PRESET_EPS: f64 = 0.1;

pub fn parse_scenario(s: &str) -> Result<Scenario> {
    let raw: ScenarioJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(name) = raw.preset {
        return preset(&name, raw.n, raw.eps.unwrap_or(DEFAULT_PRESET_EPS));
    }
    let need = |v: Option<serde_json::Value>, what: &str| {
        v.ok_or_else(|| Error::Parse(format!("missing field {what}")))
    };
    let rho = DensityMatrix::from_json(&need(raw.rho, "rho")?.to_string())?;
    let sigma = DensityMatrix::from_json(&need(raw.sigma, "sigma")?.to_string())?;
    let tau = match raw.tau {
        Some(t) => DensityMatrix::from_json(&t.to_string())?,
        None => trivial(),
    };
    let lam_n = QuantumChannel::from_json(&need(raw.lam_n, "lam_n")?.to_string())?;
    Ok(Scenario {
        rho,
        sigma,
        tau,
        lam_n,
        n: raw.n,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProtocolReport {
    pub eps_in: f64,
    pub eps_out: f64,
    pub catalyst_residual: f64,
    pub mi: f64,
    /// Absent when `eps_out ≥ 1/16`, where the bound is undefined.
    pub mi_bound: Option<f64>,
}

pub fn report(sc: &Scenario) -> Result<ProtocolReport> {
    let run = run_protocol(&sc.rho, &sc.sigma, &sc.tau, &sc.lam_n, sc.n)?;
    let rest: Vec<usize> = (1..run.mu_prime.dims().len()).collect();
    let mi = mutual_information(&run.mu_prime, &[0], &rest)?.value;
    let mi_bound = decoupling_bound(run.eps_out, sc.rho.dim()).ok();
    Ok(ProtocolReport {
        eps_in: run.eps_in,
        eps_out: run.eps_out,
        catalyst_residual: run.catalyst_residual,
        mi,
        mi_bound,
    })
}

/// `|+>` on a qubit, for tests and examples.
pub fn plus_state() -> DensityMatrix {
    let v = [
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::new(FRAC_1_SQRT_2, 0.0),
    ];
    DensityMatrix::from_pure(&v, vec![2]).expect("normalized")
}
