//! Acceptance suite. Runs without the libtest harness so every criterion prints exactly one
//! `PASS`/`FAIL` line; the process exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use rand::Rng;

use entcat::capacity::{
    adc_transmit_range, choi_entropy_transmit, fig2_curves, fig3_grid, fig3_rows,
    pauli_converse_ef, pauli_converse_esq_mc, pauli_transmit_limit, pauli_transmit_threshold,
    worst_case_entropy, Verdict as EsqVerdict,
};
use entcat::catalysim::{
    expected_after_relabel, preset, run_protocol, sequential_preset, sequential_reuse, RETURN_TOL,
};
use entcat::channels::{
    completely_depolarizing, dephasing, depolarizing_length, gad_channel, identity, pauli_channel,
    random_channel, unitary_mixture, PauliWeights, QuantumChannel,
};
use entcat::cli::DEFAULT_SEED;
use entcat::convertibility::{
    build_eps_net, catalytic_convertible, is_valid_target, majorizes, nielsen_convertible,
    pure_log_negativity, qutrit_family, select_target, two_qubit_ordering_violations,
};
use entcat::linalg::random::{haar_unitary, random_density, random_sorted_simplex, seeded_rng};
use entcat::linalg::{trace_distance, SchmidtVector};
use entcat::measures::{entropy_bits, log_negativity, negativity_continuity_bound};
use entcat::nodedist::{
    self, beta_kraus, det_grid, entanglement_breaking_length, feasibility, NodeScenario, Verdict,
    LN3,
};
use entcat::noniid::{build_sequence, delta_conditions, prefix_rows};

type Outcome = Result<String, String>;
type Suite = fn() -> Result<(), String>;

struct Criterion {
    id: &'static str,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn near(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() <= tol
}

// 1
fn qutrit_example() -> Outcome {
    const TOL: f64 = 1e-3;
    let mut msgs = Vec::new();
    let mut ok = true;
    for (a, b, e_want, en_want) in [(1.3, 0.75, 1.195, 1.324), (0.7, 1.0, 1.157, 1.361)] {
        let p = qutrit_family(a, b);
        let (e, en) = (p.entropy(), pure_log_negativity(&p));
        ok &= near(e, e_want, TOL) && near(en, en_want, TOL);
        msgs.push(format!("({a},{b}) -> E={e:.4} E_N={en:.4}"));
    }
    check(ok, msgs.join("; "))
}

// 2
fn pauli_thresholds() -> Outcome {
    const TOL: f64 = 1e-3;
    let solid2 = pauli_transmit_threshold(2, 1).map_err(|e| e.to_string())?;
    let dashed2 = pauli_converse_ef(2, 1).map_err(|e| e.to_string())?;
    let limit = pauli_transmit_limit();
    let rows = fig2_curves(&(1..=50).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    let ordered = rows.iter().all(|r| r.solid_pmax >= r.dashed_pmax);
    let ok = near(solid2, 0.926, TOL)
        && near(dashed2, 0.813, TOL)
        && near(limit, 0.8107, TOL)
        && ordered;
    check(
        ok,
        format!(
            "solid(2)={solid2:.4} dashed(2)={dashed2:.4} limit={limit:.5} solid>=dashed:{ordered}"
        ),
    )
}

// 3
fn adc_thresholds() -> Outcome {
    const TOL: f64 = 5e-3;
    let want = [0.16, 0.25, 0.32, 0.36, 0.40, 0.43];
    let mut got = Vec::new();
    let mut ok = true;
    for (d, w) in (3..=8).zip(want) {
        let p = adc_transmit_range(d, 1).map_err(|e| e.to_string())?.p_star;
        ok &= near(p, w, TOL);
        got.push(format!("d={d}:{p:.4}"));
    }
    check(ok, got.join(" "))
}

// 4a
fn squashed_vs_formation() -> Outcome {
    const MARGIN: f64 = 0.01;
    let rows = fig3_rows(&fig3_grid(21), 100_000, DEFAULT_SEED).map_err(|e| e.to_string())?;
    let worst =
        rows.iter()
            .map(|r| (r.p, r.esq_mc - r.ef))
            .fold(
                (0.0, f64::NEG_INFINITY),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.esq_mc > r.ef + MARGIN)
        .map(|r| format!("{:.3}", r.p))
        .collect();
    check(
        bad.is_empty(),
        format!(
            "max(E_sq_MC - E_f) = {:.4} at p = {:.3}; points over margin: [{}]",
            worst.1,
            worst.0,
            bad.join(",")
        ),
    )
}

// 4b
fn squashed_at_0817() -> Outcome {
    let rows = fig3_rows(&[0.817], 1_000_000, DEFAULT_SEED).map_err(|e| e.to_string())?;
    let b = rows[0].esq_mc;
    check(
        b <= 0.4999,
        format!("E_sq_MC(0.817) = {b:.5} with 1e6 samples"),
    )
}

// 5
fn dephasing_bracket() -> Outcome {
    let ch = dephasing(0.89).map_err(|e| e.to_string())?;
    let two = ch.tensor(&ch);
    let transmit = choi_entropy_transmit(&two, 1).map_err(|e| e.to_string())?;
    let conv =
        pauli_converse_esq_mc(0.817, 2, 1, 1_000_000, DEFAULT_SEED).map_err(|e| e.to_string())?;
    check(
        transmit && conv.verdict == EsqVerdict::Impossible,
        format!(
            "transmit(0.89)={transmit}; converse(0.817): bound {:.5} -> {:?}",
            conv.bound, conv.verdict
        ),
    )
}

// 6
fn node_no_go() -> Outcome {
    const N: usize = 200;
    let cells = det_grid(N, N).map_err(|e| e.to_string())?;
    let min_det = cells.iter().map(|c| c.det).fold(f64::INFINITY, f64::min);
    let mut max_diff = 0.0f64;
    for c in &cells {
        let sc = NodeScenario::new(1.0, LN3, c.s_prime, c.beta)
            .and_then(|s| s.with_kraus(beta_kraus(c.beta)))
            .map_err(|e| e.to_string())?;
        let num = nodedist::det_pt_numeric(&sc).map_err(|e| e.to_string())?;
        max_diff = max_diff.max((num - c.det).abs());
    }
    let mut bound_err = 0.0f64;
    let mut verdicts_ok = true;
    for alpha in [0.5, 1.0, 2.0] {
        let direct = entanglement_breaking_length(alpha, 1e-6).map_err(|e| e.to_string())?;
        let half = bisect_half_channel(alpha).map_err(|e| e.to_string())?;
        bound_err = bound_err
            .max((direct - LN3 / alpha).abs())
            .max((half - 2.0 * LN3 / alpha).abs());
        let v = |l: f64| {
            feasibility(alpha, l)
                .map(|f| f.verdict)
                .map_err(|e| e.to_string())
        };
        verdicts_ok &= v(0.99 * LN3 / alpha)? == Verdict::DirectOK
            && v(1.01 * LN3 / alpha)? == Verdict::CatalyticOnly
            && v(1.99 * LN3 / alpha)? == Verdict::CatalyticOnly
            && v(2.01 * LN3 / alpha)? == Verdict::Impossible;
    }
    check(
        min_det >= -1e-12 && max_diff <= 1e-10 && bound_err <= 1e-5 && verdicts_ok,
        format!("min det {min_det:.3e}; |closed-numeric| {max_diff:.2e}; boundary err {bound_err:.2e}; verdicts ok: {verdicts_ok}"),
    )
}

/// Largest `l` at which the half-length channel's Choi state is still entangled.
fn bisect_half_channel(alpha: f64) -> entcat::Result<f64> {
    let (mut lo, mut hi) = (0.0, 4.0 / alpha);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if feasibility(alpha, mid)?.half_choi_entangled {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

// 7
fn simulator() -> Outcome {
    let id = preset("identity", 3, 0.0).map_err(|e| e.to_string())?;
    let r0 =
        run_protocol(&id.rho, &id.sigma, &id.tau, &id.lam_n, id.n).map_err(|e| e.to_string())?;
    let exact = r0.catalyst_residual <= RETURN_TOL && r0.eps_out <= 1e-12;

    let sc = preset("correlated", 3, 0.1).map_err(|e| e.to_string())?;
    let run =
        run_protocol(&sc.rho, &sc.sigma, &sc.tau, &sc.lam_n, sc.n).map_err(|e| e.to_string())?;
    let inter =
        (run.after_relabel.matrix() - &expected_after_relabel(&sc.rho, &run.catalyst)).max_abs();
    let amplified = run.eps_out < 2.0 * run.eps_in;

    let (rho, sigma, ch, tau) = sequential_preset(0.1).map_err(|e| e.to_string())?;
    let mut reuse_ok = true;
    let mut dists = Vec::new();
    for n in 1..=3 {
        let s = sequential_reuse(&rho, &sigma, &ch, &tau, n).map_err(|e| e.to_string())?;
        reuse_ok &= s.dist() <= n as f64 * s.eps + 1e-12;
        dists.push(format!("{:.4}/{:.4}", s.dist(), n as f64 * s.eps));
    }
    check(
        exact && inter <= 1e-12 && amplified && reuse_ok,
        format!(
            "identity residual {:.1e} eps_out {:.1e}; n=3 eps_in {:.4} eps_out {:.4}; step (ii) diff {inter:.1e}; reuse {}",
            r0.catalyst_residual,
            r0.eps_out,
            run.eps_in,
            run.eps_out,
            dists.join(" ")
        ),
    )
}

// 8
fn property_suites() -> Outcome {
    let parts: [(&str, Suite); 7] = [
        ("majorization order", majorization_laws),
        ("nielsen=>catalytic", nielsen_implies_catalytic),
        ("log-negativity", log_negativity_laws),
        ("cptp", cptp_constructors),
        ("worst-case entropy", worst_case_maximality),
        ("two-qubit ordering", two_qubit_ordering),
        ("eps-net", eps_net_targets),
    ];
    let mut failed = Vec::new();
    for (name, f) in parts {
        if let Err(e) = f() {
            failed.push(format!("{name}: {e}"));
        }
    }
    check(
        failed.is_empty(),
        if failed.is_empty() {
            "7/7 suites".into()
        } else {
            failed.join("; ")
        },
    )
}

fn sv(p: Vec<f64>) -> SchmidtVector {
    SchmidtVector::new(p).expect("sorted simplex")
}

fn majorization_laws() -> Result<(), String> {
    let mut rng = seeded_rng(DEFAULT_SEED, 81);
    for _ in 0..5000 {
        let d = 4;
        let [a, b, c] = [0; 3].map(|_| sv(random_sorted_simplex(d, &mut rng)));
        if !majorizes(&a, &a) {
            return Err("not reflexive".into());
        }
        if majorizes(&a, &b)
            && majorizes(&b, &a)
            && a.probs()
                .iter()
                .zip(b.probs())
                .any(|(x, y)| (x - y).abs() > 1e-9)
        {
            return Err("not antisymmetric".into());
        }
        if majorizes(&a, &b) && majorizes(&b, &c) && !majorizes(&a, &c) {
            return Err("not transitive".into());
        }
        let uniform = sv(vec![0.25; 4]);
        let corner = sv(vec![1.0, 0.0, 0.0, 0.0]);
        if !majorizes(&a, &uniform) || !majorizes(&corner, &a) {
            return Err("extremes not ordered".into());
        }
    }
    Ok(())
}

fn nielsen_implies_catalytic() -> Result<(), String> {
    let mut rng = seeded_rng(DEFAULT_SEED, 82);
    let mut hits = 0;
    for i in 0..10_000 {
        let d = 2 + i % 4;
        let psi = sv(random_sorted_simplex(d, &mut rng));
        let phi = sv(random_sorted_simplex(d, &mut rng));
        if nielsen_convertible(&psi, &phi) {
            hits += 1;
            if !catalytic_convertible(&psi, &phi) {
                return Err(format!("pair {i} violates the implication"));
            }
        }
    }
    if hits == 0 {
        return Err("no convertible pairs sampled".into());
    }
    Ok(())
}

fn log_negativity_laws() -> Result<(), String> {
    let mut rng = seeded_rng(DEFAULT_SEED, 83);
    for _ in 0..200 {
        let r = random_density(&[2, 2], rng.random_range(1..=4), &mut rng);
        let s = random_density(&[2, 3], rng.random_range(1..=6), &mut rng);
        let joint = r
            .tensor(&s)
            .permute_subsystems(&[0, 2, 1, 3])
            .map_err(|e| e.to_string())?;
        let lhs = log_negativity(&joint, 2).map_err(|e| e.to_string())?.value;
        let rhs = log_negativity(&r, 1).map_err(|e| e.to_string())?.value
            + log_negativity(&s, 1).map_err(|e| e.to_string())?.value;
        if (lhs - rhs).abs() > 1e-9 {
            return Err(format!("additivity off by {:.2e}", lhs - rhs));
        }
        let t = random_density(&[2, 2], 4, &mut rng);
        let mix = entcat::linalg::DensityMatrix::new(
            &r.matrix().scale_real(0.9) + &t.matrix().scale_real(0.1),
            vec![2, 2],
        )
        .map_err(|e| e.to_string())?;
        let eps = trace_distance(&r, &mix).map_err(|e| e.to_string())?;
        let gap = (log_negativity(&r, 1).map_err(|e| e.to_string())?.value
            - log_negativity(&mix, 1).map_err(|e| e.to_string())?.value)
            .abs();
        if gap > negativity_continuity_bound(4, eps) + 1e-12 {
            return Err(format!("continuity: gap {gap:.4} at distance {eps:.4}"));
        }
    }
    Ok(())
}

fn cptp_constructors() -> Result<(), String> {
    let mut rng = seeded_rng(DEFAULT_SEED, 84);
    let e = |r: entcat::Result<QuantumChannel>| r.map_err(|e| e.to_string());
    let mut chans = vec![
        e(dephasing(0.3))?,
        e(gad_channel(4, 0.4))?,
        e(depolarizing_length(1.0, 0.7))?,
        identity(3),
        completely_depolarizing(3),
        pauli_channel(&PauliWeights::new([0.4, 0.3, 0.2, 0.1]).map_err(|e| e.to_string())?),
        e(unitary_mixture(&haar_unitary(3, &mut rng), 0.25))?,
    ];
    for k in 1..=4 {
        chans.push(random_channel(2, 3, k, &mut rng));
    }
    chans.push(chans[0].tensor(&chans[2]));
    chans.push(e(chans[1].then(&completely_depolarizing(4)))?);
    for (i, ch) in chans.iter().enumerate() {
        if ch.completeness_error() > 1e-12 {
            return Err(format!(
                "channel {i}: completeness error {:.2e}",
                ch.completeness_error()
            ));
        }
        if ch.dim_in() == ch.dim_out() {
            let choi = ch.choi_state().map_err(|e| e.to_string())?;
            if choi.eigenvalues().iter().any(|&x| x < -1e-10) {
                return Err(format!("channel {i}: Choi state not positive"));
            }
        }
        let out = ch
            .apply(&random_density(&[ch.dim_in()], ch.dim_in(), &mut rng))
            .map_err(|e| e.to_string())?;
        let tr = out.matrix().trace().re;
        if (tr - 1.0).abs() > 1e-12 || out.eigenvalues().iter().any(|&x| x < -1e-10) {
            return Err(format!("channel {i}: output not a state (trace {tr})"));
        }
    }
    Ok(())
}

fn worst_case_maximality() -> Result<(), String> {
    let mut rng = seeded_rng(DEFAULT_SEED, 85);
    for _ in 0..100_000 {
        let p = random_sorted_simplex(4, &mut rng);
        let bound = worst_case_entropy(p[0]).map_err(|e| e.to_string())?;
        if entropy_bits(&p) > bound + 1e-12 {
            return Err(format!("{p:?} beats the worst case"));
        }
    }
    Ok(())
}

fn two_qubit_ordering() -> Result<(), String> {
    let v = two_qubit_ordering_violations(1e-3);
    if v.is_empty() {
        Ok(())
    } else {
        Err(format!("{} ordering reversals, first {:?}", v.len(), v[0]))
    }
}

fn eps_net_targets() -> Result<(), String> {
    let net = build_eps_net(3, 0.5).map_err(|e| e.to_string())?;
    let mut rng = seeded_rng(DEFAULT_SEED, 86);
    for i in 0..1000 {
        let phi = sv(random_sorted_simplex(3, &mut rng));
        let g = select_target(&phi, &net).map_err(|e| e.to_string())?;
        if !is_valid_target(&g, &phi, &net) {
            return Err(format!("target {i} fails the net conditions"));
        }
    }
    Ok(())
}

// 9
fn noniid() -> Outcome {
    let (f, eps) = (0.9, 0.01);
    let seq = build_sequence(f, eps, 1.0).map_err(|e| e.to_string())?;
    let conds = delta_conditions(seq.delta, f, eps) == (true, true) && seq.tail_certified();
    let checkpoints = [1u64, 10, 100, 1_000, 10_000, 100_000, 1_000_000];
    let mut p_max = 0.0f64;
    for &n in &checkpoints {
        p_max = p_max.max(seq.singlet_probability(n, f).map_err(|e| e.to_string())?);
    }
    let budget = seq.entropy_budget(1_000_000).map_err(|e| e.to_string())?;
    let rows = prefix_rows(&seq, 1, 1_000_000, 1).map_err(|e| e.to_string())?;
    let monotone = rows.windows(2).all(|w| w[1].count >= w[0].count)
        && checkpoints
            .windows(2)
            .all(|w| seq.catalytic_singlet_count(w[1]) >= seq.catalytic_singlet_count(w[0]));
    check(
        conds && p_max < 0.01 && budget.within_bracket() && monotone,
        format!(
            "delta {} conditions {conds}; max P_f {p_max:.3e}; sum {:.6e} in [{:.6e}, {:.6e}]; count monotone {monotone}",
            seq.delta, budget.sum, budget.lower, budget.upper
        ),
    )
}

fn main() {
    let criteria = [
        Criterion {
            id: "1",
            name: "qutrit ordering example",
            budget: Duration::from_secs(1),
            run: qutrit_example,
        },
        Criterion {
            id: "2",
            name: "Pauli n-copy thresholds",
            budget: Duration::from_secs(5),
            run: pauli_thresholds,
        },
        Criterion {
            id: "3",
            name: "amplitude-damping thresholds",
            budget: Duration::from_secs(10),
            run: adc_thresholds,
        },
        Criterion {
            id: "4a",
            name: "MC squashed bound vs E_f",
            budget: Duration::from_secs(600),
            run: squashed_vs_formation,
        },
        Criterion {
            id: "4b",
            name: "MC squashed bound at p=0.817",
            budget: Duration::from_secs(600),
            run: squashed_at_0817,
        },
        Criterion {
            id: "5",
            name: "dephasing two-copy bracket",
            budget: Duration::from_secs(600),
            run: dephasing_bracket,
        },
        Criterion {
            id: "6",
            name: "node no-go",
            budget: Duration::from_secs(30),
            run: node_no_go,
        },
        Criterion {
            id: "7",
            name: "catalytic protocol simulator",
            budget: Duration::from_secs(60),
            run: simulator,
        },
        Criterion {
            id: "8",
            name: "property suites",
            budget: Duration::from_secs(600),
            run: property_suites,
        },
        Criterion {
            id: "9",
            name: "non-iid certification",
            budget: Duration::from_secs(30),
            run: noniid,
        },
    ];
    let mut failures = 0;
    for c in &criteria {
        let t = Instant::now();
        let res = (c.run)();
        let dt = t.elapsed();
        let (ok, msg) = match res {
            Ok(m) if dt <= c.budget => (true, m),
            Ok(m) => (
                false,
                format!("{m}; over budget {:.1?} > {:.0?}", dt, c.budget),
            ),
            Err(m) => (false, m),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} criterion {:<3} {:<32} [{:>8.2?}] {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            dt,
            msg
        );
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
