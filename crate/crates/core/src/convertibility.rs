//! Majorization, Nielsen and catalytic convertibility of pure bipartite states, plus the
//! finite ε-net of targets used to make catalysis universal over a whole dimension.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::SchmidtVector;
use crate::measures::h2;

const MAJ_TOL: f64 = 1e-12;
/// Nets larger than this are refused.
pub const NET_CAP: usize = 5_000_000;
/// Entropies of net points closer than this are separated by nudging toward the product corner.
const GAP_FLOOR: f64 = 1e-9;

fn pair(q: &SchmidtVector, p: &SchmidtVector) -> (SchmidtVector, SchmidtVector) {
    let d = q.len().max(p.len());
    (q.padded(d), p.padded(d))
}

/// `Σ_{i>k}` for every `k = 0..d`; exact for tiny tails where prefix sums would round to 1.
fn tails(p: &[f64]) -> Vec<f64> {
    let mut t = vec![0.0; p.len() + 1];
    for k in (0..p.len()).rev() {
        t[k] = t[k + 1] + p[k];
    }
    t[1..].to_vec()
}

/// `q` majorizes `p`: every prefix sum of `q` dominates that of `p`, within 1e-12.
pub fn majorizes(q: &SchmidtVector, p: &SchmidtVector) -> bool {
    let (q, p) = pair(q, p);
    let (mut sq, mut sp) = (0.0, 0.0);
    q.probs().iter().zip(p.probs()).all(|(a, b)| {
        sq += a;
        sp += b;
        sq >= sp - MAJ_TOL
    })
}

/// Every proper prefix inequality strict (`k = 1..d−1`), compared through the complementary tails.
pub fn strictly_majorizes(q: &SchmidtVector, p: &SchmidtVector) -> bool {
    let (q, p) = pair(q, p);
    let d = q.len();
    let (tq, tp) = (tails(q.probs()), tails(p.probs()));
    (0..d - 1).all(|k| tq[k] < tp[k])
}

/// Strict wherever `p` still has weight beyond `k`; where its tail is exactly zero only `q`'s must vanish too.
pub fn strictly_majorizes_relaxed(q: &SchmidtVector, p: &SchmidtVector) -> bool {
    let (q, p) = pair(q, p);
    let d = q.len();
    let (tq, tp) = (tails(q.probs()), tails(p.probs()));
    (0..d - 1).all(|k| {
        if tp[k] == 0.0 {
            tq[k] == 0.0
        } else {
            tq[k] < tp[k]
        }
    })
}

/// LOCC conversion `ψ → φ` without catalyst.
pub fn nielsen_convertible(psi: &SchmidtVector, phi: &SchmidtVector) -> bool {
    majorizes(phi, psi)
}

/// Conversion with a correlated catalyst: entanglement entropy alone decides.
pub fn catalytic_convertible(psi: &SchmidtVector, phi: &SchmidtVector) -> bool {
    psi.entropy() >= phi.entropy() - MAJ_TOL
}

/// `2 log₂ Σ √p_i`, the logarithmic negativity of a pure state.
pub fn pure_log_negativity(p: &SchmidtVector) -> f64 {
    2.0 * p.probs().iter().map(|x| x.sqrt()).sum::<f64>().log2()
}

/// Qutrit state `sinα cosβ|00> + cosα cosβ|11> + sinβ|22>`.
pub fn qutrit_family(alpha: f64, beta: f64) -> SchmidtVector {
    let amps = [
        alpha.sin() * beta.cos(),
        alpha.cos() * beta.cos(),
        beta.sin(),
    ];
    SchmidtVector::from_unsorted(amps.iter().map(|a| a * a).collect())
        .expect("amplitudes are normalized")
}

/// A pair where entropy and log-negativity disagree: `ψ` has more entropy, `φ` more negativity.
pub fn ordering_example() -> (SchmidtVector, SchmidtVector) {
    (qutrit_family(1.3, 0.75), qutrit_family(0.7, 1.0))
}

/// Two-qubit pairs `(p_ψ, p_φ)` of top coefficients on a grid over `[½, 1]` where the orderings disagree.
pub fn two_qubit_ordering_violations(step: f64) -> Vec<(f64, f64)> {
    let n = (0.5 / step).round() as usize;
    let pts: Vec<(f64, f64, f64)> = (0..=n)
        .map(|i| {
            let p = 0.5 + i as f64 * step;
            let s = SchmidtVector::from_unsorted(vec![p, 1.0 - p]).expect("valid");
            (p, s.entropy(), pure_log_negativity(&s))
        })
        .collect();
    let mut out = Vec::new();
    for a in &pts {
        for b in &pts {
            if a.1 >= b.1 && a.2 < b.2 {
                out.push((a.0, b.0));
            }
        }
    }
    out
}

/// Finite family of targets: every Schmidt vector is close to, and strictly majorized by, one of them.
#[derive(Clone, Debug)]
pub struct EpsNet {
    pub d: usize,
    pub eps: f64,
    pub points: Vec<SchmidtVector>,
    /// Minimal separation `L` of distinct positive entropies.
    pub pairwise_gap: f64,
    /// Mesh radius for the initial-state net: `δ < ε/4` and `δ/2·log₂(d−1) + h(δ/2) < L`.
    pub delta: f64,
    /// Amplitude grid step.
    pub step: f64,
    index: HashMap<Vec<u32>, usize>,
}

#[derive(Serialize)]
struct EpsNetJson<'a> {
    d: usize,
    eps: f64,
    #[serde(rename = "L")]
    l: f64,
    points: &'a [SchmidtVector],
}

impl EpsNet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&EpsNetJson {
            d: self.d,
            eps: self.eps,
            l: self.pairwise_gap,
            points: &self.points,
        })
        .expect("net serializes")
    }

    pub fn product_corner(&self) -> SchmidtVector {
        corner(self.d)
    }
}

fn corner(d: usize) -> SchmidtVector {
    let mut v = vec![0.0; d];
    v[0] = 1.0;
    SchmidtVector::new(v).expect("corner is valid")
}

/// Step so that rounding tail amplitudes down moves the state by less than `radius/2` in trace distance.
/// With every tail amplitude off by less than `h`, the amplitude vector moves by less than `h√(d(d−1))`.
fn grid_step(d: usize, radius: f64) -> f64 {
    radius / (4.0 * ((d * (d - 1)) as f64).sqrt())
}

fn estimate_size(d: usize, h: f64) -> usize {
    let m = (1.0 / (std::f64::consts::SQRT_2 * h)).floor() + 1.0;
    let fact: f64 = (1..d).map(|k| k as f64).product();
    (m.powi(d as i32 - 1) / fact).min(usize::MAX as f64 / 2.0) as usize
}

/// Nonincreasing tail indices `m_2 ≥ … ≥ m_d ≥ 0` with top amplitude at least `h·m_2`.
fn enumerate_grid(d: usize, h: f64) -> Result<Vec<Vec<u32>>> {
    let est = estimate_size(d, h);
    if est > 10 * NET_CAP {
        return Err(Error::NetTooLarge(est));
    }
    fn rec(
        d: usize,
        h: f64,
        cur: &mut Vec<u32>,
        norm: f64,
        out: &mut Vec<Vec<u32>>,
        est: usize,
    ) -> Result<()> {
        if cur.len() == d - 1 {
            if out.len() >= NET_CAP {
                return Err(Error::NetTooLarge(est.max(NET_CAP + 1)));
            }
            out.push(cur.clone());
            return Ok(());
        }
        let bound = cur.last().copied().unwrap_or(u32::MAX);
        let mut m = 0u32;
        loop {
            if m > bound {
                break;
            }
            let b = h * m as f64;
            let norm2 = norm + b * b;
            let top = cur.first().map_or(b, |&m2| h * m2 as f64);
            if norm2 + top * top > 1.0 + 1e-12 {
                break;
            }
            cur.push(m);
            rec(d, h, cur, norm2, out, est)?;
            cur.pop();
            m += 1;
        }
        Ok(())
    }
    let mut out = Vec::new();
    rec(d, h, &mut Vec::with_capacity(d - 1), 0.0, &mut out, est)?;
    Ok(out)
}

fn grid_point(m: &[u32], h: f64) -> SchmidtVector {
    let tail: Vec<f64> = m.iter().map(|&k| (h * k as f64).powi(2)).collect();
    let rest: f64 = tail.iter().sum();
    let mut v = Vec::with_capacity(m.len() + 1);
    v.push((1.0 - rest).max(0.0));
    v.extend(tail);
    SchmidtVector::from_unsorted(v).expect("grid point is a distribution")
}

/// Tail amplitudes rounded down to the grid value strictly below them.
fn round_down(phi: &SchmidtVector, h: f64) -> Vec<u32> {
    phi.probs()[1..]
        .iter()
        .map(|&p| {
            let k = (p.sqrt() / h).ceil() - 1.0;
            if k <= 0.0 {
                0
            } else {
                k as u32
            }
        })
        .collect()
}

fn check_domain(d: usize, eps: f64) -> Result<()> {
    if !(2..=4).contains(&d) {
        return Err(Error::InvalidArgument(format!(
            "local dimension {d} outside 2..=4"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "eps = {eps} outside (0, 1)"
        )));
    }
    Ok(())
}

fn mix_toward_corner(p: &SchmidtVector, t: f64) -> SchmidtVector {
    let mut v: Vec<f64> = p.probs().iter().map(|x| (1.0 - t) * x).collect();
    v[0] += t;
    SchmidtVector::from_unsorted(v).expect("mixture is a distribution")
}

/// Lowers the entropy of `p` to `target` by mixing with the product corner.
fn lower_entropy_to(p: &SchmidtVector, target: f64) -> SchmidtVector {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mix_toward_corner(p, mid).entropy() > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    mix_toward_corner(p, hi)
}

/// Grid of targets whose trace-distance mesh is below `ε/20`; strict majorization comes from
/// rounding tail amplitudes down, which shifts weight onto the top coefficient.
pub fn build_eps_net(d: usize, eps: f64) -> Result<EpsNet> {
    check_domain(d, eps)?;
    let step = grid_step(d, eps / 10.0);
    let grid = enumerate_grid(d, step)?;
    let mut points: Vec<SchmidtVector> = grid.iter().map(|m| grid_point(m, step)).collect();

    // walk entropies downward and push near-ties toward the corner
    let mut order: Vec<usize> = (0..points.len()).collect();
    let ent: Vec<f64> = points.iter().map(|p| p.entropy()).collect();
    order.sort_by(|&a, &b| ent[b].total_cmp(&ent[a]));
    let mut prev = f64::INFINITY;
    for &i in &order {
        let s = points[i].entropy();
        if s <= 0.0 {
            continue;
        }
        if prev - s < GAP_FLOOR {
            let moved = lower_entropy_to(&points[i], prev - 2.0 * GAP_FLOOR);
            if moved.entropy() <= 0.0 {
                return Err(Error::InvalidState {
                    invariant: "positive entropy gap",
                    magnitude: s,
                });
            }
            points[i] = moved;
        }
        prev = points[i].entropy();
    }

    let mut positive: Vec<f64> = points
        .iter()
        .map(|p| p.entropy())
        .filter(|&s| s > 0.0)
        .collect();
    positive.sort_by(f64::total_cmp);
    let pairwise_gap = positive
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let pairwise_gap = if pairwise_gap.is_finite() {
        pairwise_gap
    } else {
        1.0
    };
    let delta = initial_delta(d, eps, pairwise_gap);
    let index = grid.into_iter().enumerate().map(|(i, m)| (m, i)).collect();
    Ok(EpsNet {
        d,
        eps,
        points,
        pairwise_gap,
        delta,
        step,
        index,
    })
}

/// Largest `δ < ε/4` with `δ/2·log₂(d−1) + h(δ/2) < L`.
pub fn initial_delta(d: usize, eps: f64, gap: f64) -> f64 {
    let ok = |x: f64| x / 2.0 * ((d - 1) as f64).log2() + h2(x / 2.0) < gap;
    let (mut lo, mut hi) = (0.0, eps / 4.0);
    if ok(hi) {
        // keep the inequality strict
        return hi * (1.0 - 1e-12);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Initial states within trace distance `δ` of any Schmidt vector, each majorizing what it covers.
pub fn build_initial_net(net: &EpsNet) -> Result<Vec<SchmidtVector>> {
    let h = grid_step(net.d, 2.0 * net.delta);
    Ok(enumerate_grid(net.d, h)?
        .iter()
        .map(|m| grid_point(m, h))
        .collect())
}

/// Index set `F = {(r, s) : S(ψ_r) ≥ S(φ_s)}` of catalysable pairs.
pub fn catalysis_index_set(initial: &[SchmidtVector], net: &EpsNet) -> Vec<(usize, usize)> {
    let ts: Vec<f64> = net.points.iter().map(|p| p.entropy()).collect();
    let mut out = Vec::new();
    for (r, psi) in initial.iter().enumerate() {
        let s = psi.entropy();
        out.extend(
            ts.iter()
                .enumerate()
                .filter(|(_, &t)| s >= t)
                .map(|(j, _)| (r, j)),
        );
    }
    out
}

/// Whether `g` is a valid target for `phi`: within `ε/4` and strictly majorizing it (or the corner).
pub fn is_valid_target(g: &SchmidtVector, phi: &SchmidtVector, net: &EpsNet) -> bool {
    let is_corner = g.probs()[0] == 1.0;
    g.pure_trace_distance(phi) < net.eps / 4.0 && (is_corner || strictly_majorizes_relaxed(g, phi))
}

/// Net point serving as conversion target for `phi`.
pub fn select_target(phi: &SchmidtVector, net: &EpsNet) -> Result<SchmidtVector> {
    if phi.len() > net.d {
        return Err(Error::InvalidArgument(format!(
            "Schmidt rank {} exceeds net dimension {}",
            phi.len(),
            net.d
        )));
    }
    let phi = phi.padded(net.d);
    let fits =
        |g: &SchmidtVector| is_valid_target(g, &phi, net) && g.entropy() <= phi.entropy() + MAJ_TOL;
    if let Some(&i) = net.index.get(&round_down(&phi, net.step)) {
        if fits(&net.points[i]) {
            return Ok(net.points[i].clone());
        }
    }
    // tie-down fallback: closest valid point whose entropy does not exceed phi's
    net.points
        .iter()
        .filter(|g| fits(g))
        .min_by(|a, b| {
            a.pure_trace_distance(&phi)
                .total_cmp(&b.pure_trace_distance(&phi))
        })
        .cloned()
        .ok_or_else(|| Error::InvalidState {
            invariant: "net coverage",
            magnitude: phi.probs()[0],
        })
}
