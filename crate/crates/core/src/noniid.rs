//! Non-iid pure-state sequences whose members become ever less entangled while the total
//! entanglement entropy diverges: conversion probability stays small, catalytic extraction
//! count grows without bound.
//!
//! The tail start `N` is astronomically large for realistic parameters (about `2^709` for
//! `f = 0.9, ε = 0.01`), so it is carried as `log₂ N`; indices below `2^52` are also kept exactly.

use std::f64::consts::{FRAC_PI_4, LN_2};

use serde::Serialize;

use crate::error::{Error, Result};

/// Beyond this `log₂ N` the terms `r_k ≈ 2^{−log₂ N}` leave the normal f64 range.
pub const MAX_LOG2_N: f64 = 1000.0;
const MAX_DYADIC_EXPONENT: u32 = 1000;

/// Start of the tail `p_i = r_{N+i}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailStart {
    pub log2: f64,
    pub exact: Option<u64>,
}

impl TailStart {
    pub fn exact(n: u64) -> Self {
        Self {
            log2: (n as f64).log2(),
            exact: Some(n),
        }
    }

    pub fn from_log2(log2: f64) -> Self {
        if log2 <= 52.0 {
            Self::exact(log2.exp2().ceil() as u64)
        } else {
            Self { log2, exact: None }
        }
    }

    /// `log₂(N + i)`.
    fn log2_offset(&self, i: f64) -> f64 {
        match self.exact {
            Some(n) => (n as f64 + i).log2(),
            None => self.log2 + (i * (-self.log2).exp2()).ln_1p() / LN_2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonIidSequence {
    pub u: f64,
    pub delta: f64,
    pub tail: TailStart,
    /// `r_1 = ½`; never reached because the tail starts at `N ≥ 2`.
    pub r1: f64,
}

/// `r_k = 1/(k (log₂ k)^{1+u})` given `log₂ k`.
pub fn r_from_log2(log2k: f64, u: f64) -> f64 {
    (-log2k).exp2() / log2k.powf(1.0 + u)
}

/// Binary entropy accurate for tiny arguments.
fn h_small(p: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (-p).ln_1p() / LN_2
}

fn angle(f: f64) -> f64 {
    f.sqrt().acos()
}

/// Both conditions on `δ` for a target fidelity `f` and error `ε`.
pub fn delta_conditions(delta: f64, f: f64, eps: f64) -> (bool, bool) {
    let a = angle(f);
    let first = delta.sqrt().asin() + a - FRAC_PI_4 < 0.0;
    let second = delta / (FRAC_PI_4 - a).sin().powi(2) < eps;
    (first, second)
}

/// Certified upper bound on `Σ_{k>N} r_k`: `r_N + ln 2/(u (log₂ N)^u)`.
pub fn tail_sum_bound(log2n: f64, u: f64) -> f64 {
    r_from_log2(log2n, u) + LN_2 / (u * log2n.powf(u))
}

/// `−log₂ Π_{k>N}(1 − r_k) ≤ (2/ln 2)·Σ_{k>N} r_k` (valid while every `r_k ≤ ½`).
fn tail_certified(log2n: f64, u: f64, delta: f64) -> bool {
    2.0 / LN_2 * tail_sum_bound(log2n, u) < -(-delta).ln_1p() / LN_2
}

fn check_u(u: f64) -> Result<()> {
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::InvalidArgument(format!("u = {u} outside (0, 1]")));
    }
    Ok(())
}

/// Picks the largest dyadic `δ` meeting both conditions, then the smallest certified tail start.
pub fn build_sequence(f: f64, eps: f64, u: f64) -> Result<NonIidSequence> {
    if !(f > 0.5 && f <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fidelity {f} outside (1/2, 1]"
        )));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "eps = {eps} must be positive"
        )));
    }
    check_u(u)?;
    let delta = (1..=MAX_DYADIC_EXPONENT)
        .map(|j| 0.5f64.powi(j as i32))
        .find(|&d| d < 0.5 && delta_conditions(d, f, eps) == (true, true))
        .ok_or_else(|| Error::Infeasible(format!("no dyadic delta for f = {f}, eps = {eps}")))?;
    let tail = certified_tail_start(u, delta)?;
    Ok(NonIidSequence {
        u,
        delta,
        tail,
        r1: 0.5,
    })
}

/// Smallest `log₂ N ≥ 1` (to 1e-9, rounded up to an integer index when small) passing the tail certificate.
pub fn certified_tail_start(u: f64, delta: f64) -> Result<TailStart> {
    let mut lo = 1.0f64;
    let mut hi = 2.0f64;
    while !tail_certified(hi, u, delta) {
        lo = hi;
        hi *= 2.0;
        if hi > 4.0 * MAX_LOG2_N {
            break;
        }
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if tail_certified(mid, u, delta) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi > MAX_LOG2_N {
        return Err(Error::Infeasible(format!(
            "tail start 2^{hi:.1} exceeds floating-point range"
        )));
    }
    let tail = TailStart::from_log2(hi.max(1.0));
    // integer rounding can only move N up, which keeps the certificate
    debug_assert!(tail_certified(tail.log2, u, delta));
    Ok(tail)
}

impl NonIidSequence {
    /// Sequence with a caller-chosen tail start, for experiments outside the certified regime.
    pub fn with_tail(u: f64, delta: f64, tail: TailStart) -> Result<Self> {
        check_u(u)?;
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::InvalidArgument(format!(
                "delta = {delta} outside (0, 1/2)"
            )));
        }
        if tail.log2 < 1.0 || tail.log2 > MAX_LOG2_N {
            return Err(Error::InvalidArgument(format!(
                "log2 N = {} outside [1, {MAX_LOG2_N}]",
                tail.log2
            )));
        }
        Ok(Self {
            u,
            delta,
            tail,
            r1: 0.5,
        })
    }

    /// `p_i = r_{N+i}` for `i ≥ 1`.
    pub fn p(&self, i: u64) -> f64 {
        r_from_log2(self.tail.log2_offset(i as f64), self.u)
    }

    /// Whether the product bound was certified for this tail start.
    pub fn tail_certified(&self) -> bool {
        tail_certified(self.tail.log2, self.u, self.delta)
    }

    /// Running accumulators over the first `n` terms.
    pub fn prefix(&self, n: u64) -> Prefix {
        let mut acc = Prefix::default();
        for i in 1..=n {
            acc.push(self.p(i));
        }
        acc
    }

    /// `(sum, lower, upper)`: the entropy of the first `n` members and integral-test bounds on it.
    pub fn entropy_budget(&self, n: u64) -> Result<EntropyBudget> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "prefix length must be at least 1".into(),
            ));
        }
        let sum = self.prefix(n).entropy_sum;
        let (lower, upper) = self.integral_bracket(n);
        Ok(EntropyBudget { sum, lower, upper })
    }

    /// Lower: `∫_{N+1}^{N+n+1} dx/(x (log₂x)^u)`. Upper: `∫_N^{N+n}` of the pointwise bound
    /// `h(r) ≤ 1/(x y^u) + (1+u)·log₂y/(x y^{1+u}) + r/ln 2` with `y = log₂ x`.
    pub fn integral_bracket(&self, n: u64) -> (f64, f64) {
        let u = self.u;
        let nf = n as f64;
        let lower = {
            let y1 = self.tail.log2_offset(1.0);
            LN_2 * int_y_pow(y1, self.bracket_gap(1.0, nf + 1.0), 1.0 - u)
        };
        let upper = {
            let y1 = self.tail.log2;
            let dy = self.bracket_gap(0.0, nf);
            let main = LN_2 * int_y_pow(y1, dy, 1.0 - u);
            let l = (dy / y1).ln_1p();
            // ∫ (1+u) ln2 · log₂y · y^{−1−u} dy = (1+u)/u² [g(y1) − g(y2)], g(y) = y^{−u}(u ln y + 1)
            let d_pow = -y1.powf(-u) * (-u * l).exp_m1();
            let y2_pow = y1.powf(-u) * (-u * l).exp();
            let g_diff = (u * y1.ln() + 1.0) * d_pow - y2_pow * u * l;
            let loglog = (1.0 + u) / (u * u) * g_diff;
            // ∫ r dx / ln 2 = (1/u)(y1^{−u} − y2^{−u})
            let r_int = d_pow / u;
            main + loglog + r_int
        };
        (lower, upper)
    }

    /// `log₂(N+b) − log₂(N+a)` without cancellation.
    fn bracket_gap(&self, a: f64, b: f64) -> f64 {
        match self.tail.exact {
            Some(n) => ((b - a) / (n as f64 + a)).ln_1p() / LN_2,
            None => {
                let inv = (-self.tail.log2).exp2();
                ((b - a) * inv / (1.0 + a * inv)).ln_1p() / LN_2
            }
        }
    }

    /// `⌊Σ_{i≤n} h(p_i)⌋`: singlets extractable with catalysis from the first `n` members.
    pub fn catalytic_singlet_count(&self, n: u64) -> u64 {
        self.prefix(n).count()
    }

    /// `log₂(N + n)` beyond which the lower bracket, hence the count, certifiably reaches `target`.
    pub fn certified_prefix_log2(&self, target: f64) -> f64 {
        let y1 = self.tail.log2_offset(1.0);
        let u = self.u;
        if (u - 1.0).abs() < 1e-15 {
            y1 * (target / LN_2).exp()
        } else {
            (y1.powf(1.0 - u) + target * (1.0 - u) / LN_2).powf(1.0 / (1.0 - u))
        }
    }

    /// Maximal probability of reaching fidelity `f` with a singlet from the first `n` members.
    pub fn singlet_probability(&self, n: u64, f: f64) -> Result<f64> {
        let pre = self.prefix(n);
        singlet_probability_from_log_lambda(pre.log_product, f)
    }
}

/// `∫_{y1}^{y1+dy} y^{−u} dy` for exponent `e = 1 − u`, stable for tiny `dy`.
fn int_y_pow(y1: f64, dy: f64, e: f64) -> f64 {
    let l = (dy / y1).ln_1p();
    if e.abs() < 1e-15 {
        l
    } else {
        y1.powf(e) * (e * l).exp_m1() / e
    }
}

/// `P_f = (1−λ)/sin²(π/4 − acos√f)`, defined while `asin√(1−λ) + acos√f − π/4 < 0`.
pub fn singlet_probability_from_lambda(lambda: f64, f: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "lambda {lambda} outside [0,1]"
        )));
    }
    singlet_probability_from_log_lambda(lambda.ln(), f)
}

fn singlet_probability_from_log_lambda(log_lambda: f64, f: f64) -> Result<f64> {
    if !(f > 0.5 && f <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "fidelity {f} outside (1/2, 1]"
        )));
    }
    let one_minus = -log_lambda.exp_m1();
    let a = angle(f);
    let m_n = one_minus.sqrt().asin() + a - FRAC_PI_4;
    if m_n >= 0.0 {
        return Err(Error::FormulaOutOfRange(format!(
            "m_n = {m_n:.6} is not negative"
        )));
    }
    Ok(one_minus / (FRAC_PI_4 - a).sin().powi(2))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Prefix {
    pub len: u64,
    /// `ln Π(1 − p_i)`
    pub log_product: f64,
    pub entropy_sum: f64,
}

impl Prefix {
    fn push(&mut self, p: f64) {
        self.len += 1;
        self.log_product += (-p).ln_1p();
        self.entropy_sum += h_small(p);
    }

    pub fn product(&self) -> f64 {
        self.log_product.exp()
    }

    pub fn count(&self) -> u64 {
        self.entropy_sum.floor() as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyBudget {
    pub sum: f64,
    pub lower: f64,
    pub upper: f64,
}

impl EntropyBudget {
    /// Relative slack used when comparing the direct sum to the analytic bracket.
    pub const REL_TOL: f64 = 1e-9;

    pub fn within_bracket(&self) -> bool {
        let tol = Self::REL_TOL * self.upper.abs().max(self.sum.abs());
        self.sum >= self.lower - tol && self.sum <= self.upper + tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrefixRow {
    pub i: u64,
    pub p_i: f64,
    pub prod: f64,
    pub entropy_sum: f64,
    pub count: u64,
}

/// Rows `from..=to` with stride `step` (accumulators always run from `i = 1`).
pub fn prefix_rows(seq: &NonIidSequence, from: u64, to: u64, step: u64) -> Result<Vec<PrefixRow>> {
    if from == 0 || to < from || step == 0 {
        return Err(Error::InvalidArgument(format!(
            "bad range {from}..={to} step {step}"
        )));
    }
    let mut acc = Prefix::default();
    let mut rows = Vec::new();
    for i in 1..=to {
        let p = seq.p(i);
        acc.push(p);
        if i >= from && (i - from).is_multiple_of(step) {
            rows.push(PrefixRow {
                i,
                p_i: p,
                prod: acc.product(),
                entropy_sum: acc.entropy_sum,
                count: acc.count(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_for_reference_parameters() {
        let seq = build_sequence(0.9, 0.01, 1.0).unwrap();
        assert_eq!(seq.delta, 0.5f64.powi(9));
        assert_eq!(delta_conditions(seq.delta, 0.9, 0.01), (true, true));
        // the next dyadic value up fails
        assert_ne!(delta_conditions(2.0 * seq.delta, 0.9, 0.01), (true, true));
        assert!((seq.tail.log2 - 709.0).abs() < 2.0, "{}", seq.tail.log2);
        assert!(seq.tail.exact.is_none());
        assert!(seq.tail_certified());
        assert!(!tail_certified(seq.tail.log2 - 1e-6, 1.0, seq.delta));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_sequence(0.5, 0.01, 1.0).is_err());
        assert!(build_sequence(0.9, 0.0, 1.0).is_err());
        assert!(build_sequence(0.9, 0.01, 1.5).is_err());
    }

    #[test]
    fn smaller_fidelity_needs_smaller_delta_and_later_tail() {
        let mut last: Option<NonIidSequence> = None;
        for f in [0.99, 0.95, 0.9, 0.85] {
            let s = build_sequence(f, 0.05, 1.0).unwrap();
            if let Some(prev) = last {
                assert!(s.delta <= prev.delta);
                assert!(s.tail.log2 >= prev.tail.log2);
            }
            last = Some(s);
        }
        // closer to ½ the tail start leaves the representable range
        assert!(matches!(
            build_sequence(0.55, 0.05, 1.0),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            build_sequence(0.9, 0.01, 0.5),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn entropy_term_dominates_divergent_series() {
        for k in (2u64..100_000).chain([1 << 40, 1 << 60]) {
            let y = (k as f64).log2();
            let r = r_from_log2(y, 1.0);
            assert!(
                -r * r.log2() >= 1.0 / (k as f64 * y) * (1.0 - 1e-12),
                "k = {k}"
            );
        }
    }

    #[test]
    fn log_bound_precondition() {
        // every term of any tail is at most r_3 < ½, where |log₂(1−x)| ≤ 2x/ln 2 holds
        let r3 = r_from_log2(3f64.log2(), 1.0);
        assert!(r3 < 0.5);
        for k in 1..=1000 {
            let x = 0.5 * k as f64 / 1000.0;
            assert!(-(1.0 - x).log2() <= 2.0 * x / LN_2 + 1e-15);
        }
    }

    #[test]
    fn built_sequence_invariants_on_prefixes() {
        let seq = build_sequence(0.9, 0.01, 1.0).unwrap();
        let mut acc = Prefix::default();
        for i in 1..=10_000 {
            let p = seq.p(i);
            assert!(p > 0.0 && p < 0.5);
            acc.push(p);
            assert!(acc.log_product > (-seq.delta).ln_1p());
        }
        let pf = seq.singlet_probability(10_000, 0.9).unwrap();
        assert!((0.0..0.01).contains(&pf));
    }

    #[test]
    fn singlet_probability_cases() {
        assert_eq!(singlet_probability_from_lambda(1.0, 0.9).unwrap(), 0.0);
        let want = 0.01 / (FRAC_PI_4 - 0.9f64.sqrt().acos()).sin().powi(2);
        assert!((singlet_probability_from_lambda(0.99, 0.9).unwrap() - want).abs() < 1e-12);
        assert!(matches!(
            singlet_probability_from_lambda(0.5, 0.9),
            Err(Error::FormulaOutOfRange(_))
        ));
    }

    #[test]
    fn budget_bracket_small_tail() {
        let seq = NonIidSequence::with_tail(1.0, 0.01, TailStart::exact(2)).unwrap();
        let b = seq.entropy_budget(1).unwrap();
        assert!((b.sum - h_small(seq.p(1))).abs() < 1e-15);
        let b = seq.entropy_budget(1_000_000).unwrap();
        assert!(b.within_bracket(), "{b:?}");
        assert!(b.lower > 0.0 && b.upper > b.lower);
    }

    #[test]
    fn budget_bracket_astronomical_tail() {
        let seq = build_sequence(0.9, 0.01, 1.0).unwrap();
        let b = seq.entropy_budget(100_000).unwrap();
        assert!(b.within_bracket(), "{b:?}");
        assert!(b.sum > 0.0);
        let seq = NonIidSequence::with_tail(0.5, 0.01, TailStart::from_log2(900.0)).unwrap();
        let b = seq.entropy_budget(100_000).unwrap();
        assert!(b.within_bracket(), "{b:?}");
    }

    #[test]
    fn count_is_floor_and_nondecreasing() {
        let seq = NonIidSequence::with_tail(1.0, 0.01, TailStart::exact(2)).unwrap();
        let rows = prefix_rows(&seq, 1, 200_000, 1).unwrap();
        let mut last = 0;
        for r in &rows {
            assert_eq!(r.count, r.entropy_sum.floor() as u64);
            assert!(r.count >= last);
            last = r.count;
        }
        assert!(last >= 1);
        assert!(
            seq.catalytic_singlet_count(1_000_000)
                >= seq.entropy_budget(1_000_000).unwrap().lower.floor() as u64
        );
    }

    #[test]
    fn certified_prefix_reaches_target() {
        let seq = NonIidSequence::with_tail(1.0, 0.01, TailStart::exact(2)).unwrap();
        let y = seq.certified_prefix_log2(1.5);
        let n = (y.exp2() - 2.0).ceil() as u64;
        let (lower, _) = seq.integral_bracket(n);
        assert!(lower >= 1.5 - 1e-9, "{lower}");
        let seq = NonIidSequence::with_tail(0.5, 0.01, TailStart::exact(2)).unwrap();
        let y = seq.certified_prefix_log2(1.5);
        let n = (y.exp2() - 2.0).ceil() as u64;
        assert!(seq.integral_bracket(n).0 >= 1.5 - 1e-9);
        assert!(seq.certified_prefix_log2(10.0) > y);
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        let n = 200_000;
        let h = (b - a) / n as f64;
        let mut acc = f(a) + f(b);
        for k in 1..n {
            acc += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }

    #[test]
    fn bracket_matches_quadrature() {
        for u in [1.0, 0.5] {
            let seq = NonIidSequence::with_tail(u, 0.01, TailStart::exact(4)).unwrap();
            let (lower, upper) = seq.integral_bracket(500);
            let lo = simpson(|x| 1.0 / (x * x.log2().powf(u)), 5.0, 505.0);
            let up = simpson(
                |x| {
                    let y = x.log2();
                    let r = 1.0 / (x * y.powf(1.0 + u));
                    -r * r.log2() + r / LN_2
                },
                4.0,
                504.0,
            );
            assert!((lower - lo).abs() < 1e-8 * lo, "u = {u}: {lower} vs {lo}");
            assert!((upper - up).abs() < 1e-8 * up, "u = {u}: {upper} vs {up}");
        }
    }
}
