//! Probability that a single mutation pass from the zero genome lands on a
//! target solution, analytically (from the λ profile or bit by bit) and by
//! Monte-Carlo simulation of the real operators.

use num_traits::{pow, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::operators::{flip_probability, mutate};
use super::Operator;
use crate::instance::Prepared;
use crate::num::{ser_opt_ratio, ser_ratio, Probability};
use crate::rng;
use crate::Rational;

const STAGE_MONTE_CARLO: u64 = 5;
const CHUNK: u64 = 1 << 14;

/// Target-solution counts before (`λ1`, `λ2`) and from (`λ3`, `λ4`) the break index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LambdaProfile {
    /// Prefix items left out.
    pub l1: usize,
    /// Prefix items selected.
    pub l2: usize,
    /// Items from the break index on that are selected.
    pub l3: usize,
    /// Items from the break index on that are left out.
    pub l4: usize,
}

pub fn lambda_profile(prep: &Prepared, y: &[bool]) -> LambdaProfile {
    assert_eq!(y.len(), prep.len(), "solution length must match the instance");
    let (prefix, suffix) = y.split_at(prep.prefix_len());
    let l2 = prefix.iter().filter(|&&b| b).count();
    let l3 = suffix.iter().filter(|&&b| b).count();
    LambdaProfile { l1: prefix.len() - l2, l2, l3, l4: suffix.len() - l3 }
}

/// `τ(MO) = p^{λ2+λ3} (1-p)^{λ1+λ4}`, `τ(IMO) = (1-p)^{λ2} p^{λ1} p^{λ3} (1-p)^{λ4}`.
pub fn tau_analytic<S: Probability>(lp: &LambdaProfile, p_m: &S, op: Operator) -> S {
    let p = p_m.clone();
    let q = S::one() - p_m.clone();
    match op {
        Operator::Mo => pow(p, lp.l2 + lp.l3) * pow(q, lp.l1 + lp.l4),
        Operator::Imo => pow(q.clone(), lp.l2) * pow(p.clone(), lp.l1) * pow(p, lp.l3) * pow(q, lp.l4),
    }
}

/// Product of per-bit hit probabilities using the operator's own classes
/// (`e_j > e_b`). Equals [`tau_analytic`] whenever the density classes
/// coincide with the break-index split.
pub fn tau_exact<S: Probability>(prep: &Prepared, y: &[bool], p_m: &S, op: Operator) -> S {
    assert_eq!(y.len(), prep.len(), "solution length must match the instance");
    y.iter().zip(prep.above_break()).fold(S::one(), |acc, (&target, &above)| {
        let flip = flip_probability(op, above, false, p_m);
        acc * if target { flip } else { S::one() - flip }
    })
}

/// Whether every prefix position is strictly denser than the break item and
/// no later one is.
pub fn classes_match_break_index(prep: &Prepared) -> bool {
    let k = prep.prefix_len();
    prep.above_break().iter().enumerate().all(|(j, &a)| a == (j < k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub hits: u64,
    pub trials: u64,
    pub seed: u64,
}

/// Fraction of `trials` single mutation passes from zero that hit `y` exactly.
/// Trials run in fixed-size chunks with their own streams, so the estimate
/// does not depend on the thread count.
pub fn tau_monte_carlo(
    prep: &Prepared,
    y: &[bool],
    p_m: f64,
    op: Operator,
    trials: u64,
    seed: u64,
) -> MonteCarloEstimate {
    assert!(trials >= 1, "at least one trial");
    assert_eq!(y.len(), prep.len(), "solution length must match the instance");
    let chunks = trials.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, &[STAGE_MONTE_CARLO, c]);
            let count = CHUNK.min(trials - c * CHUNK);
            let mut buf = vec![false; y.len()];
            let mut hits = 0u64;
            for _ in 0..count {
                buf.fill(false);
                mutate(&mut buf, op, p_m, prep, &mut r);
                if buf == y {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let estimate = hits as f64 / trials as f64;
    let stderr = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    MonteCarloEstimate { estimate, stderr, hits, trials, seed }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauReport {
    #[serde(serialize_with = "ser_ratio")]
    pub p_m: Rational,
    pub lambda: LambdaProfile,
    #[serde(serialize_with = "ser_ratio")]
    pub tau_mo: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub tau_imo: Rational,
    /// `τ(IMO)/τ(MO)`, absent when `τ(MO) = 0`.
    #[serde(serialize_with = "ser_opt_ratio")]
    pub ratio: Option<Rational>,
    pub tau_mo_approx: f64,
    pub tau_imo_approx: f64,
    pub classes_match_break_index: bool,
    pub mc_operator: Operator,
    /// Exact single-pass probability for the simulated operator on this instance.
    pub mc_expected: f64,
    pub mc_estimate: f64,
    pub mc_stderr: f64,
    pub mc_trials: u64,
    pub mc_seed: u64,
}

pub fn tau_report(
    prep: &Prepared,
    y: &[bool],
    p_m: &Rational,
    mc_operator: Operator,
    trials: u64,
    seed: u64,
) -> TauReport {
    let lambda = lambda_profile(prep, y);
    let tau_mo = tau_analytic(&lambda, p_m, Operator::Mo);
    let tau_imo = tau_analytic(&lambda, p_m, Operator::Imo);
    let ratio = (!tau_mo.is_zero()).then(|| &tau_imo / &tau_mo);
    let mc = tau_monte_carlo(prep, y, Probability::to_f64(p_m), mc_operator, trials, seed);
    TauReport {
        p_m: p_m.clone(),
        lambda,
        tau_mo_approx: Probability::to_f64(&tau_mo),
        tau_imo_approx: Probability::to_f64(&tau_imo),
        tau_mo,
        tau_imo,
        ratio,
        classes_match_break_index: classes_match_break_index(prep),
        mc_operator,
        mc_expected: Probability::to_f64(&tau_exact(prep, y, p_m, mc_operator)),
        mc_estimate: mc.estimate,
        mc_stderr: mc.stderr,
        mc_trials: mc.trials,
        mc_seed: mc.seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{prepare, Instance};
    use num_bigint::BigInt;
    use num_traits::One;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn example1() -> Prepared {
        prepare(&Instance::from_pairs(&[(2, 1), (10, 10)], 10).unwrap())
    }

    #[test]
    fn lambda_of_example_one_optimum() {
        let prep = example1();
        assert_eq!(lambda_profile(&prep, &[false, true]), LambdaProfile { l1: 1, l2: 0, l3: 1, l4: 0 });
        assert_eq!(
            lambda_profile(&prep, prep.break_solution()),
            LambdaProfile { l1: 0, l2: 1, l3: 0, l4: 1 }
        );
    }

    #[test]
    fn tau_values_for_example_one() {
        let lp = LambdaProfile { l1: 1, l2: 0, l3: 1, l4: 0 };
        let p = q(1, 100);
        assert_eq!(tau_analytic(&lp, &p, Operator::Mo), q(99, 10_000));
        assert_eq!(tau_analytic(&lp, &p, Operator::Imo), q(1, 10_000));
        assert!((tau_analytic(&lp, &0.01f64, Operator::Mo) - 0.0099).abs() < 1e-15);
        let prep = example1();
        assert_eq!(tau_exact(&prep, &[false, true], &p, Operator::Mo), q(99, 10_000));
        assert_eq!(tau_exact(&prep, &[false, true], &p, Operator::Imo), q(1, 10_000));
    }

    #[test]
    fn tau_ratio_example() {
        let lp = LambdaProfile { l1: 0, l2: 3, l3: 2, l4: 5 };
        let p = q(1, 10);
        let mo = tau_analytic(&lp, &p, Operator::Mo);
        let imo = tau_analytic(&lp, &p, Operator::Imo);
        assert_eq!(mo, pow(q(1, 10), 5) * pow(q(9, 10), 5));
        assert_eq!(imo, pow(q(9, 10), 3) * pow(q(1, 10), 2) * pow(q(9, 10), 5));
        assert_eq!(imo / mo, q(729, 1));
    }

    #[test]
    fn half_probability_is_symmetric() {
        let lp = LambdaProfile { l1: 2, l2: 1, l3: 4, l4: 3 };
        let h = q(1, 2);
        assert_eq!(tau_analytic(&lp, &h, Operator::Mo), pow(h.clone(), 10));
        assert_eq!(tau_analytic(&lp, &h, Operator::Imo), pow(h, 10));
    }

    #[test]
    fn degenerate_probabilities_are_exact_limits() {
        let lp = LambdaProfile { l1: 0, l2: 2, l3: 0, l4: 1 };
        // break solution from zero: IMO with p = 0 always hits it
        assert_eq!(tau_analytic(&lp, &q(0, 1), Operator::Imo), Rational::one());
        assert_eq!(tau_analytic(&lp, &q(0, 1), Operator::Mo), Rational::zero());
        assert_eq!(tau_analytic(&LambdaProfile { l1: 0, l2: 0, l3: 0, l4: 3 }, &q(0, 1), Operator::Mo), Rational::one());
        assert_eq!(tau_analytic(&lp, &q(1, 1), Operator::Imo), Rational::zero());
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let prep = example1();
        let a = tau_monte_carlo(&prep, &[false, true], 0.1, Operator::Mo, 50_000, 3);
        assert_eq!(a, tau_monte_carlo(&prep, &[false, true], 0.1, Operator::Mo, 50_000, 3));
        assert_eq!(a.trials, 50_000);
        let b = tau_monte_carlo(&prep, &[false, true], 0.1, Operator::Mo, 50_000, 4);
        assert_ne!(a.hits, b.hits);
    }

    #[test]
    fn report_carries_identity() {
        let prep = example1();
        let rep = tau_report(&prep, &[false, true], &q(1, 100), Operator::Mo, 1000, 1);
        assert_eq!(rep.ratio, Some(q(1, 99)));
        assert!(rep.classes_match_break_index);
        assert!((rep.mc_expected - 0.0099).abs() < 1e-15);
    }
}
