//! Sweeps generated instances and checks every claim against the exact
//! oracles. Claims about "the optimum" use existence semantics: a violation
//! is recorded only when no optimal solution satisfies the claim.

use num_bigint::BigInt;
use num_traits::{pow, One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{solve_brute, solve_dp};
use crate::error::{Error, Result};
use crate::ga::{lambda_profile, tau_analytic, tau_exact, tau_monte_carlo, Operator};
use crate::instance::{construct_geometric, generate_bounded, prepare, serialize_instance, Instance};
use crate::leafcount::{brute_force_leaves, count_leaves, leaf_polynomial};
use crate::num::{int_to_rational, ExtNat};
use crate::reduction::{
    compute_profiles, discrepancy_bits, fix_variables, region_bound_violation, Profiles,
};
use crate::rng;
use crate::{Int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    FixVariablesSound,
    RegionBound,
    WeightedH,
    WeightedL,
    LeafcountMatch,
    DantzigUpper,
    DpMatch,
    TauMatch,
}

impl Claim {
    pub const ALL: [Claim; 8] = [
        Claim::FixVariablesSound,
        Claim::RegionBound,
        Claim::WeightedH,
        Claim::WeightedL,
        Claim::LeafcountMatch,
        Claim::DantzigUpper,
        Claim::DpMatch,
        Claim::TauMatch,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub instance: String,
    pub claim: Claim,
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub instances_checked: usize,
    pub claims: Vec<Claim>,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self, claim: Claim) -> bool {
        self.violations.iter().any(|v| v.claim == claim)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Profits and weights uniform in `1..=max_value`, `n` uniform in `n_min..=n_max`.
    Bounded { n_min: usize, n_max: usize, max_value: u64, capacity_fraction: Rational },
    /// The deterministic construction with region indices `1, 2, 4, ...`.
    Geometric { n: usize },
}

impl Family {
    pub fn instance(&self, seed: u64) -> Result<Instance> {
        match self {
            Family::Bounded { n_min, n_max, max_value, capacity_fraction } => {
                if n_min > n_max {
                    return Err(Error::InvalidArgument("n_min exceeds n_max".into()));
                }
                let n = rng::stream(seed, &[0x51_2E]).gen_range(*n_min..=*n_max);
                generate_bounded(n, *max_value, capacity_fraction, seed)
            }
            Family::Geometric { n } => construct_geometric(*n),
        }
    }
}

/// Seeded corruption of the checker's inputs, for negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Corruption {
    #[default]
    None,
    /// Every finite `h_j` becomes `max(1, h_j - k)`.
    DecrementH(u64),
    /// The generating-function leaf count is shifted by this amount.
    OffsetLeafCount(i64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Mutation probability used for the hit-probability checks, in `(0, 1)`.
    pub tau_p_m: Rational,
    pub mc_trials: u64,
    pub corruption: Corruption,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            tau_p_m: Rational::new(BigInt::one(), BigInt::from(10)),
            mc_trials: 2000,
            corruption: Corruption::None,
        }
    }
}

pub fn fingerprint(inst: &Instance) -> String {
    let digest = Sha256::digest(serialize_instance(inst).as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn corrupt_profiles(prof: Profiles, corruption: Corruption) -> Profiles {
    match corruption {
        Corruption::DecrementH(k) => {
            let h = prof
                .h()
                .iter()
                .map(|v| match v {
                    ExtNat::Finite(x) if *x > Int::from(k) => ExtNat::Finite(x - k),
                    ExtNat::Finite(_) => ExtNat::from(1),
                    ExtNat::Infinite => ExtNat::Infinite,
                })
                .collect();
            Profiles::from_parts(h, prof.l().to_vec())
        }
        _ => prof,
    }
}

/// Hits within `6 sd + 3` of the expected count. Loose enough to stay
/// silent on correct code for thousands of instances even when the
/// expected count is tiny.
fn monte_carlo_agrees(hits: u64, trials: u64, tau: f64) -> bool {
    let mean = trials as f64 * tau;
    let sd = (trials as f64 * tau * (1.0 - tau)).sqrt();
    (hits as f64 - mean).abs() <= 6.0 * sd + 3.0
}

fn pattern(bits: &[bool]) -> String {
    crate::instance::bits_to_string(bits)
}

fn check_instance(inst: &Instance, seed: u64, cfg: &VerifyConfig) -> Result<Vec<Violation>> {
    let id = fingerprint(inst);
    let mut out = Vec::new();
    let mut flag = |claim: Claim, witness: String| {
        out.push(Violation { instance: id.clone(), claim, witness });
    };

    let prep = prepare(inst);
    let brute = solve_brute(&prep)?;
    let dp = solve_dp(&prep)?;
    let opt = &brute.optima;

    if dp.value != brute.value || !dp.feasible || !opt.contains(&dp.bits) {
        flag(Claim::DpMatch, format!("dp {} ({}) vs brute {}", dp.value, pattern(&dp.bits), brute.value));
    }

    let opt_value = int_to_rational(&brute.value);
    if *prep.prefix_profit() > brute.value || opt_value > *prep.dantzig() {
        flag(
            Claim::DantzigUpper,
            format!("break {} opt {} U {}", prep.prefix_profit(), brute.value, prep.dantzig()),
        );
    }

    let fix = fix_variables(&prep);
    if !opt.iter().any(|y| fix.agrees_with(y)) {
        flag(
            Claim::FixVariablesSound,
            format!("fixed_one {:?} fixed_zero {:?} optimum {}", fix.fixed_one, fix.fixed_zero, pattern(&opt[0])),
        );
    }

    let prof = corrupt_profiles(compute_profiles(&prep), cfg.corruption);
    if opt.iter().all(|y| region_bound_violation(&prof, y).is_some()) {
        let i = region_bound_violation(&prof, &opt[0]).expect("violated");
        flag(Claim::RegionBound, format!("optimum {} exceeds i - 1 at i = {i}", pattern(&opt[0])));
    }
    let reports: Vec<_> = opt.iter().map(|y| discrepancy_bits(&prof, y)).collect();
    let one = Rational::one();
    if reports.iter().all(|r| r.weighted_h > one) {
        flag(Claim::WeightedH, format!("optimum {} has weighted_h {}", pattern(&opt[0]), reports[0].weighted_h));
    }
    if reports.iter().all(|r| r.weighted_l > one) {
        flag(Claim::WeightedL, format!("optimum {} has weighted_l {}", pattern(&opt[0]), reports[0].weighted_l));
    }

    let mut omega = BigInt::from(count_leaves(&leaf_polynomial(&prof)));
    if let Corruption::OffsetLeafCount(d) = cfg.corruption {
        omega += d;
    }
    let enumerated = BigInt::from(brute_force_leaves(&prof)?);
    let ceiling = BigInt::one() << prof.prefix_region_items();
    if omega != enumerated || omega > ceiling || omega < BigInt::one() {
        flag(Claim::LeafcountMatch, format!("generating function {omega} vs enumeration {enumerated}"));
    }

    let y = &opt[0];
    let p = &cfg.tau_p_m;
    let lambda = lambda_profile(&prep, y);
    let matches_index = crate::ga::tau::classes_match_break_index(&prep);
    for (k, op) in [Operator::Mo, Operator::Imo].into_iter().enumerate() {
        let exact = tau_exact(&prep, y, p, op);
        if matches_index && exact != tau_analytic(&lambda, p, op) {
            flag(Claim::TauMatch, format!("{op}: per-bit {exact} vs lambda formula"));
        }
        let tau = exact.to_f64().unwrap_or(0.0);
        let mc_seed = rng::derive_seed(seed, &[0x7A_u64, k as u64]);
        let mc = tau_monte_carlo(&prep, y, p.to_f64().unwrap_or(0.0), op, cfg.mc_trials, mc_seed);
        if !monte_carlo_agrees(mc.hits, mc.trials, tau) {
            flag(Claim::TauMatch, format!("{op}: {} hits in {} trials, expected rate {tau}", mc.hits, mc.trials));
        }
    }
    let mo = tau_analytic(&lambda, p, Operator::Mo);
    let imo = tau_analytic(&lambda, p, Operator::Imo);
    let base = (&one - p) / p;
    let expo = lambda.l2 as i64 - lambda.l1 as i64;
    let predicted = if expo >= 0 { pow(base, expo as usize) } else { pow(base.recip(), (-expo) as usize) };
    if mo.is_zero() || imo / mo != predicted {
        flag(Claim::TauMatch, format!("ratio identity fails for lambda {lambda:?}"));
    }

    Ok(out)
}

/// Checks explicit instances; instance `i` draws its Monte-Carlo streams from `(seed, i)`.
pub fn verify_instances(instances: &[Instance], seed: u64, cfg: &VerifyConfig) -> Result<VerificationReport> {
    if cfg.tau_p_m <= Rational::zero() || cfg.tau_p_m >= Rational::one() || cfg.mc_trials == 0 {
        return Err(Error::InvalidArgument("tau_p_m must lie in (0, 1) and mc_trials be positive".into()));
    }
    let per: Vec<Vec<Violation>> = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| check_instance(inst, rng::derive_seed(seed, &[i as u64]), cfg))
        .collect::<Result<_>>()?;
    Ok(VerificationReport {
        instances_checked: instances.len(),
        claims: Claim::ALL.to_vec(),
        violations: per.into_iter().flatten().collect(),
    })
}

pub fn verify_with(family: &Family, count: usize, seed: u64, cfg: &VerifyConfig) -> Result<VerificationReport> {
    let instances: Vec<Instance> = (0..count)
        .map(|i| family.instance(rng::derive_seed(seed, &[0x1A5_u64, i as u64])))
        .collect::<Result<_>>()?;
    verify_instances(&instances, seed, cfg)
}

pub fn verify_claims(family: &Family, count: usize, seed: u64) -> Result<VerificationReport> {
    verify_with(family, count, seed, &VerifyConfig::default())
}
