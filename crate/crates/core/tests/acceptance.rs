//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use mutbound::cli::limits_experiment;
use mutbound::ga::tau_monte_carlo;
use mutbound::oracle::{solve_brute, verify_instances, verify_with, Claim, Corruption, Family, VerifyConfig};
use mutbound::reduction::{discrepancy_bits, region_bound_violation};
use mutbound::rng::{derive_seed, stream};
use mutbound::{
    brute_force_leaves, compute_profiles, construct_geometric, count_leaves, fix_variables,
    generate_bounded, leaf_polynomial, mutation_upper_bound, prepare, run_ga, solve_dp, tau_analytic,
    verify_claims, BoundValue, ExtNat, GaConfig, Instance, Int, LambdaProfile, Operator,
    Profiles, Rational,
};
use num_bigint::BigInt;
use num_traits::{pow, One, Signed, Zero};
use rand::Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn half() -> Rational {
    ratio(1, 2)
}

fn check(cond: bool, msg: impl Into<String>) -> std::result::Result<(), String> {
    if cond { Ok(()) } else { Err(msg.into()) }
}

fn example1() -> Instance {
    Instance::from_pairs(&[(2, 1), (10, 10)], 10).unwrap()
}

fn c1_example1() -> Outcome {
    let prep = prepare(&example1());
    let dp = solve_dp(&prep).map_err(|e| e.to_string())?;
    let brute = solve_brute(&prep).map_err(|e| e.to_string())?;
    let x = prep.to_original_order(prep.break_solution());
    let y = prep.to_original_order(&dp.bits);
    check(x == [true, false], format!("break solution {x:?}"))?;
    check(prep.prefix_profit() == &Int::from(2u8), "break value")?;
    check(y == [false, true] && dp.value == Int::from(10u8), format!("optimum {y:?} {}", dp.value))?;
    check(brute.optima == vec![dp.bits.clone()], "brute-force optima")?;
    check(prep.dantzig() == &ratio(11, 1), format!("U = {}", prep.dantzig()))?;
    Ok(format!("X*=(1,0) value 2, Y=(0,1) value 10, U={}", prep.dantzig()))
}

fn c2_reduction_sweep() -> Outcome {
    let count = 1000u64;
    let mut bad = Vec::new();
    let mut optima = 0usize;
    for k in 0..count {
        let n = 12 + (k % 5) as usize;
        let inst = generate_bounded(n, 50, &half(), derive_seed(2, &[k])).unwrap();
        let prep = prepare(&inst);
        let prof = compute_profiles(&prep);
        let fix = fix_variables(&prep);
        let brute = solve_brute(&prep).map_err(|e| e.to_string())?;
        optima += brute.optima.len();
        let ok = brute.optima.iter().any(|y| {
            fix.agrees_with(y) && region_bound_violation(&prof, y).is_none() && discrepancy_bits(&prof, y).passes
        });
        if !ok {
            bad.push(k);
        }
    }
    check(bad.is_empty(), format!("instances without a compliant optimum: {bad:?}"))?;
    let family = Family::Bounded { n_min: 12, n_max: 16, max_value: 50, capacity_fraction: half() };
    let report = verify_claims(&family, 1000, 1).map_err(|e| e.to_string())?;
    check(report.is_clean(), format!("verifier violations: {:?}", report.violations))?;
    Ok(format!("{count} instances, {optima} optima, 0 violations; verifier clean on {}", report.instances_checked))
}

fn c3_leaf_counts() -> Outcome {
    let mut rng = stream(3, &[0]);
    let mut largest = Int::zero();
    for k in 0..500 {
        let m = rng.gen_range(1..=6);
        let mut indices: Vec<u64> = (1..=12).collect();
        let mut sizes = Vec::new();
        for _ in 0..m {
            let i = indices.swap_remove(rng.gen_range(0..indices.len()));
            sizes.push((i, rng.gen_range(1..=8usize)));
        }
        let prof = Profiles::from_region_sizes(&sizes);
        let omega = count_leaves(&leaf_polynomial(&prof));
        let brute = brute_force_leaves(&prof).map_err(|e| e.to_string())?;
        check(omega == brute, format!("partition {k} {sizes:?}: {omega} vs {brute}"))?;
        let total: usize = sizes.iter().map(|s| s.1).sum();
        check(omega <= Int::one() << total, format!("partition {k}: omega above 2^{total}"))?;
        largest = largest.max(omega);
    }
    Ok(format!("500 partitions agree exactly, largest omega {largest}"))
}

fn c4_geometric() -> Outcome {
    for n in 1..=30usize {
        let prep = prepare(&construct_geometric(n).map_err(|e| e.to_string())?);
        let prof = compute_profiles(&prep);
        let want: Vec<ExtNat> = (0..n).map(|j| ExtNat::Finite(Int::one() << j)).collect();
        check(prof.h()[..n] == want[..], format!("n={n}: H = {:?}", &prof.h()[..n]))?;
        check(prof.h()[n..].iter().all(|h| !h.is_finite()), format!("n={n}: finite h past the prefix"))?;
        let exact = Rational::new(BigInt::one() << (n - 1), (BigInt::one() << n) - 1);
        let got = mutation_upper_bound(&prof).value;
        check(got == BoundValue::Finite(exact.clone()), format!("n={n}: bound {got}"))?;
        if n >= 21 {
            check((exact - half()).abs() <= ratio(1, 1_000_000), format!("n={n}: not within 1e-6 of 1/2"))?;
        }
    }
    Ok("H = 2^(j-1) and bound 2^(n-1)/(2^n-1) for n = 1..30".into())
}

fn c5_bounded_trend() -> Outcome {
    let sizes = [1_000, 10_000, 100_000];
    let seeds: Vec<u64> = (1..=20).collect();
    let rows = limits_experiment(false, &sizes, &seeds, 100, &half()).map_err(|e| e.to_string())?;
    let mut worst = 0f64;
    for &seed in &seeds {
        let vals: Vec<&BoundValue> =
            rows.iter().filter(|r| r.seed == Some(seed)).map(|r| &r.p_m_upper).collect();
        check(vals.len() == 3, format!("seed {seed}: {} rows", vals.len()))?;
        check(vals[0] > vals[1] && vals[1] > vals[2], format!("seed {seed}: not decreasing {vals:?}"))?;
        check(
            *vals[2] < BoundValue::Finite(ratio(1, 100)),
            format!("seed {seed}: bound at n=1e5 is {}", vals[2]),
        )?;
        worst = worst.max(vals[2].to_f64());
    }
    Ok(format!("strictly decreasing for 20 seeds, max bound at n=1e5 {worst:.3e}"))
}

fn c6_tau_identity() -> Outcome {
    let mut rng = stream(6, &[0]);
    let ps = [ratio(1, 100), ratio(1, 10), ratio(3, 10), half()];
    let mut directional = 0;
    for _ in 0..100 {
        let lp = LambdaProfile {
            l1: rng.gen_range(0..=20),
            l2: rng.gen_range(0..=20),
            l3: rng.gen_range(0..=20),
            l4: rng.gen_range(0..=20),
        };
        for p in &ps {
            let mo: Rational = tau_analytic(&lp, p, Operator::Mo);
            let imo: Rational = tau_analytic(&lp, p, Operator::Imo);
            let base = (Rational::one() - p) / p;
            let e = lp.l2 as i64 - lp.l1 as i64;
            let mut want = pow(base, e.unsigned_abs() as usize);
            if e < 0 {
                want = want.recip();
            }
            check(imo == &mo * &want, format!("ratio identity fails for {lp:?} at p={p}"))?;
            if *p == half() {
                check(imo == mo, format!("equality at 1/2 fails for {lp:?}"))?;
            } else if lp.l1 < lp.l2 {
                directional += 1;
                check(imo > mo, format!("direction fails for {lp:?} at p={p}"))?;
            }
        }
    }
    check(directional > 0, "no profile with l1 < l2 drawn")?;
    Ok(format!("400 exact identities, {directional} directional cases"))
}

fn c7_monte_carlo() -> Outcome {
    let prep = prepare(&example1());
    let y = vec![false, true];
    let mut parts = Vec::new();
    for (op, p_m, p_exact) in [(Operator::Mo, 0.01, ratio(1, 100)), (Operator::Imo, 0.1, ratio(1, 10))] {
        let exact: Rational = mutbound::tau_exact(&prep, &y, &p_exact, op);
        let tau = mutbound::Probability::to_f64(&exact);
        check(tau >= 1e-4, format!("{op}: tau {tau} below 1e-4"))?;
        let mut inside = 0;
        for rep in 0..100u64 {
            let est = tau_monte_carlo(&prep, &y, p_m, op, 1_000_000, derive_seed(7, &[rep]));
            if (est.estimate - tau).abs() <= 4.0 * est.stderr {
                inside += 1;
            }
        }
        check(inside >= 99, format!("{op}: only {inside}/100 within 4 stderr"))?;
        parts.push(format!("{op} tau={exact}: {inside}/100"));
    }
    Ok(parts.join(", "))
}

fn c8_ga() -> Outcome {
    let inst = generate_bounded(50, 100, &half(), 8).unwrap();
    let cfg = GaConfig { pop: 20, iterations: 60, operator: Operator::Imo, seed: 77, ..GaConfig::default() };
    let a = run_ga(&cfg, &inst).map_err(|e| e.to_string())?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| run_ga(&cfg, &inst)).map_err(|e| e.to_string())?;
    check(a == b, "identical seeds gave different results")?;

    let elite = GaConfig {
        pop: 20,
        iterations: 200,
        elitist: true,
        inject_break_solution: true,
        seed: 5,
        ..GaConfig::default()
    };
    let r = run_ga(&elite, &inst).map_err(|e| e.to_string())?;
    check(r.history.len() == 201, format!("{} history rows", r.history.len()))?;
    check(r.history.windows(2).all(|w| w[0].best <= w[1].best), "elitist history decreased")?;
    let break_value = prepare(&inst).prefix_profit().clone();
    check(r.best_value >= break_value, "elitist run below the break solution")?;

    let ex = example1();
    let mut found = 0;
    for seed in 0..20 {
        let cfg = GaConfig { pop: 4, iterations: 50, operator: Operator::Imo, p_m: 0.3, seed, ..GaConfig::default() };
        if run_ga(&cfg, &ex).map_err(|e| e.to_string())?.best_value == Int::from(10u8) {
            found += 1;
        }
    }
    check(found == 20, format!("Example-1 optimum found in {found}/20 runs"))?;
    Ok(format!(
        "deterministic; elitist best {} -> {} over 200 generations; Example-1 optimum in 20/20 runs",
        r.history[0].best, r.best_value
    ))
}

fn c9_negative_controls() -> Outcome {
    let cfg = VerifyConfig::default();
    let fixture = Instance::from_pairs(&[(6, 5), (6, 5), (19, 19)], 19).unwrap();
    let clean = verify_instances(std::slice::from_ref(&fixture), 9, &cfg).map_err(|e| e.to_string())?;
    check(clean.is_clean(), format!("fixture not clean: {:?}", clean.violations))?;
    let bad_h = VerifyConfig { corruption: Corruption::DecrementH(9), ..cfg.clone() };
    let r = verify_instances(&[fixture], 9, &bad_h).map_err(|e| e.to_string())?;
    check(
        r.violated(Claim::WeightedH) && r.violated(Claim::RegionBound),
        format!("corrupted H not flagged: {:?}", r.violations),
    )?;
    let family = Family::Bounded { n_min: 8, n_max: 12, max_value: 50, capacity_fraction: half() };
    for d in [1i64, -1] {
        let bad = VerifyConfig { corruption: Corruption::OffsetLeafCount(d), ..cfg.clone() };
        let r = verify_with(&family, 30, 4, &bad).map_err(|e| e.to_string())?;
        let flagged = r.violations.iter().filter(|v| v.claim == Claim::LeafcountMatch).count();
        check(flagged == 30, format!("leaf offset {d}: {flagged}/30 flagged"))?;
    }
    Ok("corrupted H flagged on the fixture; leaf count offsets flagged on 30/30".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("example-1 reproduction", c1_example1, Some(Duration::from_secs(1))),
        ("reduction soundness sweep", c2_reduction_sweep, Some(Duration::from_secs(300))),
        ("leaf-count equivalence", c3_leaf_counts, Some(Duration::from_secs(60))),
        ("geometric limit", c4_geometric, None),
        ("bounded-data trend", c5_bounded_trend, Some(Duration::from_secs(120))),
        ("tau identity and direction", c6_tau_identity, None),
        ("monte-carlo consistency", c7_monte_carlo, Some(Duration::from_secs(120))),
        ("ga determinism and elitism", c8_ga, None),
        ("negative controls", c9_negative_controls, None),
    ];
    let mut failed = 0;
    for (k, (name, f, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if took > l => Err(format!("took {took:.1?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{took:.2?}] {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{took:.2?}] {why}", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
