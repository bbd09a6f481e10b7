use mutbound::oracle::solve_brute;
use mutbound::reduction::{discrepancy, discrepancy_bits, region_bound_violation};
use mutbound::{compute_profiles, fix_variables, prepare, solve_dp, Instance, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn instance_strategy(max_n: usize, max_value: u64) -> impl Strategy<Value = Instance> {
    prop::collection::vec((1..=max_value, 1..=max_value), 1..=max_n).prop_flat_map(|pairs| {
        let total: u64 = pairs.iter().map(|p| p.1).sum();
        (Just(pairs), 1..=total)
    })
    .prop_map(|(pairs, cap)| Instance::from_pairs(&pairs, cap).unwrap())
}

fn to_int(v: u64) -> mutbound::Int {
    mutbound::Int::from(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn every_optimum_respects_the_reduction(inst in instance_strategy(10, 30)) {
        let prep = prepare(&inst);
        let prof = compute_profiles(&prep);
        let fix = fix_variables(&prep);
        let brute = solve_brute(&prep).unwrap();
        for y in &brute.optima {
            prop_assert!(fix.agrees_with(y), "fixing contradicts optimum {y:?}");
            let d = discrepancy_bits(&prof, y);
            prop_assert!(d.passes, "weighted sums {} {} for {y:?}", d.weighted_h, d.weighted_l);
            prop_assert_eq!(region_bound_violation(&prof, y), None);
        }
    }

    #[test]
    fn dp_matches_brute_force(inst in instance_strategy(16, 40)) {
        let prep = prepare(&inst);
        let brute = solve_brute(&prep).unwrap();
        let dp = solve_dp(&prep).unwrap();
        prop_assert_eq!(&dp.value, &brute.value);
        prop_assert!(dp.feasible);
        prop_assert!(brute.optima.contains(&dp.bits));
        prop_assert_eq!(&dp.bits, &brute.optima[0]);
    }

    #[test]
    fn dantzig_bounds_the_optimum(inst in instance_strategy(8, 100)) {
        let prep = prepare(&inst);
        let dp = solve_dp(&prep).unwrap();
        let value = Rational::from_integer(BigInt::from(dp.value.clone()));
        prop_assert!(&value <= prep.dantzig());
        prop_assert!(&dp.value >= prep.prefix_profit());
    }

    #[test]
    fn relaxed_optimum_passes(inst in instance_strategy(12, 50)) {
        let prep = prepare(&inst);
        let prof = compute_profiles(&prep);
        let mut x: Vec<Rational> = prep.break_solution().iter()
            .map(|&b| if b { Rational::one() } else { Rational::zero() }).collect();
        if let Some(b) = prep.break_item() {
            let it = &prep.items()[b];
            x[b] = Rational::new(
                BigInt::from(prep.residual().clone()),
                BigInt::from(it.weight.clone()),
            );
        }
        let d = discrepancy(&prof, &x);
        prop_assert!(d.passes);
        prop_assert!(d.weighted_h.is_zero());
    }
}

#[test]
fn optimum_dropping_the_whole_prefix() {
    // Both prefix items sit in region 10, so dropping both is allowed.
    let inst = Instance::from_pairs(&[(6, 5), (6, 5), (19, 19)], 19).unwrap();
    let prep = prepare(&inst);
    let prof = compute_profiles(&prep);
    assert_eq!(prof.h()[0].finite(), Some(&to_int(10)));
    let drop_all = vec![false, false, true];
    assert!(discrepancy_bits(&prof, &drop_all).passes);
    assert_eq!(region_bound_violation(&prof, &drop_all), None);
    let brute = solve_brute(&prep).unwrap();
    assert_eq!(brute.optima, vec![drop_all]);
}
