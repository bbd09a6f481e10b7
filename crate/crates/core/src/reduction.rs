//! Variable fixing against the Dantzig bound, the colored-region profiles
//! `H`/`L`, the discrepancy conditions every optimum satisfies, and the
//! mutation-probability upper bound derived from them.
//!
//! All comparisons are integer cross-multiplications against the break item;
//! nothing here touches floating point.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::instance::{cmp_density, Prepared};
use crate::num::{ser_int, ser_ratio, BoundValue, ExtNat};
use crate::{Int, Rational};

/// Per-item region indices in sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profiles {
    h: Vec<ExtNat>,
    l: Vec<ExtNat>,
    region_sizes: BTreeMap<Int, usize>,
    m: Int,
}

impl Profiles {
    /// Builds profiles from explicit `H` and `L` vectors and derives the
    /// region sizes and `m`.
    pub fn from_parts(h: Vec<ExtNat>, l: Vec<ExtNat>) -> Self {
        assert_eq!(h.len(), l.len(), "H and L must have the same length");
        let mut region_sizes = BTreeMap::new();
        for v in h.iter().filter_map(ExtNat::finite) {
            assert!(!v.is_zero(), "region indices are positive");
            *region_sizes.entry(v.clone()).or_insert(0) += 1;
        }
        let m = region_sizes.keys().next_back().cloned().unwrap_or_else(Int::zero);
        Profiles { h, l, region_sizes, m }
    }

    /// Profiles holding only prefix regions: `sizes[k] = (i, n_1i)`.
    pub fn from_region_sizes(sizes: &[(u64, usize)]) -> Self {
        let h: Vec<ExtNat> = sizes
            .iter()
            .flat_map(|&(i, count)| std::iter::repeat_n(ExtNat::from(i), count))
            .collect();
        let l = vec![ExtNat::Infinite; h.len()];
        Profiles::from_parts(h, l)
    }

    pub fn h(&self) -> &[ExtNat] {
        &self.h
    }

    pub fn l(&self) -> &[ExtNat] {
        &self.l
    }

    /// Region index `i` to `n_1i`, only for non-empty regions.
    pub fn region_sizes(&self) -> &BTreeMap<Int, usize> {
        &self.region_sizes
    }

    /// Largest finite `h`, zero when there is none.
    pub fn m(&self) -> &Int {
        &self.m
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// `|N_1|`, the number of items with finite `h`.
    pub fn prefix_region_items(&self) -> usize {
        self.region_sizes.values().sum()
    }
}

pub fn compute_profiles(prep: &Prepared) -> Profiles {
    let n = prep.len();
    let Some(b) = prep.break_item() else {
        return Profiles::from_parts(vec![ExtNat::Infinite; n], vec![ExtNat::Infinite; n]);
    };
    let items = prep.items();
    let brk = &items[b];
    let numer = prep.residual() * &brk.profit;
    let mut h = Vec::with_capacity(n);
    let mut l = Vec::with_capacity(n);
    for it in items {
        let lhs = &it.profit * &brk.weight;
        let rhs = &brk.profit * &it.weight;
        if lhs > rhs {
            h.push(ExtNat::Finite(&numer / (lhs - rhs) + 1u32));
            l.push(ExtNat::Infinite);
        } else if lhs < rhs {
            h.push(ExtNat::Infinite);
            l.push(ExtNat::Finite(&numer / (rhs - lhs) + 1u32));
        } else {
            h.push(ExtNat::Infinite);
            l.push(ExtNat::Infinite);
        }
    }
    Profiles::from_parts(h, l)
}

/// Sorted positions partitioned into fixed-to-one, fixed-to-zero and free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionReport {
    pub fixed_one: Vec<usize>,
    pub fixed_zero: Vec<usize>,
    pub free: Vec<usize>,
}

impl ReductionReport {
    /// Whether `bits` takes every fixed value.
    pub fn agrees_with(&self, bits: &[bool]) -> bool {
        self.fixed_one.iter().all(|&j| bits[j]) && self.fixed_zero.iter().all(|&j| !bits[j])
    }
}

/// Fixes `x_j = 1` when `e_j >= e_b` and `p_j w_b > (w_j + r) p_b`, and
/// `x_j = 0` when `e_j < e_b` and `p_j w_b < (w_j - r) p_b`.
pub fn fix_variables(prep: &Prepared) -> ReductionReport {
    let n = prep.len();
    let Some(b) = prep.break_item() else {
        return ReductionReport { fixed_one: (0..n).collect(), fixed_zero: vec![], free: vec![] };
    };
    let items = prep.items();
    let brk = &items[b];
    let slack = prep.residual() * &brk.profit;
    let mut report = ReductionReport { fixed_one: vec![], fixed_zero: vec![], free: vec![] };
    for (j, it) in items.iter().enumerate() {
        let pw = &it.profit * &brk.weight;
        let wp = &it.weight * &brk.profit;
        if cmp_density(it, brk).is_ge() {
            if pw > &wp + &slack {
                report.fixed_one.push(j);
                continue;
            }
        } else if &pw + &slack < wp {
            report.fixed_zero.push(j);
            continue;
        }
        report.free.push(j);
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscrepancyReport {
    /// Region index to the (possibly fractional) number of deselected items.
    #[serde(serialize_with = "ser_region_ratios")]
    pub s: BTreeMap<Int, Rational>,
    #[serde(serialize_with = "ser_ratio")]
    pub weighted_h: Rational,
    #[serde(serialize_with = "ser_ratio")]
    pub weighted_l: Rational,
    pub passes: bool,
}

/// Evaluates `Σ(1-x_j)/h_j` and `Σ x_j/l_j` for a point of `[0,1]^n` in
/// sorted order. `passes == false` certifies that `x` is not optimal.
pub fn discrepancy(prof: &Profiles, x: &[Rational]) -> DiscrepancyReport {
    assert_eq!(x.len(), prof.len(), "vector length must match the instance");
    let one = Rational::one();
    let mut s: BTreeMap<Int, Rational> =
        prof.region_sizes.keys().map(|i| (i.clone(), Rational::zero())).collect();
    let mut weighted_h = Rational::zero();
    let mut weighted_l = Rational::zero();
    for ((xj, hj), lj) in x.iter().zip(&prof.h).zip(&prof.l) {
        if let ExtNat::Finite(i) = hj {
            let gap = &one - xj;
            weighted_h += &gap * hj.reciprocal();
            *s.get_mut(i).expect("region present") += gap;
        }
        if lj.is_finite() {
            weighted_l += xj * lj.reciprocal();
        }
    }
    let passes = weighted_h <= one && weighted_l <= one;
    DiscrepancyReport { s, weighted_h, weighted_l, passes }
}

pub fn discrepancy_bits(prof: &Profiles, bits: &[bool]) -> DiscrepancyReport {
    let x: Vec<Rational> =
        bits.iter().map(|&b| if b { Rational::one() } else { Rational::zero() }).collect();
    discrepancy(prof, &x)
}

/// Checks the cumulative region bound: among items with `h_j <= i`, at most
/// `i - 1` may be deselected. Returns the first violated `i`.
pub fn region_bound_violation(prof: &Profiles, bits: &[bool]) -> Option<Int> {
    let mut deselected: BTreeMap<&Int, usize> = BTreeMap::new();
    for (hj, &x) in prof.h.iter().zip(bits) {
        if let (ExtNat::Finite(i), false) = (hj, x) {
            *deselected.entry(i).or_insert(0) += 1;
        }
    }
    let mut running = 0usize;
    for i in prof.region_sizes.keys() {
        running += deselected.get(i).copied().unwrap_or(0);
        if Int::from(running) > i - 1u32 {
            return Some(i.clone());
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MutationBound {
    pub value: BoundValue,
    pub h_term: BoundValue,
    pub l_term: BoundValue,
}

/// `Σ 1/v` over the finite entries, grouped by value and summed over a
/// common denominator so large `n` stays cheap.
fn reciprocal_sum<'a>(values: impl Iterator<Item = &'a ExtNat>) -> Rational {
    let mut counts: BTreeMap<&Int, u64> = BTreeMap::new();
    for v in values.filter_map(ExtNat::finite) {
        *counts.entry(v).or_insert(0) += 1;
    }
    if counts.is_empty() {
        return Rational::zero();
    }
    let lcm = counts.keys().fold(Int::one(), |acc, &v| acc.lcm(v));
    let numer: Int = counts.iter().map(|(&v, &c)| (&lcm / v) * c).sum();
    Rational::new(BigInt::from(numer), BigInt::from(lcm))
}

/// `min{1/Σ 1/h_j, 1/Σ 1/l_j}` with empty sums giving an unbounded term.
pub fn mutation_upper_bound(prof: &Profiles) -> MutationBound {
    let h_term = BoundValue::reciprocal_of(&reciprocal_sum(prof.h.iter()));
    let l_term = BoundValue::reciprocal_of(&reciprocal_sum(prof.l.iter()));
    let value = h_term.clone().min(l_term.clone());
    MutationBound { value, h_term, l_term }
}

fn ser_region_ratios<S: Serializer>(
    map: &BTreeMap<Int, Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut out = s.serialize_map(Some(map.len()))?;
    for (k, v) in map {
        out.serialize_entry(&k.to_string(), &crate::num::format_fraction(v))?;
    }
    out.end()
}

fn ser_region_sizes<S: Serializer>(
    map: &BTreeMap<Int, usize>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut out = s.serialize_map(Some(map.len()))?;
    for (k, v) in map {
        out.serialize_entry(&k.to_string(), v)?;
    }
    out.end()
}

/// JSON view of a reduction in original item order with 1-based indices.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionSummary {
    pub h: Vec<ExtNat>,
    pub l: Vec<ExtNat>,
    #[serde(serialize_with = "ser_int")]
    pub m: Int,
    #[serde(serialize_with = "ser_region_sizes")]
    pub region_sizes: BTreeMap<Int, usize>,
    pub fixed_one: Vec<usize>,
    pub fixed_zero: Vec<usize>,
    pub free: Vec<usize>,
    pub p_m_upper: BoundValue,
    pub h_term: BoundValue,
    pub l_term: BoundValue,
}

impl ReductionSummary {
    pub fn new(prep: &Prepared, prof: &Profiles, fix: &ReductionReport, bound: &MutationBound) -> Self {
        ReductionSummary {
            h: prep.to_original_order(prof.h()),
            l: prep.to_original_order(prof.l()),
            m: prof.m().clone(),
            region_sizes: prof.region_sizes().clone(),
            fixed_one: prep.original_indices(fix.fixed_one.iter().copied()),
            fixed_zero: prep.original_indices(fix.fixed_zero.iter().copied()),
            free: prep.original_indices(fix.free.iter().copied()),
            p_m_upper: bound.value.clone(),
            h_term: bound.h_term.clone(),
            l_term: bound.l_term.clone(),
        }
    }
}
