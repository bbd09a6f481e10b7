//! Exact solvers used as oracles: a capacity-indexed dynamic program and
//! Gray-code enumeration of every subset. Both accumulate in `u128` when
//! the totals fit and fall back to arbitrary precision otherwise.

mod verify;

pub use verify::{
    verify_instances, verify_claims, verify_with, Claim, Corruption, Family, VerificationReport,
    VerifyConfig, Violation,
};

use std::ops::{Add, Sub};

use bitvec::prelude::*;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::instance::{Prepared, Solution};
use crate::Int;

/// Largest `n * (C + 1)` the dynamic program accepts.
pub const DP_BUDGET: u128 = 1_000_000_000;
/// Largest `n` the exhaustive solver accepts.
pub const BRUTE_MAX_ITEMS: usize = 25;

trait Accum: Clone + Ord + Zero + for<'a> Add<&'a Self, Output = Self> + for<'a> Sub<&'a Self, Output = Self> {}
impl<T> Accum for T where T: Clone + Ord + Zero + for<'a> Add<&'a T, Output = T> + for<'a> Sub<&'a T, Output = T> {}

fn fits_u128(total: &Int) -> bool {
    total.bits() < 127
}

fn dp_take_table<T: Accum>(weights: &[Option<usize>], profits: &[T], cap: usize) -> Vec<bool> {
    let n = weights.len();
    let width = cap + 1;
    let mut take: BitVec = bitvec![0; n * width];
    // best value using items j.. with capacity c
    let mut next = vec![T::zero(); width];
    let mut cur = next.clone();
    for j in (0..n).rev() {
        for c in 0..width {
            cur[c] = next[c].clone();
            if let Some(w) = weights[j].filter(|&w| w <= c) {
                let with = next[c - w].clone() + &profits[j];
                if with > cur[c] {
                    cur[c] = with;
                    take.set(j * width + c, true);
                }
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    let mut c = cap;
    let mut bits = vec![false; n];
    for j in 0..n {
        if take[j * width + c] {
            bits[j] = true;
            c -= weights[j].expect("taken items fit");
        }
    }
    bits
}

/// Optimal solution in sorted order. Among optima the lexicographically
/// smallest bit string (in sorted order) is returned.
pub fn solve_dp(prep: &Prepared) -> Result<Solution> {
    let n = prep.len();
    let cap = prep
        .capacity()
        .to_usize()
        .filter(|&c| (n as u128) * (c as u128 + 1) <= DP_BUDGET)
        .ok_or_else(|| Error::Budget(format!("n * (C + 1) exceeds {DP_BUDGET}")))?;
    let weights: Vec<Option<usize>> =
        prep.items().iter().map(|it| it.weight.to_usize().filter(|&w| w <= cap)).collect();
    let total: Int = prep.items().iter().map(|it| &it.profit).sum();
    let bits = if fits_u128(&total) {
        let profits: Vec<u128> = prep.items().iter().map(|it| it.profit.to_u128().expect("fits")).collect();
        dp_take_table(&weights, &profits, cap)
    } else {
        let profits: Vec<Int> = prep.items().iter().map(|it| it.profit.clone()).collect();
        dp_take_table(&weights, &profits, cap)
    };
    Ok(Solution::evaluate(prep, bits))
}

/// Every optimal bit string of an instance, sorted order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BruteForce {
    pub value: Int,
    /// Sorted lexicographically.
    pub optima: Vec<Vec<bool>>,
}

fn gray_enumerate<T: Accum>(profits: &[T], weights: &[T], cap: &T) -> (T, Vec<u32>) {
    let n = profits.len();
    let mut p = T::zero();
    let mut w = T::zero();
    let mut mask: u32 = 0;
    let mut best = T::zero();
    let mut optima = vec![0u32];
    for step in 1u64..(1u64 << n) {
        let j = step.trailing_zeros() as usize;
        mask ^= 1 << j;
        if mask & (1 << j) != 0 {
            p = p + &profits[j];
            w = w + &weights[j];
        } else {
            p = p - &profits[j];
            w = w - &weights[j];
        }
        if w <= *cap {
            if p > best {
                best = p.clone();
                optima.clear();
                optima.push(mask);
            } else if p == best {
                optima.push(mask);
            }
        }
    }
    (best, optima)
}

/// Exhaustive enumeration over all `2^n` subsets, returning every optimum.
pub fn solve_brute(prep: &Prepared) -> Result<BruteForce> {
    let n = prep.len();
    if n > BRUTE_MAX_ITEMS {
        return Err(Error::Budget(format!("exhaustive search limited to {BRUTE_MAX_ITEMS} items")));
    }
    let items = prep.items();
    let total_p: Int = items.iter().map(|it| &it.profit).sum();
    let total_w: Int = items.iter().map(|it| &it.weight).sum();
    let cap = prep.capacity().clone().min(total_w.clone());
    let (value, masks) = if fits_u128(&total_p) && fits_u128(&total_w) {
        let conv = |v: &Int| v.to_u128().expect("fits");
        let ps: Vec<u128> = items.iter().map(|it| conv(&it.profit)).collect();
        let ws: Vec<u128> = items.iter().map(|it| conv(&it.weight)).collect();
        let (v, m) = gray_enumerate(&ps, &ws, &conv(&cap));
        (Int::from(v), m)
    } else {
        let ps: Vec<Int> = items.iter().map(|it| it.profit.clone()).collect();
        let ws: Vec<Int> = items.iter().map(|it| it.weight.clone()).collect();
        gray_enumerate(&ps, &ws, &cap)
    };
    let mut optima: Vec<Vec<bool>> =
        masks.into_iter().map(|m| (0..n).map(|j| m & (1 << j) != 0).collect()).collect();
    optima.sort();
    Ok(BruteForce { value, optima })
}
