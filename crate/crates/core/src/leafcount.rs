//! Counting surviving search-tree leaves with the region generating function
//! `Π_i Σ_{j<=min(n_1i, i)} C(n_1i, j) λ^{j/i}` and reading off the
//! coefficients of exponents `<= 1`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::reduction::Profiles;
use crate::{Int, Rational};

/// Sparse polynomial in `λ` with rational exponents kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPolynomial {
    terms: BTreeMap<Rational, Int>,
}

impl RegionPolynomial {
    pub fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Rational::zero(), Int::one());
        RegionPolynomial { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Rational, Int)>) -> Self {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            if !c.is_zero() {
                *map.entry(e).or_insert_with(Int::zero) += c;
            }
        }
        RegionPolynomial { terms: map }
    }

    pub fn terms(&self) -> &BTreeMap<Rational, Int> {
        &self.terms
    }

    /// Product, optionally dropping every exponent above `cap`.
    pub fn mul_capped(&self, other: &Self, cap: Option<&Rational>) -> Self {
        let mut out: BTreeMap<Rational, Int> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            if cap.is_some_and(|c| e1 > c) {
                break;
            }
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if cap.is_some_and(|c| &e > c) {
                    break;
                }
                *out.entry(e).or_insert_with(Int::zero) += c1 * c2;
            }
        }
        RegionPolynomial { terms: out }
    }

    /// Value at `λ = 1`, the sum of all coefficients.
    pub fn total_mass(&self) -> Int {
        self.terms.values().sum()
    }
}

fn region_factor(index: &Int, size: usize) -> RegionPolynomial {
    let top = index.to_usize().map_or(size, |i| i.min(size));
    let denom = BigInt::from(index.clone());
    let mut coeff = Int::one();
    let mut terms = Vec::with_capacity(top + 1);
    for j in 0..=top {
        if j > 0 {
            coeff = coeff * Int::from(size - j + 1) / Int::from(j);
        }
        terms.push((Rational::new(BigInt::from(j), denom.clone()), coeff.clone()));
    }
    RegionPolynomial::from_terms(terms)
}

fn product(prof: &Profiles, cap: Option<&Rational>) -> RegionPolynomial {
    prof.region_sizes()
        .iter()
        .filter(|(_, &n)| n > 0)
        .fold(RegionPolynomial::one(), |acc, (i, &n)| acc.mul_capped(&region_factor(i, n), cap))
}

/// The full generating function over the prefix regions.
pub fn leaf_polynomial(prof: &Profiles) -> RegionPolynomial {
    product(prof, None)
}

/// The generating function restricted to exponents `<= 1`; enough for
/// [`count_leaves`] and tractable when the full expansion is not.
pub fn leaf_polynomial_truncated(prof: &Profiles) -> RegionPolynomial {
    product(prof, Some(&Rational::one()))
}

/// `ω`: the sum of coefficients whose exponent is at most one.
pub fn count_leaves(poly: &RegionPolynomial) -> Int {
    let one = Rational::one();
    poly.terms.iter().take_while(|(e, _)| **e <= one).map(|(_, c)| c).sum()
}

/// Enumeration budget for [`brute_force_leaves`].
pub const LEAF_ENUMERATION_BUDGET: u64 = 10_000_000;

/// Enumerates every `(s_1, ..., s_m)` with `0 <= s_i <= min(n_1i, i)` and
/// `Σ s_i / i <= 1`, summing `Π C(n_1i, s_i)`.
pub fn brute_force_leaves(prof: &Profiles) -> Result<Int> {
    let regions: Vec<(Int, usize)> = prof
        .region_sizes()
        .iter()
        .map(|(i, &n)| {
            let top = i.to_usize().map_or(n, |iv| iv.min(n));
            (i.clone(), top)
        })
        .collect();
    let mut space: u64 = 1;
    for &(_, top) in &regions {
        space = space.saturating_mul(top as u64 + 1);
        if space > LEAF_ENUMERATION_BUDGET {
            return Err(Error::Budget(format!(
                "leaf enumeration space exceeds {LEAF_ENUMERATION_BUDGET}"
            )));
        }
    }
    let sizes: Vec<usize> = prof.region_sizes().values().copied().collect();
    let rows: Vec<Vec<Int>> = sizes.iter().map(|&n| pascal_row(n)).collect();

    fn walk(
        k: usize,
        regions: &[(Int, usize)],
        rows: &[Vec<Int>],
        used: &Rational,
        weight: &Int,
        total: &mut Int,
    ) {
        if k == regions.len() {
            *total += weight;
            return;
        }
        let (index, top) = &regions[k];
        let denom = BigInt::from(index.clone());
        for s in 0..=*top {
            let next = used + Rational::new(BigInt::from(s), denom.clone());
            if next > Rational::one() {
                break;
            }
            walk(k + 1, regions, rows, &next, &(weight * &rows[k][s]), total);
        }
    }

    let mut total = Int::zero();
    walk(0, &regions, &rows, &Rational::zero(), &Int::one(), &mut total);
    Ok(total)
}

fn pascal_row(n: usize) -> Vec<Int> {
    let mut row = vec![Int::one()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(Int::one());
        next.extend(row.windows(2).map(|w| &w[0] + &w[1]));
        next.push(Int::one());
        row = next;
    }
    row
}
