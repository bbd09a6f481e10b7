//! Instances, the text format, generators, and the density-sorted view with
//! break item, residual capacity, break solution and Dantzig bound.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{int_to_rational, ser_int};
use crate::rng;
use crate::{Int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Item {
    pub profit: Int,
    pub weight: Int,
}

impl Item {
    pub fn new(profit: impl Into<Int>, weight: impl Into<Int>) -> Result<Self> {
        let (profit, weight) = (profit.into(), weight.into());
        if profit.is_zero() || weight.is_zero() {
            return Err(Error::InvalidArgument("profit and weight must be positive".into()));
        }
        Ok(Item { profit, weight })
    }
}

/// Items in original order plus a capacity. Externally items are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    items: Vec<Item>,
    capacity: Int,
}

impl Instance {
    pub fn new(items: Vec<Item>, capacity: impl Into<Int>) -> Result<Self> {
        let capacity = capacity.into();
        if items.is_empty() {
            return Err(Error::InvalidArgument("an instance needs at least one item".into()));
        }
        if capacity.is_zero() {
            return Err(Error::InvalidArgument("capacity must be positive".into()));
        }
        if let Some(j) = items.iter().position(|it| it.profit.is_zero() || it.weight.is_zero()) {
            return Err(Error::InvalidArgument(format!("item {} has a zero profit or weight", j + 1)));
        }
        Ok(Instance { items, capacity })
    }

    /// Convenience constructor from `(profit, weight)` pairs.
    pub fn from_pairs(pairs: &[(u64, u64)], capacity: u64) -> Result<Self> {
        let items = pairs.iter().map(|&(p, w)| Item::new(p, w)).collect::<Result<Vec<_>>>()?;
        Instance::new(items, capacity)
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn capacity(&self) -> &Int {
        &self.capacity
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn total_weight(&self) -> Int {
        self.items.iter().map(|it| &it.weight).sum()
    }
}

fn parse_positive(token: &str, line: usize, what: &str) -> Result<Int> {
    if token.is_empty() || !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(line, format!("{what} {token:?} is not a decimal integer")));
    }
    let v = BigUint::parse_bytes(token.as_bytes(), 10)
        .ok_or_else(|| Error::parse(line, format!("{what} {token:?} is not a decimal integer")))?;
    if v.is_zero() {
        return Err(Error::parse(line, format!("{what} must be positive")));
    }
    Ok(v)
}

fn two_tokens(text: &str, line: usize) -> Result<(&str, &str)> {
    let mut it = text.split_ascii_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a, b)),
        _ => Err(Error::parse(line, "expected exactly two integers")),
    }
}

/// Parses `n C` followed by `n` lines of `p w`. Trailing blank lines are allowed.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty document"))?;
    let (n_tok, c_tok) = two_tokens(header, line_no)?;
    let n = parse_positive(n_tok, line_no, "item count")?;
    let n: usize = n
        .try_into()
        .map_err(|_| Error::parse(line_no, "item count does not fit in memory"))?;
    let capacity = parse_positive(c_tok, line_no, "capacity")?;

    let mut items = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(items.len() + 2, format!("expected {n} items, found {}", items.len())))?;
        let (p, w) = two_tokens(line, line_no)?;
        items.push(Item {
            profit: parse_positive(p, line_no, "profit")?,
            weight: parse_positive(w, line_no, "weight")?,
        });
    }
    if let Some((line_no, _)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::parse(line_no, format!("unexpected content after {n} items")));
    }
    Instance::new(items, capacity)
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", inst.len(), inst.capacity);
    for it in &inst.items {
        let _ = writeln!(out, "{} {}", it.profit, it.weight);
    }
    out
}

/// Uniform profits and weights in `1..=max_value`; capacity is
/// `max(1, floor(capacity_fraction * total_weight))`.
pub fn generate_bounded(
    n: usize,
    max_value: u64,
    capacity_fraction: &Rational,
    seed: u64,
) -> Result<Instance> {
    if n == 0 || max_value == 0 {
        return Err(Error::InvalidArgument("n and R must be at least 1".into()));
    }
    if *capacity_fraction <= Rational::zero() || *capacity_fraction >= Rational::one() {
        return Err(Error::InvalidArgument("capacity fraction must lie in (0, 1)".into()));
    }
    let mut rng = rng::stream(seed, &[0xB0_0D]);
    let items: Vec<Item> = (0..n)
        .map(|_| {
            let p = rng.gen_range(1..=max_value);
            let w = rng.gen_range(1..=max_value);
            Item { profit: Int::from(p), weight: Int::from(w) }
        })
        .collect();
    let total: Int = items.iter().map(|it| &it.weight).sum();
    let scaled = (capacity_fraction * int_to_rational(&total)).floor().to_integer();
    let capacity = scaled.to_biguint().filter(|c| !c.is_zero()).unwrap_or_else(Int::one);
    Instance::new(items, capacity)
}

/// Builds `n + 1` items whose break item sits last and whose prefix items
/// have region indices `1, 2, 4, ..., 2^(n-1)`.
///
/// With `r = 4^n`, every item weighs `r + 1`; the break item has profit
/// `r + 1` and item `j` has profit `r + 1 + δ_j` where `δ_1 = r + 1` and
/// `δ_j = floor(r / (2^(j-1) - 1))`. The index of item `j` is then
/// `floor(r / δ_j) + 1`, and `r >= k(k+1)` for `k = 2^(j-1) - 1` keeps
/// `δ_j` inside `(r/(k+1), r/k]`.
pub fn construct_geometric(n: usize) -> Result<Instance> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let r = Int::from(4u32).pow(n as u32);
    let w = &r + 1u32;
    let mut items = Vec::with_capacity(n + 1);
    for j in 1..=n {
        let delta = if j == 1 {
            w.clone()
        } else {
            let k = (Int::one() << (j - 1)) - 1u32;
            &r / k
        };
        items.push(Item { profit: &w + delta, weight: w.clone() });
    }
    items.push(Item { profit: w.clone(), weight: w.clone() });
    let capacity = &w * Int::from(n) + &r;
    Instance::new(items, capacity)
}

/// `p_a / w_a` versus `p_b / w_b`, exactly.
pub fn cmp_density(a: &Item, b: &Item) -> Ordering {
    (&a.profit * &b.weight).cmp(&(&b.profit * &a.weight))
}

/// Density-sorted view of an instance. Positions are 0-based sorted indices
/// internally; `b()` reports the 1-based break index with `n + 1` meaning
/// that every item fits.
#[derive(Debug, Clone)]
pub struct Prepared {
    base: Instance,
    perm: Vec<usize>,
    sorted: Vec<Item>,
    break_item: Option<usize>,
    residual: Int,
    break_solution: Vec<bool>,
    prefix_profit: Int,
    prefix_weight: Int,
    dantzig: Rational,
    above_break: Vec<bool>,
}

pub fn prepare(inst: &Instance) -> Prepared {
    let items = inst.items();
    let mut perm: Vec<usize> = (0..items.len()).collect();
    perm.sort_by(|&a, &b| {
        cmp_density(&items[b], &items[a])
            .then_with(|| items[a].weight.cmp(&items[b].weight))
            .then_with(|| a.cmp(&b))
    });
    let sorted: Vec<Item> = perm.iter().map(|&j| items[j].clone()).collect();

    let mut prefix_weight = Int::zero();
    let mut prefix_profit = Int::zero();
    let mut break_item = None;
    for (pos, it) in sorted.iter().enumerate() {
        let next = &prefix_weight + &it.weight;
        if next > *inst.capacity() {
            break_item = Some(pos);
            break;
        }
        prefix_weight = next;
        prefix_profit += &it.profit;
    }
    let residual = inst.capacity() - &prefix_weight;
    let prefix_len = break_item.unwrap_or(sorted.len());
    let break_solution = (0..sorted.len()).map(|j| j < prefix_len).collect();

    let (dantzig, above_break) = match break_item {
        Some(b) => {
            let bi = &sorted[b];
            let frac = Rational::new(
                BigInt::from(&residual * &bi.profit),
                BigInt::from(bi.weight.clone()),
            );
            let above = sorted.iter().map(|it| cmp_density(it, bi) == Ordering::Greater).collect();
            (int_to_rational(&prefix_profit) + frac, above)
        }
        None => (int_to_rational(&prefix_profit), vec![true; sorted.len()]),
    };

    Prepared {
        base: inst.clone(),
        perm,
        sorted,
        break_item,
        residual,
        break_solution,
        prefix_profit,
        prefix_weight,
        dantzig,
        above_break,
    }
}

impl Prepared {
    pub fn base(&self) -> &Instance {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn capacity(&self) -> &Int {
        self.base.capacity()
    }

    /// Items in density-descending order.
    pub fn items(&self) -> &[Item] {
        &self.sorted
    }

    /// `perm()[k]` is the 0-based original index of sorted position `k`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// 0-based sorted position of the break item, `None` when everything fits.
    pub fn break_item(&self) -> Option<usize> {
        self.break_item
    }

    /// 1-based break index in `1..=n+1`.
    pub fn b(&self) -> usize {
        self.prefix_len() + 1
    }

    /// Number of items packed by the greedy pass (`b - 1`).
    pub fn prefix_len(&self) -> usize {
        self.break_item.unwrap_or(self.sorted.len())
    }

    pub fn residual(&self) -> &Int {
        &self.residual
    }

    pub fn break_solution(&self) -> &[bool] {
        &self.break_solution
    }

    pub fn prefix_profit(&self) -> &Int {
        &self.prefix_profit
    }

    pub fn prefix_weight(&self) -> &Int {
        &self.prefix_weight
    }

    pub fn dantzig(&self) -> &Rational {
        &self.dantzig
    }

    /// `e_j > e_b` per sorted position; all `true` when there is no break item.
    pub fn above_break(&self) -> &[bool] {
        &self.above_break
    }

    /// Reorders a sorted-order vector into original order.
    pub fn to_original_order<T: Clone>(&self, sorted: &[T]) -> Vec<T> {
        let mut out: Vec<Option<T>> = vec![None; sorted.len()];
        for (pos, v) in sorted.iter().enumerate() {
            out[self.perm[pos]] = Some(v.clone());
        }
        out.into_iter().map(|v| v.expect("perm is a permutation")).collect()
    }

    /// Reorders an original-order vector into sorted order.
    pub fn to_sorted_order<T: Clone>(&self, original: &[T]) -> Vec<T> {
        self.perm.iter().map(|&j| original[j].clone()).collect()
    }

    /// 1-based original indices of the selected sorted positions, ascending.
    pub fn original_indices(&self, sorted_positions: impl IntoIterator<Item = usize>) -> Vec<usize> {
        let mut v: Vec<usize> = sorted_positions.into_iter().map(|p| self.perm[p] + 1).collect();
        v.sort_unstable();
        v
    }
}

/// A 0-1 assignment in sorted order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Solution {
    #[serde(serialize_with = "ser_bits")]
    pub bits: Vec<bool>,
    #[serde(serialize_with = "ser_int")]
    pub value: Int,
    #[serde(serialize_with = "ser_int")]
    pub weight: Int,
    pub feasible: bool,
}

fn ser_bits<S: serde::Serializer>(bits: &[bool], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&bits_to_string(bits))
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl Solution {
    pub fn evaluate(prep: &Prepared, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), prep.len(), "solution length must match the instance");
        let mut value = Int::zero();
        let mut weight = Int::zero();
        for (it, _) in prep.items().iter().zip(&bits).filter(|(_, &x)| x) {
            value += &it.profit;
            weight += &it.weight;
        }
        let feasible = weight <= *prep.capacity();
        Solution { bits, value, weight, feasible }
    }

    pub fn break_solution(prep: &Prepared) -> Self {
        Solution::evaluate(prep, prep.break_solution().to_vec())
    }
}
