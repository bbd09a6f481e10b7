use num_bigint::{BigInt, RandBigInt};
use num_traits::Zero;
use rand::Rng;

use super::{Genome, Operator};
use crate::instance::{Prepared, Solution};
use crate::num::Probability;
use crate::rng::{self, StreamRng};
use crate::{Int, Rational};

pub(crate) const STAGE_INIT: u64 = 1;

/// `n` uniform bits per individual, one stream per individual.
pub fn init_population(pop: usize, prep: &Prepared, seed: u64) -> Vec<Genome> {
    (0..pop)
        .map(|k| {
            let mut r = rng::stream(seed, &[0, STAGE_INIT, k as u64]);
            Genome::new((0..prep.len()).map(|_| r.gen::<bool>()).collect())
        })
        .collect()
}

/// Swaps positions `cut..n` (0-based), i.e. `r_t + 1..=n` for a 1-based cut `r_t`.
pub fn swap_tails(a: &mut Genome, b: &mut Genome, cut: usize) {
    assert_eq!(a.len(), b.len(), "crossover needs equal lengths");
    a.bits[cut..].swap_with_slice(&mut b.bits[cut..]);
}

/// With probability `p_c` picks a cut uniformly in `1..n` and swaps tails.
/// Genomes shorter than two bits are returned unchanged.
pub fn crossover_single_point<R: Rng + ?Sized>(
    a: &Genome,
    b: &Genome,
    p_c: f64,
    rng: &mut R,
) -> (Genome, Genome) {
    let (mut a, mut b) = (a.clone(), b.clone());
    let n = a.len();
    if n >= 2 && rng.gen::<f64>() < p_c {
        let cut = rng.gen_range(1..n);
        swap_tails(&mut a, &mut b, cut);
    }
    (a, b)
}

/// Probability that a bit flips. `above_break` is `e_j > e_b`.
pub fn flip_probability<S: Probability>(op: Operator, above_break: bool, bit: bool, p_m: &S) -> S {
    let stay_biased = match op {
        Operator::Mo => return p_m.clone(),
        // dense bits flip easily from 0, sparse bits from 1
        Operator::Imo => above_break == bit,
    };
    if stay_biased {
        p_m.clone()
    } else {
        S::one() - p_m.clone()
    }
}

fn mutate_bits<R: Rng + ?Sized>(bits: &mut [bool], op: Operator, classes: Option<&[bool]>, p_m: f64, rng: &mut R) {
    for (j, bit) in bits.iter_mut().enumerate() {
        let above = classes.is_none_or(|c| c[j]);
        let threshold = flip_probability(op, above, *bit, &p_m);
        if rng.gen::<f64>() < threshold {
            *bit = !*bit;
        }
    }
}

pub fn mutate_flip<R: Rng + ?Sized>(g: &Genome, p_m: f64, rng: &mut R) -> Genome {
    let mut out = g.clone();
    mutate_bits(&mut out.bits, Operator::Mo, None, p_m, rng);
    out
}

pub fn mutate_imo<R: Rng + ?Sized>(g: &Genome, p_m: f64, prep: &Prepared, rng: &mut R) -> Genome {
    let mut out = g.clone();
    mutate_bits(&mut out.bits, Operator::Imo, Some(prep.above_break()), p_m, rng);
    out
}

/// In-place mutation with either operator.
pub fn mutate<R: Rng + ?Sized>(bits: &mut [bool], op: Operator, p_m: f64, prep: &Prepared, rng: &mut R) {
    mutate_bits(bits, op, Some(prep.above_break()), p_m, rng);
}

/// Fitness of a genome. Infeasible genomes are either repaired by dropping
/// selected items in density-ascending order (the genome is replaced) or
/// scored zero.
pub fn evaluate_fitness(g: &mut Genome, prep: &Prepared, repair: bool) -> (Solution, Int) {
    let mut sol = Solution::evaluate(prep, g.bits.clone());
    if sol.feasible {
        let f = sol.value.clone();
        return (sol, f);
    }
    if !repair {
        return (sol, Int::zero());
    }
    let cap = prep.capacity();
    for j in (0..sol.bits.len()).rev() {
        if sol.weight <= *cap {
            break;
        }
        if sol.bits[j] {
            sol.bits[j] = false;
            sol.weight -= &prep.items()[j].weight;
            sol.value -= &prep.items()[j].profit;
        }
    }
    sol.feasible = true;
    g.bits.clone_from(&sol.bits);
    let f = sol.value.clone();
    (sol, f)
}

/// Shifted roulette: individual `k` is drawn with probability
/// `(f_k - min f + 1) / (Σ f - pop·min f + pop)`.
#[derive(Debug, Clone)]
pub struct RouletteWheel {
    cumulative: Vec<Int>,
}

impl RouletteWheel {
    pub fn new(fitness: &[Int]) -> Self {
        assert!(!fitness.is_empty(), "roulette needs at least one individual");
        let min = fitness.iter().min().expect("non-empty").clone();
        let mut acc = Int::zero();
        let cumulative = fitness
            .iter()
            .map(|f| {
                acc += f - &min + 1u32;
                acc.clone()
            })
            .collect();
        RouletteWheel { cumulative }
    }

    pub fn total(&self) -> &Int {
        self.cumulative.last().expect("non-empty")
    }

    pub fn probabilities(&self) -> Vec<Rational> {
        let total = BigInt::from(self.total().clone());
        let mut prev = Int::zero();
        self.cumulative
            .iter()
            .map(|c| {
                let p = Rational::new(BigInt::from(c - &prev), total.clone());
                prev = c.clone();
                p
            })
            .collect()
    }

    pub fn spin<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let ticket = rng.gen_biguint_below(self.total());
        self.cumulative.partition_point(|c| *c <= ticket)
    }
}

/// Draws a whole new population, draw `k` from `streams(k)`.
pub fn select_roulette_shifted<F>(pop: &[Genome], fitness: &[Int], mut streams: F) -> Vec<usize>
where
    F: FnMut(usize) -> StreamRng,
{
    let wheel = RouletteWheel::new(fitness);
    (0..pop.len()).map(|k| wheel.spin(&mut streams(k))).collect()
}
