use std::io::Write;

use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::operators::{crossover_single_point, evaluate_fitness, init_population, mutate, RouletteWheel};
use super::{Genome, Operator};
use crate::error::{Error, Result};
use crate::instance::{bits_to_string, prepare, Instance, Solution};
use crate::num::ser_int;
use crate::reduction::{compute_profiles, mutation_upper_bound};
use crate::rng;
use crate::Int;

const STAGE_CROSS: u64 = 2;
const STAGE_MUTATE: u64 = 3;
const STAGE_SELECT: u64 = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaConfig {
    /// Even population size.
    pub pop: usize,
    pub iterations: usize,
    pub p_c: f64,
    pub p_m: f64,
    pub operator: Operator,
    /// Carry the best-so-far genome into every generation.
    pub elitist: bool,
    /// Repair infeasible genomes instead of scoring them zero.
    pub repair: bool,
    /// Use `min(p_m, p̄_m)` when the bound is finite.
    pub clamp_to_bound: bool,
    /// Replace the first initial individual with the break solution.
    pub inject_break_solution: bool,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            pop: 20,
            iterations: 100,
            p_c: 0.8,
            p_m: 0.01,
            operator: Operator::Imo,
            elitist: false,
            repair: true,
            clamp_to_bound: false,
            inject_break_solution: false,
            seed: 0,
        }
    }
}

impl GaConfig {
    fn validate(&self) -> Result<()> {
        if self.pop == 0 || !self.pop.is_multiple_of(2) {
            return Err(Error::InvalidArgument("population size must be even and positive".into()));
        }
        for (name, p) in [("p_c", self.p_c), ("p_m", self.p_m)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationStats {
    pub generation: usize,
    #[serde(serialize_with = "ser_int")]
    pub best: Int,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaResult {
    pub seed: u64,
    pub operator: Operator,
    pub effective_p_m: f64,
    /// Best solution seen during the run, sorted order.
    #[serde(skip)]
    pub best: Solution,
    #[serde(serialize_with = "ser_int")]
    pub best_value: Int,
    #[serde(serialize_with = "ser_int")]
    pub best_weight: Int,
    /// 1-based original indices of the selected items.
    pub best_selected: Vec<usize>,
    /// Bits of the best solution in original item order.
    pub best_bits: String,
    /// Best fitness in the final population.
    #[serde(serialize_with = "ser_int")]
    pub final_best_value: Int,
    pub history: Vec<GenerationStats>,
    pub evaluations: u64,
}

impl GaResult {
    /// CSV with header `generation,best,mean`.
    pub fn write_history_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.history {
            w.serialize(row).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn stats(generation: usize, fitness: &[Int]) -> GenerationStats {
    let best = fitness.iter().max().cloned().unwrap_or_else(Int::zero);
    let total: Int = fitness.iter().sum();
    let mean = total.to_f64().unwrap_or(f64::INFINITY) / fitness.len() as f64;
    GenerationStats { generation, best, mean }
}

struct Individual {
    genome: Genome,
    solution: Solution,
    fitness: Int,
}

/// Runs `iterations` rounds of crossover, mutation and selection.
pub fn run_ga(cfg: &GaConfig, inst: &Instance) -> Result<GaResult> {
    cfg.validate()?;
    let prep = prepare(inst);
    let p_m = if cfg.clamp_to_bound {
        let bound = mutation_upper_bound(&compute_profiles(&prep)).value.to_f64();
        cfg.p_m.min(bound)
    } else {
        cfg.p_m
    };

    let mut genomes = init_population(cfg.pop, &prep, cfg.seed);
    if cfg.inject_break_solution {
        genomes[0] = Genome::new(prep.break_solution().to_vec());
    }
    let evaluate = |genomes: Vec<Genome>| -> Vec<Individual> {
        genomes
            .into_par_iter()
            .map(|mut genome| {
                let (solution, fitness) = evaluate_fitness(&mut genome, &prep, cfg.repair);
                Individual { genome, solution, fitness }
            })
            .collect()
    };

    let mut population = evaluate(genomes);
    let mut evaluations = cfg.pop as u64;
    let fitness_of = |pop: &[Individual]| pop.iter().map(|i| i.fitness.clone()).collect::<Vec<_>>();
    let best_index = |pop: &[Individual]| {
        // first maximum
        pop.iter().enumerate().fold(0, |b, (k, i)| if i.fitness > pop[b].fitness { k } else { b })
    };
    let bi = best_index(&population);
    let mut best = (population[bi].genome.clone(), population[bi].solution.clone(), population[bi].fitness.clone());
    let mut history = vec![stats(0, &fitness_of(&population))];

    for t in 1..=cfg.iterations {
        let tt = t as u64;
        let mut genomes: Vec<Genome> = population.into_iter().map(|i| i.genome).collect();
        for (pair, chunk) in genomes.chunks_mut(2).enumerate() {
            let mut r = rng::stream(cfg.seed, &[tt, STAGE_CROSS, pair as u64]);
            let (a, b) = crossover_single_point(&chunk[0], &chunk[1], cfg.p_c, &mut r);
            chunk[0] = a;
            chunk[1] = b;
        }
        genomes.par_iter_mut().enumerate().for_each(|(k, g)| {
            let mut r = rng::stream(cfg.seed, &[tt, STAGE_MUTATE, k as u64]);
            mutate(&mut g.bits, cfg.operator, p_m, &prep, &mut r);
        });
        let offspring = evaluate(genomes);
        evaluations += cfg.pop as u64;

        let bi = best_index(&offspring);
        if offspring[bi].fitness > best.2 {
            best = (offspring[bi].genome.clone(), offspring[bi].solution.clone(), offspring[bi].fitness.clone());
        }

        let wheel = RouletteWheel::new(&fitness_of(&offspring));
        let mut next: Vec<Individual> = (0..cfg.pop)
            .map(|k| {
                let mut r = rng::stream(cfg.seed, &[tt, STAGE_SELECT, k as u64]);
                let pick = &offspring[wheel.spin(&mut r)];
                Individual {
                    genome: pick.genome.clone(),
                    solution: pick.solution.clone(),
                    fitness: pick.fitness.clone(),
                }
            })
            .collect();
        if cfg.elitist {
            let worst = next
                .iter()
                .enumerate()
                .fold(0, |w, (k, i)| if i.fitness < next[w].fitness { k } else { w });
            next[worst] = Individual { genome: best.0.clone(), solution: best.1.clone(), fitness: best.2.clone() };
        }
        history.push(stats(t, &fitness_of(&next)));
        population = next;
    }

    let final_best_value = population.iter().map(|i| &i.fitness).max().cloned().unwrap_or_else(Int::zero);
    let (_, solution, value) = best;
    let best_selected = prep.original_indices(
        solution.bits.iter().enumerate().filter(|(_, &b)| b).map(|(j, _)| j),
    );
    Ok(GaResult {
        seed: cfg.seed,
        operator: cfg.operator,
        effective_p_m: p_m,
        best_weight: solution.weight.clone(),
        best_bits: bits_to_string(&prep.to_original_order(&solution.bits)),
        best: solution,
        best_value: value,
        best_selected,
        final_best_value,
        history,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> Instance {
        Instance::from_pairs(&[(2, 1), (10, 10)], 10).unwrap()
    }

    #[test]
    fn zero_iterations_reports_initial_population() {
        let cfg = GaConfig { pop: 4, iterations: 0, seed: 3, ..GaConfig::default() };
        let res = run_ga(&cfg, &example1()).unwrap();
        assert_eq!(res.history.len(), 1);
        assert_eq!(res.evaluations, 4);
        assert_eq!(res.best_value, res.history[0].best);
        assert_eq!(res.final_best_value, res.best_value);
    }

    #[test]
    fn rejects_bad_configs() {
        let inst = example1();
        for cfg in [
            GaConfig { pop: 3, ..GaConfig::default() },
            GaConfig { pop: 0, ..GaConfig::default() },
            GaConfig { p_m: 1.5, ..GaConfig::default() },
            GaConfig { p_c: -0.1, ..GaConfig::default() },
            GaConfig { p_m: f64::NAN, ..GaConfig::default() },
        ] {
            assert!(run_ga(&cfg, &inst).is_err());
        }
    }

    #[test]
    fn clamp_uses_the_bound() {
        let inst = crate::instance::construct_geometric(3).unwrap();
        let cfg = GaConfig { p_m: 0.9, clamp_to_bound: true, iterations: 1, ..GaConfig::default() };
        let res = run_ga(&cfg, &inst).unwrap();
        assert!((res.effective_p_m - 4.0 / 7.0).abs() < 1e-12);
        let cfg = GaConfig { p_m: 0.2, clamp_to_bound: true, iterations: 1, ..GaConfig::default() };
        assert_eq!(run_ga(&cfg, &inst).unwrap().effective_p_m, 0.2);
    }

    #[test]
    fn history_csv_has_stable_header() {
        let cfg = GaConfig { pop: 2, iterations: 2, ..GaConfig::default() };
        let res = run_ga(&cfg, &example1()).unwrap();
        let mut buf = Vec::new();
        res.write_history_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("generation,best,mean\n"));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn repaired_runs_report_feasible_best() {
        let inst = crate::instance::generate_bounded(30, 50, &crate::num::parse_rational("1/3").unwrap(), 5).unwrap();
        let cfg = GaConfig { pop: 10, iterations: 20, p_m: 0.2, operator: Operator::Mo, seed: 8, ..GaConfig::default() };
        let res = run_ga(&cfg, &inst).unwrap();
        assert!(res.best.feasible);
        assert!(res.best.weight <= *inst.capacity());
        assert_eq!(res.best.value, res.best_value);
    }
}
