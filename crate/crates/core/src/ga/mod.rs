//! Genetic algorithm: seeded initialization, single-point crossover, flip-bit
//! (MO) and break-item-biased (IMO) mutation, shifted roulette selection,
//! optional elitism, and single-pass hit probabilities.

mod operators;
mod run;
pub(crate) mod tau;

pub use operators::{
    crossover_single_point, evaluate_fitness, flip_probability, init_population, mutate,
    mutate_flip, mutate_imo, select_roulette_shifted, swap_tails, RouletteWheel,
};
pub use run::{run_ga, GaConfig, GaResult, GenerationStats};
pub use tau::{
    lambda_profile, tau_analytic, tau_exact, tau_monte_carlo, tau_report, LambdaProfile,
    MonteCarloEstimate, TauReport,
};

use serde::{Deserialize, Serialize};

/// Mutation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    /// Every bit flips with probability `p_m`.
    #[serde(rename = "MO")]
    Mo,
    /// Bits drift toward the break solution: a dense 0 or a sparse 1 flips
    /// with probability `1 - p_m`, the opposite bits with `p_m`.
    #[serde(rename = "IMO")]
    Imo,
}

impl std::fmt::Display for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Operator::Mo => "MO",
            Operator::Imo => "IMO",
        })
    }
}

/// Bit string in sorted order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Genome {
    pub bits: Vec<bool>,
}

impl Genome {
    pub fn new(bits: Vec<bool>) -> Self {
        Genome { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Genome { bits: vec![false; n] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}
