//! 0-1 knapsack toolkit: colored-region reduction, generating-function leaf
//! counting, the mutation-probability upper bound, and a genetic algorithm
//! with flip-bit (MO) and break-item-biased (IMO) mutation.
//!
//! Instance data is arbitrary-precision ([`Int`]) and every bound is an exact
//! [`Rational`]. Probability-level formulas (hit probabilities, flip
//! probabilities) are generic over [`Probability`], so the same code runs on
//! `f32`, `f64` or exact rationals.

pub mod cli;
pub mod error;
pub mod ga;
pub mod instance;
pub mod leafcount;
pub mod num;
pub mod oracle;
pub mod reduction;
pub mod rng;

pub use error::{Error, Result};
pub use ga::{
    lambda_profile, run_ga, tau_analytic, tau_exact, tau_monte_carlo, GaConfig, GaResult,
    Genome, LambdaProfile, Operator, TauReport,
};
pub use instance::{
    construct_geometric, generate_bounded, parse_instance, prepare, serialize_instance, Instance,
    Item, Prepared, Solution,
};
pub use leafcount::{brute_force_leaves, count_leaves, leaf_polynomial, RegionPolynomial};
pub use num::{BoundValue, ExtNat, Probability};
pub use oracle::{solve_brute, solve_dp, verify_claims, VerificationReport};
pub use reduction::{
    compute_profiles, discrepancy, fix_variables, mutation_upper_bound, DiscrepancyReport,
    MutationBound, Profiles, ReductionReport,
};

/// Arbitrary-precision non-negative integer used for profits, weights and counts.
pub type Int = num_bigint::BigUint;
/// Exact rational used for bounds, exponents and exact probabilities.
pub type Rational = num_rational::BigRational;
/// Single-precision probability scalar.
pub type ProbF32 = f32;
/// Double-precision probability scalar.
pub type ProbF64 = f64;
/// Exact probability scalar.
pub type ProbExact = Rational;
