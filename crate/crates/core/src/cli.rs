//! Command-line front end. Every command prints one JSON document (or CSV
//! for `limits`) to standard output; exit codes are 0 on success, 1 on usage
//! or I/O errors and 2 when `verify` finds violations.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ga::{run_ga, tau_report, GaConfig, Operator};
use crate::instance::{
    bits_to_string, construct_geometric, generate_bounded, parse_instance, prepare, serialize_instance,
    Instance,
};
use crate::leafcount::{count_leaves, leaf_polynomial, leaf_polynomial_truncated};
use crate::num::{format_fraction, parse_rational, BoundValue};
use crate::oracle::{solve_dp, verify_with, Corruption, Family, VerifyConfig};
use crate::reduction::{compute_profiles, fix_variables, mutation_upper_bound, ReductionSummary};
use crate::Rational;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "mutbound", version, about = "0-1 knapsack reduction, leaf counts, mutation bounds and GA runs")]
struct Cli {
    /// Worker threads for parallel sections (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Bounded,
    Geometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OperatorArg {
    Mo,
    Imo,
}

impl From<OperatorArg> for Operator {
    fn from(v: OperatorArg) -> Self {
        match v {
            OperatorArg::Mo => Operator::Mo,
            OperatorArg::Imo => Operator::Imo,
        }
    }
}

/// An instance file, or a generator family.
#[derive(Debug, Args)]
struct Source {
    /// Instance file (`n C` then `p w` per line).
    path: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long)]
    n: Option<usize>,
    /// Largest profit/weight for the bounded family.
    #[arg(long = "R", default_value_t = 100)]
    max_value: u64,
    /// Capacity as a fraction of the total weight (bounded family).
    #[arg(long, default_value = "1/2")]
    fraction: String,
    /// Generator seed (bounded family).
    #[arg(long = "instance-seed")]
    instance_seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated instance in the text format.
    Generate {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        #[arg(long = "R", default_value_t = 100)]
        max_value: u64,
        #[arg(long, default_value = "1/2")]
        fraction: String,
        /// Required for the bounded family.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sorted order, break item, residual capacity and Dantzig bound.
    Inspect {
        #[command(flatten)]
        source: Source,
    },
    /// H/L profiles, fixed variables and the mutation bound.
    Reduce {
        #[command(flatten)]
        source: Source,
    },
    /// Leaf count from the region generating function.
    Leaves {
        #[command(flatten)]
        source: Source,
        /// Expand the full polynomial instead of the exponent <= 1 part.
        #[arg(long)]
        full: bool,
    },
    /// Mutation-probability upper bound.
    Bound {
        #[command(flatten)]
        source: Source,
    },
    /// Run the genetic algorithm.
    Ga {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 20)]
        pop: usize,
        #[arg(long, default_value_t = 100)]
        iterations: usize,
        #[arg(long, default_value_t = 0.8)]
        pc: f64,
        #[arg(long, default_value_t = 0.01)]
        pm: f64,
        #[arg(long, value_enum, default_value = "imo")]
        operator: OperatorArg,
        #[arg(long)]
        elitist: bool,
        /// Score infeasible genomes zero instead of repairing them.
        #[arg(long)]
        no_repair: bool,
        /// Use min(p_m, upper bound).
        #[arg(long)]
        clamp: bool,
        /// Seed the initial population with the break solution.
        #[arg(long)]
        inject_break: bool,
        #[arg(long)]
        seed: u64,
        /// Also write generation,best,mean to this CSV file.
        #[arg(long)]
        history_csv: Option<PathBuf>,
    },
    /// Single-pass hit probabilities of MO and IMO for the DP optimum.
    Tau {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        pm: String,
        /// Operator simulated by the Monte-Carlo estimate.
        #[arg(long, value_enum, default_value = "mo")]
        operator: OperatorArg,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Check every claim against exact oracles on generated instances.
    Verify {
        #[arg(long, value_enum, default_value = "bounded")]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        /// Upper end of the item-count range (defaults to --n).
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long = "R", default_value_t = 50)]
        max_value: u64,
        #[arg(long, default_value = "1/2")]
        fraction: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        trials: u64,
        #[arg(long, default_value = "1/10")]
        tau_pm: String,
        /// Negative control: decrement every finite h by this amount.
        #[arg(long)]
        corrupt_h: Option<u64>,
        /// Negative control: shift the leaf count by this amount.
        #[arg(long, allow_hyphen_values = true)]
        corrupt_leaves: Option<i64>,
    },
    /// CSV of the mutation bound across sizes and seeds.
    Limits {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Comma-separated, ascending.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Comma-separated seeds or ranges such as `1-20`.
        #[arg(long, default_value = "")]
        seeds: String,
        #[arg(long = "R", default_value_t = 100)]
        max_value: u64,
        #[arg(long, default_value = "1/2")]
        fraction: String,
    },
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: T,
}

fn emit<T: Serialize>(out: &mut dyn Write, command: &str, body: T) -> Result<()> {
    let doc = Envelope { schema_version: SCHEMA_VERSION, command, body };
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

impl Source {
    fn load(&self) -> Result<Instance> {
        match (&self.path, self.family) {
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
                parse_instance(&text)
            }
            (None, Some(family)) => {
                let n = self.n.ok_or_else(|| Error::InvalidArgument("--family needs --n".into()))?;
                build_family(family, n, self.max_value, &self.fraction, self.instance_seed)
            }
            (Some(_), Some(_)) => Err(Error::InvalidArgument("give either a file or --family, not both".into())),
            (None, None) => Err(Error::InvalidArgument("missing instance file or --family".into())),
        }
    }
}

fn build_family(family: FamilyArg, n: usize, max_value: u64, fraction: &str, seed: Option<u64>) -> Result<Instance> {
    match family {
        FamilyArg::Geometric => construct_geometric(n),
        FamilyArg::Bounded => {
            let seed = seed.ok_or_else(|| Error::InvalidArgument("the bounded family needs a seed".into()))?;
            generate_bounded(n, max_value, &parse_rational(fraction)?, seed)
        }
    }
}

#[derive(Serialize)]
struct InspectBody {
    n: usize,
    #[serde(rename = "C")]
    capacity: String,
    /// 1-based original index at each sorted position.
    order: Vec<usize>,
    b: usize,
    break_item: Option<usize>,
    r: String,
    #[serde(rename = "U")]
    dantzig: String,
    break_value: String,
    break_weight: String,
    break_solution: String,
}

#[derive(Serialize)]
struct LeavesBody {
    omega: String,
    n1: usize,
    baseline: String,
    pruning_ratio: String,
}

#[derive(Serialize)]
struct BoundBody {
    p_m_upper: BoundValue,
    h_term: BoundValue,
    l_term: BoundValue,
    p_m_upper_approx: f64,
}

#[derive(Serialize)]
struct GaBody<'a> {
    config: &'a GaConfig,
    #[serde(flatten)]
    result: crate::ga::GaResult,
}

#[derive(Serialize)]
struct TauBody {
    seed: u64,
    #[serde(rename = "optimum_value")]
    optimum_value: String,
    optimum_bits: String,
    #[serde(flatten)]
    report: crate::ga::TauReport,
}

#[derive(Serialize)]
struct VerifyBody {
    seed: u64,
    count: usize,
    #[serde(flatten)]
    report: crate::oracle::VerificationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitRow {
    pub family: &'static str,
    pub n: usize,
    pub seed: Option<u64>,
    pub p_m_upper: BoundValue,
    pub p_m_upper_approx: f64,
}

/// Mutation bound for each `(n, seed)`. The geometric family is
/// deterministic and yields one row per size with no seed.
pub fn limits_experiment(
    geometric: bool,
    sizes: &[usize],
    seeds: &[u64],
    max_value: u64,
    capacity_fraction: &Rational,
) -> Result<Vec<LimitRow>> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("sizes must be strictly ascending".into()));
    }
    let mut rows = Vec::new();
    for &n in sizes {
        let runs: Vec<Option<u64>> = if geometric { vec![None] } else { seeds.iter().map(|&s| Some(s)).collect() };
        for seed in runs {
            let inst = match seed {
                None => construct_geometric(n)?,
                Some(s) => generate_bounded(n, max_value, capacity_fraction, s)?,
            };
            let bound = mutation_upper_bound(&compute_profiles(&prepare(&inst))).value;
            rows.push(LimitRow {
                family: if geometric { "geometric" } else { "bounded" },
                n,
                seed,
                p_m_upper_approx: bound.to_f64(),
                p_m_upper: bound,
            });
        }
    }
    Ok(rows)
}

pub fn write_limits_csv<W: Write>(rows: &[LimitRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["family", "n", "seed", "p_m_upper", "p_m_upper_approx"])
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    for r in rows {
        w.write_record([
            r.family.to_string(),
            r.n.to_string(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.p_m_upper.to_string(),
            r.p_m_upper_approx.to_string(),
        ])
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn parse_seed_list(text: &str) -> Result<Vec<u64>> {
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| Error::InvalidArgument(format!("bad seed {s:?}")));
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(Error::InvalidArgument(format!("empty seed range {part:?}")));
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(num(part)?),
        }
    }
    Ok(seeds)
}

fn run(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Generate { family, n, max_value, fraction, seed, out: path } => {
            let inst = build_family(family, n, max_value, &fraction, seed)?;
            let text = serialize_instance(&inst);
            match path {
                Some(p) => std::fs::write(&p, text)
                    .map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))?,
                None => out.write_all(text.as_bytes())?,
            }
        }
        Command::Inspect { source } => {
            let inst = source.load()?;
            let prep = prepare(&inst);
            let body = InspectBody {
                n: prep.len(),
                capacity: inst.capacity().to_string(),
                order: prep.perm().iter().map(|j| j + 1).collect(),
                b: prep.b(),
                break_item: prep.break_item().map(|b| prep.perm()[b] + 1),
                r: prep.residual().to_string(),
                dantzig: format_fraction(prep.dantzig()),
                break_value: prep.prefix_profit().to_string(),
                break_weight: prep.prefix_weight().to_string(),
                break_solution: bits_to_string(&prep.to_original_order(prep.break_solution())),
            };
            emit(out, "inspect", body)?;
        }
        Command::Reduce { source } => {
            let prep = prepare(&source.load()?);
            let prof = compute_profiles(&prep);
            let summary = ReductionSummary::new(&prep, &prof, &fix_variables(&prep), &mutation_upper_bound(&prof));
            emit(out, "reduce", summary)?;
        }
        Command::Leaves { source, full } => {
            let prof = compute_profiles(&prepare(&source.load()?));
            let poly = if full { leaf_polynomial(&prof) } else { leaf_polynomial_truncated(&prof) };
            let omega = count_leaves(&poly);
            let n1 = prof.prefix_region_items();
            let baseline = num_bigint::BigUint::one() << n1;
            let ratio = Rational::new(BigInt::from(omega.clone()), BigInt::from(baseline.clone()));
            emit(
                out,
                "leaves",
                LeavesBody {
                    omega: omega.to_string(),
                    n1,
                    baseline: baseline.to_string(),
                    pruning_ratio: format_fraction(&ratio),
                },
            )?;
        }
        Command::Bound { source } => {
            let bound = mutation_upper_bound(&compute_profiles(&prepare(&source.load()?)));
            emit(
                out,
                "bound",
                BoundBody {
                    p_m_upper_approx: bound.value.to_f64(),
                    p_m_upper: bound.value,
                    h_term: bound.h_term,
                    l_term: bound.l_term,
                },
            )?;
        }
        Command::Ga {
            source,
            pop,
            iterations,
            pc,
            pm,
            operator,
            elitist,
            no_repair,
            clamp,
            inject_break,
            seed,
            history_csv,
        } => {
            let inst = source.load()?;
            let cfg = GaConfig {
                pop,
                iterations,
                p_c: pc,
                p_m: pm,
                operator: operator.into(),
                elitist,
                repair: !no_repair,
                clamp_to_bound: clamp,
                inject_break_solution: inject_break,
                seed,
            };
            let result = run_ga(&cfg, &inst)?;
            if let Some(p) = history_csv {
                let file = std::fs::File::create(&p)
                    .map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))?;
                result.write_history_csv(file)?;
            }
            emit(out, "ga", GaBody { config: &cfg, result })?;
        }
        Command::Tau { source, pm, operator, trials, seed } => {
            let prep = prepare(&source.load()?);
            let p_m = parse_rational(&pm)?;
            if p_m > Rational::one() {
                return Err(Error::InvalidArgument("--pm must lie in [0, 1]".into()));
            }
            if trials == 0 {
                return Err(Error::InvalidArgument("--trials must be positive".into()));
            }
            let y = solve_dp(&prep)?;
            let report = tau_report(&prep, &y.bits, &p_m, operator.into(), trials, seed);
            emit(
                out,
                "tau",
                TauBody {
                    seed,
                    optimum_value: y.value.to_string(),
                    optimum_bits: bits_to_string(&prep.to_original_order(&y.bits)),
                    report,
                },
            )?;
        }
        Command::Verify {
            family,
            n,
            n_max,
            max_value,
            fraction,
            count,
            seed,
            trials,
            tau_pm,
            corrupt_h,
            corrupt_leaves,
        } => {
            let fam = match family {
                FamilyArg::Bounded => Family::Bounded {
                    n_min: n,
                    n_max: n_max.unwrap_or(n),
                    max_value,
                    capacity_fraction: parse_rational(&fraction)?,
                },
                FamilyArg::Geometric => Family::Geometric { n },
            };
            let corruption = match (corrupt_h, corrupt_leaves) {
                (Some(_), Some(_)) => {
                    return Err(Error::InvalidArgument("use one corruption at a time".into()))
                }
                (Some(k), None) => Corruption::DecrementH(k),
                (None, Some(d)) => Corruption::OffsetLeafCount(d),
                (None, None) => Corruption::None,
            };
            let cfg = VerifyConfig { tau_p_m: parse_rational(&tau_pm)?, mc_trials: trials, corruption };
            let report = verify_with(&fam, count, seed, &cfg)?;
            let clean = report.is_clean();
            emit(out, "verify", VerifyBody { seed, count, report })?;
            if !clean {
                return Ok(2);
            }
        }
        Command::Limits { family, sizes, seeds, max_value, fraction } => {
            let seeds = parse_seed_list(&seeds)?;
            let geometric = family == FamilyArg::Geometric;
            if !geometric && seeds.is_empty() && !sizes.is_empty() {
                return Err(Error::InvalidArgument("the bounded family needs --seeds".into()));
            }
            let rows = limits_experiment(geometric, &sizes, &seeds, max_value, &parse_rational(&fraction)?)?;
            write_limits_csv(&rows, &mut *out)?;
        }
    }
    Ok(0)
}

/// Parses `args` (including the program name) and runs the command.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("usage error");
                    let _ = writeln!(err, "{first}");
                    1
                }
            };
        }
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build() {
            Ok(pool) => {
                let mut buf = Vec::new();
                let res = pool.install(|| run(cli.command, &mut buf));
                out.write_all(&buf).map_err(Error::from).and(res)
            }
            Err(e) => Err(Error::InvalidArgument(e.to_string())),
        },
        None => run(cli.command, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
