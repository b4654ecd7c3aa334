//! Seeded replicate experiments and their summary statistics.
//!
//! Each run gets its own generator seeds derived from the master seed and the
//! run index, so results do not depend on how runs are scheduled across
//! threads. Aggregation is ordered by run index.

mod config;
mod csv;
pub mod diagnostics;

use std::path::PathBuf;

use rayon::prelude::*;

use crate::binpack::{BinPackInstance, SizeDistribution};
use crate::error::{Error, Result};
use crate::formats::{FormatGame, FormatNetwork, Topology, DEFAULT_EXTRA_LINK_FRACTION, DEFAULT_FORMAT_COUNT};
use crate::model::{JointState, Problem, Sense, UtilityChoice};
use crate::search::{self, Algorithm, AlgorithmConfig};

pub use self::config::{parse_pairs, ProblemKind};
pub use self::csv::{format_sig6, write_csv, FINAL_FILE, RUNS_FILE, SUMMARY_FILE};

/// Where bin-packing item sizes come from.
#[derive(Debug, Clone, PartialEq)]
pub enum SizeSource {
    /// Generated once per experiment from the master seed. `None` picks the
    /// default distribution for the capacity.
    Generated(Option<SizeDistribution>),
    /// A fixed instance, e.g. read from an instance file.
    Fixed(BinPackInstance),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemConfig {
    BinPack {
        items: usize,
        capacity: f64,
        sizes: SizeSource,
    },
    /// A fresh network and preference table is drawn for every run.
    Formats {
        nodes: usize,
        topology: Topology,
        hops: usize,
        format_count: usize,
        extra_fraction: f64,
    },
}

impl ProblemConfig {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemConfig::BinPack { .. } => ProblemKind::BinPack,
            ProblemConfig::Formats { .. } => ProblemKind::Formats,
        }
    }

    pub fn binpack(items: usize, capacity: f64) -> Self {
        ProblemConfig::BinPack {
            items,
            capacity,
            sizes: SizeSource::Generated(None),
        }
    }

    pub fn formats(nodes: usize, topology: Topology, hops: usize) -> Self {
        ProblemConfig::Formats {
            nodes,
            topology,
            hops,
            format_count: DEFAULT_FORMAT_COUNT,
            extra_fraction: DEFAULT_EXTRA_LINK_FRACTION,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub algorithm: AlgorithmConfig,
    pub runs: usize,
    pub master_seed: u64,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::config("run count must be at least 1"));
        }
        self.algorithm.validate()?;
        match &self.problem {
            ProblemConfig::BinPack { items, capacity, sizes } => {
                if *items == 0 {
                    return Err(Error::config("bin-packing needs at least one item"));
                }
                if !capacity.is_finite() || *capacity <= 0.0 {
                    return Err(Error::config("capacity must be positive"));
                }
                if let SizeSource::Fixed(inst) = sizes {
                    if inst.item_count() != *items || inst.capacity() != *capacity {
                        return Err(Error::config(format!(
                            "instance has {} items of capacity {}, config says {items} and {capacity}",
                            inst.item_count(),
                            inst.capacity()
                        )));
                    }
                }
            }
            ProblemConfig::Formats {
                nodes,
                topology,
                hops,
                format_count,
                extra_fraction,
            } => {
                // Building one network surfaces every structural error up front.
                let net = FormatNetwork::build(*nodes, *topology, *extra_fraction, 0)?;
                FormatGame::new(net, *format_count, *hops, vec![0.0; nodes * format_count])?;
            }
        }
        Ok(())
    }

    /// The bin-packing instance shared by every run of the experiment.
    pub fn binpack_instance(&self) -> Result<BinPackInstance> {
        match &self.problem {
            ProblemConfig::BinPack { items, capacity, sizes } => match sizes {
                SizeSource::Fixed(inst) => Ok(inst.clone()),
                SizeSource::Generated(dist) => BinPackInstance::generate(
                    *items,
                    *capacity,
                    dist.unwrap_or_else(|| SizeDistribution::default_for(*capacity)),
                    derive_seed(self.master_seed, 0, Stream::Instance),
                ),
            },
            ProblemConfig::Formats { .. } => Err(Error::config("not a bin-packing experiment")),
        }
    }

    /// The format game for run `run`. The instance depends only on the master
    /// seed and the run index, so different algorithms see the same games.
    pub fn format_game(&self, run: usize) -> Result<FormatGame> {
        match &self.problem {
            ProblemConfig::Formats {
                nodes,
                topology,
                hops,
                format_count,
                extra_fraction,
            } => {
                let seed = derive_seed(self.master_seed, run as u64, Stream::Instance);
                let net = FormatNetwork::build(*nodes, *topology, *extra_fraction, seed)?;
                FormatGame::random(net, *format_count, *hops, splitmix64(seed))
            }
            ProblemConfig::BinPack { .. } => Err(Error::config("not a format-game experiment")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Search = 0,
    Instance = 1,
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function, a bijection on `u64`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for `(run, stream)`. Injective in `(run, stream)` for a fixed master
/// seed while `run < 2^62`.
pub fn derive_seed(master: u64, run: u64, stream: Stream) -> u64 {
    let index = run.wrapping_mul(2).wrapping_add(stream as u64 + 1);
    splitmix64(master.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    /// Reported (hard) objective of the current state after each step.
    pub trajectory: Vec<f64>,
    pub final_state: JointState,
}

impl RunRecord {
    pub fn final_value(&self) -> f64 {
        *self.trajectory.last().expect("horizon is at least 1")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub algorithm: Algorithm,
    pub utility: Option<UtilityChoice>,
    pub sense: Sense,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub final_mean: f64,
    pub final_stderr: f64,
    pub best: f64,
    pub worst: f64,
    pub percent_optimum: f64,
}

impl SummaryStats {
    pub fn from_records(
        records: &[RunRecord],
        sense: Sense,
        algorithm: Algorithm,
        utility: Option<UtilityChoice>,
    ) -> Result<Self> {
        let horizon = records
            .first()
            .map(|r| r.trajectory.len())
            .ok_or_else(|| Error::config("no runs to summarize"))?;
        if horizon == 0 || records.iter().any(|r| r.trajectory.len() != horizon) {
            return Err(Error::config("runs have unequal or empty trajectories"));
        }
        let (mean, stderr): (Vec<f64>, Vec<f64>) = (0..horizon)
            .map(|t| mean_stderr(records.iter().map(|r| r.trajectory[t])))
            .unzip();
        let finals: Vec<f64> = records.iter().map(RunRecord::final_value).collect();
        let (best, worst) = best_worst(&finals, sense);
        Ok(SummaryStats {
            algorithm,
            utility,
            sense,
            final_mean: mean[horizon - 1],
            final_stderr: stderr[horizon - 1],
            mean,
            stderr,
            best,
            worst,
            percent_optimum: percent_optimum(&finals, sense),
        })
    }
}

/// Mean and standard error (sample standard deviation over `sqrt(n)`; zero
/// for a single value).
pub fn mean_stderr(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let v: Vec<f64> = values.into_iter().collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn best_worst(values: &[f64], sense: Sense) -> (f64, f64) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    match sense {
        Sense::Minimize => (min, max),
        Sense::Maximize => (max, min),
    }
}

/// Best value in `values` under `sense`.
pub fn best_of(values: &[f64], sense: Sense) -> f64 {
    best_worst(values, sense).0
}

/// Percentage of runs within one unit of the best run in `values`.
pub fn percent_optimum(values: &[f64], sense: Sense) -> f64 {
    percent_within_one(values, best_of(values, sense))
}

/// Percentage of `values` within one unit of `reference`.
pub fn percent_within_one(values: &[f64], reference: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let hits = values.iter().filter(|v| (*v - reference).abs() <= 1.0).count();
    100.0 * hits as f64 / values.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub stats: SummaryStats,
    pub records: Vec<RunRecord>,
}

impl ExperimentResult {
    pub fn final_values(&self) -> Vec<f64> {
        self.records.iter().map(RunRecord::final_value).collect()
    }
}

fn one_run<P: Problem + ?Sized>(problem: &P, cfg: &ExperimentConfig, run: usize) -> Result<RunRecord> {
    let seed = derive_seed(cfg.master_seed, run as u64, Stream::Search);
    let traj = search::run(problem, &cfg.algorithm, seed)?;
    Ok(RunRecord {
        run,
        seed,
        trajectory: traj.values,
        final_state: traj.final_state,
    })
}

/// Runs every replicate (in parallel) and aggregates them in run order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let (records, sense) = match cfg.problem {
        ProblemConfig::BinPack { .. } => {
            let inst = cfg.binpack_instance()?;
            let records = (0..cfg.runs)
                .into_par_iter()
                .map(|run| one_run(&inst, cfg, run))
                .collect::<Result<Vec<_>>>()?;
            (records, inst.sense())
        }
        ProblemConfig::Formats { .. } => {
            let records = (0..cfg.runs)
                .into_par_iter()
                .map(|run| one_run(&cfg.format_game(run)?, cfg, run))
                .collect::<Result<Vec<_>>>()?;
            (records, Sense::Maximize)
        }
    };
    let utility = cfg.algorithm.algorithm.learns().then_some(cfg.algorithm.utility);
    let stats = SummaryStats::from_records(&records, sense, cfg.algorithm.algorithm, utility)?;
    Ok(ExperimentResult { stats, records })
}
