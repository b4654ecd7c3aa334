use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use intcoord_core::harness::{self, parse_pairs, ExperimentConfig, ProblemKind};
use intcoord_core::Error;

/// Intelligent Coordinates search experiments.
#[derive(Parser, Debug)]
#[command(name = "intcoord", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bin-packing: one agent per item picks its bin.
    Binpack {
        #[command(flatten)]
        common: Common,
        /// Number of items (and candidate bins).
        #[arg(long)]
        items: Option<String>,
        /// Bin capacity.
        #[arg(long)]
        capacity: Option<String>,
        /// Smallest generated item size.
        #[arg(long)]
        size_min: Option<String>,
        /// Largest generated item size.
        #[arg(long)]
        size_max: Option<String>,
        /// Read item sizes from an instance file instead of generating them.
        #[arg(long, value_name = "FILE")]
        instance: Option<String>,
        /// Write the instance in use to FILE.
        #[arg(long, value_name = "FILE")]
        write_instance: Option<PathBuf>,
    },
    /// Music-format choice game on a ring with extra links.
    Formats {
        #[command(flatten)]
        common: Common,
        /// Number of agents (ring nodes).
        #[arg(long)]
        nodes: Option<String>,
        #[arg(long, value_parser = ["short", "small"])]
        topology: Option<String>,
        /// Neighborhood radius in hops.
        #[arg(long)]
        hops: Option<String>,
        /// Number of formats.
        #[arg(long)]
        formats: Option<String>,
        /// Extra links as a fraction of the node count.
        #[arg(long)]
        extra_fraction: Option<String>,
        /// Write run 0's network as an edge list to FILE.
        #[arg(long, value_name = "FILE")]
        dump_network: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// key=value file; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["sa", "ic", "coin", "random"])]
    algorithm: Option<String>,
    /// Private utility: tg, wlu, wlu-absent, wlu-move<k>, au or econ.
    #[arg(long)]
    utility: Option<String>,
    #[arg(long)]
    runs: Option<String>,
    #[arg(long)]
    horizon: Option<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<String>,
    /// Directory for CSV output.
    #[arg(long, value_name = "DIR")]
    out: Option<String>,
    /// Probability of keeping the previous move when exploring.
    #[arg(long)]
    stay: Option<String>,
    /// SA only: stay probability reached at the horizon, or `none`.
    #[arg(long)]
    stay_final: Option<String>,
    /// Initial exploitation (acceptance) temperature.
    #[arg(long)]
    t_exploit: Option<String>,
    #[arg(long)]
    anneal_factor: Option<String>,
    #[arg(long)]
    anneal_period: Option<String>,
    /// Learning temperature of the agents' Boltzmann policies.
    #[arg(long)]
    t_learn: Option<String>,
    /// Per-step decay of recorded payoffs.
    #[arg(long)]
    decay: Option<String>,
    /// Leading steps of uniformly random proposals.
    #[arg(long)]
    warmup: Option<String>,
    #[arg(long)]
    payoff_scale: Option<String>,
}

impl Common {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let flags = [
            ("algorithm", &self.algorithm),
            ("utility", &self.utility),
            ("runs", &self.runs),
            ("horizon", &self.horizon),
            ("seed", &self.seed),
            ("out", &self.out),
            ("stay", &self.stay),
            ("stay-final", &self.stay_final),
            ("t-exploit", &self.t_exploit),
            ("anneal-factor", &self.anneal_factor),
            ("anneal-period", &self.anneal_period),
            ("t-learn", &self.t_learn),
            ("decay", &self.decay),
            ("warmup", &self.warmup),
            ("payoff-scale", &self.payoff_scale),
        ];
        collect(flags)
    }
}

fn collect<const N: usize>(flags: [(&'static str, &Option<String>); N]) -> Vec<(&'static str, String)> {
    flags
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k, v.clone())))
        .collect()
}

/// File settings first, then flags, so flags win.
fn build_config(
    kind: ProblemKind,
    file: Option<&Path>,
    flags: Vec<(&'static str, String)>,
) -> Result<ExperimentConfig, Error> {
    let mut pairs = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?;
            parse_pairs(&text)?
        }
        None => Vec::new(),
    };
    pairs.extend(flags.into_iter().map(|(k, v)| (k.to_string(), v)));
    ExperimentConfig::from_pairs(kind, &pairs)
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = match &cli.command {
        Command::Binpack {
            common,
            items,
            capacity,
            size_min,
            size_max,
            instance,
            write_instance,
        } => {
            let mut flags = common.pairs();
            flags.extend(collect([
                ("items", items),
                ("capacity", capacity),
                ("size-min", size_min),
                ("size-max", size_max),
                ("instance", instance),
            ]));
            let cfg = build_config(ProblemKind::BinPack, common.config.as_deref(), flags)?;
            if let Some(path) = write_instance {
                cfg.validate()?;
                cfg.binpack_instance()?.write(path)?;
            }
            cfg
        }
        Command::Formats {
            common,
            nodes,
            topology,
            hops,
            formats,
            extra_fraction,
            dump_network,
        } => {
            let mut flags = common.pairs();
            flags.extend(collect([
                ("nodes", nodes),
                ("topology", topology),
                ("hops", hops),
                ("formats", formats),
                ("extra-fraction", extra_fraction),
            ]));
            let cfg = build_config(ProblemKind::Formats, common.config.as_deref(), flags)?;
            if let Some(path) = dump_network {
                cfg.validate()?;
                let text = cfg.format_game(0)?.network().to_edge_list();
                std::fs::write(path, text).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
            }
            cfg
        }
    };

    let result = harness::run_experiment(&cfg)?;
    let s = &result.stats;
    println!("algorithm,utility,meanG,stderr,best,worst,percentOptimum");
    println!(
        "{},{},{},{},{},{},{}",
        s.algorithm,
        s.utility.map_or_else(|| "none".to_string(), |u| u.to_string()),
        harness::format_sig6(s.final_mean),
        harness::format_sig6(s.final_stderr),
        harness::format_sig6(s.best),
        harness::format_sig6(s.worst),
        harness::format_sig6(s.percent_optimum),
    );
    if let Some(dir) = &cfg.output {
        harness::write_csv(s, &result.records, dir)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
