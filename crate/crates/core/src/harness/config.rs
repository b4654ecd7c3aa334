//! Flat `key=value` experiment configuration.
//!
//! Every CLI flag has a key of the same name (without the leading dashes).
//! Blank lines and lines starting with `#` are ignored.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{ExperimentConfig, ProblemConfig, SizeSource};
use crate::binpack::{BinPackInstance, SizeDistribution};
use crate::error::{Error, Result};
use crate::search::{Algorithm, AlgorithmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    BinPack,
    Formats,
}

/// Splits `key=value` lines. Keys are lowercased; `_` is accepted for `-`.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: format!("expected key=value, found `{line}`"),
        })?;
        let key = k.trim().to_ascii_lowercase().replace('_', "-");
        if key.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                msg: "empty key".into(),
            });
        }
        pairs.push((key, v.trim().to_string()));
    }
    Ok(pairs)
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(format!("bad value `{value}` for `{key}`")))
}

impl ExperimentConfig {
    /// Settings of the bin-packing (N = 20, c = 12, 25 runs) and format-game
    /// (m = 100, D = 1, short links, 50 runs) experiments, running IC with WLU.
    pub fn defaults(kind: ProblemKind) -> Self {
        let (problem, runs, algorithm) = match kind {
            ProblemKind::BinPack => (ProblemConfig::binpack(20, 12.0), 25, AlgorithmConfig::default()),
            ProblemKind::Formats => (
                ProblemConfig::formats(100, crate::formats::Topology::ShortLinks, 1),
                50,
                AlgorithmConfig {
                    t_learn: 0.4,
                    t_exploit_initial: 0.05,
                    anneal_factor: 1.0,
                    warmup_steps: FORMATS_WARMUP,
                    ..AlgorithmConfig::default()
                },
            ),
        };
        let mut cfg = ExperimentConfig {
            problem,
            algorithm,
            runs,
            master_seed: 0,
            output: None,
        };
        cfg.set_algorithm(cfg.algorithm.algorithm);
        cfg
    }

    /// Switches algorithm and resets the settings whose defaults depend on it:
    /// the warm-up length and SA's stay-probability ramp.
    pub fn set_algorithm(&mut self, algorithm: Algorithm) {
        let a = &mut self.algorithm;
        a.algorithm = algorithm;
        a.warmup_steps = match (algorithm.learns(), self.problem.kind()) {
            (false, _) => 0,
            (true, ProblemKind::BinPack) => BINPACK_WARMUP,
            (true, ProblemKind::Formats) => FORMATS_WARMUP,
        };
        a.stay_final = match algorithm {
            Algorithm::Sa => Some(SA_FINAL_STAY),
            _ => None,
        };
    }

    /// Applies one `key=value` setting.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let a = &mut self.algorithm;
        match key {
            "algorithm" => self.set_algorithm(parse(key, value)?),
            "utility" => a.utility = parse(key, value)?,
            "runs" => self.runs = parse(key, value)?,
            "horizon" => a.horizon = parse(key, value)?,
            "seed" => self.master_seed = parse(key, value)?,
            "out" => self.output = Some(PathBuf::from(value)),
            "stay" => a.stay_probability = parse(key, value)?,
            "stay-final" => {
                a.stay_final = match value {
                    "none" | "off" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "t-exploit" => a.t_exploit_initial = parse(key, value)?,
            "anneal-factor" => a.anneal_factor = parse(key, value)?,
            "anneal-period" => a.anneal_period = parse(key, value)?,
            "t-learn" => a.t_learn = parse(key, value)?,
            "decay" => a.decay = parse(key, value)?,
            "warmup" => a.warmup_steps = parse(key, value)?,
            "payoff-scale" => a.payoff_scale = parse(key, value)?,
            _ => return self.apply_problem(key, value),
        }
        Ok(())
    }

    fn apply_problem(&mut self, key: &str, value: &str) -> Result<()> {
        match &mut self.problem {
            ProblemConfig::BinPack { items, capacity, sizes } => match key {
                "items" => *items = parse(key, value)?,
                "capacity" => *capacity = parse(key, value)?,
                "size-min" | "size-max" => {
                    let v: u32 = parse(key, value)?;
                    let (mut min, mut max) = match sizes {
                        SizeSource::Generated(Some(SizeDistribution::UniformInt { min, max })) => (*min, *max),
                        _ => match SizeDistribution::default_for(*capacity) {
                            SizeDistribution::UniformInt { min, max } => (min, max),
                            SizeDistribution::Uniform { .. } => unreachable!(),
                        },
                    };
                    if key == "size-min" {
                        min = v;
                    } else {
                        max = v;
                    }
                    *sizes = SizeSource::Generated(Some(SizeDistribution::UniformInt { min, max }));
                }
                "instance" => {
                    let inst = BinPackInstance::read(Path::new(value))?;
                    *items = inst.item_count();
                    *capacity = inst.capacity();
                    *sizes = SizeSource::Fixed(inst);
                }
                _ => return Err(unknown(key, "binpack")),
            },
            ProblemConfig::Formats {
                nodes,
                topology,
                hops,
                format_count,
                extra_fraction,
            } => match key {
                "nodes" => *nodes = parse(key, value)?,
                "topology" => *topology = parse(key, value)?,
                "hops" => *hops = parse(key, value)?,
                "formats" => *format_count = parse(key, value)?,
                "extra-fraction" => *extra_fraction = parse(key, value)?,
                _ => return Err(unknown(key, "formats")),
            },
        }
        Ok(())
    }

    /// Defaults for `kind`, then `algorithm` (which resets its dependent
    /// defaults), then every other pair in order.
    pub fn from_pairs<K, V>(kind: ProblemKind, pairs: &[(K, V)]) -> Result<Self>
    where
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut cfg = Self::defaults(kind);
        for (k, v) in pairs.iter().filter(|(k, _)| k.as_ref() == "algorithm") {
            cfg.apply(k.as_ref(), v.as_ref())?;
        }
        for (k, v) in pairs.iter().filter(|(k, _)| k.as_ref() != "algorithm") {
            cfg.apply(k.as_ref(), v.as_ref())?;
        }
        Ok(cfg)
    }
}

fn unknown(key: &str, problem: &str) -> Error {
    Error::config(format!("unknown key `{key}` for {problem} experiments"))
}

/// Random joint moves that seed the learners' tables before they steer.
const BINPACK_WARMUP: u64 = 100;
const FORMATS_WARMUP: u64 = 20;
/// Where SA's stay probability ends up at the horizon.
const SA_FINAL_STAY: f64 = 0.95;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::Topology;
    use crate::model::UtilityChoice;

    #[test]
    fn parses_pairs_and_comments() {
        let p = parse_pairs("# comment\n\nruns = 3\nT_LEARN=0.4\n").unwrap();
        assert_eq!(p, vec![("runs".into(), "3".into()), ("t-learn".into(), "0.4".into())]);
        assert!(matches!(parse_pairs("runs 3"), Err(Error::Parse { line: 1, .. })));
        assert!(parse_pairs("=3").is_err());
    }

    #[test]
    fn algorithm_resets_dependent_defaults() {
        let cfg = ExperimentConfig::from_pairs(ProblemKind::BinPack, &[("warmup", "7"), ("algorithm", "sa")]).unwrap();
        assert_eq!(cfg.algorithm.algorithm, Algorithm::Sa);
        assert_eq!(cfg.algorithm.warmup_steps, 7);
        assert_eq!(cfg.algorithm.stay_final, Some(0.95));
        let ic = ExperimentConfig::from_pairs(ProblemKind::BinPack, &[("algorithm", "ic")]).unwrap();
        assert_eq!(ic.algorithm.warmup_steps, 100);
        assert_eq!(ic.algorithm.stay_final, None);
    }

    #[test]
    fn formats_keys() {
        let cfg = ExperimentConfig::from_pairs(
            ProblemKind::Formats,
            &[("topology", "small"), ("hops", "3"), ("utility", "econ"), ("runs", "4")],
        )
        .unwrap();
        assert_eq!(
            cfg.problem,
            ProblemConfig::Formats {
                nodes: 100,
                topology: Topology::SmallWorlds,
                hops: 3,
                format_count: 4,
                extra_fraction: 0.06
            }
        );
        assert_eq!(cfg.algorithm.utility, UtilityChoice::Econ);
        assert_eq!(cfg.algorithm.t_learn, 0.4);
        assert_eq!(cfg.algorithm.t_exploit_initial, 0.05);
        assert_eq!(cfg.runs, 4);
    }

    #[test]
    fn size_range_keys() {
        let cfg = ExperimentConfig::from_pairs(ProblemKind::BinPack, &[("capacity", "10"), ("size-max", "4")]).unwrap();
        assert_eq!(
            cfg.problem,
            ProblemConfig::BinPack {
                items: 20,
                capacity: 10.0,
                sizes: SizeSource::Generated(Some(SizeDistribution::UniformInt { min: 1, max: 4 }))
            }
        );
    }

    #[test]
    fn rejects_unknown_and_misplaced_keys() {
        assert!(ExperimentConfig::from_pairs(ProblemKind::BinPack, &[("hops", "3")]).is_err());
        assert!(ExperimentConfig::from_pairs(ProblemKind::Formats, &[("capacity", "3")]).is_err());
        assert!(ExperimentConfig::from_pairs(ProblemKind::Formats, &[("runs", "many")]).is_err());
        assert!(ExperimentConfig::from_pairs(ProblemKind::Formats, &[("algorithm", "ga")]).is_err());
    }
}
