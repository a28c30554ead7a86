//! Sweep configuration from a key-value file and command-line overrides.
//!
//! The file is TOML whose keys are exactly the [`SweepConfig`] field names:
//!
//! ```toml
//! problem_kind = "nk"
//! levels = "0..19"          # or [0, 3, 5]
//! n = 20
//! instances_per_level = 100
//! reps_per_instance = 100
//! topologies = ["linear", "complete"]
//! n_agents = 100
//! rounds = 100
//! master_seed = 42
//! ```
//!
//! Precedence is flag, then file, then the full default grid.

use std::path::Path;

use pps_core::Topology;
use serde::Deserialize;

use crate::error::{LabError, Result};
use crate::experiment::{ProblemKind, SweepConfig};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    problem_kind: Option<ProblemKind>,
    levels: Option<Levels>,
    n: Option<usize>,
    instances_per_level: Option<usize>,
    reps_per_instance: Option<usize>,
    topologies: Option<Vec<String>>,
    n_agents: Option<usize>,
    rounds: Option<usize>,
    master_seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Levels {
    List(Vec<usize>),
    Spec(String),
}

/// Values given on the command line; `None` leaves the file or default value.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub levels: Option<Vec<usize>>,
    pub n: Option<usize>,
    pub instances_per_level: Option<usize>,
    pub reps_per_instance: Option<usize>,
    pub topologies: Option<Vec<Topology>>,
    pub n_agents: Option<usize>,
    pub rounds: Option<usize>,
    pub master_seed: Option<u64>,
}

/// Expands `"0..19"` (inclusive), `"0,3,5"` and mixtures such as `"0..3,8"`.
pub fn parse_levels(spec: &str) -> Result<Vec<usize>> {
    let bad = || LabError::config("levels", format!("cannot parse `{spec}`"));
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            }
            None => out.push(part.parse().map_err(|_| bad())?),
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

pub fn parse_topologies(spec: &str) -> Result<Vec<Topology>> {
    spec.split(',').map(|t| parse_topology(t.trim())).collect()
}

fn parse_topology(name: &str) -> Result<Topology> {
    name.parse()
        .map_err(|_| LabError::config("topologies", format!("unknown topology `{name}`")))
}

/// Builds and validates a sweep configuration.
///
/// A seed must come from either the file (`master_seed`) or the overrides.
pub fn parse_config(
    kind: ProblemKind,
    file: Option<&Path>,
    flags: &Overrides,
) -> Result<SweepConfig> {
    let from_file = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(LabError::io(path))?;
            toml::from_str::<FileConfig>(&text)
                .map_err(|e| LabError::config("config file", e.message().to_string()))?
        }
        None => FileConfig::default(),
    };
    if let Some(k) = from_file.problem_kind {
        if k != kind {
            return Err(LabError::config(
                "problem_kind",
                format!("file declares `{k}` but the command runs `{kind}`"),
            ));
        }
    }

    let mut cfg = SweepConfig::full(kind, 0);
    if let Some(levels) = from_file.levels {
        cfg.levels = match levels {
            Levels::List(v) => v,
            Levels::Spec(s) => parse_levels(&s)?,
        };
    }
    if let Some(t) = from_file.topologies {
        cfg.topologies = t.iter().map(|s| parse_topology(s)).collect::<Result<_>>()?;
    }
    set(&mut cfg.n, from_file.n);
    set(&mut cfg.instances_per_level, from_file.instances_per_level);
    set(&mut cfg.reps_per_instance, from_file.reps_per_instance);
    set(&mut cfg.n_agents, from_file.n_agents);
    set(&mut cfg.rounds, from_file.rounds);

    if let Some(levels) = &flags.levels {
        cfg.levels = levels.clone();
    }
    if let Some(t) = &flags.topologies {
        cfg.topologies = t.clone();
    }
    set(&mut cfg.n, flags.n);
    set(&mut cfg.instances_per_level, flags.instances_per_level);
    set(&mut cfg.reps_per_instance, flags.reps_per_instance);
    set(&mut cfg.n_agents, flags.n_agents);
    set(&mut cfg.rounds, flags.rounds);

    cfg.master_seed = flags.master_seed.or(from_file.master_seed).ok_or_else(|| {
        LabError::config(
            "master_seed",
            "a seed is required (--seed or `master_seed`)",
        )
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn set(slot: &mut usize, value: Option<usize>) {
    if let Some(v) = value {
        *slot = v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    fn seeded(seed: u64) -> Overrides {
        Overrides {
            master_seed: Some(seed),
            ..Overrides::default()
        }
    }

    #[test]
    fn range_shorthand() {
        assert_eq!(parse_levels("0..19").unwrap().len(), 20);
        assert_eq!(parse_levels("0..2,8").unwrap(), vec![0, 1, 2, 8]);
        assert_eq!(parse_levels("5").unwrap(), vec![5]);
        assert!(parse_levels("3..1").is_err());
        assert!(parse_levels("x").is_err());
        assert!(parse_levels("").is_err());
    }

    #[test]
    fn empty_file_gives_default_grid() {
        let f = file("");
        let cfg = parse_config(ProblemKind::Nk, Some(f.path()), &seeded(9)).unwrap();
        assert_eq!(cfg, SweepConfig::full(ProblemKind::Nk, 9));
        assert_eq!(cfg.n, 20);
        assert_eq!(cfg.levels, (0..=19).collect::<Vec<_>>());
        assert_eq!(
            (cfg.instances_per_level, cfg.reps_per_instance, cfg.n_agents),
            (100, 100, 100)
        );
    }

    #[test]
    fn flags_override_file() {
        let f = file(
            "levels = [1, 2]\nn = 12\ninstances_per_level = 3\nreps_per_instance = 4\n\
             topologies = [\"complete\"]\nn_agents = 10\nrounds = 7\nmaster_seed = 5\n",
        );
        let from_file =
            parse_config(ProblemKind::Nk, Some(f.path()), &Overrides::default()).unwrap();
        assert_eq!(from_file.levels, vec![1, 2]);
        assert_eq!(from_file.n, 12);
        assert_eq!(from_file.topologies, vec![Topology::Complete]);
        assert_eq!(from_file.master_seed, 5);

        let flags = Overrides {
            levels: Some(vec![3]),
            rounds: Some(50),
            master_seed: Some(6),
            ..Overrides::default()
        };
        let merged = parse_config(ProblemKind::Nk, Some(f.path()), &flags).unwrap();
        assert_eq!(merged.levels, vec![3]);
        assert_eq!(merged.rounds, 50);
        assert_eq!(merged.master_seed, 6);
        assert_eq!(merged.n_agents, 10);
    }

    #[test]
    fn rejects_unknown_keys_and_missing_seed() {
        let f = file("agents = 3\n");
        let err = parse_config(ProblemKind::Nk, Some(f.path()), &seeded(1)).unwrap_err();
        assert!(err.to_string().contains("agents"), "{err}");
        let err = parse_config(ProblemKind::Nk, None, &Overrides::default()).unwrap_err();
        assert!(matches!(
            err,
            LabError::Config {
                field: "master_seed",
                ..
            }
        ));
    }

    #[test]
    fn rejects_out_of_range_levels() {
        let flags = Overrides {
            n: Some(10),
            levels: Some(vec![15]),
            ..seeded(1)
        };
        assert!(matches!(
            parse_config(ProblemKind::Nk, None, &flags),
            Err(LabError::Config {
                field: "levels",
                ..
            })
        ));
    }

    #[test]
    fn problem_kind_must_match() {
        let f = file("problem_kind = \"tsp\"\nlevels = \"1..5\"\n");
        assert!(parse_config(ProblemKind::Nk, Some(f.path()), &seeded(1)).is_err());
        let cfg = parse_config(ProblemKind::Tsp, Some(f.path()), &seeded(1)).unwrap();
        assert_eq!(cfg.levels, vec![1, 2, 3, 4, 5]);
    }
}
