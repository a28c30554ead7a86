//! Command-line interface.
//!
//! Instances built from `--level` and `--seed` use the same derivation as
//! instance 0 of that level in a sweep, so `gen`, `oracle` and `run` can be
//! used to inspect the first cell of any sweep.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use pps_core::nk::Genotype;
use pps_core::seed::{instance_seed, run_seed};
use pps_core::tsp::Tour;
use pps_core::{run_once, NkProblem, OptimumRecord, RunConfig, SimRng, Topology, TspProblem};
use rand::SeedableRng;

use crate::config::{parse_config, parse_levels, parse_topologies, Overrides};
use crate::error::{LabError, Result};
use crate::experiment::{aggregate, run_sweep, ProblemKind, SweepConfig};
use crate::format::{load_instance, save_instance, Instance};
use crate::numfmt::sig17;
use crate::report;

#[derive(Debug, Parser)]
#[command(
    name = "pps",
    version,
    about = "Networked explore/exploit search on NK landscapes and TSP instances"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep NK landscapes over k and write records, summary and influence CSVs
    NkSweep(NkSweepArgs),
    /// Sweep TSP instances over the city count and write records, summary and influence CSVs
    TspSweep(TspSweepArgs),
    /// Execute one seeded run and write its per-round trace
    Run(RunArgs),
    /// Print the exact optimum of an instance
    Oracle(OracleArgs),
    /// Print node count, edge count and average path length of a topology
    NetInfo(NetInfoArgs),
    /// Generate an instance and write it to a file
    Gen(GenArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Key-value (TOML) file with sweep settings; flags take precedence
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Complexity levels, e.g. `0..19` or `0,3,5`
    #[arg(long, value_name = "SPEC")]
    pub levels: Option<String>,
    /// Random instances per level
    #[arg(long, value_name = "COUNT")]
    pub instances: Option<usize>,
    /// Repetitions per instance and topology
    #[arg(long, value_name = "COUNT")]
    pub reps: Option<usize>,
    /// Comma-separated topologies (`linear`, `complete`)
    #[arg(long, value_name = "LIST")]
    pub topologies: Option<String>,
    /// Agents per population
    #[arg(long, value_name = "COUNT")]
    pub agents: Option<usize>,
    /// Rounds per run
    #[arg(long, value_name = "COUNT")]
    pub rounds: Option<usize>,
    /// Master seed (required here or as `master_seed` in the config file)
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, value_name = "COUNT", default_value_t = 0)]
    pub workers: usize,
    /// Output directory for records.csv, summary.csv and influence.csv
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct NkSweepArgs {
    /// Genotype length
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TspSweepArgs {
    #[command(flatten)]
    pub sweep: SweepArgs,
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// Problem family
    #[arg(long, value_name = "nk|tsp", value_parser = parse_problem)]
    pub problem: Option<ProblemKind>,
    /// k for NK landscapes, city count for the TSP
    #[arg(long)]
    pub level: Option<usize>,
    /// Genotype length (NK only)
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Instance file written by `gen`; replaces --problem/--level/--n
    #[arg(long, value_name = "FILE", conflicts_with_all = ["problem", "level", "n"])]
    pub instance: Option<PathBuf>,
    #[command(flatten)]
    pub generate: InstanceArgs,
    /// Communication topology
    #[arg(long, value_parser = parse_topology)]
    pub topology: Topology,
    /// Agents per population
    #[arg(long, default_value_t = RunConfig::DEFAULT_AGENTS)]
    pub agents: usize,
    /// Rounds to simulate
    #[arg(long, default_value_t = RunConfig::DEFAULT_ROUNDS)]
    pub rounds: usize,
    /// Seed for the instance (when generated) and the run
    #[arg(long, value_name = "U64")]
    pub seed: u64,
    /// Trace CSV destination; standard output when omitted
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    /// Instance file written by `gen`; replaces --problem/--level/--n/--seed
    #[arg(long, value_name = "FILE", conflicts_with_all = ["problem", "level", "n", "seed"])]
    pub instance: Option<PathBuf>,
    #[command(flatten)]
    pub generate: InstanceArgs,
    /// Seed the instance is generated from
    #[arg(long, value_name = "U64", required_unless_present = "instance")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub generate: InstanceArgs,
    /// Seed the instance is generated from
    #[arg(long, value_name = "U64")]
    pub seed: u64,
    /// Destination file
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct NetInfoArgs {
    /// `linear` or `complete`
    #[arg(long, value_parser = parse_topology)]
    pub topology: Topology,
    /// Number of nodes
    #[arg(long)]
    pub nodes: usize,
}

fn parse_topology(s: &str) -> std::result::Result<Topology, String> {
    s.parse().map_err(|_| format!("unknown topology `{s}`"))
}

fn parse_problem(s: &str) -> std::result::Result<ProblemKind, String> {
    s.parse().map_err(|e: LabError| e.to_string())
}

impl SweepArgs {
    pub fn overrides(&self, n: Option<usize>) -> Result<Overrides> {
        Ok(Overrides {
            levels: self.levels.as_deref().map(parse_levels).transpose()?,
            n,
            instances_per_level: self.instances,
            reps_per_instance: self.reps,
            topologies: self
                .topologies
                .as_deref()
                .map(parse_topologies)
                .transpose()?,
            n_agents: self.agents,
            rounds: self.rounds,
            master_seed: self.seed,
        })
    }

    pub fn resolve(&self, kind: ProblemKind, n: Option<usize>) -> Result<SweepConfig> {
        parse_config(kind, self.config.as_deref(), &self.overrides(n)?)
    }
}

impl InstanceArgs {
    /// Generates instance 0 of the requested level from `seed`.
    fn generate(&self, seed: u64) -> Result<Instance> {
        let kind = self.problem.ok_or_else(|| {
            LabError::config("problem", "--problem is required without --instance")
        })?;
        let level = self
            .level
            .ok_or_else(|| LabError::config("level", "--level is required without --instance"))?;
        let mut rng = SimRng::seed_from_u64(instance_seed(seed, level as u64, 0));
        Ok(match kind {
            ProblemKind::Nk => {
                let n = self.n.unwrap_or(20);
                Instance::Nk(pps_core::NkLandscape::generate(n, level, &mut rng)?)
            }
            ProblemKind::Tsp => {
                if self.n.is_some() {
                    return Err(LabError::config("n", "--n only applies to NK landscapes"));
                }
                Instance::Tsp(pps_core::TspInstance::generate(level, &mut rng)?)
            }
        })
    }
}

fn instance_level(instance: &Instance) -> usize {
    match instance {
        Instance::Nk(l) => l.k(),
        Instance::Tsp(t) => t.cities(),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(LabError::io(dir))
}

fn run_sweep_command(cfg: &SweepConfig, args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let records = run_sweep(cfg, args.workers)?;
    let summary = aggregate(&records)?;
    ensure_dir(&args.out)?;
    let records_path = args.out.join("records.csv");
    let summary_path = args.out.join("summary.csv");
    let influence_path = args.out.join("influence.csv");
    report::to_file(&records_path, |f| {
        report::write_records(BufWriter::new(f), &records)
    })?;
    report::to_file(&summary_path, |f| report::write_summary(f, &summary))?;
    report::to_file(&influence_path, |f| report::write_influence(f, &summary))?;
    let stdout = |e| LabError::io("<stdout>")(e);
    writeln!(out, "{} runs", records.len()).map_err(stdout)?;
    for row in &summary.influence {
        writeln!(
            out,
            "level {:>2}  influence {}",
            row.level,
            sig17(row.influence)
        )
        .map_err(stdout)?;
    }
    Ok(())
}

fn print_nk_optimum(out: &mut dyn Write, rec: &OptimumRecord<Genotype>) -> std::io::Result<()> {
    writeln!(out, "problem: nk")?;
    writeln!(out, "best_score: {}", sig17(rec.best_score))?;
    for g in &rec.optima {
        writeln!(out, "optimum: {g}")?;
    }
    Ok(())
}

fn print_tsp_optimum(out: &mut dyn Write, rec: &OptimumRecord<Tour>) -> std::io::Result<()> {
    writeln!(out, "problem: tsp")?;
    writeln!(out, "best_score: {}", sig17(rec.best_score))?;
    writeln!(out, "length: {}", sig17(-rec.best_score))?;
    for t in &rec.optima {
        let cities: Vec<String> = t.order().iter().map(|c| c.to_string()).collect();
        writeln!(out, "tour: {}", cities.join(" "))?;
    }
    Ok(())
}

/// Executes a parsed invocation, writing human-readable output to `out`.
pub fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let stdout = |e| LabError::io("<stdout>")(e);
    match cli.command {
        Command::NkSweep(args) => {
            let cfg = args.sweep.resolve(ProblemKind::Nk, args.n)?;
            run_sweep_command(&cfg, &args.sweep, out)
        }
        Command::TspSweep(args) => {
            let cfg = args.sweep.resolve(ProblemKind::Tsp, None)?;
            run_sweep_command(&cfg, &args.sweep, out)
        }
        Command::Run(args) => {
            let instance = match &args.instance {
                Some(path) => load_instance(path)?,
                None => args.generate.generate(args.seed)?,
            };
            let net = args.topology.build(args.agents)?;
            let level = instance_level(&instance) as u64;
            let cfg = RunConfig {
                n_agents: args.agents,
                rounds: args.rounds,
                seed: run_seed(args.seed, level, 0, 0, args.topology.id()),
            };
            cfg.validate()?;
            let trace = match &instance {
                Instance::Nk(l) => {
                    let opt = l.global_optima()?;
                    run_once(&NkProblem::new(l, &opt), &net, &cfg)?
                }
                Instance::Tsp(t) => {
                    let opt = t.held_karp()?;
                    run_once(&TspProblem::new(t, &opt), &net, &cfg)?
                }
            };
            match &args.out {
                Some(path) => report::to_file(path, |f| report::write_trace(f, &trace))?,
                None => report::write_trace(&mut *out, &trace).map_err(|source| LabError::Csv {
                    path: "<stdout>".into(),
                    source,
                })?,
            }
            let first = trace
                .first_success_round
                .map(|r| r.to_string())
                .unwrap_or_else(|| "none".to_string());
            eprintln!("success: {} (first success round: {first})", trace.success);
            Ok(())
        }
        Command::Oracle(args) => {
            let instance = match (&args.instance, args.seed) {
                (Some(path), _) => load_instance(path)?,
                (None, Some(seed)) => args.generate.generate(seed)?,
                (None, None) => {
                    return Err(LabError::config(
                        "seed",
                        "--seed is required without --instance",
                    ))
                }
            };
            match &instance {
                Instance::Nk(l) => print_nk_optimum(out, &l.global_optima()?),
                Instance::Tsp(t) => print_tsp_optimum(out, &t.held_karp()?),
            }
            .map_err(stdout)
        }
        Command::NetInfo(args) => {
            let net = args.topology.build(args.nodes)?;
            let apl = net.average_path_length()?;
            writeln!(out, "nodes: {}", net.nodes()).map_err(stdout)?;
            writeln!(out, "edges: {}", net.edges()).map_err(stdout)?;
            writeln!(out, "average_path_length: {apl:?}").map_err(stdout)
        }
        Command::Gen(args) => {
            let instance = args.generate.generate(args.seed)?;
            save_instance(&args.out, &instance, &format!("seed={}", args.seed))
        }
    }
}
