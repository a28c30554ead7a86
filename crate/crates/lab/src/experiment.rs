//! The sweep harness.
//!
//! A sweep visits every cell of the `(level, instance, rep, topology)` grid.
//! Each `(level, instance)` pair is one work unit: its problem instance is
//! generated and solved exactly once, then all of its runs execute against
//! that shared instance and oracle. Units run in parallel on a dedicated
//! thread pool; results come back in grid order regardless of scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use pps_core::nk::{Genotype, NkLandscape, NkProblem, MAX_ENUMERATION_BITS};
use pps_core::seed::{instance_seed, mix, run_seed};
use pps_core::tsp::{Tour, TspInstance, TspProblem, MAX_HELD_KARP_CITIES};
use pps_core::{run_once, Network, OptimumRecord, RunConfig, RunTrace, SimRng, Topology};
use rand::SeedableRng;
use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Nk,
    Tsp,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Nk => "nk",
            ProblemKind::Tsp => "tsp",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nk" => Ok(ProblemKind::Nk),
            "tsp" => Ok(ProblemKind::Tsp),
            other => Err(LabError::config(
                "problem_kind",
                format!("unknown problem `{other}`, expected `nk` or `tsp`"),
            )),
        }
    }
}

/// Grid definition of one sweep.
///
/// `levels` are `k` values for NK landscapes and city counts for the TSP.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub problem_kind: ProblemKind,
    pub levels: Vec<usize>,
    /// Genotype length of NK landscapes; unused for the TSP.
    pub n: usize,
    pub instances_per_level: usize,
    pub reps_per_instance: usize,
    pub topologies: Vec<Topology>,
    pub n_agents: usize,
    pub rounds: usize,
    pub master_seed: u64,
}

impl SweepConfig {
    /// Full grid: 100 instances per level, 100 repetitions each, 100 agents.
    pub fn full(problem_kind: ProblemKind, master_seed: u64) -> Self {
        let levels = match problem_kind {
            ProblemKind::Nk => (0..=19).collect(),
            ProblemKind::Tsp => (1..=20).collect(),
        };
        Self {
            problem_kind,
            levels,
            n: 20,
            instances_per_level: 100,
            reps_per_instance: 100,
            topologies: Topology::ALL.to_vec(),
            n_agents: RunConfig::DEFAULT_AGENTS,
            rounds: RunConfig::DEFAULT_ROUNDS,
            master_seed,
        }
    }

    /// Reduced grid that still resolves the shape of the influence curve:
    /// 30 instances x 30 repetitions on a coarse level grid.
    pub fn desk(problem_kind: ProblemKind, master_seed: u64) -> Self {
        let levels = match problem_kind {
            ProblemKind::Nk => vec![0, 3, 5, 8, 12, 19],
            ProblemKind::Tsp => vec![1, 2, 3, 5, 8, 12, 16, 20],
        };
        Self {
            levels,
            instances_per_level: 30,
            reps_per_instance: 30,
            ..Self::full(problem_kind, master_seed)
        }
    }

    pub fn run_config(&self, seed: u64) -> RunConfig {
        RunConfig {
            n_agents: self.n_agents,
            rounds: self.rounds,
            seed,
        }
    }

    pub fn cells(&self) -> usize {
        self.levels.len()
            * self.instances_per_level
            * self.reps_per_instance
            * self.topologies.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(LabError::config("levels", "at least one level is required"));
        }
        let distinct: BTreeSet<_> = self.levels.iter().collect();
        if distinct.len() != self.levels.len() {
            return Err(LabError::config("levels", "levels must be distinct"));
        }
        match self.problem_kind {
            ProblemKind::Nk => {
                if self.n == 0 {
                    return Err(LabError::config("n", "must be at least 1"));
                }
                if self.n > MAX_ENUMERATION_BITS {
                    return Err(pps_core::Error::OracleInfeasible {
                        what: "n",
                        value: self.n,
                        limit: MAX_ENUMERATION_BITS,
                    }
                    .into());
                }
                if let Some(&k) = self.levels.iter().find(|&&k| k >= self.n) {
                    return Err(LabError::config(
                        "levels",
                        format!("k = {k} exceeds n - 1 = {}", self.n - 1),
                    ));
                }
            }
            ProblemKind::Tsp => {
                if self.levels.contains(&0) {
                    return Err(LabError::config("levels", "city counts start at 1"));
                }
                if let Some(&m) = self.levels.iter().find(|&&m| m > MAX_HELD_KARP_CITIES) {
                    return Err(pps_core::Error::OracleInfeasible {
                        what: "cities",
                        value: m,
                        limit: MAX_HELD_KARP_CITIES,
                    }
                    .into());
                }
            }
        }
        if self.instances_per_level == 0 {
            return Err(LabError::config(
                "instances_per_level",
                "must be at least 1",
            ));
        }
        if self.reps_per_instance == 0 {
            return Err(LabError::config("reps_per_instance", "must be at least 1"));
        }
        if self.topologies.is_empty() {
            return Err(LabError::config(
                "topologies",
                "at least one topology is required",
            ));
        }
        let distinct: BTreeSet<_> = self.topologies.iter().collect();
        if distinct.len() != self.topologies.len() {
            return Err(LabError::config(
                "topologies",
                "topologies must be distinct",
            ));
        }
        if self.n_agents < 2 {
            return Err(LabError::config("n_agents", "must be at least 2"));
        }
        if self.rounds == 0 {
            return Err(LabError::config("rounds", "must be at least 1"));
        }
        Ok(())
    }
}

/// Outcome of one cell of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem_kind: ProblemKind,
    pub level: usize,
    pub instance: usize,
    pub rep: usize,
    pub topology: Topology,
    pub success: bool,
    pub final_mean_score: f64,
    pub final_best_score: f64,
    pub first_success_round: Option<usize>,
}

/// Coordinates and provenance of a cell, handed to sweep callbacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub problem_kind: ProblemKind,
    pub level: usize,
    pub instance: usize,
    pub rep: usize,
    pub topology: Topology,
    /// Content hash of the problem instance the run searched.
    pub instance_checksum: u64,
}

impl Cell {
    pub fn record(&self, trace: &RunTrace) -> RunRecord {
        RunRecord {
            problem_kind: self.problem_kind,
            level: self.level,
            instance: self.instance,
            rep: self.rep,
            topology: self.topology,
            success: trace.success,
            final_mean_score: trace.final_mean_score(),
            final_best_score: trace.final_best_score(),
            first_success_round: trace.first_success_round,
        }
    }
}

/// A generated problem instance with its exact optimum.
pub enum SolvedInstance {
    Nk {
        landscape: NkLandscape,
        optimum: OptimumRecord<Genotype>,
    },
    Tsp {
        instance: TspInstance,
        optimum: OptimumRecord<Tour>,
    },
}

impl SolvedInstance {
    /// Generates and solves instance `instance` of `level`. The seed does not
    /// depend on the topology, so every topology sees the same instance.
    pub fn generate(cfg: &SweepConfig, level: usize, instance: usize) -> Result<Self> {
        let seed = instance_seed(cfg.master_seed, level as u64, instance as u64);
        let mut rng = SimRng::seed_from_u64(seed);
        Ok(match cfg.problem_kind {
            ProblemKind::Nk => {
                let landscape = NkLandscape::generate(cfg.n, level, &mut rng)?;
                let optimum = landscape.global_optima()?;
                SolvedInstance::Nk { landscape, optimum }
            }
            ProblemKind::Tsp => {
                let instance = TspInstance::generate(level, &mut rng)?;
                let optimum = instance.held_karp()?;
                SolvedInstance::Tsp { instance, optimum }
            }
        })
    }

    pub fn best_score(&self) -> f64 {
        match self {
            SolvedInstance::Nk { optimum, .. } => optimum.best_score,
            SolvedInstance::Tsp { optimum, .. } => optimum.best_score,
        }
    }

    pub fn checksum(&self) -> u64 {
        match self {
            SolvedInstance::Nk { landscape, .. } => nk_checksum(landscape),
            SolvedInstance::Tsp { instance, .. } => tsp_checksum(instance),
        }
    }

    pub fn run(&self, net: &Network, cfg: &RunConfig) -> Result<RunTrace> {
        Ok(match self {
            SolvedInstance::Nk { landscape, optimum } => {
                run_once(&NkProblem::new(landscape, optimum), net, cfg)?
            }
            SolvedInstance::Tsp { instance, optimum } => {
                run_once(&TspProblem::new(instance, optimum), net, cfg)?
            }
        })
    }
}

pub fn nk_checksum(l: &NkLandscape) -> u64 {
    let mut h = mix(l.n() as u64 ^ ((l.k() as u64) << 32));
    for i in 0..l.n() {
        for &p in l.partners(i) {
            h = mix(h ^ p as u64);
        }
        for v in l.table(i) {
            h = mix(h ^ v.to_bits());
        }
    }
    h
}

pub fn tsp_checksum(t: &TspInstance) -> u64 {
    t.coords().iter().fold(mix(t.cities() as u64), |h, (x, y)| {
        mix(mix(h ^ x.to_bits()) ^ y.to_bits())
    })
}

/// Runs the full grid and maps every cell through `f`.
///
/// Results are ordered by `(level, instance, rep, topology)`, following the
/// order of `cfg.levels` and `cfg.topologies`. `workers = 0` uses one worker
/// per available core.
pub fn sweep_map<T, F>(cfg: &SweepConfig, workers: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Cell, RunTrace) -> T + Sync,
{
    cfg.validate()?;
    let networks: Vec<(Topology, Network)> = cfg
        .topologies
        .iter()
        .map(|&t| Ok((t, t.build(cfg.n_agents)?)))
        .collect::<Result<_>>()?;
    let units: Vec<(usize, usize)> = cfg
        .levels
        .iter()
        .flat_map(|&level| (0..cfg.instances_per_level).map(move |i| (level, i)))
        .collect();

    let run_unit = |&(level, instance): &(usize, usize)| -> Result<Vec<T>> {
        let solved = SolvedInstance::generate(cfg, level, instance)?;
        let checksum = solved.checksum();
        let mut out = Vec::with_capacity(cfg.reps_per_instance * networks.len());
        for rep in 0..cfg.reps_per_instance {
            for (topology, net) in &networks {
                let seed = run_seed(
                    cfg.master_seed,
                    level as u64,
                    instance as u64,
                    rep as u64,
                    topology.id(),
                );
                let trace = solved.run(net, &cfg.run_config(seed))?;
                let cell = Cell {
                    problem_kind: cfg.problem_kind,
                    level,
                    instance,
                    rep,
                    topology: *topology,
                    instance_checksum: checksum,
                };
                out.push(f(&cell, trace));
            }
        }
        Ok(out)
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool construction");
    let per_unit: Vec<Vec<T>> =
        pool.install(|| units.par_iter().map(run_unit).collect::<Result<_>>())?;
    Ok(per_unit.into_iter().flatten().collect())
}

/// Runs the full grid and returns one record per cell in grid order.
pub fn run_sweep(cfg: &SweepConfig, workers: usize) -> Result<Vec<RunRecord>> {
    sweep_map(cfg, workers, |cell, trace| cell.record(&trace))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem_kind: ProblemKind,
    pub level: usize,
    pub topology: Topology,
    pub successes: usize,
    pub runs: usize,
    pub success_probability: f64,
    /// Final population mean score, averaged over the cell group's runs.
    pub mean_final_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceRow {
    pub problem_kind: ProblemKind,
    pub level: usize,
    /// Success probability on the linear network minus that on the complete one.
    pub influence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    /// One row per `(level, topology)`, sorted by level then topology.
    pub rows: Vec<SummaryRow>,
    /// One row per level, present only when both topologies were swept.
    pub influence: Vec<InfluenceRow>,
}

impl SweepSummary {
    pub fn row(&self, level: usize, topology: Topology) -> Option<&SummaryRow> {
        self.rows
            .iter()
            .find(|r| r.level == level && r.topology == topology)
    }

    pub fn success_probability(&self, level: usize, topology: Topology) -> Option<f64> {
        self.row(level, topology).map(|r| r.success_probability)
    }

    pub fn influence_at(&self, level: usize) -> Option<f64> {
        self.influence
            .iter()
            .find(|r| r.level == level)
            .map(|r| r.influence)
    }

    pub fn levels(&self) -> Vec<usize> {
        self.influence.iter().map(|r| r.level).collect()
    }
}

/// Success probabilities per `(level, topology)` and network influence per
/// level.
///
/// The records must form a complete grid: every combination of the observed
/// levels, instances, repetitions and topologies exactly once. Record order
/// does not matter.
pub fn aggregate(records: &[RunRecord]) -> Result<SweepSummary> {
    type Key = (ProblemKind, usize, Topology, usize, usize);
    let mut cells: BTreeMap<Key, &RunRecord> = BTreeMap::new();
    let mut duplicates = Vec::new();
    for r in records {
        let key = (r.problem_kind, r.level, r.topology, r.instance, r.rep);
        if cells.insert(key, r).is_some() {
            duplicates.push(key);
        }
    }
    if let Some(&(kind, level, topology, instance, rep)) = duplicates.first() {
        return Err(LabError::IncompleteGrid(format!(
            "duplicate record for {kind} level {level} instance {instance} rep {rep} topology {topology}"
        )));
    }

    let kinds: BTreeSet<_> = records.iter().map(|r| r.problem_kind).collect();
    let levels: BTreeSet<_> = records.iter().map(|r| r.level).collect();
    let topologies: BTreeSet<_> = records.iter().map(|r| r.topology).collect();
    let instances: BTreeSet<_> = records.iter().map(|r| r.instance).collect();
    let reps: BTreeSet<_> = records.iter().map(|r| r.rep).collect();
    if kinds.len() > 1 {
        return Err(LabError::IncompleteGrid(
            "records mix several problem kinds".to_string(),
        ));
    }

    let mut missing = Vec::new();
    let mut rows = Vec::new();
    for &kind in &kinds {
        for &level in &levels {
            for &topology in &topologies {
                let mut successes = 0;
                let mut runs = 0;
                let mut score_sum = 0.0;
                for &instance in &instances {
                    for &rep in &reps {
                        match cells.get(&(kind, level, topology, instance, rep)) {
                            Some(r) => {
                                runs += 1;
                                successes += r.success as usize;
                                score_sum += r.final_mean_score;
                            }
                            None => missing.push(format!(
                                "(level {level}, instance {instance}, rep {rep}, {topology})"
                            )),
                        }
                    }
                }
                if runs > 0 {
                    rows.push(SummaryRow {
                        problem_kind: kind,
                        level,
                        topology,
                        successes,
                        runs,
                        success_probability: successes as f64 / runs as f64,
                        mean_final_score: score_sum / runs as f64,
                    });
                }
            }
        }
    }
    if !missing.is_empty() {
        let shown = missing.len().min(10);
        let mut msg = missing[..shown].join(", ");
        if missing.len() > shown {
            msg.push_str(&format!(" and {} more", missing.len() - shown));
        }
        return Err(LabError::IncompleteGrid(msg));
    }

    let mut summary = SweepSummary {
        rows,
        influence: Vec::new(),
    };
    if topologies.contains(&Topology::Linear) && topologies.contains(&Topology::Complete) {
        for &kind in &kinds {
            for &level in &levels {
                let lin = summary.success_probability(level, Topology::Linear);
                let com = summary.success_probability(level, Topology::Complete);
                if let (Some(lin), Some(com)) = (lin, com) {
                    summary.influence.push(InfluenceRow {
                        problem_kind: kind,
                        level,
                        influence: lin - com,
                    });
                }
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(kind: ProblemKind) -> SweepConfig {
        SweepConfig {
            problem_kind: kind,
            levels: vec![0],
            n: 10,
            instances_per_level: 1,
            reps_per_instance: 1,
            topologies: vec![Topology::Complete],
            n_agents: 10,
            rounds: 5,
            master_seed: 1,
        }
    }

    fn record(
        level: usize,
        instance: usize,
        rep: usize,
        topology: Topology,
        success: bool,
    ) -> RunRecord {
        RunRecord {
            problem_kind: ProblemKind::Nk,
            level,
            instance,
            rep,
            topology,
            success,
            final_mean_score: 0.5,
            final_best_score: 0.7,
            first_success_round: success.then_some(3),
        }
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(run_sweep(&tiny(ProblemKind::Nk), 1).unwrap().len(), 1);
        let cfg = SweepConfig {
            levels: vec![0, 5],
            instances_per_level: 2,
            reps_per_instance: 3,
            topologies: Topology::ALL.to_vec(),
            ..tiny(ProblemKind::Nk)
        };
        let recs = run_sweep(&cfg, 2).unwrap();
        assert_eq!(recs.len(), 24);
        assert_eq!(cfg.cells(), 24);
        let order: Vec<_> = recs
            .iter()
            .map(|r| (r.level, r.instance, r.rep, r.topology))
            .collect();
        let mut sorted = order.clone();
        sorted.sort();
        assert_eq!(order, sorted);
    }

    #[test]
    fn single_city_always_succeeds() {
        let cfg = SweepConfig {
            levels: vec![1, 2, 3],
            instances_per_level: 3,
            reps_per_instance: 2,
            topologies: Topology::ALL.to_vec(),
            ..tiny(ProblemKind::Tsp)
        };
        let recs = run_sweep(&cfg, 1).unwrap();
        assert!(recs
            .iter()
            .all(|r| r.success && r.first_success_round == Some(0)));
    }

    #[test]
    fn validation_errors() {
        let bad_k = SweepConfig {
            levels: vec![10],
            ..tiny(ProblemKind::Nk)
        };
        assert!(matches!(
            bad_k.validate(),
            Err(LabError::Config {
                field: "levels",
                ..
            })
        ));
        let big_n = SweepConfig {
            n: 26,
            ..tiny(ProblemKind::Nk)
        };
        assert_eq!(big_n.validate().unwrap_err().exit_code(), 3);
        let big_m = SweepConfig {
            levels: vec![21],
            ..tiny(ProblemKind::Tsp)
        };
        assert_eq!(big_m.validate().unwrap_err().exit_code(), 3);
        let zero_m = SweepConfig {
            levels: vec![0],
            ..tiny(ProblemKind::Tsp)
        };
        assert!(zero_m.validate().is_err());
        let no_reps = SweepConfig {
            reps_per_instance: 0,
            ..tiny(ProblemKind::Nk)
        };
        assert!(no_reps.validate().is_err());
        let dup = SweepConfig {
            topologies: vec![Topology::Linear, Topology::Linear],
            ..tiny(ProblemKind::Nk)
        };
        assert!(dup.validate().is_err());
        assert!(SweepConfig::full(ProblemKind::Nk, 0).validate().is_ok());
        assert!(SweepConfig::full(ProblemKind::Tsp, 0).validate().is_ok());
        assert!(SweepConfig::desk(ProblemKind::Tsp, 0).validate().is_ok());
    }

    #[test]
    fn aggregate_arithmetic() {
        let mut recs = Vec::new();
        for rep in 0..100 {
            recs.push(record(4, 0, rep, Topology::Linear, rep < 30));
            recs.push(record(4, 0, rep, Topology::Complete, rep < 10));
        }
        let s = aggregate(&recs).unwrap();
        assert_eq!(s.success_probability(4, Topology::Linear), Some(0.3));
        assert_eq!(s.success_probability(4, Topology::Complete), Some(0.1));
        assert!((s.influence_at(4).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(s.rows.len(), 2);
    }

    #[test]
    fn all_successes_no_influence() {
        let recs: Vec<_> = Topology::ALL
            .iter()
            .flat_map(|&t| (0..4).map(move |rep| record(0, rep % 2, rep / 2, t, true)))
            .collect();
        let s = aggregate(&recs).unwrap();
        assert_eq!(s.success_probability(0, Topology::Linear), Some(1.0));
        assert_eq!(s.success_probability(0, Topology::Complete), Some(1.0));
        assert_eq!(s.influence_at(0), Some(0.0));
    }

    #[test]
    fn aggregate_reports_missing_cells() {
        let recs = vec![
            record(0, 0, 0, Topology::Linear, true),
            record(0, 0, 1, Topology::Linear, true),
            record(0, 0, 0, Topology::Complete, true),
        ];
        match aggregate(&recs) {
            Err(LabError::IncompleteGrid(msg)) => {
                assert!(msg.contains("rep 1, complete"), "{msg}")
            }
            other => panic!("expected incomplete grid, got {other:?}"),
        }
        let dup = vec![record(0, 0, 0, Topology::Linear, true); 2];
        assert!(aggregate(&dup).is_err());
    }
}
