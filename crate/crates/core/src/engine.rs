//! Round-based explore/exploit dynamics.
//!
//! Rounds are synchronous: every decision reads the population as it was at
//! the start of the round and all updates land together at the end. An agent
//! whose best neighbor (highest score, lowest index on ties) is strictly
//! better copies that neighbor's solution. Otherwise it draws one mutation of
//! its own solution and keeps it only if strictly better. Random draws are
//! consumed in agent-index order, and agents that copy draw nothing.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::network::Network;
use crate::SimRng;

/// A search problem as seen by the engine. Higher fitness is better.
pub trait Problem {
    type Solution: Clone;

    fn random_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Solution;

    /// Must be a pure function of the solution.
    fn fitness(&self, solution: &Self::Solution) -> f64;

    fn mutate<R: Rng + ?Sized>(&self, solution: &Self::Solution, rng: &mut R) -> Self::Solution;

    /// Whether the solution is globally optimal, according to the problem's
    /// precomputed oracle.
    fn is_optimal(&self, solution: &Self::Solution) -> bool;
}

#[derive(Debug, Clone, PartialEq)]
pub struct AgentState<S> {
    pub solution: S,
    /// Cached fitness of `solution`.
    pub score: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub n_agents: usize,
    pub rounds: usize,
    pub seed: u64,
}

impl RunConfig {
    pub const DEFAULT_AGENTS: usize = 100;
    pub const DEFAULT_ROUNDS: usize = 100;

    pub fn new(seed: u64) -> Self {
        Self {
            n_agents: Self::DEFAULT_AGENTS,
            rounds: Self::DEFAULT_ROUNDS,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_agents < 2 {
            return Err(Error::OutOfRange {
                what: "agents",
                value: self.n_agents,
                expected: "at least 2",
            });
        }
        if self.rounds < 1 {
            return Err(Error::OutOfRange {
                what: "rounds",
                value: self.rounds,
                expected: "at least 1",
            });
        }
        Ok(())
    }
}

/// Population metrics of one run. Index 0 is the initial population; index
/// `r` is the state after `r` rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub mean_score: Vec<f64>,
    pub best_score: Vec<f64>,
    /// Some agent holds an optimal solution after the last round.
    pub success: bool,
    /// Earliest recorded round at which some agent held an optimal solution.
    pub first_success_round: Option<usize>,
}

impl RunTrace {
    pub fn rounds(&self) -> usize {
        self.mean_score.len() - 1
    }

    pub fn final_mean_score(&self) -> f64 {
        *self
            .mean_score
            .last()
            .expect("trace holds the initial round")
    }

    pub fn final_best_score(&self) -> f64 {
        *self
            .best_score
            .last()
            .expect("trace holds the initial round")
    }
}

/// What an agent did during one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// Copied the solution of the given neighbor.
    Copied { from: usize },
    /// Tried a mutation; `adopted` when it was strictly better.
    Explored { adopted: bool },
}

pub fn init_population<P, R>(
    problem: &P,
    n_agents: usize,
    rng: &mut R,
) -> Vec<AgentState<P::Solution>>
where
    P: Problem,
    R: Rng + ?Sized,
{
    assert!(n_agents >= 2, "a population needs at least two agents");
    (0..n_agents)
        .map(|_| {
            let solution = problem.random_solution(rng);
            let score = problem.fitness(&solution);
            AgentState { solution, score }
        })
        .collect()
}

/// Advances the population by one synchronous round.
///
/// # Panics
///
/// If the population size differs from the number of network nodes.
pub fn step_round<P, R>(
    pop: &mut [AgentState<P::Solution>],
    net: &Network,
    problem: &P,
    rng: &mut R,
) where
    P: Problem,
    R: Rng + ?Sized,
{
    advance(pop, net, problem, rng, None);
}

/// [`step_round`], additionally recording each agent's move in index order.
pub fn step_round_traced<P, R>(
    pop: &mut [AgentState<P::Solution>],
    net: &Network,
    problem: &P,
    rng: &mut R,
    moves: &mut Vec<Move>,
) where
    P: Problem,
    R: Rng + ?Sized,
{
    moves.clear();
    advance(pop, net, problem, rng, Some(moves));
}

fn advance<P, R>(
    pop: &mut [AgentState<P::Solution>],
    net: &Network,
    problem: &P,
    rng: &mut R,
    mut moves: Option<&mut Vec<Move>>,
) where
    P: Problem,
    R: Rng + ?Sized,
{
    let n = pop.len();
    assert_eq!(n, net.nodes(), "population size must equal network size");

    // On a complete network everyone's best neighbor is the overall leader,
    // except the leader itself, whose best neighbor is the runner-up.
    let leaders = net.is_complete().then(|| leaders(pop));

    let mut updates: Vec<(usize, AgentState<P::Solution>)> = Vec::new();
    for i in 0..n {
        let best = match leaders {
            Some((first, second)) => {
                if i == first {
                    second
                } else {
                    first
                }
            }
            None => best_neighbor(pop, net.neighbors(i)),
        };
        if pop[best].score > pop[i].score {
            updates.push((i, pop[best].clone()));
            if let Some(m) = moves.as_deref_mut() {
                m.push(Move::Copied { from: best });
            }
        } else {
            let candidate = problem.mutate(&pop[i].solution, rng);
            let score = problem.fitness(&candidate);
            let adopted = score > pop[i].score;
            if adopted {
                updates.push((
                    i,
                    AgentState {
                        solution: candidate,
                        score,
                    },
                ));
            }
            if let Some(m) = moves.as_deref_mut() {
                m.push(Move::Explored { adopted });
            }
        }
    }
    for (i, state) in updates {
        pop[i] = state;
    }
}

/// Highest-scoring neighbor; `neighbors` is sorted, so strict comparison keeps
/// the lowest index among ties.
fn best_neighbor<S>(pop: &[AgentState<S>], neighbors: &[usize]) -> usize {
    let mut best = neighbors[0];
    for &j in &neighbors[1..] {
        if pop[j].score > pop[best].score {
            best = j;
        }
    }
    best
}

/// Indices of the best and second-best agents, lowest index on ties.
fn leaders<S>(pop: &[AgentState<S>]) -> (usize, usize) {
    let mut first = 0;
    for j in 1..pop.len() {
        if pop[j].score > pop[first].score {
            first = j;
        }
    }
    let mut second = if first == 0 { 1 } else { 0 };
    for j in 0..pop.len() {
        if j != first && pop[j].score > pop[second].score {
            second = j;
        }
    }
    (first, second)
}

fn summarize<S>(pop: &[AgentState<S>]) -> (f64, f64) {
    let mut sum = 0.0;
    let mut best = f64::NEG_INFINITY;
    for a in pop {
        sum += a.score;
        if a.score > best {
            best = a.score;
        }
    }
    (sum / pop.len() as f64, best)
}

/// One seeded run: initialize, then apply `cfg.rounds` rounds.
pub fn run_once<P: Problem>(problem: &P, net: &Network, cfg: &RunConfig) -> Result<RunTrace> {
    cfg.validate()?;
    if cfg.n_agents != net.nodes() {
        return Err(Error::Invalid {
            what: "run configuration",
            reason: "agent count differs from network size",
        });
    }
    let mut rng = SimRng::seed_from_u64(cfg.seed);
    let mut pop = init_population(problem, cfg.n_agents, &mut rng);

    let mut mean_score = Vec::with_capacity(cfg.rounds + 1);
    let mut best_score = Vec::with_capacity(cfg.rounds + 1);
    let mut first_success_round = None;
    let mut record = |pop: &[AgentState<P::Solution>], round: usize| {
        let (mean, best) = summarize(pop);
        mean_score.push(mean);
        best_score.push(best);
        if first_success_round.is_none() && pop.iter().any(|a| problem.is_optimal(&a.solution)) {
            first_success_round = Some(round);
        }
    };

    record(&pop, 0);
    for round in 1..=cfg.rounds {
        step_round(&mut pop, net, problem, &mut rng);
        record(&pop, round);
    }
    let success = pop.iter().any(|a| problem.is_optimal(&a.solution));
    Ok(RunTrace {
        mean_score,
        best_score,
        success,
        first_success_round,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nk::{Genotype, NkLandscape, NkProblem};
    use alloc::vec;

    /// Fitness read from a fixed table indexed by a small integer state; the
    /// mutation step adds one modulo the table size.
    struct Table {
        values: Vec<f64>,
        optimum: usize,
    }

    impl Problem for Table {
        type Solution = usize;

        fn random_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
            rng.random_range(0..self.values.len())
        }

        fn fitness(&self, s: &usize) -> f64 {
            self.values[*s]
        }

        fn mutate<R: Rng + ?Sized>(&self, s: &usize, _rng: &mut R) -> usize {
            (s + 1) % self.values.len()
        }

        fn is_optimal(&self, s: &usize) -> bool {
            *s == self.optimum
        }
    }

    fn agents(states: &[usize], p: &Table) -> Vec<AgentState<usize>> {
        states
            .iter()
            .map(|&s| AgentState {
                solution: s,
                score: p.fitness(&s),
            })
            .collect()
    }

    #[test]
    fn complete_network_copies_the_leader() {
        let p = Table {
            values: vec![0.1, 0.2, 0.3, 0.9],
            optimum: 3,
        };
        let mut pop = agents(&[0, 1, 3, 2, 0], &p);
        let net = Network::complete(5).unwrap();
        let mut moves = Vec::new();
        step_round_traced(
            &mut pop,
            &net,
            &p,
            &mut SimRng::seed_from_u64(0),
            &mut moves,
        );
        for (i, a) in pop.iter().enumerate() {
            if i != 2 {
                assert_eq!(a.solution, 3);
                assert_eq!(moves[i], Move::Copied { from: 2 });
            }
        }
        assert_eq!(moves[2], Move::Explored { adopted: false });
    }

    #[test]
    fn linear_tie_break_prefers_lower_index() {
        // scores (0.9, 0.1, 0.9) on a path; states 0 and 2 both score 0.9
        let p = Table {
            values: vec![0.9, 0.1, 0.9, 0.0],
            optimum: 0,
        };
        let mut pop = agents(&[0, 1, 2], &p);
        let net = Network::linear(3).unwrap();
        let mut moves = Vec::new();
        step_round_traced(
            &mut pop,
            &net,
            &p,
            &mut SimRng::seed_from_u64(0),
            &mut moves,
        );
        assert_eq!(
            moves,
            vec![
                Move::Explored { adopted: false },
                Move::Copied { from: 0 },
                Move::Explored { adopted: false },
            ]
        );
        assert_eq!(pop[1].solution, 0);
        // agent 0 tried state 1 (0.1), agent 2 tried state 3 (0.0): both kept
        assert_eq!(pop[0].solution, 0);
        assert_eq!(pop[2].solution, 2);
    }

    #[test]
    fn updates_read_start_of_round_state() {
        // agent 0 improves 0 -> 1 this round; agent 1 must still copy agent 0's
        // old state only if it was strictly better at the start.
        let p = Table {
            values: vec![0.5, 0.8, 0.1, 0.2],
            optimum: 1,
        };
        let mut pop = agents(&[0, 2], &p);
        let net = Network::linear(2).unwrap();
        step_round(&mut pop, &net, &p, &mut SimRng::seed_from_u64(0));
        assert_eq!(pop[0].solution, 1);
        assert_eq!(pop[1].solution, 0);
    }

    #[test]
    fn homogeneous_local_optimum_is_fixed() {
        let p = Table {
            values: vec![0.3, 0.7, 0.2],
            optimum: 1,
        };
        let mut pop = agents(&[1; 6], &p);
        let before = pop.clone();
        for net in [Network::linear(6).unwrap(), Network::complete(6).unwrap()] {
            for seed in 0..5 {
                step_round(&mut pop, &net, &p, &mut SimRng::seed_from_u64(seed));
                assert_eq!(pop, before);
            }
        }
    }

    #[test]
    fn complete_fast_path_matches_generic_scan() {
        let mut rng = SimRng::seed_from_u64(8);
        let land = NkLandscape::generate(8, 3, &mut rng).unwrap();
        let opt = land.global_optima().unwrap();
        let p = NkProblem::new(&land, &opt);
        let net = Network::complete(12).unwrap();
        let mut pop = init_population(&p, 12, &mut rng);
        for _ in 0..30 {
            let (first, second) = leaders(&pop);
            for i in 0..12 {
                let fast = if i == first { second } else { first };
                assert_eq!(fast, best_neighbor(&pop, net.neighbors(i)));
            }
            step_round(&mut pop, &net, &p, &mut rng);
        }
    }

    #[test]
    fn constant_fitness_mean() {
        let p = Table {
            values: vec![0.25; 4],
            optimum: 0,
        };
        let net = Network::linear(10).unwrap();
        let cfg = RunConfig {
            n_agents: 10,
            rounds: 3,
            seed: 1,
        };
        let trace = run_once(&p, &net, &cfg).unwrap();
        assert_eq!(trace.mean_score[0], 0.25);
        assert_eq!(trace.rounds(), 3);
    }

    #[test]
    fn optimum_in_initial_population() {
        // every state is optimal on a one-state table
        let p = Table {
            values: vec![0.4],
            optimum: 0,
        };
        let net = Network::complete(4).unwrap();
        let cfg = RunConfig {
            n_agents: 4,
            rounds: 1,
            seed: 3,
        };
        let trace = run_once(&p, &net, &cfg).unwrap();
        assert!(trace.success);
        assert_eq!(trace.first_success_round, Some(0));
    }

    #[test]
    fn run_config_checks() {
        let p = Table {
            values: vec![0.4],
            optimum: 0,
        };
        let net = Network::complete(4).unwrap();
        let bad = RunConfig {
            n_agents: 5,
            rounds: 1,
            seed: 0,
        };
        assert!(run_once(&p, &net, &bad).is_err());
        assert!(RunConfig {
            rounds: 0,
            ..RunConfig::new(0)
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            n_agents: 1,
            ..RunConfig::new(0)
        }
        .validate()
        .is_err());
    }

    #[test]
    fn same_seed_same_population() {
        let land = NkLandscape::generate(20, 2, &mut SimRng::seed_from_u64(5)).unwrap();
        let opt = crate::optimum::OptimumRecord {
            best_score: 1.0,
            optima: vec![Genotype::zeros(20)],
        };
        let p = NkProblem::new(&land, &opt);
        let a = init_population(&p, 50, &mut SimRng::seed_from_u64(17));
        let b = init_population(&p, 50, &mut SimRng::seed_from_u64(17));
        assert_eq!(a, b);
    }
}
