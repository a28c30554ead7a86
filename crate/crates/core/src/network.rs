//! Communication topologies over agents.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// An undirected, simple, connected graph. Node `i` is agent `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    adjacency: Vec<Vec<usize>>,
    edges: usize,
}

impl Network {
    /// Path graph `0 - 1 - ... - (n-1)`.
    pub fn linear(n: usize) -> Result<Self> {
        check_size(n)?;
        let adjacency = (0..n)
            .map(|i| {
                let mut nb = Vec::with_capacity(2);
                if i > 0 {
                    nb.push(i - 1);
                }
                if i + 1 < n {
                    nb.push(i + 1);
                }
                nb
            })
            .collect();
        Ok(Self {
            adjacency,
            edges: n - 1,
        })
    }

    /// Every pair of distinct nodes adjacent.
    pub fn complete(n: usize) -> Result<Self> {
        check_size(n)?;
        let adjacency = (0..n)
            .map(|i| (0..n).filter(|&j| j != i).collect())
            .collect();
        Ok(Self {
            adjacency,
            edges: n * (n - 1) / 2,
        })
    }

    /// Builds a network from neighbor lists, which are sorted on the way in.
    ///
    /// Rejects self-loops, duplicates, asymmetric entries and disconnected
    /// graphs.
    pub fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Result<Self> {
        let n = adjacency.len();
        check_size(n)?;
        for (i, nb) in adjacency.iter_mut().enumerate() {
            nb.sort_unstable();
            if nb.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Invalid {
                    what: "network",
                    reason: "duplicate neighbor entry",
                });
            }
            if nb.iter().any(|&j| j == i || j >= n) {
                return Err(Error::Invalid {
                    what: "network",
                    reason: "self-loop or neighbor index out of range",
                });
            }
        }
        let mut degree_sum = 0;
        for i in 0..n {
            degree_sum += adjacency[i].len();
            for &j in &adjacency[i] {
                if adjacency[j].binary_search(&i).is_err() {
                    return Err(Error::Invalid {
                        what: "network",
                        reason: "adjacency is not symmetric",
                    });
                }
            }
        }
        let net = Self {
            adjacency,
            edges: degree_sum / 2,
        };
        if !net.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(net)
    }

    pub fn nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edges(&self) -> usize {
        self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn is_complete(&self) -> bool {
        let n = self.nodes();
        self.edges == n * (n - 1) / 2
    }

    fn bfs(&self, source: usize, dist: &mut [usize], queue: &mut VecDeque<usize>) {
        dist.fill(usize::MAX);
        dist[source] = 0;
        queue.clear();
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }

    fn is_connected(&self) -> bool {
        let mut dist = vec![0; self.nodes()];
        self.bfs(0, &mut dist, &mut VecDeque::new());
        dist.iter().all(|&d| d != usize::MAX)
    }

    /// Mean shortest-path distance over all unordered pairs of distinct nodes,
    /// by breadth-first search from every node.
    pub fn average_path_length(&self) -> Result<f64> {
        let n = self.nodes();
        let mut dist = vec![0; n];
        let mut queue = VecDeque::with_capacity(n);
        // ordered pairs; each unordered pair is counted twice
        let mut total: u64 = 0;
        for s in 0..n {
            self.bfs(s, &mut dist, &mut queue);
            for &d in &dist {
                if d == usize::MAX {
                    return Err(Error::Disconnected);
                }
                total += d as u64;
            }
        }
        let pairs = (n as u64) * (n as u64 - 1);
        Ok(total as f64 / pairs as f64)
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "nodes",
            value: n,
            expected: "at least 2",
        });
    }
    Ok(())
}

/// The topologies shipped with the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Topology {
    Linear,
    Complete,
}

impl Topology {
    pub const ALL: [Topology; 2] = [Topology::Linear, Topology::Complete];

    pub fn build(self, n: usize) -> Result<Network> {
        match self {
            Topology::Linear => Network::linear(n),
            Topology::Complete => Network::complete(n),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Topology::Linear => "linear",
            Topology::Complete => "complete",
        }
    }

    /// Stable numeric id used when deriving per-run seeds.
    pub fn id(self) -> u64 {
        match self {
            Topology::Linear => 0,
            Topology::Complete => 1,
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Topology::Linear),
            "complete" => Ok(Topology::Complete),
            _ => Err(Error::Invalid {
                what: "topology",
                reason: "expected `linear` or `complete`",
            }),
        }
    }
}
