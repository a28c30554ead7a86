//! Random Euclidean TSP instances, tour moves and exact oracles.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::engine::Problem;
use crate::error::{Error, Result};
use crate::optimum::OptimumRecord;

/// Largest instance [`TspInstance::held_karp`] will solve.
pub const MAX_HELD_KARP_CITIES: usize = 20;

/// Largest instance [`TspInstance::brute_force`] will enumerate.
pub const MAX_BRUTE_FORCE_CITIES: usize = 9;

/// Relative tolerance under which a tour counts as optimal.
pub const OPTIMALITY_RTOL: f64 = 1e-9;

/// Cities in the unit square with their Euclidean distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    coords: Vec<(f64, f64)>,
    dist: Vec<f64>,
}

impl TspInstance {
    /// Places `m` cities independently and uniformly in `[0, 1)²`.
    pub fn generate<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Self> {
        if m == 0 {
            return Err(Error::OutOfRange {
                what: "cities",
                value: 0,
                expected: "at least 1",
            });
        }
        let coords = (0..m)
            .map(|_| {
                let x = rng.random::<f64>();
                let y = rng.random::<f64>();
                (x, y)
            })
            .collect();
        Self::from_coords(coords)
    }

    pub fn from_coords(coords: Vec<(f64, f64)>) -> Result<Self> {
        let m = coords.len();
        if m == 0 {
            return Err(Error::OutOfRange {
                what: "cities",
                value: 0,
                expected: "at least 1",
            });
        }
        if coords.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Invalid {
                what: "TSP instance",
                reason: "non-finite coordinate",
            });
        }
        let mut dist = vec![0.0; m * m];
        for i in 0..m {
            for j in (i + 1)..m {
                let (xi, yi) = coords[i];
                let (xj, yj) = coords[j];
                let d = libm::sqrt((xi - xj) * (xi - xj) + (yi - yj) * (yi - yj));
                dist[i * m + j] = d;
                dist[j * m + i] = d;
            }
        }
        Ok(Self { coords, dist })
    }

    pub fn cities(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.cities() + j]
    }

    /// Length of the closed cycle visiting `order` in sequence.
    ///
    /// Accepts any ordering, canonical or not, so rotations and reversals can
    /// be compared directly.
    pub fn cycle_length(&self, order: &[usize]) -> f64 {
        let m = order.len();
        let mut total = 0.0;
        for i in 0..m {
            total += self.dist(order[i], order[(i + 1) % m]);
        }
        total
    }

    /// # Panics
    ///
    /// If the tour was built for a different number of cities.
    pub fn tour_length(&self, t: &Tour) -> f64 {
        assert_eq!(t.len(), self.cities(), "tour size does not match instance");
        self.cycle_length(t.order())
    }

    /// Negated tour length, so that higher is better.
    pub fn fitness(&self, t: &Tour) -> f64 {
        -self.tour_length(t)
    }

    /// Exact optimum by dynamic programming over subsets of cities `1..m`.
    ///
    /// The record holds one optimal tour; its `best_score` is the negated
    /// minimum length.
    pub fn held_karp(&self) -> Result<OptimumRecord<Tour>> {
        let m = self.cities();
        if m > MAX_HELD_KARP_CITIES {
            return Err(Error::OracleInfeasible {
                what: "cities",
                value: m,
                limit: MAX_HELD_KARP_CITIES,
            });
        }
        if m <= 2 {
            let t = Tour::identity(m);
            return Ok(OptimumRecord {
                best_score: -self.tour_length(&t),
                optima: vec![t],
            });
        }

        // Subsets range over cities 1..m, encoded with city c at bit c - 1.
        // cost[mask * w + e]: shortest path from city 0 through exactly the
        // cities in mask, ending at city e + 1 (which is in mask).
        let w = m - 1;
        let full = (1usize << w) - 1;
        let mut cost = vec![f64::INFINITY; (full + 1) * w];
        let mut prev = vec![u8::MAX; (full + 1) * w];
        for e in 0..w {
            cost[(1 << e) * w + e] = self.dist(0, e + 1);
        }
        for mask in 1..=full {
            if mask.count_ones() < 2 {
                continue;
            }
            let mut rest = mask;
            while rest != 0 {
                let e = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let from = mask ^ (1 << e);
                let mut best = f64::INFINITY;
                let mut arg = u8::MAX;
                let mut cand = from;
                while cand != 0 {
                    let p = cand.trailing_zeros() as usize;
                    cand &= cand - 1;
                    let c = cost[from * w + p] + self.dist(p + 1, e + 1);
                    if c < best {
                        best = c;
                        arg = p as u8;
                    }
                }
                cost[mask * w + e] = best;
                prev[mask * w + e] = arg;
            }
        }

        let mut best = f64::INFINITY;
        let mut last = 0usize;
        for e in 0..w {
            let c = cost[full * w + e] + self.dist(e + 1, 0);
            if c < best {
                best = c;
                last = e;
            }
        }

        let mut rev = Vec::with_capacity(m);
        let mut mask = full;
        let mut e = last;
        loop {
            rev.push(e + 1);
            let p = prev[mask * w + e];
            mask ^= 1 << e;
            if p == u8::MAX {
                break;
            }
            e = p as usize;
        }
        debug_assert_eq!(mask, 0);
        rev.push(0);
        rev.reverse();
        let tour = Tour::new(rev)?;
        Ok(OptimumRecord {
            best_score: -best,
            optima: vec![tour],
        })
    }

    /// Exact optimum by enumerating all `(m-1)!` canonical tours.
    ///
    /// Every tour whose length equals the minimum exactly is returned.
    pub fn brute_force(&self) -> Result<OptimumRecord<Tour>> {
        let m = self.cities();
        if m > MAX_BRUTE_FORCE_CITIES {
            return Err(Error::OracleInfeasible {
                what: "cities",
                value: m,
                limit: MAX_BRUTE_FORCE_CITIES,
            });
        }
        let mut order: Vec<usize> = (0..m).collect();
        let mut best = f64::INFINITY;
        let mut optima = Vec::new();
        loop {
            let len = self.cycle_length(&order);
            if len < best {
                best = len;
                optima.clear();
                optima.push(Tour(order.clone()));
            } else if len == best {
                optima.push(Tour(order.clone()));
            }
            if m < 2 || !next_permutation(&mut order[1..]) {
                break;
            }
        }
        Ok(OptimumRecord {
            best_score: -best,
            optima,
        })
    }
}

/// Lexicographic successor; returns false once the last permutation is reached.
fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}

/// A closed tour in canonical form: a permutation of the cities starting at 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tour(Vec<usize>);

impl Tour {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let m = order.len();
        let mut seen = vec![false; m];
        for &c in &order {
            if c >= m || seen[c] {
                return Err(Error::Invalid {
                    what: "tour",
                    reason: "not a permutation of the cities",
                });
            }
            seen[c] = true;
        }
        if m > 0 && order[0] != 0 {
            return Err(Error::Invalid {
                what: "tour",
                reason: "canonical tours start at city 0",
            });
        }
        Ok(Self(order))
    }

    pub fn identity(m: usize) -> Self {
        Self((0..m).collect())
    }

    /// Uniformly random canonical tour.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..m).collect();
        if m > 2 {
            order[1..].shuffle(rng);
        }
        Self(order)
    }

    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Swaps the cities at two distinct positions drawn uniformly from `1..m`.
///
/// Position 0 never moves, so the result stays canonical. With fewer than
/// three cities there is no such pair and the tour is returned unchanged.
pub fn mutate<R: Rng + ?Sized>(t: &Tour, rng: &mut R) -> Tour {
    let m = t.len();
    let mut out = t.clone();
    if m < 3 {
        return out;
    }
    let a = rng.random_range(1..m);
    let mut b = rng.random_range(1..m - 1);
    if b >= a {
        b += 1;
    }
    out.0.swap(a, b);
    out
}

/// A TSP instance paired with its optimal length, as seen by the engine.
#[derive(Debug, Clone, Copy)]
pub struct TspProblem<'a> {
    pub instance: &'a TspInstance,
    pub optimal_length: f64,
}

impl<'a> TspProblem<'a> {
    pub fn new(instance: &'a TspInstance, optimum: &OptimumRecord<Tour>) -> Self {
        Self {
            instance,
            optimal_length: -optimum.best_score,
        }
    }
}

impl Problem for TspProblem<'_> {
    type Solution = Tour;

    fn random_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> Tour {
        Tour::random(self.instance.cities(), rng)
    }

    fn fitness(&self, t: &Tour) -> f64 {
        self.instance.fitness(t)
    }

    fn mutate<R: Rng + ?Sized>(&self, t: &Tour, rng: &mut R) -> Tour {
        mutate(t, rng)
    }

    // Reflections of an optimal tour are distinct canonical tours, so
    // optimality is judged by length.
    fn is_optimal(&self, t: &Tour) -> bool {
        let len = self.instance.tour_length(t);
        len <= self.optimal_length + OPTIMALITY_RTOL * self.optimal_length
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn instance(m: usize, seed: u64) -> TspInstance {
        TspInstance::generate(m, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
    }

    #[test]
    fn single_city() {
        let inst = instance(1, 1);
        assert_eq!(inst.dist(0, 0), 0.0);
        let t = Tour::identity(1);
        assert_eq!(inst.tour_length(&t), 0.0);
        assert_eq!(inst.fitness(&t), 0.0);
        let hk = inst.held_karp().unwrap();
        assert_eq!(hk.best_score, 0.0);
        let p = TspProblem::new(&inst, &hk);
        assert!(p.is_optimal(&t));
    }

    #[test]
    fn unit_segment_goes_and_returns() {
        let inst = TspInstance::from_coords(vec![(0.0, 0.0), (1.0, 0.0)]).unwrap();
        assert_eq!(inst.dist(0, 1), 1.0);
        assert_eq!(inst.tour_length(&Tour::identity(2)), 2.0);
        let bf = inst.brute_force().unwrap();
        assert_eq!(bf.optima, vec![Tour::identity(2)]);
    }

    #[test]
    fn triangle_tours_equal_perimeter() {
        let inst = TspInstance::from_coords(vec![(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)]).unwrap();
        let a = inst.tour_length(&Tour::new(vec![0, 1, 2]).unwrap());
        let b = inst.tour_length(&Tour::new(vec![0, 2, 1]).unwrap());
        assert!((a - 12.0).abs() < 1e-12);
        assert!((b - 12.0).abs() < 1e-12);
        let hk = inst.held_karp().unwrap();
        assert!((hk.best_score + 12.0).abs() < 1e-12);
    }

    #[test]
    fn fitness_sign_convention() {
        // 0 -> 1 -> 2 -> 0 with sides 1.6, 0 and 1.6
        let inst = TspInstance::from_coords(vec![(0.0, 0.0), (1.6, 0.0), (1.6, 0.0)]).unwrap();
        let t = Tour::identity(3);
        assert!((inst.fitness(&t) + 3.2).abs() < 1e-15);
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(instance(12, 77), instance(12, 77));
        assert!(TspInstance::generate(0, &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    }

    #[test]
    fn brute_force_counts_tours() {
        let inst = instance(4, 5);
        let mut order: Vec<usize> = (0..4).collect();
        let mut count = 1;
        while next_permutation(&mut order[1..]) {
            count += 1;
        }
        assert_eq!(count, 6);
        let bf = inst.brute_force().unwrap();
        assert!(!bf.optima.is_empty());
        assert!(instance(10, 1).brute_force().is_err());
    }

    #[test]
    fn oracle_guards() {
        assert!(matches!(
            instance(21, 3).held_karp(),
            Err(Error::OracleInfeasible { limit: 20, .. })
        ));
    }

    #[test]
    fn mutate_degenerate_sizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(mutate(&Tour::identity(1), &mut rng), Tour::identity(1));
        assert_eq!(mutate(&Tour::identity(2), &mut rng), Tour::identity(2));
    }

    #[test]
    fn mutate_swaps_one_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = Tour::identity(4);
        for _ in 0..50 {
            let u = mutate(&t, &mut rng);
            assert_eq!(u.order()[0], 0);
            let diff = (0..4).filter(|&i| u.order()[i] != t.order()[i]).count();
            assert_eq!(diff, 2);
            assert!(Tour::new(u.order().to_vec()).is_ok());
        }
    }

    #[test]
    fn tour_validation() {
        assert!(Tour::new(vec![0, 2, 1]).is_ok());
        assert!(Tour::new(vec![1, 0, 2]).is_err());
        assert!(Tour::new(vec![0, 1, 1]).is_err());
        assert!(Tour::new(vec![0, 3, 1]).is_err());
    }
}
