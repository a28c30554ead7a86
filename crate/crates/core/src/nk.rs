//! NK fitness landscapes.
//!
//! Each of the `n` binary decision variables contributes a value that depends
//! on its own state and on the states of `k` epistatic partners. The fitness of
//! a genotype is the mean contribution. `k = 0` gives a separable, unimodal
//! landscape; `k = n - 1` gives a maximally rugged one.
//!
//! Contribution tables are indexed by the bit pattern formed by the variable's
//! own bit (most significant) followed by its partners' bits in stored order.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::Rng;

use crate::engine::Problem;
use crate::error::{Error, Result};
use crate::optimum::OptimumRecord;

/// Largest genotype length representable by [`Genotype`].
pub const MAX_BITS: usize = 64;

/// Largest `k` accepted by [`NkLandscape::generate`]; each table holds
/// `2^(k+1)` values.
pub const MAX_K: usize = 24;

/// Largest `n` the exhaustive optimum search will enumerate.
pub const MAX_ENUMERATION_BITS: usize = 25;

/// A fixed-length bit string. Position `i` is stored in bit `i` of a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genotype {
    bits: u64,
    len: u8,
}

impl Genotype {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_BITS, "genotype length {len} exceeds {MAX_BITS}");
        Self {
            bits: 0,
            len: len as u8,
        }
    }

    /// Builds a genotype from packed bits; bits at or above `len` must be zero.
    pub fn from_raw(bits: u64, len: usize) -> Self {
        assert!(len <= MAX_BITS, "genotype length {len} exceeds {MAX_BITS}");
        assert_eq!(bits & !mask(len), 0, "bits set beyond genotype length");
        Self {
            bits,
            len: len as u8,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut g = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                g.bits |= 1 << i;
            }
        }
        g
    }

    /// Uniformly random genotype: every bit an independent fair coin.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self::from_raw(rng.random::<u64>() & mask(len), len)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn raw(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn bit(&self, i: usize) -> bool {
        debug_assert!(i < self.len());
        (self.bits >> i) & 1 == 1
    }

    #[inline]
    pub fn flipped(self, i: usize) -> Self {
        assert!(
            i < self.len(),
            "bit {i} out of range for length {}",
            self.len
        );
        Self {
            bits: self.bits ^ (1 << i),
            len: self.len,
        }
    }

    pub fn hamming(&self, other: &Self) -> u32 {
        assert_eq!(self.len, other.len, "genotype lengths differ");
        (self.bits ^ other.bits).count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len()).map(|i| self.bit(i))
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Genotype {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > MAX_BITS {
            return Err(Error::OutOfRange {
                what: "genotype length",
                value: s.len(),
                expected: "at most 64",
            });
        }
        let mut g = Self::zeros(s.len());
        for (i, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => g.bits |= 1 << i,
                _ => {
                    return Err(Error::Invalid {
                        what: "genotype",
                        reason: "expected only '0' and '1'",
                    })
                }
            }
        }
        Ok(g)
    }
}

#[inline]
fn mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

/// Returns a copy of `g` with one uniformly chosen bit inverted.
pub fn mutate<R: Rng + ?Sized>(g: &Genotype, rng: &mut R) -> Genotype {
    assert!(!g.is_empty(), "cannot mutate an empty genotype");
    g.flipped(rng.random_range(0..g.len()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NkLandscape {
    n: usize,
    k: usize,
    partners: Vec<Vec<usize>>,
    tables: Vec<Vec<f64>>,
}

impl NkLandscape {
    /// Draws a random landscape.
    ///
    /// Partners of each variable are sampled uniformly without replacement
    /// from the other `n - 1` variables; contributions are independent
    /// uniform draws on `[0, 1)`.
    pub fn generate<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        check_dims(n, k)?;
        let mut partners = Vec::with_capacity(n);
        let mut tables = Vec::with_capacity(n);
        for i in 0..n {
            // partial Fisher-Yates over the other variables
            let mut pool: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            for slot in 0..k {
                let pick = rng.random_range(slot..pool.len());
                pool.swap(slot, pick);
            }
            pool.truncate(k);
            partners.push(pool);

            let size = 1usize << (k + 1);
            let table: Vec<f64> = (0..size).map(|_| rng.random::<f64>()).collect();
            tables.push(table);
        }
        Ok(Self {
            n,
            k,
            partners,
            tables,
        })
    }

    /// Assembles a landscape from explicit parts, validating every invariant.
    pub fn from_parts(
        n: usize,
        k: usize,
        partners: Vec<Vec<usize>>,
        tables: Vec<Vec<f64>>,
    ) -> Result<Self> {
        check_dims(n, k)?;
        if partners.len() != n || tables.len() != n {
            return Err(Error::Invalid {
                what: "NK landscape",
                reason: "expected one partner list and one table per variable",
            });
        }
        for (i, list) in partners.iter().enumerate() {
            if list.len() != k {
                return Err(Error::Invalid {
                    what: "NK landscape",
                    reason: "partner list length differs from k",
                });
            }
            for (a, &p) in list.iter().enumerate() {
                if p >= n || p == i {
                    return Err(Error::Invalid {
                        what: "NK landscape",
                        reason: "partner index out of range or self-referential",
                    });
                }
                if list[..a].contains(&p) {
                    return Err(Error::Invalid {
                        what: "NK landscape",
                        reason: "duplicate partner index",
                    });
                }
            }
        }
        for table in &tables {
            if table.len() != 1 << (k + 1) {
                return Err(Error::Invalid {
                    what: "NK landscape",
                    reason: "table length differs from 2^(k+1)",
                });
            }
            if table.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(Error::Invalid {
                    what: "NK landscape",
                    reason: "table value outside [0, 1]",
                });
            }
        }
        Ok(Self {
            n,
            k,
            partners,
            tables,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn partners(&self, i: usize) -> &[usize] {
        &self.partners[i]
    }

    pub fn table(&self, i: usize) -> &[f64] {
        &self.tables[i]
    }

    /// Mean contribution of all variables.
    ///
    /// # Panics
    ///
    /// If `g.len() != self.n()`.
    pub fn fitness(&self, g: &Genotype) -> f64 {
        assert_eq!(g.len(), self.n, "genotype length does not match landscape");
        let mut sum = 0.0;
        for i in 0..self.n {
            let mut idx = g.bit(i) as usize;
            for &p in &self.partners[i] {
                idx = (idx << 1) | g.bit(p) as usize;
            }
            sum += self.tables[i][idx];
        }
        sum / self.n as f64
    }

    /// Exhaustive search for the global optimum.
    ///
    /// Genotypes are visited in Gray-code order so each step updates only the
    /// table indices touched by the flipped bit. Contributions are still summed
    /// in variable order, so every score is bit-identical to [`Self::fitness`].
    pub fn global_optima(&self) -> Result<OptimumRecord<Genotype>> {
        if self.n > MAX_ENUMERATION_BITS {
            return Err(Error::OracleInfeasible {
                what: "n",
                value: self.n,
                limit: MAX_ENUMERATION_BITS,
            });
        }
        let n = self.n;
        // touched[j] lists (variable, index weight) for every table reading bit j
        let mut touched: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for i in 0..n {
            touched[i].push((i, 1 << self.k));
            for (q, &p) in self.partners[i].iter().enumerate() {
                touched[p].push((i, 1 << (self.k - 1 - q)));
            }
        }
        let mut idx = vec![0usize; n];
        let mut bits = 0u64;
        let score = |idx: &[usize]| {
            let mut sum = 0.0;
            for (table, &x) in self.tables.iter().zip(idx) {
                sum += table[x];
            }
            sum / n as f64
        };

        let mut best = score(&idx);
        let mut optima = vec![Genotype::from_raw(0, n)];
        for step in 1u64..(1u64 << n) {
            let j = step.trailing_zeros() as usize;
            bits ^= 1 << j;
            for &(i, w) in &touched[j] {
                idx[i] ^= w;
            }
            let s = score(&idx);
            if s > best {
                best = s;
                optima.clear();
                optima.push(Genotype::from_raw(bits, n));
            } else if s == best {
                optima.push(Genotype::from_raw(bits, n));
            }
        }
        optima.sort_unstable();
        Ok(OptimumRecord {
            best_score: best,
            optima,
        })
    }
}

fn check_dims(n: usize, k: usize) -> Result<()> {
    if n == 0 || n > MAX_BITS {
        return Err(Error::OutOfRange {
            what: "n",
            value: n,
            expected: "1 <= n <= 64",
        });
    }
    if k >= n {
        return Err(Error::OutOfRange {
            what: "k",
            value: k,
            expected: "0 <= k <= n - 1",
        });
    }
    if k > MAX_K {
        return Err(Error::OutOfRange {
            what: "k",
            value: k,
            expected: "k <= 24",
        });
    }
    Ok(())
}

/// An NK landscape paired with its precomputed optima, as seen by the engine.
#[derive(Debug, Clone, Copy)]
pub struct NkProblem<'a> {
    pub landscape: &'a NkLandscape,
    pub optimum: &'a OptimumRecord<Genotype>,
}

impl<'a> NkProblem<'a> {
    pub fn new(landscape: &'a NkLandscape, optimum: &'a OptimumRecord<Genotype>) -> Self {
        Self { landscape, optimum }
    }
}

impl Problem for NkProblem<'_> {
    type Solution = Genotype;

    fn random_solution<R: Rng + ?Sized>(&self, rng: &mut R) -> Genotype {
        Genotype::random(self.landscape.n(), rng)
    }

    fn fitness(&self, g: &Genotype) -> f64 {
        self.landscape.fitness(g)
    }

    fn mutate<R: Rng + ?Sized>(&self, g: &Genotype, rng: &mut R) -> Genotype {
        mutate(g, rng)
    }

    // Identity against the stored optima; scores are never compared here.
    fn is_optimal(&self, g: &Genotype) -> bool {
        self.optimum.optima.binary_search(g).is_ok()
    }
}
