//! Budgets, seeds and coefficient enumeration shared by the exhaustive
//! searches (idempotents, isomorphisms, interleavings).

use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Limits for exhaustive enumeration over `F_p^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest coefficient-space dimension enumerated exhaustively.
    pub max_exhaustive_dim: usize,
    /// Random candidates tried before falling back to enumeration.
    pub random_attempts: usize,
    pub seed: u64,
}

impl SearchBudget {
    /// Default budget for `F_p`: the largest `d` with `p^d ≤ 2^16`, i.e.
    /// 16 over `F_2`, scaled down by `log₂ p` for larger primes.
    pub fn for_prime(p: u32) -> Self {
        SearchBudget {
            max_exhaustive_dim: default_max_dim(p),
            random_attempts: 64,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_dim(mut self, d: usize) -> Self {
        self.max_exhaustive_dim = d;
        self
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn check(&self, needed: usize) -> Result<()> {
        if needed > self.max_exhaustive_dim {
            return Err(Error::BudgetExceeded {
                needed,
                budget: self.max_exhaustive_dim,
            });
        }
        Ok(())
    }
}

pub fn default_max_dim(p: u32) -> usize {
    let mut d = 0;
    let mut acc: u64 = 1;
    while acc * p as u64 <= 1 << 16 {
        acc *= p as u64;
        d += 1;
    }
    d
}

/// Visits one representative of every line in `F_p^d` (first nonzero
/// coordinate equal to 1). Stops early when `visit` returns `true`.
pub fn for_each_projective(p: u32, d: usize, mut visit: impl FnMut(&[u32]) -> bool) -> bool {
    let mut v = alloc::vec![0u32; d];
    for lead in 0..d {
        v.iter_mut().for_each(|x| *x = 0);
        v[lead] = 1;
        loop {
            if visit(&v) {
                return true;
            }
            if !increment(&mut v[lead + 1..], p) {
                break;
            }
        }
    }
    false
}

/// Base-`p` odometer step; returns `false` on wrap-around to zero.
fn increment(v: &mut [u32], p: u32) -> bool {
    for x in v.iter_mut().rev() {
        *x += 1;
        if *x < p {
            return true;
        }
        *x = 0;
    }
    false
}

/// All of `F_p^d`, including zero. Intended for small test oracles.
pub fn all_vectors(p: u32, d: usize) -> Vec<Vec<u32>> {
    let mut out = alloc::vec![alloc::vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                (0..p).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

pub fn random_vector(rng: &mut impl rand::Rng, p: u32, d: usize) -> Vec<u32> {
    (0..d).map(|_| rng.random_range(0..p)).collect()
}
