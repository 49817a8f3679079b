//! Random decisions made by the search operators.
//!
//! Operators draw through [`Choices`] rather than a concrete generator so
//! tests can script the exact sequence of picks. Any [`rand::RngCore`] is a
//! `Choices`; bounded draws go through `u64` so streams are identical on 32-
//! and 64-bit targets.

use rand::SeedableRng;
use rand::{Rng, RngCore};
use rand_xoshiro::Xoshiro256PlusPlus;

pub trait Choices {
    /// Uniform index in `0..bound`. `bound` must be positive.
    fn index(&mut self, bound: usize) -> usize;

    /// Fair coin.
    fn coin(&mut self) -> bool;
}

impl<R: RngCore + ?Sized> Choices for R {
    #[inline]
    fn index(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        self.gen_range(0..bound as u64) as usize
    }

    #[inline]
    fn coin(&mut self) -> bool {
        self.gen::<bool>()
    }
}

/// The generator used for every restart: Xoshiro256++ seeded with
/// `seed + restart` (wrapping).
pub fn restart_rng(seed: u64, restart: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed.wrapping_add(restart))
}
