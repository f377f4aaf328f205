//! Seeded randomness for the verification suites.
//!
//! Every generator is a SplitMix64 stream (from `rand_xoshiro`). A suite derives its own
//! stream from the run seed and a fixed tag, so suites stay reproducible no matter which
//! order they run in.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::fock::{FockResult, SpaceTag, StateVector, TruncatedOperator};
use crate::scalar::Real;

/// 64-bit FNV-1a, used only to turn suite tags into seed offsets.
fn tag_hash(tag: &str) -> u64 {
    tag.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

pub struct Rng {
    inner: SplitMix64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    /// Independent stream for the suite named `tag`.
    pub fn for_suite(seed: u64, tag: &str) -> Self {
        Self::new(seed ^ tag_hash(tag))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        // rejection keeps the distribution exactly uniform
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    pub fn coin(&mut self) -> bool {
        self.next_u64() >> 63 == 1
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// `p / q` with `|p| <= max_num` and `1 <= q <= max_den`.
    pub fn rational(&mut self, max_num: i64, max_den: i64) -> BigRational {
        let p = self.int_in(-max_num, max_num);
        let q = self.int_in(1, max_den);
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    pub fn complex_normal<T: Real>(&mut self) -> Complex<T> {
        Complex::new(T::lit(self.normal()), T::lit(self.normal()))
    }

    /// `(A + A^dagger) / 2` with independent complex normal entries.
    pub fn hermitian<T: Real>(&mut self, n: usize) -> TruncatedOperator<T> {
        let a: DMatrix<Complex<T>> = DMatrix::from_fn(n, n, |_, _| self.complex_normal());
        let h = (&a + a.adjoint()).map(|z| z * T::lit(0.5));
        TruncatedOperator::new(h, n, SpaceTag::Single).expect("square matrix")
    }

    /// Normalized state with complex normal amplitudes.
    pub fn state<T: Real>(&mut self, n: usize) -> FockResult<StateVector<T>> {
        let v = DVector::from_fn(n, |_, _| self.complex_normal());
        StateVector::new(v, n, SpaceTag::Single)?.normalized()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4)
            .map({
                let mut r = Rng::for_suite(7, "liouville");
                move |_| r.next_u64()
            })
            .collect();
        let mut r = Rng::for_suite(7, "liouville");
        assert_eq!(a, (0..4).map(|_| r.next_u64()).collect::<Vec<_>>());
        let mut s = Rng::for_suite(7, "energy");
        assert_ne!(a[0], s.next_u64());
    }

    #[test]
    fn ranges() {
        let mut r = Rng::new(1);
        for _ in 0..1000 {
            let u = r.uniform();
            assert!((0.0..1.0).contains(&u));
            let k = r.int_in(-3, 3);
            assert!((-3..=3).contains(&k));
        }
        let q = r.rational(5, 4);
        assert!(q.denom() >= &BigInt::from(1));
    }

    #[test]
    fn random_hermitian_and_state() {
        let mut r = Rng::new(3);
        let h = r.hermitian::<f64>(6);
        assert_eq!(h.hermitian_deviation(), 0.0);
        let s = r.state::<f64>(6).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-14);
    }
}
