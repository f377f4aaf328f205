use std::ops::{Add, Sub};

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::scalar::Real;

/// Transition amplitudes `X_mn(t) = R_mn exp(i (nu_m - nu_n) t)`.
///
/// Frequencies are kept in their own type `F` so the Ritz rule can be checked exactly
/// (for example with rationals) while the amplitudes are evaluated in floating point.
#[derive(Debug, Clone)]
pub struct TransitionSystem<F, T: Real> {
    pub frequencies: Vec<F>,
    pub amplitudes: DMatrix<Complex<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RitzReport {
    pub triples: usize,
    pub violations: usize,
}

impl RitzReport {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

impl<F, T> TransitionSystem<F, T>
where
    F: Clone + PartialEq + Add<Output = F> + Sub<Output = F> + ToPrimitive,
    T: Real,
{
    pub fn new(frequencies: Vec<F>, amplitudes: DMatrix<Complex<T>>) -> Self {
        assert_eq!(
            amplitudes.nrows(),
            frequencies.len(),
            "amplitude rows must match levels"
        );
        assert_eq!(
            amplitudes.ncols(),
            frequencies.len(),
            "amplitude columns must match levels"
        );
        Self {
            frequencies,
            amplitudes,
        }
    }

    pub fn levels(&self) -> usize {
        self.frequencies.len()
    }

    /// `nu_a - nu_b`.
    pub fn transition_frequency(&self, a: usize, b: usize) -> F {
        self.frequencies[a].clone() - self.frequencies[b].clone()
    }

    fn phase(&self, m: usize, n: usize, t: T) -> Complex<T> {
        let w = T::lit(
            self.transition_frequency(m, n)
                .to_f64()
                .expect("finite frequency"),
        );
        Complex::new(T::zero(), w * t).exp()
    }

    pub fn evolve(&self, t: T) -> DMatrix<Complex<T>> {
        let n = self.levels();
        DMatrix::from_fn(n, n, |m, k| self.amplitudes[(m, k)] * self.phase(m, k, t))
    }

    /// Checks `nu_mj + nu_jn = nu_mn` for every triple, in the exact arithmetic of `F`.
    pub fn ritz_check(&self) -> RitzReport {
        let n = self.levels();
        let mut violations = 0;
        for m in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.transition_frequency(m, j) + self.transition_frequency(j, k)
                        != self.transition_frequency(m, k)
                    {
                        violations += 1;
                    }
                }
            }
        }
        RitzReport {
            triples: n * n * n,
            violations,
        }
    }

    /// `X(t)^2` together with its maximal deviation from `exp(i (nu_m - nu_n) t) (R^2)_mn`.
    pub fn transition_product(&self, t: T) -> (DMatrix<Complex<T>>, T) {
        let x = self.evolve(t);
        let sq = &x * &x;
        let r2 = &self.amplitudes * &self.amplitudes;
        let n = self.levels();
        let mut dev = T::zero();
        for m in 0..n {
            for k in 0..n {
                let expected = r2[(m, k)] * self.phase(m, k, t);
                dev = dev.max((sq[(m, k)] - expected).modulus());
            }
        }
        (sq, dev)
    }
}
