use nalgebra::DVector;
use num_complex::Complex;
use num_traits::{One, Zero};

use super::{FockError, FockResult, SpaceTag};
use crate::scalar::Real;

/// State on a single or doubled truncated Fock space. The Euclidean norm is cached on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    amplitudes: DVector<Complex<T>>,
    norm: T,
    cutoff: usize,
    space: SpaceTag,
}

fn euclid<T: Real>(v: &DVector<Complex<T>>) -> T {
    v.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt()
}

impl<T: Real> StateVector<T> {
    pub fn new(
        amplitudes: DVector<Complex<T>>,
        cutoff: usize,
        space: SpaceTag,
    ) -> FockResult<Self> {
        if amplitudes.len() != space.dim(cutoff) {
            return Err(FockError::Dimension(format!(
                "{} amplitudes for a {space:?} space with cutoff {cutoff}",
                amplitudes.len()
            )));
        }
        let norm = euclid(&amplitudes);
        Ok(Self {
            amplitudes,
            norm,
            cutoff,
            space,
        })
    }

    pub fn basis(cutoff: usize, space: SpaceTag, index: usize) -> Self {
        let mut v = DVector::zeros(space.dim(cutoff));
        v[index] = Complex::one();
        Self {
            amplitudes: v,
            norm: T::one(),
            cutoff,
            space,
        }
    }

    pub fn vacuum(cutoff: usize, space: SpaceTag) -> Self {
        Self::basis(cutoff, space, 0)
    }

    pub fn amplitudes(&self) -> &DVector<Complex<T>> {
        &self.amplitudes
    }

    pub fn amplitude(&self, i: usize) -> Complex<T> {
        self.amplitudes[i]
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn space(&self) -> SpaceTag {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Cached Euclidean norm.
    pub fn norm(&self) -> T {
        self.norm
    }

    /// Recomputes the norm from the amplitudes, for checking the cache.
    pub fn recomputed_norm(&self) -> T {
        euclid(&self.amplitudes)
    }

    pub fn normalized(&self) -> FockResult<Self> {
        if self.norm.is_zero() {
            return Err(FockError::Parameter(
                "cannot normalize the zero vector".into(),
            ));
        }
        Ok(self.scale(Complex::new(T::one() / self.norm, T::zero())))
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let amplitudes = self.amplitudes.map(|z| z * c);
        let norm = euclid(&amplitudes);
        Self {
            amplitudes,
            norm,
            cutoff: self.cutoff,
            space: self.space,
        }
    }

    pub fn add(&self, other: &Self) -> FockResult<Self> {
        if self.cutoff != other.cutoff || self.space != other.space {
            return Err(FockError::Dimension(
                "states live on different spaces".into(),
            ));
        }
        Self::new(
            &self.amplitudes + &other.amplitudes,
            self.cutoff,
            self.space,
        )
    }

    /// `<self|other>`, antilinear in the first slot.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .fold(Complex::zero(), |s, (a, b)| s + a.conj() * *b)
    }

    /// `max_i |psi_i - phi_i|`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm_sqr().sqrt()))
    }

    /// Probability weight carried by basis indices outside `keep`.
    pub fn weight_outside(&self, keep: &[usize]) -> T {
        let total: T = self
            .amplitudes
            .iter()
            .fold(T::zero(), |s, z| s + z.norm_sqr());
        let inside = keep
            .iter()
            .fold(T::zero(), |s, &i| s + self.amplitudes[i].norm_sqr());
        (total - inside).max(T::zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cached_norm_tracks_operations() {
        let v = DVector::from_vec(vec![Complex::new(3.0, 0.0), Complex::new(0.0, 4.0)]);
        let s: StateVector<f64> = StateVector::new(v, 2, SpaceTag::Single).unwrap();
        assert_eq!(s.norm(), 5.0);
        let u = s.normalized().unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-15);
        assert!((u.recomputed_norm() - u.norm()).abs() < 1e-15);
        let w = u.add(&StateVector::basis(2, SpaceTag::Single, 0)).unwrap();
        assert!((w.norm() - w.recomputed_norm()).abs() < 1e-15);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let v = DVector::from_element(3, Complex::new(1.0, 0.0));
        assert!(StateVector::new(v, 2, SpaceTag::Doubled).is_err());
    }

    #[test]
    fn inner_is_antilinear_on_the_left() {
        let e0 = StateVector::<f64>::basis(2, SpaceTag::Single, 0);
        let ie0 = e0.scale(Complex::new(0.0, 1.0));
        assert_eq!(ie0.inner(&e0), Complex::new(0.0, -1.0));
    }
}
