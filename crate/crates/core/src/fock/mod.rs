//! Dense complex linear algebra on truncated (single or doubled) Fock spaces.
//!
//! Doubled spaces use the row-major Kronecker convention: the pair `|m> (x) |n>` sits at
//! index `m * N + n`, so the left factor is the slow index.

mod io;
mod linalg;
mod state;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use num_traits::Zero;
use thiserror::Error;

pub use io::{matrix_from_csv, matrix_from_json, matrix_to_csv, matrix_to_json, vector_to_json};
pub use linalg::{components, expm, expm_apply, kron, sparse_mul, HermitianSpectrum};
pub use state::StateVector;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FockError {
    #[error("cutoff must be at least {min}, got {got}")]
    Cutoff { got: usize, min: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("operator is not Hermitian: max |A - A^dagger| = {0:e}")]
    NotHermitian(f64),
    #[error("matrix exponential residual {residual:e} exceeds tolerance {tol:e}")]
    Convergence { residual: f64, tol: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("malformed serialized data: {0}")]
    Format(String),
}

pub type FockResult<T> = Result<T, FockError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceTag {
    Single,
    Doubled,
}

impl SpaceTag {
    pub fn dim(self, cutoff: usize) -> usize {
        match self {
            SpaceTag::Single => cutoff,
            SpaceTag::Doubled => cutoff * cutoff,
        }
    }
}

/// Index of `|m> (x) |n>` in a doubled space with cutoff `n_levels`.
pub fn pair_index(n_levels: usize, m: usize, n: usize) -> usize {
    m * n_levels + n
}

/// Inverse of [`pair_index`].
pub fn pair_levels(n_levels: usize, idx: usize) -> (usize, usize) {
    (idx / n_levels, idx % n_levels)
}

/// Basis indices of the interior block, all levels `<= level` in every factor.
pub fn interior_indices(cutoff: usize, space: SpaceTag, level: usize) -> Vec<usize> {
    let top = level.min(cutoff - 1);
    match space {
        SpaceTag::Single => (0..=top).collect(),
        SpaceTag::Doubled => (0..=top)
            .flat_map(|m| (0..=top).map(move |n| pair_index(cutoff, m, n)))
            .collect(),
    }
}

/// Operator on an `N`-level space or on the doubled `N^2`-level space.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator<T: Real> {
    matrix: DMatrix<Complex<T>>,
    cutoff: usize,
    space: SpaceTag,
}

fn check_cutoff(n: usize, min: usize) -> FockResult<()> {
    if n < min {
        Err(FockError::Cutoff { got: n, min })
    } else {
        Ok(())
    }
}

impl<T: Real> TruncatedOperator<T> {
    pub fn new(matrix: DMatrix<Complex<T>>, cutoff: usize, space: SpaceTag) -> FockResult<Self> {
        let d = space.dim(cutoff);
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(FockError::Dimension(format!(
                "{}x{} matrix for a {space:?} space with cutoff {cutoff}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            matrix,
            cutoff,
            space,
        })
    }

    pub fn zeros(cutoff: usize, space: SpaceTag) -> Self {
        let d = space.dim(cutoff);
        Self {
            matrix: DMatrix::zeros(d, d),
            cutoff,
            space,
        }
    }

    pub fn identity(cutoff: usize, space: SpaceTag) -> Self {
        let d = space.dim(cutoff);
        Self {
            matrix: DMatrix::identity(d, d),
            cutoff,
            space,
        }
    }

    pub fn from_diagonal(cutoff: usize, diag: impl Fn(usize) -> Complex<T>) -> Self {
        let m = DMatrix::from_fn(cutoff, cutoff, |i, j| {
            if i == j {
                diag(i)
            } else {
                Complex::zero()
            }
        });
        Self {
            matrix: m,
            cutoff,
            space: SpaceTag::Single,
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.matrix
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn space(&self) -> SpaceTag {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.matrix[(i, j)]
    }

    fn compatible(&self, other: &Self) -> FockResult<()> {
        if self.cutoff != other.cutoff || self.space != other.space {
            return Err(FockError::Dimension(format!(
                "{:?}/{} against {:?}/{}",
                self.space, self.cutoff, other.space, other.cutoff
            )));
        }
        Ok(())
    }

    fn with_matrix(&self, matrix: DMatrix<Complex<T>>) -> Self {
        Self {
            matrix,
            cutoff: self.cutoff,
            space: self.space,
        }
    }

    pub fn add(&self, other: &Self) -> FockResult<Self> {
        self.compatible(other)?;
        Ok(self.with_matrix(&self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &Self) -> FockResult<Self> {
        self.compatible(other)?;
        Ok(self.with_matrix(&self.matrix - &other.matrix))
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.with_matrix(self.matrix.map(|z| z * c))
    }

    pub fn scale_real(&self, r: T) -> Self {
        self.scale(Complex::new(r, T::zero()))
    }

    /// Product `self * other`, skipping structural zeros (ladder operators are very sparse).
    pub fn mul(&self, other: &Self) -> FockResult<Self> {
        self.compatible(other)?;
        Ok(self.with_matrix(sparse_mul(&self.matrix, &other.matrix)))
    }

    pub fn adjoint(&self) -> Self {
        self.with_matrix(self.matrix.adjoint())
    }

    pub fn transpose(&self) -> Self {
        self.with_matrix(self.matrix.transpose())
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> FockResult<Self> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// `[A, B]_+ = AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> FockResult<Self> {
        self.mul(other)?.add(&other.mul(self)?)
    }

    pub fn apply(&self, psi: &StateVector<T>) -> FockResult<StateVector<T>> {
        if psi.cutoff() != self.cutoff || psi.space() != self.space {
            return Err(FockError::Dimension(
                "operator and state live on different spaces".into(),
            ));
        }
        let x = psi.amplitudes();
        let mut y = DVector::zeros(self.dim());
        for (k, xk) in x.iter().enumerate() {
            if xk.is_zero() {
                continue;
            }
            for (r, a) in self.matrix.column(k).iter().enumerate() {
                if !a.is_zero() {
                    y[r] += *a * *xk;
                }
            }
        }
        StateVector::new(y, self.cutoff, self.space)
    }

    pub fn max_abs(&self) -> T {
        self.matrix
            .iter()
            .fold(T::zero(), |m, z| m.max(z.norm_sqr().sqrt()))
    }

    /// `max |A_ij - B_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> FockResult<T> {
        self.compatible(other)?;
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm_sqr().sqrt())))
    }

    /// `max |A_ij|` over `i, j` in `indices`.
    pub fn max_abs_on(&self, indices: &[usize]) -> T {
        let mut m = T::zero();
        for &j in indices {
            for &i in indices {
                m = m.max(self.matrix[(i, j)].norm_sqr().sqrt());
            }
        }
        m
    }

    /// `max |A - A^dagger|`.
    pub fn hermitian_deviation(&self) -> T {
        let n = self.dim();
        let mut m = T::zero();
        for j in 0..n {
            for i in 0..=j {
                m = m.max(
                    (self.matrix[(i, j)] - self.matrix[(j, i)].conj())
                        .norm_sqr()
                        .sqrt(),
                );
            }
        }
        m
    }

    pub fn require_hermitian(&self, tol: T) -> FockResult<()> {
        let dev = self.hermitian_deviation();
        if dev > tol {
            return Err(FockError::NotHermitian(dev.to_f64_lossy()));
        }
        Ok(())
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    pub fn nnz(&self) -> usize {
        self.matrix.iter().filter(|z| !z.is_zero()).count()
    }

    /// Square sub-block on the given basis indices.
    pub fn sub_block(&self, indices: &[usize]) -> DMatrix<Complex<T>> {
        DMatrix::from_fn(indices.len(), indices.len(), |i, j| {
            self.matrix[(indices[i], indices[j])]
        })
    }
}

/// Annihilation operator, `a|n> = sqrt(n)|n-1>`.
pub fn annihilation<T: Real>(n: usize) -> FockResult<TruncatedOperator<T>> {
    check_cutoff(n, 2)?;
    let m = DMatrix::from_fn(n, n, |i, j| {
        if j == i + 1 {
            Complex::new(T::lit(j as f64).sqrt(), T::zero())
        } else {
            Complex::zero()
        }
    });
    TruncatedOperator::new(m, n, SpaceTag::Single)
}

/// Creation operator, `a^dagger|n> = sqrt(n+1)|n+1>`, zero on the top level.
pub fn creation<T: Real>(n: usize) -> FockResult<TruncatedOperator<T>> {
    Ok(annihilation(n)?.adjoint())
}

pub fn number<T: Real>(n: usize) -> FockResult<TruncatedOperator<T>> {
    check_cutoff(n, 2)?;
    Ok(TruncatedOperator::from_diagonal(n, |k| {
        Complex::new(T::lit(k as f64), T::zero())
    }))
}

/// `H = omega (N + 1/2)`.
pub fn oscillator_hamiltonian<T: Real>(n: usize, omega: T) -> FockResult<TruncatedOperator<T>> {
    check_cutoff(n, 2)?;
    if omega <= T::zero() {
        return Err(FockError::Parameter(
            "oscillator frequency must be positive".into(),
        ));
    }
    Ok(TruncatedOperator::from_diagonal(n, |k| {
        Complex::new(omega * (T::lit(k as f64) + T::lit(0.5)), T::zero())
    }))
}

/// Kronecker product `A (x) B` on the doubled space.
pub fn tensor<T: Real>(
    a: &TruncatedOperator<T>,
    b: &TruncatedOperator<T>,
) -> FockResult<TruncatedOperator<T>> {
    if a.space != SpaceTag::Single || b.space != SpaceTag::Single {
        return Err(FockError::Dimension(
            "tensor factors must be single-space operators".into(),
        ));
    }
    if a.cutoff != b.cutoff {
        return Err(FockError::Dimension(format!(
            "cutoffs {} and {}",
            a.cutoff, b.cutoff
        )));
    }
    let n = a.cutoff;
    let mut m = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let aij = a.matrix[(i, j)];
            if aij.is_zero() {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    let bkl = b.matrix[(k, l)];
                    if !bkl.is_zero() {
                        m[(pair_index(n, i, k), pair_index(n, j, l))] = aij * bkl;
                    }
                }
            }
        }
    }
    TruncatedOperator::new(m, n, SpaceTag::Doubled)
}

/// `A (x) 1`.
pub fn lift_left<T: Real>(a: &TruncatedOperator<T>) -> FockResult<TruncatedOperator<T>> {
    tensor(a, &TruncatedOperator::identity(a.cutoff, SpaceTag::Single))
}

/// `1 (x) A`.
pub fn lift_right<T: Real>(a: &TruncatedOperator<T>) -> FockResult<TruncatedOperator<T>> {
    tensor(&TruncatedOperator::identity(a.cutoff, SpaceTag::Single), a)
}

pub fn evolve<T: Real>(
    psi0: &StateVector<T>,
    h: &TruncatedOperator<T>,
    t: T,
) -> FockResult<StateVector<T>> {
    HermitianSpectrum::new(h)?.evolve(psi0, t)
}

/// `<psi|A|psi>`.
pub fn expectation<T: Real>(
    psi: &StateVector<T>,
    a: &TruncatedOperator<T>,
) -> FockResult<Complex<T>> {
    let ap = a.apply(psi)?;
    Ok(psi.inner(&ap))
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    type Op = TruncatedOperator<f64>;

    #[test]
    fn ladder_action() {
        let a = annihilation::<f64>(5).unwrap();
        let ad = creation::<f64>(5).unwrap();
        let vac = StateVector::basis(5, SpaceTag::Single, 0);
        assert_eq!(a.apply(&vac).unwrap().norm(), 0.0);
        assert_eq!(
            ad.apply(&vac).unwrap(),
            StateVector::basis(5, SpaceTag::Single, 1)
        );
        assert!(matches!(
            annihilation::<f64>(1),
            Err(FockError::Cutoff { got: 1, min: 2 })
        ));
    }

    #[test]
    fn hamiltonian_diagonal() {
        let h = oscillator_hamiltonian(6, 1.5).unwrap();
        for n in 0..6 {
            assert_eq!(h.entry(n, n).re, 1.5 * (n as f64 + 0.5));
        }
        assert!(oscillator_hamiltonian::<f64>(6, 0.0).is_err());
    }

    #[test]
    fn ccr_below_the_top_level() {
        let n = 12;
        let a = annihilation::<f64>(n).unwrap();
        let c = a.commutator(&a.adjoint()).unwrap();
        let inner: Vec<usize> = (0..n - 1).collect();
        let eye = Op::identity(n, SpaceTag::Single);
        assert!(c.sub(&eye).unwrap().max_abs_on(&inner) <= 1e-14);
        // the top level carries the truncation artifact 1 - N
        assert_abs_diff_eq!(c.entry(n - 1, n - 1).re, 1.0 - n as f64, epsilon = 1e-12);
    }

    #[test]
    fn tensor_conventions() {
        let n = 4;
        let eye = Op::identity(n, SpaceTag::Single);
        assert_eq!(
            tensor(&eye, &eye).unwrap(),
            Op::identity(n, SpaceTag::Doubled)
        );
        let a = annihilation::<f64>(n).unwrap();
        let l = lift_left(&a).unwrap();
        let r = lift_right(&a).unwrap();
        assert_eq!(l.commutator(&r).unwrap().max_abs(), 0.0);
        let t = tensor(&a, &a.adjoint()).unwrap();
        let psi = StateVector::basis(n, SpaceTag::Doubled, pair_index(n, 1, 0));
        assert_eq!(
            t.apply(&psi).unwrap(),
            StateVector::basis(n, SpaceTag::Doubled, pair_index(n, 0, 1))
        );
        assert!(tensor(&a, &annihilation(3).unwrap()).is_err());
    }

    #[test]
    fn mismatched_spaces_are_rejected() {
        let a = annihilation::<f64>(4).unwrap();
        let b = annihilation::<f64>(5).unwrap();
        assert!(a.add(&b).is_err());
        assert!(a.mul(&lift_left(&a).unwrap()).is_err());
    }

    #[test]
    fn interior_block_indices() {
        assert_eq!(interior_indices(4, SpaceTag::Single, 1), vec![0, 1]);
        assert_eq!(interior_indices(4, SpaceTag::Doubled, 1), vec![0, 1, 4, 5]);
        assert_eq!(pair_levels(4, 6), (1, 2));
    }

    #[test]
    fn two_level_rabi() {
        let h = Op::new(
            DMatrix::from_row_slice(
                2,
                2,
                &[
                    Complex::zero(),
                    Complex::new(1.0, 0.0),
                    Complex::new(1.0, 0.0),
                    Complex::zero(),
                ],
            ),
            2,
            SpaceTag::Single,
        )
        .unwrap();
        let num = number::<f64>(2).unwrap();
        let psi0 = StateVector::basis(2, SpaceTag::Single, 0);
        for t in [0.3, 1.1, 2.9] {
            let psi = evolve(&psi0, &h, t).unwrap();
            assert_abs_diff_eq!(
                expectation(&psi, &num).unwrap().re,
                t.sin().powi(2),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn evolve_rejects_non_hermitian() {
        let a = annihilation::<f64>(3).unwrap();
        let psi = StateVector::basis(3, SpaceTag::Single, 0);
        assert!(matches!(
            evolve(&psi, &a, 1.0),
            Err(FockError::NotHermitian(_))
        ));
    }
}
