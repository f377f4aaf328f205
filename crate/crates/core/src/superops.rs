//! Vectorized density matrices and the Liouville and energy super-operators on the doubled space.
//!
//! Vectorization is row-stacking, `vec[i * N + j] = rho_ij`, which pairs with the row-major
//! Kronecker convention of [`crate::fock`]: `(A (x) B) vec(rho) = vec(A rho B^T)`. Hence
//! `L = H (x) 1 - 1 (x) H^T` and `E = H (x) 1 + 1 (x) H^T`. For real symmetric `H` the
//! transpose is invisible.

use nalgebra::DVector;
use num_complex::Complex;
use serde::Serialize;

use crate::ccr::{duron_algebra, verify_table, Preset, TableReport};
use crate::fock::{
    lift_left, lift_right, FockError, FockResult, HermitianSpectrum, SpaceTag, StateVector,
    TruncatedOperator,
};
use crate::quantum::BilocalEvolver;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct VecDensity<T: Real> {
    data: DVector<Complex<T>>,
    n: usize,
}

impl<T: Real> VecDensity<T> {
    pub fn data(&self) -> &DVector<Complex<T>> {
        &self.data
    }

    pub fn shape(&self) -> usize {
        self.n
    }

    pub fn as_state(&self) -> StateVector<T> {
        StateVector::new(self.data.clone(), self.n, SpaceTag::Doubled).expect("length n^2")
    }

    /// `max |vec[j N + i] - conj(vec[i N + j])|`, zero for vectorized Hermitian matrices.
    pub fn swap_conjugation_deviation(&self) -> T {
        let n = self.n;
        let mut m = T::zero();
        for i in 0..n {
            for j in 0..n {
                m = m.max(
                    (self.data[j * n + i] - self.data[i * n + j].conj())
                        .norm_sqr()
                        .sqrt(),
                );
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(other.data.iter())
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm_sqr().sqrt()))
    }
}

pub fn vectorize<T: Real>(rho: &TruncatedOperator<T>) -> FockResult<VecDensity<T>> {
    if rho.space() != SpaceTag::Single {
        return Err(FockError::Dimension(
            "only single-space matrices are vectorized".into(),
        ));
    }
    let n = rho.cutoff();
    let m = rho.matrix();
    Ok(VecDensity {
        data: DVector::from_fn(n * n, |k, _| m[(k / n, k % n)]),
        n,
    })
}

pub fn devectorize<T: Real>(v: &VecDensity<T>) -> TruncatedOperator<T> {
    let n = v.n;
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| v.data[i * n + j]);
    TruncatedOperator::new(m, n, SpaceTag::Single).expect("square")
}

fn check_hermitian<T: Real>(h: &TruncatedOperator<T>) -> FockResult<()> {
    if h.space() != SpaceTag::Single {
        return Err(FockError::Dimension(
            "super-operators are built from single-space Hamiltonians".into(),
        ));
    }
    h.require_hermitian(T::lit(1e-10))
}

/// `L = H (x) 1 - 1 (x) H^T`, so that `L vec(rho) = vec(H rho - rho H)`.
pub fn liouvillian<T: Real>(h: &TruncatedOperator<T>) -> FockResult<TruncatedOperator<T>> {
    check_hermitian(h)?;
    lift_left(h)?.sub(&lift_right(&h.transpose())?)
}

/// `E = H (x) 1 + 1 (x) H^T`, so that `E vec(rho) = vec(H rho + rho H)`.
pub fn energy_superop<T: Real>(h: &TruncatedOperator<T>) -> FockResult<TruncatedOperator<T>> {
    check_hermitian(h)?;
    lift_left(h)?.add(&lift_right(&h.transpose())?)
}

pub fn apply<T: Real>(s: &TruncatedOperator<T>, v: &VecDensity<T>) -> FockResult<VecDensity<T>> {
    let out = s.apply(&v.as_state())?;
    Ok(VecDensity {
        data: out.amplitudes().clone(),
        n: v.n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumCheck {
    /// Largest mismatch between the sorted spectrum of `L` and the sorted `E_i - E_j`.
    pub liouvillian: f64,
    /// Same for the energy super-operator against `E_i + E_j`.
    pub energy: f64,
}

fn sorted_diff(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn spectrum_check<T: Real>(h: &TruncatedOperator<T>) -> FockResult<SpectrumCheck> {
    let e: Vec<f64> = HermitianSpectrum::new(h)?
        .eigenvalues()
        .into_iter()
        .map(Real::to_f64_lossy)
        .collect();
    let diffs: Vec<f64> = e
        .iter()
        .flat_map(|a| e.iter().map(move |b| a - b))
        .collect();
    let sums: Vec<f64> = e
        .iter()
        .flat_map(|a| e.iter().map(move |b| a + b))
        .collect();
    let spec = |s: TruncatedOperator<T>| -> FockResult<Vec<f64>> {
        Ok(HermitianSpectrum::new(&s)?
            .eigenvalues()
            .into_iter()
            .map(Real::to_f64_lossy)
            .collect())
    };
    Ok(SpectrumCheck {
        liouvillian: sorted_diff(spec(liouvillian(h)?)?, diffs),
        energy: sorted_diff(spec(energy_superop(h)?)?, sums),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvolutionCheck {
    /// `max |exp(-iLt) vec(rho0) - vec(U rho0 U^dagger)|`.
    pub deviation: f64,
    /// `| ||exp(-iLt) vec(rho0)|| - ||vec(rho0)|| |`.
    pub norm_drift: f64,
}

pub fn evolution_check<T: Real>(
    h: &TruncatedOperator<T>,
    rho0: &TruncatedOperator<T>,
    t: T,
) -> FockResult<EvolutionCheck> {
    let l = liouvillian(h)?;
    let v0 = vectorize(rho0)?;
    let vt = HermitianSpectrum::new(&l)?.evolve(&v0.as_state(), t)?;
    let u = HermitianSpectrum::new(h)?.propagator(t);
    let two_sided = vectorize(&u.mul(rho0)?.mul(&u.adjoint())?)?;
    let vt = VecDensity {
        data: vt.amplitudes().clone(),
        n: v0.n,
    };
    let norm = |v: &VecDensity<T>| v.as_state().recomputed_norm().to_f64_lossy();
    Ok(EvolutionCheck {
        deviation: vt.max_abs_diff(&two_sided).to_f64_lossy(),
        norm_drift: (norm(&vt) - norm(&v0)).abs(),
    })
}

/// `max |i (vec rho(t + h/2) - vec rho(t - h/2)) / h - L vec rho(t)|` with `rho(t) = |psi(t)><psi(t)|`.
pub fn vec_liouville_residual<T: Real>(
    psi0: &StateVector<T>,
    h_op: &TruncatedOperator<T>,
    t: T,
    h: T,
) -> FockResult<T> {
    let ev = BilocalEvolver::new(psi0, h_op)?;
    let l = liouvillian(h_op)?;
    let half = h * T::lit(0.5);
    let v = |s: T| -> FockResult<VecDensity<T>> { vectorize(&ev.density_mid(s, T::zero())?) };
    let (minus, mid, plus) = (v(t - half)?, v(t)?, v(t + half)?);
    let lv = apply(&l, &mid)?;
    let scale = Complex::new(T::zero(), T::one() / h);
    Ok((0..mid.data.len()).fold(T::zero(), |m, k| {
        let r = (plus.data[k] - minus.data[k]) * scale - lv.data[k];
        m.max(r.norm_sqr().sqrt())
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct AgeDuronReport {
    /// Brackets of `T = t1 + t2`, `tau = t1 - t2`, `E = h1 + h2`, `eps = h1 - h2` derived from
    /// two time copies, the second with reversed sign.
    pub coproduct_table: TableReport,
    /// The same brackets in the algebra that takes them as axioms.
    pub axiomatic_table: TableReport,
    /// Both tables agree entry by entry.
    pub consistent: bool,
    pub age_operator: String,
    pub pass: bool,
}

pub fn age_duron_symbolic() -> AgeDuronReport {
    let coproduct_table = verify_table(Preset::TimeDuron);
    let (_, axiomatic_table) = duron_algebra();
    let consistent = coproduct_table.entries.len() == axiomatic_table.entries.len()
        && coproduct_table
            .entries
            .iter()
            .zip(&axiomatic_table.entries)
            .all(|(a, b)| a.lhs == b.lhs && a.rhs_computed == b.rhs_computed);
    let pass = consistent && coproduct_table.all_pass() && axiomatic_table.all_pass();
    AgeDuronReport {
        coproduct_table,
        axiomatic_table,
        consistent,
        age_operator: "symbolic only: Tr[T, L] = 0 for any finite matrices while Tr(i 1) = iN, so [T, L] = i has no finite-dimensional realization".into(),
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::oscillator_hamiltonian;
    use crate::rng::Rng;

    fn random_rho(rng: &mut Rng, n: usize) -> TruncatedOperator<f64> {
        let psi = rng.state::<f64>(n).unwrap();
        let a = psi.amplitudes();
        TruncatedOperator::new(
            nalgebra::DMatrix::from_fn(n, n, |i, j| a[i] * a[j].conj()),
            n,
            SpaceTag::Single,
        )
        .unwrap()
    }

    #[test]
    fn vectorization_round_trip() {
        let mut rng = Rng::new(11);
        let rho = random_rho(&mut rng, 4);
        let v = vectorize(&rho).unwrap();
        assert_eq!(devectorize(&v), rho);
        assert_eq!(v.swap_conjugation_deviation(), 0.0);
        assert_eq!(v.data()[4 + 2], rho.entry(1, 2));
    }

    #[test]
    fn diagonal_hamiltonian_gives_diagonal_liouvillian() {
        let h = oscillator_hamiltonian::<f64>(3, 1.0).unwrap();
        let l = liouvillian(&h).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.entry(i * 3 + j, i * 3 + j).re, i as f64 - j as f64);
            }
        }
        assert_eq!(l.nnz(), 6);
    }

    #[test]
    fn commutator_action_for_complex_hamiltonian() {
        let mut rng = Rng::new(5);
        let h = rng.hermitian::<f64>(4);
        let rho = rng.hermitian::<f64>(4);
        let lv = apply(&liouvillian(&h).unwrap(), &vectorize(&rho).unwrap()).unwrap();
        let direct = vectorize(&h.commutator(&rho).unwrap()).unwrap();
        assert!(lv.max_abs_diff(&direct) <= 1e-12);
        let ev = apply(&energy_superop(&h).unwrap(), &vectorize(&rho).unwrap()).unwrap();
        let direct = vectorize(&h.anticommutator(&rho).unwrap()).unwrap();
        assert!(ev.max_abs_diff(&direct) <= 1e-12);
    }

    #[test]
    fn spectra_and_evolution() {
        let mut rng = Rng::new(8);
        let h = rng.hermitian::<f64>(5);
        let s = spectrum_check(&h).unwrap();
        assert!(s.liouvillian <= 1e-9 && s.energy <= 1e-9, "{s:?}");
        let e = evolution_check(&h, &random_rho(&mut rng, 5), 0.8).unwrap();
        assert!(e.deviation <= 1e-9 && e.norm_drift <= 1e-10, "{e:?}");
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let a = crate::fock::annihilation::<f64>(3).unwrap();
        assert!(matches!(liouvillian(&a), Err(FockError::NotHermitian(_))));
    }

    #[test]
    fn duron_table() {
        let rep = age_duron_symbolic();
        assert!(rep.pass);
        assert_eq!(
            rep.coproduct_table.entry("[tau,E]").unwrap().rhs_computed,
            "i"
        );
        assert_eq!(
            rep.coproduct_table.entry("[T,E]").unwrap().rhs_computed,
            "0"
        );
    }
}
