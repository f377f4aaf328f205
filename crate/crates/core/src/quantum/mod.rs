//! The two-time density `rho(t1, t2) = |psi(t1)><psi(t2)|`, its Liouville and energy limits,
//! and the polar (quantum Hamilton-Jacobi) form on a one-dimensional grid.

mod polar;
mod tridiag;

use nalgebra::DMatrix;
use num_complex::Complex;

pub use polar::{
    polar_decompose, quantum_hj_residual, Grid1d, GridPropagator, PolarField, QhjReport,
};
pub use tridiag::TridiagEigen;

use crate::fock::{FockError, FockResult, HermitianSpectrum, StateVector, TruncatedOperator};
use crate::scalar::Real;

/// `|psi(t1)><psi(t2)|` with `psi(t) = exp(-iHt) psi0`.
#[derive(Debug, Clone)]
pub struct BilocalDensity<T: Real> {
    pub base_state: StateVector<T>,
    pub hamiltonian: TruncatedOperator<T>,
    pub t1: T,
    pub t2: T,
    pub matrix: TruncatedOperator<T>,
}

fn outer<T: Real>(ket: &StateVector<T>, bra: &StateVector<T>) -> TruncatedOperator<T> {
    let (k, b) = (ket.amplitudes(), bra.amplitudes());
    let m = DMatrix::from_fn(k.len(), b.len(), |i, j| k[i] * b[j].conj());
    TruncatedOperator::new(m, ket.cutoff(), ket.space()).expect("matching state spaces")
}

fn require_normalized<T: Real>(psi: &StateVector<T>) -> FockResult<()> {
    if (psi.norm() - T::one()).abs() > T::lit(1e-10) {
        return Err(FockError::Parameter(format!(
            "state must be normalized, norm is {}",
            psi.norm().to_f64_lossy()
        )));
    }
    Ok(())
}

/// Evolves one base state under a fixed Hamiltonian; the spectrum is computed once.
pub struct BilocalEvolver<T: Real> {
    psi0: StateVector<T>,
    h: TruncatedOperator<T>,
    spectrum: HermitianSpectrum<T>,
}

impl<T: Real> BilocalEvolver<T> {
    pub fn new(psi0: &StateVector<T>, h: &TruncatedOperator<T>) -> FockResult<Self> {
        require_normalized(psi0)?;
        let spectrum = HermitianSpectrum::new(h)?;
        Ok(Self {
            psi0: psi0.clone(),
            h: h.clone(),
            spectrum,
        })
    }

    pub fn state(&self, t: T) -> FockResult<StateVector<T>> {
        self.spectrum.evolve(&self.psi0, t)
    }

    pub fn density(&self, t1: T, t2: T) -> FockResult<BilocalDensity<T>> {
        let matrix = outer(&self.state(t1)?, &self.state(t2)?);
        Ok(BilocalDensity {
            base_state: self.psi0.clone(),
            hamiltonian: self.h.clone(),
            t1,
            t2,
            matrix,
        })
    }

    /// `rho(T - dt/2, T + dt/2)`.
    pub fn density_mid(&self, t_mid: T, dt: T) -> FockResult<TruncatedOperator<T>> {
        let half = dt * T::lit(0.5);
        Ok(self.density(t_mid - half, t_mid + half)?.matrix)
    }
}

pub fn bilocal<T: Real>(
    psi0: &StateVector<T>,
    h: &TruncatedOperator<T>,
    t1: T,
    t2: T,
) -> FockResult<BilocalDensity<T>> {
    BilocalEvolver::new(psi0, h)?.density(t1, t2)
}

/// `max |i (rho(t + h/2) - rho(t - h/2)) / h - [H, rho]|` from three density samples.
///
/// The form `i d(rho)/dt = H rho - rho H` is the one the Schrodinger pair produces. An
/// intermediate form `rho H2 - rho H1` also circulates; it disagrees with this ordering.
pub fn liouville_residual_from<T: Real>(
    rho_minus: &TruncatedOperator<T>,
    rho: &TruncatedOperator<T>,
    rho_plus: &TruncatedOperator<T>,
    h_op: &TruncatedOperator<T>,
    h: T,
) -> FockResult<T> {
    let deriv = rho_plus
        .sub(rho_minus)?
        .scale(Complex::new(T::zero(), T::one() / h));
    Ok(deriv.add(&rho.commutator(h_op)?)?.max_abs())
}

/// Central-difference residual of `i d(rho)/dT + [rho, H] = 0` at `dt = 0`; expected `O(h^2)`.
pub fn liouville_residual<T: Real>(
    psi0: &StateVector<T>,
    h_op: &TruncatedOperator<T>,
    t: T,
    h: T,
) -> FockResult<T> {
    if h <= T::zero() {
        return Err(FockError::Parameter(
            "finite-difference step must be positive".into(),
        ));
    }
    let ev = BilocalEvolver::new(psi0, h_op)?;
    let half = h * T::lit(0.5);
    let zero = T::zero();
    liouville_residual_from(
        &ev.density_mid(t - half, zero)?,
        &ev.density_mid(t, zero)?,
        &ev.density_mid(t + half, zero)?,
        h_op,
        h,
    )
}

#[derive(Debug, Clone)]
pub struct EnergyReport<T: Real> {
    /// `[rho, H]_+` at `t1 = t2 = t`.
    pub anticommutator: TruncatedOperator<T>,
    /// `Tr([rho, H]_+) / 2`.
    pub half_trace: T,
    /// `<psi|H|psi>`, computed directly.
    pub expectation: T,
}

pub fn energy_anticommutator<T: Real>(
    psi0: &StateVector<T>,
    h_op: &TruncatedOperator<T>,
    t: T,
) -> FockResult<EnergyReport<T>> {
    let ev = BilocalEvolver::new(psi0, h_op)?;
    let rho = ev.density(t, t)?.matrix;
    let anticommutator = rho.anticommutator(h_op)?;
    let half_trace = anticommutator.trace().re * T::lit(0.5);
    let psi = ev.state(t)?;
    let expectation = crate::fock::expectation(&psi, h_op)?.re;
    Ok(EnergyReport {
        anticommutator,
        half_trace,
        expectation,
    })
}

/// `max |2i d(rho)/d(dt) + [rho, H]_+|` at `dt = 0` by central differences in `dt`.
pub fn delta_t_residual<T: Real>(
    psi0: &StateVector<T>,
    h_op: &TruncatedOperator<T>,
    t: T,
    h: T,
) -> FockResult<T> {
    if h <= T::zero() {
        return Err(FockError::Parameter(
            "finite-difference step must be positive".into(),
        ));
    }
    let ev = BilocalEvolver::new(psi0, h_op)?;
    let half = h * T::lit(0.5);
    let plus = ev.density_mid(t, half)?;
    let minus = ev.density_mid(t, -half)?;
    let rho = ev.density_mid(t, T::zero())?;
    let deriv = plus
        .sub(&minus)?
        .scale(Complex::new(T::zero(), T::lit(2.0) / h));
    Ok(deriv.add(&rho.anticommutator(h_op)?)?.max_abs())
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    use super::*;
    use crate::fock::{oscillator_hamiltonian, SpaceTag};

    fn superposition(n: usize) -> StateVector<f64> {
        let mut v = DVector::zeros(n);
        v[0] = Complex::new(1.0, 0.0);
        v[1] = Complex::new(1.0, 0.0);
        StateVector::new(v, n, SpaceTag::Single)
            .unwrap()
            .normalized()
            .unwrap()
    }

    #[test]
    fn coincident_density_is_a_projector() {
        let h = oscillator_hamiltonian(6, 1.0).unwrap();
        let rho = bilocal(&superposition(6), &h, 0.0, 0.0).unwrap().matrix;
        assert!(rho.mul(&rho).unwrap().max_abs_diff(&rho).unwrap() < 1e-12);
        assert_abs_diff_eq!(rho.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigenstate_phase_factorizes() {
        let h = oscillator_hamiltonian(5, 1.0).unwrap();
        let psi = StateVector::basis(5, SpaceTag::Single, 2);
        let rho = bilocal(&psi, &h, 0.7, 0.2).unwrap().matrix;
        let phase = -2.5 * 0.5;
        let z = rho.entry(2, 2);
        assert_abs_diff_eq!(z.re, f64::cos(phase), epsilon = 1e-14);
        assert_abs_diff_eq!(z.im, f64::sin(phase), epsilon = 1e-14);
    }

    #[test]
    fn two_level_off_diagonal() {
        let h = oscillator_hamiltonian(2, 1.0).unwrap();
        let (t1, t2) = (0.4, 1.3);
        let rho = bilocal(&superposition(2), &h, t1, t2).unwrap().matrix;
        // <0|rho|1> = (1/2) exp(-i t1 / 2) exp(+i 3 t2 / 2)
        let arg = -0.5 * t1 + 1.5 * t2;
        assert_abs_diff_eq!(rho.entry(0, 1).re, 0.5 * f64::cos(arg), epsilon = 1e-14);
        assert_abs_diff_eq!(rho.entry(0, 1).im, 0.5 * f64::sin(arg), epsilon = 1e-14);
    }

    #[test]
    fn stationary_state_has_no_liouville_residual() {
        let h = oscillator_hamiltonian(5, 1.0).unwrap();
        let psi = StateVector::basis(5, SpaceTag::Single, 3);
        for step in [1e-1, 1e-3] {
            assert!(liouville_residual(&psi, &h, 0.3, step).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn superposition_converges_at_second_order() {
        let h = oscillator_hamiltonian(4, 1.0).unwrap();
        let psi = superposition(4);
        let coarse = liouville_residual(&psi, &h, 0.3, 1e-2).unwrap();
        let fine = liouville_residual(&psi, &h, 0.3, 5e-3).unwrap();
        let ratio = coarse / fine;
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }

    #[test]
    fn energy_of_even_superposition() {
        let h = oscillator_hamiltonian(4, 1.0).unwrap();
        let rep = energy_anticommutator(&superposition(4), &h, 0.8).unwrap();
        assert_abs_diff_eq!(rep.half_trace, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.expectation, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigenstate_anticommutator() {
        let h = oscillator_hamiltonian(5, 1.0).unwrap();
        let psi = StateVector::basis(5, SpaceTag::Single, 1);
        let rep = energy_anticommutator(&psi, &h, 0.2).unwrap();
        let rho = bilocal(&psi, &h, 0.2, 0.2).unwrap().matrix;
        assert!(
            rep.anticommutator
                .max_abs_diff(&rho.scale_real(3.0))
                .unwrap()
                < 1e-12
        );
        // the central difference of exp(i E dt) carries an E^3 h^2 / 24 error
        assert!(delta_t_residual(&psi, &h, 0.2, 1e-3).unwrap() < 1e-6);
    }

    #[test]
    fn unnormalized_state_is_rejected() {
        let h = oscillator_hamiltonian(3, 1.0).unwrap();
        let psi = StateVector::basis(3, SpaceTag::Single, 0).scale(Complex::new(2.0, 0.0));
        assert!(bilocal(&psi, &h, 0.0, 0.0).is_err());
    }
}
