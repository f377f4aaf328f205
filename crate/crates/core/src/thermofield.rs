//! Thermofield doubling on the truncated two-mode Fock space.
//!
//! The second copy uses standard bosons, `[a~, a~^dagger] = 1`. The Bogoliubov generator
//! `G = -i(a^dagger a~^dagger - a a~)` then produces the normalizable two-mode squeezed vacuum
//! `|0(theta)> = exp(i theta G)|0,0> = sum_n tanh^n(theta) / cosh(theta) |n,n>`.
//!
//! Truncation claims are made on an interior block. State checks use levels `<= N/2`. Operator
//! conjugations additionally require the truncated unitary to leak less than the tolerance onto
//! the top two levels, see [`certified_level`].

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;
use serde::Serialize;

use crate::fock::{
    annihilation, creation, expm, expm_apply, lift_left, lift_right, number,
    oscillator_hamiltonian, pair_index, pair_levels, FockError, FockResult, SpaceTag, StateVector,
    TruncatedOperator,
};
use crate::scalar::Real;

type Op<T> = TruncatedOperator<T>;
type CMat<T> = DMatrix<Complex<T>>;

/// Largest `tanh^(2N)|theta|` accepted as an adequate cutoff.
pub const CUTOFF_ADEQUACY: f64 = 1e-9;

/// Residual accepted from the block exponentials used here.
const EXPM_TOL: f64 = 1e-12;

/// Label carried by every output that relies on `tanh(theta) = exp(-beta omega / 2)`.
pub const CORRESPONDENCE_LABEL: &str = "derived correspondence";

fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Smallest cutoff with `tanh^(2N)|theta| <= CUTOFF_ADEQUACY`, never below 4.
pub fn required_cutoff<T: Real>(theta: T) -> usize {
    let t = theta.abs().tanh().to_f64_lossy();
    if t <= 0.0 {
        return 4;
    }
    if t >= 1.0 {
        return usize::MAX;
    }
    let n = (CUTOFF_ADEQUACY.ln() / (2.0 * t.ln())).ceil();
    (n as usize).max(4)
}

/// Fails with a cutoff error naming the required `N` when the cutoff is inadequate for `theta`.
pub fn check_cutoff<T: Real>(theta: T, n: usize) -> FockResult<()> {
    if !theta.is_finite() {
        return Err(FockError::Parameter("theta must be finite".into()));
    }
    let min = required_cutoff(theta);
    if n < min {
        return Err(FockError::Cutoff { got: n, min });
    }
    Ok(())
}

/// `a (x) 1` and `1 (x) a`.
fn doubled_ladders<T: Real>(n: usize) -> FockResult<(Op<T>, Op<T>)> {
    let a = annihilation(n)?;
    Ok((lift_left(&a)?, lift_right(&a)?))
}

/// `G = -i(a^dagger (x) a~^dagger - a (x) a~)`.
pub fn bogoliubov_generator<T: Real>(n: usize) -> FockResult<Op<T>> {
    if n < 4 {
        return Err(FockError::Cutoff { got: n, min: 4 });
    }
    let a = annihilation::<T>(n)?;
    let ad = creation::<T>(n)?;
    let pair = crate::fock::tensor(&ad, &ad)?.sub(&crate::fock::tensor(&a, &a)?)?;
    Ok(pair.scale(Complex::new(T::zero(), -T::one())))
}

/// `exp(i theta G)`, block by block.
pub fn squeeze_unitary<T: Real>(theta: T, n: usize) -> FockResult<Op<T>> {
    let g = bogoliubov_generator::<T>(n)?;
    expm(&g.scale(Complex::new(T::zero(), theta)), T::lit(EXPM_TOL))
}

#[derive(Debug, Clone)]
pub struct ThetaVacuum<T: Real> {
    pub theta: T,
    pub cutoff: usize,
    pub state: StateVector<T>,
    /// `c_n = <n,n|0(theta)>`.
    pub coefficients: Vec<T>,
}

impl<T: Real> ThetaVacuum<T> {
    /// Largest `|<m,n|0(theta)>|` with `m != n` and both levels `<= level`.
    pub fn off_diagonal_max(&self, level: usize) -> T {
        let n = self.cutoff;
        let top = level.min(n - 1);
        let mut m = T::zero();
        for i in 0..=top {
            for j in 0..=top {
                if i != j {
                    m = m.max(self.state.amplitude(pair_index(n, i, j)).norm_sqr().sqrt());
                }
            }
        }
        m
    }

    /// Reduced density over the first factor, `rho_mn = sum_k psi_{m,k} conj(psi_{n,k})`.
    pub fn reduced_density(&self) -> CMat<T> {
        let n = self.cutoff;
        let psi = self.state.amplitudes();
        DMatrix::from_fn(n, n, |m, l| {
            (0..n).fold(Complex::zero(), |acc, k| {
                acc + psi[pair_index(n, m, k)] * psi[pair_index(n, l, k)].conj()
            })
        })
    }

    /// `<0(theta)| A (x) 1 |0(theta)>`.
    pub fn expectation_left(&self, a: &Op<T>) -> FockResult<Complex<T>> {
        crate::fock::expectation(&self.state, &lift_left(a)?)
    }

    pub fn mean_occupation(&self) -> FockResult<T> {
        Ok(self.expectation_left(&number(self.cutoff)?)?.re)
    }

    /// Norms of `a(theta)|0(theta)>` and `a~(theta)|0(theta)>` on levels `<= level`, from the
    /// ladder actions on the amplitudes (no doubled-space matrices are formed).
    pub fn annihilation_norms(&self, level: usize) -> (T, T) {
        let n = self.cutoff;
        let top = level.min(n - 1);
        let (c, s) = (self.theta.cosh(), self.theta.sinh());
        let amp = |m: usize, k: usize| {
            if m < n && k < n {
                self.state.amplitude(pair_index(n, m, k))
            } else {
                Complex::zero()
            }
        };
        let sq = |k: usize| T::lit(k as f64).sqrt();
        let (mut left, mut right) = (T::zero(), T::zero());
        for m in 0..=top {
            for k in 0..=top {
                // a (x) 1 lowers m; 1 (x) a~^dagger raises k
                let raised_k = if k > 0 {
                    amp(m, k - 1) * sq(k)
                } else {
                    Complex::zero()
                };
                let x = amp(m + 1, k) * sq(m + 1) * c - raised_k * s;
                let raised_m = if m > 0 {
                    amp(m - 1, k) * sq(m)
                } else {
                    Complex::zero()
                };
                let y = amp(m, k + 1) * sq(k + 1) * c - raised_m * s;
                left += x.norm_sqr();
                right += y.norm_sqr();
            }
        }
        (left.sqrt(), right.sqrt())
    }
}

/// `|0(theta)> = exp(i theta G)|0,0>` after the cutoff-adequacy check.
pub fn theta_vacuum<T: Real>(theta: T, n: usize) -> FockResult<ThetaVacuum<T>> {
    check_cutoff(theta, n)?;
    let g = bogoliubov_generator::<T>(n)?;
    let vac = StateVector::vacuum(n, SpaceTag::Doubled);
    let state = expm_apply(
        &g.scale(Complex::new(T::zero(), theta)),
        &vac,
        T::lit(EXPM_TOL),
    )?;
    let coefficients = (0..n)
        .map(|k| state.amplitude(pair_index(n, k, k)).re)
        .collect();
    Ok(ThetaVacuum {
        theta,
        cutoff: n,
        state,
        coefficients,
    })
}

/// Solves `tanh(theta) = exp(-beta omega / 2)` by bisection to `1e-12`.
pub fn theta_of_beta<T: Real>(beta: T, omega: T) -> FockResult<T> {
    let bw = beta * omega;
    if !(bw > T::zero()) || !bw.is_finite() {
        return Err(FockError::Parameter(
            "beta * omega must be positive and finite".into(),
        ));
    }
    let target = (-bw * T::lit(0.5)).exp();
    let (mut lo, mut hi) = (T::zero(), T::one());
    while hi.tanh() < target {
        hi *= T::lit(2.0);
        if hi > T::lit(64.0) {
            return Err(FockError::Parameter(
                "beta * omega too small to bracket theta".into(),
            ));
        }
    }
    let tol = T::lit(1e-12);
    while hi - lo > tol {
        let mid = (lo + hi) * T::lit(0.5);
        if mid.tanh() < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi) * T::lit(0.5))
}

#[derive(Debug, Clone, Serialize)]
pub struct ObservableMatch<T: Real + Serialize> {
    pub name: &'static str,
    pub vacuum: T,
    pub gibbs: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct GibbsReport<T: Real + Serialize> {
    pub label: &'static str,
    pub theta: T,
    pub beta: T,
    pub omega: T,
    pub cutoff: usize,
    /// `max_n |rho_nn - p_n|` against the normalized Gibbs weights on the truncated space.
    pub diagonal_deviation: T,
    /// Largest off-diagonal entry of the reduced density.
    pub off_diagonal_max: T,
    pub observables: Vec<ObservableMatch<T>>,
}

impl<T: Real + Serialize> GibbsReport<T> {
    pub fn max_observable_deviation(&self) -> T {
        self.observables
            .iter()
            .fold(T::zero(), |m, o| m.max((o.vacuum - o.gibbs).abs()))
    }
}

/// Compares the reduced state of `|0(theta)>` with `exp(-beta H) / Z` for `H = omega(N + 1/2)`.
pub fn gibbs_match<T: Real + Serialize>(
    theta: T,
    beta: T,
    omega: T,
    n: usize,
) -> FockResult<GibbsReport<T>> {
    if !(beta * omega > T::zero()) {
        return Err(FockError::Parameter("beta * omega must be positive".into()));
    }
    let vac = theta_vacuum(theta, n)?;
    let rho = vac.reduced_density();
    let weights: Vec<T> = (0..n)
        .map(|k| (-beta * omega * T::lit(k as f64)).exp())
        .collect();
    let z = weights.iter().fold(T::zero(), |s, &w| s + w);
    let p: Vec<T> = weights.iter().map(|&w| w / z).collect();
    let mut diagonal_deviation = T::zero();
    let mut off_diagonal_max = T::zero();
    for i in 0..n {
        for j in 0..n {
            let mag = if i == j {
                (rho[(i, i)] - re(p[i])).norm_sqr().sqrt()
            } else {
                rho[(i, j)].norm_sqr().sqrt()
            };
            if i == j {
                diagonal_deviation = diagonal_deviation.max(mag);
            } else {
                off_diagonal_max = off_diagonal_max.max(mag);
            }
        }
    }
    let a = annihilation::<T>(n)?;
    let observables = [
        ("number", number::<T>(n)?),
        ("a + a^dagger", a.add(&a.adjoint())?),
        ("hamiltonian", oscillator_hamiltonian(n, omega)?),
    ];
    let mut out = Vec::new();
    for (name, op) in observables {
        let vacuum = vac.expectation_left(&op)?.re;
        let gibbs = (0..n).fold(T::zero(), |s, k| s + p[k] * op.entry(k, k).re);
        out.push(ObservableMatch {
            name,
            vacuum,
            gibbs,
        });
    }
    Ok(GibbsReport {
        label: CORRESPONDENCE_LABEL,
        theta,
        beta,
        omega,
        cutoff: n,
        diagonal_deviation,
        off_diagonal_max,
        observables: out,
    })
}

/// `(A (x) 1 + 1 (x) A, A (x) 1 - 1 (x) A)`.
pub fn coproducts<T: Real>(a: &Op<T>) -> FockResult<(Op<T>, Op<T>)> {
    if a.space() != SpaceTag::Single {
        return Err(FockError::Dimension(
            "co-products take a single-space operator".into(),
        ));
    }
    let (l, r) = (lift_left(a)?, lift_right(a)?);
    Ok((l.add(&r)?, l.sub(&r)?))
}

/// `A = (a + a~) / sqrt 2` and `B = (a - a~) / sqrt 2`.
pub fn ab_operators<T: Real>(n: usize) -> FockResult<(Op<T>, Op<T>)> {
    let (plus, minus) = coproducts(&annihilation::<T>(n)?)?;
    let s = T::one() / T::lit(2.0).sqrt();
    Ok((plus.scale_real(s), minus.scale_real(s)))
}

/// Maximum deviations between the doubled phase-space operators and their rebuild from `A`, `B`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Reconstruction<T: Real + Serialize> {
    pub x_mean: T,
    pub p_mean: T,
    pub eta: T,
    pub pi: T,
}

impl<T: Real + Serialize> Reconstruction<T> {
    pub fn max(&self) -> T {
        self.x_mean.max(self.p_mean).max(self.eta).max(self.pi)
    }
}

/// Rebuilds `2X = x (x) 1 + 1 (x) x`, `2P = p (x) 1 + 1 (x) p`, `eta = x (x) 1 - 1 (x) x` and
/// `pi = p (x) 1 - 1 (x) p` from `A` and `B`, with `a = x + i p`.
///
/// The momentum rebuilds carry `-i`: `P = -i(A - A^dagger) / sqrt 8` and
/// `pi = -i(B - B^dagger) / sqrt 2`.
pub fn ab_reconstruction<T: Real + Serialize>(n: usize) -> FockResult<Reconstruction<T>> {
    let a = annihilation::<T>(n)?;
    let ad = a.adjoint();
    let half = T::lit(0.5);
    let x = a.add(&ad)?.scale_real(half);
    let p = a.sub(&ad)?.scale(Complex::new(T::zero(), -half));
    let (x_plus, x_minus) = coproducts(&x)?;
    let (p_plus, p_minus) = coproducts(&p)?;
    let (big_a, big_b) = ab_operators::<T>(n)?;
    let minus_i = Complex::new(T::zero(), -T::one());
    let r8 = T::one() / T::lit(8.0).sqrt();
    let r2 = T::one() / T::lit(2.0).sqrt();
    let x_rebuilt = big_a.add(&big_a.adjoint())?.scale_real(r8);
    let p_rebuilt = big_a.sub(&big_a.adjoint())?.scale(minus_i * r8);
    let eta_rebuilt = big_b.add(&big_b.adjoint())?.scale_real(r2);
    let pi_rebuilt = big_b.sub(&big_b.adjoint())?.scale(minus_i * r2);
    Ok(Reconstruction {
        x_mean: x_rebuilt.max_abs_diff(&x_plus.scale_real(half))?,
        p_mean: p_rebuilt.max_abs_diff(&p_plus.scale_real(half))?,
        eta: eta_rebuilt.max_abs_diff(&x_minus)?,
        pi: pi_rebuilt.max_abs_diff(&p_minus)?,
    })
}

/// `[2]_q = q^2 + q^-2` with `q = e^theta`, chosen so that `[2]_q = 2` at `theta = 0`.
pub fn q_two<T: Real>(theta: T) -> T {
    (theta * T::lit(2.0)).exp() + (-theta * T::lit(2.0)).exp()
}

/// `A_q = (e^theta a + e^-theta a~) / sqrt [2]_q` and `B_q = (e^theta a - e^-theta a~) / sqrt [2]_q`,
/// with `q = e^theta` treated as a central scalar.
pub fn deformed_coproduct<T: Real>(theta: T, n: usize) -> FockResult<(Op<T>, Op<T>)> {
    let (l, r) = doubled_ladders::<T>(n)?;
    let norm = T::one() / q_two(theta).sqrt();
    let (up, down) = (theta.exp(), (-theta).exp());
    let aq = l.scale_real(up).add(&r.scale_real(down))?.scale_real(norm);
    let bq = l.scale_real(up).sub(&r.scale_real(down))?.scale_real(norm);
    Ok((aq, bq))
}

#[derive(Debug, Clone, Serialize)]
pub struct DeformedReport<T: Real + Serialize> {
    /// `max |A_q(0) - A|`.
    pub limit_a: T,
    /// `max |B_q(0) - B|`.
    pub limit_b: T,
    pub step: T,
    /// `max |(A_q(h) - A_q(-h)) / 2h - B|` at `h` and `h/2`.
    pub derivative_residual: [T; 2],
    pub ratio: T,
}

/// Checks the `theta -> 0` limits and `B = dA_q/dtheta` at `theta = 0` by central differences.
pub fn deformed_check<T: Real + Serialize>(n: usize, h: T) -> FockResult<DeformedReport<T>> {
    if !(h > T::zero()) {
        return Err(FockError::Parameter(
            "finite-difference step must be positive".into(),
        ));
    }
    let (big_a, big_b) = ab_operators::<T>(n)?;
    let (a0, b0) = deformed_coproduct(T::zero(), n)?;
    let residual = |step: T| -> FockResult<T> {
        let (plus, _) = deformed_coproduct(step, n)?;
        let (minus, _) = deformed_coproduct(-step, n)?;
        plus.sub(&minus)?
            .scale_real(T::one() / (step * T::lit(2.0)))
            .max_abs_diff(&big_b)
    };
    let coarse = residual(h)?;
    let fine = residual(h * T::lit(0.5))?;
    Ok(DeformedReport {
        limit_a: a0.max_abs_diff(&big_a)?,
        limit_b: b0.max_abs_diff(&big_b)?,
        step: h,
        derivative_residual: [coarse, fine],
        ratio: coarse / fine,
    })
}

/// `a(theta) = a cosh(theta) - a~^dagger sinh(theta)` and `a~(theta) = a~ cosh(theta) - a^dagger sinh(theta)`.
pub fn theta_transform<T: Real>(theta: T, n: usize) -> FockResult<(Op<T>, Op<T>)> {
    let (l, r) = doubled_ladders::<T>(n)?;
    let (c, s) = (theta.cosh(), theta.sinh());
    let a_theta = l.scale_real(c).sub(&r.adjoint().scale_real(s))?;
    let at_theta = r.scale_real(c).sub(&l.adjoint().scale_real(s))?;
    Ok((a_theta, at_theta))
}

type Sparse<T> = Vec<Vec<(usize, Complex<T>)>>;

fn nonzero_rows<T: Real>(m: &CMat<T>, rows: &[usize]) -> Sparse<T> {
    rows.iter()
        .map(|&i| {
            (0..m.ncols())
                .filter(|&k| !m[(i, k)].is_zero())
                .map(|k| (k, m[(i, k)]))
                .collect()
        })
        .collect()
}

fn nonzero_columns<T: Real>(m: &CMat<T>) -> Sparse<T> {
    (0..m.ncols())
        .map(|j| {
            m.column(j)
                .iter()
                .enumerate()
                .filter_map(|(i, z)| (!z.is_zero()).then_some((i, *z)))
                .collect()
        })
        .collect()
}

/// `(U X V)` restricted to rows and columns in `idx`, touching only structural nonzeros.
fn block_triple<T: Real>(u: &CMat<T>, x: &CMat<T>, v: &CMat<T>, idx: &[usize]) -> CMat<T> {
    let u_rows = nonzero_rows(u, idx);
    let x_cols = nonzero_columns(x);
    let dim = x.nrows();
    let mut out = DMatrix::zeros(idx.len(), idx.len());
    let mut w = vec![Complex::<T>::zero(); dim];
    for (bj, &j) in idx.iter().enumerate() {
        w.iter_mut().for_each(|z| *z = Complex::zero());
        for (l, vl) in v.column(j).iter().enumerate() {
            if vl.is_zero() {
                continue;
            }
            for &(k, xkl) in &x_cols[l] {
                w[k] += xkl * *vl;
            }
        }
        for (bi, row) in u_rows.iter().enumerate() {
            out[(bi, bj)] = row
                .iter()
                .fold(Complex::zero(), |acc, &(k, ui)| acc + ui * w[k]);
        }
    }
    out
}

fn max_abs_diff_block<T: Real>(block: &CMat<T>, reference: &Op<T>, idx: &[usize]) -> T {
    let mut m = T::zero();
    for (bj, &j) in idx.iter().enumerate() {
        for (bi, &i) in idx.iter().enumerate() {
            m = m.max((block[(bi, bj)] - reference.entry(i, j)).norm_sqr().sqrt());
        }
    }
    m
}

/// `(U X U^dagger)` on the interior block of `level`, compared against `reference`.
pub fn conjugation_residual<T: Real>(u: &Op<T>, x: &Op<T>, reference: &Op<T>, level: usize) -> T {
    let idx = crate::fock::interior_indices(u.cutoff(), SpaceTag::Doubled, level);
    let ud = u.matrix().adjoint();
    let block = block_triple(u.matrix(), x.matrix(), &ud, &idx);
    max_abs_diff_block(&block, reference, &idx)
}

/// Largest level `L <= N/2` such that every basis state in the `L` block reaches the top two
/// levels through `U` or `U^dagger` with amplitude at most `tol`.
///
/// Conjugating by the truncated `U` is only trustworthy where it does not see the truncation
/// edge. The fixed `N/2` rule is too generous once `theta` grows: at `N = 50`, `theta = 0.6`
/// the conjugated ladder is already off by order one at level 16. Returns `None` when not even
/// the vacuum is certified.
pub fn certified_level<T: Real>(u: &Op<T>, tol: T) -> Option<usize> {
    let n = u.cutoff();
    let m = u.matrix();
    let is_top = |idx: usize| {
        let (p, q) = pair_levels(n, idx);
        p + 2 >= n || q + 2 >= n
    };
    let top: Vec<usize> = (0..n * n).filter(|&k| is_top(k)).collect();
    let leak = |j: usize| {
        top.iter().fold(T::zero(), |acc, &k| {
            acc.max(m[(k, j)].norm_sqr().sqrt())
                .max(m[(j, k)].norm_sqr().sqrt())
        })
    };
    let mut certified = None;
    for level in 0..=n / 2 {
        let worst = (0..=level)
            .flat_map(|p| [pair_index(n, p, level), pair_index(n, level, p)])
            .fold(T::zero(), |acc, j| acc.max(leak(j)));
        if worst > tol {
            break;
        }
        certified = Some(level);
    }
    certified
}

#[derive(Debug, Clone, Serialize)]
pub struct BogoliubovReport<T: Real + Serialize> {
    pub theta: T,
    pub cutoff: usize,
    /// Interior level certified for operator conjugation, see [`certified_level`].
    pub certified_level: Option<usize>,
    /// Closed form against `exp(i theta G)(a (x) 1)exp(-i theta G)` on the certified block.
    pub conjugation_residual: T,
    pub conjugation_residual_tilde: T,
    /// The same comparison on the `N/2` block, informational only.
    pub conjugation_residual_half: T,
    /// Norms of `a(theta)|0(theta)>` and `a~(theta)|0(theta)>` on levels `<= N/2`.
    pub annihilation_norm: T,
    pub annihilation_norm_tilde: T,
    /// `max |[a(theta), a(theta)^dagger] - 1|` on levels `<= N/2`.
    pub commutator_residual: T,
    /// `max_j | ||U e_j|| - 1 |`.
    pub unitarity_deviation: T,
}

fn projected_norm<T: Real>(psi: &StateVector<T>, idx: &[usize]) -> T {
    idx.iter()
        .fold(T::zero(), |s, &i| s + psi.amplitude(i).norm_sqr())
        .sqrt()
}

fn column_norm_deviation<T: Real>(u: &Op<T>) -> T {
    let m = u.matrix();
    (0..m.ncols()).fold(T::zero(), |acc, j| {
        let norm = m
            .column(j)
            .iter()
            .fold(T::zero(), |s, z| s + z.norm_sqr())
            .sqrt();
        acc.max((norm - T::one()).abs())
    })
}

/// Both routes to `a(theta)`, the annihilation of `|0(theta)>` and the ladder commutator.
pub fn verify_bogoliubov<T: Real + Serialize>(
    theta: T,
    n: usize,
    tol: T,
) -> FockResult<BogoliubovReport<T>> {
    let vac = theta_vacuum(theta, n)?;
    let (a_theta, at_theta) = theta_transform(theta, n)?;
    let (l, r) = doubled_ladders::<T>(n)?;
    let u = squeeze_unitary(theta, n)?;
    let certified = certified_level(&u, tol);
    let infinite = T::lit(f64::INFINITY);
    let (residual, residual_tilde) = match certified {
        Some(level) => (
            conjugation_residual(&u, &l, &a_theta, level),
            conjugation_residual(&u, &r, &at_theta, level),
        ),
        None => (infinite, infinite),
    };
    let half = n / 2;
    let residual_half = conjugation_residual(&u, &l, &a_theta, half);
    let interior = crate::fock::interior_indices(n, SpaceTag::Doubled, half);
    let annihilation_norm = projected_norm(&a_theta.apply(&vac.state)?, &interior);
    let annihilation_norm_tilde = projected_norm(&at_theta.apply(&vac.state)?, &interior);
    let identity = Op::identity(n, SpaceTag::Doubled);
    let comm = block_triple(
        a_theta.matrix(),
        &a_theta.matrix().adjoint(),
        identity.matrix(),
        &interior,
    ) - block_triple(
        &a_theta.matrix().adjoint(),
        a_theta.matrix(),
        identity.matrix(),
        &interior,
    );
    let commutator_residual = max_abs_diff_block(&comm, &identity, &interior);
    Ok(BogoliubovReport {
        theta,
        cutoff: n,
        certified_level: certified,
        conjugation_residual: residual,
        conjugation_residual_tilde: residual_tilde,
        conjugation_residual_half: residual_half,
        annihilation_norm,
        annihilation_norm_tilde,
        commutator_residual,
        unitarity_deviation: column_norm_deviation(&u),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupLawReport<T: Real + Serialize> {
    pub theta: T,
    pub theta_bar: T,
    pub cutoff: usize,
    pub certified_level: Option<usize>,
    /// `max |exp(i theta_bar G) a(theta) exp(-i theta_bar G) - a(theta + theta_bar)|` on the certified block.
    pub residual: T,
}

/// Conjugating `a(theta)` by `exp(i theta_bar G)` should give `a(theta + theta_bar)`.
pub fn group_law<T: Real + Serialize>(
    theta: T,
    theta_bar: T,
    n: usize,
    tol: T,
) -> FockResult<GroupLawReport<T>> {
    check_cutoff(theta + theta_bar, n)?;
    let (a_theta, _) = theta_transform(theta, n)?;
    let (a_sum, _) = theta_transform(theta + theta_bar, n)?;
    let u = squeeze_unitary(theta_bar, n)?;
    let certified = certified_level(&u, tol);
    let residual = match certified {
        Some(level) => conjugation_residual(&u, &a_theta, &a_sum, level),
        None => T::lit(f64::INFINITY),
    };
    Ok(GroupLawReport {
        theta,
        theta_bar,
        cutoff: n,
        certified_level: certified,
        residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivativeReport<T: Real + Serialize> {
    pub theta: T,
    pub step: T,
    /// `max |-i (a(theta + h) - a(theta - h)) / 2h - [G, a(theta)]|` on levels `<= N/2`, at `h` and `h/2`.
    pub residual: [T; 2],
    pub ratio: T,
    pub residual_tilde: [T; 2],
    pub ratio_tilde: T,
}

/// `-i da(theta)/dtheta = [G, a(theta)]` by central differences, for `a` and `a~`.
pub fn theta_derivative_check<T: Real + Serialize>(
    theta: T,
    n: usize,
    h: T,
) -> FockResult<DerivativeReport<T>> {
    if !(h > T::zero()) {
        return Err(FockError::Parameter(
            "finite-difference step must be positive".into(),
        ));
    }
    let g = bogoliubov_generator::<T>(n)?;
    let interior = crate::fock::interior_indices(n, SpaceTag::Doubled, n / 2);
    let identity = Op::<T>::identity(n, SpaceTag::Doubled);
    let (a_theta, at_theta) = theta_transform(theta, n)?;
    let commutator = |x: &Op<T>| {
        block_triple(g.matrix(), x.matrix(), identity.matrix(), &interior)
            - block_triple(x.matrix(), g.matrix(), identity.matrix(), &interior)
    };
    let (ga, gat) = (commutator(&a_theta), commutator(&at_theta));
    let residual = |step: T| -> FockResult<(T, T)> {
        let (ap, atp) = theta_transform(theta + step, n)?;
        let (am, atm) = theta_transform(theta - step, n)?;
        let scale = Complex::new(T::zero(), -T::one() / (step * T::lit(2.0)));
        let da = ap.sub(&am)?.scale(scale);
        let dat = atp.sub(&atm)?.scale(scale);
        let diff = |fd: &Op<T>, exact: &CMat<T>| {
            let mut m = T::zero();
            for (bj, &j) in interior.iter().enumerate() {
                for (bi, &i) in interior.iter().enumerate() {
                    m = m.max((fd.entry(i, j) - exact[(bi, bj)]).norm_sqr().sqrt());
                }
            }
            m
        };
        Ok((diff(&da, &ga), diff(&dat, &gat)))
    };
    let (c, ct) = residual(h)?;
    let (f, ft) = residual(h * T::lit(0.5))?;
    Ok(DerivativeReport {
        theta,
        step: h,
        residual: [c, f],
        ratio: c / f,
        residual_tilde: [ct, ft],
        ratio_tilde: ct / ft,
    })
}

/// `max |Delta_+ A + Delta_- A - 2 A (x) 1|` and `max |Delta_+ A - Delta_- A - 2 (1 (x) A)|`.
pub fn coproduct_identity_residual<T: Real>(a: &Op<T>) -> FockResult<(T, T)> {
    let (plus, minus) = coproducts(a)?;
    let two = T::lit(2.0);
    let left = plus
        .add(&minus)?
        .max_abs_diff(&lift_left(a)?.scale_real(two))?;
    let right = plus
        .sub(&minus)?
        .max_abs_diff(&lift_right(a)?.scale_real(two))?;
    Ok((left, right))
}

/// `[X, Y^dagger]` restricted to the `level` block, minus `expected * 1`.
pub fn ladder_commutator_residual<T: Real>(
    x: &Op<T>,
    y: &Op<T>,
    expected: T,
    level: usize,
) -> FockResult<T> {
    if x.space() != SpaceTag::Doubled || y.space() != SpaceTag::Doubled {
        return Err(FockError::Dimension(
            "ladder commutators are taken on the doubled space".into(),
        ));
    }
    let idx = crate::fock::interior_indices(x.cutoff(), SpaceTag::Doubled, level);
    let id = Op::<T>::identity(x.cutoff(), SpaceTag::Doubled);
    let yd = y.matrix().adjoint();
    let c = block_triple(x.matrix(), &yd, id.matrix(), &idx)
        - block_triple(&yd, x.matrix(), id.matrix(), &idx);
    Ok(max_abs_diff_block(&c, &id.scale_real(expected), &idx))
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    /// Independent two-mode squeezing oracle: `c_0 = 1/cosh`, `c_{n+1} = tanh c_n`.
    fn squeeze_recursion(theta: f64, n: usize) -> Vec<f64> {
        let mut c = vec![1.0 / theta.cosh()];
        for _ in 1..n {
            let last = *c.last().unwrap();
            c.push(last * theta.tanh());
        }
        c
    }

    #[test]
    fn generator_matrix_elements() {
        let g = bogoliubov_generator::<f64>(6).unwrap();
        let n = 6;
        assert_eq!(g.entry(0, 0), Complex::new(0.0, 0.0));
        let z = g.entry(pair_index(n, 1, 1), pair_index(n, 0, 0));
        assert_abs_diff_eq!(z.re, 0.0);
        assert_abs_diff_eq!(z.im, -1.0, epsilon = 1e-15);
        assert!(g.hermitian_deviation() <= 1e-12);
        assert!(bogoliubov_generator::<f64>(3).is_err());
    }

    #[test]
    fn vacuum_at_zero_theta() {
        let v = theta_vacuum(0.0f64, 8).unwrap();
        assert_eq!(v.state, StateVector::vacuum(8, SpaceTag::Doubled));
    }

    #[test]
    fn coefficients_follow_recursion() {
        let (theta, n) = (0.8, 40);
        let v = theta_vacuum(theta, n).unwrap();
        let oracle = squeeze_recursion(theta, n);
        for k in 0..=n / 2 {
            assert_abs_diff_eq!(v.coefficients[k], oracle[k], epsilon = 1e-8);
        }
        assert!(v.off_diagonal_max(n / 2) <= 1e-10);
        assert_abs_diff_eq!(v.state.recomputed_norm(), 1.0, epsilon = 1e-8);
        for w in v.coefficients[..=n / 2].windows(2) {
            assert!(w[1] < w[0] && w[1] >= 0.0);
        }
    }

    #[test]
    fn mean_occupation_is_sinh_squared() {
        let v = theta_vacuum(1.2f64, 60).unwrap();
        // geometric series: sum n t^{2n} (1 - t^2) = t^2 / (1 - t^2) = sinh^2
        let t2 = 1.2f64.tanh().powi(2);
        let oracle: f64 = (0..2000).map(|k| k as f64 * t2.powi(k) * (1.0 - t2)).sum();
        assert_abs_diff_eq!(v.mean_occupation().unwrap(), oracle, epsilon = 1e-8);
        assert_abs_diff_eq!(oracle, 1.2f64.sinh().powi(2), epsilon = 1e-12);
    }

    #[test]
    fn inadequate_cutoff_names_requirement() {
        match theta_vacuum(1.2f64, 20) {
            Err(FockError::Cutoff { got, min }) => {
                assert_eq!(got, 20);
                assert!(min > 20 && min <= 60, "{min}");
            }
            other => panic!("expected cutoff error, got {other:?}"),
        }
        assert_eq!(required_cutoff(0.0f64), 4);
    }

    #[test]
    fn bisection_matches_closed_form() {
        for bw in [0.5, 1.0, 2.0, 3.0] {
            let theta = theta_of_beta(bw, 1.0f64).unwrap();
            assert_abs_diff_eq!(theta, (-bw / 2.0f64).exp().atanh(), epsilon = 1e-11);
        }
        assert!(theta_of_beta(0.0f64, 1.0).is_err());
        assert!(theta_of_beta(200.0f64, 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn gibbs_at_unit_beta_omega() {
        let theta = theta_of_beta(1.0f64, 1.0).unwrap();
        let rep = gibbs_match(theta, 1.0, 1.0, 40).unwrap();
        assert!(rep.diagonal_deviation <= 1e-6);
        assert!(rep.off_diagonal_max <= 1e-10);
        let bose = 1.0 / (1.0f64.exp() - 1.0);
        assert_abs_diff_eq!(rep.observables[0].vacuum, bose, epsilon = 1e-6);
        assert_abs_diff_eq!(rep.observables[1].vacuum, 0.0, epsilon = 1e-12);
        assert!(rep.max_observable_deviation() <= 1e-6);
        assert_eq!(rep.label, CORRESPONDENCE_LABEL);
    }

    #[test]
    fn coproduct_identities() {
        let a = annihilation::<f64>(5).unwrap();
        let (l, r) = coproduct_identity_residual(&a).unwrap();
        assert_eq!((l, r), (0.0, 0.0));
        let (plus, _) = coproducts(&Op::<f64>::identity(5, SpaceTag::Single)).unwrap();
        assert_eq!(plus, Op::identity(5, SpaceTag::Doubled).scale_real(2.0));
    }

    #[test]
    fn ab_algebra() {
        let n = 8;
        let (a, b) = ab_operators::<f64>(n).unwrap();
        assert!(ladder_commutator_residual(&a, &a, 1.0, n / 2).unwrap() <= 1e-14);
        assert!(ladder_commutator_residual(&a, &b, 0.0, n / 2).unwrap() <= 1e-14);
        assert!(ab_reconstruction::<f64>(n).unwrap().max() <= 1e-14);
    }

    #[test]
    fn deformation_limits_and_derivative() {
        assert_eq!(q_two(0.0f64), 2.0);
        let rep = deformed_check::<f64>(6, 1e-2).unwrap();
        assert!(rep.limit_a <= 1e-15 && rep.limit_b <= 1e-15);
        assert!((3.5..=4.5).contains(&rep.ratio), "{}", rep.ratio);
    }

    #[test]
    fn zero_theta_transform_is_plain_ladder() {
        let (a0, _) = theta_transform(0.0f64, 5).unwrap();
        assert_eq!(a0, lift_left(&annihilation(5).unwrap()).unwrap());
    }

    #[test]
    fn bogoliubov_small_cutoff() {
        let rep = verify_bogoliubov(0.3f64, 30, 1e-6).unwrap();
        assert!(rep.certified_level.unwrap() >= 4);
        assert!(
            rep.conjugation_residual <= 1e-6,
            "{}",
            rep.conjugation_residual
        );
        assert!(rep.conjugation_residual_tilde <= 1e-6);
        assert!(rep.annihilation_norm <= 1e-6 && rep.annihilation_norm_tilde <= 1e-6);
        assert!(rep.commutator_residual <= 1e-12);
        assert!(rep.unitarity_deviation <= 1e-10);
    }

    #[test]
    fn derivative_is_commutator() {
        let rep = theta_derivative_check(0.0f64, 12, 1e-2).unwrap();
        assert!((3.5..=4.5).contains(&rep.ratio), "{}", rep.ratio);
        assert!(
            (3.5..=4.5).contains(&rep.ratio_tilde),
            "{}",
            rep.ratio_tilde
        );
    }

    #[test]
    fn group_law_small() {
        let rep = group_law(0.2f64, 0.1, 30, 1e-6).unwrap();
        assert!(rep.residual <= 1e-6, "{}", rep.residual);
    }

    #[test]
    fn ladder_norms_match_the_matrix_route() {
        let rep = verify_bogoliubov(0.6, 30, 1e-6).unwrap();
        let (a, b) = theta_vacuum(0.6, 30).unwrap().annihilation_norms(15);
        assert_abs_diff_eq!(a, rep.annihilation_norm, epsilon = 1e-14);
        assert_abs_diff_eq!(b, rep.annihilation_norm_tilde, epsilon = 1e-14);
    }
}
