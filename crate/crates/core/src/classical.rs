//! Two-point actions `S(x1, t1, x2, t2)` and the bi-local Hamilton-Jacobi relations, checked
//! by finite differences on closed-form actions.
//!
//! The default sign convention is `S = -S_std`, with `S_std` Hamilton's principal function.
//! In that convention `dS/dt1 = -H1`, `dS/dt2 = H2`, `dS/dx1 = p(x1)`, `dS/dx2 = -p(x2)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error("action is singular at coincident times: |dt| = {dt:e} is below the guard {guard:e}")]
    Singular { dt: f64, guard: f64 },
    #[error("oscillator action is at a caustic: omega*dt is {distance:e} away from {k}*pi")]
    Caustic { k: i64, distance: f64 },
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

pub type ClassicalResult<T> = Result<T, ClassicalError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignConvention {
    Bilocal,
    Standard,
}

impl SignConvention {
    /// Factor taking an action in this convention to the bi-local convention.
    pub fn sigma<T: Real>(self) -> T {
        match self {
            SignConvention::Bilocal => T::one(),
            SignConvention::Standard => -T::one(),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SignConvention::Bilocal => SignConvention::Standard,
            SignConvention::Standard => SignConvention::Bilocal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndPoints<T> {
    pub x1: T,
    pub t1: T,
    pub x2: T,
    pub t2: T,
}

impl<T: Real> EndPoints<T> {
    pub fn new(x1: T, t1: T, x2: T, t2: T) -> Self {
        Self { x1, t1, x2, t2 }
    }

    pub fn dt(&self) -> T {
        self.t2 - self.t1
    }

    pub fn to_midpoint(&self) -> MidpointCoords<T> {
        let half = T::lit(0.5);
        MidpointCoords {
            x: (self.x1 + self.x2) * half,
            dx: self.x2 - self.x1,
            t: (self.t1 + self.t2) * half,
            dt: self.t2 - self.t1,
        }
    }

    fn as_array(&self) -> [T; 4] {
        [self.x1, self.t1, self.x2, self.t2]
    }

    fn from_array(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

/// `X = (x1+x2)/2`, `dx = x2 - x1`, `T = (t1+t2)/2`, `dt = t2 - t1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MidpointCoords<T> {
    pub x: T,
    pub dx: T,
    pub t: T,
    pub dt: T,
}

impl<T: Real> MidpointCoords<T> {
    pub fn to_endpoints(&self) -> EndPoints<T> {
        let half = T::lit(0.5);
        EndPoints::new(
            self.x - self.dx * half,
            self.t - self.dt * half,
            self.x + self.dx * half,
            self.t + self.dt * half,
        )
    }

    fn as_array(&self) -> [T; 4] {
        [self.x, self.dx, self.t, self.dt]
    }

    fn from_array(a: [T; 4]) -> Self {
        Self {
            x: a[0],
            dx: a[1],
            t: a[2],
            dt: a[3],
        }
    }
}

type ActionFn<T> = Arc<dyn Fn(&EndPoints<T>) -> T + Send + Sync>;
type HamiltonianFn<T> = Arc<dyn Fn(T, T) -> T + Send + Sync>;
type MomentaFn<T> = Arc<dyn Fn(&EndPoints<T>) -> (T, T) + Send + Sync>;

/// A closed-form two-point action with its Hamiltonian and the endpoint momenta of the
/// connecting trajectory.
///
/// The momenta are computed from the trajectory itself, not from derivatives of `S`, so they
/// serve as an independent oracle for the Hamilton-Jacobi residuals.
#[derive(Clone)]
pub struct TwoPointAction<T: Real> {
    name: String,
    action: ActionFn<T>,
    hamiltonian: HamiltonianFn<T>,
    momenta: MomentaFn<T>,
    pub mass: T,
    pub omega: Option<T>,
    pub convention: SignConvention,
    pub singularity_guard: T,
    pub caustic_guard: T,
}

impl<T: Real> fmt::Debug for TwoPointAction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TwoPointAction")
            .field("name", &self.name)
            .field("mass", &self.mass)
            .field("omega", &self.omega)
            .field("convention", &self.convention)
            .finish_non_exhaustive()
    }
}

impl<T: Real> TwoPointAction<T> {
    /// A custom action, given in the bi-local convention.
    pub fn custom(
        name: &str,
        action: impl Fn(&EndPoints<T>) -> T + Send + Sync + 'static,
        hamiltonian: impl Fn(T, T) -> T + Send + Sync + 'static,
        momenta: impl Fn(&EndPoints<T>) -> (T, T) + Send + Sync + 'static,
        mass: T,
    ) -> Self {
        Self {
            name: name.to_string(),
            action: Arc::new(action),
            hamiltonian: Arc::new(hamiltonian),
            momenta: Arc::new(momenta),
            mass,
            omega: None,
            convention: SignConvention::Bilocal,
            singularity_guard: T::lit(1e-6),
            caustic_guard: T::lit(1e-3),
        }
    }

    /// `S = -m (x2 - x1)^2 / (2 dt)`.
    pub fn free_particle(mass: T) -> ClassicalResult<Self> {
        if mass <= T::zero() {
            return Err(ClassicalError::Parameter("mass must be positive".into()));
        }
        let m = mass;
        Ok(Self::custom(
            "free",
            move |e| -m * (e.x2 - e.x1).powi(2) / (T::lit(2.0) * e.dt()),
            move |_x, p| p * p / (T::lit(2.0) * m),
            move |e| {
                let p = m * (e.x2 - e.x1) / e.dt();
                (p, p)
            },
            mass,
        ))
    }

    /// `S = -(m w / 2 sin(w dt)) [(x1^2 + x2^2) cos(w dt) - 2 x1 x2]`.
    pub fn oscillator(mass: T, omega: T) -> ClassicalResult<Self> {
        if mass <= T::zero() || omega <= T::zero() {
            return Err(ClassicalError::Parameter(
                "mass and frequency must be positive".into(),
            ));
        }
        let (m, w) = (mass, omega);
        let mut a = Self::custom(
            "oscillator",
            move |e| {
                let (s, c) = (w * e.dt()).sin_cos();
                -(m * w / (T::lit(2.0) * s))
                    * ((e.x1 * e.x1 + e.x2 * e.x2) * c - T::lit(2.0) * e.x1 * e.x2)
            },
            move |x, p| p * p / (T::lit(2.0) * m) + m * w * w * x * x / T::lit(2.0),
            move |e| {
                let (s, c) = (w * e.dt()).sin_cos();
                let b = (e.x2 - e.x1 * c) / s;
                (m * w * b, m * w * (b * c - e.x1 * s))
            },
            mass,
        );
        a.omega = Some(omega);
        Ok(a)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Same physics, reported in the other sign convention: the stored action is negated.
    pub fn with_convention(&self, convention: SignConvention) -> Self {
        let mut out = self.clone();
        if convention != self.convention {
            let inner = self.action.clone();
            out.action = Arc::new(move |e| -inner(e));
            out.convention = convention;
        }
        out
    }

    /// `S` in this action's own convention.
    pub fn eval(&self, e: &EndPoints<T>) -> T {
        (self.action)(e)
    }

    /// `S` in the bi-local convention.
    pub fn eval_bilocal(&self, e: &EndPoints<T>) -> T {
        self.convention.sigma::<T>() * (self.action)(e)
    }

    pub fn hamiltonian(&self, x: T, p: T) -> T {
        (self.hamiltonian)(x, p)
    }

    /// Trajectory momenta `(p(x1), p(x2))`.
    pub fn momenta(&self, e: &EndPoints<T>) -> (T, T) {
        (self.momenta)(e)
    }

    /// Endpoint energies `(H1, H2)` on the trajectory.
    pub fn energies(&self, e: &EndPoints<T>) -> (T, T) {
        let (p1, p2) = self.momenta(e);
        (self.hamiltonian(e.x1, p1), self.hamiltonian(e.x2, p2))
    }

    /// Rejects coincident times and, for the oscillator, `w dt` within the caustic guard of `k pi`.
    pub fn check_point(&self, e: &EndPoints<T>) -> ClassicalResult<()> {
        let dt = e.dt();
        if dt.abs() < self.singularity_guard {
            return Err(ClassicalError::Singular {
                dt: dt.to_f64_lossy(),
                guard: self.singularity_guard.to_f64_lossy(),
            });
        }
        if let Some(w) = self.omega {
            let phase = (w * dt).to_f64_lossy();
            let k = (phase / PI).round();
            let distance = (phase - k * PI).abs();
            if k != 0.0 && distance < self.caustic_guard.to_f64_lossy() {
                return Err(ClassicalError::Caustic {
                    k: k as i64,
                    distance,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stencil {
    Central,
    /// Central differences at `h` and `h/2` combined as `(4 D(h/2) - D(h)) / 3`.
    Richardson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdOptions<T> {
    pub h: T,
    pub stencil: Stencil,
}

impl<T: Real> Default for FdOptions<T> {
    fn default() -> Self {
        Self {
            h: T::lit(1e-5),
            stencil: Stencil::Central,
        }
    }
}

impl<T: Real> FdOptions<T> {
    pub fn central(h: T) -> Self {
        Self {
            h,
            stencil: Stencil::Central,
        }
    }
}

fn central<T: Real>(f: &dyn Fn([T; 4]) -> T, at: [T; 4], k: usize, h: T) -> T {
    let (mut up, mut dn) = (at, at);
    up[k] += h;
    dn[k] -= h;
    (f(up) - f(dn)) / (T::lit(2.0) * h)
}

fn partial<T: Real>(f: &dyn Fn([T; 4]) -> T, at: [T; 4], k: usize, opts: &FdOptions<T>) -> T {
    match opts.stencil {
        Stencil::Central => central(f, at, k, opts.h),
        Stencil::Richardson => {
            let coarse = central(f, at, k, opts.h);
            let fine = central(f, at, k, opts.h * T::lit(0.5));
            (T::lit(4.0) * fine - coarse) / T::lit(3.0)
        }
    }
}

/// Finite-difference gradient of the bi-local-convention action with respect to `(x1, t1, x2, t2)`.
pub fn endpoint_gradient<T: Real>(
    s: &TwoPointAction<T>,
    e: &EndPoints<T>,
    opts: &FdOptions<T>,
) -> ClassicalResult<[T; 4]> {
    s.check_point(e)?;
    let f = |a: [T; 4]| s.eval_bilocal(&EndPoints::from_array(a));
    let at = e.as_array();
    Ok([0, 1, 2, 3].map(|k| partial(&f, at, k, opts)))
}

/// Finite-difference gradient of the bi-local-convention action with respect to `(X, dx, T, dt)`.
pub fn midpoint_gradient<T: Real>(
    s: &TwoPointAction<T>,
    e: &EndPoints<T>,
    opts: &FdOptions<T>,
) -> ClassicalResult<[T; 4]> {
    s.check_point(e)?;
    let f = |a: [T; 4]| s.eval_bilocal(&MidpointCoords::from_array(a).to_endpoints());
    let at = e.to_midpoint().as_array();
    Ok([0, 1, 2, 3].map(|k| partial(&f, at, k, opts)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HjResiduals<T> {
    pub r1: T,
    pub r2: T,
    pub rp1: T,
    pub rp2: T,
}

impl<T: Real> HjResiduals<T> {
    pub fn max_abs(&self) -> T {
        self.r1
            .abs()
            .max(self.r2.abs())
            .max(self.rp1.abs())
            .max(self.rp2.abs())
    }

    pub fn components(&self) -> [(&'static str, T); 4] {
        [
            ("r1", self.r1),
            ("r2", self.r2),
            ("rp1", self.rp1),
            ("rp2", self.rp2),
        ]
    }
}

/// `r1 = dS/dt1 + H1`, `r2 = dS/dt2 - H2`, `rp1 = dS/dx1 - p(x1)`, `rp2 = dS/dx2 + p(x2)`.
pub fn hj_residuals<T: Real>(
    s: &TwoPointAction<T>,
    e: &EndPoints<T>,
    opts: &FdOptions<T>,
) -> ClassicalResult<HjResiduals<T>> {
    let [dx1, dt1, dx2, dt2] = endpoint_gradient(s, e, opts)?;
    let (p1, p2) = s.momenta(e);
    let (h1, h2) = s.energies(e);
    Ok(HjResiduals {
        r1: dt1 + h1,
        r2: dt2 - h2,
        rp1: dx1 - p1,
        rp2: dx2 + p2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MidpointResiduals<T> {
    pub r_t: T,
    pub r_dt: T,
    pub r_x: T,
    pub r_dx: T,
}

impl<T: Real> MidpointResiduals<T> {
    pub fn max_abs(&self) -> T {
        self.r_t
            .abs()
            .max(self.r_dt.abs())
            .max(self.r_x.abs())
            .max(self.r_dx.abs())
    }

    pub fn components(&self) -> [(&'static str, T); 4] {
        [
            ("rT", self.r_t),
            ("rDt", self.r_dt),
            ("rX", self.r_x),
            ("rDx", self.r_dx),
        ]
    }
}

/// Differences `dp = p(x1) - p(x2)` and `P = -(p(x1) + p(x2)) / 2` on the trajectory.
pub fn midpoint_momenta<T: Real>(s: &TwoPointAction<T>, e: &EndPoints<T>) -> (T, T) {
    let (p1, p2) = s.momenta(e);
    (p1 - p2, -(p1 + p2) * T::lit(0.5))
}

/// Residuals of `dS/dT = H2 - H1`, `dS/d(dt) = (H1 + H2)/2`, `dS/dX = dp`, `dS/d(dx) = P`,
/// with the derivatives taken directly in midpoint coordinates.
pub fn midpoint_identities<T: Real>(
    s: &TwoPointAction<T>,
    e: &EndPoints<T>,
    opts: &FdOptions<T>,
) -> ClassicalResult<MidpointResiduals<T>> {
    let [d_x, d_dx, d_t, d_dt] = midpoint_gradient(s, e, opts)?;
    let (h1, h2) = s.energies(e);
    let (dp, p_mid) = midpoint_momenta(s, e);
    Ok(MidpointResiduals {
        r_t: d_t - (h2 - h1),
        r_dt: d_dt - (h1 + h2) * T::lit(0.5),
        r_x: d_x - dp,
        r_dx: d_dx - p_mid,
    })
}

/// `K = P dx + E dt - S` with `P = dS/d(dx)` and `E = dS/d(dt)`.
pub fn legendre_k<T: Real>(
    s: &TwoPointAction<T>,
    e: &EndPoints<T>,
    opts: &FdOptions<T>,
) -> ClassicalResult<T> {
    let [_, d_dx, _, d_dt] = midpoint_gradient(s, e, opts)?;
    let m = e.to_midpoint();
    Ok(d_dx * m.dx + d_dt * m.dt - s.eval_bilocal(e))
}

/// `|dS/d(dt) - E|` at the given point.
pub fn energy_limit<T: Real>(
    s: &TwoPointAction<T>,
    e: &EndPoints<T>,
    energy: T,
    opts: &FdOptions<T>,
) -> ClassicalResult<T> {
    let [_, _, _, d_dt] = midpoint_gradient(s, e, opts)?;
    Ok((d_dt - energy).abs())
}

/// Uniform phase-space grid `X x P` at the times `T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseGrid<T> {
    pub xs: Vec<T>,
    pub ps: Vec<T>,
    pub ts: Vec<T>,
    pub step: T,
}

impl<T: Real> PhaseGrid<T> {
    /// `n` points per axis over `[-half_width, half_width]`, finite differences with `step`.
    pub fn square(half_width: T, n: usize, ts: Vec<T>, step: T) -> Self {
        let axis: Vec<T> = (0..n)
            .map(|k| {
                if n == 1 {
                    T::zero()
                } else {
                    -half_width
                        + T::lit(2.0) * half_width * T::lit(k as f64) / T::lit((n - 1) as f64)
                }
            })
            .collect();
        Self {
            xs: axis.clone(),
            ps: axis,
            ts,
            step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiouvilleReport<T> {
    pub max_residual: T,
    pub points: usize,
    pub warnings: Vec<String>,
}

/// `max |dK/dT + {K, H}|` over the grid, with `{f, g} = f_X g_P - f_P g_X` and every
/// derivative taken by central differences.
pub fn liouville_limit_check<T: Real>(
    k: &(dyn Fn(T, T, T) -> T + Sync),
    h: &(dyn Fn(T, T) -> T + Sync),
    grid: &PhaseGrid<T>,
) -> LiouvilleReport<T> {
    let d = grid.step;
    let two_d = T::lit(2.0) * d;
    let mut warnings = Vec::new();
    if d > T::lit(0.1) {
        warnings.push(format!(
            "grid step {} exceeds 0.1; finite differences are inaccurate",
            d.to_f64_lossy()
        ));
    }
    let mut max_residual = T::zero();
    let mut points = 0;
    for &t in &grid.ts {
        for &x in &grid.xs {
            for &p in &grid.ps {
                let k_t = (k(x, p, t + d) - k(x, p, t - d)) / two_d;
                let k_x = (k(x + d, p, t) - k(x - d, p, t)) / two_d;
                let k_p = (k(x, p + d, t) - k(x, p - d, t)) / two_d;
                let h_x = (h(x + d, p) - h(x - d, p)) / two_d;
                let h_p = (h(x, p + d) - h(x, p - d)) / two_d;
                max_residual = max_residual.max((k_t + k_x * h_p - k_p * h_x).abs());
                points += 1;
            }
        }
    }
    LiouvilleReport {
        max_residual,
        points,
        warnings,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Composition<T> {
    pub direct: T,
    pub composed: T,
    pub x_mid: T,
}

impl<T: Real> Composition<T> {
    pub fn deviation(&self) -> T {
        (self.direct - self.composed).abs()
    }
}

/// `S(1 -> 3)` against the stationary value over `x2` of `S(1 -> 2) + S(2 -> 3)` at fixed `t2`.
///
/// Both built-in actions are quadratic in `x2`, so the vertex of a parabola through three
/// samples is the exact stationary point.
pub fn composition_check<T: Real>(
    s: &TwoPointAction<T>,
    x1: T,
    t1: T,
    x3: T,
    t3: T,
    t2: T,
) -> ClassicalResult<Composition<T>> {
    let direct_pt = EndPoints::new(x1, t1, x3, t3);
    s.check_point(&direct_pt)?;
    s.check_point(&EndPoints::new(x1, t1, x1, t2))?;
    s.check_point(&EndPoints::new(x1, t2, x1, t3))?;
    let sum = |x2: T| {
        s.eval_bilocal(&EndPoints::new(x1, t1, x2, t2))
            + s.eval_bilocal(&EndPoints::new(x2, t2, x3, t3))
    };
    // sample around the straight-line guess
    let guess = x1 + (x3 - x1) * (t2 - t1) / (t3 - t1);
    let d = T::one();
    let (fm, f0, fp) = (sum(guess - d), sum(guess), sum(guess + d));
    let curv = fp - T::lit(2.0) * f0 + fm;
    if curv.is_zero() {
        return Err(ClassicalError::Parameter(
            "composed action is flat in the intermediate point".into(),
        ));
    }
    let x_mid = guess - d * (fp - fm) / (T::lit(2.0) * curv);
    Ok(Composition {
        direct: s.eval_bilocal(&direct_pt),
        composed: sum(x_mid),
        x_mid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceEntry {
    pub component: String,
    pub coarse: f64,
    pub fine: f64,
    /// `coarse / fine`, or `None` when both residuals are at rounding level.
    pub ratio: Option<f64>,
}

/// Per-component residual ratio between steps `h` and `h/2`.
///
/// Components whose residual is already at rounding level (central differences are exact on
/// quadratics, so every `x` derivative of the built-in actions is) come back with no ratio.
pub fn convergence_ratios<T: Real>(
    s: &TwoPointAction<T>,
    e: &EndPoints<T>,
    h: T,
) -> ClassicalResult<Vec<ConvergenceEntry>> {
    let coarse_opts = FdOptions::central(h);
    let fine_opts = FdOptions::central(h * T::lit(0.5));
    let (c1, f1) = (
        hj_residuals(s, e, &coarse_opts)?,
        hj_residuals(s, e, &fine_opts)?,
    );
    let (c2, f2) = (
        midpoint_identities(s, e, &coarse_opts)?,
        midpoint_identities(s, e, &fine_opts)?,
    );
    let scale = s.eval_bilocal(e).abs().max(T::one()).to_f64_lossy() / h.to_f64_lossy();
    let floor = 1e3 * f64::EPSILON * scale;
    let pairs = c1
        .components()
        .into_iter()
        .zip(f1.components())
        .chain(c2.components().into_iter().zip(f2.components()));
    Ok(pairs
        .map(|((name, c), (_, f))| {
            let (c, f) = (c.to_f64_lossy().abs(), f.to_f64_lossy().abs());
            let ratio = if c <= floor { None } else { Some(c / f) };
            ConvergenceEntry {
                component: name.to_string(),
                coarse: c,
                fine: f,
                ratio,
            }
        })
        .collect())
}
