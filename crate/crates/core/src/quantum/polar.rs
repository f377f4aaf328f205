use std::f64::consts::PI;

use num_complex::Complex;
use serde::Serialize;

use super::tridiag::TridiagEigen;
use crate::fock::{FockError, FockResult};
use crate::scalar::Real;

/// Uniform grid on `(-L, L)` with Dirichlet walls, interior points only.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1d<T> {
    pub x: Vec<T>,
    pub dx: T,
    pub mass: T,
    pub potential: Vec<T>,
}

impl<T: Real> Grid1d<T> {
    pub fn dirichlet(
        half_width: T,
        dx: T,
        mass: T,
        potential: impl Fn(T) -> T,
    ) -> FockResult<Self> {
        if dx <= T::zero() || half_width <= dx || mass <= T::zero() {
            return Err(FockError::Parameter(
                "grid needs 0 < dx < L and positive mass".into(),
            ));
        }
        let cells = (T::lit(2.0) * half_width / dx).round().to_f64_lossy() as usize;
        let x: Vec<T> = (1..cells)
            .map(|j| -half_width + dx * T::lit(j as f64))
            .collect();
        let potential = x.iter().map(|&xi| potential(xi)).collect();
        Ok(Self {
            x,
            dx,
            mass,
            potential,
        })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn kinetic(&self) -> T {
        T::one() / (T::lit(2.0) * self.mass * self.dx * self.dx)
    }

    /// `H psi` with the three-point Laplacian and zero values beyond the walls.
    pub fn apply_hamiltonian(&self, psi: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.len();
        let k = self.kinetic();
        (0..n)
            .map(|j| {
                let left = if j > 0 {
                    psi[j - 1]
                } else {
                    Complex::new(T::zero(), T::zero())
                };
                let right = if j + 1 < n {
                    psi[j + 1]
                } else {
                    Complex::new(T::zero(), T::zero())
                };
                psi[j] * (T::lit(2.0) * k + self.potential[j]) - (left + right) * k
            })
            .collect()
    }

    /// Gaussian `exp(-(x - x0)^2 / (2 w^2) + i p0 x)`, normalized so that `sum |psi|^2 dx = 1`.
    pub fn gaussian(&self, x0: T, p0: T, width: T) -> Vec<Complex<T>> {
        let psi: Vec<Complex<T>> = self
            .x
            .iter()
            .map(|&x| {
                let a = (-(x - x0) * (x - x0) / (T::lit(2.0) * width * width)).exp();
                Complex::new(a * (p0 * x).cos(), a * (p0 * x).sin())
            })
            .collect();
        self.normalize(psi)
    }

    pub fn normalize(&self, psi: Vec<Complex<T>>) -> Vec<Complex<T>> {
        let norm = (psi.iter().fold(T::zero(), |s, z| s + z.norm_sqr()) * self.dx).sqrt();
        psi.into_iter().map(|z| z / norm).collect()
    }
}

/// Exact propagation `exp(-iHt)` of the discretized Hamiltonian through its eigenbasis.
pub struct GridPropagator<T: Real> {
    grid: Grid1d<T>,
    eig: TridiagEigen<T>,
}

impl<T: Real> GridPropagator<T> {
    pub fn new(grid: Grid1d<T>) -> Self {
        let k = grid.kinetic();
        let diag: Vec<T> = grid
            .potential
            .iter()
            .map(|&v| T::lit(2.0) * k + v)
            .collect();
        let off = vec![-k; grid.len().saturating_sub(1)];
        let eig = TridiagEigen::new(&diag, &off);
        Self { grid, eig }
    }

    pub fn grid(&self) -> &Grid1d<T> {
        &self.grid
    }

    pub fn eigen(&self) -> &TridiagEigen<T> {
        &self.eig
    }

    /// Lowest eigenpair, with the state normalized on the grid and chosen positive.
    pub fn ground_state(&self) -> (T, Vec<Complex<T>>) {
        let k = self.eig.lowest();
        let v = self.eig.vector(k);
        let sign = if v.iter().fold(T::zero(), |s, &a| s + a) < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        let psi = v
            .into_iter()
            .map(|a| Complex::new(sign * a, T::zero()))
            .collect();
        (self.eig.values()[k], self.grid.normalize(psi))
    }

    /// `exp(-iHt) psi0` for each requested time.
    pub fn evolve_many(&self, psi0: &[Complex<T>], times: &[T]) -> Vec<Vec<Complex<T>>> {
        let mut re: Vec<T> = psi0.iter().map(|z| z.re).collect();
        let mut im: Vec<T> = psi0.iter().map(|z| z.im).collect();
        self.eig.apply_vt(&mut re);
        self.eig.apply_vt(&mut im);
        let values = self.eig.values();
        times
            .iter()
            .map(|&t| {
                let (mut yr, mut yi) = (vec![T::zero(); re.len()], vec![T::zero(); re.len()]);
                for k in 0..re.len() {
                    let (s, c) = (values[k] * t).sin_cos();
                    // (re + i im)(c - i s)
                    yr[k] = re[k] * c + im[k] * s;
                    yi[k] = im[k] * c - re[k] * s;
                }
                self.eig.apply_v(&mut yr);
                self.eig.apply_v(&mut yi);
                yr.into_iter()
                    .zip(yi)
                    .map(|(a, b)| Complex::new(a, b))
                    .collect()
            })
            .collect()
    }
}

/// `psi = R exp(iS)` on a grid, with `S` unwrapped along connected runs of unmasked points.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarField<T> {
    pub x: Vec<T>,
    pub r: Vec<T>,
    pub s: Vec<T>,
    /// `true` where `R > floor`.
    pub mask: Vec<bool>,
    pub dx: T,
    pub mass: T,
    pub potential: Vec<T>,
}

fn wrap<T: Real>(a: T) -> T {
    let two_pi = T::lit(2.0 * PI);
    a - two_pi * (a / two_pi).round()
}

pub fn polar_decompose<T: Real>(psi: &[Complex<T>], grid: &Grid1d<T>, floor: T) -> PolarField<T> {
    let r: Vec<T> = psi.iter().map(|z| z.norm_sqr().sqrt()).collect();
    let mask: Vec<bool> = r.iter().map(|&a| a > floor).collect();
    let mut s: Vec<T> = psi.iter().map(|z| z.im.atan2(z.re)).collect();
    for j in 1..psi.len() {
        if mask[j] && mask[j - 1] {
            s[j] = s[j - 1] + wrap(s[j] - s[j - 1]);
        }
    }
    PolarField {
        x: grid.x.clone(),
        r,
        s,
        mask,
        dx: grid.dx,
        mass: grid.mass,
        potential: grid.potential.clone(),
    }
}

impl<T: Real> PolarField<T> {
    pub fn reconstruct(&self, j: usize) -> Complex<T> {
        let (s, c) = self.s[j].sin_cos();
        Complex::new(self.r[j] * c, self.r[j] * s)
    }

    /// Largest jump of `S` between adjacent unmasked points.
    pub fn max_phase_jump(&self) -> T {
        (1..self.s.len())
            .filter(|&j| self.mask[j] && self.mask[j - 1])
            .fold(T::zero(), |m, j| m.max((self.s[j] - self.s[j - 1]).abs()))
    }

    /// Fraction of masked points between the first and last unmasked point.
    pub fn masked_fraction(&self) -> T {
        let first = self.mask.iter().position(|&m| m);
        let last = self.mask.iter().rposition(|&m| m);
        match (first, last) {
            (Some(a), Some(b)) => {
                let masked = self.mask[a..=b].iter().filter(|&&m| !m).count();
                T::lit(masked as f64 / (b - a + 1) as f64)
            }
            _ => T::one(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QhjReport<T> {
    pub x: Vec<T>,
    /// `dS/dt + (dS/dx)^2 / 2m + V + Q` where defined.
    pub residual: Vec<Option<T>>,
    /// `2 Re(psi* H psi) + 2 R^2 dS/dt`, the position diagonal of `[rho, H]_+ + 2 R^2 dS/dt`.
    pub operator_residual: Vec<Option<T>>,
    pub masked_fraction: T,
    pub warnings: Vec<String>,
}

impl<T: Real> QhjReport<T> {
    pub fn max_abs_where(&self, keep: impl Fn(T) -> bool) -> T {
        Self::fold_max(&self.x, &self.residual, keep)
    }

    pub fn max_operator_where(&self, keep: impl Fn(T) -> bool) -> T {
        Self::fold_max(&self.x, &self.operator_residual, keep)
    }

    pub fn max_abs(&self) -> T {
        self.max_abs_where(|_| true)
    }

    pub fn evaluated(&self) -> usize {
        self.residual.iter().filter(|r| r.is_some()).count()
    }

    fn fold_max(x: &[T], r: &[Option<T>], keep: impl Fn(T) -> bool) -> T {
        x.iter().zip(r).fold(T::zero(), |m, (&xi, ri)| match ri {
            Some(v) if keep(xi) => m.max(v.abs()),
            _ => m,
        })
    }
}

/// Residual of the position-projected quantum Hamilton-Jacobi equation at the middle slice,
/// with `Q = -(d^2 R / dx^2) / (2 m R)` and central differences in `x` and `t`.
///
/// Points whose stencil touches a masked node are left out.
pub fn quantum_hj_residual<T: Real>(
    prev: &PolarField<T>,
    cur: &PolarField<T>,
    next: &PolarField<T>,
    dt: T,
    grid: &Grid1d<T>,
) -> QhjReport<T> {
    let n = cur.r.len();
    let two = T::lit(2.0);
    let m = cur.mass;
    let dx = cur.dx;
    let psi: Vec<Complex<T>> = (0..n).map(|j| cur.reconstruct(j)).collect();
    let hpsi = grid.apply_hamiltonian(&psi);
    let mut residual = vec![None; n];
    let mut operator_residual = vec![None; n];
    for j in 1..n.saturating_sub(1) {
        if !(cur.mask[j - 1] && cur.mask[j] && cur.mask[j + 1] && prev.mask[j] && next.mask[j]) {
            continue;
        }
        let s_t = wrap(next.s[j] - prev.s[j]) / (two * dt);
        let s_x = (cur.s[j + 1] - cur.s[j - 1]) / (two * dx);
        let r_xx = (cur.r[j + 1] - two * cur.r[j] + cur.r[j - 1]) / (dx * dx);
        let q = -r_xx / (two * m * cur.r[j]);
        residual[j] = Some(s_t + s_x * s_x / (two * m) + cur.potential[j] + q);
        let diag = two * (psi[j].conj() * hpsi[j]).re;
        operator_residual[j] = Some(diag + two * cur.r[j] * cur.r[j] * s_t);
    }
    let masked_fraction = cur.masked_fraction();
    let mut warnings = Vec::new();
    if masked_fraction > T::lit(0.2) {
        warnings.push(format!(
            "{:.1}% of the support is below the amplitude floor; nodes dominate the residual",
            100.0 * masked_fraction.to_f64_lossy()
        ));
    }
    QhjReport {
        x: cur.x.clone(),
        residual,
        operator_residual,
        masked_fraction,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(half_width: f64, dx: f64) -> Grid1d<f64> {
        Grid1d::dirichlet(half_width, dx, 1.0, |x| 0.5 * x * x).unwrap()
    }

    fn qhj(prop: &GridPropagator<f64>, psi0: &[Complex<f64>], t: f64, dt: f64) -> QhjReport<f64> {
        let g = prop.grid();
        let slices = prop.evolve_many(psi0, &[t - dt, t, t + dt]);
        let f: Vec<PolarField<f64>> = slices.iter().map(|p| polar_decompose(p, g, 1e-6)).collect();
        quantum_hj_residual(&f[0], &f[1], &f[2], dt, g)
    }

    #[test]
    fn grid_layout() {
        let g = harmonic(1.0, 0.25);
        assert_eq!(g.x, vec![-0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75]);
        assert!(Grid1d::dirichlet(1.0, 0.0, 1.0, |_| 0.0).is_err());
    }

    #[test]
    fn polar_round_trip_and_continuity() {
        let g = harmonic(5.0, 0.05);
        let psi = g.gaussian(0.5, 3.0, 0.7);
        let f = polar_decompose(&psi, &g, 1e-6);
        for j in 0..psi.len() {
            if f.mask[j] {
                assert!((f.reconstruct(j) - psi[j]).norm() < 1e-10);
            }
        }
        assert!(f.max_phase_jump() < PI);
        // S = p0 x grows past 2 pi across the support, so unwrapping did real work
        let kept: Vec<f64> = (0..psi.len())
            .filter(|&j| f.mask[j])
            .map(|j| f.s[j])
            .collect();
        assert!(kept.last().unwrap() - kept.first().unwrap() > 2.0 * PI);
    }

    #[test]
    fn propagation_preserves_norm_and_ground_state_is_stationary() {
        let prop = GridPropagator::new(harmonic(4.0, 0.05));
        let (e0, psi0) = prop.ground_state();
        assert!((e0 - 0.5).abs() < 1e-3);
        let out = &prop.evolve_many(&psi0, &[0.9])[0];
        let dx = prop.grid().dx;
        let norm: f64 = out.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx;
        assert!((norm - 1.0).abs() < 1e-12);
        let phase = Complex::new((e0 * 0.9).cos(), -(e0 * 0.9).sin());
        for (a, b) in out.iter().zip(&psi0) {
            assert!((a - b * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn stationary_residual_vanishes() {
        let prop = GridPropagator::new(harmonic(4.0, 0.01));
        let (_, psi0) = prop.ground_state();
        let rep = qhj(&prop, &psi0, 0.5, 1e-4);
        assert!(rep.max_abs() <= 1e-6, "{}", rep.max_abs());
        assert!(rep.warnings.is_empty());
    }

    #[test]
    fn node_heavy_state_warns() {
        let g = harmonic(3.0, 0.1);
        let mut psi = g.gaussian(0.0, 0.0, 0.5);
        for (j, z) in psi.iter_mut().enumerate() {
            if j % 2 == 0 {
                *z = Complex::new(0.0, 0.0);
            }
        }
        let f = polar_decompose(&psi, &g, 1e-6);
        let rep = quantum_hj_residual(&f, &f, &f, 1e-3, &g);
        assert_eq!(rep.evaluated(), 0);
        assert_eq!(rep.warnings.len(), 1);
    }
}
