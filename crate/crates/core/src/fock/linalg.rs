use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use num_traits::{One, Zero};

use super::{FockError, FockResult, SpaceTag, StateVector, TruncatedOperator};
use crate::scalar::Real;

type CMat<T> = DMatrix<Complex<T>>;

/// Product of two square matrices that iterates only over structural nonzeros.
///
/// Falls back to dense multiplication when the operands are not sparse enough to pay off.
pub fn sparse_mul<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    let n = a.nrows();
    assert_eq!(a.ncols(), b.nrows(), "inner dimensions must agree");
    let m = b.ncols();
    let mut cols: Vec<Vec<(usize, Complex<T>)>> = vec![Vec::new(); a.ncols()];
    for k in 0..a.ncols() {
        for (r, z) in a.column(k).iter().enumerate() {
            if !z.is_zero() {
                cols[k].push((r, *z));
            }
        }
    }
    let mut row_nnz_b = vec![0usize; b.nrows()];
    for j in 0..m {
        for (k, z) in b.column(j).iter().enumerate() {
            if !z.is_zero() {
                row_nnz_b[k] += 1;
            }
        }
    }
    let cost: usize = cols.iter().zip(&row_nnz_b).map(|(c, &r)| c.len() * r).sum();
    if cost.saturating_mul(4) > n * a.ncols() * m {
        return a * b;
    }
    let mut out = DMatrix::zeros(n, m);
    for j in 0..m {
        for (k, bkj) in b.column(j).iter().enumerate() {
            if bkj.is_zero() {
                continue;
            }
            for &(r, ark) in &cols[k] {
                out[(r, j)] += ark * *bkj;
            }
        }
    }
    out
}

/// Kronecker product with the row-major convention `(i, j) -> i * dim(B) + j`.
pub fn kron<T: Real>(a: &CMat<T>, b: &CMat<T>) -> CMat<T> {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    let mut out = DMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij.is_zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Connected components of the graph with an edge `i - j` whenever `A_ij` or `A_ji` is nonzero.
/// Each component is sorted, and components are ordered by their smallest index.
pub fn components<T: Real>(a: &CMat<T>) -> Vec<Vec<usize>> {
    let n = a.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for j in 0..n {
        for i in 0..n {
            if i != j && !a[(i, j)].is_zero() {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

fn sub_block<T: Real>(a: &CMat<T>, idx: &[usize]) -> CMat<T> {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| a[(idx[i], idx[j])])
}

fn max_abs<T: Real>(a: &CMat<T>) -> T {
    a.iter().fold(T::zero(), |m, z| m.max(z.norm_sqr().sqrt()))
}

fn herm_dev<T: Real>(a: &CMat<T>, sign: T) -> T {
    let n = a.nrows();
    let mut m = T::zero();
    for j in 0..n {
        for i in 0..=j {
            let d = a[(i, j)] - a[(j, i)].conj() * sign;
            m = m.max(d.norm_sqr().sqrt());
        }
    }
    m
}

fn identity_residual<T: Real>(p: &CMat<T>) -> T {
    let n = p.nrows();
    let mut m = T::zero();
    for j in 0..n {
        for i in 0..n {
            let e = if i == j {
                p[(i, j)] - Complex::one()
            } else {
                p[(i, j)]
            };
            m = m.max(e.norm_sqr().sqrt());
        }
    }
    m
}

/// `V f(lambda) V^dagger`.
fn spectral_fn<T: Real>(vecs: &CMat<T>, vals: &[T], f: impl Fn(T) -> Complex<T>) -> CMat<T> {
    let fv: Vec<Complex<T>> = vals.iter().map(|&l| f(l)).collect();
    let scaled = DMatrix::from_fn(vecs.nrows(), vecs.ncols(), |i, k| vecs[(i, k)] * fv[k]);
    scaled * vecs.adjoint()
}

fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = z.re.exp();
    Complex::new(r * z.im.cos(), r * z.im.sin())
}

/// Scaling-and-squaring Taylor series for blocks without Hermitian structure.
fn taylor_expm<T: Real>(a: &CMat<T>) -> CMat<T> {
    let n = a.nrows();
    let norm1 = (0..n)
        .map(|j| {
            a.column(j)
                .iter()
                .fold(T::zero(), |s, z| s + z.norm_sqr().sqrt())
        })
        .fold(T::zero(), |m, x| m.max(x));
    let mut s = 0u32;
    let mut scale = T::one();
    while norm1 * scale > T::lit(0.5) {
        scale *= T::lit(0.5);
        s += 1;
    }
    let b = a.map(|z| z * scale);
    let mut term = DMatrix::<Complex<T>>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=40 {
        term = &term * &b / Complex::new(T::lit(k as f64), T::zero());
        sum += &term;
        if max_abs(&term) <= T::default_epsilon() * max_abs(&sum) {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Exponential of one irreducible block together with its inverse.
fn block_expm<T: Real>(b: &CMat<T>) -> (CMat<T>, CMat<T>) {
    let scale = T::one().max(max_abs(b));
    let herm_tol = T::lit(64.0) * T::default_epsilon() * scale;
    if herm_dev(b, T::one()) <= herm_tol {
        let eig = SymmetricEigen::new(b.clone());
        let vals: Vec<T> = eig.eigenvalues.iter().copied().collect();
        let e = spectral_fn(&eig.eigenvectors, &vals, |l| {
            Complex::new(l.exp(), T::zero())
        });
        let ei = spectral_fn(&eig.eigenvectors, &vals, |l| {
            Complex::new((-l).exp(), T::zero())
        });
        return (e, ei);
    }
    if herm_dev(b, -T::one()) <= herm_tol {
        // B = iK with K Hermitian
        let k = b.map(|z| Complex::new(z.im, -z.re));
        let eig = SymmetricEigen::new(k);
        let vals: Vec<T> = eig.eigenvalues.iter().copied().collect();
        let e = spectral_fn(&eig.eigenvectors, &vals, |l| Complex::new(l.cos(), l.sin()));
        let ei = e.adjoint();
        return (e, ei);
    }
    let e = taylor_expm(b);
    let ei = taylor_expm(&b.map(|z| -z));
    (e, ei)
}

fn block_exp_checked<T: Real>(b: &CMat<T>, tol: T) -> FockResult<CMat<T>> {
    if b.nrows() == 1 {
        return Ok(DMatrix::from_element(1, 1, cexp(b[(0, 0)])));
    }
    let (e, ei) = block_expm(b);
    let residual = identity_residual(&(&e * &ei));
    if !(residual <= tol) {
        return Err(FockError::Convergence {
            residual: residual.to_f64_lossy(),
            tol: tol.to_f64_lossy(),
        });
    }
    Ok(e)
}

fn check_finite<T: Real>(a: &CMat<T>) -> FockResult<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(FockError::Parameter("matrix has non-finite entries".into()))
    }
}

/// Matrix exponential, guaranteeing `max |expm(A) expm(-A) - I| <= tol`.
///
/// The matrix is split into its irreducible diagonal blocks first. Hermitian and
/// anti-Hermitian blocks are exponentiated through an eigendecomposition, anything else
/// through a scaled Taylor series.
pub fn expm<T: Real>(a: &TruncatedOperator<T>, tol: T) -> FockResult<TruncatedOperator<T>> {
    let m = a.matrix();
    check_finite(m)?;
    let n = a.dim();
    let mut out = DMatrix::zeros(n, n);
    for idx in components(m) {
        let e = block_exp_checked(&sub_block(m, &idx), tol)?;
        for (bj, &j) in idx.iter().enumerate() {
            for (bi, &i) in idx.iter().enumerate() {
                out[(i, j)] = e[(bi, bj)];
            }
        }
    }
    TruncatedOperator::new(out, a.cutoff(), a.space())
}

/// `expm(A) psi`, exponentiating only the blocks on which `psi` has support.
pub fn expm_apply<T: Real>(
    a: &TruncatedOperator<T>,
    psi: &StateVector<T>,
    tol: T,
) -> FockResult<StateVector<T>> {
    if psi.cutoff() != a.cutoff() || psi.space() != a.space() {
        return Err(FockError::Dimension(
            "operator and state live on different spaces".into(),
        ));
    }
    let m = a.matrix();
    check_finite(m)?;
    let x = psi.amplitudes();
    let mut y = DVector::zeros(a.dim());
    for idx in components(m) {
        if idx.iter().all(|&i| x[i].is_zero()) {
            continue;
        }
        let e = block_exp_checked(&sub_block(m, &idx), tol)?;
        for (bi, &i) in idx.iter().enumerate() {
            let mut acc = Complex::zero();
            for (bj, &j) in idx.iter().enumerate() {
                acc += e[(bi, bj)] * x[j];
            }
            y[i] = acc;
        }
    }
    StateVector::new(y, a.cutoff(), a.space())
}

struct Block<T: Real> {
    indices: Vec<usize>,
    values: Vec<T>,
    vectors: CMat<T>,
}

/// Eigendecomposition of a Hermitian operator, block by block.
pub struct HermitianSpectrum<T: Real> {
    blocks: Vec<Block<T>>,
    cutoff: usize,
    space: SpaceTag,
    dim: usize,
}

impl<T: Real> HermitianSpectrum<T> {
    /// Fails unless `max |H - H^dagger| <= 1e-10`.
    pub fn new(h: &TruncatedOperator<T>) -> FockResult<Self> {
        h.require_hermitian(T::lit(1e-10))?;
        let m = h.matrix();
        check_finite(m)?;
        let blocks = components(m)
            .into_iter()
            .map(|idx| {
                let mut b = sub_block(m, &idx);
                // symmetrize away the tolerated deviation
                b = (&b + b.adjoint()).map(|z| z * T::lit(0.5));
                let eig = SymmetricEigen::new(b);
                Block {
                    indices: idx,
                    values: eig.eigenvalues.iter().copied().collect(),
                    vectors: eig.eigenvectors,
                }
            })
            .collect();
        Ok(Self {
            blocks,
            cutoff: h.cutoff(),
            space: h.space(),
            dim: h.dim(),
        })
    }

    /// All eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<T> {
        let mut v: Vec<T> = self
            .blocks
            .iter()
            .flat_map(|b| b.values.iter().copied())
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        v
    }

    /// `f(H)` assembled from the spectral decomposition.
    pub fn apply_fn(&self, f: impl Fn(T) -> Complex<T>) -> TruncatedOperator<T> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let fb = spectral_fn(&b.vectors, &b.values, &f);
            for (bj, &j) in b.indices.iter().enumerate() {
                for (bi, &i) in b.indices.iter().enumerate() {
                    out[(i, j)] = fb[(bi, bj)];
                }
            }
        }
        TruncatedOperator::new(out, self.cutoff, self.space).expect("dimension preserved")
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: T) -> TruncatedOperator<T> {
        self.apply_fn(|l| Complex::new((l * t).cos(), -(l * t).sin()))
    }

    /// `exp(-i H t) psi`.
    pub fn evolve(&self, psi: &StateVector<T>, t: T) -> FockResult<StateVector<T>> {
        if psi.cutoff() != self.cutoff || psi.space() != self.space {
            return Err(FockError::Dimension(
                "Hamiltonian and state live on different spaces".into(),
            ));
        }
        let x = psi.amplitudes();
        let mut y = DVector::zeros(self.dim);
        for b in &self.blocks {
            if b.indices.iter().all(|&i| x[i].is_zero()) {
                continue;
            }
            let xb = DVector::from_iterator(b.indices.len(), b.indices.iter().map(|&i| x[i]));
            let mut c = b.vectors.adjoint() * xb;
            for (k, l) in b.values.iter().enumerate() {
                c[k] *= Complex::new((*l * t).cos(), -(*l * t).sin());
            }
            let yb = &b.vectors * c;
            for (bi, &i) in b.indices.iter().enumerate() {
                y[i] = yb[bi];
            }
        }
        StateVector::new(y, self.cutoff, self.space)
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::fock::{annihilation, lift_left, lift_right, number, oscillator_hamiltonian};

    type Op = TruncatedOperator<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn sparse_product_matches_dense() {
        let a = annihilation::<f64>(9).unwrap();
        let l = lift_left(&a).unwrap();
        let r = lift_right(&a.adjoint()).unwrap();
        let sparse = sparse_mul(l.matrix(), r.matrix());
        let dense = l.matrix() * r.matrix();
        assert_eq!(sparse, dense);
        let full = DMatrix::from_fn(5, 5, |i, j| c(i as f64 - j as f64, (i * j) as f64));
        assert_eq!(sparse_mul(&full, &full), &full * &full);
    }

    #[test]
    fn zero_exponential_is_identity() {
        let z = Op::zeros(5, SpaceTag::Single);
        assert_eq!(expm(&z, 1e-12).unwrap(), Op::identity(5, SpaceTag::Single));
    }

    #[test]
    fn diagonal_phase() {
        let n = 6;
        let g = number::<f64>(n)
            .unwrap()
            .scale(c(0.0, std::f64::consts::PI));
        let e = expm(&g, 1e-12).unwrap();
        for k in 0..n {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(e.entry(k, k).re, sign, epsilon = 1e-14);
            assert_abs_diff_eq!(e.entry(k, k).im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn routes_agree() {
        // anti-Hermitian goes through the eigen route, a generic matrix through Taylor
        let n = 7;
        let a = annihilation::<f64>(n).unwrap();
        let g = a.adjoint().sub(&a).unwrap().scale_real(0.4);
        let eig = expm(&g, 1e-12).unwrap();
        let tay = taylor_expm(g.matrix());
        assert!((eig.matrix() - tay).iter().all(|z| z.norm() < 1e-13));
        let nh = a
            .scale_real(0.7)
            .add(&number(n).unwrap().scale_real(0.1))
            .unwrap();
        let e = expm(&nh, 1e-10).unwrap();
        let ei = expm(&nh.scale_real(-1.0), 1e-10).unwrap();
        assert!(identity_residual(e.mul(&ei).unwrap().matrix()) < 1e-12);
    }

    #[test]
    fn blocks_of_ladder_pairs() {
        let n = 4;
        let a = annihilation::<f64>(n).unwrap();
        let g = lift_left(&a)
            .unwrap()
            .mul(&lift_right(&a).unwrap())
            .unwrap();
        let comps = components(g.adjoint().sub(&g).unwrap().matrix());
        // (a b - a^dagger b^dagger) conserves m - n, one block per difference
        assert_eq!(comps.len(), 2 * n - 1);
        assert_eq!(comps[0], vec![0, 5, 10, 15]);
    }

    #[test]
    fn apply_matches_full_exponential() {
        let n = 6;
        let a = annihilation::<f64>(n).unwrap();
        let g = lift_left(&a.adjoint())
            .unwrap()
            .mul(&lift_right(&a.adjoint()).unwrap())
            .unwrap();
        let g = g.sub(&g.adjoint()).unwrap().scale_real(0.5);
        let psi = StateVector::vacuum(n, SpaceTag::Doubled);
        let full = expm(&g, 1e-12).unwrap().apply(&psi).unwrap();
        let part = expm_apply(&g, &psi, 1e-12).unwrap();
        assert!(full.max_abs_diff(&part) < 1e-14);
    }

    #[test]
    fn impossible_tolerance_reports_residual() {
        let g = annihilation::<f64>(8).unwrap().scale_real(3.0);
        match expm(&g.sub(&g.adjoint()).unwrap(), 0.0) {
            Err(FockError::Convergence { residual, .. }) => {
                assert!(residual > 0.0 && residual < 1e-12)
            }
            other => panic!("expected a convergence error, got {other:?}"),
        }
    }

    #[test]
    fn spectrum_of_oscillator() {
        let h = oscillator_hamiltonian(5, 2.0).unwrap();
        let sp = HermitianSpectrum::new(&h).unwrap();
        assert_eq!(sp.eigenvalues(), vec![1.0, 3.0, 5.0, 7.0, 9.0]);
        let psi = StateVector::basis(5, SpaceTag::Single, 2);
        let out = sp.evolve(&psi, 0.3).unwrap();
        let phase = c((5.0f64 * 0.3).cos(), -(5.0f64 * 0.3).sin());
        assert!((out.amplitude(2) - phase).norm() < 1e-15);
    }

    #[test]
    fn kron_index_convention() {
        let e = |i: usize, j: usize| {
            DMatrix::from_fn(2, 2, |r, s| {
                if (r, s) == (i, j) {
                    c(1.0, 0.0)
                } else {
                    c(0.0, 0.0)
                }
            })
        };
        let k = kron(&e(1, 0), &e(0, 1));
        assert_eq!(k[(2, 1)], c(1.0, 0.0));
        assert_eq!(k.iter().filter(|z| !z.is_zero()).count(), 1);
    }
}
