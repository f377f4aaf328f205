use crate::scalar::Real;

/// Spectrum of a real symmetric tridiagonal matrix by implicit QL with Wilkinson shifts.
///
/// The eigenvector matrix is never formed. Instead the Givens rotations `V = G_1 G_2 ... G_K`
/// are recorded, which keeps memory and time at `O(n^2)` for the few-thousand-point grids used
/// here, against `O(n^3)` for dense eigenvectors.
#[derive(Debug, Clone)]
pub struct TridiagEigen<T> {
    values: Vec<T>,
    index: Vec<u32>,
    cos: Vec<T>,
    sin: Vec<T>,
}

fn hypot<T: Real>(a: T, b: T) -> T {
    (a * a + b * b).sqrt()
}

impl<T: Real> TridiagEigen<T> {
    /// `diag` has length `n`, `off[i]` couples `i` and `i + 1`.
    pub fn new(diag: &[T], off: &[T]) -> Self {
        let n = diag.len();
        assert!(
            n == 0 || off.len() + 1 == n,
            "off-diagonal must have n - 1 entries"
        );
        let mut d = diag.to_vec();
        let mut e = off.to_vec();
        e.push(T::zero());
        let (mut index, mut cos, mut sin) = (Vec::new(), Vec::new(), Vec::new());
        let eps = T::default_epsilon();
        for l in 0..n {
            let mut iter = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= eps * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iter += 1;
                assert!(iter <= 60, "tridiagonal QL failed to converge");
                let mut g = (d[l + 1] - d[l]) / (T::lit(2.0) * e[l]);
                let mut r = hypot(g, T::one());
                let signed = if g >= T::zero() { r.abs() } else { -r.abs() };
                g = d[m] - d[l] + e[l] / (g + signed);
                let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
                let mut deflated = false;
                let mut i = m;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = hypot(f, g);
                    e[i + 1] = r;
                    if r.is_zero() {
                        d[i + 1] -= p;
                        e[m] = T::zero();
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + T::lit(2.0) * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    index.push(i as u32);
                    cos.push(c);
                    sin.push(s);
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = T::zero();
            }
        }
        Self {
            values: d,
            index,
            cos,
            sin,
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn rotations(&self) -> usize {
        self.index.len()
    }

    /// Position of the smallest eigenvalue.
    pub fn lowest(&self) -> usize {
        (0..self.len())
            .min_by(|&a, &b| self.values[a].partial_cmp(&self.values[b]).expect("finite"))
            .expect("non-empty")
    }

    /// `x <- V^T x`.
    pub fn apply_vt(&self, x: &mut [T]) {
        for k in 0..self.index.len() {
            let i = self.index[k] as usize;
            let (c, s) = (self.cos[k], self.sin[k]);
            let (a, b) = (x[i], x[i + 1]);
            x[i] = c * a - s * b;
            x[i + 1] = s * a + c * b;
        }
    }

    /// `y <- V y`.
    pub fn apply_v(&self, y: &mut [T]) {
        for k in (0..self.index.len()).rev() {
            let i = self.index[k] as usize;
            let (c, s) = (self.cos[k], self.sin[k]);
            let (a, b) = (y[i], y[i + 1]);
            y[i] = c * a + s * b;
            y[i + 1] = -s * a + c * b;
        }
    }

    /// Eigenvector `k`, the `k`-th column of `V`.
    pub fn vector(&self, k: usize) -> Vec<T> {
        let mut y = vec![T::zero(); self.len()];
        y[k] = T::one();
        self.apply_v(&mut y);
        y
    }
}
