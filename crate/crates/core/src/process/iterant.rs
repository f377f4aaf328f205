use crate::scalar::Coeff;

/// Iterant `[a, b]`, optionally carrying the shift `eta` on the right: `[a, b] eta`.
#[derive(Debug, Clone, PartialEq)]
pub struct Iterant<C> {
    pub a: C,
    pub b: C,
    pub shifted: bool,
}

impl<C: Coeff> Iterant<C> {
    pub fn new(a: C, b: C) -> Self {
        Self {
            a,
            b,
            shifted: false,
        }
    }

    pub fn shifted(a: C, b: C) -> Self {
        Self {
            a,
            b,
            shifted: true,
        }
    }

    pub fn one() -> Self {
        Self::new(C::one(), C::one())
    }

    pub fn scale(&self, k: &C) -> Self {
        Self {
            a: self.a.clone() * k.clone(),
            b: self.b.clone() * k.clone(),
            shifted: self.shifted,
        }
    }

    /// `[a,b] eta^s [c,d] eta^t = [a,b] [eta^s(c,d)] eta^(s+t)` with `eta [c,d] = [d,c] eta`.
    pub fn star(&self, other: &Self) -> Self {
        let (c, d) = if self.shifted {
            (&other.b, &other.a)
        } else {
            (&other.a, &other.b)
        };
        Self {
            a: self.a.clone() * c.clone(),
            b: self.b.clone() * d.clone(),
            shifted: self.shifted ^ other.shifted,
        }
    }

    /// `[a,b]` maps to `diag(a,b)`, the shift to the swap matrix.
    pub fn matrix(&self) -> [[C; 2]; 2] {
        let z = C::zero;
        if self.shifted {
            [[z(), self.a.clone()], [self.b.clone(), z()]]
        } else {
            [[self.a.clone(), z()], [z(), self.b.clone()]]
        }
    }
}

pub fn iterant_star<C: Coeff>(u: &Iterant<C>, v: &Iterant<C>) -> Iterant<C> {
    u.star(v)
}

pub fn iterant_matrix<C: Coeff>(u: &Iterant<C>) -> [[C; 2]; 2] {
    u.matrix()
}

/// `I = [i, -i]`, `J = [1, -1] eta`, `K = [i, i] eta`.
pub fn quaternion_units<C: Coeff>() -> (Iterant<C>, Iterant<C>, Iterant<C>) {
    let i = C::i();
    (
        Iterant::new(i.clone(), -i.clone()),
        Iterant::shifted(C::one(), -C::one()),
        Iterant::shifted(i.clone(), i),
    )
}

#[cfg(test)]
pub(crate) fn mat_mul<C: Coeff>(x: &[[C; 2]; 2], y: &[[C; 2]; 2]) -> [[C; 2]; 2] {
    let e =
        |r: usize, c: usize| x[r][0].clone() * y[0][c].clone() + x[r][1].clone() * y[1][c].clone();
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRational;

    type It = Iterant<GaussRational>;
    type Q = GaussRational;

    #[test]
    fn identity_iterant() {
        let v = It::new(Q::from_int(3), Q::i());
        assert_eq!(It::one().star(&v), v);
        assert_eq!(
            It::one().matrix(),
            [
                [Q::from_int(1), Q::from_int(0)],
                [Q::from_int(0), Q::from_int(1)]
            ]
        );
    }

    #[test]
    fn shifted_matrix_image() {
        let j = It::shifted(Q::from_int(1), Q::from_int(-1));
        assert_eq!(
            j.matrix(),
            [
                [Q::from_int(0), Q::from_int(1)],
                [Q::from_int(-1), Q::from_int(0)]
            ]
        );
        let sq = mat_mul(&j.matrix(), &j.matrix());
        assert_eq!(sq, It::new(Q::from_int(-1), Q::from_int(-1)).matrix());
    }

    #[test]
    fn common_factor_equivalence() {
        let (a, b, d) = (Q::from_int(2), Q::from_int(5), Q::from_ratio(1, 3));
        let lhs = It::new(a.clone(), b.clone()).star(&It::new(b.clone(), d.clone()));
        assert_eq!(lhs, It::new(a, d).scale(&b));
    }

    #[test]
    fn quaternion_relations() {
        let (i, j, k) = quaternion_units::<Q>();
        let minus_one = It::new(Q::from_int(-1), Q::from_int(-1));
        assert_eq!(i.star(&i), minus_one);
        assert_eq!(j.star(&j), minus_one);
        assert_eq!(k.star(&k), minus_one);
        assert_eq!(i.star(&j).star(&k), minus_one);
        assert_eq!(i.star(&j), k);
        assert_eq!(j.star(&i), k.scale(&Q::from_int(-1)));
    }
}
