use std::collections::BTreeMap;
use std::fmt;

use super::Label;
use crate::scalar::Coeff;

/// Element of the incidence algebra: a linear combination of `|A><B|`.
///
/// Unlike bracket composition, a product with mismatched inner labels is zero rather than undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceElement<C> {
    terms: BTreeMap<(Label, Label), C>,
}

impl<C: Coeff> IncidenceElement<C> {
    pub fn zero() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }

    pub fn ket_bra(ket: Label, bra: Label) -> Self {
        Self::zero().plus_term(ket, bra, C::one())
    }

    fn plus_term(mut self, ket: Label, bra: Label, c: C) -> Self {
        let key = (ket, bra);
        let sum = self.terms.remove(&key).unwrap_or_else(C::zero) + c;
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        other.terms.iter().fold(self.clone(), |acc, ((k, b), c)| {
            acc.plus_term(k.clone(), b.clone(), c.clone())
        })
    }

    pub fn scale(&self, s: &C) -> Self {
        self.terms.iter().fold(Self::zero(), |acc, ((k, b), c)| {
            acc.plus_term(k.clone(), b.clone(), c.clone() * s.clone())
        })
    }

    /// `|A><B| |C><D| = delta_BC |A><D|`, extended bilinearly.
    pub fn product(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &other.terms {
                if b == c {
                    out = out.plus_term(a.clone(), d.clone(), x.clone() * y.clone());
                }
            }
        }
        out
    }
}

pub fn incidence_product<C: Coeff>(
    e1: &IncidenceElement<C>,
    e2: &IncidenceElement<C>,
) -> IncidenceElement<C> {
    e1.product(e2)
}

impl<C: Coeff> fmt::Display for IncidenceElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, ((a, b), c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if !c.is_one() {
                write!(f, "{}", c.render())?;
            }
            write!(f, "|{a}><{b}|")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRational;

    type I = IncidenceElement<GaussRational>;

    fn kb(a: &str, b: &str) -> I {
        I::ket_bra(Label::atom(a).unwrap(), Label::atom(b).unwrap())
    }

    #[test]
    fn delta_product() {
        assert_eq!(kb("A", "B").product(&kb("B", "D")), kb("A", "D"));
        assert!(kb("A", "B").product(&kb("C", "D")).is_zero());
        assert_eq!(kb("A", "A").product(&kb("A", "A")), kb("A", "A"));
    }

    #[test]
    fn zero_propagates_associatively() {
        let (x, y, z) = (kb("A", "B"), kb("C", "D"), kb("D", "E"));
        assert_eq!(x.product(&y).product(&z), x.product(&y.product(&z)));
        assert!(x.product(&y).product(&z).is_zero());
    }

    #[test]
    fn renders() {
        let e = kb("A", "B").add(&kb("B", "C").scale(&GaussRational::from_int(2)));
        assert_eq!(e.to_string(), "|A><B| + 2|B><C|");
    }
}
