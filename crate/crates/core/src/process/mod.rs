//! Algebra of process: strength-weighted directed brackets `k[A,B]` with the groupoid product,
//! iterants, the incidence product and transition amplitudes obeying the Ritz rule.

mod element;
mod incidence;
mod iterant;
mod parse;
mod transition;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

pub use element::{ProcessElement, ProcessTerm};
pub use incidence::{incidence_product, IncidenceElement};
pub use iterant::{iterant_matrix, iterant_star, quaternion_units, Iterant};
pub use parse::{parse, print};
pub use transition::{RitzReport, TransitionSystem};

use crate::scalar::Coeff;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProcessError {
    #[error("composition [{left_outer},{left_inner}][{right_inner},{right_outer}] is not defined")]
    UndefinedComposition {
        left_outer: String,
        left_inner: String,
        right_inner: String,
        right_outer: String,
    },
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("label merge needs equal strengths")]
    MergeStrength,
    #[error("invalid label atom `{0}`")]
    BadLabel(String),
}

/// A formal sum of atomic labels (`A`, `A+C`, ...). Atoms are opaque identifiers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(BTreeMap<String, u32>);

impl Label {
    pub fn atom(name: &str) -> Result<Self, ProcessError> {
        let mut chars = name.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(ProcessError::BadLabel(name.to_string()));
        }
        Ok(Self(BTreeMap::from([(name.to_string(), 1)])))
    }

    /// Formal label sum used by the rule-five merge.
    pub fn plus(&self, other: &Label) -> Label {
        let mut out = self.0.clone();
        for (k, v) in &other.0 {
            *out.entry(k.clone()).or_insert(0) += v;
        }
        Label(out)
    }

    pub fn is_atom(&self) -> bool {
        self.0.len() == 1 && self.0.values().all(|&v| v == 1)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, count) in &self.0 {
            for _ in 0..*count {
                if !first {
                    write!(f, "+")?;
                }
                write!(f, "{name}")?;
                first = false;
            }
        }
        Ok(())
    }
}

/// `strength * [left, right]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessBracket<C> {
    pub left: Label,
    pub right: Label,
    pub strength: C,
}

impl<C: Coeff> ProcessBracket<C> {
    pub fn new(left: Label, right: Label, strength: C) -> Self {
        Self {
            left,
            right,
            strength,
        }
    }

    /// Unit-strength bracket on atomic labels.
    pub fn unit(left: &str, right: &str) -> Result<Self, ProcessError> {
        Ok(Self::new(Label::atom(left)?, Label::atom(right)?, C::one()))
    }

    /// `[kA, kB]`, which normalizes to `k[A, B]`.
    pub fn with_scaled_labels(k: C, left: Label, right: Label) -> Self {
        Self::new(left, right, k)
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::new(
            self.left.clone(),
            self.right.clone(),
            self.strength.clone() * k.clone(),
        )
    }
}

impl<C: Coeff> fmt::Display for ProcessBracket<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ProcessElement::from_bracket(self.clone()))
    }
}

/// Groupoid product `[A,B][B,C] = [A,C]`; undefined (an error, not zero) when the middle labels differ.
pub fn compose<C: Coeff>(
    b1: &ProcessBracket<C>,
    b2: &ProcessBracket<C>,
) -> Result<ProcessBracket<C>, ProcessError> {
    if b1.right != b2.left {
        return Err(ProcessError::UndefinedComposition {
            left_outer: b1.left.to_string(),
            left_inner: b1.right.to_string(),
            right_inner: b2.left.to_string(),
            right_outer: b2.right.to_string(),
        });
    }
    Ok(ProcessBracket::new(
        b1.left.clone(),
        b2.right.clone(),
        b1.strength.clone() * b2.strength.clone(),
    ))
}

/// `(k[A,B])* = -k* [B,A]`, an involution.
pub fn conjugate<C: Coeff>(b: &ProcessBracket<C>) -> ProcessBracket<C> {
    ProcessBracket::new(b.right.clone(), b.left.clone(), -b.strength.conj())
}

/// Order of coexistence: `[A,B] + [C,D] = [A+C, B+D]` for brackets of equal strength.
pub fn merge<C: Coeff>(
    b1: &ProcessBracket<C>,
    b2: &ProcessBracket<C>,
) -> Result<ProcessBracket<C>, ProcessError> {
    if b1.strength != b2.strength {
        return Err(ProcessError::MergeStrength);
    }
    Ok(ProcessBracket::new(
        b1.left.plus(&b2.left),
        b1.right.plus(&b2.right),
        b1.strength.clone(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::GaussRational;

    type B = ProcessBracket<GaussRational>;

    #[test]
    fn succession() {
        let ab = B::unit("A", "B").unwrap();
        let bc = B::unit("B", "C").unwrap();
        let cd = B::unit("C", "D").unwrap();
        assert_eq!(compose(&ab, &bc).unwrap(), B::unit("A", "C").unwrap());
        assert!(matches!(
            compose(&ab, &cd),
            Err(ProcessError::UndefinedComposition { .. })
        ));
        let six = compose(
            &ab.scale(&GaussRational::from_int(2)),
            &bc.scale(&GaussRational::from_int(3)),
        )
        .unwrap();
        assert_eq!(six.strength, GaussRational::from_int(6));
    }

    #[test]
    fn conjugation_is_an_involution() {
        let b = B::unit("A", "B")
            .unwrap()
            .scale(&(GaussRational::i() + GaussRational::from_int(2)));
        let c = conjugate(&b);
        assert_eq!(c.left.to_string(), "B");
        assert_eq!(
            c.strength,
            -(GaussRational::from_int(2) - GaussRational::i())
        );
        assert_eq!(conjugate(&c), b);
    }

    #[test]
    fn conjugate_of_composite() {
        let ab = B::unit("A", "B").unwrap();
        let bc = B::unit("B", "C").unwrap();
        let lhs = conjugate(&compose(&ab, &bc).unwrap());
        assert_eq!(
            lhs,
            B::unit("C", "A")
                .unwrap()
                .scale(&-GaussRational::from_int(1))
        );
        let rhs = compose(&conjugate(&bc), &conjugate(&ab)).unwrap();
        // the reversed product of conjugates carries the opposite sign
        assert_eq!(rhs, B::unit("C", "A").unwrap());
    }

    #[test]
    fn coexistence_merge() {
        let ab = B::unit("A", "B").unwrap();
        let cd = B::unit("C", "D").unwrap();
        let m = merge(&ab, &cd).unwrap();
        assert_eq!(
            (m.left.to_string(), m.right.to_string()),
            ("A+C".into(), "B+D".into())
        );
        assert_eq!(
            merge(&ab, &cd.scale(&GaussRational::from_int(2))),
            Err(ProcessError::MergeStrength)
        );
    }

    #[test]
    fn label_atoms_are_identifiers() {
        assert!(Label::atom("x_1").is_ok());
        assert!(Label::atom("1x").is_err());
        assert!(Label::atom("").is_err());
    }
}
