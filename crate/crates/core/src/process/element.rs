use std::fmt;

use super::{compose, conjugate, Label, ProcessBracket, ProcessError};
use crate::scalar::Coeff;

/// `strength * [l1,r1][l2,r2]...`, a possibly unevaluated composition chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessTerm<C> {
    pub strength: C,
    pub chain: Vec<(Label, Label)>,
}

impl<C: Coeff> ProcessTerm<C> {
    /// Composes the chain left to right.
    pub fn evaluate(&self) -> Result<ProcessBracket<C>, ProcessError> {
        let mut links = self.chain.iter();
        let (l, r) = links.next().expect("chains are never empty");
        let mut acc = ProcessBracket::new(l.clone(), r.clone(), self.strength.clone());
        for (l, r) in links {
            acc = compose(&acc, &ProcessBracket::new(l.clone(), r.clone(), C::one()))?;
        }
        Ok(acc)
    }
}

/// Formal sum of process terms. The default sum never merges labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessElement<C> {
    terms: Vec<ProcessTerm<C>>,
}

impl<C: Coeff> ProcessElement<C> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn from_bracket(b: ProcessBracket<C>) -> Self {
        Self {
            terms: vec![ProcessTerm {
                strength: b.strength,
                chain: vec![(b.left, b.right)],
            }],
        }
    }

    pub fn from_terms(terms: Vec<ProcessTerm<C>>) -> Self {
        assert!(
            terms.iter().all(|t| !t.chain.is_empty()),
            "empty composition chain"
        );
        Self { terms }
    }

    pub fn terms(&self) -> &[ProcessTerm<C>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every term is a single bracket.
    pub fn is_evaluated(&self) -> bool {
        self.terms.iter().all(|t| t.chain.len() == 1)
    }

    /// Formal sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    /// Juxtaposition: every chain of `self` followed by every chain of `other`.
    pub fn juxtapose(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut chain = a.chain.clone();
                chain.extend(b.chain.iter().cloned());
                terms.push(ProcessTerm {
                    strength: a.strength.clone() * b.strength.clone(),
                    chain,
                });
            }
        }
        Self { terms }
    }

    /// Composes every chain and collects brackets with identical labels, keeping first-appearance order.
    pub fn evaluate(&self) -> Result<Self, ProcessError> {
        let mut out: Vec<ProcessBracket<C>> = Vec::new();
        for t in &self.terms {
            let b = t.evaluate()?;
            match out
                .iter_mut()
                .find(|o| o.left == b.left && o.right == b.right)
            {
                Some(o) => o.strength = o.strength.clone() + b.strength,
                None => out.push(b),
            }
        }
        out.retain(|b| !b.strength.is_zero());
        Ok(Self {
            terms: out
                .into_iter()
                .map(|b| Self::from_bracket(b).terms.remove(0))
                .collect(),
        })
    }

    pub fn brackets(&self) -> Result<Vec<ProcessBracket<C>>, ProcessError> {
        self.evaluate()?
            .terms
            .iter()
            .map(ProcessTerm::evaluate)
            .collect()
    }

    /// Term-wise conjugation of the evaluated element.
    pub fn conjugate(&self) -> Result<Self, ProcessError> {
        let mut out = Self::zero();
        for b in self.brackets()? {
            out = out.add(&Self::from_bracket(conjugate(&b)));
        }
        Ok(out)
    }
}

pub(super) fn render_strength<C: Coeff>(c: &C) -> String {
    if c.is_one() {
        return String::new();
    }
    if (-c.clone()).is_one() {
        return "-".to_string();
    }
    let imag = |mag: String| match mag.as_str() {
        "1" => "i".to_string(),
        "-1" => "-i".to_string(),
        _ => format!("{mag}i"),
    };
    if c.is_real() {
        c.fmt_real_part()
    } else if c.is_imag() {
        imag(c.fmt_imag_part())
    } else {
        let im = imag(c.fmt_imag_part());
        let sep = if im.starts_with('-') { "" } else { "+" };
        format!("({}{sep}{im})", c.fmt_real_part())
    }
}

impl<C: Coeff> fmt::Display for ProcessElement<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            let negative = t.strength.leading_negative();
            let shown = if negative && k > 0 {
                -t.strength.clone()
            } else {
                t.strength.clone()
            };
            if k > 0 {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            }
            write!(f, "{}", render_strength(&shown))?;
            for (l, r) in &t.chain {
                write!(f, "[{l},{r}]")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gauss, GaussRational};

    type E = ProcessElement<GaussRational>;

    fn br(l: &str, r: &str, k: i64) -> E {
        E::from_bracket(
            ProcessBracket::unit(l, r)
                .unwrap()
                .scale(&GaussRational::from_int(k)),
        )
    }

    #[test]
    fn juxtaposition_then_evaluation() {
        let e = br("A", "B", 2).juxtapose(&br("B", "C", 3));
        assert_eq!(e.to_string(), "6[A,B][B,C]");
        assert_eq!(e.evaluate().unwrap().to_string(), "6[A,C]");
    }

    #[test]
    fn like_terms_collect() {
        let e = br("A", "B", 2).add(&br("C", "D", 3)).add(&br("A", "B", -2));
        assert_eq!(e.evaluate().unwrap().to_string(), "3[C,D]");
        assert!(br("A", "B", 1)
            .add(&br("A", "B", -1))
            .evaluate()
            .unwrap()
            .is_zero());
    }

    #[test]
    fn strengths_render() {
        let e = br("A", "B", -1).add(&br("B", "C", -3));
        assert_eq!(e.to_string(), "-[A,B] - 3[B,C]");
        let c = E::from_bracket(
            ProcessBracket::unit("A", "B")
                .unwrap()
                .scale(&gauss(1, 2, -1, 3)),
        );
        assert_eq!(c.to_string(), "(1/2-1/3i)[A,B]");
        let c = E::from_bracket(
            ProcessBracket::unit("A", "B")
                .unwrap()
                .scale(&GaussRational::i()),
        );
        assert_eq!(c.to_string(), "i[A,B]");
    }
}
