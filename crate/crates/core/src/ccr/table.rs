use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{CcrError, GeneratorSet};
use crate::scalar::Coeff;

/// Antisymmetric table of central brackets `[g_i, g_j] = c * 1`; unlisted pairs are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutationTable<C> {
    size: usize,
    // keyed by (i, j) with i < j
    entries: BTreeMap<(usize, usize), C>,
}

impl<C: Coeff> CommutationTable<C> {
    pub fn new(size: usize) -> Self {
        Self {
            size,
            entries: BTreeMap::new(),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `[g_i, g_j]`, antisymmetric by construction.
    pub fn get(&self, i: usize, j: usize) -> C {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => C::zero(),
            std::cmp::Ordering::Less => self.entries.get(&(i, j)).cloned().unwrap_or_else(C::zero),
            std::cmp::Ordering::Greater => {
                -self.entries.get(&(j, i)).cloned().unwrap_or_else(C::zero)
            }
        }
    }

    /// Records `[g_i, g_j] = c`. Re-stating a consistent value is allowed.
    pub fn set(&mut self, i: usize, j: usize, c: C, gens: &GeneratorSet) -> Result<(), CcrError> {
        assert!(
            i < self.size && j < self.size,
            "generator index out of range"
        );
        if i == j {
            if c.is_zero() {
                return Ok(());
            }
            return Err(CcrError::SelfBracket(gens.get(i).name.clone()));
        }
        let (key, value) = if i < j { ((i, j), c) } else { ((j, i), -c) };
        if let Some(old) = self.entries.get(&key) {
            if *old != value {
                return Err(CcrError::Conflict(
                    gens.get(i).name.clone(),
                    gens.get(j).name.clone(),
                ));
            }
            return Ok(());
        }
        if !value.is_zero() {
            self.entries.insert(key, value);
        }
        Ok(())
    }

    /// Parses the plain-text format: one `gen1 gen2 re im` line per pair, `#` starts a comment.
    /// Numbers may carry a leading minus sign and use decimals, fractions or exponents.
    pub fn parse_text(text: &str, gens: &GeneratorSet) -> Result<Self, CcrError> {
        let mut table = Self::new(gens.len());
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| CcrError::TableSyntax {
                line: lineno + 1,
                msg,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(err(format!("expected 4 fields, found {}", fields.len())));
            }
            let i = gens.index_of(fields[0]).map_err(|e| err(e.to_string()))?;
            let j = gens.index_of(fields[1]).map_err(|e| err(e.to_string()))?;
            let re = parse_signed::<C>(fields[2])
                .ok_or_else(|| err(format!("bad number `{}`", fields[2])))?;
            let im = parse_signed::<C>(fields[3])
                .ok_or_else(|| err(format!("bad number `{}`", fields[3])))?;
            let value = re + C::i() * im;
            table
                .set(i, j, value, gens)
                .map_err(|e| err(e.to_string()))?;
        }
        Ok(table)
    }

    /// Inverse of [`CommutationTable::parse_text`] for tables with real and imaginary parts
    /// representable by the coefficient renderer.
    pub fn to_text(&self, gens: &GeneratorSet) -> String {
        let mut out = String::new();
        for ((i, j), c) in &self.entries {
            let re = if c.is_imag() {
                "0".to_string()
            } else {
                c.fmt_real_part()
            };
            let im = if c.is_real() {
                "0".to_string()
            } else {
                c.fmt_imag_part()
            };
            let _ = writeln!(
                out,
                "{} {} {} {}",
                gens.get(*i).name,
                gens.get(*j).name,
                re,
                im
            );
        }
        out
    }

    pub fn nonzero_pairs(&self) -> impl Iterator<Item = (usize, usize, &C)> {
        self.entries.iter().map(|((i, j), c)| (*i, *j, c))
    }
}

fn parse_signed<C: Coeff>(text: &str) -> Option<C> {
    match text.strip_prefix('-') {
        Some(rest) => C::parse_real(rest).map(|c| -c),
        None => C::parse_real(text.strip_prefix('+').unwrap_or(text)),
    }
}

#[cfg(test)]
mod tests {
    use num_traits::One;

    use super::*;
    use crate::ccr::{Generator, GeneratorKind};
    use crate::scalar::{gauss, GaussRational};

    fn xp() -> GeneratorSet {
        GeneratorSet::new(vec![
            Generator::new("x", GeneratorKind::Position),
            Generator::new("p", GeneratorKind::Momentum),
        ])
        .unwrap()
    }

    #[test]
    fn antisymmetry_is_enforced() {
        let gens = xp();
        let mut t = CommutationTable::<GaussRational>::new(2);
        t.set(0, 1, GaussRational::i(), &gens).unwrap();
        assert_eq!(t.get(1, 0), -GaussRational::i());
        assert!(t.set(1, 0, -GaussRational::i(), &gens).is_ok());
        assert_eq!(
            t.set(1, 0, GaussRational::i(), &gens),
            Err(CcrError::Conflict("p".into(), "x".into()))
        );
        assert_eq!(
            t.set(0, 0, GaussRational::one(), &gens),
            Err(CcrError::SelfBracket("x".into()))
        );
    }

    #[test]
    fn text_round_trip() {
        let gens = xp();
        let t = CommutationTable::<GaussRational>::parse_text("# heisenberg\nx p 0 1\n", &gens)
            .unwrap();
        assert_eq!(t.get(0, 1), GaussRational::i());
        let again =
            CommutationTable::<GaussRational>::parse_text(&t.to_text(&gens), &gens).unwrap();
        assert_eq!(t, again);

        let t = CommutationTable::<GaussRational>::parse_text("p x -0.5 -1/3", &gens).unwrap();
        assert_eq!(t.get(0, 1), gauss(1, 2, 1, 3));
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let gens = xp();
        let err =
            CommutationTable::<GaussRational>::parse_text("x p 0 1\nx q 0 1", &gens).unwrap_err();
        assert!(matches!(err, CcrError::TableSyntax { line: 2, .. }));
        let err = CommutationTable::<GaussRational>::parse_text("x p 0", &gens).unwrap_err();
        assert!(matches!(err, CcrError::TableSyntax { line: 1, .. }));
    }
}
