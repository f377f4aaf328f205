//! Recursive-descent parser for bracket expressions.
//!
//! ```text
//! expr    := '0' | sign? term (sign term)*
//! term    := scalar? bracket+            juxtaposition composes, left to right
//! bracket := '[' label ',' label ']'
//! label   := ident ('+' ident)*          formal label sum
//! scalar  := real 'i'? | 'i' | '(' part (sign part)? ')'
//! part    := real 'i'? | 'i'
//! real    := digits ('.' digits)? ('/' digits)?
//! ```

use super::element::{ProcessElement, ProcessTerm};
use super::{Label, ProcessError};
use crate::scalar::Coeff;

pub fn parse<C: Coeff>(text: &str) -> Result<ProcessElement<C>, ProcessError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.ws();
    if p.src[p.pos..].iter().all(|b| b.is_ascii_whitespace()) {
        return Err(p.error("empty expression"));
    }
    if text.trim() == "0" {
        return Ok(ProcessElement::zero());
    }
    let mut terms = Vec::new();
    let mut negative = p.sign().unwrap_or(false);
    loop {
        let mut term = p.term::<C>()?;
        if negative {
            term.strength = -term.strength;
        }
        terms.push(term);
        p.ws();
        if p.pos == p.src.len() {
            break;
        }
        negative = p
            .sign()
            .ok_or_else(|| p.error("expected `+`, `-` or end of input"))?;
    }
    Ok(ProcessElement::from_terms(terms))
}

pub fn print<C: Coeff>(e: &ProcessElement<C>) -> String {
    e.to_string()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ProcessError {
        ProcessError::Syntax {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ProcessError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    /// `Some(true)` for `-`, `Some(false)` for `+`.
    fn sign(&mut self) -> Option<bool> {
        if self.eat(b'-') {
            Some(true)
        } else if self.eat(b'+') {
            Some(false)
        } else {
            None
        }
    }

    fn term<C: Coeff>(&mut self) -> Result<ProcessTerm<C>, ProcessError> {
        self.ws();
        let strength = if self.peek() == Some(b'[') {
            C::one()
        } else {
            self.scalar()?
        };
        let mut chain = Vec::new();
        while self.eat(b'[') {
            let left = self.label()?;
            self.expect(b',')?;
            let right = self.label()?;
            self.expect(b']')?;
            chain.push((left, right));
            self.ws();
        }
        if chain.is_empty() {
            return Err(self.error("expected `[`"));
        }
        Ok(ProcessTerm { strength, chain })
    }

    fn label(&mut self) -> Result<Label, ProcessError> {
        let mut label = self.ident()?;
        while self.eat(b'+') {
            label = label.plus(&self.ident()?);
        }
        Ok(label)
    }

    fn ident(&mut self) -> Result<Label, ProcessError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        Label::atom(text).map_err(|_| ProcessError::Syntax {
            pos: start,
            msg: "expected a label".into(),
        })
    }

    fn scalar<C: Coeff>(&mut self) -> Result<C, ProcessError> {
        if self.eat(b'(') {
            let negative = self.sign().unwrap_or(false);
            let mut value = self.part::<C>()?;
            if negative {
                value = -value;
            }
            if let Some(negative) = self.sign() {
                let second = self.part::<C>()?;
                value = if negative {
                    value - second
                } else {
                    value + second
                };
            }
            self.expect(b')')?;
            return Ok(value);
        }
        self.part()
    }

    fn part<C: Coeff>(&mut self) -> Result<C, ProcessError> {
        self.ws();
        if self.peek() == Some(b'i') {
            self.pos += 1;
            return Ok(C::i());
        }
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos > s
        };
        if !digits(self) {
            return Err(self.error("expected a scalar or `[`"));
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            if !digits(self) {
                return Err(self.error("expected digits after `.`"));
            }
        }
        if self.peek() == Some(b'/') {
            self.pos += 1;
            if !digits(self) {
                return Err(self.error("expected a denominator"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        let value = C::parse_real(text).ok_or(ProcessError::Syntax {
            pos: start,
            msg: "invalid number".into(),
        })?;
        if self.peek() == Some(b'i') {
            self.pos += 1;
            return Ok(value * C::i());
        }
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{gauss, GaussRational};

    type E = ProcessElement<GaussRational>;

    fn p(s: &str) -> E {
        parse(s).unwrap()
    }

    #[test]
    fn succession_evaluates() {
        assert_eq!(p("[A,B][B,C]").evaluate().unwrap().to_string(), "[A,C]");
    }

    #[test]
    fn formal_sums_keep_strengths() {
        let e = p("2[A,B] + 3[C,D]");
        assert_eq!(e.terms().len(), 2);
        assert_eq!(e.terms()[0].strength, GaussRational::from_int(2));
        assert_eq!(e.terms()[1].strength, GaussRational::from_int(3));
    }

    #[test]
    fn mismatch_parses_but_fails_to_evaluate() {
        let e = p("[A,B][C,D]");
        assert!(matches!(
            e.evaluate(),
            Err(ProcessError::UndefinedComposition { .. })
        ));
    }

    #[test]
    fn scalars() {
        assert_eq!(p("0.5i[A,B]").terms()[0].strength, gauss(0, 1, 1, 2));
        assert_eq!(p("(1/2-3i)[A,B]").terms()[0].strength, gauss(1, 2, -3, 1));
        assert_eq!(p("-i[A,B]").terms()[0].strength, -GaussRational::i());
        assert_eq!(
            p("[A,B] - 2[A,B]").evaluate().unwrap().to_string(),
            "-[A,B]"
        );
        assert_eq!(p("[A+C,B+D]").terms()[0].chain[0].0.to_string(), "A+C");
        assert!(p("0").is_zero());
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse::<GaussRational>("[A,B] [B,").unwrap_err();
        assert_eq!(
            err,
            ProcessError::Syntax {
                pos: 9,
                msg: "expected a label".into()
            }
        );
        let err = parse::<GaussRational>("2[A,B] * [B,C]").unwrap_err();
        assert!(matches!(err, ProcessError::Syntax { pos: 7, .. }));
        assert!(parse::<GaussRational>("").is_err());
        assert!(parse::<GaussRational>("3").is_err());
    }

    #[test]
    fn round_trip() {
        for s in [
            "2[A,B] + 3[C,D]",
            "-[A,B][B,C] - i[X,Y]",
            "(1/3+2i)[A+B,C]",
            "1/2i[P,Q][Q,R][R,S]",
        ] {
            let once = p(s);
            assert_eq!(p(&print(&once)), once, "{s}");
        }
    }
}
