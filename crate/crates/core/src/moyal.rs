//! Phase-space polynomials in `(x, p)` with an explicit `hbar` degree, the Groenewold star
//! product and the Moyal, Baker and Poisson brackets, all with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::rng::Rng;
use crate::scalar::{Coeff, GaussRational};

type Q = GaussRational;

/// `(x degree, p degree, hbar degree)`.
pub type PhaseKey = (u32, u32, u32);

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PhasePoly {
    terms: BTreeMap<PhaseKey, Q>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoyalError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("polynomial has hbar-free terms and cannot be divided by hbar")]
    NotDivisible,
}

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, j| {
        acc * BigInt::from(n - j) / BigInt::from(j + 1)
    })
}

/// `a (a-1) ... (a-n+1)`, the coefficient of the `n`-th derivative of `y^a`.
fn falling(a: u32, n: u32) -> BigInt {
    (0..n).fold(BigInt::one(), |acc, j| acc * BigInt::from(a - j))
}

fn real(q: BigRational) -> Q {
    Q::new(q, BigRational::zero())
}

impl PhasePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, 0, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn monomial(c: Q, x: u32, p: u32, h: u32) -> Self {
        let mut out = Self::zero();
        out.add_term((x, p, h), c);
        out
    }

    pub fn x() -> Self {
        Self::monomial(Q::one(), 1, 0, 0)
    }

    pub fn p() -> Self {
        Self::monomial(Q::one(), 0, 1, 0)
    }

    pub fn hbar() -> Self {
        Self::monomial(Q::one(), 0, 0, 1)
    }

    fn add_term(&mut self, key: PhaseKey, c: Q) {
        if c.is_zero() {
            return;
        }
        let sum = self.terms.remove(&key).unwrap_or_else(Q::zero) + c;
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PhaseKey, &Q)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, x: u32, p: u32, h: u32) -> Q {
        self.terms.get(&(x, p, h)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `x + p` degree.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(a, b, _)| a + b).max().unwrap_or(0)
    }

    pub fn hbar_degree(&self) -> u32 {
        self.terms.keys().map(|&(_, _, k)| k).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            out.add_term(*k, c.clone() * s.clone());
        }
        out
    }

    /// Pointwise (commutative) product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(a1, b1, k1), c1) in &self.terms {
            for (&(a2, b2, k2), c2) in &other.terms {
                out.add_term((a1 + a2, b1 + b2, k1 + k2), c1.clone() * c2.clone());
            }
        }
        out
    }

    /// `d^nx/dx^nx d^np/dp^np`.
    pub fn derivative(&self, nx: u32, np: u32) -> Self {
        let mut out = Self::zero();
        for (&(a, b, k), c) in &self.terms {
            if a >= nx && b >= np {
                let factor = real(BigRational::from_integer(falling(a, nx) * falling(b, np)));
                out.add_term((a - nx, b - np, k), c.clone() * factor);
            }
        }
        out
    }

    pub fn dx(&self) -> Self {
        self.derivative(1, 0)
    }

    pub fn dp(&self) -> Self {
        self.derivative(0, 1)
    }

    /// Multiplies by `hbar^k`.
    pub fn shift_hbar(&self, k: u32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b, h), c)| ((a, b, h + k), c.clone()))
                .collect(),
        }
    }

    pub fn divide_hbar(&self) -> Result<Self, MoyalError> {
        if self.terms.keys().any(|&(_, _, h)| h == 0) {
            return Err(MoyalError::NotDivisible);
        }
        Ok(Self {
            terms: self
                .terms
                .iter()
                .map(|(&(a, b, h), c)| ((a, b, h - 1), c.clone()))
                .collect(),
        })
    }

    /// The polynomial at `hbar = 0`.
    pub fn at_hbar_zero(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|(&(_, _, h), _)| h == 0)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Coefficient polynomials of each power of `hbar`, themselves `hbar`-free.
    pub fn by_hbar_order(&self) -> BTreeMap<u32, PhasePoly> {
        let mut out: BTreeMap<u32, PhasePoly> = BTreeMap::new();
        for (&(a, b, h), c) in &self.terms {
            out.entry(h).or_default().add_term((a, b, 0), c.clone());
        }
        out
    }

    /// Random polynomial with up to `terms` monomials of total degree `<= max_degree`,
    /// no `hbar`, and small Gaussian-rational coefficients.
    pub fn random(rng: &mut Rng, max_degree: u32, terms: usize) -> Self {
        let mut out = Self::zero();
        for _ in 0..terms {
            let deg = rng.below(max_degree as u64 + 1) as u32;
            let a = rng.below(deg as u64 + 1) as u32;
            let re = rng.rational(5, 3);
            let im = if rng.coin() {
                rng.rational(3, 2)
            } else {
                BigRational::zero()
            };
            out.add_term((a, deg - a, 0), Q::new(re, im));
        }
        out
    }

    /// Terms as `(x degree, p degree, hbar degree, coefficient)` with exact coefficient text.
    pub fn term_list(&self) -> Vec<TermEntry> {
        self.ordered()
            .into_iter()
            .map(|(&(a, b, h), c)| TermEntry {
                x: a,
                p: b,
                hbar: h,
                coefficient: c.render(),
            })
            .collect()
    }

    fn ordered(&self) -> Vec<(&PhaseKey, &Q)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        // lowest hbar order first, then highest degree first
        v.sort_by(|(ka, _), (kb, _)| {
            ka.2.cmp(&kb.2)
                .then((kb.0 + kb.1).cmp(&(ka.0 + ka.1)))
                .then(kb.0.cmp(&ka.0))
        });
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermEntry {
    pub x: u32,
    pub p: u32,
    pub hbar: u32,
    pub coefficient: String,
}

impl fmt::Display for PhasePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(a, b, h), c)) in self.ordered().into_iter().enumerate() {
            let vars: Vec<String> = [("x", a), ("p", b), ("h", h)]
                .into_iter()
                .filter(|&(_, d)| d > 0)
                .map(|(v, d)| {
                    if d == 1 {
                        v.to_string()
                    } else {
                        format!("{v}^{d}")
                    }
                })
                .collect();
            let negative = c.leading_negative();
            let mag = if negative { -c.clone() } else { c.clone() };
            if n == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            }
            if vars.is_empty() {
                write!(f, "{}", mag.render())?;
            } else {
                if !mag.is_one() {
                    write!(f, "{}*", mag.render())?;
                }
                write!(f, "{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Groenewold series `f exp[(i hbar / 2)(<-dx ->dp - <-dp ->dx)] g`, finite for polynomials.
pub fn star(f: &PhasePoly, g: &PhasePoly) -> PhasePoly {
    let top = f.degree().min(g.degree());
    let half_i = Q::new(BigRational::zero(), BigRational::new(1.into(), 2.into()));
    let mut out = PhasePoly::zero();
    let mut weight = Q::one();
    for n in 0..=top {
        if n > 0 {
            weight = weight * half_i.clone() * real(BigRational::new(1.into(), n.into()));
        }
        let mut order = PhasePoly::zero();
        for k in 0..=n {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let c = real(BigRational::from_integer(binomial(n, k) * sign));
            order = order.add(
                &f.derivative(n - k, k)
                    .mul(&g.derivative(k, n - k))
                    .scale(&c),
            );
        }
        out = out.add(&order.scale(&weight).shift_hbar(n));
    }
    out
}

/// Bopp-shift route: the Weyl-symmetrized symbol of `f`, evaluated on the operators
/// `X = x + (i hbar / 2) d/dp` and `P = p - (i hbar / 2) d/dx`, applied to `g`.
///
/// Each monomial `x^a p^b` becomes the average of all words in `a` copies of `X` and `b` of `P`.
pub fn star_bopp(f: &PhasePoly, g: &PhasePoly) -> PhasePoly {
    let half_i = Q::new(BigRational::zero(), BigRational::new(1.into(), 2.into()));
    let big_x = |u: &PhasePoly| {
        u.mul(&PhasePoly::x())
            .add(&u.dp().shift_hbar(1).scale(&half_i))
    };
    let big_p = |u: &PhasePoly| {
        u.mul(&PhasePoly::p())
            .sub(&u.dx().shift_hbar(1).scale(&half_i))
    };
    let mut out = PhasePoly::zero();
    for (&(a, b, h), c) in f.terms() {
        let mut acc = PhasePoly::zero();
        let mut count = 0u64;
        for word in words(a, b) {
            let mut u = g.clone();
            // rightmost letter acts first
            for &is_x in word.iter().rev() {
                u = if is_x { big_x(&u) } else { big_p(&u) };
            }
            acc = acc.add(&u);
            count += 1;
        }
        let avg = real(BigRational::new(1.into(), BigInt::from(count)));
        out = out.add(&acc.scale(&(avg * c.clone())).shift_hbar(h));
    }
    out
}

/// All arrangements of `a` trues and `b` falses.
fn words(a: u32, b: u32) -> Vec<Vec<bool>> {
    if a == 0 {
        return vec![vec![false; b as usize]];
    }
    if b == 0 {
        return vec![vec![true; a as usize]];
    }
    let mut out = Vec::new();
    for mut w in words(a - 1, b) {
        w.insert(0, true);
        out.push(w);
    }
    for mut w in words(a, b - 1) {
        w.insert(0, false);
        out.push(w);
    }
    out
}

/// `(f * g - g * f) / (i hbar)`.
pub fn moyal_bracket(f: &PhasePoly, g: &PhasePoly) -> PhasePoly {
    let diff = star(f, g).sub(&star(g, f));
    let minus_i = Q::new(BigRational::zero(), -BigRational::one());
    diff.divide_hbar()
        .expect("the commutator of symbols is odd in hbar")
        .scale(&minus_i)
}

/// `(f * g + g * f) / 2`.
pub fn baker_bracket(f: &PhasePoly, g: &PhasePoly) -> PhasePoly {
    star(f, g)
        .add(&star(g, f))
        .scale(&real(BigRational::new(1.into(), 2.into())))
}

/// `df/dx dg/dp - df/dp dg/dx`.
pub fn poisson_bracket(f: &PhasePoly, g: &PhasePoly) -> PhasePoly {
    f.dx().mul(&g.dp()).sub(&f.dp().mul(&g.dx()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BracketKind {
    Moyal,
    Baker,
    Poisson,
}

impl std::str::FromStr for BracketKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "moyal" => Ok(Self::Moyal),
            "baker" => Ok(Self::Baker),
            "poisson" => Ok(Self::Poisson),
            other => Err(format!(
                "unknown bracket `{other}` (expected moyal, baker or poisson)"
            )),
        }
    }
}

pub fn bracket(kind: BracketKind, f: &PhasePoly, g: &PhasePoly) -> PhasePoly {
    match kind {
        BracketKind::Moyal => moyal_bracket(f, g),
        BracketKind::Baker => baker_bracket(f, g),
        BracketKind::Poisson => poisson_bracket(f, g),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalLimitReport {
    /// `MB(f, g) - PB(f, g)` split by power of `hbar`.
    pub moyal_minus_poisson: BTreeMap<u32, PhasePoly>,
    /// `Baker(f, g) - f g` split by power of `hbar`.
    pub baker_minus_product: BTreeMap<u32, PhasePoly>,
}

impl ClassicalLimitReport {
    fn lowest(parts: &BTreeMap<u32, PhasePoly>) -> Option<u32> {
        parts.keys().next().copied()
    }

    /// Lowest `hbar` power in `MB - PB`, `None` when the difference vanishes.
    pub fn moyal_lowest_order(&self) -> Option<u32> {
        Self::lowest(&self.moyal_minus_poisson)
    }

    pub fn baker_lowest_order(&self) -> Option<u32> {
        Self::lowest(&self.baker_minus_product)
    }

    /// Both differences vanish at `hbar^0`, and the first corrections are at least `hbar^2`.
    pub fn pass(&self) -> bool {
        [self.moyal_lowest_order(), self.baker_lowest_order()]
            .iter()
            .all(|o| o.map_or(true, |k| k >= 2))
    }
}

pub fn classical_limit_report(f: &PhasePoly, g: &PhasePoly) -> ClassicalLimitReport {
    ClassicalLimitReport {
        moyal_minus_poisson: moyal_bracket(f, g)
            .sub(&poisson_bracket(f, g))
            .by_hbar_order(),
        baker_minus_product: baker_bracket(f, g).sub(&f.mul(g)).by_hbar_order(),
    }
}

/// Parses monomials `c x^a p^b h^k` joined by `+` and `-`. The coefficient may be an integer,
/// decimal or fraction, optionally followed by `i`, a bare `i`, or a parenthesized complex
/// number such as `(1/2 - 3i)`. Factors may be separated by `*`.
pub fn parse_poly(text: &str) -> Result<PhasePoly, MoyalError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut out = PhasePoly::zero();
    p.ws();
    let mut negative = p.sign().unwrap_or(false);
    loop {
        let t = p.monomial()?;
        out = out.add(&if negative { t.scale(&-Q::one()) } else { t });
        p.ws();
        if p.pos == p.src.len() {
            return Ok(out);
        }
        negative = p.sign().ok_or_else(|| p.error("expected `+` or `-`"))?;
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> MoyalError {
        MoyalError::Syntax {
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

    fn sign(&mut self) -> Option<bool> {
        if self.eat(b'-') {
            Some(true)
        } else if self.eat(b'+') {
            Some(false)
        } else {
            None
        }
    }

    fn is_var(c: Option<u8>) -> bool {
        matches!(c, Some(b'x' | b'p' | b'h'))
    }

    fn monomial(&mut self) -> Result<PhasePoly, MoyalError> {
        self.ws();
        let coeff = if Self::is_var(self.peek()) {
            Q::one()
        } else {
            self.scalar()?
        };
        let mut degrees = [0u32; 3];
        loop {
            self.ws();
            let star = self.peek() == Some(b'*');
            if star {
                self.pos += 1;
                self.ws();
            }
            let Some(c) = self.peek().filter(|&c| Self::is_var(Some(c))) else {
                if star {
                    return Err(self.error("expected `x`, `p` or `h` after `*`"));
                }
                break;
            };
            self.pos += 1;
            let slot = match c {
                b'x' => 0,
                b'p' => 1,
                _ => 2,
            };
            let mut d = 1;
            if self.eat(b'^') {
                self.ws();
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                d = text.parse().map_err(|_| MoyalError::Syntax {
                    pos: start,
                    msg: "expected an exponent".into(),
                })?;
            }
            degrees[slot] += d;
        }
        Ok(PhasePoly::monomial(
            coeff, degrees[0], degrees[1], degrees[2],
        ))
    }

    fn scalar(&mut self) -> Result<Q, MoyalError> {
        if self.eat(b'(') {
            let negative = self.sign().unwrap_or(false);
            let mut value = self.part()?;
            if negative {
                value = -value;
            }
            if let Some(negative) = self.sign() {
                let second = self.part()?;
                value = if negative {
                    value - second
                } else {
                    value + second
                };
            }
            if !self.eat(b')') {
                return Err(self.error("expected `)`"));
            }
            return Ok(value);
        }
        self.part()
    }

    /// `n`, `n.m`, `n/d`, each optionally imaginary as `ni`, `ni/d`, or a bare `i` or `i/d`.
    fn part(&mut self) -> Result<Q, MoyalError> {
        self.ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.peek().is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos > s
        };
        let mut value = if self.peek() == Some(b'i') {
            Q::one()
        } else {
            if !digits(self) {
                return Err(self.error("expected a coefficient or a variable"));
            }
            if self.peek() == Some(b'.') {
                self.pos += 1;
                if !digits(self) {
                    return Err(self.error("expected digits after `.`"));
                }
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            Q::parse_real(text).ok_or(MoyalError::Syntax {
                pos: start,
                msg: "invalid number".into(),
            })?
        };
        if self.peek() == Some(b'i') {
            self.pos += 1;
            value *= Q::i();
        }
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let d = self.pos;
            if !digits(self) {
                return Err(self.error("expected a denominator"));
            }
            let text = std::str::from_utf8(&self.src[d..self.pos]).expect("ascii");
            let den = Q::parse_real(text)
                .filter(|q| !q.is_zero())
                .ok_or(MoyalError::Syntax {
                    pos: d,
                    msg: "invalid denominator".into(),
                })?;
            value *= Coeff::inv(&den).expect("nonzero");
        }
        Ok(value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::gauss;

    fn poly(s: &str) -> PhasePoly {
        parse_poly(s).unwrap()
    }

    #[test]
    fn basic_star_products() {
        assert_eq!(star(&PhasePoly::x(), &PhasePoly::p()), poly("x p + i/2 h"));
        let f = poly("3x^2 p - 1/2 x");
        assert_eq!(star(&f, &PhasePoly::one()), f);
        assert_eq!(
            star(&poly("x^2"), &poly("p^2")),
            poly("x^2 p^2 + 2i h x p - 1/2 h^2")
        );
    }

    #[test]
    fn brackets_of_low_degree() {
        let (x, p) = (PhasePoly::x(), PhasePoly::p());
        assert_eq!(moyal_bracket(&x, &p), PhasePoly::one());
        assert_eq!(poisson_bracket(&x, &p), PhasePoly::one());
        assert_eq!(moyal_bracket(&poly("x^2"), &poly("p^2")), poly("4 x p"));
        assert_eq!(baker_bracket(&x, &p), poly("x p"));
    }

    #[test]
    fn cubic_correction_is_pure_hbar_squared() {
        let rep = classical_limit_report(&poly("x^3"), &poly("p^3"));
        assert_eq!(rep.moyal_lowest_order(), Some(2));
        assert_eq!(rep.moyal_minus_poisson.len(), 1);
        assert_eq!(
            rep.moyal_minus_poisson[&2],
            PhasePoly::constant(gauss(-3, 2, 0, 1))
        );
        assert!(rep.pass());
    }

    #[test]
    fn self_bracket_vanishes() {
        let f = poly("x^3 p + 2i x - p^2");
        assert!(moyal_bracket(&f, &f).is_zero());
    }

    #[test]
    fn bopp_route_matches_series() {
        let f = poly("x^2 p + (1/3 - i) p^3");
        let g = poly("x p^2 - 5 x^3 + 7");
        assert_eq!(star_bopp(&f, &g), star(&f, &g));
    }

    #[test]
    fn hbar_zero_is_pointwise() {
        let f = poly("x^2 p + p");
        let g = poly("x p^3 - x");
        assert_eq!(star(&f, &g).at_hbar_zero(), f.mul(&g));
    }

    #[test]
    fn display_and_parse_round_trip() {
        let s = star(&poly("x^2"), &poly("p^2"));
        assert_eq!(s.to_string(), "x^2*p^2 + 2i*x*p*h - 1/2*h^2");
        assert_eq!(poly(&s.to_string()), s);
        assert_eq!(poly("0"), PhasePoly::zero());
        assert_eq!(
            poly("-3i/4 x"),
            PhasePoly::monomial(gauss(0, 1, -3, 4), 1, 0, 0)
        );
        assert_eq!(
            poly("(1/2 + 3i) p"),
            PhasePoly::monomial(gauss(1, 2, 3, 1), 0, 1, 0)
        );
        assert_eq!(poly("-x*p"), PhasePoly::monomial(-Q::one(), 1, 1, 0));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_poly("x +"), Err(MoyalError::Syntax { .. })));
        assert!(matches!(
            parse_poly("2 y"),
            Err(MoyalError::Syntax { pos: 2, .. })
        ));
        assert!(parse_poly("x^").is_err());
        assert!(parse_poly("x/0").is_err());
    }
}
