//! Scalar traits shared by the numeric and symbolic engines.

use std::fmt::Debug;
use std::str::FromStr;

use nalgebra as na;
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits as nt;
use num_traits::{One, Signed, Zero};

/// Real field used by every numeric module (f32 or f64).
pub trait Real:
    na::RealField
    + Copy
    + nt::FloatConst
    + nt::FromPrimitive
    + nt::ToPrimitive
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Converts an f64 literal. Panics only for values the type cannot hold, which never happens for f32/f64.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`].
pub type Cplx<T> = Complex<T>;

/// Exact complex rational, `p/q + i r/s`.
pub type GaussRational = Complex<BigRational>;

/// Coefficient field for the symbolic engines (CCR kernel, process algebra, Moyal).
///
/// Two instances exist: exact [`GaussRational`] and `Complex<f64>`.
pub trait Coeff:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// The imaginary unit.
    fn i() -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn conj(&self) -> Self;

    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    /// Parses an unsigned real literal: `12`, `0.25`, `3/4`, `1.5e-3`.
    fn parse_real(text: &str) -> Option<Self>;

    /// Real and imaginary parts as f64 (lossy for exact coefficients).
    fn to_f64_parts(&self) -> (f64, f64);

    /// Renders a real value (imaginary part ignored) in a form accepted by [`Coeff::parse_real`],
    /// including a leading `-` when negative.
    fn fmt_real_part(&self) -> String;

    fn fmt_imag_part(&self) -> String;

    fn is_real(&self) -> bool;

    fn is_imag(&self) -> bool;

    /// Sign of the real part if the value is real, of the imaginary part if purely imaginary.
    fn leading_negative(&self) -> bool;

    /// Human readable rendering: `0`, `-3`, `1/2`, `i`, `-i/2`, `(1/2+3i)`.
    fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        if self.is_real() {
            return self.fmt_real_part();
        }
        if self.is_imag() {
            return render_imag(&self.fmt_imag_part());
        }
        let re = self.fmt_real_part();
        let im = render_imag(&self.fmt_imag_part());
        if im.starts_with('-') {
            format!("({re}{im})")
        } else {
            format!("({re}+{im})")
        }
    }
}

fn render_imag(mag: &str) -> String {
    let (sign, body) = match mag.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mag),
    };
    match body {
        "1" => format!("{sign}i"),
        _ => match body.split_once('/') {
            Some(("1", den)) => format!("{sign}i/{den}"),
            Some((num, den)) => format!("{sign}{num}i/{den}"),
            None => format!("{sign}{body}i"),
        },
    }
}

fn parse_big_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() || text.starts_with(['+', '-']) {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_big_rational(num)?;
        let den = parse_big_rational(den)?;
        if den.is_zero() {
            return None;
        }
        return Some(num / den);
    }
    let (mantissa, exponent) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, i32::from_str(e).ok()?),
        None => (text, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(&digits).ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(numer * nt::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, nt::pow(ten, (-scale) as usize))
    };
    Some(value)
}

fn fmt_big_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl Coeff for GaussRational {
    fn i() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
        )
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }

    fn parse_real(text: &str) -> Option<Self> {
        parse_big_rational(text).map(|re| Complex::new(re, BigRational::zero()))
    }

    fn to_f64_parts(&self) -> (f64, f64) {
        use nt::ToPrimitive;
        (
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    fn fmt_real_part(&self) -> String {
        fmt_big_rational(&self.re)
    }

    fn fmt_imag_part(&self) -> String {
        fmt_big_rational(&self.im)
    }

    fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    fn is_imag(&self) -> bool {
        self.re.is_zero() && !self.im.is_zero()
    }

    fn leading_negative(&self) -> bool {
        if self.re.is_zero() {
            self.im.is_negative()
        } else {
            self.im.is_zero() && self.re.is_negative()
        }
    }
}

impl Coeff for Complex<f64> {
    fn i() -> Self {
        Complex::new(0.0, 1.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(num as f64 / den as f64, 0.0)
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Complex::inv(self))
        }
    }

    fn parse_real(text: &str) -> Option<Self> {
        let text = text.trim();
        if text.starts_with(['+', '-']) {
            return None;
        }
        let re = match text.split_once('/') {
            Some((a, b)) => f64::from_str(a).ok()? / f64::from_str(b).ok()?,
            None => f64::from_str(text).ok()?,
        };
        re.is_finite().then(|| Complex::new(re, 0.0))
    }

    fn to_f64_parts(&self) -> (f64, f64) {
        (self.re, self.im)
    }

    fn fmt_real_part(&self) -> String {
        format!("{}", self.re)
    }

    fn fmt_imag_part(&self) -> String {
        format!("{}", self.im)
    }

    fn is_real(&self) -> bool {
        self.im == 0.0
    }

    fn is_imag(&self) -> bool {
        self.re == 0.0 && self.im != 0.0
    }

    fn leading_negative(&self) -> bool {
        if self.re == 0.0 {
            self.im < 0.0
        } else {
            self.im == 0.0 && self.re < 0.0
        }
    }
}

/// Exact Gaussian rational from integer parts `re_num/re_den + i im_num/im_den`.
pub fn gauss(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> GaussRational {
    Complex::new(
        BigRational::new(re_num.into(), re_den.into()),
        BigRational::new(im_num.into(), im_den.into()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        let q = GaussRational::parse_real("0.25").unwrap();
        assert_eq!(q, GaussRational::from_ratio(1, 4));
        let q = GaussRational::parse_real("1.5e-2").unwrap();
        assert_eq!(q, GaussRational::from_ratio(3, 200));
        let q = GaussRational::parse_real("6/4").unwrap();
        assert_eq!(q, GaussRational::from_ratio(3, 2));
        assert!(GaussRational::parse_real("-1").is_none());
        assert!(GaussRational::parse_real("1/0").is_none());
        assert!(GaussRational::parse_real("x").is_none());
    }

    #[test]
    fn renders_gaussian_rationals() {
        assert_eq!(GaussRational::i().render(), "i");
        assert_eq!((-GaussRational::i()).render(), "-i");
        assert_eq!(gauss(0, 1, 1, 2).render(), "i/2");
        assert_eq!(gauss(0, 1, -3, 4).render(), "-3i/4");
        assert_eq!(gauss(1, 2, 3, 1).render(), "(1/2+3i)");
        assert_eq!(gauss(-1, 1, -1, 1).render(), "(-1-i)");
        assert_eq!(GaussRational::zero().render(), "0");
        assert_eq!(GaussRational::from_int(-7).render(), "-7");
    }

    #[test]
    fn float_coefficients_render_round_trip() {
        let c = Complex::new(0.1, -2.5);
        assert_eq!(c.render(), "(0.1-2.5i)");
        assert_eq!(Complex::<f64>::parse_real("0.1").unwrap().re, 0.1);
    }
}
