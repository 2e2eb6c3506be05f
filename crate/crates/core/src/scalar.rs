//! Arithmetic backends.
//!
//! Every algorithm in the crate is written once against [`Scalar`] and runs either in
//! IEEE `f64` or in exact arbitrary-precision rationals ([`Rational`]). The exact backend
//! is used for yes/no verdicts (positive definiteness, determinant identities) and for the
//! reductions that feed the floating-point eigensolver.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number with arbitrary-precision numerator and denominator.
pub type Rational = BigRational;

/// Arithmetic backend tag, as it appears in input files (`"f64"` / `"rational"`).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize,
)]
pub enum Backend {
    #[default]
    #[serde(rename = "f64")]
    Float,
    #[serde(rename = "rational")]
    Rational,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Float => f.write_str("f64"),
            Backend::Rational => f.write_str("rational"),
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f64" | "float" => Ok(Backend::Float),
            "rational" | "exact" => Ok(Backend::Rational),
            other => Err(format!(
                "unknown backend `{other}` (expected f64 or rational)"
            )),
        }
    }
}

/// Field operations shared by the float and exact backends.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when arithmetic never rounds.
    const EXACT: bool;
    const BACKEND: Backend;

    fn from_i64(v: i64) -> Self;
    fn from_bigint(v: &BigInt) -> Self;
    fn from_rational(v: &Rational) -> Self;
    /// Exact for the rational backend: every finite `f64` is a dyadic rational.
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact rational value (a finite `f64` is converted without rounding).
    fn to_rational(&self) -> Rational;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Whether `value` is indistinguishable from zero relative to `scale`.
    ///
    /// Exact backends compare against zero; the float backend uses `rel_tol * |scale|`.
    fn negligible(value: &Self, scale: &Self, rel_tol: f64) -> bool;

    /// Equality up to a relative tolerance (exact equality in the rational backend).
    fn approx_eq(a: &Self, b: &Self, rel_tol: f64) -> bool;

    fn is_finite(&self) -> bool;
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const BACKEND: Backend = Backend::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_bigint(v: &BigInt) -> Self {
        v.to_f64().unwrap_or(f64::NAN)
    }

    fn from_rational(v: &Rational) -> Self {
        rational_to_f64(v)
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Rational {
        Rational::from_f64(*self)
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn negligible(value: &Self, scale: &Self, rel_tol: f64) -> bool {
        f64::abs(*value) <= rel_tol * f64::abs(*scale)
    }

    fn approx_eq(a: &Self, b: &Self, rel_tol: f64) -> bool {
        let scale = f64::abs(*a).max(f64::abs(*b)).max(f64::MIN_POSITIVE);
        f64::abs(a - b) <= rel_tol * scale
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const BACKEND: Backend = Backend::Rational;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_bigint(v: &BigInt) -> Self {
        Rational::from_integer(v.clone())
    }

    fn from_rational(v: &Rational) -> Self {
        v.clone()
    }

    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).expect("non-finite value cannot enter the exact backend")
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn negligible(value: &Self, _scale: &Self, _rel_tol: f64) -> bool {
        value.is_zero()
    }

    fn approx_eq(a: &Self, b: &Self, _rel_tol: f64) -> bool {
        a == b
    }

    fn is_finite(&self) -> bool {
        true
    }
}

/// Correctly scaled conversion; survives numerators and denominators far outside `f64` range.
pub fn rational_to_f64(v: &Rational) -> f64 {
    if let Some(x) = ToPrimitive::to_f64(v) {
        if x.is_finite() && (x != 0.0 || v.is_zero()) {
            return x;
        }
    }
    // Fall back to shifting both parts down to 64 significant bits.
    let num = v.numer();
    let den = v.denom();
    let shift_n = num.bits().saturating_sub(64) as i64;
    let shift_d = den.bits().saturating_sub(64) as i64;
    let n = (num >> shift_n as usize).to_f64().unwrap_or(f64::NAN);
    let d = (den >> shift_d as usize).to_f64().unwrap_or(f64::NAN);
    (n / d) * 2f64.powi((shift_n - shift_d) as i32)
}

/// Parses `"p/q"`, `"p"` or a decimal literal such as `"0.25"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in `{text}`"))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in `{text}`"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in `{text}`"));
        }
        return Ok(Rational::new(p, q));
    }
    if let Ok(i) = t.parse::<BigInt>() {
        return Ok(Rational::from_integer(i));
    }
    parse_decimal(t).ok_or_else(|| format!("`{text}` is not a rational literal"))
}

fn parse_decimal(t: &str) -> Option<Rational> {
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
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
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / BigInt::from(10);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    Some(if neg { -value } else { value })
}

/// `m · 2^e` with an `f64` mantissa and unbounded exponent, for products and quotients of
/// huge integers whose final value fits in `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledFloat {
    mantissa: f64,
    exponent: i64,
}

impl ScaledFloat {
    fn normalized(mantissa: f64, exponent: i64) -> Self {
        if mantissa == 0.0 || !mantissa.is_finite() {
            return ScaledFloat {
                mantissa,
                exponent: 0,
            };
        }
        let k = mantissa.abs().log2().floor() as i32;
        ScaledFloat {
            mantissa: mantissa * 2f64.powi(-k),
            exponent: exponent + k as i64,
        }
    }

    pub fn from_bigint(x: &BigInt) -> Self {
        let shift = x.bits().saturating_sub(62);
        let m = ToPrimitive::to_f64(&(x >> shift)).unwrap_or(f64::NAN);
        Self::normalized(m, shift as i64)
    }

    pub fn from_rational(x: &Rational) -> Self {
        Self::from_bigint(x.numer()).div(Self::from_bigint(x.denom()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, o: Self) -> Self {
        Self::normalized(self.mantissa * o.mantissa, self.exponent + o.exponent)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, o: Self) -> Self {
        Self::normalized(self.mantissa / o.mantissa, self.exponent - o.exponent)
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(self) -> Self {
        let (m, e) = if self.exponent % 2 == 0 {
            (self.mantissa, self.exponent)
        } else {
            (self.mantissa * 2.0, self.exponent - 1)
        };
        Self::normalized(m.sqrt(), e / 2)
    }

    pub fn to_f64(self) -> f64 {
        let mut m = self.mantissa;
        let mut e = self.exponent;
        while e > 1000 {
            m *= 2f64.powi(1000);
            e -= 1000;
        }
        while e < -1000 {
            m *= 2f64.powi(-1000);
            e += 1000;
        }
        m * 2f64.powi(e as i32)
    }
}

/// Canonical `"p/q"` rendering (`"p"` for integers).
pub fn format_rational(v: &Rational) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Converts a slice between backends.
pub fn convert<A: Scalar, B: Scalar>(values: &[A]) -> Vec<B> {
    values.iter().map(|v| cast::<A, B>(v)).collect()
}

/// Converts one value between backends, exactly whenever the target is exact.
pub fn cast<A: Scalar, B: Scalar>(v: &A) -> B {
    if B::EXACT {
        B::from_rational(&v.to_rational())
    } else {
        B::from_f64(v.to_f64())
    }
}
