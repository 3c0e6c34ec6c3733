//! Scalar arithmetic for q-deformed quantities.
//!
//! Every identity in this crate is evaluated at a fixed numeric `q`. Two
//! scalar types are supported through the [`Scalar`] trait: arbitrary
//! precision rationals ([`Rational`]) for exact verification and `f64` for
//! simulation-side predictions. A [`QContext`] carries `q`, its inverse and
//! (optionally) an exact square root so that half-integer powers can be
//! formed without leaving the rationals.

use std::fmt::{Debug, Display};

use num::bigint::BigInt;
use num::{BigRational, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational used in exact mode.
pub type Rational = BigRational;

/// Field operations needed by the generator, measure and duality code.
pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Send + Sync + num::Num + Signed + 'static
{
    /// `true` when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn as_f64(&self) -> f64;

    /// Integer power, negative exponents allowed for nonzero values.
    fn powi(&self, exp: i64) -> Self {
        if exp == 0 {
            return Self::one();
        }
        let base = if exp < 0 {
            Self::one() / self.clone()
        } else {
            self.clone()
        };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * sq.clone();
            }
            e >>= 1;
            if e > 0 {
                sq = sq.clone() * sq;
            }
        }
        acc
    }

    /// Real power when representable in this scalar type.
    fn powf(&self, exp: f64) -> Option<Self>;

    /// Exact square root if one exists in this scalar type.
    fn sqrt_exact(&self) -> Option<Self>;

    /// `|a - b|` as a double, used for violation reports.
    fn abs_diff_f64(&self, other: &Self) -> f64 {
        (self.clone() - other.clone()).abs().as_f64()
    }

    /// Whether `self` is zero up to the arithmetic's resolution.
    fn is_negligible(&self, scale: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.as_f64().abs() <= 1e-10 * scale.max(1.0)
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn as_f64(&self) -> f64 {
        *self
    }

    fn powi(&self, exp: i64) -> Self {
        f64::powf(*self, exp as f64)
    }

    fn powf(&self, exp: f64) -> Option<Self> {
        Some(f64::powf(*self, exp))
    }

    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn as_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn powf(&self, exp: f64) -> Option<Self> {
        if exp.fract() == 0.0 && exp.abs() < i64::MAX as f64 {
            Some(Scalar::powi(self, exp as i64))
        } else {
            None
        }
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let num = self.numer().sqrt();
        let den = self.denom().sqrt();
        (&num * &num == *self.numer() && &den * &den == *self.denom())
            .then(|| Rational::new(num, den))
    }
}

/// Parse a rational literal such as `3/2`, `-7` or `0`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

/// Asymmetry parameter `q >= 1` together with derived quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct QContext<S> {
    q: S,
    q_inv: S,
    sqrt_q: Option<S>,
}

impl<S: Scalar> QContext<S> {
    /// Build a context, detecting an exact square root of `q` when it exists.
    pub fn new(q: S) -> Result<Self> {
        if q < S::one() {
            return Err(Error::InvalidArgument(format!("q must satisfy q >= 1, got {q}")));
        }
        let q_inv = S::one() / q.clone();
        let sqrt_q = q.sqrt_exact();
        Ok(Self { q, q_inv, sqrt_q })
    }

    /// Build a context with an explicitly declared square root `s`, `q = s^2`.
    pub fn with_sqrt(s: S) -> Result<Self> {
        let q = s.clone() * s.clone();
        if s <= S::zero() {
            return Err(Error::InvalidArgument(format!("sqrt(q) must be positive, got {s}")));
        }
        let mut ctx = Self::new(q)?;
        ctx.sqrt_q = Some(s);
        Ok(ctx)
    }

    pub fn q(&self) -> &S {
        &self.q
    }

    pub fn q_inv(&self) -> &S {
        &self.q_inv
    }

    pub fn sqrt_q(&self) -> Option<&S> {
        self.sqrt_q.as_ref()
    }

    pub fn is_symmetric(&self) -> bool {
        self.q == S::one()
    }

    /// `q^e` for integer `e`.
    pub fn pow(&self, e: i64) -> S {
        if e >= 0 {
            self.q.powi(e)
        } else {
            self.q_inv.powi(-e)
        }
    }

    /// `q^(e/2)`; odd `e` needs the square root.
    pub fn pow_half(&self, e: i64) -> Result<S> {
        if e % 2 == 0 {
            return Ok(self.pow(e / 2));
        }
        if self.is_symmetric() {
            return Ok(S::one());
        }
        match &self.sqrt_q {
            Some(s) => Ok(s.powi(e)),
            None => Err(Error::MissingSqrt(self.q.to_string())),
        }
    }

    /// `q^x` for real `x`. Exact scalars accept integer and half-integer `x`.
    pub fn pow_real(&self, x: f64) -> Result<S> {
        if x.fract() == 0.0 {
            return Ok(self.pow(x as i64));
        }
        if S::EXACT {
            let twice = 2.0 * x;
            if twice.fract() == 0.0 {
                return self.pow_half(twice as i64);
            }
            return Err(Error::NotExact(format!("q^{x} is not rational")));
        }
        self.q
            .powf(x)
            .ok_or_else(|| Error::NotExact(format!("q^{x}")))
    }

    /// `q - 1/q`.
    pub fn asym(&self) -> S {
        self.q.clone() - self.q_inv.clone()
    }
}

impl QContext<Rational> {
    /// Exact context from a rational literal.
    pub fn exact(q: &str) -> Result<Self> {
        Self::new(parse_rational(q)?)
    }
}

impl QContext<f64> {
    pub fn float(q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::InvalidArgument(format!("q must be finite, got {q}")));
        }
        Self::new(q)
    }
}

/// Symmetric q-number `[c]_q = (q^c - q^-c)/(q - q^-1)`, equal to `c` at `q = 1`.
pub fn qnum<S: Scalar>(c: i64, ctx: &QContext<S>) -> S {
    if ctx.is_symmetric() {
        return S::from_i64(c);
    }
    (ctx.pow(c) - ctx.pow(-c)) / ctx.asym()
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`.
pub fn qfactorial<S: Scalar>(n: i64, ctx: &QContext<S>) -> Result<S> {
    if n < 0 {
        return Err(Error::InvalidArgument(format!("q-factorial of negative {n}")));
    }
    Ok((1..=n).fold(S::one(), |acc, k| acc * qnum(k, ctx)))
}

/// Symmetric q-binomial coefficient.
pub fn qbinom<S: Scalar>(n: i64, k: i64, ctx: &QContext<S>) -> Result<S> {
    if n < 0 || k < 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "q-binomial needs 0 <= k <= n, got n={n}, k={k}"
        )));
    }
    Ok(qfactorial(n, ctx)? / (qfactorial(k, ctx)? * qfactorial(n - k, ctx)?))
}
