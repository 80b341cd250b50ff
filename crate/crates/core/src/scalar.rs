//! Dual-mode numbers: exact rationals for polyhedral data, tolerated floats
//! for conic and irrational data.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type Rat = BigRational;

/// Default tolerance attached to approximate scalars.
pub const DEFAULT_TOL: f64 = 1e-9;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Falls back to a quotient of lossy conversions for huge operands.
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    })
}

/// Parse a decimal or fraction string ("3", "-4/7", "0.25") into an exact rational.
pub fn rat_parse(s: &str) -> Option<Rat> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_part: BigInt = if int == "-" || int.is_empty() {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return None;
        }
        let num: BigInt = frac.parse().ok()?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = Rat::new(num, den);
        let whole = Rat::from(int_part);
        return Some(if neg { whole - frac_part } else { whole + frac_part });
    }
    let n: BigInt = s.parse().ok()?;
    Some(Rat::from(n))
}

/// A number that is either an exact rational or a float with a tolerance.
///
/// Mixing modes promotes to `Approx` with the larger tolerance; exact
/// arithmetic never rounds.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(Rat),
    Approx { value: f64, tol: f64 },
}

impl Scalar {
    pub fn exact_int(n: i64) -> Self {
        Scalar::Exact(rat_int(n))
    }

    pub fn exact(n: i64, d: i64) -> Self {
        Scalar::Exact(rat(n, d))
    }

    pub fn approx(value: f64) -> Self {
        Scalar::Approx { value, tol: DEFAULT_TOL }
    }

    pub fn approx_tol(value: f64, tol: f64) -> Self {
        Scalar::Approx { value, tol }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rat_to_f64(r),
            Scalar::Approx { value, .. } => *value,
        }
    }

    pub fn tol(&self) -> f64 {
        match self {
            Scalar::Exact(_) => 0.0,
            Scalar::Approx { tol, .. } => *tol,
        }
    }

    pub fn as_exact(&self) -> Option<&Rat> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Approx { value, tol } => value.abs() <= *tol,
        }
    }

    pub fn is_nonneg(&self) -> bool {
        match self {
            Scalar::Exact(r) => !r.is_negative(),
            Scalar::Approx { value, tol } => *value >= -*tol,
        }
    }

    pub fn is_positive_strict(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_positive(),
            Scalar::Approx { value, tol } => *value > *tol,
        }
    }

    pub fn sqrt(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::approx(rat_to_f64(r).sqrt()),
            Scalar::Approx { value, tol } => Scalar::Approx { value: value.sqrt(), tol: *tol },
        }
    }

    fn promote(a: &Scalar, b: &Scalar) -> Option<(f64, f64, f64)> {
        match (a, b) {
            (Scalar::Exact(_), Scalar::Exact(_)) => None,
            _ => Some((a.to_f64(), b.to_f64(), a.tol().max(b.tol()).max(DEFAULT_TOL))),
        }
    }

    /// Approximate equality honoring the stored tolerance on either side.
    pub fn approx_eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let tol = self.tol().max(other.tol()).max(DEFAULT_TOL);
                (self.to_f64() - other.to_f64()).abs() <= tol
            }
        }
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Self {
        Scalar::Exact(r)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match Scalar::promote(self, rhs) {
                    None => {
                        let (Scalar::Exact(a), Scalar::Exact(b)) = (self, rhs) else {
                            unreachable!()
                        };
                        Scalar::Exact(a $op b)
                    }
                    Some((a, b, tol)) => Scalar::Approx { value: a $op b, tol },
                }
            }
        }
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);
scalar_binop!(Div, div, /);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx { value, tol } => Scalar::Approx { value: -value, tol: *tol },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Approx { value, .. } => write!(f, "{}", format_f64(*value)),
        }
    }
}

/// Fixed 12-fraction-digit rendering used by all numeric CLI output.
pub fn format_f64(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        return "-inf".to_string();
    }
    let s = format!("{x:.12}");
    // Normalizes "-0.000000000000" to the positive form.
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}
