//! Exact arithmetic in the quadratic field Q(sqrt 3).
//!
//! Neron-Severi classes of the product abelian surface are rational in the
//! divisor basis or in the Lorentz basis, but not in both at once; carrying
//! a sqrt-3 part keeps every class computation exact either way.

use crate::scalar::{rat_int, rat_to_f64, Rat};
use num_traits::{Signed, Zero};
use std::ops::{Add, Mul, Neg, Sub};

/// An element p + q*sqrt(3) with rational p, q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ext {
    pub p: Rat,
    pub q: Rat,
}

impl Ext {
    pub fn zero() -> Self {
        Ext { p: Rat::zero(), q: Rat::zero() }
    }

    pub fn from_rat(p: Rat) -> Self {
        Ext { p, q: Rat::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Ext::from_rat(rat_int(n))
    }

    pub fn sqrt3_times(q: Rat) -> Self {
        Ext { p: Rat::zero(), q }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> Option<&Rat> {
        if self.q.is_zero() {
            Some(&self.p)
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        rat_to_f64(&self.p) + rat_to_f64(&self.q) * 3f64.sqrt()
    }

    pub fn scale(&self, r: &Rat) -> Ext {
        Ext { p: &self.p * r, q: &self.q * r }
    }

    /// Exact sign of p + q*sqrt(3).
    pub fn sign(&self) -> i32 {
        let sp = rat_sign(&self.p);
        let sq = rat_sign(&self.q);
        match (sp, sq) {
            (0, 0) => 0,
            (s, 0) | (0, s) => s,
            (1, 1) => 1,
            (-1, -1) => -1,
            // Opposite signs: compare p^2 against 3 q^2; the dominant term wins.
            (sp, _) => {
                let p2 = &self.p * &self.p;
                let q2 = (&self.q * &self.q) * rat_int(3);
                match p2.cmp(&q2) {
                    std::cmp::Ordering::Greater => sp,
                    std::cmp::Ordering::Less => -sp,
                    std::cmp::Ordering::Equal => 0,
                }
            }
        }
    }

    pub fn is_nonneg(&self) -> bool {
        self.sign() >= 0
    }
}

pub fn rat_sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl Add for &Ext {
    type Output = Ext;
    fn add(self, rhs: &Ext) -> Ext {
        Ext { p: &self.p + &rhs.p, q: &self.q + &rhs.q }
    }
}

impl Sub for &Ext {
    type Output = Ext;
    fn sub(self, rhs: &Ext) -> Ext {
        Ext { p: &self.p - &rhs.p, q: &self.q - &rhs.q }
    }
}

impl Mul for &Ext {
    type Output = Ext;
    fn mul(self, rhs: &Ext) -> Ext {
        // (p1 + q1 s)(p2 + q2 s) = p1 p2 + 3 q1 q2 + (p1 q2 + p2 q1) s
        Ext {
            p: &self.p * &rhs.p + rat_int(3) * (&self.q * &rhs.q),
            q: &self.p * &rhs.q + &rhs.p * &self.q,
        }
    }
}

impl Neg for &Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        Ext { p: -&self.p, q: -&self.q }
    }
}
