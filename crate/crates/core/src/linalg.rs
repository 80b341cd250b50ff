//! Small exact integer/rational linear algebra for lattice computations.

use crate::error::{Error, Result};
use crate::scalar::{rat_int, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Lattice vector in N (or exponent vector in M).
pub type IVec = Vec<i64>;

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_vec(v: &[i64]) -> i64 {
    v.iter().fold(0, |g, &x| gcd(g, x))
}

pub fn is_primitive(v: &[i64]) -> bool {
    gcd_vec(v) == 1
}

pub fn primitive(v: &[i64]) -> IVec {
    let g = gcd_vec(v);
    if g <= 1 {
        v.to_vec()
    } else {
        v.iter().map(|&x| x / g).collect()
    }
}

/// Pairing of a dual vector with a lattice vector.
pub fn pair_ii(m: &[i64], w: &[i64]) -> i64 {
    m.iter().zip(w).map(|(a, b)| a * b).sum()
}

pub fn pair_ri(m: &[Rat], w: &[i64]) -> Rat {
    m.iter()
        .zip(w)
        .fold(Rat::zero(), |acc, (a, &b)| acc + a * rat_int(b))
}

/// Exact determinant of a square integer matrix (rows).
pub fn det_int(rows: &[IVec]) -> BigInt {
    let n = rows.len();
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| rat_int(x)).collect())
        .collect();
    assert!(m.iter().all(|r| r.len() == n));
    let mut det = Rat::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(p) = pivot else {
            return BigInt::zero();
        };
        if p != col {
            m.swap(p, col);
            det = -det;
        }
        let pv = m[col][col].clone();
        det *= pv.clone();
        for r in col + 1..n {
            let factor = &m[r][col] / &pv;
            for c in col..n {
                let sub = &factor * &m[col][c];
                m[r][c] = &m[r][c] - &sub;
            }
        }
    }
    debug_assert!(det.is_integer());
    det.to_integer()
}

/// Exact inverse of a square rational matrix (rows). Errors on singular input.
pub fn inverse_rat(rows: &[Vec<Rat>]) -> Result<Vec<Vec<Rat>>> {
    let n = rows.len();
    let mut a: Vec<Vec<Rat>> = rows.to_vec();
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero());
        let Some(p) = pivot else {
            return Err(Error::InvalidInput("singular matrix".into()));
        };
        a.swap(p, col);
        inv.swap(p, col);
        let pv = a[col][col].clone();
        for c in 0..n {
            a[col][c] = &a[col][c] / &pv;
            inv[col][c] = &inv[col][c] / &pv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..n {
                    let s = &f * &a[col][c];
                    a[r][c] = &a[r][c] - &s;
                    let s = &f * &inv[col][c];
                    inv[r][c] = &inv[r][c] - &s;
                }
            }
        }
    }
    Ok(inv)
}

/// Inverse of a unimodular integer matrix, as integers.
pub fn inverse_unimodular(rows: &[IVec]) -> Result<Vec<IVec>> {
    let det = det_int(rows);
    if det.abs() != BigInt::one() {
        return Err(Error::NonSmoothCone { det: det.to_string() });
    }
    let rat_rows: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| rat_int(x)).collect())
        .collect();
    let inv = inverse_rat(&rat_rows)?;
    Ok(inv
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    debug_assert!(x.is_integer());
                    i64::try_from(x.to_integer()).expect("unimodular inverse entry fits i64")
                })
                .collect()
        })
        .collect())
}

/// Solve the square rational system A x = b exactly.
pub fn solve_rat(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot, col);
        let pv = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &pv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let s = &f * &m[col][c];
                    m[r][c] = &m[r][c] - &s;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}
