//! Linear optimization over convex regions.
//!
//! Polyhedral regions with rational objectives are solved exactly through
//! vertex enumeration. Conic boundaries contribute closed-form candidates:
//! arc-edge intersections and tangency points where the quadratic gradient is
//! parallel to the objective.

use crate::error::{Error, Result};
use crate::region::{ConvexRegion, Membership};
use crate::scalar::{rat_to_f64, Rat, Scalar, DEFAULT_TOL};
use num_traits::{Signed, Zero};

#[derive(Debug, Clone)]
pub enum OptOutcome {
    Optimal { value: Scalar, witness: Vec<Scalar> },
    /// The objective decreases without bound along the recession cone.
    Unbounded,
}

impl OptOutcome {
    pub fn value_f64(&self) -> f64 {
        match self {
            OptOutcome::Optimal { value, .. } => value.to_f64(),
            OptOutcome::Unbounded => f64::NEG_INFINITY,
        }
    }

    pub fn expect_optimal(self) -> (Scalar, Vec<Scalar>) {
        match self {
            OptOutcome::Optimal { value, witness } => (value, witness),
            OptOutcome::Unbounded => panic!("unexpected unbounded optimization"),
        }
    }
}

fn dot_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Directions that can witness unboundedness of the recession set.
fn recession_directions(region: &ConvexRegion) -> Vec<Vec<Rat>> {
    if let Some(cone) = &region.recession {
        return cone
            .generators()
            .iter()
            .map(|g| g.iter().map(|&x| Rat::from_integer(x.into())).collect())
            .collect();
    }
    if region.dim != 2 {
        return Vec::new();
    }
    // Extreme rays of {d | n_i . d >= 0} are orthogonal to some normal.
    let mut candidates: Vec<Vec<Rat>> = Vec::new();
    let mut normals: Vec<Vec<Rat>> = region.affine.iter().map(|f| f.coeffs.clone()).collect();
    normals.extend(region.conics.iter().map(|c| c.gate.coeffs.clone()));
    for n in &normals {
        if n.iter().all(|x| x.is_zero()) {
            continue;
        }
        for d in [vec![-n[1].clone(), n[0].clone()], vec![n[1].clone(), -n[0].clone()]] {
            let feasible = normals
                .iter()
                .all(|m| !(&m[0] * &d[0] + &m[1] * &d[1]).is_negative());
            if feasible && !candidates.contains(&d) {
                candidates.push(d);
            }
        }
    }
    if normals.is_empty() {
        // Whole plane: both axes and their negatives.
        for d in [[1i64, 0], [-1, 0], [0, 1], [0, -1]] {
            candidates.push(d.iter().map(|&x| Rat::from_integer(x.into())).collect());
        }
    }
    candidates
}

/// Minimize a rational linear objective over a polyhedral region, exactly.
pub fn minimize_exact(region: &ConvexRegion, objective: &[Rat]) -> Result<OptOutcome> {
    if !region.is_polyhedral() {
        return Err(Error::InvalidInput(
            "exact optimization requires a polyhedral region".into(),
        ));
    }
    for d in recession_directions(region) {
        let along: Rat = objective.iter().zip(&d).map(|(o, x)| o * x).sum();
        if along.is_negative() {
            return Ok(OptOutcome::Unbounded);
        }
    }
    let verts = region.feasible_affine_vertices();
    if verts.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let mut best: Option<(Rat, Vec<Rat>)> = None;
    for v in verts {
        let val: Rat = objective.iter().zip(&v).map(|(o, x)| o * x).sum();
        match &best {
            Some((b, w)) if *b < val || (*b == val && *w <= v) => {}
            _ => best = Some((val, v)),
        }
    }
    let (value, witness) = best.unwrap();
    Ok(OptOutcome::Optimal {
        value: Scalar::Exact(value),
        witness: witness.into_iter().map(Scalar::Exact).collect(),
    })
}

/// Minimize a float objective over a region that may carry conic boundary.
pub fn minimize_numeric(region: &ConvexRegion, objective: &[f64], tol: f64) -> Result<OptOutcome> {
    for d in recession_directions(region) {
        let df: Vec<f64> = d.iter().map(rat_to_f64).collect();
        if dot_f64(objective, &df) < -tol {
            return Ok(OptOutcome::Unbounded);
        }
    }

    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for v in region.affine_vertices() {
        if region.contains(&v) {
            candidates.push(v.iter().map(rat_to_f64).collect());
        }
    }

    // Boundary lines: affine constraints plus conic gates.
    let mut lines: Vec<(Vec<f64>, f64)> = region
        .affine
        .iter()
        .map(|f| (f.coeffs.iter().map(rat_to_f64).collect(), rat_to_f64(&f.constant)))
        .collect();
    lines.extend(
        region
            .conics
            .iter()
            .map(|c| (c.gate.coeffs.iter().map(rat_to_f64).collect::<Vec<_>>(), rat_to_f64(&c.gate.constant))),
    );

    if region.dim == 2 {
        for conic in &region.conics {
            let q = &conic.quad;
            // Arc-edge intersections.
            for (n, c0) in &lines {
                if n[0] == 0.0 && n[1] == 0.0 {
                    continue;
                }
                // Parametrize the line n.m + c0 = 0 by base + t * dir.
                let norm2 = n[0] * n[0] + n[1] * n[1];
                let base = [-c0 * n[0] / norm2, -c0 * n[1] / norm2];
                let dir = [-n[1], n[0]];
                for t in roots_on_line(q, base, dir) {
                    candidates.push(vec![base[0] + t * dir[0], base[1] + t * dir[1]]);
                }
            }
            // Tangency: grad Q parallel to the objective, restricted to Q = 0.
            let grad = q.gradient();
            let g: Vec<(Vec<f64>, f64)> = grad
                .iter()
                .map(|a| (a.coeffs.iter().map(rat_to_f64).collect(), rat_to_f64(&a.constant)))
                .collect();
            // L(m) = g0(m) * obj[1] - g1(m) * obj[0] = 0 is a line.
            let ln = [
                g[0].0[0] * objective[1] - g[1].0[0] * objective[0],
                g[0].0[1] * objective[1] - g[1].0[1] * objective[0],
            ];
            let lc = g[0].1 * objective[1] - g[1].1 * objective[0];
            let norm2 = ln[0] * ln[0] + ln[1] * ln[1];
            if norm2 > 1e-30 {
                let base = [-lc * ln[0] / norm2, -lc * ln[1] / norm2];
                let dir = [-ln[1], ln[0]];
                for t in roots_on_line(q, base, dir) {
                    candidates.push(vec![base[0] + t * dir[0], base[1] + t * dir[1]]);
                }
            }
        }
    }

    let mut best: Option<(f64, Vec<f64>)> = None;
    for cand in candidates {
        if region.membership_f64(&cand, tol.max(1e-9) * 8.0) == Membership::Out {
            continue;
        }
        let val = dot_f64(objective, &cand);
        let better = match &best {
            None => true,
            Some((bv, bw)) => {
                val < bv - 1e-13 * (1.0 + bv.abs())
                    || ((val - bv).abs() <= 1e-13 * (1.0 + bv.abs()) && lex_less(&cand, bw))
            }
        };
        if better {
            best = Some((val, cand));
        }
    }
    match best {
        Some((value, witness)) => Ok(OptOutcome::Optimal {
            value: Scalar::approx_tol(value, tol),
            witness: witness.into_iter().map(|x| Scalar::approx_tol(x, tol)).collect(),
        }),
        None => {
            if region.is_empty()? {
                Err(Error::EmptyRegion)
            } else {
                Err(Error::InvalidInput(
                    "no optimization candidates found on a nonempty region".into(),
                ))
            }
        }
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > 1e-12 {
            return x < y;
        }
    }
    false
}

/// Roots of Q(base + t dir) = 0.
fn roots_on_line(q: &crate::region::QuadForm, base: [f64; 2], dir: [f64; 2]) -> Vec<f64> {
    // Exact-to-float coefficients of the restricted quadratic via evaluation.
    let eval = |t: f64| q.eval_f64(&[base[0] + t * dir[0], base[1] + t * dir[1]]);
    let q0 = eval(0.0);
    let q1 = eval(1.0);
    let qm1 = eval(-1.0);
    let c2 = (q1 + qm1) / 2.0 - q0;
    let c1 = (q1 - qm1) / 2.0;
    let c0 = q0;
    if c2.abs() < 1e-14 * (1.0 + c1.abs() + c0.abs()) {
        if c1.abs() < 1e-14 {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    vec![(-c1 + s) / (2.0 * c2), (-c1 - s) / (2.0 * c2)]
}

/// Minimize, choosing the exact path when possible.
pub fn minimize_linear(region: &ConvexRegion, objective: &[Scalar], tol: f64) -> Result<OptOutcome> {
    let all_exact = objective.iter().all(|o| o.as_exact().is_some());
    if region.is_polyhedral() && all_exact {
        let obj: Vec<Rat> = objective.iter().map(|o| o.as_exact().unwrap().clone()).collect();
        return minimize_exact(region, &obj);
    }
    let obj: Vec<f64> = objective.iter().map(|o| o.to_f64()).collect();
    minimize_numeric(region, &obj, tol)
}

/// Maximize = minimize of the negated objective, with the value sign-flipped.
pub fn maximize_linear(region: &ConvexRegion, objective: &[Scalar], tol: f64) -> Result<OptOutcome> {
    let neg: Vec<Scalar> = objective.iter().map(|o| -o).collect();
    Ok(match minimize_linear(region, &neg, tol)? {
        OptOutcome::Optimal { value, witness } => OptOutcome::Optimal { value: -value, witness },
        OptOutcome::Unbounded => OptOutcome::Unbounded,
    })
}

pub fn minimize_f64(region: &ConvexRegion, objective: &[f64]) -> Result<OptOutcome> {
    minimize_numeric(region, objective, DEFAULT_TOL)
}
