//! Exact 2D convex hulls and the double-overline closure
//! conv(A) + sigma-dual of a finite exponent set.

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::linalg::pair_ri;
use crate::region::{AffineForm, ConvexRegion};
use crate::scalar::{rat_int, Rat};
use num_traits::{Signed, Zero};

/// Cross product (b - a) x (c - a).
fn cross(a: &[Rat], b: &[Rat], c: &[Rat]) -> Rat {
    (&b[0] - &a[0]) * (&c[1] - &a[1]) - (&b[1] - &a[1]) * (&c[0] - &a[0])
}

/// Andrew monotone chain; returns hull vertices in counterclockwise order.
pub fn convex_hull_2d(points: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut pts: Vec<Vec<Rat>> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Vec<Rat>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive()
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<Rat>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive()
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Half-plane description of conv(points): inequalities n.m + c >= 0.
pub fn hull_inequalities_2d(points: &[Vec<Rat>]) -> Vec<AffineForm> {
    let hull = convex_hull_2d(points);
    match hull.len() {
        0 => vec![AffineForm::new(vec![Rat::zero(), Rat::zero()], rat_int(-1))],
        1 => {
            // A single point: pin both coordinates.
            let p = &hull[0];
            vec![
                AffineForm::new(vec![rat_int(1), Rat::zero()], -p[0].clone()),
                AffineForm::new(vec![rat_int(-1), Rat::zero()], p[0].clone()),
                AffineForm::new(vec![Rat::zero(), rat_int(1)], -p[1].clone()),
                AffineForm::new(vec![Rat::zero(), rat_int(-1)], p[1].clone()),
            ]
        }
        2 => {
            // A segment: the supporting line both ways plus the two end caps.
            let (a, b) = (&hull[0], &hull[1]);
            let n = vec![-(&b[1] - &a[1]), &b[0] - &a[0]];
            let c = -(pair(&n, a));
            let d = vec![&b[0] - &a[0], &b[1] - &a[1]];
            let mut out = vec![
                AffineForm::new(n.clone(), c.clone()),
                AffineForm::new(n.iter().map(|x| -x).collect(), -c),
            ];
            out.push(AffineForm::new(d.clone(), -pair(&d, a)));
            out.push(AffineForm::new(d.iter().map(|x| -x).collect(), pair(&d, b)));
            out
        }
        _ => {
            let k = hull.len();
            (0..k)
                .map(|i| {
                    let a = &hull[i];
                    let b = &hull[(i + 1) % k];
                    // Inward normal for CCW orientation.
                    let n = vec![-(&b[1] - &a[1]), &b[0] - &a[0]];
                    let c = -pair(&n, a);
                    AffineForm::new(n, c)
                })
                .collect()
        }
    }
}

fn pair(n: &[Rat], p: &[Rat]) -> Rat {
    &n[0] * &p[0] + &n[1] * &p[1]
}

/// Minkowski sum conv(points) + Cone{rays} as a half-plane region (2D).
///
/// Facets are the hull facets whose inward normal pairs nonnegatively with
/// every ray, plus one facet per extreme ray anchored at the supporting
/// point of its orthogonal direction.
pub fn hull_plus_cone_2d(points: &[Vec<Rat>], rays: &[Vec<Rat>]) -> Result<ConvexRegion> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty point set for Minkowski sum".into()));
    }
    let mut region = ConvexRegion::new(2);
    let hull_ineqs = hull_inequalities_2d(points);
    for f in hull_ineqs {
        let ok = rays.iter().all(|r| !pair(&f.coeffs, r).is_negative());
        if ok {
            region.affine.push(f);
        }
    }
    for r in rays {
        // Normal orthogonal to the ray, oriented to contain the other rays.
        let mut n = vec![-r[1].clone(), r[0].clone()];
        let other_ok = |n: &Vec<Rat>| rays.iter().all(|s| !pair(n, s).is_negative());
        if !other_ok(&n) {
            n = vec![r[1].clone(), -r[0].clone()];
            if !other_ok(&n) {
                continue; // rays span a halfplane or more on this side
            }
        }
        // Anchor at the minimum of n over the hull points.
        let c = points
            .iter()
            .map(|p| pair(&n, p))
            .min()
            .expect("nonempty points");
        region.affine.push(AffineForm::new(n, -c));
    }
    Ok(region)
}

/// The double-overline closure of a finite set A inside sigma-dual:
/// every linear form on sigma dominated from below by min over A.
///
/// Computed as conv(A) + sigma-dual; the equivalence with the universally
/// quantified definition is enforced by the oracle test suite rather than
/// assumed.
pub fn double_overline(points: &[Vec<Rat>], sigma: &Cone) -> Result<ConvexRegion> {
    if sigma.rank() != 2 {
        return Err(Error::UnsupportedDimension(sigma.rank()));
    }
    let dual = sigma.dual_cone()?;
    let dual_rays: Vec<Vec<Rat>> = dual
        .generators()
        .iter()
        .map(|g| g.iter().map(|&x| rat_int(x)).collect())
        .collect();
    for p in points {
        for g in sigma.generators() {
            if pair_ri(p, g).is_negative() {
                return Err(Error::PointOutsideDualCone);
            }
        }
    }
    let mut region = if points.is_empty() {
        // Formally, the closure of the empty set is the whole dual cone.
        let mut r = ConvexRegion::new(2);
        for g in sigma.generators() {
            r.push_affine(g.iter().map(|&x| rat_int(x)).collect(), Rat::zero());
        }
        r
    } else {
        hull_plus_cone_2d(points, &dual_rays)?
    };
    region.recession = Some(dual);
    Ok(region)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn pts(v: &[[i64; 2]]) -> Vec<Vec<Rat>> {
        v.iter().map(|p| vec![rat_int(p[0]), rat_int(p[1])]).collect()
    }

    #[test]
    fn hull_of_square_with_interior_point() {
        let h = convex_hull_2d(&pts(&[[0, 0], [2, 0], [2, 2], [0, 2], [1, 1]]));
        assert_eq!(h.len(), 4);
    }

    #[test]
    fn quadrant_closure_of_two_points() {
        // conv{(2,0),(0,2)} + quadrant contains (1,1), excludes (0,0).
        let sigma = Cone::new(vec![vec![1, 0], vec![0, 1]], 2).unwrap();
        let r = double_overline(&pts(&[[2, 0], [0, 2]]), &sigma).unwrap();
        assert!(r.contains(&[rat_int(1), rat_int(1)]));
        assert!(!r.contains(&[rat_int(0), rat_int(0)]));
        assert!(r.contains(&[rat_int(5), rat_int(0)]));
        assert!(!r.contains(&[rat(1, 2), rat(1, 4)]));
    }

    #[test]
    fn empty_set_closes_to_dual_cone() {
        let sigma = Cone::new(vec![vec![0, 1], vec![-1, -1]], 2).unwrap();
        let r = double_overline(&[], &sigma).unwrap();
        // sigma-dual = Cone{-e1+e2, -e1}
        assert!(r.contains(&[rat_int(-1), rat_int(0)]));
        assert!(r.contains(&[rat_int(-2), rat_int(1)]));
        assert!(!r.contains(&[rat_int(1), rat_int(0)]));
    }

    #[test]
    fn zero_point_closes_to_dual_cone() {
        let sigma = Cone::new(vec![vec![1, 0], vec![0, 1]], 2).unwrap();
        let r = double_overline(&pts(&[[0, 0]]), &sigma).unwrap();
        assert!(r.contains(&[rat_int(3), rat_int(5)]));
        assert!(!r.contains(&[rat_int(-1), rat_int(0)]));
    }

    #[test]
    fn outside_point_rejected() {
        let sigma = Cone::new(vec![vec![1, 0], vec![0, 1]], 2).unwrap();
        assert!(matches!(
            double_overline(&pts(&[[-1, 2]]), &sigma),
            Err(Error::PointOutsideDualCone)
        ));
    }
}
