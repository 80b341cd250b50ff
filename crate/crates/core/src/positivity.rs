//! Kiselman and Lelong numbers of the extremal weight, non-nef locus strata,
//! the divisorial negative part, and the rational-polyhedrality report.

use crate::bundle::{BundleProblem, ChartPoint};
use crate::error::{Error, Result};
use crate::opt;
use crate::region::ConvexRegion;
use crate::scalar::{rat_int, Rat, Scalar};

/// The closed exponent set of one chart: the shifted nef box with its
/// recession orthant, in chart-exponent coordinates.
///
/// The set itself is the Minkowski sum of the two parts; membership and
/// entry levels are decided against that sum, never against the raw
/// inequality list of the bounded part.
#[derive(Debug, Clone)]
pub struct SSet {
    pub sigma: usize,
    pub region: ConvexRegion,
    /// Per-coordinate minima of the bounded part, anchoring the recession
    /// ray facets of the sum.
    pub coordinate_minima: Vec<Scalar>,
}

impl SSet {
    /// Exact membership in the closed exponent set: some point of the
    /// bounded part lies coordinatewise below the query.
    pub fn contains(&self, point: &[Rat]) -> Result<bool> {
        let n = self.region.dim;
        let mut probe = self.region.clone();
        probe.recession = None;
        for j in 0..n {
            let mut normal = vec![Rat::from_integer(0.into()); n];
            normal[j] = rat_int(-1);
            probe.affine.push(crate::region::AffineForm::new(normal, point[j].clone()));
        }
        Ok(!probe.is_empty()?)
    }

    pub fn contains_f64(&self, point: &[f64], tol: f64) -> Result<bool> {
        let rational: Vec<Rat> = point
            .iter()
            .map(|&x| Rat::from_float(x + tol).ok_or_else(|| {
                Error::InvalidInput("non-finite coordinate".into())
            }))
            .collect::<Result<_>>()?;
        self.contains(&rational)
    }
}

/// Build the S-set of a chart: the shifted nef box carrying the dual-cone
/// recession orthant.
pub fn s_set(problem: &BundleProblem, sigma: usize) -> Result<SSet> {
    let shifted = problem.shifted_box_nef(sigma)?;
    let n = problem.fiber_rank();
    let mut coordinate_minima = Vec::with_capacity(n);
    for j in 0..n {
        let mut obj = vec![Scalar::exact_int(0); n];
        obj[j] = Scalar::exact_int(1);
        let (value, _) = opt::minimize_linear(&shifted, &obj, 1e-9)?.expect_optimal();
        coordinate_minima.push(value);
    }
    let orthant = crate::cone::Cone::new(
        (0..n)
            .map(|j| (0..n).map(|k| i64::from(j == k)).collect())
            .collect(),
        n,
    )?;
    let region = shifted.with_recession(orthant);
    Ok(SSet { sigma, region, coordinate_minima })
}

fn require_big(problem: &BundleProblem) -> Result<()> {
    match problem.is_big()?.0 {
        crate::bundle::Bigness::Big => Ok(()),
        _ => Err(Error::NotBig),
    }
}

/// Kiselman number at a point with direction weights on its vanishing set.
///
/// Weights apply only to the vanished fiber coordinates; the formula reads
/// min over the S-set of sum_j alpha_j / w_j, computed over the bounded
/// shifted box (the recession cone adds nothing for these directions).
pub fn kiselman_number(
    problem: &BundleProblem,
    p: &ChartPoint,
    weights: &[Scalar],
) -> Result<Scalar> {
    require_big(problem)?;
    let vanishing = p.vanishing_set();
    if weights.len() != vanishing.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} direction weights (one per vanished coordinate), got {}",
            vanishing.len(),
            weights.len()
        )));
    }
    for w in weights {
        if !w.is_positive_strict() {
            return Err(Error::InvalidInput("direction weights must be positive".into()));
        }
    }
    if vanishing.is_empty() {
        return Ok(Scalar::exact_int(0));
    }
    let n = problem.fiber_rank();
    let mut objective = vec![Scalar::exact_int(0); n];
    for (idx, &j) in vanishing.iter().enumerate() {
        objective[j] = &Scalar::exact_int(1) / &weights[idx];
    }
    let shifted = problem.shifted_box_nef(p.sigma)?;
    let out = opt::minimize_linear(&shifted, &objective, 1e-9)?;
    Ok(out.expect_optimal().0)
}

/// Lelong number: the Kiselman number with unit weights.
pub fn lelong_number(problem: &BundleProblem, p: &ChartPoint) -> Result<Scalar> {
    let k = p.vanishing_set().len();
    kiselman_number(problem, p, &vec![Scalar::exact_int(1); k])
}

/// Exact positivity test for the generic Lelong number along a stratum:
/// the vanishing slice misses the nef box iff the number is positive.
pub fn lelong_positive(problem: &BundleProblem, sigma: usize, vanishing: &[usize]) -> Result<bool> {
    let chart = problem.chart(sigma)?;
    let region = crate::envelope::sliced_box_nef(problem, &chart, vanishing)?;
    Ok(region.is_empty()?)
}

/// One stratum of the non-nef locus report.
#[derive(Debug, Clone)]
pub struct Stratum {
    /// Ray indices spanning the cone of the stratum.
    pub rays: Vec<usize>,
    /// A chart containing the stratum and the local vanishing set.
    pub sigma: usize,
    pub vanishing: Vec<usize>,
    pub generic_lelong: Scalar,
}

/// Generic Lelong numbers along every invariant stratum; positive entries
/// form the non-nef locus (face-closed by construction).
pub fn nnef_locus(problem: &BundleProblem) -> Result<Vec<Stratum>> {
    require_big(problem)?;
    let mut out = Vec::new();
    let mut cones: Vec<Vec<usize>> = Vec::new();
    for (i, _) in problem.fan.rays.iter().enumerate() {
        cones.push(vec![i]);
    }
    for c in &problem.fan.max_cones {
        let mut s = c.clone();
        s.sort_unstable();
        if !cones.contains(&s) {
            cones.push(s);
        }
    }
    for rays in cones {
        // A chart containing all rays of the stratum cone.
        let Some(sigma) = problem
            .fan
            .max_cones
            .iter()
            .position(|c| rays.iter().all(|r| c.contains(r)))
        else {
            continue;
        };
        let chart = problem.chart(sigma)?;
        let vanishing: Vec<usize> = rays
            .iter()
            .map(|r| chart.ray_ids.iter().position(|x| x == r).expect("ray in chart"))
            .collect();
        let positive = lelong_positive(problem, sigma, &vanishing)?;
        if positive {
            let mut x = vec![crate::torus::Complex::new(1.0, 0.0); problem.fiber_rank()];
            for &j in &vanishing {
                x[j] = crate::torus::Complex::new(0.0, 0.0);
            }
            let p = ChartPoint::new(
                sigma,
                x,
                vec![crate::torus::Complex::new(0.0, 0.0); problem.torus_dim()],
            );
            let value = lelong_number(problem, &p)?;
            out.push(Stratum { rays, sigma, vanishing, generic_lelong: value });
        }
    }
    Ok(out)
}

/// Divisorial negative part: the generic Lelong number along each invariant
/// divisor, min over the nef box of <m, v> - h(v).
pub fn negative_part(problem: &BundleProblem) -> Result<Vec<(usize, Scalar)>> {
    require_big(problem)?;
    let region = problem.box_nef()?;
    let n = problem.fiber_rank();
    let mut out = Vec::new();
    for (i, ray) in problem.fan.rays.iter().enumerate() {
        let objective: Vec<Scalar> = (0..n).map(|k| Scalar::exact_int(ray[k])).collect();
        let opt_out = opt::minimize_linear(&region, &objective, 1e-9)?;
        let (value, _) = opt_out.expect_optimal();
        let coeff = &value - &Scalar::exact_int(problem.h.values[i]);
        out.push((i, coeff));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZariskiShape {
    RationalPolyhedral,
    NonPolyhedralOrIrrational,
}

/// Is the nef box a rational polytope? Decides whether a Zariski
/// decomposition can be reached after a modification; irrational vertices or
/// genuinely conic boundary report the negative answer.
pub fn zariski_polyhedrality(problem: &BundleProblem) -> Result<ZariskiShape> {
    let mut region = problem.box_nef()?;
    if region.is_empty()? {
        return Err(Error::EmptyRegion);
    }
    region.split_degenerate_conics();
    if region.is_polyhedral() {
        return Ok(ZariskiShape::RationalPolyhedral);
    }
    // Conics remain: the region is still a rational polytope when they are
    // inactive on the polyhedral hull.
    let mut poly = region.clone();
    poly.conics.clear();
    for c in &region.conics {
        poly.affine.push(c.gate.clone());
    }
    let verts = poly.affine_vertices();
    let all_inside = verts.iter().all(|v| region.contains(v));
    if all_inside && !verts.is_empty() {
        Ok(ZariskiShape::RationalPolyhedral)
    } else {
        Ok(ZariskiShape::NonPolyhedralOrIrrational)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::torus::Complex;

    fn apex(problem: &BundleProblem, sigma: usize) -> ChartPoint {
        ChartPoint::apex(sigma, problem.fiber_rank(), problem.torus_dim())
    }

    fn divisor_point(problem: &BundleProblem, sigma: usize, j: usize) -> ChartPoint {
        let mut x = vec![Complex::new(0.7, 0.1); problem.fiber_rank()];
        x[j] = Complex::new(0.0, 0.0);
        ChartPoint::new(sigma, x, vec![Complex::new(0.0, 0.0); problem.torus_dim()])
    }

    #[test]
    fn kiselman_on_generic_point_is_zero() {
        let p = fixtures::ex62(1, 2).unwrap();
        let pt = ChartPoint::new(
            0,
            vec![Complex::new(0.5, 0.0), Complex::new(0.5, 0.0)],
            vec![Complex::new(0.0, 0.0); 2],
        );
        let v = kiselman_number(&p, &pt, &[]).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn nakayama_lelong_at_polar_section() {
        let p = fixtures::nakayama(2).unwrap();
        let v = lelong_number(&p, &apex(&p, 0)).unwrap();
        let expected = 2.0 / (2.0 * 2.0_f64.sqrt() + 1.0);
        assert!((v.to_f64() - expected).abs() < 1e-9);
    }

    #[test]
    fn kiselman_weight_homogeneity() {
        let p = fixtures::nakayama(2).unwrap();
        let pt = apex(&p, 0);
        let w1 = [Scalar::exact_int(1), Scalar::exact_int(1)];
        let w2 = [Scalar::exact_int(2), Scalar::exact_int(2)];
        let a = kiselman_number(&p, &pt, &w1).unwrap().to_f64();
        let b = kiselman_number(&p, &pt, &w2).unwrap().to_f64();
        assert!((a - 2.0 * b).abs() < 1e-9, "doubling weights halves the value");
    }

    #[test]
    fn ex62_lelong_value_at_apex() {
        let p = fixtures::ex62(1, 2).unwrap();
        let v = lelong_number(&p, &apex(&p, 0)).unwrap();
        assert_eq!(v.as_exact().unwrap(), &crate::scalar::rat(1, 3));
    }

    #[test]
    fn nnef_strata_of_fixtures() {
        let p = fixtures::ex62(1, 2).unwrap();
        let strata = nnef_locus(&p).unwrap();
        assert_eq!(strata.len(), 1);
        assert_eq!(fixtures::stratum_name(&p.fan, &strata[0].rays), "P(L0)");

        let p = fixtures::nakayama(3).unwrap();
        let strata = nnef_locus(&p).unwrap();
        assert_eq!(strata.len(), 1);
        assert_eq!(fixtures::stratum_name(&p.fan, &strata[0].rays), "P(L0)");

        let p = fixtures::ex65().unwrap();
        let strata = nnef_locus(&p).unwrap();
        assert_eq!(strata.len(), 1);
        assert_eq!(fixtures::stratum_name(&p.fan, &strata[0].rays), "P(L2)");
    }

    #[test]
    fn negative_parts_vanish_on_fixtures() {
        for p in [
            fixtures::ex62(1, 2).unwrap(),
            fixtures::nakayama(2).unwrap(),
            fixtures::ex65().unwrap(),
        ] {
            for (_, coeff) in negative_part(&p).unwrap() {
                assert!(coeff.to_f64().abs() < 1e-9);
            }
        }
    }

    #[test]
    fn constructed_negative_part_is_positive() {
        // Lower h on the ray v0 beyond the nef range: the nef region of the
        // third fixture caps m1 + m2 at 1, so the enlarged domination box
        // leaves the divisor Gamma_v0 with coefficient 1.
        let mut p = fixtures::ex65().unwrap();
        p.h = crate::fan::PlFunction { values: vec![-2, 0, 0] };
        let parts = negative_part(&p).unwrap();
        assert!((parts[0].1.to_f64() - 1.0).abs() < 1e-9);
        assert!(parts[1].1.to_f64().abs() < 1e-9 && parts[2].1.to_f64().abs() < 1e-9);
    }

    #[test]
    fn zariski_shapes() {
        assert_eq!(
            zariski_polyhedrality(&fixtures::ex62(1, 2).unwrap()).unwrap(),
            ZariskiShape::RationalPolyhedral
        );
        assert_eq!(
            zariski_polyhedrality(&fixtures::nakayama(2).unwrap()).unwrap(),
            ZariskiShape::NonPolyhedralOrIrrational
        );
        assert_eq!(
            zariski_polyhedrality(&fixtures::ex65().unwrap()).unwrap(),
            ZariskiShape::NonPolyhedralOrIrrational
        );
    }

    #[test]
    fn s_set_minimum_matches_shifted_box() {
        // The recession cone adds nothing for directions in the chart cone.
        let p = fixtures::ex62(1, 2).unwrap();
        for sigma in 0..3 {
            let s = s_set(&p, sigma).unwrap();
            let shifted = p.shifted_box_nef(sigma).unwrap();
            for obj in [[1.0, 1.0], [1.0, 0.0], [0.0, 1.0], [2.0, 3.0]] {
                let a = opt::minimize_numeric(&s.region, &obj, 1e-9).unwrap().value_f64();
                let b = opt::minimize_numeric(&shifted, &obj, 1e-9).unwrap().value_f64();
                assert!((a - b).abs() < 1e-9, "sigma {sigma} obj {obj:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn lelong_zero_on_divisors_of_fixtures() {
        let p = fixtures::ex62(1, 2).unwrap();
        // Divisors Gamma_{v1}, Gamma_{v2} in chart sigma_1.
        for j in 0..2 {
            let v = lelong_number(&p, &divisor_point(&p, 0, j)).unwrap();
            assert!(v.to_f64().abs() < 1e-9);
        }
    }

    use crate::scalar::rat_int;
}
