//! Multiplier ideals of the extremal metric: monomial membership, minimal
//! generator lists, jumping numbers, log-canonical thresholds, openness, and
//! the section-count decomposition.

use crate::bundle::{BundleProblem, ChartPoint};
use crate::error::{Error, Result};
use crate::opt;
use crate::positivity::{s_set, SSet};
use crate::scalar::{rat_int, rat_to_f64, Rat, Scalar};
use num_traits::{Signed, ToPrimitive, Zero};

/// A fiber monomial x^p; holomorphic-unit z-dependence is irrelevant and
/// dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub exponents: Vec<i64>,
}

impl Monomial {
    pub fn new(exponents: Vec<i64>) -> Result<Self> {
        if exponents.iter().any(|&e| e < 0) {
            return Err(Error::InvalidInput("monomial exponents must be nonnegative".into()));
        }
        Ok(Monomial { exponents })
    }

    pub fn one(n: usize) -> Self {
        Monomial { exponents: vec![0; n] }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exponents.iter().zip(&other.exponents).all(|(a, b)| a <= b)
    }
}

/// Exponent points of a finite monomial sum, projected to the vanished
/// coordinates of the reference point (in chart-exponent coordinates).
pub fn newton_set(f: &[Monomial], p: &ChartPoint) -> Result<Vec<Vec<Rat>>> {
    if f.is_empty() {
        return Err(Error::ZeroFunction);
    }
    let vanishing = p.vanishing_set();
    let mut out: Vec<Vec<Rat>> = Vec::new();
    for mono in f {
        let projected: Vec<Rat> = vanishing.iter().map(|&j| rat_int(mono.exponents[j])).collect();
        if !out.contains(&projected) {
            out.push(projected);
        }
    }
    out.sort();
    Ok(out)
}

fn require_big(problem: &BundleProblem) -> Result<()> {
    match problem.is_big()?.0 {
        crate::bundle::Bigness::Big => Ok(()),
        _ => Err(Error::NotBig),
    }
}

/// Strict interior membership of the shifted Newton generator in the
/// t-scaled projected exponent set, decided through its entry level:
/// the point is interior exactly when t stays strictly below the level.
fn interior_in_projected(
    problem: &BundleProblem,
    sigma: usize,
    vanishing: &[usize],
    t: &Rat,
    point: &[i64],
) -> Result<bool> {
    let n = problem.fiber_rank();
    if vanishing.len() == n {
        let s = s_set(problem, sigma)?;
        let level = entry_level_in(&s, point)?;
        return strictly_below(t, &level);
    }
    if vanishing.len() == 1 {
        let j = vanishing[0];
        let shifted = problem.shifted_box_nef(sigma)?;
        let mut obj = vec![Scalar::exact_int(0); n];
        obj[j] = Scalar::exact_int(1);
        let (value, _) = opt::minimize_linear(&shifted, &obj, 1e-9)?.expect_optimal();
        // point > t * min strictly, with a guard band on approximate minima.
        return match value.as_exact() {
            Some(min) => Ok(rat_int(point[0]) > t * min),
            None => {
                let lhs = point[0] as f64;
                let rhs = rat_to_f64(t) * value.to_f64();
                if (lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()) {
                    Err(Error::BoundaryAmbiguous)
                } else {
                    Ok(lhs > rhs)
                }
            }
        };
    }
    Err(Error::UnsupportedDimension(vanishing.len()))
}

/// t < level, exactly when both sides are rational, otherwise with the
/// ambiguity guard band.
fn strictly_below(t: &Rat, level: &Scalar) -> Result<bool> {
    match level.as_exact() {
        Some(l) => Ok(t < l),
        None => {
            let tf = rat_to_f64(t);
            let lf = level.to_f64();
            if (tf - lf).abs() <= 1e-9 * (1.0 + lf.abs()) {
                Err(Error::BoundaryAmbiguous)
            } else {
                Ok(tf < lf)
            }
        }
    }
}

/// Multiplier-ideal membership of a finite monomial sum at a chart point.
///
/// Each Newton generator, shifted by the all-ones vector, must lie strictly
/// inside the t-scaled projected S-set.
pub fn in_multiplier_ideal(
    problem: &BundleProblem,
    p: &ChartPoint,
    f: &[Monomial],
    t: &Rat,
) -> Result<bool> {
    require_big(problem)?;
    if f.is_empty() {
        return Err(Error::ZeroFunction);
    }
    if !t.is_positive() {
        return Err(Error::InvalidInput("t must be positive".into()));
    }
    let vanishing = p.vanishing_set();
    if vanishing.is_empty() {
        return Ok(true);
    }
    let newton = newton_set(f, p)?;
    for m0 in &newton {
        let shifted: Vec<i64> = m0
            .iter()
            .map(|c| {
                debug_assert!(c.is_integer());
                num_traits::ToPrimitive::to_i64(&c.to_integer()).expect("small exponent") + 1
            })
            .collect();
        if !interior_in_projected(problem, p.sigma, &vanishing, t, &shifted)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All monomials in the multiplier ideal at level t within a degree bound,
/// minimalized by divisibility.
///
/// The default bound is the box of the t-scaled bounded exponent body plus a
/// margin of two, which contains every minimal generator.
pub fn ideal_generators(
    problem: &BundleProblem,
    p: &ChartPoint,
    t: &Rat,
    degree_bound: Option<i64>,
) -> Result<Vec<Monomial>> {
    require_big(problem)?;
    let n = problem.fiber_rank();
    let vanishing = p.vanishing_set();
    let bound = match degree_bound {
        Some(b) => b,
        None => {
            let shifted = problem.shifted_box_nef(p.sigma)?;
            let bb = shifted.affine_bounding_box()?;
            let max_coord = bb
                .iter()
                .map(|(_, hi)| rat_to_f64(hi))
                .fold(0.0_f64, f64::max);
            (rat_to_f64(t) * max_coord).ceil() as i64 + 2
        }
    };
    let mut accepted: Vec<Monomial> = Vec::new();
    let mut exps = vec![0i64; vanishing.len()];
    'scan: loop {
        let mut full = vec![0i64; n];
        for (idx, &j) in vanishing.iter().enumerate() {
            full[j] = exps[idx];
        }
        let mono = Monomial::new(full)?;
        if !accepted.iter().any(|g| g.divides(&mono))
            && in_multiplier_ideal(problem, p, std::slice::from_ref(&mono), t)?
        {
            accepted.push(mono);
        }
        for k in 0..exps.len() {
            if exps[k] < bound {
                exps[k] += 1;
                continue 'scan;
            }
            exps[k] = 0;
        }
        break;
    }
    let snapshot = accepted.clone();
    accepted.retain(|g| !snapshot.iter().any(|other| other != g && other.divides(g)));
    accepted.sort_by_key(|m| m.exponents.clone());
    Ok(accepted)
}

/// The level at which a lattice exponent enters the interior of the scaled
/// body: sup { t | point in Int(t S) } = 1 / min { s | s point in S }.
///
/// Exact rational when the ray first meets an affine facet; closed-form
/// square roots on conic boundary.
pub fn entry_level(problem: &BundleProblem, sigma: usize, point: &[i64]) -> Result<Scalar> {
    let s = s_set(problem, sigma)?;
    entry_level_in(&s, point)
}

/// Entry level against a prebuilt exponent body.
///
/// Candidate crossings come from the facets, conic boundary, gates, and the
/// recession-ray anchors of the bounded part; feasibility of each is decided
/// against the Minkowski sum itself. Membership along a strictly positive
/// ray is monotone, so the first feasible crossing is the entry.
pub fn entry_level_in(body: &SSet, point: &[i64]) -> Result<Scalar> {
    let region = &body.region;
    let mut candidates: Vec<Scalar> = Vec::new();
    // Crossings with affine facet lines: <n, s p> + c = 0.
    for f in &region.affine {
        let slope: Rat = f
            .coeffs
            .iter()
            .zip(point)
            .map(|(c, &x)| c * rat_int(x))
            .fold(Rat::zero(), |a, b| a + b);
        if !slope.is_zero() {
            let s_val = -&f.constant / slope;
            if !s_val.is_negative() {
                candidates.push(Scalar::Exact(s_val));
            }
        }
    }
    // Crossings with the recession-ray anchors: s p_j = min_j.
    for (j, min_j) in body.coordinate_minima.iter().enumerate() {
        if point[j] != 0 {
            match min_j {
                Scalar::Exact(r) => {
                    let s_val = r / rat_int(point[j]);
                    if !s_val.is_negative() {
                        candidates.push(Scalar::Exact(s_val));
                    }
                }
                Scalar::Approx { value, tol } => {
                    let s_val = value / point[j] as f64;
                    if s_val >= 0.0 {
                        candidates.push(Scalar::Approx { value: s_val, tol: *tol });
                    }
                }
            }
        }
    }
    // Crossings with conic boundary: Q(s p) = 0 is quadratic in s.
    for c in &region.conics {
        let pf: Vec<f64> = point.iter().map(|&x| x as f64).collect();
        let mut c2 = 0.0;
        for i in 0..pf.len() {
            for j in 0..pf.len() {
                c2 += rat_to_f64(&c.quad.q[i][j]) * pf[i] * pf[j];
            }
        }
        let c1: f64 = c.quad.lin.iter().zip(&pf).map(|(l, x)| rat_to_f64(l) * x).sum();
        let c0 = rat_to_f64(&c.quad.constant);
        if c2.abs() > 1e-14 {
            let disc = c1 * c1 - 4.0 * c2 * c0;
            if disc >= 0.0 {
                for r in [(-c1 + disc.sqrt()) / (2.0 * c2), (-c1 - disc.sqrt()) / (2.0 * c2)] {
                    if r >= 0.0 {
                        candidates.push(Scalar::approx(r));
                    }
                }
            }
        } else if c1.abs() > 1e-14 {
            let r = -c0 / c1;
            if r >= 0.0 {
                candidates.push(Scalar::approx(r));
            }
        }
        // The gate line.
        let slope: f64 = c.gate.coeffs.iter().zip(&pf).map(|(g, x)| rat_to_f64(g) * x).sum();
        if slope.abs() > 1e-14 {
            let r = -rat_to_f64(&c.gate.constant) / slope;
            if r >= 0.0 {
                candidates.push(Scalar::approx(r));
            }
        }
    }
    // Keep feasible crossings, exact membership where possible.
    let mut feasible: Vec<Scalar> = Vec::new();
    for cand in candidates {
        let ok = match &cand {
            Scalar::Exact(r) => {
                let at: Vec<Rat> = point.iter().map(|&x| rat_int(x) * r).collect();
                body.contains(&at)?
            }
            Scalar::Approx { value, .. } => {
                let at: Vec<f64> = point.iter().map(|&x| x as f64 * value).collect();
                body.contains_f64(&at, 1e-9)?
            }
        };
        if ok {
            feasible.push(cand);
        }
    }
    let min = feasible
        .into_iter()
        .min_by(|a, b| a.to_f64().partial_cmp(&b.to_f64()).unwrap())
        .ok_or(Error::EmptyRegion)?;
    if min.to_f64() <= 0.0 {
        return Err(Error::InvalidInput(
            "exponent ray starts inside the body; no finite entry level".into(),
        ));
    }
    Ok(match min {
        Scalar::Exact(r) => Scalar::Exact(Rat::from_integer(1.into()) / r),
        Scalar::Approx { value, tol } => Scalar::Approx { value: 1.0 / value, tol },
    })
}

#[derive(Debug, Clone)]
pub struct Jump {
    pub value: Scalar,
    /// Lattice exponents (shifted by all-ones) realizing this jump.
    pub realized_by: Vec<Vec<i64>>,
}

/// Jumping numbers up to the bound, with realizing lattice points.
pub fn jumping_numbers(problem: &BundleProblem, p: &ChartPoint, bound: &Rat) -> Result<Vec<Jump>> {
    require_big(problem)?;
    let vanishing = p.vanishing_set();
    let n = problem.fiber_rank();
    if vanishing.len() != n {
        return Err(Error::UnsupportedDimension(vanishing.len()));
    }
    // Enumeration bound: the coordinate sum of a relevant lattice point is at
    // most bound * (max coordinate sum on the bounded exponent body).
    let shifted = problem.shifted_box_nef(p.sigma)?;
    let sum_obj = vec![Scalar::approx(-1.0); n];
    let max_sum = match opt::minimize_linear(&shifted, &sum_obj, 1e-9)? {
        opt::OptOutcome::Optimal { value, .. } => -value.to_f64(),
        opt::OptOutcome::Unbounded => {
            return Err(Error::UnboundedRegion);
        }
    };
    let cap = (rat_to_f64(bound) * max_sum).ceil() as i64 + 2;
    let body = s_set(problem, p.sigma)?;
    // Cheap lower bound on the entry level from witnesses in the bounded
    // part: t v <= n shows n in tS, so t* >= max_v min_j n_j / v_j.
    let mut vertex_bound: Vec<Vec<f64>> = shifted
        .feasible_affine_vertices()
        .iter()
        .map(|v| v.iter().map(rat_to_f64).collect())
        .collect();
    for dir in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 3.0], [3.0, 1.0]] {
        if let Ok(opt::OptOutcome::Optimal { witness, .. }) =
            opt::minimize_numeric(&shifted, &dir, 1e-9)
        {
            vertex_bound.push(witness.iter().map(|w| w.to_f64()).collect());
        }
    }
    let bound_f = rat_to_f64(bound);
    let prefilter = |point: &[i64]| -> bool {
        let lower = vertex_bound
            .iter()
            .map(|v| {
                point
                    .iter()
                    .zip(v)
                    .map(|(&nj, &vj)| if vj > 1e-12 { nj as f64 / vj } else { f64::INFINITY })
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0_f64, f64::max);
        lower <= bound_f + 1e-6
    };
    let mut jumps: Vec<Jump> = Vec::new();
    let mut point = vec![1i64; n];
    'scan: loop {
        if point.iter().sum::<i64>() <= cap && prefilter(&point) {
            let t_star = entry_level_in(&body, &point)?;
            if t_star.to_f64() <= rat_to_f64(bound) + 1e-12 {
                match jumps.iter_mut().find(|j| j.value.approx_eq(&t_star)) {
                    Some(j) => j.realized_by.push(point.clone()),
                    None => jumps.push(Jump { value: t_star, realized_by: vec![point.clone()] }),
                }
            }
        }
        for k in 0..n {
            if point[k] < cap {
                point[k] += 1;
                continue 'scan;
            }
            point[k] = 1;
        }
        break;
    }
    jumps.sort_by(|a, b| a.value.to_f64().partial_cmp(&b.value.to_f64()).unwrap());
    for j in &mut jumps {
        j.realized_by.sort();
    }
    Ok(jumps)
}

/// The log-canonical threshold: the first jumping number, realized by the
/// all-ones shift of the trivial monomial.
pub fn lct(problem: &BundleProblem, p: &ChartPoint) -> Result<Scalar> {
    require_big(problem)?;
    let vanishing = p.vanishing_set();
    let n = problem.fiber_rank();
    if vanishing.is_empty() {
        return Err(Error::InvalidInput(
            "the weight is bounded at this point; no finite threshold".into(),
        ));
    }
    if vanishing.len() == n {
        return entry_level(problem, p.sigma, &vec![1; n]);
    }
    // Along a divisor: threshold of the one-dimensional projection.
    if vanishing.len() == 1 {
        let j = vanishing[0];
        let shifted = problem.shifted_box_nef(p.sigma)?;
        let mut obj = vec![Scalar::exact_int(0); n];
        obj[j] = Scalar::exact_int(1);
        let (value, _) = opt::minimize_linear(&shifted, &obj, 1e-9)?.expect_optimal();
        if !value.is_positive_strict() {
            return Err(Error::InvalidInput(
                "zero generic Lelong number along this divisor; threshold infinite".into(),
            ));
        }
        return Ok(&Scalar::exact_int(1) / &value);
    }
    Err(Error::UnsupportedDimension(vanishing.len()))
}

#[derive(Debug, Clone)]
pub struct OpennessReport {
    pub member_at_t: bool,
    /// Epsilon grid values at which membership was preserved.
    pub preserved_at: Vec<f64>,
}

/// Check the openness property: membership at t persists at (1+eps) t.
pub fn openness_check(
    problem: &BundleProblem,
    p: &ChartPoint,
    f: &[Monomial],
    t: &Rat,
) -> Result<OpennessReport> {
    let member = in_multiplier_ideal(problem, p, f, t)?;
    if !member {
        return Ok(OpennessReport { member_at_t: false, preserved_at: vec![] });
    }
    let mut preserved = Vec::new();
    for (eps, num, den) in [(1e-3, 1001i64, 1000i64), (1e-6, 1000001, 1000000)] {
        let bumped = t * rat(num, den);
        if in_multiplier_ideal(problem, p, f, &bumped)? {
            preserved.push(eps);
        }
    }
    Ok(OpennessReport { member_at_t: true, preserved_at: preserved })
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

#[derive(Debug, Clone, PartialEq)]
pub enum SectionCount {
    Known(i64),
    /// A nef-but-not-ample twist appears; its section count is not
    /// determined by the intersection table alone.
    BoundaryUnknown,
}

#[derive(Debug, Clone)]
pub struct SectionReport {
    pub per_lattice_point: Vec<(Vec<i64>, SectionCount)>,
    pub total: Option<i64>,
}

/// Global sections via the lattice decomposition: each nef lattice twist
/// contributes the theta-count of its ample class (half the
/// self-intersection), boundary classes are flagged.
pub fn section_count(problem: &BundleProblem) -> Result<SectionReport> {
    let region = problem.box_nef()?;
    let points = if region.is_empty()? {
        Vec::new()
    } else {
        region.lattice_points(false, None)?
    };
    let mut per = Vec::new();
    let mut total = Some(0i64);
    for pt in points {
        let m: Vec<Rat> = pt.iter().map(|&x| rat_int(x)).collect();
        let cls = problem.class_at(&m);
        let count = if crate::torus::is_ample(&problem.base, &cls) {
            let si = crate::torus::self_intersection(&cls)?;
            let half = si
                .as_exact()
                .and_then(|r| (r / rat_int(2)).to_integer().to_i64());
            match half {
                Some(v) => SectionCount::Known(v),
                None => SectionCount::BoundaryUnknown,
            }
        } else {
            SectionCount::BoundaryUnknown
        };
        match (&mut total, &count) {
            (Some(acc), SectionCount::Known(v)) => *acc += v,
            _ => total = None,
        }
        per.push((pt, count));
    }
    Ok(SectionReport { per_lattice_point: per, total })
}
