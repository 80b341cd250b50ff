//! The extremal weight: per-class local weights, their upper envelope over
//! the nef box, chart gluing, singularity germs, and the lattice-section
//! lower envelope used as a desk-scale minimality witness.

use crate::bundle::{BundleProblem, Chart, ChartPoint};
use crate::error::{Error, Result};
use crate::hull;
use crate::linalg::{pair_ii, pair_ri};
use crate::opt;
use crate::par::{self, Parallelism};
use crate::region::{AffineForm, ConvexRegion};
use crate::scalar::{rat_int, rat_to_f64, Rat, Scalar};
use num_traits::{Signed, Zero};

/// A local weight value; minus infinity occurs exactly on the polar locus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightValue {
    NegInfinity,
    Finite(f64),
}

impl WeightValue {
    pub fn to_f64(self) -> f64 {
        match self {
            WeightValue::NegInfinity => f64::NEG_INFINITY,
            WeightValue::Finite(v) => v,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, WeightValue::Finite(_))
    }
}

/// Affine-in-m data of the weight at a fixed point: value(m) = coeffs . m + constant.
pub(crate) struct PointObjective {
    pub coeffs: Vec<f64>,
    pub constant: f64,
}

/// Build the affine objective m |-> psi_{sigma, m}(p) at a point with all
/// contributions from vanished coordinates removed (they are handled by the
/// slice constraints).
pub(crate) fn point_objective(
    problem: &BundleProblem,
    chart: &Chart,
    p: &ChartPoint,
) -> PointObjective {
    let n = problem.fiber_rank();
    let (base_rep, dir_reps) = problem.weight_family();
    let mut coeffs = vec![0.0; n];
    let mut constant = base_rep.evaluate(&p.z);
    for (k, rep) in dir_reps.iter().enumerate() {
        coeffs[k] += rep.evaluate(&p.z);
    }
    for (j, xj) in p.x.iter().enumerate() {
        let r = xj.norm();
        if r == 0.0 {
            continue;
        }
        let lg2 = 2.0 * r.ln();
        for k in 0..n {
            coeffs[k] += lg2 * chart.gens[j][k] as f64;
        }
        constant -= lg2 * pair_ii(&chart.m_sigma, &chart.gens[j]) as f64;
    }
    PointObjective { coeffs, constant }
}

/// The slice of the nef box forced by the vanishing set: <m - m_sigma, v_j> = 0.
pub(crate) fn sliced_box_nef(
    problem: &BundleProblem,
    chart: &Chart,
    vanishing: &[usize],
) -> Result<ConvexRegion> {
    let region = problem.box_nef()?;
    let eqs: Vec<AffineForm> = vanishing
        .iter()
        .map(|&j| {
            let v = &chart.gens[j];
            AffineForm::new(
                v.iter().map(|&x| rat_int(x)).collect(),
                rat_int(-pair_ii(&chart.m_sigma, v)),
            )
        })
        .collect();
    Ok(region.with_equalities(&eqs))
}

/// The weight of one nef twist class at a chart point, with 0^0 = 1.
pub fn psi_sigma_m(problem: &BundleProblem, p: &ChartPoint, m: &[Rat]) -> Result<WeightValue> {
    let region = problem.box_nef()?;
    if !region.contains(m) {
        return Err(Error::NefViolation(format!("{m:?}")));
    }
    let chart = problem.chart(p.sigma)?;
    let mut value = 0.0;
    // z-part: affine in m through the hermitian family.
    let (base_rep, dir_reps) = problem.weight_family();
    value += base_rep.evaluate(&p.z);
    for (k, rep) in dir_reps.iter().enumerate() {
        value += rat_to_f64(&m[k]) * rep.evaluate(&p.z);
    }
    for (j, xj) in p.x.iter().enumerate() {
        let expo = pair_ri(m, &chart.gens[j]) - rat_int(pair_ii(&chart.m_sigma, &chart.gens[j]));
        let r = xj.norm();
        if r == 0.0 {
            if expo.is_zero() {
                continue; // 0^0 = 1 contributes log 1 = 0
            }
            debug_assert!(expo.is_positive(), "domination forces nonnegative exponents");
            return Ok(WeightValue::NegInfinity);
        }
        value += 2.0 * rat_to_f64(&expo) * r.ln();
    }
    Ok(WeightValue::Finite(value))
}

/// The envelope weight: maximum of psi_{sigma, m} over the nef box.
///
/// Minus infinity exactly when the vanishing-set slice of the box is empty.
pub fn psi_sigma(problem: &BundleProblem, p: &ChartPoint) -> Result<WeightValue> {
    let chart = problem.chart(p.sigma)?;
    let vanishing = p.vanishing_set();
    let region = sliced_box_nef(problem, &chart, &vanishing)?;
    if region.is_empty()? {
        return Ok(WeightValue::NegInfinity);
    }
    let obj = point_objective(problem, &chart, p);
    let objective: Vec<Scalar> = obj.coeffs.iter().map(|&c| Scalar::approx(c)).collect();
    let out = opt::maximize_linear(&region, &objective, 1e-9)?;
    Ok(WeightValue::Finite(out.value_f64() + obj.constant))
}

/// Difference between the weight in two charts minus the expected monomial
/// transition; at most ~1e-9 on the open torus.
pub fn glue_check(problem: &BundleProblem, p: &ChartPoint, other_sigma: usize) -> Result<f64> {
    if p.sigma == other_sigma {
        return Ok(0.0);
    }
    if !p.vanishing_set().is_empty() {
        return Err(Error::InvalidInput(
            "glue check requires a point of the open torus".into(),
        ));
    }
    let chart = problem.chart(p.sigma)?;
    let other = problem.chart(other_sigma)?;
    let q = problem.express_in_chart(p, other_sigma)?;
    let a = psi_sigma(problem, p)?.to_f64();
    let b = psi_sigma(problem, &q)?.to_f64();
    let mut transition = 0.0;
    for (j, xj) in p.x.iter().enumerate() {
        let diff = pair_ii(&other.m_sigma, &chart.gens[j]) - pair_ii(&chart.m_sigma, &chart.gens[j]);
        transition += 2.0 * diff as f64 * xj.norm().ln();
    }
    Ok((a - b - transition).abs())
}

/// Germ of the weight at a point: the exponent region of the dominating
/// log-monomial behavior in the vanished coordinates. Bounded terms are
/// dropped entirely.
#[derive(Debug, Clone)]
pub enum Germ {
    /// No vanishing coordinates: the weight is bounded near the point.
    Trivial,
    Region { region: ConvexRegion },
}

impl Germ {
    /// Germ of log max |x|^(2 m) over a finite exponent set in the positive
    /// orthant (dimension <= 2).
    pub fn from_exponents(points: &[Vec<Rat>], dim: usize) -> Result<Germ> {
        if points.is_empty() {
            return Ok(Germ::Trivial);
        }
        match dim {
            1 => {
                let min = points.iter().map(|p| p[0].clone()).min().unwrap();
                Ok(Germ::Region { region: half_line_region(min) })
            }
            2 => {
                let sigma = crate::cone::Cone::new(vec![vec![1, 0], vec![0, 1]], 2)?;
                Ok(Germ::Region { region: hull::double_overline(points, &sigma)? })
            }
            d => Err(Error::UnsupportedDimension(d)),
        }
    }

    /// Lower support function min over the region of <., w> for w >= 0.
    pub fn support(&self, w: &[f64]) -> f64 {
        match self {
            Germ::Trivial => 0.0,
            Germ::Region { region } => {
                match opt::minimize_numeric(region, w, 1e-9) {
                    Ok(out) => out.value_f64(),
                    Err(_) => f64::INFINITY, // empty exponent region: nothing dominates
                }
            }
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            Germ::Trivial => None,
            Germ::Region { region } => Some(region.dim),
        }
    }
}

fn half_line_region(min: Rat) -> ConvexRegion {
    let mut r = ConvexRegion::new(1);
    r.push_affine(vec![rat_int(1)], -min);
    r.recession = Some(crate::cone::Cone::new(vec![vec![1]], 1).expect("ray"));
    r
}

/// The singularity germ of the envelope weight at a chart point.
pub fn singularity_germ(problem: &BundleProblem, p: &ChartPoint) -> Result<Germ> {
    let vanishing = p.vanishing_set();
    if vanishing.is_empty() {
        return Ok(Germ::Trivial);
    }
    let s = crate::positivity::s_set(problem, p.sigma)?;
    let n = problem.fiber_rank();
    if vanishing.len() == n {
        return Ok(Germ::Region { region: s.region });
    }
    // Project to the vanished coordinates; for a single index the projection
    // is the half-line above the minimal exponent.
    if vanishing.len() == 1 {
        let j = vanishing[0];
        let mut w = vec![Scalar::exact_int(0); n];
        w[j] = Scalar::exact_int(1);
        let shifted = problem.shifted_box_nef(p.sigma)?;
        let out = opt::minimize_linear(&shifted, &w, 1e-9)?;
        let (value, _) = out.expect_optimal();
        let min = match value.as_exact() {
            Some(r) => r.clone(),
            None => Rat::from_float(value.to_f64()).unwrap_or_else(Rat::zero),
        };
        return Ok(Germ::Region { region: half_line_region(min) });
    }
    Err(Error::UnsupportedDimension(vanishing.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingOrder {
    /// First germ is more singular (its weight is dominated).
    FirstMoreSingular,
    SecondMoreSingular,
    Equivalent,
    Incomparable,
}

/// Compare two germs by their lower support functions on the positive
/// orthant: a germ is at least as singular when its support function
/// dominates the other everywhere.
pub fn compare_singularity(g1: &Germ, g2: &Germ) -> SingOrder {
    match (g1, g2) {
        (Germ::Trivial, Germ::Trivial) => SingOrder::Equivalent,
        _ => {
            if g1.dim().is_some() && g2.dim().is_some() && g1.dim() != g2.dim() {
                return SingOrder::Incomparable;
            }
            let dim = g1.dim().or(g2.dim()).unwrap();
            let dirs = sample_directions(dim);
            let mut first_le = true; // h1 <= h2 everywhere (=> second more singular)
            let mut second_le = true;
            for w in dirs {
                let h1 = g1.support(&w);
                let h2 = g2.support(&w);
                let scale = 1.0 + h1.abs().max(h2.abs());
                if h1 > h2 + 1e-9 * scale {
                    first_le = false;
                }
                if h2 > h1 + 1e-9 * scale {
                    second_le = false;
                }
            }
            match (first_le, second_le) {
                (true, true) => SingOrder::Equivalent,
                // h1 dominated: germ 1 decays slower, so germ 2 is more singular.
                (true, false) => SingOrder::SecondMoreSingular,
                (false, true) => SingOrder::FirstMoreSingular,
                (false, false) => SingOrder::Incomparable,
            }
        }
    }
}

fn sample_directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0]],
        _ => {
            let k = 720;
            (0..=k)
                .map(|i| {
                    let t = std::f64::consts::FRAC_PI_2 * i as f64 / k as f64;
                    vec![t.cos(), t.sin()]
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnvelopeSample {
    /// The scaled box has no lattice points: no sections at this level.
    NoSections,
    Value(WeightValue),
}

/// Lattice-restricted lower envelope: (1/nu) max over lattice points of the
/// nu-scaled nef box of the corresponding twist weight.
///
/// Always <= psi_sigma at the same point, monotone along divisor chains of nu.
pub fn section_envelope_oracle(
    problem: &BundleProblem,
    p: &ChartPoint,
    nu: i64,
    mode: Parallelism,
) -> Result<EnvelopeSample> {
    let chart = problem.chart(p.sigma)?;
    let scaled = problem.box_nef()?.scaled(&rat_int(nu));
    let lattice = scaled.lattice_points(false, None)?;
    if lattice.is_empty() {
        return Ok(EnvelopeSample::NoSections);
    }
    let obj = point_objective(problem, &chart, p);
    let vanishing = p.vanishing_set();
    // Integer slice test per vanished coordinate: <m, v_j> == nu <m_sigma, v_j>.
    let slice_data: Vec<(Vec<i64>, i64)> = vanishing
        .iter()
        .map(|&j| (chart.gens[j].clone(), nu * pair_ii(&chart.m_sigma, &chart.gens[j])))
        .collect();
    let chunks: Vec<Vec<Vec<i64>>> = lattice.chunks(512).map(<[_]>::to_vec).collect();
    let best = par::max_f64(mode, chunks, move |chunk| {
        let mut local = f64::NEG_INFINITY;
        'points: for m in chunk {
            for (v, rhs) in &slice_data {
                if pair_ii(&m, v) != *rhs {
                    continue 'points;
                }
            }
            let mut val = obj.constant * nu as f64;
            for (k, c) in obj.coeffs.iter().enumerate() {
                val += c * m[k] as f64;
            }
            local = local.max(val);
        }
        local
    })
    .expect("nonempty lattice");
    let value = best / nu as f64;
    if value == f64::NEG_INFINITY {
        Ok(EnvelopeSample::Value(WeightValue::NegInfinity))
    } else {
        Ok(EnvelopeSample::Value(WeightValue::Finite(value)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::rat;
    use crate::torus::Complex;

    fn torus_point(sigma: usize, r1: f64, r2: f64) -> ChartPoint {
        ChartPoint::new(
            sigma,
            vec![Complex::new(r1, 0.0), Complex::new(0.0, r2)],
            vec![Complex::new(0.0, 0.0); 2],
        )
    }

    #[test]
    fn unit_torus_point_has_zero_weight() {
        let p = fixtures::nakayama(2).unwrap();
        let pt = torus_point(0, 1.0, 1.0);
        let v = psi_sigma(&p, &pt).unwrap();
        assert!((v.to_f64() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn psi_sigma_m_formula_on_nakayama_chart() {
        // |x1| = e^-1, |x2| = 1, z = 0 gives -2 alpha for m = (alpha, beta).
        let p = fixtures::nakayama(2).unwrap();
        let pt = torus_point(0, (-1.0_f64).exp(), 1.0);
        let m = vec![rat(1, 2), rat(1, 2)];
        let v = psi_sigma_m(&p, &pt, &m).unwrap();
        assert!((v.to_f64() - (-1.0)).abs() < 1e-12);
    }

    #[test]
    fn psi_sigma_m_rejects_non_nef() {
        let p = fixtures::nakayama(2).unwrap();
        let pt = torus_point(0, 0.5, 0.5);
        assert!(matches!(
            psi_sigma_m(&p, &pt, &[Rat::zero(), Rat::zero()]),
            Err(Error::NefViolation(_))
        ));
    }

    #[test]
    fn vanishing_with_positive_exponent_is_polar() {
        let p = fixtures::nakayama(2).unwrap();
        let pt = ChartPoint::apex(0, 2, 2);
        let m = vec![rat(1, 2), rat(1, 2)];
        assert_eq!(psi_sigma_m(&p, &pt, &m).unwrap(), WeightValue::NegInfinity);
        // The full envelope is also polar there.
        assert_eq!(psi_sigma(&p, &pt).unwrap(), WeightValue::NegInfinity);
    }

    #[test]
    fn envelope_at_apex_of_nonpolar_chart_is_finite() {
        // In chart sigma_2 the apex is P(L1); e^1 in the box slices to it.
        let p = fixtures::nakayama(2).unwrap();
        let pt = ChartPoint::apex(1, 2, 2);
        assert!(psi_sigma(&p, &pt).unwrap().is_finite());
    }

    #[test]
    fn envelope_dominates_members_and_attains() {
        let p = fixtures::ex62(1, 2).unwrap();
        let pt = torus_point(0, 0.3, 0.7);
        let env = psi_sigma(&p, &pt).unwrap().to_f64();
        let region = p.box_nef().unwrap();
        let mut attained: f64 = f64::NEG_INFINITY;
        for v in region.feasible_affine_vertices() {
            let val = psi_sigma_m(&p, &pt, &v).unwrap().to_f64();
            assert!(val <= env + 1e-9);
            attained = attained.max(val);
        }
        // Affine objective attains its max at a vertex of the pentagon.
        assert!((attained - env).abs() < 1e-9);
    }

    #[test]
    fn glue_check_small_on_overlap() {
        let p = fixtures::ex62(1, 2).unwrap();
        let pt = torus_point(0, 0.4, 0.9);
        for sigma in 0..3 {
            let d = glue_check(&p, &pt, sigma).unwrap();
            assert!(d <= 1e-9, "glue defect {d} against chart {sigma}");
        }
    }

    #[test]
    fn germ_comparison_examples() {
        // max{|x1|^2, |x2|^2} vs |x1|^2: the single-monomial germ is more singular.
        let g_max = Germ::from_exponents(
            &[vec![rat_int(1), Rat::zero()], vec![Rat::zero(), rat_int(1)]],
            2,
        )
        .unwrap();
        let g_x1 = Germ::from_exponents(&[vec![rat_int(1), Rat::zero()]], 2).unwrap();
        assert_eq!(compare_singularity(&g_x1, &g_max), SingOrder::FirstMoreSingular);
        assert_eq!(compare_singularity(&g_max, &g_x1), SingOrder::SecondMoreSingular);
        assert_eq!(compare_singularity(&g_max, &g_max), SingOrder::Equivalent);
        assert_eq!(compare_singularity(&Germ::Trivial, &Germ::Trivial), SingOrder::Equivalent);
        // Any nontrivial germ is more singular than a bounded weight germ.
        assert_eq!(compare_singularity(&g_x1, &Germ::Trivial), SingOrder::FirstMoreSingular);
    }

    #[test]
    fn ex62_apex_germ_matches_scaled_exponents() {
        // At the apex of sigma_1 the germ is (u/(2v(u+v)))-scaled
        // max{x1^(2(2u+2v)), x2^(2(2u+2v)), (x1 x2)^(2v)}; with u=1, v=2 the
        // S-set is the closure of the pentagon, so compare against the
        // explicitly scaled exponent set.
        let (u, v) = (1i64, 2i64);
        let p = fixtures::ex62(u, v).unwrap();
        let pt = ChartPoint::apex(0, 2, 2);
        let germ = singularity_germ(&p, &pt).unwrap();
        let s = rat(u, 2 * v * (u + v));
        let scaled_pts: Vec<Vec<Rat>> = vec![
            vec![&s * rat_int(2 * u + 2 * v), Rat::zero()],
            vec![Rat::zero(), &s * rat_int(2 * u + 2 * v)],
            vec![&s * rat_int(v), &s * rat_int(v)],
        ];
        let reference = Germ::from_exponents(&scaled_pts, 2).unwrap();
        assert_eq!(compare_singularity(&germ, &reference), SingOrder::Equivalent);
    }

    #[test]
    fn no_sections_flagged_on_lattice_free_box() {
        // A hermitian base whose nef box is the triangle with corners at
        // thirds: no lattice points at level one, sections appear at nu = 3.
        use crate::fan::PlFunction;
        use crate::torus::{NsClass, TorusBase};
        let one = || Scalar::exact_int(1);
        let zero = || Scalar::exact_int(0);
        let base = TorusBase::GenericHermitian {
            d: 2,
            forms: vec![
                vec![vec![one(), zero()], vec![zero(), zero()]],
                vec![vec![zero(), zero()], vec![zero(), one()]],
            ],
        };
        let fan = crate::fixtures::projective_plane_fan();
        let problem = crate::BundleProblem {
            base,
            fan: fan.clone(),
            l_hom: vec![
                NsClass::Generic(vec![rat_int(1), Rat::zero()]),
                NsClass::Generic(vec![Rat::zero(), rat_int(1)]),
            ],
            l0: NsClass::Generic(vec![rat(-1, 3), rat(-1, 3)]),
            h: PlFunction { values: vec![-1, 0, 0] },
        };
        let pt = torus_point(0, 0.5, 0.5);
        assert_eq!(
            section_envelope_oracle(&problem, &pt, 1, Parallelism::default()).unwrap(),
            EnvelopeSample::NoSections
        );
        let EnvelopeSample::Value(WeightValue::Finite(v)) =
            section_envelope_oracle(&problem, &pt, 3, Parallelism::default()).unwrap()
        else {
            panic!("expected sections at nu = 3");
        };
        assert!(v <= psi_sigma(&problem, &pt).unwrap().to_f64() + 1e-9);
    }

    #[test]
    fn nakayama_polar_germ_matches_conic_region() {
        // At the polar section the germ's exponent body is the closed region
        // a^2 (x+y)^2 >= (1-x)^2 + (1-y)^2 in the quadrant; compare support
        // functions against that reference region built directly.
        let a = 2i64;
        let p = fixtures::nakayama(a).unwrap();
        let germ = singularity_germ(&p, &ChartPoint::apex(0, 2, 2)).unwrap();
        let mut reference = crate::region::ConvexRegion::new(2);
        reference.push_affine(vec![rat_int(1), Rat::zero()], Rat::zero());
        reference.push_affine(vec![Rat::zero(), rat_int(1)], Rat::zero());
        let a2 = rat_int(a * a);
        reference.conics.push(crate::region::ConicIneq {
            gate: crate::region::AffineForm::new(vec![rat_int(1), rat_int(1)], Rat::zero()),
            quad: crate::region::QuadForm {
                q: vec![
                    vec![&a2 - rat_int(1), a2.clone()],
                    vec![a2.clone(), &a2 - rat_int(1)],
                ],
                lin: vec![rat_int(2), rat_int(2)],
                constant: rat_int(-2),
            },
        });
        let ref_germ = Germ::Region { region: reference };
        assert_eq!(compare_singularity(&germ, &ref_germ), SingOrder::Equivalent);
    }

    #[test]
    fn section_envelope_is_monotone_lower_bound() {
        let p = fixtures::nakayama(2).unwrap();
        let pt = torus_point(0, 0.35, 0.8);
        let env = psi_sigma(&p, &pt).unwrap().to_f64();
        let mut prev = f64::NEG_INFINITY;
        for nu in [10, 100, 1000] {
            let EnvelopeSample::Value(WeightValue::Finite(v)) =
                section_envelope_oracle(&p, &pt, nu, Parallelism::default()).unwrap()
            else {
                panic!("expected finite sample");
            };
            assert!(v <= env + 1e-9);
            assert!(v >= prev - 1e-12);
            prev = v;
        }
        assert!(env - prev < 0.05, "gap {} too large", env - prev);
    }
}
