//! The total space: a fiberwise toric variety over a complex torus twisted by
//! a homomorphism from the character lattice into the Picard group.
//!
//! Everything downstream is driven by two convex bodies: the polytope of
//! linear forms dominating h, and its subset where the twisted base class
//! stays nef.

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::fan::{cartier_data, Fan, PlFunction, ValidationReport};
use crate::linalg::{inverse_unimodular, pair_ii, IVec};
use crate::region::{AffineForm, ConicIneq, ConvexRegion, QuadForm};
use crate::scalar::{rat_int, Rat};
use crate::torus::{is_ample, weight_form, Complex, HermitianRep, NsClass, TorusBase};
use num_traits::Zero;

#[derive(Debug, Clone)]
pub struct BundleProblem {
    pub base: TorusBase,
    pub fan: Fan,
    /// Class of the twist line bundle attached to each dual generator e^j.
    pub l_hom: Vec<NsClass>,
    pub l0: NsClass,
    pub h: PlFunction,
}

/// Chart data of one maximal cone: ordered generators, dual basis, Cartier datum.
#[derive(Debug, Clone)]
pub struct Chart {
    pub sigma: usize,
    pub gens: Vec<IVec>,
    pub duals: Vec<IVec>,
    pub m_sigma: IVec,
    pub ray_ids: Vec<usize>,
}

/// A point of one chart in canonical coordinates, with its vanishing set.
#[derive(Debug, Clone)]
pub struct ChartPoint {
    pub sigma: usize,
    pub x: Vec<Complex>,
    pub z: Vec<Complex>,
}

impl ChartPoint {
    pub fn new(sigma: usize, x: Vec<Complex>, z: Vec<Complex>) -> Self {
        ChartPoint { sigma, x, z }
    }

    /// The chart apex: all fiber coordinates zero.
    pub fn apex(sigma: usize, n: usize, d: usize) -> Self {
        ChartPoint {
            sigma,
            x: vec![Complex::new(0.0, 0.0); n],
            z: vec![Complex::new(0.0, 0.0); d],
        }
    }

    /// Indices of vanishing fiber coordinates.
    pub fn vanishing_set(&self) -> Vec<usize> {
        self.x
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm_sqr() == 0.0)
            .map(|(j, _)| j)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bigness {
    Big,
    NotBig,
    Unknown,
}

impl BundleProblem {
    pub fn validate(&self) -> Result<ValidationReport> {
        let report = self.fan.validate()?;
        if self.l_hom.len() != self.fan.n {
            return Err(Error::InvalidInput(format!(
                "expected {} twist classes, got {}",
                self.fan.n,
                self.l_hom.len()
            )));
        }
        if self.h.values.len() != self.fan.rays.len() {
            return Err(Error::InvalidInput(
                "h must assign one integer to every ray".into(),
            ));
        }
        cartier_data(&self.fan, &self.h)?;
        Ok(report)
    }

    pub fn fiber_rank(&self) -> usize {
        self.fan.n
    }

    pub fn torus_dim(&self) -> usize {
        self.base.torus_dim()
    }

    pub fn charts(&self) -> Result<Vec<Chart>> {
        let data = cartier_data(&self.fan, &self.h)?;
        (0..self.fan.max_cones.len())
            .map(|k| {
                let cone = self.fan.cone(k)?;
                let duals = cone.dual_basis()?;
                Ok(Chart {
                    sigma: k,
                    gens: cone.generators().to_vec(),
                    duals,
                    m_sigma: data[k].clone(),
                    ray_ids: self.fan.max_cones[k].clone(),
                })
            })
            .collect()
    }

    pub fn chart(&self, sigma: usize) -> Result<Chart> {
        self.charts()?
            .into_iter()
            .nth(sigma)
            .ok_or_else(|| Error::InvalidInput(format!("no maximal cone {sigma}")))
    }

    /// Class of the twisted bundle at a rational point of M_R.
    pub fn class_at(&self, m: &[Rat]) -> NsClass {
        let mut cls = self.l0.clone();
        for (j, hom) in self.l_hom.iter().enumerate() {
            cls = cls.add(&hom.scale(&m[j]));
        }
        cls
    }

    /// The polytope of linear forms dominating h.
    pub fn box_h(&self) -> ConvexRegion {
        let n = self.fan.n;
        let mut region = ConvexRegion::new(n);
        for (i, ray) in self.fan.rays.iter().enumerate() {
            region.push_affine(
                ray.iter().map(|&x| rat_int(x)).collect(),
                rat_int(-self.h.values[i]),
            );
        }
        region
    }

    /// box_h cut down by the nef condition on the twisted class.
    pub fn box_nef(&self) -> Result<ConvexRegion> {
        let mut region = self.box_h();
        let (gate, quad) = self.nef_constraint()?;
        region.conics.push(ConicIneq { gate, quad });
        region.split_degenerate_conics();
        Ok(region)
    }

    /// The nef condition on m |-> class(m) as one affine gate plus one
    /// rational quadratic.
    fn nef_constraint(&self) -> Result<(AffineForm, QuadForm)> {
        match &self.base {
            TorusBase::ExE => {
                let n = self.fan.n;
                // l-coordinates of l0 and of each twist direction.
                let base_l = self.l0.l_coords()?;
                let dir_l: Vec<[Ext; 3]> = self
                    .l_hom
                    .iter()
                    .map(|c| c.l_coords())
                    .collect::<Result<_>>()?;
                // Affine families for a_l, b_l, c_l.
                let fam = |idx: usize| -> (Vec<Ext>, Ext) {
                    (
                        dir_l.iter().map(|d| d[idx].clone()).collect(),
                        base_l[idx].clone(),
                    )
                };
                let (a_coef, a_const) = fam(0);
                let (b_coef, b_const) = fam(1);
                let (c_coef, c_const) = fam(2);
                let gate = AffineForm::new(
                    c_coef
                        .iter()
                        .map(|e| {
                            e.is_rational().cloned().ok_or(Error::MixedClassFlavors)
                        })
                        .collect::<Result<Vec<_>>>()?,
                    c_const.is_rational().cloned().ok_or(Error::MixedClassFlavors)?,
                );
                let a_sq = square_ext_affine(&a_coef, &a_const, n)?;
                let b_sq = square_ext_affine(&b_coef, &b_const, n)?;
                let c_sq = square_rat_affine(&gate);
                Ok((gate, quad_sub(&quad_sub(&c_sq, &a_sq), &b_sq)))
            }
            TorusBase::GenericHermitian { d, .. } => {
                if *d != 2 {
                    return Err(Error::UnsupportedDimension(*d));
                }
                // trace >= 0, det >= 0 with entries affine in m.
                let n = self.fan.n;
                let entry = |i: usize, j: usize| -> Result<AffineForm> {
                    let base = weight_form(&self.base, &self.l0).entries[i][j]
                        .as_exact()
                        .cloned()
                        .ok_or(Error::MixedClassFlavors)?;
                    let coeffs = self
                        .l_hom
                        .iter()
                        .map(|c| {
                            weight_form(&self.base, c).entries[i][j]
                                .as_exact()
                                .cloned()
                                .ok_or(Error::MixedClassFlavors)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok(AffineForm::new(coeffs, base))
                };
                let h00 = entry(0, 0)?;
                let h11 = entry(1, 1)?;
                let h01 = entry(0, 1)?;
                let trace = AffineForm::new(
                    (0..n).map(|k| &h00.coeffs[k] + &h11.coeffs[k]).collect(),
                    &h00.constant + &h11.constant,
                );
                let det = quad_sub(
                    &quad_from_product(&h00, &h11),
                    &quad_from_product(&h01, &h01),
                );
                Ok((trace, det))
            }
        }
    }

    /// Pseudo-effectivity: the nef box is nonempty.
    pub fn is_pseudoeffective(&self) -> Result<bool> {
        Ok(!self.box_nef()?.is_empty()?)
    }

    /// Bigness via an exact ample witness in the nef box.
    ///
    /// For projectivized-split-bundle fans this is the Cutkosky criterion;
    /// in general an ample witness is sufficient, and a one-point nef box
    /// without one is conclusive in the negative.
    pub fn is_big(&self) -> Result<(Bigness, Option<Vec<Rat>>)> {
        let region = self.box_nef()?;
        if region.is_empty()? {
            return Ok((Bigness::NotBig, None));
        }
        let mut candidates: Vec<Vec<Rat>> = region.feasible_affine_vertices();
        if !candidates.is_empty() {
            // Centroid of the feasible vertices.
            let n = region.dim;
            let k = rat_int(candidates.len() as i64);
            let centroid: Vec<Rat> = (0..n)
                .map(|i| {
                    candidates.iter().map(|v| v[i].clone()).fold(Rat::zero(), |a, b| a + b) / &k
                })
                .collect();
            candidates.push(centroid);
        }
        // Rational grid over the affine bounding box.
        if let Ok(bb) = region.affine_bounding_box() {
            if region.dim == 2 {
                for den in [2i64, 3, 4, 6, 8, 12, 24, 60] {
                    let d = rat_int(den);
                    let lo0 = (crate::scalar::rat_to_f64(&bb[0].0) * den as f64).floor() as i64;
                    let hi0 = (crate::scalar::rat_to_f64(&bb[0].1) * den as f64).ceil() as i64;
                    let lo1 = (crate::scalar::rat_to_f64(&bb[1].0) * den as f64).floor() as i64;
                    let hi1 = (crate::scalar::rat_to_f64(&bb[1].1) * den as f64).ceil() as i64;
                    for i in lo0..=hi0 {
                        for j in lo1..=hi1 {
                            candidates.push(vec![rat_int(i) / &d, rat_int(j) / &d]);
                        }
                    }
                }
            }
        }
        for cand in candidates {
            if !region.contains(&cand) {
                continue;
            }
            if is_ample(&self.base, &self.class_at(&cand)) {
                return Ok((Bigness::Big, Some(cand)));
            }
        }
        // A single-point polyhedral nef box without an ample class cannot be
        // big: the ample locus is open, so meeting it forces full dimension.
        if region.is_polyhedral() {
            if let Ok(bb) = region.affine_bounding_box() {
                if bb.iter().all(|(lo, hi)| lo == hi) {
                    return Ok((Bigness::NotBig, None));
                }
            }
        }
        Ok((Bigness::Unknown, None))
    }

    /// Monomial exponent of the section chi^m pi^* f in the chart of sigma.
    pub fn section_exponents(&self, sigma: usize, m: &IVec) -> Result<Vec<i64>> {
        let chart = self.chart(sigma)?;
        Ok(chart
            .gens
            .iter()
            .map(|v| pair_ii(m, v) - pair_ii(&chart.m_sigma, v))
            .collect())
    }

    /// The maximal cone whose closed unit polydisk contains the torus point.
    ///
    /// Requires all fiber coordinates nonzero. Ties (points on chart seams)
    /// break to the smallest cone id.
    pub fn locate_cone(&self, p: &ChartPoint) -> Result<usize> {
        if !p.vanishing_set().is_empty() {
            return Err(Error::InvalidInput(
                "locate_cone requires a point of the open torus (all x_j nonzero)".into(),
            ));
        }
        let chart = self.chart(p.sigma)?;
        // w0 = -sum log|x_j| v_j, membership decided exactly on the float
        // logarithms read as rationals.
        let n = self.fan.n;
        let mut w0 = vec![Rat::zero(); n];
        for (j, x) in p.x.iter().enumerate() {
            let lg = Rat::from_float(-x.norm().ln()).ok_or_else(|| {
                Error::InvalidInput("non-finite coordinate modulus".into())
            })?;
            for k in 0..n {
                w0[k] += &lg * rat_int(chart.gens[j][k]);
            }
        }
        self.fan.locate(&w0)
    }

    /// Re-express a point in another chart through the monomial transition.
    pub fn express_in_chart(&self, p: &ChartPoint, target: usize) -> Result<ChartPoint> {
        if target == p.sigma {
            return Ok(p.clone());
        }
        let from = self.chart(p.sigma)?;
        let to = self.chart(target)?;
        let to_cone = Cone::new(to.gens.clone(), self.fan.n)?;
        let duals_to = to_cone.dual_basis()?;
        let mut x_new = Vec::with_capacity(self.fan.n);
        for uk in &duals_to {
            // x'_k = prod_j x_j ^ <u^k, v_j>
            let mut acc = Complex::new(1.0, 0.0);
            for (j, xj) in p.x.iter().enumerate() {
                let e = pair_ii(uk, &from.gens[j]);
                if e == 0 {
                    continue;
                }
                if xj.norm_sqr() == 0.0 {
                    if e > 0 {
                        acc = Complex::new(0.0, 0.0);
                    } else {
                        return Err(Error::InvalidInput(
                            "transition pole: vanishing coordinate with negative exponent".into(),
                        ));
                    }
                } else {
                    acc *= xj.powi(e as i32);
                }
            }
            x_new.push(acc);
        }
        Ok(ChartPoint { sigma: target, x: x_new, z: p.z.clone() })
    }

    /// box_nef mapped into the exponent coordinates of one chart
    /// (alpha_j = <m - m_sigma, v_j>).
    pub fn shifted_box_nef(&self, sigma: usize) -> Result<ConvexRegion> {
        let region = self.box_nef()?;
        let chart = self.chart(sigma)?;
        // m = V^{-1} alpha + m_sigma where V has rows v_j.
        let vinv = inverse_unimodular(&chart.gens)?;
        let n = self.fan.n;
        // substitute matrix A with A[i][k] = dm_i/dalpha_k = (V^{-1})[i][k]
        let a: Vec<Vec<Rat>> = (0..n)
            .map(|i| (0..n).map(|k| rat_int(vinv[i][k])).collect())
            .collect();
        let b: Vec<Rat> = chart.m_sigma.iter().map(|&x| rat_int(x)).collect();
        Ok(region.substitute(&a, &b))
    }

    /// Hermitian weight data as affine family: rep of l0 and of each twist.
    pub fn weight_family(&self) -> (HermitianRep, Vec<HermitianRep>) {
        let base_rep = weight_form(&self.base, &self.l0);
        let dirs = self.l_hom.iter().map(|c| weight_form(&self.base, c)).collect();
        (base_rep, dirs)
    }
}

fn square_rat_affine(f: &AffineForm) -> QuadForm {
    quad_from_product(f, f)
}

pub fn quad_from_product(f: &AffineForm, g: &AffineForm) -> QuadForm {
    let n = f.coeffs.len();
    let mut q = vec![vec![Rat::zero(); n]; n];
    let mut lin = vec![Rat::zero(); n];
    for i in 0..n {
        for j in 0..n {
            q[i][j] += &f.coeffs[i] * &g.coeffs[j];
        }
        lin[i] = &f.coeffs[i] * &g.constant + &g.coeffs[i] * &f.constant;
    }
    QuadForm { q, lin, constant: &f.constant * &g.constant }
}

fn quad_sub(a: &QuadForm, b: &QuadForm) -> QuadForm {
    let n = a.lin.len();
    QuadForm {
        q: (0..n)
            .map(|i| (0..n).map(|j| &a.q[i][j] - &b.q[i][j]).collect())
            .collect(),
        lin: (0..n).map(|i| &a.lin[i] - &b.lin[i]).collect(),
        constant: &a.constant - &b.constant,
    }
}

/// Expand the square of an Ext-affine form into a rational quadratic.
///
/// Requires the form to be purely rational or purely sqrt3-rational;
/// mixtures would leave a sqrt3 residue in the square.
fn square_ext_affine(coeffs: &[Ext], constant: &Ext, n: usize) -> Result<QuadForm> {
    let rational_part_zero = coeffs.iter().all(|e| e.p.is_zero()) && constant.p.is_zero();
    let surd_part_zero = coeffs.iter().all(|e| e.q.is_zero()) && constant.q.is_zero();
    if rational_part_zero {
        let f = AffineForm::new(
            coeffs.iter().map(|e| e.q.clone()).collect(),
            constant.q.clone(),
        );
        let mut q = quad_from_product(&f, &f);
        let three = rat_int(3);
        for i in 0..n {
            for j in 0..n {
                q.q[i][j] *= &three;
            }
            q.lin[i] *= &three;
        }
        q.constant *= three;
        Ok(q)
    } else if surd_part_zero {
        let f = AffineForm::new(
            coeffs.iter().map(|e| e.p.clone()).collect(),
            constant.p.clone(),
        );
        Ok(quad_from_product(&f, &f))
    } else {
        Err(Error::MixedClassFlavors)
    }
}
