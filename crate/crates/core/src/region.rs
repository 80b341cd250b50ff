//! Convex regions in M_R cut out by rational affine inequalities plus
//! second-order-cone (quadratic) constraints.
//!
//! The quadratic side of a Lorentz constraint c(m) >= sqrt(a(m)^2 + b(m)^2)
//! is stored expanded as the rational polynomial Q = c^2 - a^2 - b^2 together
//! with the linear gate c(m) >= 0, so membership of rational points stays
//! exactly decidable even when a or b individually carry a sqrt(3) factor.

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::linalg::solve_rat;
use crate::scalar::{rat_int, rat_to_f64, Rat};
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineForm {
    pub coeffs: Vec<Rat>,
    pub constant: Rat,
}

impl AffineForm {
    pub fn new(coeffs: Vec<Rat>, constant: Rat) -> Self {
        AffineForm { coeffs, constant }
    }

    pub fn eval(&self, m: &[Rat]) -> Rat {
        self.coeffs
            .iter()
            .zip(m)
            .fold(self.constant.clone(), |acc, (c, x)| acc + c * x)
    }

    pub fn eval_f64(&self, m: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .zip(m)
            .fold(rat_to_f64(&self.constant), |acc, (c, x)| acc + rat_to_f64(c) * x)
    }

    /// Compose with the affine map m = A m' + b.
    pub fn substitute(&self, a: &[Vec<Rat>], b: &[Rat]) -> AffineForm {
        let dim_out = a[0].len();
        let mut coeffs = vec![Rat::zero(); dim_out];
        let mut constant = self.constant.clone();
        for (ci, row) in self.coeffs.iter().zip(a) {
            for (k, ajk) in row.iter().enumerate() {
                coeffs[k] += ci * ajk;
            }
        }
        for (ci, bi) in self.coeffs.iter().zip(b) {
            constant += ci * bi;
        }
        AffineForm { coeffs, constant }
    }

    pub fn scale_hom(&self, t: &Rat) -> AffineForm {
        // Inequality for the scaled region t*R: f(m/t) >= 0 <=> t f(m/t) >= 0.
        AffineForm { coeffs: self.coeffs.clone(), constant: &self.constant * t }
    }
}

/// Rational quadratic polynomial m^T Q m + lin . m + constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadForm {
    pub q: Vec<Vec<Rat>>,
    pub lin: Vec<Rat>,
    pub constant: Rat,
}

impl QuadForm {
    pub fn eval(&self, m: &[Rat]) -> Rat {
        let mut acc = self.constant.clone();
        for (i, row) in self.q.iter().enumerate() {
            for (j, qij) in row.iter().enumerate() {
                acc += qij * &m[i] * &m[j];
            }
        }
        for (li, xi) in self.lin.iter().zip(m) {
            acc += li * xi;
        }
        acc
    }

    pub fn eval_f64(&self, m: &[f64]) -> f64 {
        let mut acc = rat_to_f64(&self.constant);
        for (i, row) in self.q.iter().enumerate() {
            for (j, qij) in row.iter().enumerate() {
                acc += rat_to_f64(qij) * m[i] * m[j];
            }
        }
        for (li, xi) in self.lin.iter().zip(m) {
            acc += rat_to_f64(li) * xi;
        }
        acc
    }

    /// Gradient as a vector of affine forms (2 Q m + lin).
    pub fn gradient(&self) -> Vec<AffineForm> {
        let n = self.lin.len();
        (0..n)
            .map(|k| {
                let coeffs = (0..n)
                    .map(|j| (&self.q[k][j] + &self.q[j][k]).clone())
                    .collect();
                AffineForm { coeffs, constant: self.lin[k].clone() }
            })
            .collect()
    }

    pub fn substitute(&self, a: &[Vec<Rat>], b: &[Rat]) -> QuadForm {
        let n_out = a[0].len();
        let mut q = vec![vec![Rat::zero(); n_out]; n_out];
        let mut lin = vec![Rat::zero(); n_out];
        let mut constant = self.constant.clone();
        // (A m' + b)^T Q (A m' + b) + lin.(A m' + b) + c
        let n_in = self.lin.len();
        for i in 0..n_in {
            for j in 0..n_in {
                let qij = &self.q[i][j];
                if qij.is_zero() {
                    continue;
                }
                for k in 0..n_out {
                    for l in 0..n_out {
                        q[k][l] += qij * &a[i][k] * &a[j][l];
                    }
                    lin[k] += qij * (&a[i][k] * &b[j] + &a[j][k] * &b[i]);
                }
                constant += qij * &b[i] * &b[j];
            }
        }
        for i in 0..n_in {
            for k in 0..n_out {
                lin[k] += &self.lin[i] * &a[i][k];
            }
            constant += &self.lin[i] * &b[i];
        }
        QuadForm { q, lin, constant }
    }

    pub fn scale_hom(&self, t: &Rat) -> QuadForm {
        // t^2 Q(m/t): quadratic part unchanged, linear * t, constant * t^2.
        QuadForm {
            q: self.q.clone(),
            lin: self.lin.iter().map(|l| l * t).collect(),
            constant: &self.constant * t * t,
        }
    }

    /// 3x3 symmetric matrix of the homogenized conic on (m1, m2, 1).
    fn homogeneous_matrix_2d(&self) -> [[Rat; 3]; 3] {
        let h = |r: Rat| r;
        let q01 = (&self.q[0][1] + &self.q[1][0]) / rat_int(2);
        [
            [self.q[0][0].clone(), q01.clone(), &self.lin[0] / rat_int(2)],
            [q01, self.q[1][1].clone(), &self.lin[1] / rat_int(2)],
            [h(&self.lin[0] / rat_int(2)), &self.lin[1] / rat_int(2), self.constant.clone()],
        ]
    }

    /// Try to factor a degenerate 2D conic Q = s * l1 * l2 with rational lines.
    ///
    /// Returns the two affine factors when Q splits over Q; used to turn
    /// effectively-linear Lorentz constraints into honest half-planes.
    pub fn rational_line_factors_2d(&self) -> Option<(AffineForm, AffineForm)> {
        if self.lin.len() != 2 {
            return None;
        }
        let m = self.homogeneous_matrix_2d();
        let det3 = det3x3(&m);
        if !det3.is_zero() {
            return None;
        }
        // Quadratic part: a x^2 + 2h xy + b y^2; factor over Q if h^2 - ab is
        // a rational square.
        let a = &m[0][0];
        let h = &m[0][1];
        let b = &m[1][1];
        let disc = h * h - a * b;
        if disc.is_negative() {
            return None;
        }
        let (sq, ok) = rat_sqrt(&disc)?;
        if !ok {
            return None;
        }
        // Directions of the two lines from the quadratic part.
        let (l1_dir, l2_dir): ((Rat, Rat), (Rat, Rat)) = if !a.is_zero() {
            // a x^2 + 2h xy + b y^2 = a (x - r1 y)(x - r2 y), r = (-h +- sq)/a
            let r1 = (-h + &sq) / a;
            let r2 = (-h - &sq) / a;
            ((Rat::from_integer(1.into()), -r1), (Rat::from_integer(1.into()), -r2))
        } else if !b.is_zero() {
            let r1 = (-h + &sq) / b;
            let r2 = (-h - &sq) / b;
            ((-r1, Rat::from_integer(1.into())), (-r2, Rat::from_integer(1.into())))
        } else if !h.is_zero() {
            (
                (Rat::from_integer(1.into()), Rat::zero()),
                (Rat::zero(), Rat::from_integer(1.into())),
            )
        } else {
            return None;
        };
        // Solve for the affine offsets: Q = s (n1.m + c1)(n2.m + c2).
        let factor_scale = if !a.is_zero() {
            a.clone()
        } else if !b.is_zero() {
            b.clone()
        } else {
            (h + h).clone()
        };
        // Expand s (x d11 + y d12 + c1)(x d21 + y d22 + c2) and match the
        // linear and constant coefficients.
        let (d11, d12) = l1_dir;
        let (d21, d22) = l2_dir;
        // lin_x = s (d11 c2 + d21 c1), lin_y = s (d12 c2 + d22 c1), const = s c1 c2
        let lx = &self.lin[0] / &factor_scale;
        let ly = &self.lin[1] / &factor_scale;
        // Solve the linear system for (c1, c2):
        //   d21 c1 + d11 c2 = lx
        //   d22 c1 + d12 c2 = ly
        let sys = vec![vec![d21.clone(), d11.clone()], vec![d22.clone(), d12.clone()]];
        let sol = solve_rat(&sys, &[lx, ly])?;
        let (c1, c2) = (sol[0].clone(), sol[1].clone());
        // Verify the constant term.
        if &factor_scale * &c1 * &c2 != self.constant {
            return None;
        }
        let f1 = AffineForm::new(vec![d11, d12], c1);
        let f2s = AffineForm::new(
            vec![&d21 * &factor_scale, &d22 * &factor_scale],
            &c2 * &factor_scale,
        );
        Some((f1, f2s))
    }
}

fn det3x3(m: &[[Rat; 3]; 3]) -> Rat {
    let d = |a: &Rat, b: &Rat, c: &Rat, d: &Rat| a * d - b * c;
    &m[0][0] * d(&m[1][1], &m[1][2], &m[2][1], &m[2][2])
        - &m[0][1] * d(&m[1][0], &m[1][2], &m[2][0], &m[2][2])
        + &m[0][2] * d(&m[1][0], &m[1][1], &m[2][0], &m[2][1])
}

/// Exact square root of a rational if it is a perfect square.
fn rat_sqrt(r: &Rat) -> Option<(Rat, bool)> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    let cand = Rat::new(n, d);
    let ok = &cand * &cand == *r;
    Some((cand, ok))
}

/// One Lorentz constraint c(m) >= sqrt(a(m)^2 + b(m)^2), stored as the gate
/// c(m) >= 0 plus the expanded quadratic Q(m) = c^2 - a^2 - b^2 >= 0.
#[derive(Debug, Clone)]
pub struct ConicIneq {
    pub gate: AffineForm,
    pub quad: QuadForm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    Boundary,
}

#[derive(Debug, Clone)]
pub struct ConvexRegion {
    pub dim: usize,
    pub affine: Vec<AffineForm>,
    pub conics: Vec<ConicIneq>,
    pub recession: Option<Cone>,
}

impl ConvexRegion {
    pub fn new(dim: usize) -> Self {
        ConvexRegion { dim, affine: Vec::new(), conics: Vec::new(), recession: None }
    }

    pub fn with_recession(mut self, cone: Cone) -> Self {
        self.recession = Some(cone);
        self
    }

    pub fn push_affine(&mut self, normal: Vec<Rat>, offset: Rat) {
        self.affine.push(AffineForm::new(normal, offset));
    }

    pub fn is_polyhedral(&self) -> bool {
        self.conics.is_empty()
    }

    /// Exact membership of a rational point.
    pub fn contains(&self, m: &[Rat]) -> bool {
        self.affine.iter().all(|f| !f.eval(m).is_negative())
            && self
                .conics
                .iter()
                .all(|c| !c.gate.eval(m).is_negative() && !c.quad.eval(m).is_negative())
    }

    /// Exact strict-interior membership of a rational point (relative to the
    /// listed inequalities; redundant constraints should be pruned upstream).
    pub fn contains_interior(&self, m: &[Rat]) -> bool {
        self.affine.iter().all(|f| f.eval(m).is_positive())
            && self
                .conics
                .iter()
                .all(|c| c.gate.eval(m).is_positive() && c.quad.eval(m).is_positive())
    }

    /// Tolerance-guarded membership of a float point.
    pub fn membership_f64(&self, m: &[f64], tol: f64) -> Membership {
        let mut boundary = false;
        let mut values: Vec<f64> = self.affine.iter().map(|f| f.eval_f64(m)).collect();
        for c in &self.conics {
            values.push(c.gate.eval_f64(m));
            values.push(c.quad.eval_f64(m));
        }
        for v in values {
            if v < -tol {
                return Membership::Out;
            }
            if v <= tol {
                boundary = true;
            }
        }
        if boundary {
            Membership::Boundary
        } else {
            Membership::In
        }
    }

    /// Pullback under the affine map m = A m' + b (exact).
    pub fn substitute(&self, a: &[Vec<Rat>], b: &[Rat]) -> ConvexRegion {
        ConvexRegion {
            dim: a[0].len(),
            affine: self.affine.iter().map(|f| f.substitute(a, b)).collect(),
            conics: self
                .conics
                .iter()
                .map(|c| ConicIneq { gate: c.gate.substitute(a, b), quad: c.quad.substitute(a, b) })
                .collect(),
            recession: self.recession.clone(),
        }
    }

    /// The scaled region t * R for rational t > 0.
    pub fn scaled(&self, t: &Rat) -> ConvexRegion {
        assert!(t.is_positive(), "scaling factor must be positive");
        ConvexRegion {
            dim: self.dim,
            affine: self.affine.iter().map(|f| f.scale_hom(t)).collect(),
            conics: self
                .conics
                .iter()
                .map(|c| ConicIneq { gate: c.gate.scale_hom(t), quad: c.quad.scale_hom(t) })
                .collect(),
            recession: self.recession.clone(),
        }
    }

    /// The translate R + s.
    pub fn translated(&self, s: &[Rat]) -> ConvexRegion {
        let n = self.dim;
        let a: Vec<Vec<Rat>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { rat_int(1) } else { Rat::zero() }).collect())
            .collect();
        let b: Vec<Rat> = s.iter().map(|x| -x).collect();
        let mut out = self.substitute(&a, &b);
        out.recession = self.recession.clone();
        out
    }

    /// Intersect an additional slice {forms = 0} into the region.
    pub fn with_equalities(&self, forms: &[AffineForm]) -> ConvexRegion {
        let mut out = self.clone();
        for f in forms {
            out.affine.push(f.clone());
            out.affine.push(AffineForm::new(
                f.coeffs.iter().map(|c| -c).collect(),
                -f.constant.clone(),
            ));
        }
        out
    }

    /// Exact vertices of the affine (polyhedral) part, lexicographically sorted.
    ///
    /// Brute-force over dim-subsets of the constraints; fine at desk scale
    /// (dim <= 4, a few dozen constraints).
    pub fn affine_vertices(&self) -> Vec<Vec<Rat>> {
        let n = self.dim;
        let mut all: Vec<&AffineForm> = self.affine.iter().collect();
        let gates: Vec<&AffineForm> = self.conics.iter().map(|c| &c.gate).collect();
        all.extend(gates);
        let k = all.len();
        if k < n {
            return Vec::new();
        }
        let mut verts: Vec<Vec<Rat>> = Vec::new();
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let rows: Vec<Vec<Rat>> = idx.iter().map(|&i| all[i].coeffs.clone()).collect();
            let rhs: Vec<Rat> = idx.iter().map(|&i| -all[i].constant.clone()).collect();
            if let Some(sol) = solve_rat(&rows, &rhs) {
                if all.iter().all(|f| !f.eval(&sol).is_negative()) && !verts.contains(&sol) {
                    verts.push(sol);
                }
            }
            // next combination
            let mut i = n;
            loop {
                if i == 0 {
                    verts.sort();
                    return verts;
                }
                i -= 1;
                if idx[i] != i + k - n {
                    idx[i] += 1;
                    for j in i + 1..n {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Vertices of the affine part that also satisfy every conic constraint.
    pub fn feasible_affine_vertices(&self) -> Vec<Vec<Rat>> {
        self.affine_vertices()
            .into_iter()
            .filter(|v| self.contains(v))
            .collect()
    }

    /// Exact emptiness for regions with at most one conic constraint.
    ///
    /// The affine part is scanned through its vertices; a single quadratic is
    /// handled by maximizing Q over the affine polytope (vertices, edge
    /// critica, interior critical point), which is exact in dimension 2.
    pub fn is_empty(&self) -> Result<bool> {
        let averts = self.affine_vertices();
        if averts.is_empty() {
            // Either empty or unbounded/degenerate; a bounded nonempty region
            // always has a vertex of its closure's affine system.
            return Ok(true);
        }
        if self.conics.is_empty() {
            return Ok(false);
        }
        if self.conics.len() == 1 && self.dim == 2 {
            let quad = &self.conics[0].quad;
            // Polytope of everything except the quadratic.
            let mut poly = self.clone();
            poly.conics.clear();
            poly.affine.push(self.conics[0].gate.clone());
            let (qmax, arg) = max_quad_over_polytope_2d(quad, &poly)?;
            if qmax.is_negative() {
                return Ok(true);
            }
            debug_assert!(self.contains(&arg));
            return Ok(false);
        }
        // Multiple conics: all-vertex check first, then a sampling fallback.
        if averts.iter().any(|v| self.contains(v)) {
            return Ok(false);
        }
        Err(Error::InvalidInput(
            "emptiness with multiple active conics is not certified".into(),
        ))
    }

    /// Per-coordinate exact bounds of the affine part (for lattice scans).
    pub fn affine_bounding_box(&self) -> Result<Vec<(Rat, Rat)>> {
        let verts = self.affine_vertices();
        if verts.is_empty() {
            return Err(Error::EmptyRegion);
        }
        // Unboundedness shows up as missing vertices only in degenerate ways;
        // callers pass bounded boxes. Conservatively detect via recession.
        let mut out = Vec::new();
        for k in 0..self.dim {
            let mut lo = verts[0][k].clone();
            let mut hi = verts[0][k].clone();
            for v in &verts {
                if v[k] < lo {
                    lo = v[k].clone();
                }
                if v[k] > hi {
                    hi = v[k].clone();
                }
            }
            out.push((lo, hi));
        }
        Ok(out)
    }

    /// All lattice points of the region (or its strict interior).
    pub fn lattice_points(
        &self,
        interior_only: bool,
        clip: Option<&[(i64, i64)]>,
    ) -> Result<Vec<Vec<i64>>> {
        let bounds: Vec<(i64, i64)> = match clip {
            Some(b) => b.to_vec(),
            None => {
                if self.recession.is_some() {
                    return Err(Error::UnboundedRegion);
                }
                self.affine_bounding_box()?
                    .iter()
                    .map(|(lo, hi)| (rat_to_f64(lo).floor() as i64, rat_to_f64(hi).ceil() as i64))
                    .collect()
            }
        };
        if self.dim == 2 {
            return Ok(self.lattice_points_columns(interior_only, &bounds));
        }
        let mut out = Vec::new();
        let mut cur: Vec<i64> = bounds.iter().map(|b| b.0).collect();
        'scan: loop {
            let point: Vec<Rat> = cur.iter().map(|&c| rat_int(c)).collect();
            let inside = if interior_only {
                self.contains_interior(&point)
            } else {
                self.contains(&point)
            };
            if inside {
                out.push(cur.clone());
            }
            for k in 0..bounds.len() {
                if cur[k] < bounds[k].1 {
                    cur[k] += 1;
                    continue 'scan;
                }
                cur[k] = bounds[k].0;
            }
            break;
        }
        out.sort();
        Ok(out)
    }

    /// Column scan exploiting per-column interval structure of a convex set:
    /// only the interval endpoints need exact membership tests, located by
    /// binary search from float seeds.
    fn lattice_points_columns(&self, interior_only: bool, bounds: &[(i64, i64)]) -> Vec<Vec<i64>> {
        let inside = |x: i64, y: i64| -> bool {
            let p = [rat_int(x), rat_int(y)];
            if interior_only {
                self.contains_interior(&p)
            } else {
                self.contains(&p)
            }
        };
        let mut out = Vec::new();
        for x in bounds[0].0..=bounds[0].1 {
            let xf = x as f64;
            // Breakpoints of the feasible y-interval in this column.
            let mut breaks: Vec<f64> = vec![bounds[1].0 as f64, bounds[1].1 as f64];
            let mut infeasible = false;
            for f in &self.affine {
                let a = rat_to_f64(&f.coeffs[1]);
                let rest = rat_to_f64(&f.coeffs[0]) * xf + rat_to_f64(&f.constant);
                if a.abs() > 1e-12 {
                    breaks.push(-rest / a);
                } else if rest < -1e-9 * (1.0 + xf.abs()) {
                    infeasible = true;
                }
            }
            if infeasible {
                continue;
            }
            for c in &self.conics {
                let a = rat_to_f64(&c.gate.coeffs[1]);
                let rest = rat_to_f64(&c.gate.coeffs[0]) * xf + rat_to_f64(&c.gate.constant);
                if a.abs() > 1e-12 {
                    breaks.push(-rest / a);
                }
                // Roots of Q(x, y) in y.
                let q2 = rat_to_f64(&c.quad.q[1][1]);
                let q01 = rat_to_f64(&c.quad.q[0][1]) + rat_to_f64(&c.quad.q[1][0]);
                let q1 = q01 * xf + rat_to_f64(&c.quad.lin[1]);
                let q0 = rat_to_f64(&c.quad.q[0][0]) * xf * xf
                    + rat_to_f64(&c.quad.lin[0]) * xf
                    + rat_to_f64(&c.quad.constant);
                if q2.abs() > 1e-14 {
                    let disc = q1 * q1 - 4.0 * q2 * q0;
                    if disc >= 0.0 {
                        let s = disc.sqrt();
                        breaks.push((-q1 + s) / (2.0 * q2));
                        breaks.push((-q1 - s) / (2.0 * q2));
                    }
                } else if q1.abs() > 1e-14 {
                    breaks.push(-q0 / q1);
                }
            }
            breaks.retain(|b| b.is_finite());
            breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
            // Seed candidates: rounded breakpoints (and neighbors) plus the
            // midpoints of consecutive breakpoint segments.
            let mut seeds: Vec<i64> = Vec::new();
            for b in &breaks {
                let r = b.round() as i64;
                seeds.extend([r - 1, r, r + 1]);
            }
            for w in breaks.windows(2) {
                seeds.push(((w[0] + w[1]) / 2.0).round() as i64);
            }
            seeds.retain(|&y| y >= bounds[1].0 && y <= bounds[1].1);
            seeds.sort_unstable();
            seeds.dedup();
            let Some(&seed) = seeds.iter().find(|&&y| inside(x, y)) else {
                continue;
            };
            // Binary search for the interval endpoints around the seed.
            let mut hi = seed;
            let mut hi_out = bounds[1].1 + 1;
            while hi_out - hi > 1 {
                let mid = hi + (hi_out - hi) / 2;
                if inside(x, mid) {
                    hi = mid;
                } else {
                    hi_out = mid;
                }
            }
            let mut lo = seed;
            let mut lo_out = bounds[1].0 - 1;
            while lo - lo_out > 1 {
                let mid = lo_out + (lo - lo_out) / 2;
                if inside(x, mid) {
                    lo = mid;
                } else {
                    lo_out = mid;
                }
            }
            for y in lo..=hi {
                out.push(vec![x, y]);
            }
        }
        out.sort();
        out
    }

    /// Replace degenerate conics that split into rational half-planes by those
    /// half-planes. Returns false if some conic stays genuinely quadratic.
    pub fn split_degenerate_conics(&mut self) -> bool {
        let mut remaining = Vec::new();
        let mut all_split = true;
        let conics = std::mem::take(&mut self.conics);
        for c in conics {
            let constant_quad = c.quad.q.iter().flatten().all(|x| x.is_zero())
                && c.quad.lin.iter().all(|x| x.is_zero());
            if constant_quad {
                self.affine.push(c.gate.clone());
                if c.quad.constant.is_negative() {
                    // Q < 0 identically: the region is empty.
                    self.affine.push(AffineForm::new(
                        vec![Rat::zero(); self.dim],
                        rat_int(-1),
                    ));
                }
                continue;
            }
            if let Some((f1, f2)) = c.quad.rational_line_factors_2d() {
                // Q >= 0 is the union of (f1>=0, f2>=0) and (f1<=0, f2<=0);
                // the gate picks the convex branch. Orient by a feasible
                // vertex of the gated affine system.
                let mut probe = self.clone();
                probe.conics.clear();
                probe.affine.push(c.gate.clone());
                let test_points = probe.affine_vertices();
                let branch_pos = test_points.iter().any(|p| {
                    !c.quad.eval(p).is_negative()
                        && !f1.eval(p).is_negative()
                        && !f2.eval(p).is_negative()
                });
                let branch_neg = test_points.iter().any(|p| {
                    !c.quad.eval(p).is_negative()
                        && !(-f1.eval(p)).is_negative()
                        && !(-f2.eval(p)).is_negative()
                });
                self.affine.push(c.gate.clone());
                match (branch_pos, branch_neg) {
                    (true, false) => {
                        self.affine.push(f1);
                        self.affine.push(f2);
                    }
                    (false, true) => {
                        self.affine.push(AffineForm::new(
                            f1.coeffs.iter().map(|x| -x).collect(),
                            -f1.constant,
                        ));
                        self.affine.push(AffineForm::new(
                            f2.coeffs.iter().map(|x| -x).collect(),
                            -f2.constant,
                        ));
                    }
                    _ => {
                        // Could not orient from vertices alone; keep the conic.
                        self.affine.pop();
                        remaining.push(c);
                        all_split = false;
                    }
                }
            } else {
                remaining.push(c);
                all_split = false;
            }
        }
        self.conics = remaining;
        all_split
    }
}

/// Exact maximum of a rational quadratic over a 2D polytope.
pub fn max_quad_over_polytope_2d(
    quad: &QuadForm,
    poly: &ConvexRegion,
) -> Result<(Rat, Vec<Rat>)> {
    let verts = poly.affine_vertices();
    if verts.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let mut best: Option<(Rat, Vec<Rat>)> = None;
    let mut consider = |val: Rat, at: Vec<Rat>| match &best {
        Some((b, _)) if *b >= val => {}
        _ => best = Some((val, at)),
    };
    for v in &verts {
        consider(quad.eval(v), v.clone());
    }
    // Interior critical point.
    let grad = quad.gradient();
    let rows: Vec<Vec<Rat>> = grad.iter().map(|g| g.coeffs.clone()).collect();
    let rhs: Vec<Rat> = grad.iter().map(|g| -g.constant.clone()).collect();
    if let Some(crit) = solve_rat(&rows, &rhs) {
        if poly.contains(&crit) {
            consider(quad.eval(&crit), crit);
        }
    }
    // Edge critica: restrict to segments between vertex pairs lying on a
    // common constraint line.
    for (i, a) in verts.iter().enumerate() {
        for b in verts.iter().skip(i + 1) {
            let on_common = poly
                .affine
                .iter()
                .any(|f| f.eval(a).is_zero() && f.eval(b).is_zero());
            if !on_common {
                continue;
            }
            // q(t) = quad(a + t (b - a)), t in [0, 1]
            let dir: Vec<Rat> = b.iter().zip(a).map(|(x, y)| x - y).collect();
            // coefficients: c2 t^2 + c1 t + c0 via evaluations at 0, 1, 1/2
            let q0 = quad.eval(a);
            let q1 = quad.eval(b);
            let mid: Vec<Rat> = a
                .iter()
                .zip(&dir)
                .map(|(x, d)| x + d * rat_int(1) / rat_int(2))
                .collect();
            let qh = quad.eval(&mid);
            let c2 = (&q0 + &q1 - &qh * rat_int(2)) * rat_int(2);
            let c1 = &q1 - &q0 - &c2;
            if !c2.is_zero() {
                let t = -&c1 / (&c2 * rat_int(2));
                if t.is_positive() && t < rat_int(1) {
                    let point: Vec<Rat> =
                        a.iter().zip(&dir).map(|(x, d)| x + d * &t).collect();
                    if poly.contains(&point) {
                        consider(quad.eval(&point), point);
                    }
                }
            }
        }
    }
    Ok(best.expect("at least one vertex considered"))
}
