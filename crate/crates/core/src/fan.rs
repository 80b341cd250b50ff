//! Smooth projective fans, piecewise-linear functions and their Cartier data,
//! subdivisions with unimodular smoothing, and pullback exponent matrices.

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::linalg::{det_int, pair_ii, pair_ri, primitive, IVec};
use crate::scalar::{rat_int, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// A fan in N given by its rays and the generator-index tuples of the
/// maximal cones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    pub n: usize,
    pub rays: Vec<IVec>,
    pub max_cones: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub smooth: bool,
    pub complete: Option<bool>,
    pub warnings: Vec<String>,
}

impl Fan {
    pub fn new(n: usize, rays: Vec<IVec>, max_cones: Vec<Vec<usize>>) -> Result<Self> {
        for r in &rays {
            if r.len() != n {
                return Err(Error::InvalidInput(format!("ray {r:?} has wrong dimension")));
            }
            if r.iter().all(|&x| x == 0) {
                return Err(Error::InvalidInput("zero ray".into()));
            }
            if !crate::linalg::is_primitive(r) {
                return Err(Error::InvalidInput(format!("ray {r:?} is not primitive")));
            }
        }
        for c in &max_cones {
            for &i in c {
                if i >= rays.len() {
                    return Err(Error::InvalidInput(format!("cone index {i} out of range")));
                }
            }
        }
        Ok(Fan { n, rays, max_cones })
    }

    pub fn cone(&self, sigma: usize) -> Result<Cone> {
        let idx = self
            .max_cones
            .get(sigma)
            .ok_or_else(|| Error::InvalidInput(format!("no maximal cone {sigma}")))?;
        Cone::new(idx.iter().map(|&i| self.rays[i].clone()).collect(), self.n)
    }

    /// Generators of a maximal cone, in the listed order.
    pub fn generators(&self, sigma: usize) -> Vec<IVec> {
        self.max_cones[sigma].iter().map(|&i| self.rays[i].clone()).collect()
    }

    /// Check smoothness of every maximal cone and (for n = 2) completeness.
    pub fn validate(&self) -> Result<ValidationReport> {
        let mut warnings = Vec::new();
        for (k, idx) in self.max_cones.iter().enumerate() {
            if idx.len() != self.n {
                return Err(Error::NotFullDimensional { got: idx.len(), rank: self.n });
            }
            let gens: Vec<IVec> = idx.iter().map(|&i| self.rays[i].clone()).collect();
            let det = det_int(&gens);
            if det.abs() != BigInt::one() {
                return Err(Error::NonSmoothCone { det: format!("{det} (cone {k})") });
            }
        }
        let complete = if self.n == 2 {
            self.check_complete_2d()?;
            Some(true)
        } else {
            warnings.push(format!(
                "projectivity is not certified for fiber rank {}; accepted on user assertion",
                self.n
            ));
            None
        };
        Ok(ValidationReport { smooth: true, complete, warnings })
    }

    /// For n = 2: rays sorted by angle must chain consecutive maximal cones
    /// covering the full circle.
    fn check_complete_2d(&self) -> Result<()> {
        let k = self.rays.len();
        if k < 3 {
            return Err(Error::IncompleteFan(vec![]));
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| angle_cmp(&self.rays[a], &self.rays[b]));
        for w in 0..k {
            let i = order[w];
            let j = order[(w + 1) % k];
            // Consecutive rays must span a positively oriented basis and be
            // a maximal cone of the fan.
            let det = det_int(&[self.rays[i].clone(), self.rays[j].clone()]);
            if !det.is_positive() {
                return Err(Error::IncompleteFan(self.rays[i].clone()));
            }
            let found = self.max_cones.iter().any(|c| {
                (c[0] == i && c[1] == j) || (c[0] == j && c[1] == i)
            });
            if !found {
                return Err(Error::IncompleteFan(self.rays[i].clone()));
            }
        }
        if self.max_cones.len() != k {
            return Err(Error::IncompleteFan(vec![]));
        }
        Ok(())
    }

    /// The maximal cone containing the point w, ties broken by smallest id.
    pub fn locate(&self, w: &[Rat]) -> Result<usize> {
        for (k, _) in self.max_cones.iter().enumerate() {
            let cone = self.cone(k)?;
            if cone.contains(w)? {
                return Ok(k);
            }
        }
        Err(Error::IncompleteFan(vec![]))
    }
}

/// Angular comparison of 2D lattice vectors (counterclockwise from +x axis).
fn angle_cmp(a: &[i64], b: &[i64]) -> std::cmp::Ordering {
    let half = |v: &[i64]| -> u8 {
        // 0: angle in [0, pi), 1: in [pi, 2pi)
        if v[1] > 0 || (v[1] == 0 && v[0] > 0) {
            0
        } else {
            1
        }
    };
    let (ha, hb) = (half(a), half(b));
    if ha != hb {
        return ha.cmp(&hb);
    }
    // Same half-plane: a precedes b iff the cross product is positive.
    let cross = a[0] * b[1] - a[1] * b[0];
    0.cmp(&cross)
}

/// Piecewise-linear function given by its values on the rays.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlFunction {
    pub values: Vec<i64>,
}

impl PlFunction {
    pub fn zero(fan: &Fan) -> Self {
        PlFunction { values: vec![0; fan.rays.len()] }
    }

    pub fn value_on_ray(&self, ray: usize) -> i64 {
        self.values[ray]
    }
}

/// The Cartier data {m_sigma}: the linear form agreeing with h on each
/// maximal cone. Also checks consistency across shared rays.
pub fn cartier_data(fan: &Fan, h: &PlFunction) -> Result<Vec<IVec>> {
    if h.values.len() != fan.rays.len() {
        return Err(Error::InvalidInput("h must assign a value to every ray".into()));
    }
    let mut out = Vec::with_capacity(fan.max_cones.len());
    for (k, idx) in fan.max_cones.iter().enumerate() {
        let gens: Vec<Vec<Rat>> = idx
            .iter()
            .map(|&i| fan.rays[i].iter().map(|&x| rat_int(x)).collect())
            .collect();
        let rhs: Vec<Rat> = idx.iter().map(|&i| rat_int(h.values[i])).collect();
        let sol = crate::linalg::solve_rat(&gens, &rhs)
            .ok_or_else(|| Error::NonSmoothCone { det: format!("0 (cone {k})") })?;
        let m: IVec = sol
            .iter()
            .map(|x| {
                if x.is_integer() {
                    Ok(i64::try_from(x.to_integer()).map_err(|_| {
                        Error::InvalidInput("Cartier datum overflows i64".into())
                    })?)
                } else {
                    Err(Error::InvalidInput(format!(
                        "h is not integral-linear on cone {k}"
                    )))
                }
            })
            .collect::<Result<_>>()?;
        out.push(m);
    }
    // Consistency on shared rays.
    for (k1, c1) in fan.max_cones.iter().enumerate() {
        for (k2, c2) in fan.max_cones.iter().enumerate().skip(k1 + 1) {
            for &r in c1 {
                if c2.contains(&r) {
                    let p1 = pair_ii(&out[k1], &fan.rays[r]);
                    let p2 = pair_ii(&out[k2], &fan.rays[r]);
                    if p1 != p2 {
                        return Err(Error::InconsistentCartierData(k1, k2));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Subdivide a smooth complete 2D fan by hyperplanes and re-smooth.
///
/// Every output cone lies in a single input cone and on one side of each
/// hyperplane; non-unimodular pieces are resolved by continued-fraction ray
/// insertion.
pub fn subdivide(fan: &Fan, hyperplane_normals: &[Vec<Rat>]) -> Result<Fan> {
    if fan.n != 2 {
        return Err(Error::UnsupportedDimension(fan.n));
    }
    fan.validate()?;
    let mut new_cones: Vec<Vec<IVec>> = Vec::new();
    for k in 0..fan.max_cones.len() {
        let mut gens = fan.generators(k);
        if det_int(&gens).is_negative() {
            gens.swap(0, 1);
        }
        let mut pieces = vec![gens];
        for normal in hyperplane_normals {
            let mut next = Vec::new();
            for piece in pieces {
                next.extend(split_cone_2d(&piece, normal));
            }
            pieces = next;
        }
        for piece in pieces {
            for pair in smooth_chain_2d(&piece)?.windows(2) {
                new_cones.push(vec![pair[0].clone(), pair[1].clone()]);
            }
        }
    }
    // Collect rays, deduplicated, and index the cones.
    let mut rays: Vec<IVec> = Vec::new();
    let mut cones_idx: Vec<Vec<usize>> = Vec::new();
    for cone in &new_cones {
        let idx: Vec<usize> = cone
            .iter()
            .map(|g| {
                if let Some(i) = rays.iter().position(|r| r == g) {
                    i
                } else {
                    rays.push(g.clone());
                    rays.len() - 1
                }
            })
            .collect();
        cones_idx.push(idx);
    }
    Fan::new(2, rays, cones_idx)
}

/// Split one 2D cone by the hyperplane {normal . w = 0}; returns one or two
/// cones whose union is the input.
fn split_cone_2d(gens: &[IVec], normal: &[Rat]) -> Vec<Vec<IVec>> {
    let s0 = pair_ri(normal, &gens[0]);
    let s1 = pair_ri(normal, &gens[1]);
    let sign = |r: &Rat| -> i32 {
        if r.is_zero() {
            0
        } else if r.is_positive() {
            1
        } else {
            -1
        }
    };
    if sign(&s0) * sign(&s1) >= 0 {
        // Entirely on one closed side.
        return vec![gens.to_vec()];
    }
    // The cut ray |s1| g0 + |s0| g1 lies on the hyperplane and inside the cone.
    let num0 = s1.abs();
    let num1 = s0.abs();
    // Clear denominators to integers.
    let d0 = num0.denom().clone();
    let d1 = num1.denom().clone();
    let lcm = &d0 * (&d1 / gcd_big(&d0, &d1));
    let c0 = (num0 * Rat::from_integer(lcm.clone())).to_integer();
    let c1 = (num1 * Rat::from_integer(lcm)).to_integer();
    let ray: IVec = (0..2)
        .map(|i| {
            let v = &c0 * BigInt::from(gens[0][i]) + &c1 * BigInt::from(gens[1][i]);
            i64::try_from(v).expect("cut ray fits i64")
        })
        .collect();
    let ray = primitive(&ray);
    vec![vec![gens[0].clone(), ray.clone()], vec![ray, gens[1].clone()]]
}

fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.abs(), b.abs());
    while !b.is_zero() {
        let t = &a % &b;
        a = b;
        b = t;
    }
    a
}

/// Smooth (unimodular) chain of rays resolving the 2D cone spanned by the
/// endpoints: repeated insertion of the lattice-adjacent ray, the
/// continued-fraction resolution.
pub fn smooth_chain_2d(gens: &[IVec]) -> Result<Vec<IVec>> {
    let (p, q) = (primitive(&gens[0]), primitive(&gens[1]));
    let d = det_int(&[p.clone(), q.clone()]);
    if d.is_negative() {
        return Err(Error::InvalidInput("cone generators must be positively oriented".into()));
    }
    if d.is_zero() {
        return Err(Error::NotFullDimensional { got: 1, rank: 2 });
    }
    let mut chain = vec![p.clone()];
    smooth_rec(&p, &q, &mut chain)?;
    chain.push(q);
    Ok(chain)
}

fn smooth_rec(p: &IVec, q: &IVec, chain: &mut Vec<IVec>) -> Result<()> {
    let d_big = det_int(&[p.clone(), q.clone()]);
    let d = i64::try_from(d_big).map_err(|_| Error::InvalidInput("determinant overflow".into()))?;
    if d == 1 {
        return Ok(());
    }
    // Unique a in [1, d) with q + a p divisible by d componentwise; the
    // inserted ray w = (q + a p)/d satisfies det(p, w) = 1, det(w, q) = a < d.
    let mut found = None;
    for a in 1..d {
        if (q[0] + a * p[0]) % d == 0 && (q[1] + a * p[1]) % d == 0 {
            found = Some(a);
            break;
        }
    }
    let a = found.ok_or_else(|| {
        Error::InvalidInput("no adjacent lattice ray found; generators not primitive?".into())
    })?;
    let w: IVec = vec![(q[0] + a * p[0]) / d, (q[1] + a * p[1]) / d];
    debug_assert_eq!(det_int(&[p.clone(), w.clone()]), BigInt::one());
    chain.push(w.clone());
    smooth_rec(&w, q, chain)
}

/// The exponent matrix (<v^j, w_k>)_{j,k} translating coordinates of the
/// chart of `outer` to those of the chart of `inner` (inner inside outer
/// for subdivision pullbacks; arbitrary smooth charts for torus transitions).
pub fn pullback_matrix(outer: &Cone, inner: &Cone) -> Result<Vec<Vec<i64>>> {
    let duals = outer.dual_basis()?;
    Ok(duals
        .iter()
        .map(|vj| inner.generators().iter().map(|wk| pair_ii(vj, wk)).collect())
        .collect())
}
