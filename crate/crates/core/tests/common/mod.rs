//! Shared oracles for the integration suites. These deliberately avoid the
//! code paths they are used to check: closure membership is decided from the
//! universally-quantified definition via fan subdivision, and integrability
//! is decided by numerical quadrature over log-radii.

use boxnef::bundle::BundleProblem;
use boxnef::cone::Cone;
use boxnef::fan::{subdivide, Fan};
use boxnef::linalg::pair_ri;
use boxnef::opt;
use boxnef::scalar::{rat_int, Rat, Scalar};
use num_traits::{Signed, Zero};

/// Membership in the double-overline closure of A inside sigma-dual, decided
/// from the definition: min over A must dominate from below on every
/// subdivision cone obtained by cutting along the pairwise-difference
/// hyperplanes.
pub fn definitional_closure_contains(points: &[Vec<Rat>], sigma: &Cone, m: &[Rat]) -> bool {
    for g in sigma.generators() {
        if pair_ri(m, g).is_negative() {
            return false;
        }
    }
    if points.is_empty() {
        return true;
    }
    // Hyperplane normals m_i - m_j.
    let mut normals: Vec<Vec<Rat>> = Vec::new();
    for (i, a) in points.iter().enumerate() {
        for b in points.iter().skip(i + 1) {
            let n: Vec<Rat> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            if n.iter().any(|c| !c.is_zero()) {
                normals.push(n);
            }
        }
    }
    // Complete ambient fan containing sigma as a union of cones: cut the
    // four-quadrant fan by sigma's boundary rays as well.
    let ambient = Fan::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
    .unwrap();
    let mut cuts = normals.clone();
    for g in sigma.generators() {
        // Hyperplane through the generator direction.
        cuts.push(vec![rat_int(-g[1]), rat_int(g[0])]);
    }
    let sub = subdivide(&ambient, &cuts).expect("subdivision of the ambient fan");
    for cone_idx in &sub.max_cones {
        let gens: Vec<Vec<i64>> = cone_idx.iter().map(|&i| sub.rays[i].clone()).collect();
        // Keep only subcones inside sigma.
        let inside = gens.iter().all(|g| {
            let gr: Vec<Rat> = g.iter().map(|&x| rat_int(x)).collect();
            sigma.coefficients(&gr).map(|c| c.iter().all(|x| !x.is_negative())).unwrap_or(false)
        });
        if !inside {
            continue;
        }
        // The minimizer over A on this subcone, found at an interior point.
        let interior: Vec<Rat> = (0..2)
            .map(|k| rat_int(gens[0][k]) + rat_int(gens[1][k]))
            .collect();
        let argmin = points
            .iter()
            .min_by(|a, b| pair_val(a, &interior).cmp(&pair_val(b, &interior)))
            .unwrap();
        // Domination must hold on the generators of the subcone.
        for g in &gens {
            let gr: Vec<Rat> = g.iter().map(|&x| rat_int(x)).collect();
            let lhs = pair_val(argmin, &gr);
            let rhs = pair_val(m, &gr);
            if rhs < lhs {
                return false;
            }
        }
    }
    true
}

fn pair_val(a: &[Rat], w: &[Rat]) -> Rat {
    a.iter().zip(w).map(|(x, y)| x * y).sum()
}

/// Envelope weight as a function of log-radii u_j = -log |x_j| at z = 0,
/// assembled directly so that huge radii never underflow. The support
/// maximization is specialized to float candidates precomputed from the nef
/// box: feasible vertices and arc-edge points are objective-independent,
/// tangency points are solved per direction.
pub struct LogRadiusEnvelope {
    static_candidates: Vec<[f64; 2]>,
    affine_f64: Vec<[f64; 3]>,
    conics_f64: Vec<ConicF64>,
    gens: Vec<Vec<i64>>,
    shifts: Vec<i64>,
}

struct ConicF64 {
    q: [[f64; 2]; 2],
    lin: [f64; 2],
    c0: f64,
    gate: [f64; 3],
}

impl LogRadiusEnvelope {
    pub fn new(problem: &BundleProblem, sigma: usize) -> Self {
        use boxnef::scalar::rat_to_f64;
        let chart = problem.chart(sigma).unwrap();
        let shifts = chart
            .gens
            .iter()
            .map(|v| chart.m_sigma.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect();
        let region = problem.box_nef().unwrap();
        let mut static_candidates: Vec<[f64; 2]> = region
            .feasible_affine_vertices()
            .iter()
            .map(|v| [rat_to_f64(&v[0]), rat_to_f64(&v[1])])
            .collect();
        let mut affine_f64: Vec<[f64; 3]> = region
            .affine
            .iter()
            .map(|f| [rat_to_f64(&f.coeffs[0]), rat_to_f64(&f.coeffs[1]), rat_to_f64(&f.constant)])
            .collect();
        let mut conics_f64 = Vec::new();
        for c in &region.conics {
            let gate = [
                rat_to_f64(&c.gate.coeffs[0]),
                rat_to_f64(&c.gate.coeffs[1]),
                rat_to_f64(&c.gate.constant),
            ];
            affine_f64.push(gate);
            conics_f64.push(ConicF64 {
                q: [
                    [rat_to_f64(&c.quad.q[0][0]), rat_to_f64(&c.quad.q[0][1])],
                    [rat_to_f64(&c.quad.q[1][0]), rat_to_f64(&c.quad.q[1][1])],
                ],
                lin: [rat_to_f64(&c.quad.lin[0]), rat_to_f64(&c.quad.lin[1])],
                c0: rat_to_f64(&c.quad.constant),
                gate,
            });
        }
        // Arc-edge intersections are objective-independent candidates.
        let mut extra = Vec::new();
        for c in &conics_f64 {
            for line in &affine_f64 {
                let norm2 = line[0] * line[0] + line[1] * line[1];
                if norm2 < 1e-24 {
                    continue;
                }
                let base = [-line[2] * line[0] / norm2, -line[2] * line[1] / norm2];
                let dir = [-line[1], line[0]];
                for t in c.roots_on_line(base, dir) {
                    extra.push([base[0] + t * dir[0], base[1] + t * dir[1]]);
                }
            }
        }
        static_candidates.extend(extra);
        let me = LogRadiusEnvelope {
            static_candidates,
            affine_f64,
            conics_f64,
            gens: chart.gens.clone(),
            shifts,
        };
        let kept: Vec<[f64; 2]> = me
            .static_candidates
            .iter()
            .copied()
            .filter(|p| me.feasible(p))
            .collect();
        LogRadiusEnvelope { static_candidates: kept, ..me }
    }

    fn feasible(&self, p: &[f64; 2]) -> bool {
        let tol = 1e-7;
        self.affine_f64.iter().all(|f| f[0] * p[0] + f[1] * p[1] + f[2] >= -tol)
            && self.conics_f64.iter().all(|c| c.eval(p) >= -tol * (1.0 + c.c0.abs()))
    }

    /// max of <d, m> over the nef box.
    fn support_max(&self, d: [f64; 2]) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for p in &self.static_candidates {
            best = best.max(d[0] * p[0] + d[1] * p[1]);
        }
        for c in &self.conics_f64 {
            for p in c.tangency(d) {
                if self.feasible(&p) {
                    best = best.max(d[0] * p[0] + d[1] * p[1]);
                }
            }
        }
        best
    }

    pub fn psi(&self, u: &[f64]) -> f64 {
        let n = self.gens[0].len();
        let mut coeffs = [0.0; 2];
        let mut constant = 0.0;
        for (j, uj) in u.iter().enumerate() {
            for (k, c) in coeffs.iter_mut().enumerate().take(n) {
                *c += -2.0 * uj * self.gens[j][k] as f64;
            }
            constant += 2.0 * uj * self.shifts[j] as f64;
        }
        self.support_max(coeffs) + constant
    }
}

impl ConicF64 {
    fn eval(&self, p: &[f64; 2]) -> f64 {
        let _ = self.gate;
        self.q[0][0] * p[0] * p[0]
            + (self.q[0][1] + self.q[1][0]) * p[0] * p[1]
            + self.q[1][1] * p[1] * p[1]
            + self.lin[0] * p[0]
            + self.lin[1] * p[1]
            + self.c0
    }

    fn roots_on_line(&self, base: [f64; 2], dir: [f64; 2]) -> Vec<f64> {
        let at = |t: f64| {
            let p = [base[0] + t * dir[0], base[1] + t * dir[1]];
            self.q[0][0] * p[0] * p[0]
                + (self.q[0][1] + self.q[1][0]) * p[0] * p[1]
                + self.q[1][1] * p[1] * p[1]
                + self.lin[0] * p[0]
                + self.lin[1] * p[1]
                + self.c0
        };
        let (q0, q1, qm1) = (at(0.0), at(1.0), at(-1.0));
        let c2 = (q1 + qm1) / 2.0 - q0;
        let c1 = (q1 - qm1) / 2.0;
        if c2.abs() < 1e-14 * (1.0 + c1.abs() + q0.abs()) {
            if c1.abs() < 1e-14 {
                return vec![];
            }
            return vec![-q0 / c1];
        }
        let disc = c1 * c1 - 4.0 * c2 * q0;
        if disc < 0.0 {
            return vec![];
        }
        let s = disc.sqrt();
        vec![(-c1 + s) / (2.0 * c2), (-c1 - s) / (2.0 * c2)]
    }

    /// Points on Q = 0 where the gradient is parallel to d.
    fn tangency(&self, d: [f64; 2]) -> Vec<[f64; 2]> {
        // grad = 2 Q m + lin; parallel condition is one affine line.
        let g = [
            [self.q[0][0] + self.q[0][0], self.q[0][1] + self.q[1][0]],
            [self.q[0][1] + self.q[1][0], self.q[1][1] + self.q[1][1]],
        ];
        let ln = [
            g[0][0] * d[1] - g[1][0] * d[0],
            g[0][1] * d[1] - g[1][1] * d[0],
        ];
        let lc = self.lin[0] * d[1] - self.lin[1] * d[0];
        let norm2 = ln[0] * ln[0] + ln[1] * ln[1];
        if norm2 < 1e-24 {
            return vec![];
        }
        let base = [-lc * ln[0] / norm2, -lc * ln[1] / norm2];
        let dir = [-ln[1], ln[0]];
        self.roots_on_line(base, dir)
            .into_iter()
            .map(|t| [base[0] + t * dir[0], base[1] + t * dir[1]])
            .collect()
    }
}

pub fn psi_of_log_radii(problem: &BundleProblem, sigma: usize, u: &[f64]) -> f64 {
    LogRadiusEnvelope::new(problem, sigma).psi(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Integrability {
    Convergent,
    Divergent,
}

/// Quadrature verdict on local integrability of |x^p|^2 e^{-t psi} around the
/// chart apex: polar quadrature over log-radii with doubling cutoff, plus an
/// asymptotic radial-slope cross-check. Panics when the two disagree or the
/// margin is too thin to classify.
pub fn quadrature_integrability(
    envelope: &LogRadiusEnvelope,
    exponents: &[i64],
    t: f64,
) -> Integrability {
    let log_integrand = |u: &[f64]| -> f64 {
        let mut l = 0.0;
        for (j, uj) in u.iter().enumerate() {
            l -= (2 * exponents[j] + 2) as f64 * uj;
        }
        l - t * envelope.psi(u)
    };
    // Along every ray the log-integrand is linear (at z = 0 the twist weight
    // contributes nothing, so the envelope objective scales with the radius);
    // measure the worst radial slope first, then quadrate out to a cutoff
    // sized by that slope.
    let mut max_slope = f64::NEG_INFINITY;
    let mut worst_theta = 0.0;
    for it in 0..=192 {
        let th = std::f64::consts::FRAC_PI_2 * it as f64 / 192.0;
        let dir = [th.cos(), th.sin()];
        let l8 = log_integrand(&[8.0 * dir[0], 8.0 * dir[1]]);
        let l16 = log_integrand(&[16.0 * dir[0], 16.0 * dir[1]]);
        let l32 = log_integrand(&[32.0 * dir[0], 32.0 * dir[1]]);
        let slope = (l16 - l8) / 8.0;
        assert!(
            (l32 - l16 - 16.0 * slope).abs() < 1e-6 * (1.0 + l32.abs()),
            "log-integrand not radially linear"
        );
        if slope > max_slope {
            max_slope = slope;
            worst_theta = th;
        }
    }
    assert!(
        max_slope.abs() > 1e-7,
        "integrability margin too thin to classify (slope {max_slope})"
    );
    let by_slope = if max_slope > 0.0 {
        Integrability::Divergent
    } else {
        Integrability::Convergent
    };
    // Quadrature over the sector around the worst direction: its mass trend
    // decides divergence of the whole integral (the integrand is positive).
    let n_theta = 8;
    let n_r = 128;
    let half_width = std::f64::consts::FRAC_PI_2 / 48.0;
    let (th_lo, th_hi) = (
        (worst_theta - half_width).max(0.0),
        (worst_theta + half_width).min(std::f64::consts::FRAC_PI_2),
    );
    let radial = |r_max: f64| -> f64 {
        let mut total = 0.0;
        for it in 0..=n_theta {
            let th = th_lo + (th_hi - th_lo) * it as f64 / n_theta as f64;
            let dir = [th.cos(), th.sin()];
            let mut inner = 0.0;
            for ir in 0..=n_r {
                let r = r_max * ir as f64 / n_r as f64;
                let u = [r * dir[0], r * dir[1]];
                let w = if ir == 0 || ir == n_r { 0.5 } else { 1.0 };
                inner += w * (log_integrand(&u)).exp().min(1e280) * r;
            }
            let wt = if it == 0 || it == n_theta { 0.5 } else { 1.0 };
            total += wt * inner * (r_max / n_r as f64);
        }
        total * ((th_hi - th_lo) / n_theta as f64)
    };
    let r_max = (30.0 / max_slope.abs()).clamp(48.0, 1e6);
    let f1 = radial(r_max);
    let f2 = radial(2.0 * r_max);
    let by_mass = if f2 > f1 * 1.5 || !f2.is_finite() {
        Integrability::Divergent
    } else {
        Integrability::Convergent
    };
    assert_eq!(by_mass, by_slope, "quadrature mass trend disagrees with radial slope");
    by_slope
}
