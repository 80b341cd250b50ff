//! The three reference bundles over E x E, all on the projectivized
//! split-rank-three fan with h = -1 on the ray v0 = -(e1+e2).
//!
//! Twist classes are stored through their Lorentz-basis data, which is where
//! each family is rational; the Nakayama family carries sqrt(3) divisor
//! coordinates and is entered directly in the Lorentz basis.

use crate::bundle::BundleProblem;
use crate::error::{Error, Result};
use crate::fan::{Fan, PlFunction};
use crate::torus::{NsClass, TorusBase};

/// The fan of the projectivized split rank-three bundle: rays
/// v0 = -(e1+e2), v1 = e1, v2 = e2 and the three spanned cones.
pub fn projective_plane_fan() -> Fan {
    Fan::new(
        2,
        vec![vec![-1, -1], vec![1, 0], vec![0, 1]],
        vec![vec![1, 2], vec![2, 0], vec![0, 1]],
    )
    .expect("reference fan is well formed")
}

fn assemble(l0: NsClass, l1: NsClass, l2: NsClass) -> Result<BundleProblem> {
    let fan = projective_plane_fan();
    let h = PlFunction { values: vec![-1, 0, 0] };
    let problem = BundleProblem {
        base: TorusBase::ExE,
        fan,
        l_hom: vec![l1.sub(&l0), l2.sub(&l0)],
        l0,
        h,
    };
    problem.validate()?;
    Ok(problem)
}

/// The bundle admitting no Zariski decomposition even after modifications.
///
/// Lorentz data: c1(L0) = -6(l1 + l2), c1(L1) = 6(-l1 + a l3),
/// c1(L2) = 6(-l2 + a l3); the nef box is cut by the irrational conic
/// a^2 (alpha + beta)^2 = (1 - alpha)^2 + (1 - beta)^2.
pub fn nakayama(a: i64) -> Result<BundleProblem> {
    if a <= 1 {
        return Err(Error::InvalidInput("parameter a must exceed 1".into()));
    }
    assemble(
        NsClass::from_l_int(-6, -6, 0),
        NsClass::from_l_int(-6, 0, 6 * a),
        NsClass::from_l_int(0, -6, 6 * a),
    )
}

/// The rational-polyhedral family: L0 = -u(F1+F2+Delta),
/// L1 = (u+v)(F1+F2) + (v-2u) Delta, L2 = (v-u)(F1+F2) + (2u+v) Delta.
pub fn ex62(u: i64, v: i64) -> Result<BundleProblem> {
    if u <= 0 || v <= u {
        return Err(Error::InvalidInput("parameters must satisfy 0 < u < v".into()));
    }
    assemble(
        NsClass::from_f_int(-u, -u, -u),
        NsClass::from_f_int(u + v, u + v, -2 * u + v),
        NsClass::from_f_int(-u + v, -u + v, 2 * u + v),
    )
}

/// The polyhedral-but-irrational example: L0 = 4F1 + 4F2 + Delta,
/// L1 = O, L2 = -F1 + 9F2 + Delta.
pub fn ex65() -> Result<BundleProblem> {
    assemble(
        NsClass::from_f_int(4, 4, 1),
        NsClass::from_f_int(0, 0, 0),
        NsClass::from_f_int(-1, 9, 1),
    )
}

/// Friendly names of the invariant strata on the reference fan: the apex of
/// each chart is a projectivized summand, each ray gives a divisor.
pub fn stratum_name(fan: &Fan, ray_ids: &[usize]) -> String {
    let reference = projective_plane_fan();
    if fan == &reference {
        match ray_ids {
            [1, 2] | [2, 1] => return "P(L0)".into(),
            [2, 0] | [0, 2] => return "P(L1)".into(),
            [0, 1] | [1, 0] => return "P(L2)".into(),
            [j] => return format!("Gamma_v{j}"),
            _ => {}
        }
    }
    if ray_ids.len() == 1 {
        format!("Gamma_v{}", ray_ids[0])
    } else {
        format!("V(cone{{{}}})", ray_ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
    }
}
