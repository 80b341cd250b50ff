//! Convex-geometric toolkit for minimal singular metrics on toric bundles
//! over abelian surfaces.
//!
//! A big line bundle on such a total space is governed by a compact convex
//! body: the set of dominating linear forms whose twisted base class stays
//! nef. This crate computes that body in exact rational (or Q(sqrt3))
//! arithmetic, evaluates the induced envelope weights, and derives the
//! positivity invariants: Lelong and Kiselman numbers, non-nef loci,
//! divisorial negative parts, multiplier-ideal generators, jumping numbers
//! and log-canonical thresholds.

pub mod bundle;
pub mod cone;
pub mod envelope;
pub mod error;
pub mod ext;
pub mod fan;
pub mod fixtures;
pub mod hull;
pub mod linalg;
pub mod mult_ideal;
pub mod opt;
pub mod par;
pub mod positivity;
pub mod region;
pub mod scalar;
pub mod torus;

pub use bundle::{Bigness, BundleProblem, Chart, ChartPoint};
pub use error::{Error, Result};
pub use scalar::{Rat, Scalar};
