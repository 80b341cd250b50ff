//! Rational polyhedral cones with N-minimal (unimodular) generator sets.

use crate::error::{Error, Result};
use crate::linalg::{det_int, inverse_unimodular, is_primitive, pair_ri, IVec};
use crate::scalar::Rat;
use num_bigint::BigInt;
use num_traits::{One, Signed};

/// A cone spanned by primitive lattice generators.
///
/// Full-dimensional cones used for charts must be smooth: the generators
/// form a Z-basis of N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cone {
    generators: Vec<IVec>,
    rank: usize,
}

impl Cone {
    pub fn new(generators: Vec<IVec>, rank: usize) -> Result<Self> {
        for g in &generators {
            if g.len() != rank {
                return Err(Error::InvalidInput(format!(
                    "generator {g:?} has length {} in rank {rank}",
                    g.len()
                )));
            }
            if !is_primitive(g) {
                return Err(Error::InvalidInput(format!("generator {g:?} is not primitive")));
            }
        }
        Ok(Cone { generators, rank })
    }

    pub fn generators(&self) -> &[IVec] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.generators.len() == self.rank
    }

    /// Smooth means the generators extend to (here: form) a Z-basis.
    pub fn is_smooth(&self) -> bool {
        if !self.is_full_dimensional() {
            // Lower-dimensional cones: accepted if generators are part of a basis.
            // Only rays occur in practice; a primitive ray is always smooth.
            return self.generators.len() <= 1;
        }
        det_int(&self.generators).abs() == BigInt::one()
    }

    fn require_smooth_full(&self) -> Result<()> {
        if !self.is_full_dimensional() {
            return Err(Error::NotFullDimensional { got: self.generators.len(), rank: self.rank });
        }
        let det = det_int(&self.generators);
        if det.abs() != BigInt::one() {
            return Err(Error::NonSmoothCone { det: det.to_string() });
        }
        Ok(())
    }

    /// Dual basis v^1, ..., v^n of the generators: <v^i, v_j> = delta_ij.
    pub fn dual_basis(&self) -> Result<Vec<IVec>> {
        self.require_smooth_full()?;
        // Rows of the inverse of the matrix whose columns are the generators,
        // i.e. columns of the inverse of the generator-row matrix.
        let inv = inverse_unimodular(&self.generators)?;
        let n = self.rank;
        Ok((0..n).map(|i| (0..n).map(|j| inv[j][i]).collect()).collect())
    }

    /// The dual cone of a smooth full cone, generated by the dual basis.
    pub fn dual_cone(&self) -> Result<Cone> {
        let duals = self.dual_basis()?;
        Cone::new(duals, self.rank)
    }

    /// Exact coefficients of `w` in the generator basis (smooth full cones).
    pub fn coefficients(&self, w: &[Rat]) -> Result<Vec<Rat>> {
        let duals = self.dual_basis()?;
        Ok(duals.iter().map(|d| pair_ri(w, d)).collect())
    }

    /// Exact membership for smooth full cones.
    pub fn contains(&self, w: &[Rat]) -> Result<bool> {
        Ok(self.coefficients(w)?.iter().all(|c| !c.is_negative()))
    }
}
