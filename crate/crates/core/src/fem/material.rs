//! Constant-Poisson-ratio viscoelasticity: every stress contribution is a
//! shear modulus times the same unit-modulus isotropic tensor.

use crate::chain::StepCoefficients;

use super::FemError;

/// Isotropic stiffness with unit shear modulus, Voigt order
/// `xx, yy, zz, yz, xz, xy` acting on engineering shear strains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DnuTensor {
    poisson: f64,
    matrix: [[f64; 6]; 6],
}

impl DnuTensor {
    pub fn new(poisson: f64) -> Result<Self, FemError> {
        if !(poisson > 0.0 && poisson < 0.5) {
            return Err(FemError::InvalidPoisson(poisson));
        }
        let lambda = 2.0 * poisson / (1.0 - 2.0 * poisson);
        let mut matrix = [[0.0; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                matrix[i][j] = lambda;
            }
            matrix[i][i] += 2.0;
            matrix[i + 3][i + 3] = 1.0;
        }
        Ok(Self { poisson, matrix })
    }

    pub fn poisson(&self) -> f64 {
        self.poisson
    }

    /// Lamé's first parameter divided by the shear modulus.
    pub fn lambda_ratio(&self) -> f64 {
        self.matrix[0][1]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[i][j]
    }

    pub fn apply(&self, strain: &[f64; 6]) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (o, row) in out.iter_mut().zip(&self.matrix) {
            *o = row.iter().zip(strain).map(|(a, b)| a * b).sum();
        }
        out
    }
}

/// Advances the cell stresses of one Gauss point over a step, component by
/// component with the scalar cell-force update.
///
/// `projected_rate` is `D (B v_i)` and `projected_accel_sum` is
/// `D (B (a_i + a_{i+1}))`.
pub fn update_cell_stresses(
    stresses: &mut [[f64; 6]],
    coeffs: &StepCoefficients,
    projected_rate: &[f64; 6],
    projected_accel_sum: &[f64; 6],
) {
    debug_assert_eq!(stresses.len(), coeffs.cells.len());
    for (sigma, cell) in stresses.iter_mut().zip(&coeffs.cells) {
        for c in 0..6 {
            sigma[c] = cell.advance(sigma[c], projected_rate[c], projected_accel_sum[c]);
        }
    }
}
