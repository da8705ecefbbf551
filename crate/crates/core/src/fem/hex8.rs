//! Trilinear hexahedron on an axis-aligned box, integrated with 2x2x2 Gauss
//! points. Every element of a [`super::grid::BoxGrid`] is the same box, so
//! one [`BoxElement`] serves the whole mesh.

use super::material::DnuTensor;

/// Local corner signs `(xi, eta, zeta)`.
pub const CORNERS: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

pub const GAUSS_POINTS: usize = 8;
pub const ELEMENT_DOFS: usize = 24;

/// Strain-displacement rows in Voigt order `xx, yy, zz, yz, xz, xy` with
/// engineering shear strains.
pub type StrainMatrix = [[f64; ELEMENT_DOFS]; 6];

#[derive(Debug, Clone)]
pub struct GaussPoint {
    pub local: [f64; 3],
    /// Quadrature weight times Jacobian determinant.
    pub volume: f64,
    pub shape: [f64; 8],
    pub strain: StrainMatrix,
}

impl GaussPoint {
    pub fn strain_of(&self, u: &[f64; ELEMENT_DOFS]) -> [f64; 6] {
        let mut eps = [0.0; 6];
        for (e, row) in eps.iter_mut().zip(&self.strain) {
            *e = row.iter().zip(u).map(|(b, x)| b * x).sum();
        }
        eps
    }

    /// `f += volume * B^T s`
    pub fn add_divergence(&self, stress: &[f64; 6], f: &mut [f64; ELEMENT_DOFS]) {
        for (row, s) in self.strain.iter().zip(stress) {
            let ws = self.volume * s;
            if ws == 0.0 {
                continue;
            }
            for (fi, b) in f.iter_mut().zip(row) {
                *fi += b * ws;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoxElement {
    pub spacing: [f64; 3],
    pub gauss: [GaussPoint; GAUSS_POINTS],
    /// Consistent mass for unit density.
    pub unit_mass: [[f64; ELEMENT_DOFS]; ELEMENT_DOFS],
    /// Stiffness for unit shear modulus, `sum volume * B^T D B`.
    pub unit_stiffness: [[f64; ELEMENT_DOFS]; ELEMENT_DOFS],
}

impl BoxElement {
    pub fn new(spacing: [f64; 3], dnu: &DnuTensor) -> Self {
        let g = 1.0 / libm::sqrt(3.0);
        let det = spacing[0] * spacing[1] * spacing[2] / 8.0;
        let gauss = core::array::from_fn(|q| {
            let local = [CORNERS[q][0] * g, CORNERS[q][1] * g, CORNERS[q][2] * g];
            gauss_point(local, det, spacing)
        });
        let mut element = Self {
            spacing,
            gauss,
            unit_mass: [[0.0; ELEMENT_DOFS]; ELEMENT_DOFS],
            unit_stiffness: [[0.0; ELEMENT_DOFS]; ELEMENT_DOFS],
        };
        for gp in &element.gauss {
            for a in 0..8 {
                for b in 0..8 {
                    let m = gp.volume * (gp.shape[a] * gp.shape[b]);
                    for d in 0..3 {
                        element.unit_mass[3 * a + d][3 * b + d] += m;
                    }
                }
            }
            // D B, 6 x 24
            let mut db = [[0.0; ELEMENT_DOFS]; 6];
            for (i, row) in db.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v = (0..6).map(|k| dnu.get(i, k) * gp.strain[k][j]).sum();
                }
            }
            for i in 0..ELEMENT_DOFS {
                for j in 0..ELEMENT_DOFS {
                    let v: f64 = (0..6).map(|k| gp.strain[k][i] * db[k][j]).sum();
                    element.unit_stiffness[i][j] += gp.volume * v;
                }
            }
        }
        element
    }
}

fn gauss_point(local: [f64; 3], det: f64, spacing: [f64; 3]) -> GaussPoint {
    let mut shape = [0.0; 8];
    let mut grad = [[0.0; 3]; 8];
    for (a, c) in CORNERS.iter().enumerate() {
        let f = [1.0 + c[0] * local[0], 1.0 + c[1] * local[1], 1.0 + c[2] * local[2]];
        shape[a] = 0.125 * f[0] * f[1] * f[2];
        // d/dx = d/dxi * 2 / h
        grad[a] = [
            0.125 * c[0] * f[1] * f[2] * 2.0 / spacing[0],
            0.125 * f[0] * c[1] * f[2] * 2.0 / spacing[1],
            0.125 * f[0] * f[1] * c[2] * 2.0 / spacing[2],
        ];
    }
    let mut strain = [[0.0; ELEMENT_DOFS]; 6];
    for (a, g) in grad.iter().enumerate() {
        let (x, y, z) = (3 * a, 3 * a + 1, 3 * a + 2);
        strain[0][x] = g[0];
        strain[1][y] = g[1];
        strain[2][z] = g[2];
        strain[3][y] = g[2];
        strain[3][z] = g[1];
        strain[4][x] = g[2];
        strain[4][z] = g[0];
        strain[5][x] = g[1];
        strain[5][y] = g[0];
    }
    GaussPoint {
        local,
        volume: det,
        shape,
        strain,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn element(spacing: [f64; 3]) -> BoxElement {
        BoxElement::new(spacing, &DnuTensor::new(0.3).unwrap())
    }

    #[test]
    fn unit_cube_mass_sums_to_three() {
        let e = element([1.0; 3]);
        let total: f64 = e.unit_mass.iter().flatten().sum();
        assert!((total - 3.0).abs() < 1e-14);
    }

    #[test]
    fn shape_functions_partition_unity() {
        let e = element([0.5, 1.0, 2.0]);
        for gp in &e.gauss {
            let s: f64 = gp.shape.iter().sum();
            assert!((s - 1.0).abs() < 1e-15);
        }
        let vol: f64 = e.gauss.iter().map(|g| g.volume).sum();
        assert!((vol - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rigid_modes_carry_no_strain_energy() {
        let e = element([0.3, 0.7, 1.1]);
        for d in 0..3 {
            let mut u = [0.0; ELEMENT_DOFS];
            for a in 0..8 {
                u[3 * a + d] = 1.0;
            }
            for row in &e.unit_stiffness {
                let f: f64 = row.iter().zip(&u).map(|(k, x)| k * x).sum();
                assert!(f.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_field_gives_exact_strain() {
        // u = (0.1 x + 0.2 y, 0.3 z, -0.4 x) on a box at the origin
        let h = [0.5, 1.0, 2.0];
        let e = element(h);
        let mut u = [0.0; ELEMENT_DOFS];
        for (a, c) in CORNERS.iter().enumerate() {
            let x = [(c[0] + 1.0) * 0.5 * h[0], (c[1] + 1.0) * 0.5 * h[1], (c[2] + 1.0) * 0.5 * h[2]];
            u[3 * a] = 0.1 * x[0] + 0.2 * x[1];
            u[3 * a + 1] = 0.3 * x[2];
            u[3 * a + 2] = -0.4 * x[0];
        }
        for gp in &e.gauss {
            let eps = gp.strain_of(&u);
            let want = [0.1, 0.0, 0.0, 0.3, -0.4, 0.2];
            for (a, b) in eps.iter().zip(want) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn element_matrices_symmetric() {
        let e = element([0.3, 0.7, 1.1]);
        for i in 0..ELEMENT_DOFS {
            for j in 0..ELEMENT_DOFS {
                let k = e.unit_stiffness[i][j];
                assert!((k - e.unit_stiffness[j][i]).abs() <= 1e-13 * k.abs().max(1.0));
                assert_eq!(e.unit_mass[i][j], e.unit_mass[j][i]);
            }
        }
    }
}
