//! Model description and global assembly.

use alloc::vec;
use alloc::vec::Vec;

use crate::chain::MaxwellChain;
use crate::load::LoadSignal;

use super::grid::{BoxGrid, Face};
use super::hex8::{BoxElement, ELEMENT_DOFS};
use super::material::DnuTensor;
use super::sparse::{CsrMatrix, SkylineCholesky};
use super::FemError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// Every DOF on `z = 0` is fixed.
    FixBottom,
    /// `uz = 0` on `z = 0`, plus `ux = uy = 0` at the origin and `uy = 0` at
    /// `(Lx, 0, 0)` to remove the in-plane rigid motions.
    PatchRollers,
    /// Nothing fixed. Rejected by [`assemble`].
    Free,
}

/// Uniform traction `vector * profile(t)` in N/m² on one face.
#[derive(Debug, Clone, PartialEq)]
pub struct Traction {
    pub face: Face,
    pub vector: [f64; 3],
    pub profile: LoadSignal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FemModel {
    pub grid: BoxGrid,
    pub density: f64,
    pub dnu: DnuTensor,
    /// Moduli read as shear moduli in Pa.
    pub chain: MaxwellChain,
    pub boundary: BoundaryCondition,
    pub traction: Option<Traction>,
}

impl FemModel {
    pub fn new(
        grid: BoxGrid,
        density: f64,
        poisson: f64,
        chain: MaxwellChain,
        boundary: BoundaryCondition,
        traction: Option<Traction>,
    ) -> Result<Self, FemError> {
        if !(density.is_finite() && density > 0.0) {
            return Err(FemError::InvalidDensity(density));
        }
        let dnu = DnuTensor::new(poisson)?;
        Ok(Self {
            grid,
            density,
            dnu,
            chain,
            boundary,
            traction,
        })
    }

    pub fn fixed_dofs(&self) -> Vec<bool> {
        let g = &self.grid;
        let mut fixed = vec![false; g.dof_count()];
        match self.boundary {
            BoundaryCondition::FixBottom => {
                for n in g.face_nodes(Face::ZMin) {
                    fixed[3 * n..3 * n + 3].fill(true);
                }
            }
            BoundaryCondition::PatchRollers => {
                for n in g.face_nodes(Face::ZMin) {
                    fixed[3 * n + 2] = true;
                }
                let origin = g.node_index(0, 0, 0);
                fixed[3 * origin] = true;
                fixed[3 * origin + 1] = true;
                let corner = g.node_index(g.cells()[0], 0, 0);
                fixed[3 * corner + 1] = true;
            }
            BoundaryCondition::Free => {}
        }
        fixed
    }

    /// Nodal forces of the traction with a unit time profile.
    pub fn traction_pattern(&self) -> Vec<f64> {
        let mut f = vec![0.0; self.grid.dof_count()];
        if let Some(t) = &self.traction {
            for (node, area) in self.grid.face_area_weights(t.face) {
                for d in 0..3 {
                    f[3 * node + d] += area * t.vector[d];
                }
            }
        }
        f
    }

    pub fn load_factor(&self, time: f64) -> f64 {
        self.traction.as_ref().map_or(0.0, |t| t.profile.value(time))
    }
}

/// Global matrices and the data every step needs.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub model: FemModel,
    pub element: BoxElement,
    /// Consistent mass, `rho * int N^T N`.
    pub mass: CsrMatrix,
    /// Unit-modulus stiffness, `int B^T D B`.
    pub stiffness: CsrMatrix,
    /// Unconstrained DOFs in increasing order.
    pub free: Vec<usize>,
    pub traction: Vec<f64>,
}

pub fn assemble(model: &FemModel) -> Result<Assembly, FemError> {
    let fixed = model.fixed_dofs();
    if !fixed.iter().any(|&f| f) {
        return Err(FemError::NoDirichlet);
    }
    let grid = &model.grid;
    let element = BoxElement::new(grid.spacing(), &model.dnu);
    let n = grid.dof_count();
    let per = ELEMENT_DOFS * ELEMENT_DOFS;
    let mut mass = Vec::with_capacity(grid.element_count() * per);
    let mut stiffness = Vec::with_capacity(grid.element_count() * per);
    for e in 0..grid.element_count() {
        let dofs = element_dofs(grid, e);
        for (i, &gi) in dofs.iter().enumerate() {
            for (j, &gj) in dofs.iter().enumerate() {
                let m = element.unit_mass[i][j];
                if m != 0.0 {
                    mass.push((gi, gj, model.density * m));
                }
                stiffness.push((gi, gj, element.unit_stiffness[i][j]));
            }
        }
    }
    let free = (0..n).filter(|&d| !fixed[d]).collect();
    Ok(Assembly {
        model: model.clone(),
        element,
        mass: CsrMatrix::from_triplets(n, mass),
        stiffness: CsrMatrix::from_triplets(n, stiffness),
        free,
        traction: model.traction_pattern(),
    })
}

pub(crate) fn element_dofs(grid: &BoxGrid, element: usize) -> [usize; ELEMENT_DOFS] {
    let nodes = grid.element_nodes(element);
    core::array::from_fn(|i| 3 * nodes[i / 3] + i % 3)
}

impl Assembly {
    pub fn dof_count(&self) -> usize {
        self.mass.dim()
    }

    pub fn external_force(&self, time: f64) -> Vec<f64> {
        let s = self.model.load_factor(time);
        self.traction.iter().map(|f| f * s).collect()
    }

    /// Long-term static response `G_inf K1 u = F(time)` with all cell
    /// stresses relaxed.
    pub fn static_displacement(&self, time: f64) -> Result<Vec<f64>, FemError> {
        let factor = SkylineCholesky::factor(&self.stiffness, &self.free)?;
        let f = self.external_force(time);
        let mut rhs: Vec<f64> = self.free.iter().map(|&d| f[d]).collect();
        factor.solve_in_place(&mut rhs);
        let g = self.model.chain.long_term_stiffness();
        let mut u = vec![0.0; self.dof_count()];
        for (&d, x) in self.free.iter().zip(&rhs) {
            u[d] = x / g;
        }
        Ok(u)
    }

    pub fn element_vector(&self, field: &[f64], element: usize) -> [f64; ELEMENT_DOFS] {
        let dofs = element_dofs(&self.model.grid, element);
        core::array::from_fn(|i| field[dofs[i]])
    }
}
