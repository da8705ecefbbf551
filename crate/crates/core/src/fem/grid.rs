//! Structured grid of identical boxes. Nodes are numbered lexicographically
//! with `x` fastest, then `y`, then `z`.

use alloc::vec::Vec;

use super::FemError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Face {
    XMin,
    XMax,
    YMin,
    YMax,
    /// Bottom.
    ZMin,
    /// Top.
    ZMax,
}

impl Face {
    pub const ALL: [Face; 6] = [Face::XMin, Face::XMax, Face::YMin, Face::YMax, Face::ZMin, Face::ZMax];

    /// Axis normal to the face (0 = x).
    pub fn axis(self) -> usize {
        match self {
            Face::XMin | Face::XMax => 0,
            Face::YMin | Face::YMax => 1,
            Face::ZMin | Face::ZMax => 2,
        }
    }

    fn is_max(self) -> bool {
        matches!(self, Face::XMax | Face::YMax | Face::ZMax)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxGrid {
    cells: [usize; 3],
    size: [f64; 3],
}

impl BoxGrid {
    pub fn new(cells: [usize; 3], size: [f64; 3]) -> Result<Self, FemError> {
        if cells.contains(&0) {
            return Err(FemError::InvalidGrid);
        }
        if size.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(FemError::InvalidGrid);
        }
        Ok(Self { cells, size })
    }

    pub fn cells(&self) -> [usize; 3] {
        self.cells
    }

    pub fn size(&self) -> [f64; 3] {
        self.size
    }

    /// Nodes per direction.
    pub fn nodes_per_axis(&self) -> [usize; 3] {
        [self.cells[0] + 1, self.cells[1] + 1, self.cells[2] + 1]
    }

    pub fn node_count(&self) -> usize {
        let [a, b, c] = self.nodes_per_axis();
        a * b * c
    }

    pub fn element_count(&self) -> usize {
        self.cells[0] * self.cells[1] * self.cells[2]
    }

    pub fn dof_count(&self) -> usize {
        3 * self.node_count()
    }

    pub fn spacing(&self) -> [f64; 3] {
        [
            self.size[0] / self.cells[0] as f64,
            self.size[1] / self.cells[1] as f64,
            self.size[2] / self.cells[2] as f64,
        ]
    }

    #[inline]
    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        let [a, b, _] = self.nodes_per_axis();
        i + a * (j + b * k)
    }

    pub fn node_ijk(&self, node: usize) -> [usize; 3] {
        let [a, b, _] = self.nodes_per_axis();
        [node % a, (node / a) % b, node / (a * b)]
    }

    pub fn node_position(&self, node: usize) -> [f64; 3] {
        let ijk = self.node_ijk(node);
        let h = self.spacing();
        [ijk[0] as f64 * h[0], ijk[1] as f64 * h[1], ijk[2] as f64 * h[2]]
    }

    /// Node nearest to a point, clamped to the box.
    pub fn nearest_node(&self, point: [f64; 3]) -> usize {
        let h = self.spacing();
        let mut ijk = [0usize; 3];
        for d in 0..3 {
            let idx = libm::round(point[d] / h[d]).max(0.0) as usize;
            ijk[d] = idx.min(self.cells[d]);
        }
        self.node_index(ijk[0], ijk[1], ijk[2])
    }

    pub fn element_ijk(&self, element: usize) -> [usize; 3] {
        let [a, b, _] = self.cells;
        [element % a, (element / a) % b, element / (a * b)]
    }

    /// Corner nodes in the local order of [`super::hex8`]: counter-clockwise
    /// on the bottom face, then the same on the top face.
    pub fn element_nodes(&self, element: usize) -> [usize; 8] {
        let [i, j, k] = self.element_ijk(element);
        [
            self.node_index(i, j, k),
            self.node_index(i + 1, j, k),
            self.node_index(i + 1, j + 1, k),
            self.node_index(i, j + 1, k),
            self.node_index(i, j, k + 1),
            self.node_index(i + 1, j, k + 1),
            self.node_index(i + 1, j + 1, k + 1),
            self.node_index(i, j + 1, k + 1),
        ]
    }

    pub fn face_nodes(&self, face: Face) -> Vec<usize> {
        let n = self.nodes_per_axis();
        let axis = face.axis();
        let fixed = if face.is_max() { self.cells[axis] } else { 0 };
        let mut out = Vec::new();
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    if [i, j, k][axis] == fixed {
                        out.push(self.node_index(i, j, k));
                    }
                }
            }
        }
        out
    }

    /// Consistent nodal weights of a uniform unit traction on `face`: each
    /// face quad hands a quarter of its area to each corner.
    pub fn face_area_weights(&self, face: Face) -> Vec<(usize, f64)> {
        let axis = face.axis();
        let (u, v) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let h = self.spacing();
        let quarter = 0.25 * h[u] * h[v];
        let n = self.nodes_per_axis();
        let fixed = if face.is_max() { self.cells[axis] } else { 0 };
        let mut out = Vec::new();
        for b in 0..n[v] {
            for a in 0..n[u] {
                let mut ijk = [0usize; 3];
                ijk[axis] = fixed;
                ijk[u] = a;
                ijk[v] = b;
                let edges_u = if a == 0 || a == self.cells[u] { 1.0 } else { 2.0 };
                let edges_v = if b == 0 || b == self.cells[v] { 1.0 } else { 2.0 };
                out.push((self.node_index(ijk[0], ijk[1], ijk[2]), quarter * edges_u * edges_v));
            }
        }
        out.sort_by_key(|&(node, _)| node);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_for_thousand_element_cube() {
        let g = BoxGrid::new([10, 10, 10], [1.0, 1.0, 1.0]).unwrap();
        assert_eq!(g.element_count(), 1000);
        assert_eq!(g.node_count(), 1331);
        assert_eq!(g.dof_count(), 3993);
    }

    #[test]
    fn lexicographic_numbering() {
        let g = BoxGrid::new([2, 3, 4], [2.0, 3.0, 4.0]).unwrap();
        assert_eq!(g.node_index(1, 0, 0), 1);
        assert_eq!(g.node_index(0, 1, 0), 3);
        assert_eq!(g.node_index(0, 0, 1), 12);
        for n in 0..g.node_count() {
            let [i, j, k] = g.node_ijk(n);
            assert_eq!(g.node_index(i, j, k), n);
        }
        assert_eq!(g.node_position(g.node_index(2, 3, 4)), [2.0, 3.0, 4.0]);
        assert_eq!(g.nearest_node([0.9, 2.2, 10.0]), g.node_index(1, 2, 4));
    }

    #[test]
    fn faces_and_weights() {
        let g = BoxGrid::new([2, 2, 3], [1.0, 2.0, 3.0]).unwrap();
        assert_eq!(g.face_nodes(Face::ZMin).len(), 9);
        assert_eq!(g.face_nodes(Face::XMax).len(), 12);
        let w = g.face_area_weights(Face::ZMax);
        let total: f64 = w.iter().map(|&(_, a)| a).sum();
        assert!((total - 2.0).abs() < 1e-14);
        let top = g.face_nodes(Face::ZMax);
        assert_eq!(w.iter().map(|&(n, _)| n).collect::<Vec<_>>(), top);
    }

    #[test]
    fn rejects_empty_grid() {
        assert_eq!(BoxGrid::new([0, 1, 1], [1.0; 3]), Err(FemError::InvalidGrid));
        assert_eq!(BoxGrid::new([1, 1, 1], [1.0, -1.0, 1.0]), Err(FemError::InvalidGrid));
    }
}
