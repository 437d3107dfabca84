//! Hypercube meshes on the unit domain in one and two dimensions, Q_s
//! Lagrange elements on equispaced reference nodes, spatial DoF handling,
//! Gauss quadrature and the spatial sparsity pattern.

use crate::linalg::SparsityPattern;
use crate::polynomial::{barycentric_weights, gauss_legendre, lagrange_derivative, lagrange_value};
use crate::{Error, Result};

/// Maximum supported spatial degree.
pub const MAX_SPATIAL_DEGREE: usize = 4;

/// Uniform mesh of congruent axis-aligned cells tiling `(0, 1)^dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpatialMesh {
    dim: usize,
    cells_per_dim: usize,
}

impl SpatialMesh {
    /// Uniform mesh of `(2^n_refinements)^dim` cells of `(0, 1)^dim`.
    pub fn hypercube(dim: usize, n_refinements: usize) -> Result<SpatialMesh> {
        if dim != 1 && dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: dim,
            });
        }
        Ok(SpatialMesh {
            dim,
            cells_per_dim: 1 << n_refinements,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_dim(&self) -> usize {
        self.cells_per_dim
    }

    /// Cell edge length; all cells are congruent.
    pub fn h(&self) -> f64 {
        1.0 / self.cells_per_dim as f64
    }

    pub fn n_cells(&self) -> usize {
        self.cells_per_dim.pow(self.dim as u32)
    }

    pub fn n_vertices(&self) -> usize {
        (self.cells_per_dim + 1).pow(self.dim as u32)
    }

    /// Split every cell into `2^dim` children.
    pub fn refine_uniform(&self) -> SpatialMesh {
        SpatialMesh {
            dim: self.dim,
            cells_per_dim: 2 * self.cells_per_dim,
        }
    }

    /// Lattice coordinates of cell `index` (lexicographic, x fastest).
    pub fn cell_coords(&self, index: usize) -> [usize; 2] {
        debug_assert!(index < self.n_cells());
        [index % self.cells_per_dim, index / self.cells_per_dim]
    }

    /// Lower-left corner of cell `index`.
    pub fn cell_origin(&self, index: usize) -> [f64; 2] {
        let c = self.cell_coords(index);
        [c[0] as f64 * self.h(), c[1] as f64 * self.h()]
    }

    /// Jacobian data of the affine map from the reference cell: determinant
    /// and the per-axis gradient scaling `1 / h_i`.
    pub fn cell_jacobian(&self, _index: usize) -> (f64, [f64; 2]) {
        let h = self.h();
        let det = h.powi(self.dim as i32);
        (det, [1.0 / h, 1.0 / h])
    }
}

/// Tensor-product Lagrange element of degree `s` on equispaced reference nodes.
#[derive(Debug, Clone)]
pub struct QLagrangeElement {
    degree: usize,
    dim: usize,
    nodes_1d: Vec<f64>,
    bary_1d: Vec<f64>,
}

impl QLagrangeElement {
    pub fn new(degree: usize, dim: usize) -> Result<QLagrangeElement> {
        if degree < 1 || degree > MAX_SPATIAL_DEGREE {
            return Err(Error::UnsupportedDegree {
                degree,
                max: MAX_SPATIAL_DEGREE,
            });
        }
        let nodes_1d: Vec<f64> = (0..=degree).map(|i| i as f64 / degree as f64).collect();
        let bary_1d = barycentric_weights(&nodes_1d);
        Ok(QLagrangeElement {
            degree,
            dim,
            nodes_1d,
            bary_1d,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_dofs_per_cell(&self) -> usize {
        (self.degree + 1).pow(self.dim as u32)
    }

    /// Lattice coordinates of local node `a` (lexicographic, x fastest).
    pub fn node_coords(&self, a: usize) -> [usize; 2] {
        let n = self.degree + 1;
        [a % n, a / n]
    }

    /// Reference coordinates of local node `a`.
    pub fn node_point(&self, a: usize) -> [f64; 2] {
        let c = self.node_coords(a);
        [self.nodes_1d[c[0]], if self.dim == 2 { self.nodes_1d[c[1]] } else { 0.0 }]
    }

    fn value_1d(&self, i: usize, x: f64) -> f64 {
        lagrange_value(&self.nodes_1d, &self.bary_1d, i, x)
    }

    fn derivative_1d(&self, i: usize, x: f64) -> f64 {
        lagrange_derivative(&self.nodes_1d, i, x)
    }

    /// Value of shape function `a` at reference point `x_hat`.
    pub fn shape_value(&self, a: usize, x_hat: [f64; 2]) -> f64 {
        assert!(a < self.n_dofs_per_cell(), "shape index {a} out of range");
        let c = self.node_coords(a);
        let mut v = self.value_1d(c[0], x_hat[0]);
        if self.dim == 2 {
            v *= self.value_1d(c[1], x_hat[1]);
        }
        v
    }

    /// Reference gradient of shape function `a` at `x_hat`.
    pub fn shape_grad(&self, a: usize, x_hat: [f64; 2]) -> [f64; 2] {
        assert!(a < self.n_dofs_per_cell(), "shape index {a} out of range");
        let c = self.node_coords(a);
        if self.dim == 1 {
            [self.derivative_1d(c[0], x_hat[0]), 0.0]
        } else {
            [
                self.derivative_1d(c[0], x_hat[0]) * self.value_1d(c[1], x_hat[1]),
                self.value_1d(c[0], x_hat[0]) * self.derivative_1d(c[1], x_hat[1]),
            ]
        }
    }
}

/// Global spatial DoF numbering on the lattice of element nodes.
///
/// Shared cell interfaces share global DoFs; on a uniform mesh with `n` cells
/// per dimension the global count is `(s n + 1)^dim`.
#[derive(Debug, Clone)]
pub struct SpatialDoFHandler {
    dim: usize,
    degree: usize,
    cells_per_dim: usize,
}

impl SpatialDoFHandler {
    pub fn new(mesh: &SpatialMesh, element: &QLagrangeElement) -> Result<SpatialDoFHandler> {
        if mesh.dim() != element.dim() {
            return Err(Error::DimensionMismatch {
                expected: mesh.dim(),
                got: element.dim(),
            });
        }
        Ok(SpatialDoFHandler {
            dim: mesh.dim(),
            degree: element.degree(),
            cells_per_dim: mesh.cells_per_dim(),
        })
    }

    fn nodes_per_dim(&self) -> usize {
        self.degree * self.cells_per_dim + 1
    }

    pub fn n_dofs(&self) -> usize {
        self.nodes_per_dim().pow(self.dim as u32)
    }

    /// Global indices of the element DoFs of `cell`, in local node order.
    pub fn cell_dofs(&self, cell: usize, mesh: &SpatialMesh, element: &QLagrangeElement) -> Vec<usize> {
        let c = mesh.cell_coords(cell);
        let npd = self.nodes_per_dim();
        let s = self.degree;
        (0..element.n_dofs_per_cell())
            .map(|a| {
                let lc = element.node_coords(a);
                let gx = s * c[0] + lc[0];
                if self.dim == 1 {
                    gx
                } else {
                    gx + npd * (s * c[1] + lc[1])
                }
            })
            .collect()
    }

    /// Physical coordinates of global DoF `i`.
    pub fn dof_point(&self, i: usize) -> [f64; 2] {
        let npd = self.nodes_per_dim();
        let spacing = 1.0 / (npd - 1) as f64;
        if self.dim == 1 {
            [i as f64 * spacing, 0.0]
        } else {
            [(i % npd) as f64 * spacing, (i / npd) as f64 * spacing]
        }
    }

    /// All global DoFs whose node lies on the domain boundary.
    pub fn boundary_dofs(&self) -> Vec<usize> {
        let npd = self.nodes_per_dim();
        let mut dofs = Vec::new();
        if self.dim == 1 {
            dofs.push(0);
            dofs.push(npd - 1);
        } else {
            for i in 0..self.n_dofs() {
                let (x, y) = (i % npd, i / npd);
                if x == 0 || x == npd - 1 || y == 0 || y == npd - 1 {
                    dofs.push(i);
                }
            }
        }
        dofs
    }
}

/// Tensor-product Gauss quadrature on the reference cell `[0, 1]^dim`.
#[derive(Debug, Clone)]
pub struct SpatialQuadrature {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
}

impl SpatialQuadrature {
    /// `n_1d^dim` tensor Gauss points; weights sum to one.
    pub fn gauss(n_1d: usize, dim: usize) -> SpatialQuadrature {
        let (pts, wts) = gauss_legendre(n_1d);
        let mut points = Vec::new();
        let mut weights = Vec::new();
        if dim == 1 {
            for (&p, &w) in pts.iter().zip(&wts) {
                points.push([p, 0.0]);
                weights.push(w);
            }
        } else {
            for (&py, &wy) in pts.iter().zip(&wts) {
                for (&px, &wx) in pts.iter().zip(&wts) {
                    points.push([px, py]);
                    weights.push(wx * wy);
                }
            }
        }
        SpatialQuadrature { points, weights }
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Mesh, element, DoF handler and assembly quadrature bundled together;
/// shared read-only across all slabs of a triangulation.
#[derive(Debug, Clone)]
pub struct SpatialDiscretization {
    pub mesh: SpatialMesh,
    pub element: QLagrangeElement,
    pub dofs: SpatialDoFHandler,
}

impl SpatialDiscretization {
    pub fn new(dim: usize, n_refinements: usize, degree: usize) -> Result<SpatialDiscretization> {
        let mesh = SpatialMesh::hypercube(dim, n_refinements)?;
        let element = QLagrangeElement::new(degree, dim)?;
        let dofs = SpatialDoFHandler::new(&mesh, &element)?;
        Ok(SpatialDiscretization {
            mesh,
            element,
            dofs,
        })
    }

    pub fn refine_uniform(&self) -> SpatialDiscretization {
        let mesh = self.mesh.refine_uniform();
        let dofs = SpatialDoFHandler::new(&mesh, &self.element).expect("dims match");
        SpatialDiscretization {
            mesh,
            element: self.element.clone(),
            dofs,
        }
    }

    pub fn n_dofs(&self) -> usize {
        self.dofs.n_dofs()
    }

    pub fn cell_dofs(&self, cell: usize) -> Vec<usize> {
        self.dofs.cell_dofs(cell, &self.mesh, &self.element)
    }

    /// Spatial coupling pattern: (i, j) present iff i and j share a cell.
    pub fn build_sparsity(&self) -> SparsityPattern {
        let n = self.n_dofs();
        let mut entries = Vec::new();
        for cell in 0..self.mesh.n_cells() {
            let dofs = self.cell_dofs(cell);
            for &i in &dofs {
                for &j in &dofs {
                    entries.push((i, j));
                }
            }
        }
        SparsityPattern::from_entries(n, n, entries)
    }

    /// Nodal interpolation of `f` onto the global DoF vector.
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        (0..self.n_dofs())
            .map(|i| f(self.dofs.dof_point(i)))
            .collect()
    }

    /// Assembled spatial mass and stiffness matrices as dense row maps
    /// (cell-loop building block for oracles and implicit Euler).
    pub fn assemble_mass_stiffness(&self) -> (Vec<Vec<(usize, f64)>>, Vec<Vec<(usize, f64)>>) {
        let n = self.n_dofs();
        let quad = SpatialQuadrature::gauss(self.element.degree() + 2, self.mesh.dim());
        let mut mass: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); n];
        let mut stiff: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); n];
        let n_loc = self.element.n_dofs_per_cell();
        for cell in 0..self.mesh.n_cells() {
            let dofs = self.cell_dofs(cell);
            let (det_j, inv_h) = self.mesh.cell_jacobian(cell);
            for (q, (&x_hat, &w)) in quad.points().iter().zip(quad.weights()).enumerate() {
                let _ = q;
                for a in 0..n_loc {
                    let va = self.element.shape_value(a, x_hat);
                    let ga = self.element.shape_grad(a, x_hat);
                    for b in 0..n_loc {
                        let vb = self.element.shape_value(b, x_hat);
                        let gb = self.element.shape_grad(b, x_hat);
                        let grad_dot = ga[0] * gb[0] * inv_h[0] * inv_h[0]
                            + if self.mesh.dim() == 2 {
                                ga[1] * gb[1] * inv_h[1] * inv_h[1]
                            } else {
                                0.0
                            };
                        *mass[dofs[a]].entry(dofs[b]).or_insert(0.0) += w * det_j * va * vb;
                        *stiff[dofs[a]].entry(dofs[b]).or_insert(0.0) += w * det_j * grad_dot;
                    }
                }
            }
        }
        let to_rows = |maps: Vec<std::collections::BTreeMap<usize, f64>>| {
            maps.into_iter()
                .map(|m| m.into_iter().collect::<Vec<_>>())
                .collect::<Vec<_>>()
        };
        (to_rows(mass), to_rows(stiff))
    }
}
