//! Space-time element evaluation: combined shape values and derivatives,
//! quadrature bookkeeping, `JxW`, jump evaluations, finite element function
//! evaluation and the local-to-global index map.
//!
//! Local DoFs mirror the global space-major rule: `i = i_x + n_x_cell * i_t`.
//! Quadrature points are numbered `q = q_x + n_qx * q_t`.

use crate::slab::{st_dof_index, Slab, SpaceTimeTriangulation};
use crate::spatial::{SpatialDiscretization, SpatialQuadrature};
use crate::temporal::{TemporalBasis, TemporalQuadrature};

struct CellCache {
    det_j: f64,
    inv_h: [f64; 2],
    origin: [f64; 2],
    h: f64,
    dofs: Vec<usize>,
}

struct TimeCache {
    t_start: f64,
    k: f64,
}

/// Evaluated space-time shape data on one (cell, interval) pair.
///
/// `reinit_space` caches the spatial geometry; `reinit_time` only swaps the
/// interval map, so an inner loop over temporal elements avoids recomputing
/// the spatial data.
pub struct StFeValues {
    spatial: std::sync::Arc<SpatialDiscretization>,
    n_t_dofs: usize,
    n_x_dofs: usize,
    t_points: Vec<f64>,
    t_weights: Vec<f64>,
    x_points: Vec<[f64; 2]>,
    x_weights: Vec<f64>,
    n_qx: usize,
    // cached reference values: phi_x[q_x][a], grad_phi_x[q_x][a], phi_t[q_t][i], dphi_t[q_t][i]
    phi_x: Vec<Vec<f64>>,
    grad_phi_x: Vec<Vec<[f64; 2]>>,
    phi_t: Vec<Vec<f64>>,
    dphi_t: Vec<Vec<f64>>,
    cell: Option<CellCache>,
    time: Option<TimeCache>,
}

impl StFeValues {
    /// Values with `n_t_quad` temporal Gauss points and `n_x_quad_1d^dim`
    /// spatial Gauss points.
    pub fn new(
        spatial: std::sync::Arc<SpatialDiscretization>,
        basis: &TemporalBasis,
        n_t_quad: usize,
        n_x_quad_1d: usize,
    ) -> StFeValues {
        let t_quad = TemporalQuadrature::gauss(n_t_quad);
        let x_quad = SpatialQuadrature::gauss(n_x_quad_1d, spatial.mesh.dim());
        let n_x_dofs = spatial.element.n_dofs_per_cell();
        let n_t_dofs = basis.n_dofs();
        let phi_x: Vec<Vec<f64>> = x_quad
            .points()
            .iter()
            .map(|&x| (0..n_x_dofs).map(|a| spatial.element.shape_value(a, x)).collect())
            .collect();
        let grad_phi_x: Vec<Vec<[f64; 2]>> = x_quad
            .points()
            .iter()
            .map(|&x| (0..n_x_dofs).map(|a| spatial.element.shape_grad(a, x)).collect())
            .collect();
        let phi_t: Vec<Vec<f64>> = t_quad
            .points()
            .iter()
            .map(|&t| (0..n_t_dofs).map(|i| basis.shape_value(i, t)).collect())
            .collect();
        let dphi_t: Vec<Vec<f64>> = t_quad
            .points()
            .iter()
            .map(|&t| (0..n_t_dofs).map(|i| basis.shape_dt(i, t)).collect())
            .collect();
        StFeValues {
            spatial,
            n_t_dofs,
            n_x_dofs,
            t_points: t_quad.points().to_vec(),
            t_weights: t_quad.weights().to_vec(),
            n_qx: x_quad.len(),
            x_points: x_quad.points().to_vec(),
            x_weights: x_quad.weights().to_vec(),
            phi_x,
            grad_phi_x,
            phi_t,
            dphi_t,
            cell: None,
            time: None,
        }
    }

    /// Cache geometry and global DoFs of `cell`. Survives `reinit_time`.
    pub fn reinit_space(&mut self, cell: usize) {
        let (det_j, inv_h) = self.spatial.mesh.cell_jacobian(cell);
        self.cell = Some(CellCache {
            det_j,
            inv_h,
            origin: self.spatial.mesh.cell_origin(cell),
            h: self.spatial.mesh.h(),
            dofs: self.spatial.cell_dofs(cell),
        });
    }

    /// Set the current temporal interval `(t_start, t_start + k)`.
    pub fn reinit_time(&mut self, t_start: f64, k: f64) {
        self.time = Some(TimeCache { t_start, k });
    }

    pub fn n_st_dofs(&self) -> usize {
        self.n_t_dofs * self.n_x_dofs
    }

    pub fn n_st_quad(&self) -> usize {
        self.t_points.len() * self.n_qx
    }

    fn cell(&self) -> &CellCache {
        self.cell.as_ref().expect("reinit_space not called")
    }

    fn time(&self) -> &TimeCache {
        self.time.as_ref().expect("reinit_time not called")
    }

    fn split_dof(&self, i: usize) -> (usize, usize) {
        debug_assert!(i < self.n_st_dofs());
        (i % self.n_x_dofs, i / self.n_x_dofs)
    }

    fn split_quad(&self, q: usize) -> (usize, usize) {
        debug_assert!(q < self.n_st_quad());
        (q % self.n_qx, q / self.n_qx)
    }

    /// Physical (t, x) coordinates of quadrature point `q`.
    pub fn quadrature_point(&self, q: usize) -> (f64, [f64; 2]) {
        let (q_x, q_t) = self.split_quad(q);
        let time = self.time();
        let cell = self.cell();
        let x_hat = self.spatial_quad_point(q_x);
        let t = time.t_start + time.k * self.t_points[q_t];
        let x = [
            cell.origin[0] + cell.h * x_hat[0],
            cell.origin[1] + cell.h * x_hat[1],
        ];
        (t, x)
    }

    fn spatial_quad_point(&self, q_x: usize) -> [f64; 2] {
        self.x_points[q_x]
    }

    /// `phi_t(t_q) * phi_x(x_q)` for local space-time DoF `i`.
    pub fn shape_value(&self, i: usize, q: usize) -> f64 {
        let (i_x, i_t) = self.split_dof(i);
        let (q_x, q_t) = self.split_quad(q);
        self.phi_t[q_t][i_t] * self.phi_x[q_x][i_x]
    }

    /// Temporal derivative `(1/k) phi'_t(t_q) phi_x(x_q)`.
    pub fn shape_dt(&self, i: usize, q: usize) -> f64 {
        let (i_x, i_t) = self.split_dof(i);
        let (q_x, q_t) = self.split_quad(q);
        self.dphi_t[q_t][i_t] * self.phi_x[q_x][i_x] / self.time().k
    }

    /// Spatial gradient `phi_t(t_q) J^{-T} grad phi_x(x_q)`.
    pub fn shape_space_grad(&self, i: usize, q: usize) -> [f64; 2] {
        let (i_x, i_t) = self.split_dof(i);
        let (q_x, q_t) = self.split_quad(q);
        let cell = self.cell();
        let g = self.grad_phi_x[q_x][i_x];
        let pt = self.phi_t[q_t][i_t];
        [pt * g[0] * cell.inv_h[0], pt * g[1] * cell.inv_h[1]]
    }

    /// Combined quadrature weight `w_t k * w_x detJ`.
    pub fn jxw(&self, q: usize) -> f64 {
        let (q_x, q_t) = self.split_quad(q);
        let time = self.time();
        let cell = self.cell();
        self.t_weights[q_t] * time.k * self.x_weights[q_x] * cell.det_j
    }

    /// Global spatial DoF indices of the current cell.
    pub fn cell_dofs(&self) -> &[usize] {
        &self.cell().dofs
    }

    /// Spatial mass matrix of the current cell,
    /// `m_ab = int_K phi_a phi_b dx`.
    pub fn cell_mass_matrix(&self) -> Vec<Vec<f64>> {
        let cell = self.cell();
        let n = self.n_x_dofs;
        let mut m = vec![vec![0.0; n]; n];
        for (q_x, row) in self.phi_x.iter().enumerate() {
            let w = self.x_weights[q_x] * cell.det_j;
            for a in 0..n {
                let va = w * row[a];
                for b in 0..n {
                    m[a][b] += va * row[b];
                }
            }
        }
        m
    }

    /// Global indices of the local space-time DoFs for interval
    /// `interval_in_slab` of `slab`, in local space-major order.
    pub fn local_dof_indices(&self, slab: &Slab, interval_in_slab: usize) -> Vec<usize> {
        let cell = self.cell();
        let offset = interval_in_slab * self.n_t_dofs;
        let mut indices = Vec::with_capacity(self.n_st_dofs());
        for i_t in 0..self.n_t_dofs {
            for &g_x in &cell.dofs {
                indices.push(st_dof_index(g_x, offset + i_t, slab.n_x));
            }
        }
        indices
    }

    /// `u_kh` at each quadrature point: `sum_i u[l(i)] shape_value(i, q)`.
    pub fn get_function_values(&self, u: &[f64], indices: &[usize], out: &mut Vec<f64>) {
        out.clear();
        for q in 0..self.n_st_quad() {
            let mut v = 0.0;
            for (i, &g) in indices.iter().enumerate() {
                v += u[g] * self.shape_value(i, q);
            }
            out.push(v);
        }
    }

    /// Temporal derivative of `u_kh` at each quadrature point.
    pub fn get_function_dt(&self, u: &[f64], indices: &[usize], out: &mut Vec<f64>) {
        out.clear();
        for q in 0..self.n_st_quad() {
            let mut v = 0.0;
            for (i, &g) in indices.iter().enumerate() {
                v += u[g] * self.shape_dt(i, q);
            }
            out.push(v);
        }
    }

    /// Spatial gradient of `u_kh` at each quadrature point.
    pub fn get_function_space_gradients(
        &self,
        u: &[f64],
        indices: &[usize],
        out: &mut Vec<[f64; 2]>,
    ) {
        out.clear();
        for q in 0..self.n_st_quad() {
            let mut v = [0.0; 2];
            for (i, &g) in indices.iter().enumerate() {
                let grad = self.shape_space_grad(i, q);
                v[0] += u[g] * grad[0];
                v[1] += u[g] * grad[1];
            }
            out.push(v);
        }
    }
}

/// Jump evaluation across a temporal element boundary: plus-values use the
/// left-limit coefficients of the later interval, minus-values the
/// right-limit coefficients of the earlier one.
pub struct StJumpValues {
    limit_left: Vec<f64>,
    limit_right: Vec<f64>,
    phi_x: Vec<Vec<f64>>,
    n_x_dofs: usize,
}

impl StJumpValues {
    pub fn new(
        spatial: &SpatialDiscretization,
        basis: &TemporalBasis,
        n_x_quad_1d: usize,
    ) -> StJumpValues {
        let x_quad = SpatialQuadrature::gauss(n_x_quad_1d, spatial.mesh.dim());
        let n_x_dofs = spatial.element.n_dofs_per_cell();
        let phi_x = x_quad
            .points()
            .iter()
            .map(|&x| (0..n_x_dofs).map(|a| spatial.element.shape_value(a, x)).collect())
            .collect();
        StJumpValues {
            limit_left: basis.limit_left(),
            limit_right: basis.limit_right(),
            phi_x,
            n_x_dofs,
        }
    }

    pub fn n_spatial_quad(&self) -> usize {
        self.phi_x.len()
    }

    /// Limit from above of local space-time DoF `i` of the later interval,
    /// at spatial quadrature point `q`.
    pub fn shape_value_plus(&self, i: usize, q: usize) -> f64 {
        let (i_x, i_t) = (i % self.n_x_dofs, i / self.n_x_dofs);
        self.limit_left[i_t] * self.phi_x[q][i_x]
    }

    /// Limit from below of local space-time DoF `i` of the earlier interval,
    /// at spatial quadrature point `q`.
    pub fn shape_value_minus(&self, i: usize, q: usize) -> f64 {
        let (i_x, i_t) = (i % self.n_x_dofs, i / self.n_x_dofs);
        self.limit_right[i_t] * self.phi_x[q][i_x]
    }

    pub fn limit_left(&self) -> &[f64] {
        &self.limit_left
    }

    pub fn limit_right(&self) -> &[f64] {
        &self.limit_right
    }
}

/// Nodal values of the space-time solution at every temporal DoF of the full
/// triangulation, concatenated space-major over intervals. Independent of the
/// slab partition, which makes it the natural carrier for decoupling checks.
pub fn collect_nodal_values(tri: &SpaceTimeTriangulation, solutions: &[Vec<f64>]) -> Vec<f64> {
    let mut all = Vec::with_capacity(tri.n_total_dofs());
    for (slab, sol) in tri.slabs().zip(solutions) {
        debug_assert_eq!(sol.len(), slab.n_system_dofs());
        all.extend_from_slice(sol);
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal::SupportType;
    use std::sync::Arc;

    fn setup(r: usize, s: usize, st: SupportType) -> (Arc<SpatialDiscretization>, TemporalBasis) {
        let spatial = Arc::new(SpatialDiscretization::new(2, 1, s).unwrap());
        let basis = TemporalBasis::new(r, st).unwrap();
        (spatial, basis)
    }

    #[test]
    fn reinit_caches_behave() {
        let (spatial, basis) = setup(1, 1, SupportType::Lobatto);
        let mut fe = StFeValues::new(Arc::clone(&spatial), &basis, 3, 3);
        fe.reinit_space(0);
        fe.reinit_time(0.25, 0.25);
        let grads: Vec<[f64; 2]> = (0..fe.n_st_dofs())
            .map(|i| fe.shape_space_grad(i, 0))
            .collect();
        // reinit_time must not touch the spatial cache
        fe.reinit_time(0.5, 0.25);
        for (i, g) in grads.iter().enumerate() {
            let g2 = fe.shape_space_grad(i, 0);
            assert_eq!(g[0], g2[0]);
            assert_eq!(g[1], g2[1]);
        }
        // reinit_time twice with the same interval is idempotent
        fe.reinit_time(0.5, 0.25);
        // all quadrature times lie inside the interval
        for q in 0..fe.n_st_quad() {
            let (t, _) = fe.quadrature_point(q);
            assert!(t > 0.5 && t < 0.75);
        }
    }

    #[test]
    fn shape_value_structure() {
        let (spatial, basis) = setup(1, 1, SupportType::Lobatto);
        let mut fe = StFeValues::new(Arc::clone(&spatial), &basis, 3, 3);
        fe.reinit_space(0);
        fe.reinit_time(0.0, 1.0);
        // partition of unity of the combined basis
        for q in 0..fe.n_st_quad() {
            let sum: f64 = (0..fe.n_st_dofs()).map(|i| fe.shape_value(i, q)).sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }

        // r = 0: no temporal variation
        let basis0 = TemporalBasis::new(0, SupportType::Lobatto).unwrap();
        let mut fe0 = StFeValues::new(Arc::clone(&spatial), &basis0, 2, 3);
        fe0.reinit_space(0);
        fe0.reinit_time(0.0, 0.5);
        for i in 0..fe0.n_st_dofs() {
            for q in 0..fe0.n_st_quad() {
                assert_eq!(fe0.shape_dt(i, q), 0.0);
            }
        }
    }

    #[test]
    fn jxw_measures() {
        let (spatial, basis) = setup(1, 1, SupportType::Lobatto);
        let n_cells = spatial.mesh.n_cells();
        let mut fe = StFeValues::new(Arc::clone(&spatial), &basis, 3, 3);
        let k = 0.125;
        let mut total = 0.0;
        for cell in 0..n_cells {
            fe.reinit_space(cell);
            fe.reinit_time(0.0, k);
            for q in 0..fe.n_st_quad() {
                total += fe.jxw(q);
            }
        }
        // integral over one interval times the unit square
        assert!((total - k).abs() < 1e-13);

        // doubling k doubles every weight
        fe.reinit_space(0);
        fe.reinit_time(0.0, k);
        let w0: Vec<f64> = (0..fe.n_st_quad()).map(|q| fe.jxw(q)).collect();
        fe.reinit_time(0.0, 2.0 * k);
        for (q, &w) in w0.iter().enumerate() {
            assert!((fe.jxw(q) - 2.0 * w).abs() < 1e-15);
        }
    }

    #[test]
    fn local_to_global_mapping() {
        let (spatial, basis) = setup(1, 1, SupportType::Lobatto);
        let slab = Slab {
            first_interval: 0,
            n_intervals: 3,
            n_t: 6,
            n_x: spatial.n_dofs(),
        };
        let mut fe = StFeValues::new(Arc::clone(&spatial), &basis, 3, 3);
        fe.reinit_space(0);

        // first interval, i_t = 0: indices equal the spatial global indices
        let idx = fe.local_dof_indices(&slab, 0);
        let cell_dofs = spatial.cell_dofs(0);
        assert_eq!(&idx[..cell_dofs.len()], &cell_dofs[..]);

        // interval 2, i_t = 0 maps spatial dof g to g + n_x * 4
        let idx2 = fe.local_dof_indices(&slab, 2);
        for (a, &g) in cell_dofs.iter().enumerate() {
            assert_eq!(idx2[a], g + slab.n_x * 4);
        }

        // strictly increasing with i_t for fixed i_x
        for a in 0..cell_dofs.len() {
            assert!(idx[a + cell_dofs.len()] > idx[a]);
        }

        // two cells sharing a spatial DoF map it identically for equal i_t
        let mut fe2 = StFeValues::new(Arc::clone(&spatial), &basis, 3, 3);
        fe2.reinit_space(1);
        let idx_other = fe2.local_dof_indices(&slab, 1);
        let dofs0 = spatial.cell_dofs(0);
        let dofs1 = spatial.cell_dofs(1);
        for (a0, &g0) in dofs0.iter().enumerate() {
            for (a1, &g1) in dofs1.iter().enumerate() {
                if g0 == g1 {
                    let idx_self = fe.local_dof_indices(&slab, 1);
                    assert_eq!(idx_self[a0], idx_other[a1]);
                }
            }
        }

        // injective per (cell, interval)
        let mut sorted = idx2.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), idx2.len());
    }

    #[test]
    fn function_values_reproduce_interpolants() {
        // f(t, x) = p(t) q(x) with deg p <= r, deg q <= s per coordinate must
        // be reproduced exactly along with its derivatives
        for (r, s, st) in [(1, 1, SupportType::Lobatto), (2, 2, SupportType::Legendre)] {
            let (spatial, basis) = setup(r, s, st);
            let slab = Slab {
                first_interval: 0,
                n_intervals: 1,
                n_t: r + 1,
                n_x: spatial.n_dofs(),
            };
            let (t0, k) = (0.2, 0.4);
            let p = |t: f64| 1.0 + 0.5 * t.powi(r as i32);
            let dp = |t: f64| 0.5 * r as f64 * t.powi(r as i32 - 1);
            let q = |x: [f64; 2]| x[0].powi(s as i32) + 2.0 * x[1].powi(s as i32) + 1.0;
            let gq = |x: [f64; 2]| {
                [
                    s as f64 * x[0].powi(s as i32 - 1),
                    2.0 * s as f64 * x[1].powi(s as i32 - 1),
                ]
            };

            // nodal interpolation onto the slab vector
            let mut u = vec![0.0; slab.n_system_dofs()];
            for (i_t, &tau) in basis.nodes().iter().enumerate() {
                let t = t0 + k * tau;
                for g in 0..slab.n_x {
                    let x = spatial.dofs.dof_point(g);
                    u[st_dof_index(g, i_t, slab.n_x)] = p(t) * q(x);
                }
            }

            let mut fe = StFeValues::new(Arc::clone(&spatial), &basis, r + 2, s + 2);
            let mut vals = Vec::new();
            let mut dts = Vec::new();
            let mut grads = Vec::new();
            for cell in 0..spatial.mesh.n_cells() {
                fe.reinit_space(cell);
                fe.reinit_time(t0, k);
                let idx = fe.local_dof_indices(&slab, 0);
                fe.get_function_values(&u, &idx, &mut vals);
                fe.get_function_dt(&u, &idx, &mut dts);
                fe.get_function_space_gradients(&u, &idx, &mut grads);
                for qp in 0..fe.n_st_quad() {
                    let (t, x) = fe.quadrature_point(qp);
                    assert!((vals[qp] - p(t) * q(x)).abs() < 1e-10);
                    assert!((dts[qp] - dp(t) * q(x)).abs() < 1e-10);
                    let g = gq(x);
                    assert!((grads[qp][0] - p(t) * g[0]).abs() < 1e-10);
                    assert!((grads[qp][1] - p(t) * g[1]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn constant_linear_interpolants() {
        let (spatial, basis) = setup(1, 1, SupportType::Lobatto);
        let slab = Slab {
            first_interval: 0,
            n_intervals: 1,
            n_t: 2,
            n_x: spatial.n_dofs(),
        };
        let mut fe = StFeValues::new(Arc::clone(&spatial), &basis, 3, 3);

        // u = 1 -> values 1, dt 0, grad 0
        let ones = vec![1.0; slab.n_system_dofs()];
        // u = t
        let mut u_t = vec![0.0; slab.n_system_dofs()];
        // u = x1
        let mut u_x = vec![0.0; slab.n_system_dofs()];
        for (i_t, &tau) in basis.nodes().iter().enumerate() {
            for g in 0..slab.n_x {
                u_t[st_dof_index(g, i_t, slab.n_x)] = tau;
                u_x[st_dof_index(g, i_t, slab.n_x)] = spatial.dofs.dof_point(g)[0];
            }
        }

        let mut vals = Vec::new();
        let mut dts = Vec::new();
        let mut grads = Vec::new();
        for cell in 0..spatial.mesh.n_cells() {
            fe.reinit_space(cell);
            fe.reinit_time(0.0, 1.0);
            let idx = fe.local_dof_indices(&slab, 0);

            fe.get_function_values(&ones, &idx, &mut vals);
            fe.get_function_dt(&ones, &idx, &mut dts);
            fe.get_function_space_gradients(&ones, &idx, &mut grads);
            for q in 0..fe.n_st_quad() {
                assert!((vals[q] - 1.0).abs() < 1e-12);
                assert!(dts[q].abs() < 1e-12);
                assert!(grads[q][0].abs() < 1e-12 && grads[q][1].abs() < 1e-12);
            }

            fe.get_function_dt(&u_t, &idx, &mut dts);
            for q in 0..fe.n_st_quad() {
                assert!((dts[q] - 1.0).abs() < 1e-12);
            }

            fe.get_function_space_gradients(&u_x, &idx, &mut grads);
            for q in 0..fe.n_st_quad() {
                assert!((grads[q][0] - 1.0).abs() < 1e-12);
                assert!(grads[q][1].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jump_values() {
        let spatial = SpatialDiscretization::new(2, 0, 1).unwrap();

        // continuous-in-time function: evaluated jump vanishes (r=1 Lobatto)
        let basis = TemporalBasis::new(1, SupportType::Lobatto).unwrap();
        let jump = StJumpValues::new(&spatial, &basis, 3);
        let n_x = spatial.element.n_dofs_per_cell();
        // earlier interval values (a at node 0, v at node 1); later (v, b):
        // shared value v at the interface
        let v_shared = 0.7;
        for q in 0..jump.n_spatial_quad() {
            let mut plus = 0.0;
            let mut minus = 0.0;
            for a in 0..n_x {
                // later interval: i_t = 0 holds v_shared
                plus += v_shared * jump.shape_value_plus(a, q);
                // earlier interval: i_t = 1 holds v_shared
                minus += v_shared * jump.shape_value_minus(a + n_x, q);
            }
            assert!((plus - minus).abs() < 1e-13);
        }

        // r = 0: jump of piecewise constants a, b is b - a
        let basis0 = TemporalBasis::new(0, SupportType::Lobatto).unwrap();
        let jump0 = StJumpValues::new(&spatial, &basis0, 3);
        let (a_val, b_val) = (0.3, 1.1);
        for q in 0..jump0.n_spatial_quad() {
            let mut plus = 0.0;
            let mut minus = 0.0;
            for a in 0..n_x {
                plus += b_val * jump0.shape_value_plus(a, q);
                minus += a_val * jump0.shape_value_minus(a, q);
            }
            assert!((plus - minus - (b_val - a_val)).abs() < 1e-13);
        }

        // r = 1 RadauLeft: minus-limit extrapolates (a, b) to -a/2 + 3b/2
        let basis_rl = TemporalBasis::new(1, SupportType::RadauLeft).unwrap();
        let jump_rl = StJumpValues::new(&spatial, &basis_rl, 3);
        let (a_val, b_val) = (0.4, 0.9);
        for q in 0..jump_rl.n_spatial_quad() {
            let mut minus = 0.0;
            for a in 0..n_x {
                minus += a_val * jump_rl.shape_value_minus(a, q);
                minus += b_val * jump_rl.shape_value_minus(a + n_x, q);
            }
            assert!((minus - (-a_val / 2.0 + 3.0 * b_val / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn time_integral_telescopes() {
        // int over the slab of dt(interpolated f) equals the spatial integral
        // of f at the end minus at the start, for f within the discrete space
        let (spatial, basis) = setup(2, 2, SupportType::Lobatto);
        let slab = Slab {
            first_interval: 0,
            n_intervals: 1,
            n_t: 3,
            n_x: spatial.n_dofs(),
        };
        let f = |t: f64, x: [f64; 2]| (1.0 + t + t * t) * (x[0] * x[0] + x[1]);
        let mut u = vec![0.0; slab.n_system_dofs()];
        for (i_t, &tau) in basis.nodes().iter().enumerate() {
            for g in 0..slab.n_x {
                u[st_dof_index(g, i_t, slab.n_x)] = f(tau, spatial.dofs.dof_point(g));
            }
        }
        let mut fe = StFeValues::new(Arc::clone(&spatial), &basis, 4, 4);
        let mut dts = Vec::new();
        let mut integral = 0.0;
        for cell in 0..spatial.mesh.n_cells() {
            fe.reinit_space(cell);
            fe.reinit_time(0.0, 1.0);
            let idx = fe.local_dof_indices(&slab, 0);
            fe.get_function_dt(&u, &idx, &mut dts);
            for q in 0..fe.n_st_quad() {
                integral += dts[q] * fe.jxw(q);
            }
        }
        // endpoint difference: int_Omega f(1,x) - f(0,x) dx with
        // f(1,x)-f(0,x) = 2 (x^2 + y); integral over unit square = 2(1/3 + 1/2)
        let expect = 2.0 * (1.0 / 3.0 + 0.5);
        assert!((integral - expect).abs() < 1e-10, "{integral} vs {expect}");
    }
}
