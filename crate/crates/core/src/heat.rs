//! Assembly and solution of the fully discrete heat equation on slabs:
//! per-interval volume terms, jump coupling, weak initial condition, nodal
//! Dirichlet data, forward time marching and the space-time L2 error.

use crate::linalg::{solve_dense_lu, solve_gmres_ilu0, CsrMatrix, SparsityPattern, StVector, DENSE_LU_MAX_SIZE};
use crate::slab::{
    build_spacetime_sparsity, st_dof_index, temporal_pattern, SpaceTimeTriangulation,
    LIMIT_COEFF_THRESHOLD,
};
use crate::stvalues::StFeValues;
use crate::{Error, Result};
use std::collections::HashMap;
use std::sync::Arc;

/// Closed-form solution of the heat equation used to manufacture boundary,
/// initial and right-hand-side data.
pub trait ManufacturedSolution {
    fn u(&self, t: f64, x: [f64; 2]) -> f64;
    fn u_t(&self, t: f64, x: [f64; 2]) -> f64;
    fn grad(&self, t: f64, x: [f64; 2]) -> [f64; 2];
    fn laplacian(&self, t: f64, x: [f64; 2]) -> f64;

    /// Heat equation source `f = du/dt - laplace(u)`.
    fn rhs(&self, t: f64, x: [f64; 2]) -> f64 {
        self.u_t(t, x) - self.laplacian(t, x)
    }
}

/// Moving-bump solution with a peak travelling on a circle (1D: oscillating
/// on a line), nonlinear in time:
/// `u = 1 / (1 + 50 ((x - a(t))^2 + (y - b(t))^2))`.
#[derive(Debug, Clone)]
pub struct HartmannSolution {
    dim: usize,
}

impl HartmannSolution {
    pub fn new(dim: usize) -> HartmannSolution {
        assert!(dim == 1 || dim == 2);
        HartmannSolution { dim }
    }

    /// Bump center at time `t` and its velocity.
    fn center(&self, t: f64) -> ([f64; 2], [f64; 2]) {
        let w = 2.0 * std::f64::consts::PI;
        let c = [
            0.5 + 0.25 * (w * t).cos(),
            if self.dim == 2 { 0.5 + 0.25 * (w * t).sin() } else { 0.0 },
        ];
        let dc = [
            -0.25 * w * (w * t).sin(),
            if self.dim == 2 { 0.25 * w * (w * t).cos() } else { 0.0 },
        ];
        (c, dc)
    }

    fn dist_sq(&self, t: f64, x: [f64; 2]) -> f64 {
        let (c, _) = self.center(t);
        let mut q = (x[0] - c[0]) * (x[0] - c[0]);
        if self.dim == 2 {
            q += (x[1] - c[1]) * (x[1] - c[1]);
        }
        q
    }
}

impl ManufacturedSolution for HartmannSolution {
    fn u(&self, t: f64, x: [f64; 2]) -> f64 {
        1.0 / (1.0 + 50.0 * self.dist_sq(t, x))
    }

    fn u_t(&self, t: f64, x: [f64; 2]) -> f64 {
        let (c, dc) = self.center(t);
        let denom = 1.0 + 50.0 * self.dist_sq(t, x);
        let mut q_t = -2.0 * (x[0] - c[0]) * dc[0];
        if self.dim == 2 {
            q_t += -2.0 * (x[1] - c[1]) * dc[1];
        }
        -50.0 * q_t / (denom * denom)
    }

    fn grad(&self, t: f64, x: [f64; 2]) -> [f64; 2] {
        let (c, _) = self.center(t);
        let denom = 1.0 + 50.0 * self.dist_sq(t, x);
        [
            -100.0 * (x[0] - c[0]) / (denom * denom),
            if self.dim == 2 {
                -100.0 * (x[1] - c[1]) / (denom * denom)
            } else {
                0.0
            },
        ]
    }

    fn laplacian(&self, t: f64, x: [f64; 2]) -> f64 {
        let q = self.dist_sq(t, x);
        let denom = 1.0 + 50.0 * q;
        -100.0 * self.dim as f64 / (denom * denom) + 20000.0 * q / (denom * denom * denom)
    }
}

/// Assembled linear system of one slab, `A u = F`, plus the incoming trace.
pub struct SlabSystem {
    pub matrix: CsrMatrix,
    pub rhs: StVector,
    pub initial_trace: StVector,
}

/// Number of temporal Gauss points used for assembly (`r + 2`).
fn assembly_t_quad(r: usize) -> usize {
    r + 2
}

/// Number of 1D spatial Gauss points used for assembly (`s + 2`).
fn assembly_x_quad(s: usize) -> usize {
    s + 2
}

/// Assemble matrix and right-hand side of slab `slab_idx` of `tri` for the
/// heat equation with data manufactured from `ms`.
///
/// Implements per interval the volume terms `(du/dt, phi) + (grad u, grad
/// phi)`, the jump coupling between consecutive intervals inside the slab,
/// the weak initial term at the slab start and the source `(f, phi)`.
pub fn assemble_slab(
    tri: &SpaceTimeTriangulation,
    slab_idx: usize,
    ms: &dyn ManufacturedSolution,
    initial_trace: &[f64],
    pattern: Arc<SparsityPattern>,
) -> Result<SlabSystem> {
    let slab = tri.slab(slab_idx);
    let spatial = tri.spatial();
    let basis = tri.basis();
    let r = basis.degree();
    let s = spatial.element.degree();
    let n_t_local = basis.n_dofs();
    if initial_trace.len() != slab.n_x {
        return Err(Error::DimensionMismatch {
            expected: slab.n_x,
            got: initial_trace.len(),
        });
    }

    let mut matrix = CsrMatrix::new(pattern);
    let mut rhs = vec![0.0; slab.n_system_dofs()];

    let mut fe = StFeValues::new(
        Arc::clone(spatial),
        basis,
        assembly_t_quad(r),
        assembly_x_quad(s),
    );
    let ll = basis.limit_left();
    let lr = basis.limit_right();
    let n_loc = fe.n_st_dofs();
    let n_x_loc = spatial.element.n_dofs_per_cell();

    let mut local_a = vec![vec![0.0; n_loc]; n_loc];
    let mut local_f = vec![0.0; n_loc];

    for cell in 0..spatial.mesh.n_cells() {
        fe.reinit_space(cell);
        let mass = fe.cell_mass_matrix();
        let cell_dofs = fe.cell_dofs().to_vec();

        let mut prev_indices: Option<Vec<usize>> = None;
        for m in 0..slab.n_intervals {
            let global_m = slab.first_interval + m;
            let (t0, t1) = tri.temporal_mesh().interval(global_m);
            fe.reinit_time(t0, t1 - t0);
            let indices = fe.local_dof_indices(slab, m);

            for row in &mut local_a {
                row.fill(0.0);
            }
            local_f.fill(0.0);
            for q in 0..fe.n_st_quad() {
                let w = fe.jxw(q);
                let (t, x) = fe.quadrature_point(q);
                let f_val = ms.rhs(t, x);
                for i in 0..n_loc {
                    let vi = fe.shape_value(i, q);
                    let gi = fe.shape_space_grad(i, q);
                    local_f[i] += w * f_val * vi;
                    for j in 0..n_loc {
                        let dt_j = fe.shape_dt(j, q);
                        let gj = fe.shape_space_grad(j, q);
                        local_a[i][j] += w * (dt_j * vi + gi[0] * gj[0] + gi[1] * gj[1]);
                    }
                }
            }
            for (i, &gi) in indices.iter().enumerate() {
                rhs[gi] += local_f[i];
                for (j, &gj) in indices.iter().enumerate() {
                    if local_a[i][j] != 0.0 {
                        matrix.add_entry(gi, gj, local_a[i][j])?;
                    }
                }
            }

            // jump terms: (u+ - u-, phi+) at the interval start
            for i_t in 0..n_t_local {
                if ll[i_t].abs() <= LIMIT_COEFF_THRESHOLD {
                    continue;
                }
                for j_t in 0..n_t_local {
                    // plus-plus block always lands in the dense diagonal block
                    if ll[j_t].abs() > LIMIT_COEFF_THRESHOLD {
                        let c = ll[i_t] * ll[j_t];
                        for a in 0..n_x_loc {
                            let gi = indices[a + n_x_loc * i_t];
                            for b in 0..n_x_loc {
                                let gj = indices[b + n_x_loc * j_t];
                                matrix.add_entry(gi, gj, c * mass[a][b])?;
                            }
                        }
                    }
                    if m > 0 && lr[j_t].abs() > LIMIT_COEFF_THRESHOLD {
                        let prev = prev_indices.as_ref().expect("previous interval cached");
                        let c = -ll[i_t] * lr[j_t];
                        for a in 0..n_x_loc {
                            let gi = indices[a + n_x_loc * i_t];
                            for b in 0..n_x_loc {
                                let gj = prev[b + n_x_loc * j_t];
                                matrix.add_entry(gi, gj, c * mass[a][b])?;
                            }
                        }
                    }
                }
                if m == 0 {
                    // (initial_trace, phi+) on the right-hand side
                    for a in 0..n_x_loc {
                        let gi = indices[a + n_x_loc * i_t];
                        let mut v = 0.0;
                        for b in 0..n_x_loc {
                            v += mass[a][b] * initial_trace[cell_dofs[b]];
                        }
                        rhs[gi] += ll[i_t] * v;
                    }
                }
            }
            prev_indices = Some(indices);
        }
    }

    Ok(SlabSystem {
        matrix,
        rhs,
        initial_trace: initial_trace.to_vec(),
    })
}

/// Impose Dirichlet data by nodal interpolation at the temporal node times:
/// each boundary row becomes an identity row with `g(t_node, x_node)` on the
/// right-hand side; columns are eliminated symmetrically.
pub fn apply_dirichlet(
    system: &mut SlabSystem,
    tri: &SpaceTimeTriangulation,
    slab_idx: usize,
    g: &dyn Fn(f64, [f64; 2]) -> f64,
) {
    let slab = tri.slab(slab_idx);
    let spatial = tri.spatial();
    let basis = tri.basis();
    let n_t_local = basis.n_dofs();
    let n = slab.n_system_dofs();

    let boundary = spatial.dofs.boundary_dofs();
    let mut constrained: Vec<Option<f64>> = vec![None; n];
    for m in 0..slab.n_intervals {
        let (t0, t1) = tri.temporal_mesh().interval(slab.first_interval + m);
        for (i_t_local, &tau) in basis.nodes().iter().enumerate() {
            let t = t0 + (t1 - t0) * tau;
            let i_t = m * n_t_local + i_t_local;
            for &bx in &boundary {
                let row = st_dof_index(bx, i_t, slab.n_x);
                constrained[row] = Some(g(t, spatial.dofs.dof_point(bx)));
            }
        }
    }

    // move constrained columns to the right-hand side, then reset the rows
    for row in 0..n {
        if constrained[row].is_some() {
            continue;
        }
        let mut shift = 0.0;
        let (cols, vals) = system.matrix.row_entries_mut(row);
        for (col, val) in cols.iter().zip(vals.iter_mut()) {
            if let Some(v) = constrained[*col] {
                shift += *val * v;
                *val = 0.0;
            }
        }
        system.rhs[row] -= shift;
    }
    for (row, c) in constrained.iter().enumerate() {
        if let Some(v) = c {
            system.matrix.zero_row(row);
            system
                .matrix
                .set(row, row, 1.0)
                .expect("diagonal present in pattern");
            system.rhs[row] = *v;
        }
    }
}

/// Final-time trace `u^-(t_end)` of a solved slab: the right-limit
/// combination of the last interval's temporal DoFs, per spatial DoF.
pub fn extract_final_trace(
    tri: &SpaceTimeTriangulation,
    slab_idx: usize,
    solution: &[f64],
) -> StVector {
    let slab = tri.slab(slab_idx);
    let basis = tri.basis();
    let lr = basis.limit_right();
    let last = slab.n_intervals - 1;
    let mut trace = vec![0.0; slab.n_x];
    for (i_t_local, &c) in lr.iter().enumerate() {
        if c.abs() <= LIMIT_COEFF_THRESHOLD {
            continue;
        }
        let i_t = last * basis.n_dofs() + i_t_local;
        for g in 0..slab.n_x {
            trace[g] += c * solution[st_dof_index(g, i_t, slab.n_x)];
        }
    }
    trace
}

/// Options controlling the slab solves during time marching.
#[derive(Debug, Clone)]
pub struct MarchOptions {
    pub rtol: f64,
    pub max_iter: usize,
}

impl Default for MarchOptions {
    fn default() -> Self {
        MarchOptions {
            rtol: 1e-12,
            max_iter: 5000,
        }
    }
}

/// Sequential forward solve over all slabs. Each slab receives the
/// predecessor's final trace as initial value; the first slab starts from the
/// nodal interpolant of `ms.u(0, .)`.
pub fn march(
    tri: &SpaceTimeTriangulation,
    ms: &dyn ManufacturedSolution,
    options: &MarchOptions,
) -> Result<Vec<StVector>> {
    let spatial = tri.spatial();
    let mut trace = spatial.interpolate(|x| ms.u(0.0, x));
    let mut solutions = Vec::with_capacity(tri.n_slabs());

    let s_x = spatial.build_sparsity();
    let mut pattern_cache: HashMap<usize, Arc<SparsityPattern>> = HashMap::new();

    for slab_idx in 0..tri.n_slabs() {
        let slab = tri.slab(slab_idx);
        let pattern = match pattern_cache.get(&slab.n_intervals) {
            Some(p) => Arc::clone(p),
            None => {
                let s_t = temporal_pattern(slab.n_intervals, tri.basis());
                let p = Arc::new(build_spacetime_sparsity(&s_x, &s_t, slab.n_x)?);
                pattern_cache.insert(slab.n_intervals, Arc::clone(&p));
                p
            }
        };
        let mut system = assemble_slab(tri, slab_idx, ms, &trace, pattern)
            .map_err(|e| Error::SlabSolveFailed {
                slab: slab_idx,
                source: Box::new(e),
            })?;
        apply_dirichlet(&mut system, tri, slab_idx, &|t, x| ms.u(t, x));

        let solution = match solve_gmres_ilu0(
            &system.matrix,
            &system.rhs,
            options.rtol,
            options.max_iter,
        ) {
            Ok((x, _)) => x,
            Err(err) if system.matrix.n_rows() <= DENSE_LU_MAX_SIZE => {
                solve_dense_lu(&system.matrix.to_dense(), &system.rhs).map_err(|_| {
                    Error::SlabSolveFailed {
                        slab: slab_idx,
                        source: Box::new(err),
                    }
                })?
            }
            Err(err) => {
                return Err(Error::SlabSolveFailed {
                    slab: slab_idx,
                    source: Box::new(err),
                })
            }
        };
        trace = extract_final_trace(tri, slab_idx, &solution);
        solutions.push(solution);
    }
    Ok(solutions)
}

/// Space-time L2 error `||u_kh - u||_{L2(I, L2(Omega))}`, evaluated with
/// quadrature one order above assembly (`r + 3` temporal, `(s + 3)^dim`
/// spatial points).
pub fn l2_l2_error(
    tri: &SpaceTimeTriangulation,
    solutions: &[StVector],
    ms: &dyn ManufacturedSolution,
) -> f64 {
    let spatial = tri.spatial();
    let basis = tri.basis();
    let r = basis.degree();
    let s = spatial.element.degree();
    let mut fe = StFeValues::new(Arc::clone(spatial), basis, r + 3, s + 3);

    let mut total = 0.0;
    let mut values = Vec::new();
    for (slab_idx, solution) in solutions.iter().enumerate() {
        let slab = tri.slab(slab_idx);
        for cell in 0..spatial.mesh.n_cells() {
            fe.reinit_space(cell);
            for m in 0..slab.n_intervals {
                let (t0, t1) = tri.temporal_mesh().interval(slab.first_interval + m);
                fe.reinit_time(t0, t1 - t0);
                let indices = fe.local_dof_indices(slab, m);
                fe.get_function_values(solution, &indices, &mut values);
                for q in 0..fe.n_st_quad() {
                    let (t, x) = fe.quadrature_point(q);
                    let diff = values[q] - ms.u(t, x);
                    total += diff * diff * fe.jxw(q);
                }
            }
        }
    }
    total.sqrt()
}

/// Experimental orders of convergence:
/// `EOC_i = log(e_{i-1} / e_i) / log(h_{i-1} / h_i)`.
pub fn eoc(errors: &[f64], mesh_sizes: &[f64]) -> Result<Vec<f64>> {
    if errors.len() != mesh_sizes.len() || errors.len() < 2 {
        return Err(Error::InvalidConfig(
            "EOC needs two same-length positive sequences".into(),
        ));
    }
    if errors.iter().chain(mesh_sizes).any(|&v| v <= 0.0) {
        return Err(Error::InvalidConfig("EOC inputs must be positive".into()));
    }
    Ok(errors
        .windows(2)
        .zip(mesh_sizes.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect())
}
