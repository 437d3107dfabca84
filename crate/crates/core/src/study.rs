//! Batch driver for convergence studies: h-, k- and kh-refinement on the
//! moving-bump problem, support-type comparison, CSV emission and VTK
//! solution slices.

use crate::heat::{l2_l2_error, march, HartmannSolution, MarchOptions};
use crate::linalg::StVector;
use crate::slab::{st_dof_index, SpaceTimeTriangulation, TemporalMesh};
use crate::spatial::SpatialDiscretization;
use crate::temporal::{SupportType, TemporalBasis};
use crate::{Error, Result};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefineMode {
    /// Refine only the spatial mesh.
    H,
    /// Refine only the temporal mesh.
    K,
    /// Refine both simultaneously.
    KH,
}

impl RefineMode {
    pub fn parse(s: &str) -> Result<RefineMode> {
        match s.to_ascii_lowercase().as_str() {
            "h" => Ok(RefineMode::H),
            "k" => Ok(RefineMode::K),
            "kh" => Ok(RefineMode::KH),
            other => Err(Error::InvalidConfig(format!(
                "unknown refine mode '{other}' (expected h, k or kh)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RefineMode::H => "h",
            RefineMode::K => "k",
            RefineMode::KH => "kh",
        }
    }
}

/// Parameters of one convergence study.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub dim: usize,
    pub spatial_degree: usize,
    pub temporal_degree: usize,
    pub support_type: SupportType,
    pub t_final: f64,
    pub initial_m: usize,
    pub initial_refinements: usize,
    pub n_max: usize,
    pub n_refinement_steps: usize,
    pub refine_mode: RefineMode,
    pub rtol: f64,
    pub csv_path: Option<PathBuf>,
    pub vtk_dir: Option<PathBuf>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            dim: 2,
            spatial_degree: 1,
            temporal_degree: 1,
            support_type: SupportType::Lobatto,
            t_final: 1.0,
            initial_m: 4,
            initial_refinements: 2,
            n_max: 1,
            n_refinement_steps: 3,
            refine_mode: RefineMode::KH,
            rtol: 1e-12,
            csv_path: None,
            vtk_dir: None,
        }
    }
}

impl StudyConfig {
    /// Parse a flat `key=value` file with `#` comments.
    pub fn from_file(path: &Path) -> Result<StudyConfig> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_str(&text)
    }

    pub fn from_str(text: &str) -> Result<StudyConfig> {
        let mut cfg = StudyConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key=value", lineno + 1))
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let parse_usize = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| Error::InvalidConfig(format!("'{v}' is not a non-negative integer")))
        };
        let parse_f64 = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("'{v}' is not a number")))
        };
        match key {
            "dim" => self.dim = parse_usize(value)?,
            "s" => self.spatial_degree = parse_usize(value)?,
            "r" => self.temporal_degree = parse_usize(value)?,
            "support_type" => self.support_type = SupportType::parse(value)?,
            "t_final" => self.t_final = parse_f64(value)?,
            "m" => self.initial_m = parse_usize(value)?,
            "refines" => self.initial_refinements = parse_usize(value)?,
            "n_max" => self.n_max = parse_usize(value)?,
            "steps" => self.n_refinement_steps = parse_usize(value)?,
            "refine_mode" => self.refine_mode = RefineMode::parse(value)?,
            "rtol" => self.rtol = parse_f64(value)?,
            "csv" => self.csv_path = Some(PathBuf::from(value)),
            "vtk" => self.vtk_dir = Some(PathBuf::from(value)),
            other => {
                return Err(Error::InvalidConfig(format!("unknown key '{other}'")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 2 {
            return Err(Error::InvalidConfig("dim must be 1 or 2".into()));
        }
        if self.spatial_degree < 1 || self.spatial_degree > crate::spatial::MAX_SPATIAL_DEGREE {
            return Err(Error::InvalidConfig(format!(
                "s must be between 1 and {}",
                crate::spatial::MAX_SPATIAL_DEGREE
            )));
        }
        if self.temporal_degree > crate::temporal::MAX_TEMPORAL_DEGREE {
            return Err(Error::InvalidConfig(format!(
                "r must be at most {}",
                crate::temporal::MAX_TEMPORAL_DEGREE
            )));
        }
        if self.initial_m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if self.n_refinement_steps < 1 {
            return Err(Error::InvalidConfig("steps must be at least 1".into()));
        }
        if self.t_final <= 0.0 {
            return Err(Error::InvalidConfig("t_final must be positive".into()));
        }
        if !(self.rtol > 0.0) {
            return Err(Error::InvalidConfig("rtol must be positive".into()));
        }
        Ok(())
    }
}

/// One refinement level of a study.
#[derive(Debug, Clone)]
pub struct StudyRow {
    pub level: usize,
    pub m: usize,
    pub n_x: usize,
    /// Space-time DoF total, `M (r + 1) N_x`.
    pub dofs: usize,
    pub error: f64,
    pub eoc: Option<f64>,
    pub seconds: f64,
}

fn build_triangulation(
    cfg: &StudyConfig,
    refinements: usize,
    m: usize,
) -> Result<SpaceTimeTriangulation> {
    let spatial = Arc::new(SpatialDiscretization::new(
        cfg.dim,
        refinements,
        cfg.spatial_degree,
    )?);
    let basis = TemporalBasis::new(cfg.temporal_degree, cfg.support_type)?;
    Ok(SpaceTimeTriangulation::new(
        TemporalMesh::uniform(cfg.t_final, m)?,
        spatial,
        basis,
        cfg.n_max,
    ))
}

/// Run the configured refinement study on the moving-bump problem.
///
/// Refines space and/or time per `refine_mode`, solving each level and
/// recording error, EOC and wall time. On solver failure the rows computed so
/// far are flushed to the CSV path (when set) before the error propagates.
pub fn run_study(cfg: &StudyConfig) -> Result<Vec<StudyRow>> {
    cfg.validate()?;
    let ms = HartmannSolution::new(cfg.dim);
    let options = MarchOptions {
        rtol: cfg.rtol,
        ..Default::default()
    };
    let mut rows: Vec<StudyRow> = Vec::new();
    let mut mesh_sizes = Vec::new();
    let mut errors = Vec::new();

    for level in 0..cfg.n_refinement_steps {
        let (refinements, m) = match cfg.refine_mode {
            RefineMode::H => (cfg.initial_refinements + level, cfg.initial_m),
            RefineMode::K => (cfg.initial_refinements, cfg.initial_m << level),
            RefineMode::KH => (cfg.initial_refinements + level, cfg.initial_m << level),
        };
        let tri = build_triangulation(cfg, refinements, m)?;
        let start = Instant::now();
        let solutions = match march(&tri, &ms, &options) {
            Ok(s) => s,
            Err(err) => {
                if let Some(path) = &cfg.csv_path {
                    let _ = write_csv(&rows, path);
                }
                return Err(err);
            }
        };
        let error = l2_l2_error(&tri, &solutions, &ms);
        let seconds = start.elapsed().as_secs_f64();

        let mesh_size = match cfg.refine_mode {
            RefineMode::K => cfg.t_final / m as f64,
            RefineMode::H | RefineMode::KH => tri.spatial().mesh.h(),
        };
        mesh_sizes.push(mesh_size);
        errors.push(error);
        let eoc_value = if errors.len() >= 2 {
            crate::heat::eoc(&errors, &mesh_sizes)?.last().copied()
        } else {
            None
        };
        rows.push(StudyRow {
            level,
            m,
            n_x: tri.spatial().n_dofs(),
            dofs: tri.n_total_dofs(),
            error,
            eoc: eoc_value,
            seconds,
        });

        if let Some(dir) = &cfg.vtk_dir {
            let times: Vec<f64> = (0..=4).map(|i| cfg.t_final * i as f64 / 4.0).collect();
            write_vtk_slices(&tri, &solutions, &times, &dir.join(format!("level{level}")))?;
        }
    }
    if let Some(path) = &cfg.csv_path {
        write_csv(&rows, path)?;
    }
    Ok(rows)
}

/// Error of one support type relative to Gauss-Lobatto at one level.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub level: usize,
    pub m: usize,
    pub support_type: SupportType,
    pub error: f64,
    /// `error / error(Lobatto)` on the same meshes.
    pub ratio: f64,
}

/// k-refinement comparison of all support-point families against
/// Gauss-Lobatto; ratios are reported per refinement level.
pub fn run_support_type_comparison(cfg: &StudyConfig) -> Result<Vec<ComparisonRow>> {
    cfg.validate()?;
    if cfg.temporal_degree < 1 {
        return Err(Error::InvalidConfig(
            "support-type comparison needs r >= 1".into(),
        ));
    }
    let ms = HartmannSolution::new(cfg.dim);
    let options = MarchOptions {
        rtol: cfg.rtol,
        ..Default::default()
    };
    let mut rows = Vec::new();
    for level in 0..cfg.n_refinement_steps {
        let m = cfg.initial_m << level;
        let mut lobatto_error = None;
        let mut level_rows = Vec::new();
        for st in SupportType::ALL {
            let mut level_cfg = cfg.clone();
            level_cfg.support_type = st;
            let tri = build_triangulation(&level_cfg, cfg.initial_refinements, m)?;
            let solutions = march(&tri, &ms, &options)?;
            let error = l2_l2_error(&tri, &solutions, &ms);
            if st == SupportType::Lobatto {
                lobatto_error = Some(error);
            }
            level_rows.push((st, error));
        }
        let reference = lobatto_error.expect("Lobatto run present");
        for (st, error) in level_rows {
            rows.push(ComparisonRow {
                level,
                m,
                support_type: st,
                error,
                ratio: error / reference,
            });
        }
    }
    Ok(rows)
}

/// Format comparison rows as a percentage table.
pub fn format_comparison_table(rows: &[ComparisonRow]) -> String {
    let mut out = String::from("level,M,support_type,error,ratio_vs_lobatto\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{:.6e},{:.2}%\n",
            row.level,
            row.m,
            row.support_type.name(),
            row.error,
            100.0 * row.ratio
        ));
    }
    out
}

/// Write study rows as CSV with header `level,M,Nx,dofs,error,eoc,seconds`.
pub fn write_csv(rows: &[StudyRow], path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io_err)?;
        }
    }
    let mut text = String::from("level,M,Nx,dofs,error,eoc,seconds\n");
    for row in rows {
        let eoc = row.eoc.map_or(String::new(), |e| format!("{e:.4}"));
        text.push_str(&format!(
            "{},{},{},{},{:.12e},{},{:.3}\n",
            row.level, row.m, row.n_x, row.dofs, row.error, eoc, row.seconds
        ));
    }
    std::fs::write(path, text).map_err(io_err)
}

/// Spatial nodal values of the space-time solution at time `t`.
pub fn evaluate_at_time(
    tri: &SpaceTimeTriangulation,
    solutions: &[StVector],
    t: f64,
) -> StVector {
    let mesh = tri.temporal_mesh();
    let basis = tri.basis();
    let n_x = tri.spatial().n_dofs();
    // containing interval; clamp to the last at t = T
    let m_global = mesh
        .breaks()
        .windows(2)
        .position(|w| t >= w[0] && t < w[1])
        .unwrap_or(mesh.n_intervals() - 1);
    let (slab_idx, slab) = tri
        .slabs()
        .enumerate()
        .find(|(_, s)| {
            m_global >= s.first_interval && m_global < s.first_interval + s.n_intervals
        })
        .expect("time inside some slab");
    let m_local = m_global - slab.first_interval;
    let (t0, t1) = mesh.interval(m_global);
    let tau = (t - t0) / (t1 - t0);
    let mut values = vec![0.0; n_x];
    for i_t_local in 0..basis.n_dofs() {
        let c = basis.shape_value(i_t_local, tau);
        let i_t = m_local * basis.n_dofs() + i_t_local;
        for g in 0..n_x {
            values[g] += c * solutions[slab_idx][st_dof_index(g, i_t, slab.n_x)];
        }
    }
    values
}

/// Write one VTK legacy ASCII structured-grid file per requested time slice,
/// with the solution as a point scalar field `u`.
pub fn write_vtk_slices(
    tri: &SpaceTimeTriangulation,
    solutions: &[StVector],
    times: &[f64],
    dir: &Path,
) -> Result<()> {
    let io_err = |source| Error::Io {
        path: dir.display().to_string(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(io_err)?;
    let spatial = tri.spatial();
    let n_x = spatial.n_dofs();
    let dim = spatial.mesh.dim();
    let nodes_per_dim = if dim == 1 { n_x } else { (n_x as f64).sqrt().round() as usize };

    for (slice, &t) in times.iter().enumerate() {
        let values = evaluate_at_time(tri, solutions, t);
        let path = dir.join(format!("u_slice_{slice:03}.vtk"));
        let result = (|| -> std::io::Result<()> {
            let mut f = std::io::BufWriter::new(std::fs::File::create(&path)?);
            writeln!(f, "# vtk DataFile Version 3.0")?;
            writeln!(f, "solution slice at t={t}")?;
            writeln!(f, "ASCII")?;
            writeln!(f, "DATASET STRUCTURED_GRID")?;
            if dim == 1 {
                writeln!(f, "DIMENSIONS {nodes_per_dim} 1 1")?;
            } else {
                writeln!(f, "DIMENSIONS {nodes_per_dim} {nodes_per_dim} 1")?;
            }
            writeln!(f, "POINTS {n_x} double")?;
            for g in 0..n_x {
                let p = spatial.dofs.dof_point(g);
                writeln!(f, "{} {} 0", p[0], p[1])?;
            }
            writeln!(f, "POINT_DATA {n_x}")?;
            writeln!(f, "SCALARS u double 1")?;
            writeln!(f, "LOOKUP_TABLE default")?;
            for &v in &values {
                writeln!(f, "{v}")?;
            }
            Ok(())
        })();
        result.map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
    }
    Ok(())
}
