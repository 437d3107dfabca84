//! Tensor-product space-time discontinuous Galerkin (dG in time, cG in space)
//! finite element kernel for parabolic model problems.
//!
//! The discretization couples a fixed spatial mesh with a temporal mesh through
//! *slabs*: Cartesian products of one or more consecutive temporal elements with
//! the spatial triangulation. Each slab yields one sparse linear system under a
//! space-major DoF numbering `i = i_x + N_x * i_t`; slabs are solved by forward
//! time marching, transferring the final-time trace between neighbours.

pub mod heat;
pub mod linalg;
pub mod polynomial;
pub mod slab;
pub mod spatial;
pub mod study;
pub mod stvalues;
pub mod temporal;

mod error;

pub use error::Error;
pub use heat::{HartmannSolution, ManufacturedSolution, SlabSystem};
pub use linalg::{CsrMatrix, SparsityPattern, StVector};
pub use slab::{SpaceTimeTriangulation, TemporalMesh, TimeIteratorCollection};
pub use spatial::SpatialDiscretization;
pub use study::{RefineMode, StudyConfig, StudyRow};
pub use temporal::{SupportType, TemporalBasis, TemporalQuadrature};

pub type Result<T> = std::result::Result<T, Error>;
