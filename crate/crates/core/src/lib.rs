//! Weak Galerkin finite elements for the clamped biharmonic problem
//!
//! Δ²u = f in Ω, u = g and ∂u/∂n = φ on ∂Ω,
//!
//! discretized on polygonal meshes with the reduced element
//! (P_k(T), P_{k-1}(e), P_{k-1}(e)) for k ≥ 2. Unknowns are a cell
//! polynomial u_0, an edge trace u_b and an edge normal derivative
//! u_n (stored against one fixed normal n_e per edge). The bilinear
//! form is the discrete weak Laplacian Gram matrix plus a parameter
//! free edge stabilizer.
//!
//! Typical use:
//!
//! ```
//! use wg_biharmonic::prelude::*;
//!
//! let mesh = Mesh::uniform_triangles(4).unwrap();
//! let space = WgSpace::new(&mesh, 2).unwrap();
//! let problem = Problem::example_1();
//! let system = assemble_system(&space, problem.source(), &AssemblyOptions::default()).unwrap();
//! let reduced = apply_boundary_conditions(&space, &system, problem.trace(), problem.flux()).unwrap();
//! let outcome = solve(&reduced.matrix, &reduced.rhs, &SolverConfig::default()).unwrap();
//! let uh = reduced.expand(&space, &outcome.solution);
//! let report = compute_errors(&space, &uh, problem.solution()).unwrap();
//! assert!(report.l2_interior < 0.1);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod basis;
pub mod error;
pub mod manufactured;
pub mod mesh;
pub mod norms;
pub mod projection;
pub mod quadrature;
pub mod solver;
pub mod space;
pub mod sparse;
pub mod study;
pub mod weak_laplacian;

pub use error::{Result, WgError};

pub type Point = nalgebra::Point2<f64>;
pub type Vector = nalgebra::Vector2<f64>;

pub mod prelude {
    pub use crate::assembly::{
        apply_boundary_conditions, assemble_system, AssemblyOptions, DofLayout, ReducedSystem,
        SparseSymmetricSystem,
    };
    pub use crate::manufactured::Problem;
    pub use crate::mesh::{CellGeometry, EdgeGeometry, Mesh};
    pub use crate::norms::{compute_errors, triple_bar_norm, ErrorReport};
    pub use crate::projection::{project_field, FieldFn, NormalFlux, ScalarField, WgField};
    pub use crate::solver::{solve, Preconditioner, SolverConfig, SolverMethod};
    pub use crate::space::{QuadratureConfig, WgSpace};
    pub use crate::study::{run_study, MeshFamily, StudyConfig};
    pub use crate::{Point, Vector};
}
