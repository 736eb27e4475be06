//! High-order discontinuous Galerkin operators and model solvers for PDEs on
//! curved closed surfaces (sphere, Earth-like ellipsoid) expressed through
//! per-element orthonormal moving frames.
//!
//! The crate is organized bottom-up:
//!
//! - [`refelem`]: nodal machinery on the standard triangle,
//! - [`mesh`]: curved icosahedral surface meshes with frozen degree-q geometry,
//! - [`frames`]: LOCAL and geometry-aligned (LOCSPH) frame fields,
//! - [`spurious`]: the spurious-divergence split produced by geometric
//!   approximation error,
//! - [`dgops`]: weak divergence / normal curl / directional gradient operators,
//! - [`solvers`]: advection, Maxwell (TM) and shallow-water model problems with
//!   RK4 marching and conservation diagnostics.

pub mod analytic;
pub mod dgops;
pub mod error;
pub mod frames;
pub mod mesh;
pub(crate) mod ops;
pub mod refelem;
pub mod solvers;
pub mod spurious;

pub use error::{Error, Result};
pub use frames::{FrameField, FrameKind, NormalRule};
pub use mesh::{MeshGeometry, MeshStats, SurfaceKind, SurfaceMesh};
pub use refelem::{build_reference_element, Axis, ReferenceElement};
pub use spurious::SpuriousSplit;
