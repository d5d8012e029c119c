//! Mixed finite elements for geometrically exact, inextensible-in-shear
//! (Kirchhoff) rods.
//!
//! Unknowns are nodal displacements and rotations plus, per element, a
//! constant section force and a stretch multiplier. Rotations live on SO(3)
//! and are updated multiplicatively; the Newton tangent is the symmetric
//! second derivative of the discrete functional in exponential coordinates.
//!
//! ```
//! use mixed_rod::model::{Material, ModelBuilder};
//! use mixed_rod::solver::{continuation, SolverConfig};
//! use mixed_rod::Vec3;
//!
//! let mut b = ModelBuilder::new();
//! b.material(0, Material::new(1e6, 1e3, 1e3, 1e3));
//! let root = b.node(Vec3::zeros());
//! let ids = b.line(root, Vec3::new(10.0, 0.0, 0.0), 4, 0);
//! b.clamp(root).force(*ids.last().unwrap(), Vec3::new(0.0, -1.0, 0.0)).steps(2);
//! let model = b.build().unwrap();
//! let path = continuation(&model, &SolverConfig::default());
//! assert!(path.completed());
//! ```

// Index loops read closer to the formulas in dense numeric kernels.
#![allow(clippy::needless_range_loop)]

pub mod element;
pub mod jet;
pub mod model;
pub mod scalar;
pub mod so3;
pub mod solver;
pub mod state;

pub use scalar::Real;
pub use state::State;

pub type Vec3 = so3::Vec3<f64>;
pub type Mat3 = so3::Mat3<f64>;
pub type Skew3 = so3::Skew3<f64>;
pub type Rotation = so3::Rotation<f64>;
