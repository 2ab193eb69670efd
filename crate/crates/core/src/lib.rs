//! Adaptive P1 finite elements for singularly perturbed convection-diffusion
//!
//! `-ε Δu + div(a u) + b u = f` in Ω, `u = 0` on ∂Ω.
//!
//! The crate provides the pieces of a solve → estimate → mark → refine loop
//! driven by a maximum-norm residual estimator:
//!
//! * [`mesh`]: conforming triangulations with newest-vertex bisection
//! * [`problems`]: manufactured test problems on the unit square
//! * [`assembly`]: Galerkin, streamline-diffusion and interior-penalty systems
//! * [`linsolve`]: sparse direct solve with a residual check
//! * [`estimator`]: elementwise maximum-norm indicators
//! * [`seminorms`]: convective-derivative error seminorms and max-norm errors
//! * [`adaptivity`]: modified maximum marking and the adaptive loop
//! * [`rates`]: empirical convergence orders from per-step records
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`.

pub mod adaptivity;
pub mod assembly;
pub mod error;
pub mod estimator;
pub mod field;
pub mod linsolve;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod rates;
pub mod scalar;
pub mod seminorms;
pub mod sparse;

pub use error::{Error, Result};
pub use scalar::{Point, Real};

pub type Mesh64 = mesh::Mesh<f64>;
pub type Mesh32 = mesh::Mesh<f32>;

pub type Problem64 = problems::Problem<f64>;
pub type Problem32 = problems::Problem<f32>;
pub type DiscreteField64 = field::DiscreteField<f64>;
pub type SparseSystem64 = assembly::SparseSystem<f64>;
pub type IndicatorReport64 = estimator::IndicatorReport<f64>;
pub type AdaptConfig64 = adaptivity::AdaptConfig<f64>;
pub type AdaptRecord64 = adaptivity::AdaptRecord<f64>;
