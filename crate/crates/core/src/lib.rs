//! Critical speeds and traveling-front profiles for reaction-diffusion equations
//! with Born-Infeld (Minkowski) diffusion
//!
//! ```text
//! (v' / sqrt(a² - b² v'²))' - c v' + f(v) = 0,   v(-∞) = 0,  v(+∞) = 1.
//! ```
//!
//! The numerics are generic over [`Scalar`] (`f32` or `f64`); the `*64` aliases
//! below fix the double precision instantiation used by the command-line tool.

// `!(x > 0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod golden;
pub mod interp;
pub mod ode;
pub mod poly;
pub mod profile;
pub mod reaction;
pub mod reduction;
pub mod roots;
pub mod scalar;
pub mod speed;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
pub use profile::{LimitProfile, Regime};
pub use reaction::{classify, ReactionForm, ReactionSpec, ReactionType};
pub use scalar::Scalar;
pub use sweep::{SweepPlan, SweepReport};

pub type ReactionCalculus64 = reaction::ReactionCalculus<f64>;
pub type ModelParams64 = reduction::ModelParams<f64>;
pub type Diffusion64 = reduction::Diffusion<f64>;
pub type Controls64 = reduction::Controls<f64>;
pub type ReductionSolution64 = reduction::ReductionSolution<f64>;
pub type SpeedBounds64 = speed::SpeedBounds<f64>;
pub type SpeedResult64 = speed::SpeedResult<f64>;
pub type FrontProfile64 = profile::FrontProfile<f64>;
pub type LimitProfile64 = profile::LimitProfile<f64>;
pub type SweepReport64 = sweep::SweepReport<f64>;
