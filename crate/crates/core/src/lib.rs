//! Gradient-based samplers for discrete energy models, including the
//! entropic discrete Langevin family that biases exploration toward flat
//! modes, plus baselines, exact oracles and flatness diagnostics.

pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod kernel;
pub mod math;
pub mod model;
pub mod oracle;
pub mod runner;
pub mod state;

pub use error::{Error, Result};
pub use kernel::{Coupling, GradientMode, SamplerConfig};
pub use model::{AnyModel, EnergyModel, ModelKind};
pub use runner::{run, RunPlan, RunReport, SamplerKind};
pub use state::{DiscreteState, JointState};
