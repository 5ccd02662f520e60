//! Discrete Langevin proposals and their entropic (auxiliary-variable)
//! extension, with unadjusted, Metropolis-adjusted and Gibbs-like kernels.
//!
//! The entropic kernels run on the joint density
//! `p(θ, θ_a) ∝ exp{U(θ) − ‖θ − θ_a‖² / (2η)}` whose `θ`-marginal is the
//! target. `Coupling::Decoupled` stands for `η = ∞` and turns every kernel
//! into its plain DLP counterpart (DULA / DMALA).

mod config;
mod proposal;
mod step;

pub use config::{AuxBox, Coupling, GradientMode, SamplerConfig};
pub use proposal::{
    auxiliary_mean, build_coordinate_proposal, discrete_proposals, joint_energy, joint_gradient,
    log_q_auxiliary, log_q_discrete, propose_auxiliary, propose_auxiliary_with_noise,
    propose_discrete, CoordinateProposal, JointGradient,
};
pub use step::{
    glu_step, mh_step, step, transition_terms, unadjusted_step, StepOutcome, TransitionTerms,
};
