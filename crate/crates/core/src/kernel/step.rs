use rand::Rng;
use rand_distr::StandardNormal;

use super::config::SamplerConfig;
use super::proposal::{
    clamp_into, discrete_proposals, joint_energy, log_q_auxiliary, log_q_discrete,
    propose_auxiliary, sample_from, score,
};
use crate::error::{Error, Result};
use crate::model::EnergyModel;
use crate::state::JointState;

/// Result of one kernel application.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub state: JointState,
    pub accepted: bool,
    /// The proposed `θ′` was infeasible and was rejected before any
    /// acceptance test.
    pub invalid: bool,
    /// `log min(1, r)`; zero for unadjusted kernels.
    pub log_accept_prob: f64,
    pub proposal_log_q_fwd: f64,
    /// Reverse proposal log density; only computed by adjusted kernels.
    pub proposal_log_q_rev: f64,
}

impl StepOutcome {
    fn rejected_invalid(state: &JointState, log_q_fwd: f64) -> Self {
        Self {
            state: state.clone(),
            accepted: false,
            invalid: true,
            log_accept_prob: f64::NEG_INFINITY,
            proposal_log_q_fwd: log_q_fwd,
            proposal_log_q_rev: 0.0,
        }
    }
}

/// Dispatches on the configuration: Gibbs-like, adjusted or unadjusted.
pub fn step<M, R>(
    state: &JointState,
    config: &SamplerConfig,
    model: &M,
    rng: &mut R,
) -> Result<StepOutcome>
where
    M: EnergyModel + ?Sized,
    R: Rng + ?Sized,
{
    if config.glu {
        glu_step(state, config, model, rng)
    } else if config.mh {
        mh_step(state, config, model, rng)
    } else {
        unadjusted_step(state, config, model, rng)
    }
}

struct Proposed {
    state: JointState,
    log_q_discrete: f64,
    log_q_aux: f64,
}

fn propose_joint<M, R>(
    state: &JointState,
    config: &SamplerConfig,
    model: &M,
    rng: &mut R,
) -> Result<Proposed>
where
    M: EnergyModel + ?Sized,
    R: Rng + ?Sized,
{
    let proposals = discrete_proposals(state, config, model)?;
    let (theta, log_q_discrete) = sample_from(&proposals, model, rng);
    let (theta_a, log_q_aux) = if config.coupling.is_finite() {
        propose_auxiliary(state, config, rng)?
    } else {
        (state.theta_a.clone(), 0.0)
    };
    Ok(Proposed {
        state: JointState { theta, theta_a },
        log_q_discrete,
        log_q_aux,
    })
}

/// Metropolis-adjusted joint move (EDMALA; DMALA when decoupled). `θ` and
/// `θ_a` are accepted or rejected together.
pub fn mh_step<M, R>(
    state: &JointState,
    config: &SamplerConfig,
    model: &M,
    rng: &mut R,
) -> Result<StepOutcome>
where
    M: EnergyModel + ?Sized,
    R: Rng + ?Sized,
{
    if !config.mh || config.glu {
        return Err(Error::KernelMisuse(
            "mh_step needs mh = true and glu = false".into(),
        ));
    }
    state.check_dim(model.dim())?;
    let proposed = propose_joint(state, config, model, rng)?;
    let u: f64 = rng.random();
    let log_q_fwd = proposed.log_q_discrete + proposed.log_q_aux;
    if !model.is_valid(proposed.state.theta.values()) {
        return Ok(StepOutcome::rejected_invalid(state, log_q_fwd));
    }

    let mut log_q_rev = log_q_discrete(&state.theta, &proposed.state, config, model)?;
    if config.coupling.is_finite() {
        log_q_rev += log_q_auxiliary(&state.theta_a, &proposed.state, config)?;
    }
    let log_ratio = log_q_rev - log_q_fwd + joint_energy(&proposed.state, config.coupling, model)?
        - joint_energy(state, config.coupling, model)?;
    let log_accept_prob = accept_prob(log_ratio)?;
    let accepted = u < log_accept_prob.exp();
    Ok(StepOutcome {
        state: if accepted {
            proposed.state
        } else {
            state.clone()
        },
        accepted,
        invalid: false,
        log_accept_prob,
        proposal_log_q_fwd: log_q_fwd,
        proposal_log_q_rev: log_q_rev,
    })
}

fn accept_prob(log_ratio: f64) -> Result<f64> {
    if log_ratio.is_nan() {
        return Err(Error::Numeric("acceptance ratio is NaN".into()));
    }
    Ok(log_ratio.min(0.0))
}

/// Unadjusted joint move (EDULA; DULA when decoupled).
pub fn unadjusted_step<M, R>(
    state: &JointState,
    config: &SamplerConfig,
    model: &M,
    rng: &mut R,
) -> Result<StepOutcome>
where
    M: EnergyModel + ?Sized,
    R: Rng + ?Sized,
{
    if config.mh || config.glu {
        return Err(Error::KernelMisuse(
            "unadjusted_step needs mh = false and glu = false".into(),
        ));
    }
    state.check_dim(model.dim())?;
    let proposed = propose_joint(state, config, model, rng)?;
    let log_q_fwd = proposed.log_q_discrete + proposed.log_q_aux;
    if !model.is_valid(proposed.state.theta.values()) {
        return Ok(StepOutcome::rejected_invalid(state, log_q_fwd));
    }
    Ok(StepOutcome {
        state: proposed.state,
        accepted: true,
        invalid: false,
        log_accept_prob: 0.0,
        proposal_log_q_fwd: log_q_fwd,
        proposal_log_q_rev: 0.0,
    })
}

/// Gibbs-like update: draw `θ_a ~ N(θ, η I)` exactly, then move `θ` with the
/// discrete proposal conditioned on the new `θ_a`, optionally MH-corrected
/// against `p(θ | θ_a)`. The fresh `θ_a` is kept whatever happens to `θ`.
pub fn glu_step<M, R>(
    state: &JointState,
    config: &SamplerConfig,
    model: &M,
    rng: &mut R,
) -> Result<StepOutcome>
where
    M: EnergyModel + ?Sized,
    R: Rng + ?Sized,
{
    let eta = match (config.glu, config.coupling.eta()) {
        (true, Some(eta)) => eta,
        (false, _) => return Err(Error::KernelMisuse("glu_step needs glu = true".into())),
        (true, None) => {
            return Err(Error::Config(
                "the Gibbs-like update needs a finite eta".into(),
            ))
        }
    };
    state.check_dim(model.dim())?;
    let sd = eta.sqrt();
    let mut theta_a: Vec<f64> = state
        .theta
        .values()
        .iter()
        .map(|t| t + sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    clamp_into(config, &mut theta_a);
    let conditioned = JointState {
        theta: state.theta.clone(),
        theta_a,
    };

    let proposals = discrete_proposals(&conditioned, config, model)?;
    let (theta, log_q_fwd) = sample_from(&proposals, model, rng);
    let u: f64 = if config.mh { rng.random() } else { 0.0 };
    if !model.is_valid(theta.values()) {
        return Ok(StepOutcome::rejected_invalid(&conditioned, log_q_fwd));
    }
    let proposed = JointState {
        theta,
        theta_a: conditioned.theta_a.clone(),
    };
    if !config.mh {
        return Ok(StepOutcome {
            state: proposed,
            accepted: true,
            invalid: false,
            log_accept_prob: 0.0,
            proposal_log_q_fwd: log_q_fwd,
            proposal_log_q_rev: 0.0,
        });
    }
    let log_q_rev = log_q_discrete(&conditioned.theta, &proposed, config, model)?;
    let log_ratio = log_q_rev - log_q_fwd + joint_energy(&proposed, config.coupling, model)?
        - joint_energy(&conditioned, config.coupling, model)?;
    let log_accept_prob = accept_prob(log_ratio)?;
    let accepted = u < log_accept_prob.exp();
    Ok(StepOutcome {
        state: if accepted { proposed } else { conditioned },
        accepted,
        invalid: false,
        log_accept_prob,
        proposal_log_q_fwd: log_q_fwd,
        proposal_log_q_rev: log_q_rev,
    })
}

/// Every term of the Metropolis-adjusted joint kernel for the move
/// `from → to` and its reverse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionTerms {
    pub log_target_from: f64,
    pub log_target_to: f64,
    pub log_q_fwd: f64,
    pub log_q_rev: f64,
    pub log_accept_fwd: f64,
    pub log_accept_rev: f64,
}

impl TransitionTerms {
    /// `log π(from) + log q(to|from) + log A(to|from) −
    ///  [log π(to) + log q(from|to) + log A(from|to)]`; zero under detailed
    /// balance.
    pub fn balance_residual(&self) -> f64 {
        (self.log_target_from + self.log_q_fwd + self.log_accept_fwd)
            - (self.log_target_to + self.log_q_rev + self.log_accept_rev)
    }
}

/// Evaluates both directions of the (non-Gibbs-like) adjusted kernel between
/// two joint states.
pub fn transition_terms<M: EnergyModel + ?Sized>(
    from: &JointState,
    to: &JointState,
    config: &SamplerConfig,
    model: &M,
) -> Result<TransitionTerms> {
    let q = |a: &JointState, b: &JointState| -> Result<f64> {
        let proposals = discrete_proposals(b, config, model)?;
        let mut lq = score(&proposals, &a.theta, model)?;
        if config.coupling.is_finite() {
            lq += log_q_auxiliary(&a.theta_a, b, config)?;
        }
        Ok(lq)
    };
    let log_q_fwd = q(to, from)?;
    let log_q_rev = q(from, to)?;
    let log_target_from = joint_energy(from, config.coupling, model)?;
    let log_target_to = joint_energy(to, config.coupling, model)?;
    let log_ratio = log_target_to + log_q_rev - log_target_from - log_q_fwd;
    Ok(TransitionTerms {
        log_target_from,
        log_target_to,
        log_q_fwd,
        log_q_rev,
        log_accept_fwd: accept_prob(log_ratio)?,
        log_accept_rev: accept_prob(-log_ratio)?,
    })
}
