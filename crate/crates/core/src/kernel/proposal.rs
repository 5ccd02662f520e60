use rand::Rng;
use rand_distr::StandardNormal;

use super::config::{Coupling, GradientMode, SamplerConfig};
use crate::error::{Error, Result};
use crate::math::{log_normalize, squared_distance};
use crate::model::EnergyModel;
use crate::state::{domain_position, DiscreteState, JointState};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// `U_η(θ, θ_a) = U(θ) − ‖θ − θ_a‖² / (2η)`, or `U(θ)` when decoupled.
pub fn joint_energy<M: EnergyModel + ?Sized>(
    state: &JointState,
    coupling: Coupling,
    model: &M,
) -> Result<f64> {
    state.check_dim(model.dim())?;
    let u = model.energy(state.theta.values())?;
    Ok(match coupling {
        Coupling::Finite(eta) => {
            u - squared_distance(state.theta.values(), &state.theta_a) / (2.0 * eta)
        }
        Coupling::Decoupled => u,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointGradient {
    pub theta: Vec<f64>,
    pub theta_a: Vec<f64>,
}

/// Gradient of [`joint_energy`] in both blocks. The `θ` block is taken on the
/// continuous extension of `U`.
pub fn joint_gradient<M: EnergyModel + ?Sized>(
    state: &JointState,
    coupling: Coupling,
    model: &M,
) -> Result<JointGradient> {
    state.check_dim(model.dim())?;
    let mut theta = model.gradient(state.theta.values())?;
    let theta_a = match coupling {
        Coupling::Finite(eta) => {
            let pull: Vec<f64> = state
                .theta
                .values()
                .iter()
                .zip(&state.theta_a)
                .map(|(t, a)| (t - a) / eta)
                .collect();
            for (g, p) in theta.iter_mut().zip(&pull) {
                *g -= p;
            }
            pull
        }
        Coupling::Decoupled => vec![0.0; state.dim()],
    };
    Ok(JointGradient { theta, theta_a })
}

/// Categorical distribution over the ordered domain of one coordinate, in
/// log space.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateProposal {
    pub log_probs: Vec<f64>,
}

impl CoordinateProposal {
    fn from_logits(mut logits: Vec<f64>) -> Result<Self> {
        log_normalize(&mut logits);
        if logits.iter().any(|l| l.is_nan()) {
            return Err(Error::Numeric("proposal logits are not finite".into()));
        }
        Ok(Self { log_probs: logits })
    }

    pub fn probs(&self) -> Vec<f64> {
        self.log_probs.iter().map(|l| l.exp()).collect()
    }

    /// Inverse-CDF draw over the domain order for `u ∈ [0, 1)`.
    pub fn sample_index(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (k, l) in self.log_probs.iter().enumerate() {
            acc += l.exp();
            if u < acc {
                return k;
            }
        }
        // rounding left the total just under u; take the last value with mass
        self.log_probs
            .iter()
            .rposition(|l| *l > f64::NEG_INFINITY)
            .unwrap_or(self.log_probs.len() - 1)
    }
}

fn taylor_logits(domain: &[f64], current: f64, slope: f64, alpha: f64) -> Vec<f64> {
    domain
        .iter()
        .map(|&v| {
            let step = v - current;
            0.5 * slope * step - step * step / (2.0 * alpha)
        })
        .collect()
}

/// Energy change of `U_η` when coordinate `i` alone moves to `v`. A candidate
/// the model rejects as infeasible contributes no model term; the coupling
/// term is always exact.
fn exact_delta<M: EnergyModel + ?Sized>(
    i: usize,
    v: f64,
    state: &JointState,
    base_energy: f64,
    coupling: Coupling,
    model: &M,
    scratch: &mut Vec<f64>,
) -> Result<f64> {
    let current = state.theta.values()[i];
    scratch.clear();
    scratch.extend_from_slice(state.theta.values());
    scratch[i] = v;
    let model_delta = match model.energy(scratch) {
        Ok(u) => u - base_energy,
        Err(Error::InvalidState(_)) => 0.0,
        Err(e) => return Err(e),
    };
    let coupling_delta = match coupling {
        Coupling::Finite(eta) => {
            let a = state.theta_a[i];
            -((v - a).powi(2) - (current - a).powi(2)) / (2.0 * eta)
        }
        Coupling::Decoupled => 0.0,
    };
    Ok(model_delta + coupling_delta)
}

fn exact_logits<M: EnergyModel + ?Sized>(
    i: usize,
    state: &JointState,
    base_energy: f64,
    alpha: f64,
    coupling: Coupling,
    model: &M,
    scratch: &mut Vec<f64>,
) -> Result<Vec<f64>> {
    let current = state.theta.values()[i];
    model
        .domain(i)
        .iter()
        .map(|&v| {
            if v == current {
                return Ok(0.0);
            }
            let delta = exact_delta(i, v, state, base_energy, coupling, model, scratch)?;
            let step = v - current;
            Ok(0.5 * delta - step * step / (2.0 * alpha))
        })
        .collect()
}

fn base_model_energy<M: EnergyModel + ?Sized>(state: &JointState, model: &M) -> Result<f64> {
    model.energy(state.theta.values())
}

/// Proposal for coordinate `i` at `state`.
///
/// In `Taylor` mode `grad_theta` must be the `θ` block of [`joint_gradient`]
/// at `state`; `ExactDifference` ignores it.
pub fn build_coordinate_proposal<M: EnergyModel + ?Sized>(
    i: usize,
    state: &JointState,
    grad_theta: &[f64],
    alpha: f64,
    mode: GradientMode,
    coupling: Coupling,
    model: &M,
) -> Result<CoordinateProposal> {
    state.check_dim(model.dim())?;
    let domain = model.domain(i);
    if domain.len() < 2 {
        return Err(Error::DegenerateDomain(i));
    }
    let current = state.theta.values()[i];
    let logits = match mode {
        GradientMode::Taylor => {
            let slope = *grad_theta.get(i).ok_or(Error::Dimension {
                expected: model.dim(),
                got: grad_theta.len(),
            })?;
            taylor_logits(domain, current, slope, alpha)
        }
        GradientMode::ExactDifference => {
            let base = base_model_energy(state, model)?;
            exact_logits(i, state, base, alpha, coupling, model, &mut Vec::new())?
        }
    };
    CoordinateProposal::from_logits(logits)
}

/// All coordinate proposals at `state`, sharing one gradient evaluation.
pub fn discrete_proposals<M: EnergyModel + ?Sized>(
    state: &JointState,
    config: &SamplerConfig,
    model: &M,
) -> Result<Vec<CoordinateProposal>> {
    state.check_dim(model.dim())?;
    if let Some(i) = (0..model.dim()).find(|&i| model.domain(i).len() < 2) {
        return Err(Error::DegenerateDomain(i));
    }
    match config.gradient_mode {
        GradientMode::Taylor => {
            let grad = joint_gradient(state, config.coupling, model)?.theta;
            (0..model.dim())
                .map(|i| {
                    CoordinateProposal::from_logits(taylor_logits(
                        model.domain(i),
                        state.theta.values()[i],
                        grad[i],
                        config.alpha,
                    ))
                })
                .collect()
        }
        GradientMode::ExactDifference => {
            let base = base_model_energy(state, model)?;
            let mut scratch = Vec::with_capacity(model.dim());
            (0..model.dim())
                .map(|i| {
                    exact_logits(
                        i,
                        state,
                        base,
                        config.alpha,
                        config.coupling,
                        model,
                        &mut scratch,
                    )
                    .and_then(CoordinateProposal::from_logits)
                })
                .collect()
        }
    }
}

/// Samples every coordinate at once from the factorized proposal.
/// Returns the new `θ` and `log q(θ′ | θ̃)`.
pub fn propose_discrete<M, R>(
    state: &JointState,
    config: &SamplerConfig,
    model: &M,
    rng: &mut R,
) -> Result<(DiscreteState, f64)>
where
    M: EnergyModel + ?Sized,
    R: Rng + ?Sized,
{
    let proposals = discrete_proposals(state, config, model)?;
    Ok(sample_from(&proposals, model, rng))
}

pub(crate) fn sample_from<M, R>(
    proposals: &[CoordinateProposal],
    model: &M,
    rng: &mut R,
) -> (DiscreteState, f64)
where
    M: EnergyModel + ?Sized,
    R: Rng + ?Sized,
{
    let mut log_q = 0.0;
    let values = proposals
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let k = p.sample_index(rng.random::<f64>());
            log_q += p.log_probs[k];
            model.domain(i)[k]
        })
        .collect();
    (DiscreteState(values), log_q)
}

pub(crate) fn score<M: EnergyModel + ?Sized>(
    proposals: &[CoordinateProposal],
    theta_to: &DiscreteState,
    model: &M,
) -> Result<f64> {
    if theta_to.len() != proposals.len() {
        return Err(Error::Dimension {
            expected: proposals.len(),
            got: theta_to.len(),
        });
    }
    theta_to
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            domain_position(model.domain(i), v)
                .map(|k| proposals[i].log_probs[k])
                .ok_or(Error::Domain { index: i, value: v })
        })
        .sum()
}

/// `Σ_i log q_i(θ_to[i] | from)`.
pub fn log_q_discrete<M: EnergyModel + ?Sized>(
    theta_to: &DiscreteState,
    from: &JointState,
    config: &SamplerConfig,
    model: &M,
) -> Result<f64> {
    theta_to.validate(model)?;
    let proposals = discrete_proposals(from, config, model)?;
    score(&proposals, theta_to, model)
}

fn finite_eta(config: &SamplerConfig) -> Result<f64> {
    config
        .coupling
        .eta()
        .ok_or_else(|| Error::KernelMisuse("auxiliary dynamics need a finite eta".into()))
}

/// Mean of the Langevin move for `θ_a`: `θ_a + (α_a / 2) (θ − θ_a) / η`.
pub fn auxiliary_mean(state: &JointState, config: &SamplerConfig) -> Result<Vec<f64>> {
    let eta = finite_eta(config)?;
    let half = config.alpha_a / 2.0;
    Ok(state
        .theta
        .values()
        .iter()
        .zip(&state.theta_a)
        .map(|(t, a)| a + half * (t - a) / eta)
        .collect())
}

/// Log density of the isotropic Gaussian auxiliary proposal.
pub fn log_q_auxiliary(
    theta_a_to: &[f64],
    from: &JointState,
    config: &SamplerConfig,
) -> Result<f64> {
    let mean = auxiliary_mean(from, config)?;
    if theta_a_to.len() != mean.len() {
        return Err(Error::Dimension {
            expected: mean.len(),
            got: theta_a_to.len(),
        });
    }
    Ok(gaussian_log_density(theta_a_to, &mean, config.alpha_a))
}

pub(crate) fn gaussian_log_density(x: &[f64], mean: &[f64], var: f64) -> f64 {
    let d = x.len() as f64;
    -0.5 * d * (LN_2PI + var.ln()) - squared_distance(x, mean) / (2.0 * var)
}

pub(crate) fn clamp_into(config: &SamplerConfig, x: &mut [f64]) {
    if let Some(b) = config.aux_box {
        for v in x.iter_mut() {
            *v = v.clamp(b.lo, b.hi);
        }
    }
}

/// Auxiliary move with caller-supplied standard-normal noise. The density is
/// taken before any box clamping.
pub fn propose_auxiliary_with_noise(
    state: &JointState,
    config: &SamplerConfig,
    noise: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let mean = auxiliary_mean(state, config)?;
    if noise.len() != mean.len() {
        return Err(Error::Dimension {
            expected: mean.len(),
            got: noise.len(),
        });
    }
    let scale = config.alpha_a.sqrt();
    let mut next: Vec<f64> = mean.iter().zip(noise).map(|(m, e)| m + scale * e).collect();
    let log_q = gaussian_log_density(&next, &mean, config.alpha_a);
    clamp_into(config, &mut next);
    Ok((next, log_q))
}

pub fn propose_auxiliary<R: Rng + ?Sized>(
    state: &JointState,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<(Vec<f64>, f64)> {
    finite_eta(config)?;
    let noise: Vec<f64> = (0..state.dim())
        .map(|_| rng.sample(StandardNormal))
        .collect();
    propose_auxiliary_with_noise(state, config, &noise)
}
