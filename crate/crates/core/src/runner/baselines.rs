//! Gibbs sampling and Gibbs-with-gradients, the non-Langevin baselines.

use rand::Rng;

use crate::error::{Error, Result};
use crate::kernel::StepOutcome;
use crate::math::{log_normalize, log_sum_exp};
use crate::model::EnergyModel;
use crate::state::{DiscreteState, JointState};

fn sample_log_probs<R: Rng + ?Sized>(log_probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, l) in log_probs.iter().enumerate() {
        acc += l.exp();
        if u < acc {
            return k;
        }
    }
    log_probs
        .iter()
        .rposition(|l| *l > f64::NEG_INFINITY)
        .unwrap_or(log_probs.len() - 1)
}

/// One systematic scan: each coordinate in order is redrawn from its exact
/// conditional `∝ exp(U(θ_{i←v}))`. Infeasible candidates get zero mass.
pub fn gibbs_step<M, R>(state: &DiscreteState, model: &M, rng: &mut R) -> Result<DiscreteState>
where
    M: EnergyModel + ?Sized,
    R: Rng + ?Sized,
{
    state.validate(model)?;
    let mut theta = state.values().to_vec();
    for i in 0..model.dim() {
        let mut logits = model
            .domain(i)
            .iter()
            .map(|&v| {
                theta[i] = v;
                match model.energy(&theta) {
                    Ok(u) => Ok(u),
                    Err(Error::InvalidState(_)) => Ok(f64::NEG_INFINITY),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        if log_sum_exp(&logits) == f64::NEG_INFINITY {
            return Err(Error::InvalidState(format!(
                "no feasible value for coordinate {i}"
            )));
        }
        log_normalize(&mut logits);
        theta[i] = model.domain(i)[sample_log_probs(&logits, rng)];
    }
    Ok(DiscreteState(theta))
}

fn flip_value(domain: &[f64], v: f64) -> f64 {
    if v == domain[0] {
        domain[1]
    } else {
        domain[0]
    }
}

/// Log probabilities of flipping each coordinate,
/// `∝ exp(½ ∂_i U(θ) (flip_i − θ_i))`.
fn flip_log_probs<M: EnergyModel + ?Sized>(theta: &[f64], model: &M) -> Result<Vec<f64>> {
    let g = model.gradient(theta)?;
    let mut logits: Vec<f64> = (0..theta.len())
        .map(|i| 0.5 * g[i] * (flip_value(model.domain(i), theta[i]) - theta[i]))
        .collect();
    log_normalize(&mut logits);
    Ok(logits)
}

/// Gibbs-with-gradients: choose one coordinate to flip from a
/// gradient-informed softmax, then Metropolis-correct with the reverse
/// choice probability. Binary domains only. `θ_a` is carried unchanged.
pub fn gwg_step<M, R>(state: &JointState, model: &M, rng: &mut R) -> Result<StepOutcome>
where
    M: EnergyModel + ?Sized,
    R: Rng + ?Sized,
{
    state.check_dim(model.dim())?;
    if let Some(i) = (0..model.dim()).find(|&i| model.domain(i).len() != 2) {
        return Err(Error::Capability(format!(
            "Gibbs-with-gradients needs binary domains; coordinate {i} has {} values",
            model.domain(i).len()
        )));
    }
    let theta = state.theta.values();
    let fwd = flip_log_probs(theta, model)?;
    let k = sample_log_probs(&fwd, rng);
    let u: f64 = rng.random();

    let mut next = theta.to_vec();
    next[k] = flip_value(model.domain(k), next[k]);
    if !model.is_valid(&next) {
        return Ok(StepOutcome {
            state: state.clone(),
            accepted: false,
            invalid: true,
            log_accept_prob: f64::NEG_INFINITY,
            proposal_log_q_fwd: fwd[k],
            proposal_log_q_rev: 0.0,
        });
    }
    let rev = flip_log_probs(&next, model)?;
    let log_ratio = model.energy(&next)? - model.energy(theta)? + rev[k] - fwd[k];
    if log_ratio.is_nan() {
        return Err(Error::Numeric("acceptance ratio is NaN".into()));
    }
    let log_accept_prob = log_ratio.min(0.0);
    let accepted = u < log_accept_prob.exp();
    let state = if accepted {
        JointState {
            theta: DiscreteState(next),
            theta_a: state.theta_a.clone(),
        }
    } else {
        state.clone()
    };
    Ok(StepOutcome {
        state,
        accepted,
        invalid: false,
        log_accept_prob,
        proposal_log_q_fwd: fwd[k],
        proposal_log_q_rev: rev[k],
    })
}
