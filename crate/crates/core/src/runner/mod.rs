//! Multi-chain orchestration: seeding, burn-in, thinning, feasibility
//! rejection and (optionally parallel) execution.

mod baselines;
mod plan;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, SamplerConfig, StepOutcome};
use crate::model::EnergyModel;
use crate::state::{DiscreteState, JointState};

pub use baselines::{gibbs_step, gwg_step};
pub use plan::{RunPlan, SamplerKind};

/// Per-chain generator. ChaCha is counter based, so chains seeded
/// `root + k` give independent, reproducible streams.
pub type ChainRng = ChaCha8Rng;

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "FLATLAND_THREADS";

/// Kept `θ` samples of one chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleArchive {
    pub chain_id: usize,
    pub seed: u64,
    pub sampler: SamplerKind,
    pub config: SamplerConfig,
    pub samples: Vec<DiscreteState>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub archive: SampleArchive,
    /// `θ_a` alongside each kept sample, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<Vec<Vec<f64>>>,
    /// Feasible proposals that reached the acceptance test.
    pub proposals: u64,
    pub accepted: u64,
    pub rejected_invalid: u64,
    /// Sum of acceptance probabilities over feasible proposals.
    pub accept_prob_sum: f64,
}

impl ChainReport {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            return 0.0;
        }
        self.accepted as f64 / self.proposals as f64
    }

    pub fn mean_accept_prob(&self) -> f64 {
        if self.proposals == 0 {
            return 0.0;
        }
        self.accept_prob_sum / self.proposals as f64
    }

    /// Mean `‖θ − θ_a‖` over the kept samples, if `θ_a` was collected.
    pub fn mean_coupling_norm(&self) -> Option<f64> {
        let aux = self.aux.as_ref()?;
        let norms: Vec<f64> = self
            .archive
            .samples
            .iter()
            .zip(aux)
            .map(|(t, a)| crate::math::squared_distance(t.values(), a).sqrt())
            .collect();
        Some(crate::math::mean(&norms))
    }
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub chains: Vec<ChainReport>,
    pub wall_time: Duration,
}

impl RunReport {
    pub fn archives(&self) -> impl Iterator<Item = &SampleArchive> {
        self.chains.iter().map(|c| &c.archive)
    }

    /// All chains' samples, chain by chain.
    pub fn pooled_samples(&self) -> Vec<DiscreteState> {
        self.chains
            .iter()
            .flat_map(|c| c.archive.samples.iter().cloned())
            .collect()
    }

    pub fn acceptance_rate(&self) -> f64 {
        let (acc, prop) = self
            .chains
            .iter()
            .fold((0, 0), |(a, p), c| (a + c.accepted, p + c.proposals));
        if prop == 0 {
            0.0
        } else {
            acc as f64 / prop as f64
        }
    }

    pub fn mean_accept_prob(&self) -> f64 {
        let (sum, prop) = self.chains.iter().fold((0.0, 0), |(s, p), c| {
            (s + c.accept_prob_sum, p + c.proposals)
        });
        if prop == 0 {
            0.0
        } else {
            sum / prop as f64
        }
    }

    pub fn rejected_invalid(&self) -> u64 {
        self.chains.iter().map(|c| c.rejected_invalid).sum()
    }

    pub fn mean_coupling_norm(&self) -> Option<f64> {
        let norms: Option<Vec<f64>> = self.chains.iter().map(|c| c.mean_coupling_norm()).collect();
        norms.map(|n| crate::math::mean(&n))
    }
}

/// How chains are scheduled. Results are identical either way.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel {
        /// Worker cap; `None` uses the global pool.
        threads: Option<usize>,
    },
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel { threads: None }
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Default execution, capped by `FLATLAND_THREADS` when set.
    pub fn from_env() -> Result<Self> {
        let cap = match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "{THREADS_ENV} must be a positive integer, got '{v}'"
                        ))
                    })?,
            ),
            Err(_) => None,
        };
        Ok(match (Self::default(), cap) {
            #[cfg(feature = "parallel")]
            (Execution::Parallel { .. }, Some(1)) => Execution::Sequential,
            #[cfg(feature = "parallel")]
            (Execution::Parallel { .. }, cap) => Execution::Parallel { threads: cap },
            (e, _) => e,
        })
    }
}

pub fn run<M: EnergyModel + ?Sized>(plan: &RunPlan, model: &M) -> Result<RunReport> {
    run_with(plan, model, Execution::default())
}

pub fn run_with<M: EnergyModel + ?Sized>(
    plan: &RunPlan,
    model: &M,
    exec: Execution,
) -> Result<RunReport> {
    plan.validate()?;
    check_capabilities(plan, model)?;
    if let Some(init) = &plan.init {
        init.validate(model)?;
        if !model.is_valid(init.values()) {
            return Err(Error::Config("initial state is infeasible".into()));
        }
    }
    let started = Instant::now();
    let chains = match exec {
        Execution::Sequential => (0..plan.chains)
            .map(|k| run_chain(plan, model, k))
            .collect::<Result<Vec<_>>>()?,
        #[cfg(feature = "parallel")]
        Execution::Parallel { threads } => parallel_chains(plan, model, threads)?,
    };
    Ok(RunReport {
        chains,
        wall_time: started.elapsed(),
    })
}

#[cfg(feature = "parallel")]
fn parallel_chains<M: EnergyModel + ?Sized>(
    plan: &RunPlan,
    model: &M,
    threads: Option<usize>,
) -> Result<Vec<ChainReport>> {
    use rayon::prelude::*;
    let work = || {
        (0..plan.chains)
            .into_par_iter()
            .map(|k| run_chain(plan, model, k))
            .collect::<Result<Vec<_>>>()
    };
    match threads {
        None => work(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?
            .install(work),
    }
}

fn check_capabilities<M: EnergyModel + ?Sized>(plan: &RunPlan, model: &M) -> Result<()> {
    use crate::kernel::GradientMode;
    let caps = model.capabilities();
    let needs_gradient = match plan.sampler {
        SamplerKind::Gibbs => false,
        SamplerKind::Gwg => true,
        _ => plan.config.gradient_mode == GradientMode::Taylor,
    };
    if needs_gradient && !caps.has_gradient {
        return Err(Error::Capability(format!(
            "{} needs a gradient; use gradient_mode = exact-difference for this model",
            plan.sampler
        )));
    }
    Ok(())
}

fn transition<M: EnergyModel + ?Sized>(
    plan: &RunPlan,
    state: &JointState,
    model: &M,
    rng: &mut ChainRng,
) -> Result<StepOutcome> {
    match plan.sampler {
        SamplerKind::Gibbs => {
            let theta = gibbs_step(&state.theta, model, rng)?;
            Ok(StepOutcome {
                state: JointState {
                    theta,
                    theta_a: state.theta_a.clone(),
                },
                accepted: true,
                invalid: false,
                log_accept_prob: 0.0,
                proposal_log_q_fwd: 0.0,
                proposal_log_q_rev: 0.0,
            })
        }
        SamplerKind::Gwg => gwg_step(state, model, rng),
        _ => kernel::step(state, &plan.config, model, rng),
    }
}

/// Runs chain `chain` of `plan` to completion.
pub fn run_chain<M: EnergyModel + ?Sized>(
    plan: &RunPlan,
    model: &M,
    chain: usize,
) -> Result<ChainReport> {
    let seed = plan.chain_seed(chain);
    let mut rng = ChainRng::seed_from_u64(seed);
    let theta0 = match &plan.init {
        Some(init) => init.clone(),
        None => model.random_state(&mut rng),
    };
    let mut state = JointState::anchored(theta0);

    let keep = plan.samples_per_chain();
    let mut samples = Vec::with_capacity(keep);
    let mut aux = plan.collect_aux.then(|| Vec::with_capacity(keep));
    let (mut proposals, mut accepted, mut rejected_invalid) = (0u64, 0u64, 0u64);
    let mut accept_prob_sum = 0.0;

    for t in 0..plan.iterations {
        let out = transition(plan, &state, model, &mut rng)?;
        if out.invalid {
            rejected_invalid += 1;
        } else {
            proposals += 1;
            accepted += out.accepted as u64;
            accept_prob_sum += out.log_accept_prob.exp();
        }
        state = out.state;
        if t >= plan.burn_in && (t - plan.burn_in) % plan.thinning == 0 {
            samples.push(state.theta.clone());
            if let Some(a) = aux.as_mut() {
                a.push(state.theta_a.clone());
            }
        }
    }

    Ok(ChainReport {
        archive: SampleArchive {
            chain_id: chain,
            seed,
            sampler: plan.sampler,
            config: plan.config,
            samples,
        },
        aux,
        proposals,
        accepted,
        rejected_invalid,
        accept_prob_sum,
    })
}
