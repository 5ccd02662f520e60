//! Energy functions `U` with `π(θ) ∝ exp(U(θ))`, their continuous
//! extensions, and exact enumeration of small state spaces.

mod categorical;
mod file;
mod rbm;
mod regression;
mod tsp;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::log_sum_exp;
use crate::state::{domain_position, DiscreteState};

pub use categorical::CategoricalPmfModel;
pub use file::{load_model, AnyModel, ModelKind};
pub use rbm::RbmModel;
pub use regression::{BinaryRegressionNetModel, RegressionData};
pub use tsp::TspModel;

/// Largest state space the enumeration helpers will walk.
pub const MAX_ENUMERABLE: usize = 1 << 20;

pub const BINARY: [f64; 2] = [0.0, 1.0];
pub const SPIN: [f64; 2] = [-1.0, 1.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capabilities {
    pub has_gradient: bool,
    pub enumerable: bool,
    pub has_validity: bool,
}

/// A target distribution over a finite product domain.
///
/// Implementations are immutable once built and are shared read-only across
/// chains, hence the `Send + Sync` bound.
pub trait EnergyModel: Send + Sync {
    fn dim(&self) -> usize;

    /// Ordered admissible values of coordinate `i`.
    fn domain(&self, i: usize) -> &[f64];

    fn capabilities(&self) -> Capabilities;

    /// `U(x)`. For models with a continuous extension `x` may be any point
    /// of the coordinatewise convex hull of the domain.
    fn energy(&self, x: &[f64]) -> Result<f64>;

    fn gradient(&self, _x: &[f64]) -> Result<Vec<f64>> {
        Err(Error::Capability("model has no gradient".into()))
    }

    /// Hard feasibility of a discrete state. Only models reporting
    /// `has_validity` override this.
    fn is_valid(&self, _theta: &[f64]) -> bool {
        true
    }

    /// A starting configuration. The default is uniform over the domain.
    fn random_state(&self, rng: &mut dyn RngCore) -> DiscreteState {
        DiscreteState(
            (0..self.dim())
                .map(|i| {
                    let dom = self.domain(i);
                    dom[rng.random_range(0..dom.len())]
                })
                .collect(),
        )
    }
}

impl<M: EnergyModel + ?Sized> EnergyModel for &M {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn domain(&self, i: usize) -> &[f64] {
        (**self).domain(i)
    }
    fn capabilities(&self) -> Capabilities {
        (**self).capabilities()
    }
    fn energy(&self, x: &[f64]) -> Result<f64> {
        (**self).energy(x)
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).gradient(x)
    }
    fn is_valid(&self, theta: &[f64]) -> bool {
        (**self).is_valid(theta)
    }
    fn random_state(&self, rng: &mut dyn RngCore) -> DiscreteState {
        (**self).random_state(rng)
    }
}

pub(crate) fn check_dim(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(Error::Dimension {
            expected,
            got: x.len(),
        });
    }
    Ok(())
}

/// `Π_i |Θ_i|`, or `None` on overflow.
pub fn state_space_size<M: EnergyModel + ?Sized>(model: &M) -> Option<usize> {
    (0..model.dim()).try_fold(1usize, |acc, i| acc.checked_mul(model.domain(i).len()))
}

pub(crate) fn is_enumerable_size<M: EnergyModel + ?Sized>(model: &M) -> bool {
    state_space_size(model).is_some_and(|n| n <= MAX_ENUMERABLE)
}

/// Mixed-radix index of a state; the first coordinate is most significant,
/// so binary states index as their bit string read left to right.
pub fn state_index<M: EnergyModel + ?Sized>(model: &M, theta: &[f64]) -> Result<usize> {
    check_dim(model.dim(), theta)?;
    let mut index = 0usize;
    for (i, &v) in theta.iter().enumerate() {
        let dom = model.domain(i);
        let pos = domain_position(dom, v).ok_or(Error::Domain { index: i, value: v })?;
        index = index * dom.len() + pos;
    }
    Ok(index)
}

/// Lexicographic walk over every state of an enumerable model.
pub struct StateEnumerator<'m, M: ?Sized> {
    model: &'m M,
    cursor: Vec<usize>,
    done: bool,
}

impl<M: EnergyModel + ?Sized> Iterator for StateEnumerator<'_, M> {
    type Item = DiscreteState;

    fn next(&mut self) -> Option<DiscreteState> {
        if self.done {
            return None;
        }
        let out = DiscreteState(
            self.cursor
                .iter()
                .enumerate()
                .map(|(i, &p)| self.model.domain(i)[p])
                .collect(),
        );
        // odometer increment, last coordinate fastest
        self.done = true;
        for i in (0..self.cursor.len()).rev() {
            self.cursor[i] += 1;
            if self.cursor[i] < self.model.domain(i).len() {
                self.done = false;
                break;
            }
            self.cursor[i] = 0;
        }
        Some(out)
    }
}

pub fn enumerate_states<M: EnergyModel + ?Sized>(model: &M) -> Result<StateEnumerator<'_, M>> {
    match state_space_size(model) {
        Some(n) if n <= MAX_ENUMERABLE => {}
        _ => {
            return Err(Error::Capability(format!(
                "state space larger than {MAX_ENUMERABLE} states"
            )))
        }
    }
    Ok(StateEnumerator {
        model,
        cursor: vec![0; model.dim()],
        done: false,
    })
}

/// Exact target `π` over [`enumerate_states`] order. Infeasible states get
/// probability zero.
pub fn exact_distribution<M: EnergyModel + ?Sized>(model: &M) -> Result<Vec<f64>> {
    let energies = enumerate_states(model)?
        .map(|s| match model.energy(s.values()) {
            Ok(u) => Ok(u),
            Err(Error::InvalidState(_)) => Ok(f64::NEG_INFINITY),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    let z = log_sum_exp(&energies);
    if !z.is_finite() {
        return Err(Error::Numeric("target has no finite normalizer".into()));
    }
    Ok(energies.iter().map(|u| (u - z).exp()).collect())
}
