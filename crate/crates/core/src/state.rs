//! Chain states: the discrete configuration and its continuous companion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::EnergyModel;

/// A point of the product domain `Θ = Θ_1 × … × Θ_d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscreteState(pub Vec<f64>);

impl DiscreteState {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses a compact bit string such as `"0100"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        bits.chars()
            .map(|c| match c {
                '0' => Ok(0.0),
                '1' => Ok(1.0),
                other => Err(Error::Parse(format!("'{other}' is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    /// Checks length and per-coordinate domain membership.
    pub fn validate<M: EnergyModel + ?Sized>(&self, model: &M) -> Result<()> {
        if self.len() != model.dim() {
            return Err(Error::Dimension {
                expected: model.dim(),
                got: self.len(),
            });
        }
        for (i, &v) in self.0.iter().enumerate() {
            if domain_position(model.domain(i), v).is_none() {
                return Err(Error::Domain { index: i, value: v });
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for DiscreteState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.iter().all(|&v| v == 0.0 || v == 1.0) {
            for &v in &self.0 {
                write!(f, "{}", v as u8)?;
            }
            Ok(())
        } else {
            write!(f, "{:?}", self.0)
        }
    }
}

/// Position of `value` inside an ordered domain, by exact comparison.
pub fn domain_position(domain: &[f64], value: f64) -> Option<usize> {
    domain.iter().position(|&d| d == value)
}

/// The augmented chain state `(θ, θ_a)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    pub theta: DiscreteState,
    pub theta_a: Vec<f64>,
}

impl JointState {
    pub fn new(theta: DiscreteState, theta_a: Vec<f64>) -> Result<Self> {
        if theta.len() != theta_a.len() {
            return Err(Error::Dimension {
                expected: theta.len(),
                got: theta_a.len(),
            });
        }
        Ok(Self { theta, theta_a })
    }

    /// Starts the auxiliary variable on top of the discrete one.
    pub fn anchored(theta: DiscreteState) -> Self {
        let theta_a = theta.0.clone();
        Self { theta, theta_a }
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        for got in [self.theta.len(), self.theta_a.len()] {
            if got != dim {
                return Err(Error::Dimension { expected: dim, got });
            }
        }
        Ok(())
    }

    /// `‖θ − θ_a‖₂`.
    pub fn coupling_norm(&self) -> f64 {
        crate::math::squared_distance(&self.theta.0, &self.theta_a).sqrt()
    }
}
