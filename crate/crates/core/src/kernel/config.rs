use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strength of the tie between `θ` and `θ_a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coupling {
    /// Finite flatness parameter `η > 0`.
    Finite(f64),
    /// `η = ∞`: no auxiliary dynamics.
    Decoupled,
}

impl Coupling {
    pub fn eta(self) -> Option<f64> {
        match self {
            Coupling::Finite(eta) => Some(eta),
            Coupling::Decoupled => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Coupling::Finite(_))
    }
}

/// How per-coordinate logits score a candidate value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientMode {
    /// First-order expansion `½ ∂_i U_η · (v − θ_i)`.
    #[default]
    Taylor,
    /// True difference `½ (U_η(θ_{i←v}) − U_η(θ))`; for models without a
    /// continuous extension.
    ExactDifference,
}

/// Coordinatewise box for `θ_a`, applied after the proposal density is taken.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxBox {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub alpha: f64,
    pub alpha_a: f64,
    pub coupling: Coupling,
    pub mh: bool,
    pub glu: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_box: Option<AuxBox>,
    #[serde(default)]
    pub gradient_mode: GradientMode,
}

impl SamplerConfig {
    pub fn dula(alpha: f64) -> Self {
        Self {
            alpha,
            alpha_a: 1.0,
            coupling: Coupling::Decoupled,
            mh: false,
            glu: false,
            aux_box: None,
            gradient_mode: GradientMode::Taylor,
        }
    }

    pub fn dmala(alpha: f64) -> Self {
        Self {
            mh: true,
            ..Self::dula(alpha)
        }
    }

    pub fn edula(alpha: f64, alpha_a: f64, eta: f64) -> Self {
        Self {
            alpha_a,
            coupling: Coupling::Finite(eta),
            ..Self::dula(alpha)
        }
    }

    pub fn edmala(alpha: f64, alpha_a: f64, eta: f64) -> Self {
        Self {
            mh: true,
            ..Self::edula(alpha, alpha_a, eta)
        }
    }

    /// Gibbs-like update; `alpha_a` is unused.
    pub fn glu_edula(alpha: f64, eta: f64) -> Self {
        Self {
            glu: true,
            ..Self::edula(alpha, 1.0, eta)
        }
    }

    pub fn glu_edmala(alpha: f64, eta: f64) -> Self {
        Self {
            mh: true,
            ..Self::glu_edula(alpha, eta)
        }
    }

    pub fn with_gradient_mode(mut self, mode: GradientMode) -> Self {
        self.gradient_mode = mode;
        self
    }

    pub fn with_aux_box(mut self, lo: f64, hi: f64) -> Self {
        self.aux_box = Some(AuxBox { lo, hi });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("alpha", self.alpha)?;
        positive("alpha_a", self.alpha_a)?;
        if let Coupling::Finite(eta) = self.coupling {
            positive("eta", eta)?;
            // the auxiliary drift multiplies θ − θ_a by 1 − α_a/2η each step
            if !self.glu && self.alpha_a >= 4.0 * eta {
                return Err(Error::Config(format!(
                    "alpha_a = {} must stay below 4 eta = {} or the auxiliary chain diverges",
                    self.alpha_a,
                    4.0 * eta
                )));
            }
        }
        if self.glu && !self.coupling.is_finite() {
            return Err(Error::Config(
                "the Gibbs-like update needs a finite eta".into(),
            ));
        }
        if let Some(b) = self.aux_box {
            if !(b.lo < b.hi) {
                return Err(Error::Config(format!("empty aux box [{}, {}]", b.lo, b.hi)));
            }
        }
        Ok(())
    }
}
