//! Per-dataset step sizes for the regression-net experiments.

use crate::error::{Error, Result};
use crate::runner::SamplerKind;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub alpha: f64,
    /// `(α_a, η)` for the unadjusted entropic sampler.
    pub unadjusted: (f64, f64),
    /// `(α_a, η)` for the Metropolis-adjusted entropic sampler.
    pub adjusted: (f64, f64),
}

pub const PRESETS: [Preset; 4] = [
    Preset {
        name: "compas",
        alpha: 0.1,
        unadjusted: (0.01, 4.0),
        adjusted: (0.001, 4.0),
    },
    Preset {
        name: "news",
        alpha: 0.1,
        unadjusted: (0.01, 2.0),
        adjusted: (0.0001, 0.8),
    },
    Preset {
        name: "adult",
        alpha: 0.1,
        unadjusted: (0.0001, 2.0),
        adjusted: (0.0001, 4.0),
    },
    Preset {
        name: "blog",
        alpha: 0.1,
        unadjusted: (0.01, 1.0),
        adjusted: (0.0001, 1.0),
    },
];

impl Preset {
    pub fn lookup(name: &str) -> Result<Preset> {
        let key = name.to_ascii_lowercase();
        PRESETS
            .iter()
            .find(|p| p.name == key)
            .copied()
            .ok_or_else(|| {
                let known: Vec<_> = PRESETS.iter().map(|p| p.name).collect();
                Error::Config(format!(
                    "unknown preset '{name}', expected one of {known:?}"
                ))
            })
    }

    /// `(α, α_a, η)` for `sampler`; `None` fields mean the preset is silent.
    pub fn values(&self, sampler: SamplerKind) -> (f64, Option<f64>, Option<f64>) {
        match sampler {
            SamplerKind::Edula | SamplerKind::GluEdula => {
                (self.alpha, Some(self.unadjusted.0), Some(self.unadjusted.1))
            }
            SamplerKind::Edmala | SamplerKind::GluEdmala => {
                (self.alpha, Some(self.adjusted.0), Some(self.adjusted.1))
            }
            _ => (self.alpha, None, None),
        }
    }
}
