use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Coupling, SamplerConfig};
use crate::state::DiscreteState;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    Dula,
    Dmala,
    Edula,
    Edmala,
    GluEdula,
    GluEdmala,
    Gibbs,
    Gwg,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 8] = [
        SamplerKind::Dula,
        SamplerKind::Dmala,
        SamplerKind::Edula,
        SamplerKind::Edmala,
        SamplerKind::GluEdula,
        SamplerKind::GluEdmala,
        SamplerKind::Gibbs,
        SamplerKind::Gwg,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SamplerKind::Dula => "DULA",
            SamplerKind::Dmala => "DMALA",
            SamplerKind::Edula => "EDULA",
            SamplerKind::Edmala => "EDMALA",
            SamplerKind::GluEdula => "GLU-EDULA",
            SamplerKind::GluEdmala => "GLU-EDMALA",
            SamplerKind::Gibbs => "Gibbs",
            SamplerKind::Gwg => "GWG",
        }
    }

    /// Whether the kernel carries a live auxiliary variable.
    pub fn is_entropic(self) -> bool {
        matches!(
            self,
            SamplerKind::Edula
                | SamplerKind::Edmala
                | SamplerKind::GluEdula
                | SamplerKind::GluEdmala
        )
    }

    /// Builds the matching kernel configuration. Gibbs and GWG ignore it.
    pub fn configure(self, alpha: f64, alpha_a: f64, eta: f64) -> SamplerConfig {
        match self {
            SamplerKind::Dula | SamplerKind::Gibbs => SamplerConfig::dula(alpha),
            SamplerKind::Dmala | SamplerKind::Gwg => SamplerConfig::dmala(alpha),
            SamplerKind::Edula => SamplerConfig::edula(alpha, alpha_a, eta),
            SamplerKind::Edmala => SamplerConfig::edmala(alpha, alpha_a, eta),
            SamplerKind::GluEdula => SamplerConfig::glu_edula(alpha, eta),
            SamplerKind::GluEdmala => SamplerConfig::glu_edmala(alpha, eta),
        }
    }

    /// Rejects configurations that contradict the sampler name.
    pub fn check(self, config: &SamplerConfig) -> Result<()> {
        config.validate()?;
        let (mh, glu, finite) = (config.mh, config.glu, config.coupling.is_finite());
        let ok = match self {
            SamplerKind::Dula => !mh && !glu && !finite,
            SamplerKind::Dmala => mh && !glu && !finite,
            SamplerKind::Edula => !mh && !glu && finite,
            SamplerKind::Edmala => mh && !glu && finite,
            SamplerKind::GluEdula => !mh && glu,
            SamplerKind::GluEdmala => mh && glu,
            SamplerKind::Gibbs | SamplerKind::Gwg => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "{} does not match mh = {mh}, glu = {glu}, coupling = {:?}",
                self.label(),
                config.coupling
            )))
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        SamplerKind::ALL
            .into_iter()
            .find(|k| k.label().to_ascii_lowercase() == key)
            .ok_or_else(|| Error::Config(format!("unknown sampler '{s}'")))
    }
}

/// Everything needed to reproduce a multi-chain run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunPlan {
    pub sampler: SamplerKind,
    pub config: SamplerConfig,
    pub chains: usize,
    pub iterations: usize,
    pub burn_in: usize,
    pub thinning: usize,
    pub seed: u64,
    #[serde(default)]
    pub collect_aux: bool,
    /// Fixed starting state for every chain; drawn per chain when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<DiscreteState>,
}

impl RunPlan {
    pub fn new(sampler: SamplerKind, config: SamplerConfig) -> Self {
        Self {
            sampler,
            config,
            chains: 1,
            iterations: 1000,
            burn_in: 0,
            thinning: 1,
            seed: 0,
            collect_aux: false,
            init: None,
        }
    }

    pub fn chains(mut self, chains: usize) -> Self {
        self.chains = chains;
        self
    }

    pub fn iterations(mut self, iterations: usize, burn_in: usize) -> Self {
        self.iterations = iterations;
        self.burn_in = burn_in;
        self
    }

    pub fn thinning(mut self, thinning: usize) -> Self {
        self.thinning = thinning;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn collect_aux(mut self, yes: bool) -> Self {
        self.collect_aux = yes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.chains == 0 {
            return Err(Error::Config("need at least one chain".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::Config(format!(
                "burn_in ({}) must be below iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.thinning == 0 {
            return Err(Error::Config("thinning must be at least 1".into()));
        }
        self.sampler.check(&self.config)
    }

    /// Samples each chain keeps: `⌈(iterations − burn_in) / thinning⌉`.
    pub fn samples_per_chain(&self) -> usize {
        (self.iterations - self.burn_in).div_ceil(self.thinning)
    }

    /// Seed of chain `k`.
    pub fn chain_seed(&self, chain: usize) -> u64 {
        self.seed.wrapping_add(chain as u64)
    }

    pub fn eta(&self) -> Option<f64> {
        match self.config.coupling {
            Coupling::Finite(eta) => Some(eta),
            Coupling::Decoupled => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in SamplerKind::ALL {
            assert_eq!(k.label().parse::<SamplerKind>().unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(serde_json::from_str::<SamplerKind>(&json).unwrap(), k);
        }
        assert_eq!(
            "glu_edmala".parse::<SamplerKind>().unwrap(),
            SamplerKind::GluEdmala
        );
        assert!("hmc".parse::<SamplerKind>().is_err());
    }

    #[test]
    fn configure_agrees_with_check() {
        for k in SamplerKind::ALL {
            k.check(&k.configure(0.1, 0.01, 1.0)).unwrap();
        }
        assert!(SamplerKind::Dula
            .check(&SamplerConfig::edula(0.1, 0.1, 1.0))
            .is_err());
        assert!(SamplerKind::Edmala
            .check(&SamplerConfig::edula(0.1, 0.1, 1.0))
            .is_err());
    }

    #[test]
    fn plan_validation() {
        let p = RunPlan::new(SamplerKind::Dula, SamplerConfig::dula(0.1));
        assert!(p.clone().iterations(10, 10).validate().is_err());
        assert!(p.clone().thinning(0).validate().is_err());
        assert!(p.clone().chains(0).validate().is_err());
        p.validate().unwrap();
    }

    #[test]
    fn sample_counts() {
        let p = RunPlan::new(SamplerKind::Dula, SamplerConfig::dula(0.1));
        assert_eq!(p.clone().iterations(201, 200).samples_per_chain(), 1);
        assert_eq!(p.clone().iterations(1000, 200).samples_per_chain(), 800);
        assert_eq!(
            p.clone()
                .iterations(1000, 200)
                .thinning(3)
                .samples_per_chain(),
            267
        );
    }
}
