use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::presets::Preset;
use crate::error::{Error, Result};
use crate::kernel::{GradientMode, SamplerConfig};
use crate::model::{AnyModel, EnergyModel, ModelKind};
use crate::runner::{RunPlan, SamplerKind};
use crate::state::DiscreteState;

pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_ALPHA_A: f64 = 0.01;
pub const DEFAULT_ETA: f64 = 1.0;

/// Human-written experiment file (TOML).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub plan: PlanSpec,
    #[serde(default)]
    pub diagnostics: DiagnosticToggles,
    /// Output directory, relative to the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Model JSON, relative to the config file.
    pub path: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    pub sampler: SamplerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Defaults to exact differences for models without a gradient.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient_mode: Option<GradientMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux_box: Option<[f64; 2]>,
    #[serde(default = "one")]
    pub chains: usize,
    pub iterations: usize,
    #[serde(default)]
    pub burn_in: usize,
    #[serde(default = "one")]
    pub thinning: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub collect_aux: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<Vec<f64>>,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticToggles {
    #[serde(default)]
    pub eigenspectrum: bool,
    #[serde(default)]
    pub tv: bool,
    #[serde(default)]
    pub pmc: bool,
    #[serde(default)]
    pub mode_freqs: bool,
    #[serde(default)]
    pub rmse: bool,
    /// Bit strings (or value lists) of the modes to count.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<String>,
}

impl DiagnosticToggles {
    /// Everything that makes sense for `model`.
    pub fn applicable(model: &AnyModel) -> Self {
        let caps = model.capabilities();
        Self {
            eigenspectrum: caps.has_gradient && model.dim() <= crate::diagnostics::MAX_HESSIAN_DIM,
            tv: caps.enumerable,
            pmc: model.kind() == ModelKind::Tsp,
            mode_freqs: false,
            rmse: model.kind() == ModelKind::RegressionNet,
            modes: Vec::new(),
        }
    }

    fn check(&self, model: &AnyModel) -> Result<Vec<DiscreteState>> {
        let can = Self::applicable(model);
        for (on, ok, name) in [
            (self.eigenspectrum, can.eigenspectrum, "eigenspectrum"),
            (self.tv, can.tv, "tv"),
            (self.pmc, can.pmc, "pmc"),
            (self.rmse, can.rmse, "rmse"),
        ] {
            if on && !ok {
                return Err(Error::Capability(format!(
                    "diagnostic '{name}' does not apply to a {:?} model",
                    model.kind()
                )));
            }
        }
        if self.mode_freqs && self.modes.is_empty() {
            return Err(Error::Config(
                "mode_freqs needs a non-empty modes list".into(),
            ));
        }
        let modes = self
            .modes
            .iter()
            .map(|m| DiscreteState::from_bits(m))
            .collect::<Result<Vec<_>>>()?;
        for m in &modes {
            m.validate(model)?;
        }
        Ok(modes)
    }
}

/// A loaded, validated experiment ready to run.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub model: AnyModel,
    pub plan: RunPlan,
    pub modes: Vec<DiscreteState>,
    pub out: Option<PathBuf>,
}

/// Command-line overrides applied on top of the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub chains: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

impl Experiment {
    /// Reads the TOML file and the model it names. Every failure here is a
    /// configuration error, including an unreadable model file.
    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let config = ExperimentConfig::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_config(config, base, overrides)
    }

    pub fn from_config(
        mut config: ExperimentConfig,
        base: &Path,
        overrides: &Overrides,
    ) -> Result<Self> {
        if let Some(seed) = overrides.seed {
            config.plan.seed = seed;
        }
        if let Some(chains) = overrides.chains {
            config.plan.chains = chains;
        }
        if let Some(out) = &overrides.out {
            config.out = Some(out.clone());
        }
        let model_path = base.join(&config.model.path);
        let json = std::fs::read_to_string(&model_path).map_err(|e| {
            Error::Config(format!("cannot read model {}: {e}", model_path.display()))
        })?;
        let model = AnyModel::parse(config.model.kind, &json)?;
        let plan = resolve_plan(&config.plan, &model)?;
        let modes = config.diagnostics.check(&model)?;
        Ok(Self {
            out: config.out.clone(),
            config,
            model,
            plan,
            modes,
        })
    }
}

fn resolve_plan(spec: &PlanSpec, model: &AnyModel) -> Result<RunPlan> {
    let (mut alpha, mut alpha_a, mut eta) = (DEFAULT_ALPHA, DEFAULT_ALPHA_A, DEFAULT_ETA);
    if let Some(name) = &spec.preset {
        let (a, aa, e) = Preset::lookup(name)?.values(spec.sampler);
        alpha = a;
        alpha_a = aa.unwrap_or(alpha_a);
        eta = e.unwrap_or(eta);
    }
    alpha = spec.alpha.unwrap_or(alpha);
    alpha_a = spec.alpha_a.unwrap_or(alpha_a);
    eta = spec.eta.unwrap_or(eta);

    let mut config: SamplerConfig = spec.sampler.configure(alpha, alpha_a, eta);
    config.gradient_mode = spec
        .gradient_mode
        .unwrap_or(if model.capabilities().has_gradient {
            GradientMode::Taylor
        } else {
            GradientMode::ExactDifference
        });
    if let Some([lo, hi]) = spec.aux_box {
        config = config.with_aux_box(lo, hi);
    }
    spec.sampler.check(&config)?;

    let mut plan = RunPlan::new(spec.sampler, config)
        .chains(spec.chains)
        .iterations(spec.iterations, spec.burn_in)
        .thinning(spec.thinning)
        .seed(spec.seed)
        .collect_aux(spec.collect_aux);
    if let Some(init) = &spec.init {
        let s = DiscreteState::new(init.clone());
        s.validate(model)?;
        plan.init = Some(s);
    }
    plan.validate()?;
    Ok(plan)
}
