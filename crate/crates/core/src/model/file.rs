use std::path::Path;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::categorical::CategoricalPmfFile;
use super::rbm::RbmFile;
use super::regression::RegressionNetFile;
use super::tsp::TspFile;
use super::{
    BinaryRegressionNetModel, Capabilities, CategoricalPmfModel, EnergyModel, RbmModel, TspModel,
};
use crate::error::Result;
use crate::state::DiscreteState;

/// Type tag naming the JSON layout of a model file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Categorical,
    Tsp,
    Rbm,
    RegressionNet,
}

/// Any of the bundled models, behind one concrete type.
#[derive(Clone, Debug)]
pub enum AnyModel {
    Categorical(CategoricalPmfModel),
    Tsp(TspModel),
    Rbm(RbmModel),
    RegressionNet(BinaryRegressionNetModel),
}

impl AnyModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            AnyModel::Categorical(_) => ModelKind::Categorical,
            AnyModel::Tsp(_) => ModelKind::Tsp,
            AnyModel::Rbm(_) => ModelKind::Rbm,
            AnyModel::RegressionNet(_) => ModelKind::RegressionNet,
        }
    }

    pub fn parse(kind: ModelKind, json: &str) -> Result<Self> {
        Ok(match kind {
            ModelKind::Categorical => {
                let f: CategoricalPmfFile = serde_json::from_str(json)?;
                AnyModel::Categorical(CategoricalPmfModel::from_file(&f)?)
            }
            ModelKind::Tsp => {
                let f: TspFile = serde_json::from_str(json)?;
                AnyModel::Tsp(TspModel::from_file(&f)?)
            }
            ModelKind::Rbm => {
                let f: RbmFile = serde_json::from_str(json)?;
                AnyModel::Rbm(RbmModel::from_file(&f)?)
            }
            ModelKind::RegressionNet => {
                let f: RegressionNetFile = serde_json::from_str(json)?;
                AnyModel::RegressionNet(BinaryRegressionNetModel::from_file(&f)?)
            }
        })
    }

    pub fn to_json(&self) -> String {
        let value = match self {
            AnyModel::Categorical(m) => serde_json::to_string_pretty(&m.to_file()),
            AnyModel::Tsp(m) => serde_json::to_string_pretty(&m.to_file()),
            AnyModel::Rbm(m) => serde_json::to_string_pretty(&m.to_file()),
            AnyModel::RegressionNet(m) => serde_json::to_string_pretty(&m.to_file()),
        };
        value.expect("model files serialize")
    }

    fn inner(&self) -> &dyn EnergyModel {
        match self {
            AnyModel::Categorical(m) => m,
            AnyModel::Tsp(m) => m,
            AnyModel::Rbm(m) => m,
            AnyModel::RegressionNet(m) => m,
        }
    }
}

pub fn load_model(kind: ModelKind, path: &Path) -> Result<AnyModel> {
    let text = std::fs::read_to_string(path)?;
    AnyModel::parse(kind, &text)
}

impl EnergyModel for AnyModel {
    fn dim(&self) -> usize {
        self.inner().dim()
    }
    fn domain(&self, i: usize) -> &[f64] {
        self.inner().domain(i)
    }
    fn capabilities(&self) -> Capabilities {
        self.inner().capabilities()
    }
    fn energy(&self, x: &[f64]) -> Result<f64> {
        self.inner().energy(x)
    }
    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.inner().gradient(x)
    }
    fn is_valid(&self, theta: &[f64]) -> bool {
        self.inner().is_valid(theta)
    }
    fn random_state(&self, rng: &mut dyn RngCore) -> DiscreteState {
        self.inner().random_state(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn files_round_trip_through_the_loader() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let models = vec![
            AnyModel::Categorical(CategoricalPmfModel::bernoulli4d()),
            AnyModel::Tsp(TspModel::random(5, &mut rng)),
            AnyModel::Rbm(RbmModel::random(4, 2, 0.5, &mut rng)),
            AnyModel::RegressionNet(
                BinaryRegressionNetModel::synthetic(2, 3, 5, 4, 1.0, 0.1, &mut rng).0,
            ),
        ];
        for m in models {
            let back = AnyModel::parse(m.kind(), &m.to_json()).unwrap();
            assert_eq!(back.to_json(), m.to_json());
            let x = m.random_state(&mut rng);
            assert_eq!(
                back.energy(x.values()).unwrap(),
                m.energy(x.values()).unwrap()
            );
        }
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        let err = AnyModel::parse(ModelKind::Rbm, "{\"W\": 3}").unwrap_err();
        assert!(err.is_config());
    }
}
