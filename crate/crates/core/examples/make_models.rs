//! Regenerates the model files under `configs/models`.
//!
//! cargo run -p flatland --example make_models -- configs/models

use std::path::PathBuf;

use flatland::model::{BinaryRegressionNetModel, CategoricalPmfModel, RbmModel, TspModel};
use flatland::AnyModel;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> flatland::Result<()> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "configs/models".into()),
    );
    std::fs::create_dir_all(&dir)?;
    let models = [
        (
            "bernoulli4d.json",
            AnyModel::Categorical(CategoricalPmfModel::bernoulli4d()),
        ),
        (
            "tsp8.json",
            AnyModel::Tsp(TspModel::random(8, &mut ChaCha8Rng::seed_from_u64(8))),
        ),
        (
            "rbm12x6.json",
            AnyModel::Rbm(RbmModel::random(
                12,
                6,
                1.5,
                &mut ChaCha8Rng::seed_from_u64(12),
            )),
        ),
        (
            "regression.json",
            AnyModel::RegressionNet(
                BinaryRegressionNetModel::synthetic(
                    4,
                    8,
                    100,
                    200,
                    0.3,
                    0.1,
                    &mut ChaCha8Rng::seed_from_u64(13),
                )
                .0,
            ),
        ),
    ];
    for (name, model) in models {
        let path = dir.join(name);
        std::fs::write(&path, model.to_json() + "\n")?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
