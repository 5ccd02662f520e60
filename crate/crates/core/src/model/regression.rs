use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{check_dim, is_enumerable_size, Capabilities, EnergyModel, SPIN};
use crate::error::{Error, Result};
use crate::state::DiscreteState;

/// Inputs and targets of a regression task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionData {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

impl RegressionData {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    fn check(&self, features: usize) -> Result<()> {
        if self.x.len() != self.y.len() {
            return Err(Error::Dimension {
                expected: self.y.len(),
                got: self.x.len(),
            });
        }
        if let Some(row) = self.x.iter().find(|r| r.len() != features) {
            return Err(Error::Dimension {
                expected: features,
                got: row.len(),
            });
        }
        Ok(())
    }
}

/// Two-layer tanh network with weights in `{−1, +1}`:
/// `f_θ(x) = w2ᵀ tanh(W1 x)`, `U(θ) = −Σ_i (f_θ(x_i) − y_i)²`.
///
/// `θ` stores `W1` row-major (`hidden × features`) followed by `w2`.
#[derive(Clone, Debug)]
pub struct BinaryRegressionNetModel {
    train: RegressionData,
    test: Option<RegressionData>,
    features: usize,
    hidden: usize,
}

/// On-disk form. The test split is optional.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegressionNetFile {
    pub train_x: Vec<Vec<f64>>,
    pub train_y: Vec<f64>,
    pub hidden: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_x: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub test_y: Option<Vec<f64>>,
}

impl BinaryRegressionNetModel {
    pub const DEFAULT_HIDDEN: usize = 16;

    pub fn new(train: RegressionData, test: Option<RegressionData>, hidden: usize) -> Result<Self> {
        if train.is_empty() || hidden == 0 {
            return Err(Error::Config("need training data and hidden units".into()));
        }
        let features = train.x[0].len();
        if features == 0 {
            return Err(Error::Config("inputs need at least one feature".into()));
        }
        train.check(features)?;
        if let Some(t) = &test {
            t.check(features)?;
        }
        Ok(Self {
            train,
            test,
            features,
            hidden,
        })
    }

    /// Data generated by a random ground-truth network plus Gaussian noise.
    /// Inputs are uniform on `[-input_scale, input_scale]^features`; small
    /// scales keep the tanh units near their linear range, which keeps the
    /// energy differences of single flips moderate. Returns the model and
    /// the ground-truth weights.
    pub fn synthetic<R: Rng + ?Sized>(
        features: usize,
        hidden: usize,
        n_train: usize,
        n_test: usize,
        input_scale: f64,
        noise: f64,
        rng: &mut R,
    ) -> (Self, DiscreteState) {
        let dim = features * hidden + hidden;
        let truth = DiscreteState((0..dim).map(|_| SPIN[rng.random_range(0..2)]).collect());
        let gauss = Normal::new(0.0, 1.0).expect("unit normal");
        let draw = |n: usize, rng: &mut R| -> RegressionData {
            let x: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..features)
                        .map(|_| input_scale * rng.random_range(-1.0..1.0))
                        .collect()
                })
                .collect();
            let y = x
                .iter()
                .map(|xi| forward(truth.values(), xi, features, hidden) + noise * gauss.sample(rng))
                .collect();
            RegressionData { x, y }
        };
        let train = draw(n_train, rng);
        let test = draw(n_test, rng);
        let model = Self::new(train, Some(test), hidden).expect("consistent shapes");
        (model, truth)
    }

    pub fn from_file(file: &RegressionNetFile) -> Result<Self> {
        let test = match (&file.test_x, &file.test_y) {
            (Some(x), Some(y)) => Some(RegressionData {
                x: x.clone(),
                y: y.clone(),
            }),
            (None, None) => None,
            _ => return Err(Error::Config("test_x and test_y come together".into())),
        };
        let train = RegressionData {
            x: file.train_x.clone(),
            y: file.train_y.clone(),
        };
        Self::new(train, test, file.hidden)
    }

    pub fn to_file(&self) -> RegressionNetFile {
        RegressionNetFile {
            train_x: self.train.x.clone(),
            train_y: self.train.y.clone(),
            hidden: self.hidden,
            test_x: self.test.as_ref().map(|t| t.x.clone()),
            test_y: self.test.as_ref().map(|t| t.y.clone()),
        }
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn train(&self) -> &RegressionData {
        &self.train
    }

    pub fn test(&self) -> Option<&RegressionData> {
        self.test.as_ref()
    }

    pub fn predict(&self, theta: &[f64], x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), theta)?;
        check_dim(self.features, x)?;
        Ok(forward(theta, x, self.features, self.hidden))
    }
}

fn forward(theta: &[f64], x: &[f64], features: usize, hidden: usize) -> f64 {
    let (w1, w2) = theta.split_at(features * hidden);
    w1.chunks(features)
        .zip(w2)
        .map(|(row, v)| v * row.iter().zip(x).map(|(w, x)| w * x).sum::<f64>().tanh())
        .sum()
}

impl EnergyModel for BinaryRegressionNetModel {
    fn dim(&self) -> usize {
        self.features * self.hidden + self.hidden
    }

    fn domain(&self, _i: usize) -> &[f64] {
        &SPIN
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            has_gradient: true,
            enumerable: is_enumerable_size(self),
            has_validity: false,
        }
    }

    fn energy(&self, theta: &[f64]) -> Result<f64> {
        check_dim(self.dim(), theta)?;
        Ok(-self
            .train
            .x
            .iter()
            .zip(&self.train.y)
            .map(|(x, y)| {
                let r = forward(theta, x, self.features, self.hidden) - y;
                r * r
            })
            .sum::<f64>())
    }

    fn gradient(&self, theta: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), theta)?;
        let (p, h) = (self.features, self.hidden);
        let (w1, w2) = theta.split_at(p * h);
        let mut grad = vec![0.0; theta.len()];
        let mut act = vec![0.0; h];
        for (x, y) in self.train.x.iter().zip(&self.train.y) {
            for (a, row) in act.iter_mut().zip(w1.chunks(p)) {
                *a = row.iter().zip(x).map(|(w, x)| w * x).sum::<f64>().tanh();
            }
            let out: f64 = act.iter().zip(w2).map(|(a, v)| a * v).sum();
            // dU/df = −2 (f − y)
            let upstream = -2.0 * (out - y);
            let (g1, g2) = grad.split_at_mut(p * h);
            for k in 0..h {
                g2[k] += upstream * act[k];
                let back = upstream * w2[k] * (1.0 - act[k] * act[k]);
                for (g, xj) in g1[k * p..(k + 1) * p].iter_mut().zip(x) {
                    *g += back * xj;
                }
            }
        }
        Ok(grad)
    }
}
