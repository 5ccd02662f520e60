use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{check_dim, is_enumerable_size, Capabilities, EnergyModel, BINARY};
use crate::error::{Error, Result};
use crate::math::{sigmoid, softplus};

/// Restricted Boltzmann machine with the hidden units summed out:
/// `U(θ) = Σ_j softplus((Wθ + a)_j) + bᵀθ`, `θ ∈ {0,1}^d`.
#[derive(Clone, Debug)]
pub struct RbmModel {
    w: Vec<Vec<f64>>,
    a: Vec<f64>,
    b: Vec<f64>,
}

/// On-disk form: `W` as `hidden` rows of `visible` entries.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RbmFile {
    #[serde(rename = "W")]
    pub w: Vec<Vec<f64>>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl RbmModel {
    pub fn new(w: Vec<Vec<f64>>, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let (h, d) = (a.len(), b.len());
        if h == 0 || d == 0 {
            return Err(Error::Config("RBM needs hidden and visible units".into()));
        }
        if w.len() != h || w.iter().any(|row| row.len() != d) {
            return Err(Error::Config(format!("W must be {h}×{d}")));
        }
        if w.iter()
            .flatten()
            .chain(&a)
            .chain(&b)
            .any(|v| !v.is_finite())
        {
            return Err(Error::Config("RBM parameters must be finite".into()));
        }
        Ok(Self { w, a, b })
    }

    pub fn zeros(visible: usize, hidden: usize) -> Self {
        Self::new(
            vec![vec![0.0; visible]; hidden],
            vec![0.0; hidden],
            vec![0.0; visible],
        )
        .expect("shapes agree")
    }

    /// Every parameter i.i.d. `N(0, scale²)`.
    pub fn random<R: Rng + ?Sized>(visible: usize, hidden: usize, scale: f64, rng: &mut R) -> Self {
        let normal = Normal::new(0.0, scale).expect("scale is positive");
        let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| normal.sample(rng)).collect() };
        let w = (0..hidden).map(|_| draw(visible)).collect();
        let a = draw(hidden);
        let b = draw(visible);
        Self::new(w, a, b).expect("shapes agree")
    }

    pub fn from_file(file: &RbmFile) -> Result<Self> {
        Self::new(file.w.clone(), file.a.clone(), file.b.clone())
    }

    pub fn to_file(&self) -> RbmFile {
        RbmFile {
            w: self.w.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    pub fn hidden(&self) -> usize {
        self.a.len()
    }

    fn pre_activation<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        self.w
            .iter()
            .zip(&self.a)
            .map(move |(row, a)| row.iter().zip(x).map(|(w, x)| w * x).sum::<f64>() + a)
    }
}

impl EnergyModel for RbmModel {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn domain(&self, _i: usize) -> &[f64] {
        &BINARY
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            has_gradient: true,
            enumerable: is_enumerable_size(self),
            has_validity: false,
        }
    }

    fn energy(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x)?;
        let hidden: f64 = self.pre_activation(x).map(softplus).sum();
        Ok(hidden + self.b.iter().zip(x).map(|(b, x)| b * x).sum::<f64>())
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x)?;
        let mut g = self.b.clone();
        for (row, z) in self.w.iter().zip(self.pre_activation(x)) {
            let s = sigmoid(z);
            for (gi, wi) in g.iter_mut().zip(row) {
                *gi += wi * s;
            }
        }
        Ok(g)
    }
}
