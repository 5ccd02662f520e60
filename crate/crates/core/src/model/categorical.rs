use serde::{Deserialize, Serialize};

use super::{check_dim, Capabilities, EnergyModel, BINARY};
use crate::error::{Error, Result};

/// Joint distribution over `{0,1}^d` given as a full probability table,
/// extended to `[0,1]^d` by its multilinear interpolation
/// `U(x) = Σ_a Π_n x_n^{a_n} (1 − x_n)^{1 − a_n} ln p_a`.
///
/// The table is indexed by the state read as a big-endian bit string
/// (`probs[0b0100]` is the probability of `θ = (0,1,0,0)`). Entries are used
/// as given; a table that sums to slightly less or more than one only shifts
/// `U` by a constant, and [`CategoricalPmfModel::pmf`] renormalizes.
#[derive(Clone, Debug)]
pub struct CategoricalPmfModel {
    dim: usize,
    log_p: Vec<f64>,
}

/// On-disk form: `{ "dim": d, "probs": [...] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CategoricalPmfFile {
    pub dim: usize,
    pub probs: Vec<f64>,
}

impl CategoricalPmfModel {
    pub const MAX_DIM: usize = 20;

    pub fn new(dim: usize, probs: &[f64]) -> Result<Self> {
        if dim == 0 || dim > Self::MAX_DIM {
            return Err(Error::Config(format!(
                "categorical table dimension must be in 1..={}, got {dim}",
                Self::MAX_DIM
            )));
        }
        if probs.len() != 1 << dim {
            return Err(Error::Dimension {
                expected: 1 << dim,
                got: probs.len(),
            });
        }
        if let Some(bad) = probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::Config(format!(
                "table entries must be positive and finite, found {bad}"
            )));
        }
        Ok(Self {
            dim,
            log_p: probs.iter().map(|p| p.ln()).collect(),
        })
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        Self::new(dim, &vec![1.0 / (1u64 << dim) as f64; 1 << dim])
    }

    /// The 16-state joint Bernoulli target with two sharp modes
    /// (`0010`, `0111`) and two flat modes (`0100`, `1001`).
    pub fn bernoulli4d() -> Self {
        Self::new(4, &BERNOULLI_4D).expect("static table is valid")
    }

    pub fn from_file(file: &CategoricalPmfFile) -> Result<Self> {
        Self::new(file.dim, &file.probs)
    }

    pub fn to_file(&self) -> CategoricalPmfFile {
        CategoricalPmfFile {
            dim: self.dim,
            probs: self.log_p.iter().map(|l| l.exp()).collect(),
        }
    }

    pub fn log_table(&self) -> &[f64] {
        &self.log_p
    }

    /// Normalized probabilities in table order.
    pub fn pmf(&self) -> Vec<f64> {
        let z = crate::math::log_sum_exp(&self.log_p);
        self.log_p.iter().map(|l| (l - z).exp()).collect()
    }

    /// Contracts the table against `(1 − x_n, x_n)` along every axis, except
    /// `skip`, which is contracted against `(−1, 1)` (its partial derivative).
    fn contract(&self, x: &[f64], skip: Option<usize>) -> f64 {
        let mut buf = self.log_p.clone();
        let mut len = buf.len();
        // the last coordinate is the least significant bit
        for n in (0..self.dim).rev() {
            let (w0, w1) = if Some(n) == skip {
                (-1.0, 1.0)
            } else {
                (1.0 - x[n], x[n])
            };
            len /= 2;
            for j in 0..len {
                buf[j] = w0 * buf[2 * j] + w1 * buf[2 * j + 1];
            }
        }
        buf[0]
    }
}

impl EnergyModel for CategoricalPmfModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn domain(&self, _i: usize) -> &[f64] {
        &BINARY
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            has_gradient: true,
            enumerable: true,
            has_validity: false,
        }
    }

    fn energy(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x)?;
        Ok(self.contract(x, None))
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x)?;
        Ok((0..self.dim).map(|k| self.contract(x, Some(k))).collect())
    }
}

const BERNOULLI_4D: [f64; 16] = [
    0.07688, // 0000
    0.04725, // 0001
    0.12500, // 0010
    0.01667, // 0011
    0.08688, // 0100
    0.07688, // 0101
    0.07688, // 0110
    0.16756, // 0111
    0.04725, // 1000
    0.05825, // 1001
    0.01667, // 1010
    0.04725, // 1011
    0.07688, // 1100
    0.04725, // 1101
    0.01900, // 1110
    0.01335, // 1111
];
