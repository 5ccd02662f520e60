use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{interquartile_range, std_dev};
use crate::model::EnergyModel;
use crate::state::DiscreteState;

/// Central-difference step for Hessians built from the analytic gradient.
pub const HESSIAN_STEP: f64 = 1e-4;
pub const MAX_HESSIAN_DIM: usize = 64;

/// Pooled Hessian eigenvalues over an archive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub eigenvalues: Vec<f64>,
    /// Population standard deviation of the pool.
    pub std: f64,
    /// Interquartile range, linear interpolation between order statistics.
    pub iqr: f64,
}

/// Symmetrized Hessian `(H + Hᵀ)/2` of the continuous extension at `x`, with
/// column `j` taken as `(∇U(x + h e_j) − ∇U(x − h e_j)) / 2h`.
pub fn hessian_fd<M: EnergyModel + ?Sized>(model: &M, x: &[f64], h: f64) -> Result<Vec<Vec<f64>>> {
    let d = x.len();
    let mut cols = Vec::with_capacity(d);
    let mut probe = x.to_vec();
    for j in 0..d {
        probe[j] = x[j] + h;
        let up = model.gradient(&probe)?;
        probe[j] = x[j] - h;
        let down = model.gradient(&probe)?;
        probe[j] = x[j];
        cols.push(
            up.iter()
                .zip(&down)
                .map(|(u, l)| (u - l) / (2.0 * h))
                .collect::<Vec<_>>(),
        );
    }
    Ok((0..d)
        .map(|i| (0..d).map(|j| 0.5 * (cols[j][i] + cols[i][j])).collect())
        .collect())
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// ascending.
pub fn symmetric_eigenvalues(matrix: &[Vec<f64>]) -> Vec<f64> {
    let n = matrix.len();
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let scale: f64 = a.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}

/// Pools the Hessian spectrum at every sample (repeated states count once
/// per visit) and summarizes its spread.
pub fn hessian_eigenspectrum<M: EnergyModel + ?Sized>(
    samples: &[DiscreteState],
    model: &M,
) -> Result<EigenReport> {
    if !model.capabilities().has_gradient {
        return Err(Error::Capability("eigenspectrum needs a gradient".into()));
    }
    if model.dim() > MAX_HESSIAN_DIM {
        return Err(Error::Capability(format!(
            "eigenspectrum limited to {MAX_HESSIAN_DIM} dimensions, model has {}",
            model.dim()
        )));
    }
    let mut cache: HashMap<Vec<u64>, Vec<f64>> = HashMap::new();
    let mut eigenvalues = Vec::with_capacity(samples.len() * model.dim());
    for s in samples {
        s.validate(model)?;
        let key: Vec<u64> = s.values().iter().map(|v| v.to_bits()).collect();
        if !cache.contains_key(&key) {
            let h = hessian_fd(model, s.values(), HESSIAN_STEP)?;
            cache.insert(key.clone(), symmetric_eigenvalues(&h));
        }
        eigenvalues.extend_from_slice(&cache[&key]);
    }
    if eigenvalues.is_empty() {
        return Err(Error::Config("eigenspectrum of an empty archive".into()));
    }
    Ok(EigenReport {
        std: std_dev(&eigenvalues),
        iqr: interquartile_range(&eigenvalues),
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Capabilities, CategoricalPmfModel, BINARY};

    struct Bowl(usize);
    impl EnergyModel for Bowl {
        fn dim(&self) -> usize {
            self.0
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
            Ok(-x.iter().map(|v| v * v).sum::<f64>())
        }
        fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
            Ok(x.iter().map(|v| -2.0 * v).collect())
        }
    }

    #[test]
    fn quadratic_bowl_has_constant_spectrum() {
        let h = hessian_fd(&Bowl(3), &[0.0, 1.0, 1.0], HESSIAN_STEP).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { -2.0 } else { 0.0 };
                assert!((h[i][j] - want).abs() < 1e-6);
            }
        }
        let samples: Vec<_> = ["000", "101", "111"]
            .iter()
            .map(|b| DiscreteState::from_bits(b).unwrap())
            .collect();
        let r = hessian_eigenspectrum(&samples, &Bowl(3)).unwrap();
        assert_eq!(r.eigenvalues.len(), 9);
        assert!(r.eigenvalues.iter().all(|e| (e + 2.0).abs() < 1e-6));
        assert!(r.std < 1e-6 && r.iqr < 1e-6);
    }

    #[test]
    fn uniform_table_spectrum_is_zero() {
        let m = CategoricalPmfModel::uniform(4).unwrap();
        let samples = vec![DiscreteState::from_bits("0110").unwrap(); 3];
        let r = hessian_eigenspectrum(&samples, &m).unwrap();
        assert!(r.eigenvalues.iter().all(|e| e.abs() < 1e-9));
    }

    #[test]
    fn jacobi_matches_closed_forms() {
        // [[2,1],[1,2]] → 1, 3
        let e = symmetric_eigenvalues(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
        // path graph P3 adjacency → -√2, 0, √2
        let e = symmetric_eigenvalues(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
        ]);
        let r2 = 2f64.sqrt();
        for (got, want) in e.iter().zip([-r2, 0.0, r2]) {
            assert!((got - want).abs() < 1e-13);
        }
    }

    #[test]
    fn jacobi_preserves_trace_and_frobenius_norm() {
        let m: Vec<Vec<f64>> = (0..6)
            .map(|i| {
                (0..6)
                    .map(|j| ((i * 7 + j * 3) % 5) as f64 - 2.0 + if i == j { 1.5 } else { 0.0 })
                    .collect()
            })
            .collect();
        let sym: Vec<Vec<f64>> = (0..6)
            .map(|i| (0..6).map(|j| 0.5 * (m[i][j] + m[j][i])).collect())
            .collect();
        let e = symmetric_eigenvalues(&sym);
        let trace: f64 = (0..6).map(|i| sym[i][i]).sum();
        let fro: f64 = sym.iter().flatten().map(|v| v * v).sum();
        assert!((e.iter().sum::<f64>() - trace).abs() < 1e-10);
        assert!((e.iter().map(|v| v * v).sum::<f64>() - fro).abs() < 1e-10);
    }

    #[test]
    fn gradient_free_models_are_rejected() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
        let m = crate::model::TspModel::random(3, &mut rng);
        let s = m.random_state(&mut rng);
        assert!(matches!(
            hessian_eigenspectrum(&[s], &m),
            Err(Error::Capability(_))
        ));
    }
}
