use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{mean, std_dev, variance};
use crate::model::{
    exact_distribution, state_index, state_space_size, BinaryRegressionNetModel, EnergyModel,
    RegressionData, TspModel,
};
use crate::state::DiscreteState;

/// Number of positions where two routes disagree.
pub fn pmc(p: &[usize], q: &[usize]) -> Result<usize> {
    if p.len() != q.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            got: q.len(),
        });
    }
    Ok(p.iter().zip(q).filter(|(a, b)| a != b).count())
}

/// Mean and population std of the mismatch count from `best` to each of `others`.
pub fn pairwise_mismatch_count(best: &[usize], others: &[Vec<usize>]) -> Result<(f64, f64)> {
    if others.is_empty() {
        return Err(Error::Config(
            "mismatch count needs at least one other route".into(),
        ));
    }
    let counts = others
        .iter()
        .map(|o| pmc(best, o).map(|c| c as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok((mean(&counts), std_dev(&counts)))
}

/// Histogram of the archive over the enumeration order, normalized.
pub fn empirical_distribution<M: EnergyModel + ?Sized>(
    samples: &[DiscreteState],
    model: &M,
) -> Result<Vec<f64>> {
    let size = state_space_size(model)
        .filter(|_| model.capabilities().enumerable)
        .ok_or_else(|| Error::Capability("model state space is not enumerable".into()))?;
    if samples.is_empty() {
        return Err(Error::Config("empty archive".into()));
    }
    let mut counts = vec![0.0; size];
    for s in samples {
        counts[state_index(model, s.values())?] += 1.0;
    }
    let n = samples.len() as f64;
    counts.iter_mut().for_each(|c| *c /= n);
    Ok(counts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub l1: f64,
    pub tv: f64,
}

/// L1 and total-variation distance between the archive and the exact target.
pub fn exact_distribution_distance<M: EnergyModel + ?Sized>(
    samples: &[DiscreteState],
    model: &M,
) -> Result<DistanceReport> {
    let emp = empirical_distribution(samples, model)?;
    let exact = exact_distribution(model)?;
    let l1: f64 = emp.iter().zip(&exact).map(|(a, b)| (a - b).abs()).sum();
    Ok(DistanceReport { l1, tv: l1 / 2.0 })
}

/// Fraction of samples equal to each listed mode.
pub fn mode_visit_frequencies(samples: &[DiscreteState], modes: &[DiscreteState]) -> Vec<f64> {
    let n = samples.len().max(1) as f64;
    modes
        .iter()
        .map(|m| samples.iter().filter(|s| s.values() == m.values()).count() as f64 / n)
        .collect()
}

fn check_data(model: &BinaryRegressionNetModel, data: &RegressionData) -> Result<()> {
    if data.x.len() != data.y.len() {
        return Err(Error::Dimension {
            expected: data.x.len(),
            got: data.y.len(),
        });
    }
    if data.is_empty() {
        return Err(Error::Config("empty evaluation set".into()));
    }
    if let Some(bad) = data.x.iter().find(|r| r.len() != model.features()) {
        return Err(Error::Dimension {
            expected: model.features(),
            got: bad.len(),
        });
    }
    Ok(())
}

/// Root mean squared error of a single network on `data`.
pub fn regression_rmse(
    theta: &DiscreteState,
    model: &BinaryRegressionNetModel,
    data: &RegressionData,
) -> Result<f64> {
    check_data(model, data)?;
    theta.validate(model)?;
    let mut se = 0.0;
    for (x, y) in data.x.iter().zip(&data.y) {
        let f = model.predict(theta.values(), x)?;
        se += (f - y) * (f - y);
    }
    Ok((se / data.len() as f64).sqrt())
}

/// RMSE of the averaged prediction of several networks (posterior predictive mean).
pub fn ensemble_rmse(
    thetas: &[DiscreteState],
    model: &BinaryRegressionNetModel,
    data: &RegressionData,
) -> Result<f64> {
    check_data(model, data)?;
    if thetas.is_empty() {
        return Err(Error::Config("empty ensemble".into()));
    }
    for t in thetas {
        t.validate(model)?;
    }
    let k = thetas.len() as f64;
    let mut se = 0.0;
    for (x, y) in data.x.iter().zip(&data.y) {
        let mut f = 0.0;
        for t in thetas {
            f += model.predict(t.values(), x)?;
        }
        let f = f / k;
        se += (f - y) * (f - y);
    }
    Ok((se / data.len() as f64).sqrt())
}

/// Route statistics of a TSP archive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteSummary {
    pub costs: Vec<f64>,
    pub best_route: Vec<usize>,
    pub best_cost: f64,
    pub unique_routes: usize,
    pub pmc_mean: f64,
    pub pmc_std: f64,
    /// Population variance of the sampled costs.
    pub cost_variance: f64,
}

/// Decodes every sample, picks the cheapest route (first on ties) and measures
/// how far the rest sit from it.
pub fn route_summary(samples: &[DiscreteState], model: &TspModel) -> Result<RouteSummary> {
    let routes = samples
        .iter()
        .map(|s| {
            model
                .decode_route(s.values())
                .ok_or_else(|| Error::InvalidState(format!("{s} is not a tour")))
        })
        .collect::<Result<Vec<_>>>()?;
    if routes.len() < 2 {
        return Err(Error::Config(
            "route summary needs at least two samples".into(),
        ));
    }
    let costs: Vec<f64> = routes.iter().map(|r| model.route_cost(r)).collect();
    let best = (0..costs.len()).fold(0, |b, i| if costs[i] < costs[b] { i } else { b });
    let others: Vec<Vec<usize>> = routes
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != best)
        .map(|(_, r)| r.clone())
        .collect();
    let (pmc_mean, pmc_std) = pairwise_mismatch_count(&routes[best], &others)?;
    let mut uniq = routes.clone();
    uniq.sort();
    uniq.dedup();
    Ok(RouteSummary {
        cost_variance: variance(&costs),
        best_route: routes[best].clone(),
        best_cost: costs[best],
        unique_routes: uniq.len(),
        costs,
        pmc_mean,
        pmc_std,
    })
}
