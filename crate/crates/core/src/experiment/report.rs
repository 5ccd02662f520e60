use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::config::{DiagnosticToggles, Experiment, ModelSpec};
use super::io::{io_err, write_chain_jsonl, write_eigenvalues_csv, write_json, write_routes_csv};
use crate::diagnostics::{
    ensemble_rmse, exact_distribution_distance, hessian_eigenspectrum, mode_visit_frequencies,
    regression_rmse, route_summary, DistanceReport,
};
use crate::error::{Error, Result};
use crate::kernel::{log_q_discrete, Coupling, SamplerConfig};
use crate::math::{mean, std_dev};
use crate::model::{exact_distribution, AnyModel, EnergyModel};
use crate::oracle::{exact_kernel_matrix, finite_difference_gradient};
use crate::runner::{run_with, Execution, RunPlan, RunReport, SamplerKind};
use crate::state::{DiscreteState, JointState};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainStats {
    pub chain_id: usize,
    pub seed: u64,
    pub samples: usize,
    pub proposals: u64,
    pub accepted: u64,
    pub rejected_invalid: u64,
    pub acceptance_rate: f64,
    pub mean_accept_prob: f64,
}

/// What was run, with which seeds, and how each chain fared.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub model: ModelSpec,
    pub plan: RunPlan,
    pub chains: Vec<ChainStats>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSummary {
    pub count: usize,
    pub std: f64,
    pub iqr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeFrequency {
    pub mode: String,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteReport {
    pub best_route: Vec<usize>,
    pub best_cost: f64,
    pub unique_routes: usize,
    pub pmc_mean: f64,
    pub pmc_std: f64,
    pub cost_variance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RmseSummary {
    /// Mean and spread of per-sample RMSE.
    pub mean: f64,
    pub std: f64,
    /// RMSE of the prediction averaged over all samples.
    pub ensemble: f64,
    pub on: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryReport {
    pub sampler: String,
    pub samples: usize,
    pub acceptance_rate: f64,
    pub mean_accept_prob: f64,
    pub rejected_invalid: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance: Option<DistanceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenspectrum: Option<EigenSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_frequencies: Option<Vec<ModeFrequency>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routes: Option<RouteReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rmse: Option<RmseSummary>,
}

/// Wall-clock figures, kept apart so the other outputs stay reproducible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_time_secs: f64,
}

pub struct RunOutcome {
    pub report: RunReport,
    pub summary: SummaryReport,
    pub eigenvalues: Option<Vec<f64>>,
    /// Unique routes with their costs, cheapest first.
    pub routes: Option<Vec<(Vec<usize>, f64)>>,
}

/// Runs the plan and computes the requested diagnostics.
pub fn run_experiment(exp: &Experiment) -> Result<RunOutcome> {
    run_experiment_with(exp, &exp.config.diagnostics)
}

fn run_experiment_with(exp: &Experiment, toggles: &DiagnosticToggles) -> Result<RunOutcome> {
    let report = run_with(&exp.plan, &exp.model, Execution::from_env()?)?;
    summarize(exp, report, toggles)
}

pub fn summarize(
    exp: &Experiment,
    report: RunReport,
    toggles: &DiagnosticToggles,
) -> Result<RunOutcome> {
    let samples = report.pooled_samples();
    let mut summary = SummaryReport {
        sampler: exp.plan.sampler.label().to_string(),
        samples: samples.len(),
        acceptance_rate: report.acceptance_rate(),
        mean_accept_prob: report.mean_accept_prob(),
        rejected_invalid: report.rejected_invalid(),
        coupling_norm: report.mean_coupling_norm(),
        distance: None,
        eigenspectrum: None,
        mode_frequencies: None,
        routes: None,
        rmse: None,
    };
    let mut eigenvalues = None;
    let mut routes = None;
    if toggles.tv {
        summary.distance = Some(exact_distribution_distance(&samples, &exp.model)?);
    }
    if toggles.eigenspectrum {
        let e = hessian_eigenspectrum(&samples, &exp.model)?;
        summary.eigenspectrum = Some(EigenSummary {
            count: e.eigenvalues.len(),
            std: e.std,
            iqr: e.iqr,
        });
        eigenvalues = Some(e.eigenvalues);
    }
    if toggles.mode_freqs {
        let modes = toggles
            .modes
            .iter()
            .map(|m| DiscreteState::from_bits(m))
            .collect::<Result<Vec<_>>>()?;
        let freqs = mode_visit_frequencies(&samples, &modes);
        summary.mode_frequencies = Some(
            toggles
                .modes
                .iter()
                .zip(freqs)
                .map(|(m, f)| ModeFrequency {
                    mode: m.clone(),
                    frequency: f,
                })
                .collect(),
        );
    }
    if toggles.pmc {
        let AnyModel::Tsp(tsp) = &exp.model else {
            return Err(Error::Capability("pmc needs a tsp model".into()));
        };
        let r = route_summary(&samples, tsp)?;
        let mut uniq: Vec<(Vec<usize>, f64)> = Vec::new();
        for s in &samples {
            let route = tsp.decode_route(s.values()).expect("archives hold tours");
            if !uniq.iter().any(|(u, _)| *u == route) {
                let c = tsp.route_cost(&route);
                uniq.push((route, c));
            }
        }
        uniq.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        routes = Some(uniq);
        summary.routes = Some(RouteReport {
            best_route: r.best_route,
            best_cost: r.best_cost,
            unique_routes: r.unique_routes,
            pmc_mean: r.pmc_mean,
            pmc_std: r.pmc_std,
            cost_variance: r.cost_variance,
        });
    }
    if toggles.rmse {
        let AnyModel::RegressionNet(net) = &exp.model else {
            return Err(Error::Capability(
                "rmse needs a regression-net model".into(),
            ));
        };
        let (data, on) = match net.test() {
            Some(t) => (t, "test"),
            None => (net.train(), "train"),
        };
        let each = samples
            .iter()
            .map(|s| regression_rmse(s, net, data))
            .collect::<Result<Vec<_>>>()?;
        summary.rmse = Some(RmseSummary {
            mean: mean(&each),
            std: std_dev(&each),
            ensemble: ensemble_rmse(&samples, net, data)?,
            on: on.into(),
        });
    }
    Ok(RunOutcome {
        report,
        summary,
        eigenvalues,
        routes,
    })
}

/// Writes `manifest.json`, `chain_<k>.jsonl`, `report.json`, `timing.json`
/// and, when computed, `eigenvalues.csv` and `routes.csv`.
pub fn write_run(exp: &Experiment, outcome: &RunOutcome, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut written = Vec::new();
    let manifest = Manifest {
        model: exp.config.model.clone(),
        plan: exp.plan.clone(),
        chains: outcome
            .report
            .chains
            .iter()
            .map(|c| ChainStats {
                chain_id: c.archive.chain_id,
                seed: c.archive.seed,
                samples: c.archive.samples.len(),
                proposals: c.proposals,
                accepted: c.accepted,
                rejected_invalid: c.rejected_invalid,
                acceptance_rate: c.acceptance_rate(),
                mean_accept_prob: c.mean_accept_prob(),
            })
            .collect(),
    };
    let mut at = |name: String| {
        let p = dir.join(name);
        written.push(p.clone());
        p
    };
    write_json(&manifest, &at("manifest.json".into()))?;
    for c in &outcome.report.chains {
        write_chain_jsonl(
            &c.archive.samples,
            &at(format!("chain_{}.jsonl", c.archive.chain_id)),
        )?;
    }
    write_json(&outcome.summary, &at("report.json".into()))?;
    if let Some(eig) = &outcome.eigenvalues {
        write_eigenvalues_csv(eig, &at("eigenvalues.csv".into()))?;
    }
    if let Some(routes) = &outcome.routes {
        write_routes_csv(routes, &at("routes.csv".into()))?;
    }
    write_json(
        &Timing {
            wall_time_secs: outcome.report.wall_time.as_secs_f64(),
        },
        &at("timing.json".into()),
    )?;
    Ok(written)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub sampler: String,
    pub alpha: f64,
    pub alpha_a: Option<f64>,
    pub eta: Option<f64>,
    pub acceptance_rate: f64,
    pub tv: Option<f64>,
    pub eigen_std: Option<f64>,
    pub eigen_iqr: Option<f64>,
    pub pmc_mean: Option<f64>,
    pub pmc_std: Option<f64>,
    pub rmse_mean: Option<f64>,
    pub rmse_std: Option<f64>,
}

fn entropic_params(plan: &RunPlan) -> (Option<f64>, Option<f64>) {
    let eta = plan.config.coupling.eta();
    let alpha_a = (eta.is_some() && !plan.config.glu).then_some(plan.config.alpha_a);
    (alpha_a, eta)
}

/// Runs every experiment on their shared model and tabulates every metric
/// the model supports, one row per experiment.
pub fn compare(exps: &[Experiment]) -> Result<Vec<CompareRow>> {
    if exps.len() < 2 {
        return Err(Error::Config("compare needs at least two configs".into()));
    }
    let reference = exps[0].model.to_json();
    for e in &exps[1..] {
        if e.model.kind() != exps[0].model.kind() || e.model.to_json() != reference {
            return Err(Error::Config(
                "compared configs must share one model".into(),
            ));
        }
    }
    let toggles = DiagnosticToggles::applicable(&exps[0].model);
    exps.iter()
        .map(|e| {
            let o = run_experiment_with(e, &toggles)?;
            let s = &o.summary;
            let (alpha_a, eta) = entropic_params(&e.plan);
            Ok(CompareRow {
                sampler: s.sampler.clone(),
                alpha: e.plan.config.alpha,
                alpha_a,
                eta,
                acceptance_rate: s.acceptance_rate,
                tv: s.distance.map(|d| d.tv),
                eigen_std: s.eigenspectrum.as_ref().map(|x| x.std),
                eigen_iqr: s.eigenspectrum.as_ref().map(|x| x.iqr),
                pmc_mean: s.routes.as_ref().map(|r| r.pmc_mean),
                pmc_std: s.routes.as_ref().map(|r| r.pmc_std),
                rmse_mean: s.rmse.as_ref().map(|r| r.mean),
                rmse_std: s.rmse.as_ref().map(|r| r.std),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Eta,
    Alpha,
    AlphaA,
}

impl SweepParam {
    /// Column name in sweep tables.
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Eta => "eta",
            SweepParam::Alpha => "alpha",
            SweepParam::AlphaA => "alpha_a",
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "eta" => Ok(SweepParam::Eta),
            "alpha" => Ok(SweepParam::Alpha),
            "alpha_a" => Ok(SweepParam::AlphaA),
            _ => Err(Error::Config(format!(
                "cannot sweep '{s}'; use eta, alpha or alpha_a"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub coupling_norm: Option<f64>,
    /// Ensemble RMSE for regression nets, TV for enumerable models, best
    /// route cost for TSP.
    pub validation_metric: Option<f64>,
    pub acceptance_rate: f64,
    pub mean_accept_prob: f64,
}

/// Reruns `exp` once per value of `param`, collecting the coupling norm,
/// a validation metric and acceptance statistics.
pub fn sweep(exp: &Experiment, param: SweepParam, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    if param != SweepParam::Alpha && !exp.plan.sampler.is_entropic() {
        return Err(Error::Config(format!(
            "{} has no {param:?} to sweep",
            exp.plan.sampler
        )));
    }
    let mut plans = Vec::with_capacity(values.len());
    for &v in values {
        let mut plan = exp.plan.clone();
        match param {
            SweepParam::Eta => plan.config.coupling = Coupling::Finite(v),
            SweepParam::Alpha => plan.config.alpha = v,
            SweepParam::AlphaA => plan.config.alpha_a = v,
        }
        plan.collect_aux = plan.sampler.is_entropic();
        exp.plan.sampler.check(&plan.config)?;
        plans.push(plan);
    }
    let toggles = DiagnosticToggles::applicable(&exp.model);
    let metric_toggles = DiagnosticToggles {
        eigenspectrum: false,
        ..toggles
    };
    values
        .iter()
        .zip(plans)
        .map(|(&value, plan)| {
            let e = Experiment {
                plan,
                ..exp.clone()
            };
            let o = run_experiment_with(&e, &metric_toggles)?;
            let s = o.summary;
            let validation_metric = s
                .rmse
                .as_ref()
                .map(|r| r.ensemble)
                .or(s.distance.map(|d| d.tv))
                .or(s.routes.as_ref().map(|r| r.best_cost));
            Ok(SweepRow {
                value,
                coupling_norm: s.coupling_norm,
                validation_metric,
                acceptance_rate: s.acceptance_rate,
                mean_accept_prob: s.mean_accept_prob,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub checks: Vec<CheckResult>,
}

impl OracleReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        self.checks.push(CheckResult {
            name: name.into(),
            pass: value < tolerance,
            value,
            tolerance,
        });
    }
}

/// Exact-matrix checks for the discrete kernels at the config's step size,
/// a cross-check of the kernel's proposal against the oracle's, and central
/// differences of the gradient when there is one.
pub fn oracle_check(exp: &Experiment) -> Result<OracleReport> {
    let model = &exp.model;
    if !model.capabilities().enumerable {
        return Err(Error::Capability(
            "oracle checks need an enumerable model".into(),
        ));
    }
    let caps = model.capabilities();
    let target = exact_distribution(model)?;
    let mode = exp.plan.config.gradient_mode;
    let alpha = exp.plan.config.alpha;
    let mut report = OracleReport { checks: Vec::new() };

    let binary = (0..model.dim()).all(|i| model.domain(i).len() == 2);
    let mut kinds = vec![SamplerKind::Dula, SamplerKind::Dmala, SamplerKind::Gibbs];
    if caps.has_gradient && binary {
        kinds.push(SamplerKind::Gwg);
    }
    for kind in kinds {
        if matches!(
            kind,
            SamplerKind::Dula | SamplerKind::Dmala | SamplerKind::Gwg
        ) && !caps.has_gradient
            && mode == crate::kernel::GradientMode::Taylor
        {
            continue;
        }
        let config = kind.configure(alpha, 1.0, 1.0).with_gradient_mode(mode);
        let p = exact_kernel_matrix(kind, &config, model)?;
        let label = kind.label();
        report.push(format!("{label} row sums"), p.max_row_defect(), 1e-10);
        if kind != SamplerKind::Dula {
            report.push(
                format!("{label} stationarity"),
                p.stationarity_residual(&target),
                1e-9,
            );
        }
        if matches!(kind, SamplerKind::Dmala | SamplerKind::Gwg) {
            report.push(
                format!("{label} detailed balance"),
                p.detailed_balance_residual(&target),
                1e-9,
            );
        }
        if kind == SamplerKind::Dula {
            report.push(
                "DULA proposal vs kernel",
                proposal_gap(model, &config, &p)?,
                1e-12,
            );
        }
    }
    if caps.has_gradient {
        report.push(
            "gradient central differences",
            gradient_gap(model, exp.plan.seed)?,
            1e-5,
        );
    }
    Ok(report)
}

fn proposal_gap(
    model: &AnyModel,
    config: &SamplerConfig,
    p: &crate::oracle::TransitionMatrix,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (a, from) in p.states.iter().enumerate() {
        if !model.is_valid(from.values()) {
            continue;
        }
        let joint = JointState::anchored(from.clone());
        let mut off = 0.0;
        for (b, to) in p.states.iter().enumerate() {
            let q = log_q_discrete(to, &joint, config, model)?.exp();
            if b != a && model.is_valid(to.values()) {
                worst = worst.max((q - p.p[a][b]).abs());
                off += q;
            }
        }
        worst = worst.max((1.0 - off - p.p[a][a]).abs());
    }
    Ok(worst)
}

/// Largest relative error of the analytic gradient against central
/// differences at random interior points.
fn gradient_gap(model: &AnyModel, seed: u64) -> Result<f64> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let x: Vec<f64> = (0..model.dim())
            .map(|i| {
                let d = model.domain(i);
                let (lo, hi) = (d[0], d[d.len() - 1]);
                lo + (hi - lo) * rng.random::<f64>()
            })
            .collect();
        let g = model.gradient(&x)?;
        let fd = finite_difference_gradient(|y| model.energy(y).unwrap_or(f64::NAN), &x, 1e-5);
        let scale = g.iter().map(|v| v.abs()).fold(1.0, f64::max);
        for (a, b) in g.iter().zip(&fd) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    Ok(worst)
}
