//! Brute-force references for tests: exact transition matrices, stationary
//! vectors, central differences and quadrature.
//!
//! Nothing here calls into `kernel`. The proposal arithmetic is written out
//! again from scratch so a shared bug cannot hide in both places.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::kernel::{Coupling, GradientMode, SamplerConfig};
use crate::model::{enumerate_states, state_index, EnergyModel};
use crate::runner::SamplerKind;
use crate::state::DiscreteState;

pub const STATIONARY_TOL: f64 = 1e-12;
pub const MAX_POWER_ITERS: usize = 1_000_000;

/// Row-stochastic matrix over the enumerated states of a model.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    pub states: Vec<DiscreteState>,
    pub p: Vec<Vec<f64>>,
}

impl TransitionMatrix {
    pub fn from_rows(p: Vec<Vec<f64>>) -> Result<Self> {
        let n = p.len();
        if p.iter().any(|r| r.len() != n) {
            return Err(Error::Config("transition matrix must be square".into()));
        }
        Ok(Self {
            states: Vec::new(),
            p,
        })
    }

    pub fn size(&self) -> usize {
        self.p.len()
    }

    /// Largest deviation of a row sum from one.
    pub fn max_row_defect(&self) -> f64 {
        self.p
            .iter()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `v P`
    pub fn left_apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.size();
        let mut out = vec![0.0; n];
        for (i, row) in self.p.iter().enumerate() {
            if v[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                out[j] += v[i] * row[j];
            }
        }
        out
    }

    pub fn matmul(&self, other: &TransitionMatrix) -> TransitionMatrix {
        let n = self.size();
        let mut p = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                let a = self.p[i][k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    p[i][j] += a * other.p[k][j];
                }
            }
        }
        TransitionMatrix {
            states: self.states.clone(),
            p,
        }
    }

    /// `‖π P − π‖_∞`
    pub fn stationarity_residual(&self, pi: &[f64]) -> f64 {
        self.left_apply(pi)
            .iter()
            .zip(pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|π(x)P(x,y) − π(y)P(y,x)|` over all pairs.
    pub fn detailed_balance_residual(&self, pi: &[f64]) -> f64 {
        let n = self.size();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((pi[i] * self.p[i][j] - pi[j] * self.p[j][i]).abs());
            }
        }
        worst
    }
}

fn lse(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn energy_or_none<M: EnergyModel + ?Sized>(model: &M, x: &[f64]) -> Result<Option<f64>> {
    if !model.is_valid(x) {
        return Ok(None);
    }
    match model.energy(x) {
        Ok(u) => Ok(Some(u)),
        Err(Error::InvalidState(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Per-coordinate log probability tables of the Langevin proposal from `x`.
fn langevin_tables<M: EnergyModel + ?Sized>(
    model: &M,
    x: &[f64],
    alpha: f64,
    mode: GradientMode,
) -> Result<Vec<Vec<f64>>> {
    let d = x.len();
    let grad = match mode {
        GradientMode::Taylor => Some(model.gradient(x)?),
        GradientMode::ExactDifference => None,
    };
    let here = energy_or_none(model, x)?;
    let mut tables = Vec::with_capacity(d);
    for i in 0..d {
        let mut logits = Vec::new();
        for &v in model.domain(i) {
            let step = v - x[i];
            let pull = match &grad {
                Some(g) => 0.5 * g[i] * step,
                None => {
                    let mut y = x.to_vec();
                    y[i] = v;
                    match (energy_or_none(model, &y)?, here) {
                        (Some(a), Some(b)) => 0.5 * (a - b),
                        _ => 0.0,
                    }
                }
            };
            logits.push(pull - step * step / (2.0 * alpha));
        }
        let z = lse(&logits);
        tables.push(logits.into_iter().map(|l| l - z).collect());
    }
    Ok(tables)
}

fn position(domain: &[f64], v: f64) -> usize {
    domain
        .iter()
        .position(|&w| w == v)
        .expect("value outside domain")
}

fn log_q_full<M: EnergyModel + ?Sized>(model: &M, tables: &[Vec<f64>], to: &[f64]) -> f64 {
    to.iter()
        .enumerate()
        .map(|(i, &v)| tables[i][position(model.domain(i), v)])
        .sum()
}

/// Exact one-step kernel of a purely discrete sampler.
///
/// Infeasible states keep an identity row. Mass proposed into an infeasible
/// state stays on the diagonal.
pub fn exact_kernel_matrix<M: EnergyModel + ?Sized>(
    sampler: SamplerKind,
    config: &SamplerConfig,
    model: &M,
) -> Result<TransitionMatrix> {
    let states: Vec<DiscreteState> = enumerate_states(model)?.collect();
    let n = states.len();
    let energies = states
        .iter()
        .map(|s| energy_or_none(model, s.values()))
        .collect::<Result<Vec<_>>>()?;
    let mut p = vec![vec![0.0; n]; n];
    match sampler {
        SamplerKind::Dula | SamplerKind::Dmala => {
            if config.coupling != Coupling::Decoupled {
                return Err(Error::Capability(
                    "exact matrices exist only for decoupled kernels".into(),
                ));
            }
            let tables = states
                .iter()
                .zip(&energies)
                .map(|(s, u)| match u {
                    Some(_) => {
                        langevin_tables(model, s.values(), config.alpha, config.gradient_mode)
                            .map(Some)
                    }
                    None => Ok(None),
                })
                .collect::<Result<Vec<_>>>()?;
            for a in 0..n {
                let Some(ta) = &tables[a] else {
                    p[a][a] = 1.0;
                    continue;
                };
                let ua = energies[a].unwrap();
                let mut off = 0.0;
                for b in 0..n {
                    if b == a {
                        continue;
                    }
                    let Some(ub) = energies[b] else { continue };
                    let fwd = log_q_full(model, ta, states[b].values());
                    let mass = if sampler == SamplerKind::Dula {
                        fwd.exp()
                    } else {
                        let rev =
                            log_q_full(model, tables[b].as_ref().unwrap(), states[a].values());
                        (fwd + (ub - ua + rev - fwd).min(0.0)).exp()
                    };
                    p[a][b] = mass;
                    off += mass;
                }
                p[a][a] = 1.0 - off;
            }
        }
        SamplerKind::Gibbs => {
            let mut total: Option<TransitionMatrix> = None;
            for i in 0..model.dim() {
                let mut k = vec![vec![0.0; n]; n];
                for a in 0..n {
                    if energies[a].is_none() {
                        k[a][a] = 1.0;
                        continue;
                    }
                    let mut targets = Vec::new();
                    for &v in model.domain(i) {
                        let mut y = states[a].values().to_vec();
                        y[i] = v;
                        let b = state_index(model, &y)?;
                        targets.push((b, energies[b].unwrap_or(f64::NEG_INFINITY)));
                    }
                    let z = lse(&targets.iter().map(|t| t.1).collect::<Vec<_>>());
                    for (b, u) in targets {
                        k[a][b] += (u - z).exp();
                    }
                }
                let ki = TransitionMatrix {
                    states: states.clone(),
                    p: k,
                };
                total = Some(match total {
                    None => ki,
                    Some(t) => t.matmul(&ki),
                });
            }
            p = total.map(|t| t.p).unwrap_or(p);
        }
        SamplerKind::Gwg => {
            if (0..model.dim()).any(|i| model.domain(i).len() != 2) {
                return Err(Error::Capability(
                    "Gibbs-with-gradients needs binary domains".into(),
                ));
            }
            let flip = |x: &[f64], i: usize| {
                let mut y = x.to_vec();
                let dom = model.domain(i);
                y[i] = if y[i] == dom[0] { dom[1] } else { dom[0] };
                y
            };
            let flip_table = |x: &[f64]| -> Result<Vec<f64>> {
                let g = model.gradient(x)?;
                let logits: Vec<f64> = (0..x.len())
                    .map(|i| 0.5 * g[i] * (flip(x, i)[i] - x[i]))
                    .collect();
                let z = lse(&logits);
                Ok(logits.into_iter().map(|l| l - z).collect())
            };
            for a in 0..n {
                let Some(ua) = energies[a] else {
                    p[a][a] = 1.0;
                    continue;
                };
                let x = states[a].values();
                let fwd = flip_table(x)?;
                let mut off = 0.0;
                for i in 0..model.dim() {
                    let y = flip(x, i);
                    let b = state_index(model, &y)?;
                    let Some(ub) = energies[b] else { continue };
                    let rev = flip_table(&y)?;
                    let mass = (fwd[i] + (ub - ua + rev[i] - fwd[i]).min(0.0)).exp();
                    p[a][b] += mass;
                    off += mass;
                }
                p[a][a] += 1.0 - off;
            }
        }
        other => {
            return Err(Error::Capability(format!(
                "{} carries a continuous auxiliary state; no exact matrix",
                other.label()
            )))
        }
    }
    Ok(TransitionMatrix { states, p })
}

/// Whether the support graph of `P` is strongly connected with period one.
pub fn is_primitive(m: &TransitionMatrix) -> bool {
    let n = m.size();
    if n == 0 {
        return false;
    }
    let bfs = |forward: bool| {
        let mut level = vec![usize::MAX; n];
        level[0] = 0;
        let mut queue = VecDeque::from([0]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                let w = if forward { m.p[u][v] } else { m.p[v][u] };
                if w > 0.0 && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        level
    };
    let level = bfs(true);
    if level.contains(&usize::MAX) || bfs(false).contains(&usize::MAX) {
        return false;
    }
    let gcd = |mut a: usize, mut b: usize| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    };
    let mut period = 0;
    for u in 0..n {
        for v in 0..n {
            if m.p[u][v] > 0.0 {
                period = gcd(period, (level[u] + 1).abs_diff(level[v]));
            }
        }
    }
    period == 1
}

/// Left eigenvector for eigenvalue one by power iteration from uniform.
pub fn stationary_distribution(m: &TransitionMatrix) -> Result<Vec<f64>> {
    if !is_primitive(m) {
        return Err(Error::Numeric(
            "chain is not irreducible and aperiodic".into(),
        ));
    }
    let n = m.size();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..MAX_POWER_ITERS {
        let mut next = m.left_apply(&pi);
        let z: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= z);
        let delta = next
            .iter()
            .zip(&pi)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        pi = next;
        if delta < STATIONARY_TOL {
            return Ok(pi);
        }
    }
    Err(Error::Numeric("power iteration did not converge".into()))
}

/// Central differences `(f(x + h e_i) − f(x − h e_i)) / 2h`.
pub fn finite_difference_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            probe[i] = x[i] + h;
            let up = f(&probe);
            probe[i] = x[i] - h;
            let down = f(&probe);
            probe[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Composite Simpson rule with `panels` subintervals (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = (panels.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for k in 1..n {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}
