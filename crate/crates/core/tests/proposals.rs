//! Proposal distributions against independent hand computations and
//! Monte Carlo draws.

use flatland::kernel::{
    auxiliary_mean, discrete_proposals, glu_step, log_q_auxiliary, log_q_discrete,
    propose_auxiliary, propose_auxiliary_with_noise, propose_discrete,
};
use flatland::model::{enumerate_states, Capabilities, CategoricalPmfModel, EnergyModel};
use flatland::{Coupling, DiscreteState, GradientMode, JointState, SamplerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bern() -> CategoricalPmfModel {
    CategoricalPmfModel::bernoulli4d()
}

/// Quadratic energy over a four-letter alphabet, to exercise non-binary
/// domains.
struct Ladder;

const LADDER: [f64; 4] = [-1.0, 0.0, 1.0, 2.0];

impl EnergyModel for Ladder {
    fn dim(&self) -> usize {
        3
    }
    fn domain(&self, _i: usize) -> &[f64] {
        &LADDER
    }
    fn capabilities(&self) -> Capabilities {
        Capabilities {
            has_gradient: true,
            enumerable: true,
            has_validity: false,
        }
    }
    fn energy(&self, x: &[f64]) -> flatland::Result<f64> {
        Ok(-0.7 * (x[0] - 0.5).powi(2) + 0.3 * x[1] * x[2] - 0.2 * x[2])
    }
    fn gradient(&self, x: &[f64]) -> flatland::Result<Vec<f64>> {
        Ok(vec![-1.4 * (x[0] - 0.5), 0.3 * x[2], 0.3 * x[1] - 0.2])
    }
}

/// Independent Taylor proposal: softmax over v of
/// `½ g_i (v − θ_i) − (v − θ_i)² / (2α)`, with `g` the joint gradient.
fn hand_proposal(
    model: &dyn EnergyModel,
    theta: &[f64],
    theta_a: &[f64],
    alpha: f64,
    eta: Option<f64>,
) -> Vec<Vec<f64>> {
    let g = model.gradient(theta).unwrap();
    (0..model.dim())
        .map(|i| {
            let gi = g[i] - eta.map_or(0.0, |e| (theta[i] - theta_a[i]) / e);
            let w: Vec<f64> = model
                .domain(i)
                .iter()
                .map(|&v| {
                    let d = v - theta[i];
                    (0.5 * gi * d - d * d / (2.0 * alpha)).exp()
                })
                .collect();
            let z: f64 = w.iter().sum();
            w.into_iter().map(|x| x / z).collect()
        })
        .collect()
}

#[test]
fn taylor_proposals_match_hand_formula() {
    let cases: Vec<(Box<dyn EnergyModel>, Vec<f64>, Vec<f64>)> = vec![
        (
            Box::new(bern()),
            vec![0.0, 1.0, 1.0, 0.0],
            vec![0.3, 0.8, 1.4, -0.2],
        ),
        (Box::new(Ladder), vec![-1.0, 2.0, 0.0], vec![0.5, 1.0, -0.3]),
    ];
    for (model, theta, theta_a) in &cases {
        for (alpha, eta) in [(0.1, Some(0.5)), (0.4, Some(2.0)), (1.0, None)] {
            let config = match eta {
                Some(e) => SamplerConfig::edmala(alpha, 0.01, e),
                None => SamplerConfig::dmala(alpha),
            };
            let state =
                JointState::new(DiscreteState::new(theta.clone()), theta_a.clone()).unwrap();
            let got = discrete_proposals(&state, &config, model.as_ref()).unwrap();
            let want = hand_proposal(model.as_ref(), theta, theta_a, alpha, eta);
            for (g, w) in got.iter().zip(&want) {
                for (a, b) in g.probs().iter().zip(w) {
                    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn exact_difference_proposals_match_hand_formula() {
    let model = Ladder;
    let theta = vec![0.0, 1.0, -1.0];
    let theta_a = vec![0.4, 0.2, -0.5];
    let (alpha, eta) = (0.3, 0.7);
    let config =
        SamplerConfig::edmala(alpha, 0.01, eta).with_gradient_mode(GradientMode::ExactDifference);
    let state = JointState::new(DiscreteState::new(theta.clone()), theta_a.clone()).unwrap();
    let got = discrete_proposals(&state, &config, &model).unwrap();
    let base = model.energy(&theta).unwrap();
    for i in 0..3 {
        let w: Vec<f64> = LADDER
            .iter()
            .map(|&v| {
                let mut y = theta.clone();
                y[i] = v;
                let du = model.energy(&y).unwrap() - base;
                let dc = ((theta[i] - theta_a[i]).powi(2) - (v - theta_a[i]).powi(2)) / (2.0 * eta);
                let d = v - theta[i];
                (0.5 * (du + dc) - d * d / (2.0 * alpha)).exp()
            })
            .collect();
        let z: f64 = w.iter().sum();
        for (a, b) in got[i].probs().iter().zip(&w) {
            assert!((a - b / z).abs() < 1e-12);
        }
    }
}

#[test]
fn log_q_discrete_normalizes_over_all_states() {
    let model = bern();
    let configs = [
        SamplerConfig::dula(0.1),
        SamplerConfig::dmala(0.4),
        SamplerConfig::edmala(0.4, 0.05, 0.05),
        SamplerConfig::edula(0.1, 0.3, 0.1).with_gradient_mode(GradientMode::ExactDifference),
    ];
    let froms = [
        JointState::anchored(DiscreteState::from_bits("0110").unwrap()),
        JointState::new(
            DiscreteState::from_bits("1001").unwrap(),
            vec![0.2, -0.4, 1.3, 0.9],
        )
        .unwrap(),
    ];
    for config in &configs {
        for from in &froms {
            let total: f64 = enumerate_states(&model)
                .unwrap()
                .map(|s| log_q_discrete(&s, from, config, &model).unwrap().exp())
                .sum();
            assert!((total - 1.0).abs() < 1e-12, "{total}");
        }
    }
}

#[test]
fn proposed_log_q_matches_scoring() {
    let model = bern();
    let config = SamplerConfig::edmala(0.4, 0.05, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let from = JointState::new(
        DiscreteState::from_bits("0011").unwrap(),
        vec![0.1, 0.5, 0.9, 1.2],
    )
    .unwrap();
    for _ in 0..200 {
        let (to, lq) = propose_discrete(&from, &config, &model, &mut rng).unwrap();
        let scored = log_q_discrete(&to, &from, &config, &model).unwrap();
        assert!((lq - scored).abs() < 1e-12);
    }
}

#[test]
fn zero_gradient_proposals_are_symmetric() {
    let model = CategoricalPmfModel::uniform(4).unwrap();
    let config = SamplerConfig::dmala(0.3);
    let states: Vec<DiscreteState> = enumerate_states(&model).unwrap().collect();
    for a in &states {
        for b in &states {
            let ab = log_q_discrete(b, &JointState::anchored(a.clone()), &config, &model).unwrap();
            let ba = log_q_discrete(a, &JointState::anchored(b.clone()), &config, &model).unwrap();
            assert!((ab - ba).abs() < 1e-12);
        }
    }
}

#[test]
fn coupling_vanishes_when_anchored() {
    let model = bern();
    for s in enumerate_states(&model).unwrap() {
        let state = JointState::anchored(s);
        let plain = discrete_proposals(&state, &SamplerConfig::dmala(0.4), &model).unwrap();
        let coupled =
            discrete_proposals(&state, &SamplerConfig::edmala(0.4, 0.01, 0.2), &model).unwrap();
        assert_eq!(plain, coupled);
    }
}

#[test]
fn monte_carlo_proposal_frequencies() {
    let model = bern();
    let config = SamplerConfig::edmala(0.4, 0.05, 0.5);
    let from = JointState::new(
        DiscreteState::from_bits("0100").unwrap(),
        vec![0.3, 0.7, 0.2, 0.6],
    )
    .unwrap();
    let states: Vec<DiscreteState> = enumerate_states(&model).unwrap().collect();
    let n = 1_000_000usize;
    let mut counts = vec![0usize; states.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..n {
        let (to, _) = propose_discrete(&from, &config, &model, &mut rng).unwrap();
        let k = flatland::model::state_index(&model, to.values()).unwrap();
        counts[k] += 1;
    }
    for (s, c) in states.iter().zip(counts) {
        let p = log_q_discrete(s, &from, &config, &model).unwrap().exp();
        let se = (p * (1.0 - p) / n as f64).sqrt();
        let f = c as f64 / n as f64;
        assert!((f - p).abs() <= 3.0 * se.max(1e-9), "{s}: {f} vs {p}");
    }
}

#[test]
fn auxiliary_move_moments() {
    let config = SamplerConfig::edmala(0.4, 0.05, 0.3);
    let from = JointState::new(
        DiscreteState::from_bits("1010").unwrap(),
        vec![0.2, 0.9, 0.4, -0.3],
    )
    .unwrap();
    let mean = auxiliary_mean(&from, &config).unwrap();
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut sum = [0.0; 4];
    for _ in 0..n {
        let (a, lq) = propose_auxiliary(&from, &config, &mut rng).unwrap();
        assert!((lq - log_q_auxiliary(&a, &from, &config).unwrap()).abs() < 1e-12);
        for (s, v) in sum.iter_mut().zip(&a) {
            *s += v;
        }
    }
    let se = (config.alpha_a / n as f64).sqrt();
    for (s, m) in sum.iter().zip(&mean) {
        assert!((s / n as f64 - m).abs() < 4.0 * se);
    }
}

#[test]
fn auxiliary_density_at_its_mean() {
    let config = SamplerConfig::edula(0.1, 0.2, 1.0);
    let state = JointState::anchored(DiscreteState::from_bits("0110").unwrap());
    let (next, lq) = propose_auxiliary_with_noise(&state, &config, &[0.0; 4]).unwrap();
    assert_eq!(next, state.theta_a);
    let want = -2.0 * (2.0 * std::f64::consts::PI * 0.2).ln();
    assert!((lq - want).abs() < 1e-12);
}

#[test]
fn glu_auxiliary_draw_has_variance_eta() {
    let model = bern();
    let eta = 0.3;
    let config = SamplerConfig::glu_edmala(0.4, eta);
    let from = JointState::anchored(DiscreteState::from_bits("1100").unwrap());
    let n = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let draws: Vec<f64> = (0..n)
        .map(|_| {
            let out = glu_step(&from, &config, &model, &mut rng).unwrap();
            out.state.theta_a[2] - from.theta.values()[2]
        })
        .collect();
    let m = draws.iter().sum::<f64>() / n as f64;
    let var = draws.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    let se = eta * (2.0 / (n - 1) as f64).sqrt();
    assert!((var - eta).abs() < 4.0 * se, "{var}");
    assert!(m.abs() < 4.0 * (eta / n as f64).sqrt());
}

#[test]
fn decoupled_auxiliary_dynamics_are_misuse() {
    let state = JointState::anchored(DiscreteState::from_bits("0000").unwrap());
    let err = auxiliary_mean(&state, &SamplerConfig::dmala(0.2)).unwrap_err();
    assert!(matches!(err, flatland::Error::KernelMisuse(_)));
    assert_eq!(Coupling::Decoupled.eta(), None);
}
