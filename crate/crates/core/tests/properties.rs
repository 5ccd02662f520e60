use flatland::diagnostics::{exact_distribution_distance, pairwise_mismatch_count, pmc};
use flatland::kernel::{discrete_proposals, joint_energy, joint_gradient};
use flatland::model::{enumerate_states, state_index, CategoricalPmfModel, RbmModel, TspModel};
use flatland::oracle::finite_difference_gradient;
use flatland::{Coupling, DiscreteState, EnergyModel, GradientMode, JointState, SamplerConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn table() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, 16).prop_map(|w| {
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    })
}

fn corner() -> impl Strategy<Value = DiscreteState> {
    prop::collection::vec(prop::bool::ANY, 4)
        .prop_map(|b| DiscreteState::new(b.into_iter().map(|x| x as u8 as f64).collect()))
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coordinate_proposals_normalize(
        probs in table(),
        theta in corner(),
        theta_a in prop::collection::vec(-2.0f64..3.0, 4),
        alpha in 0.01f64..2.0,
        eta in 0.05f64..5.0,
        exact in prop::bool::ANY,
    ) {
        let model = CategoricalPmfModel::new(4, &probs).unwrap();
        let mode = if exact { GradientMode::ExactDifference } else { GradientMode::Taylor };
        let config = SamplerConfig::edmala(alpha, 0.01, eta).with_gradient_mode(mode);
        let state = JointState::new(theta, theta_a).unwrap();
        for q in discrete_proposals(&state, &config, &model).unwrap() {
            let total: f64 = q.probs().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_gradient_matches_differences(
        probs in table(),
        x in prop::collection::vec(0.0f64..1.0, 4),
        a in prop::collection::vec(-1.0f64..2.0, 4),
        eta in 0.1f64..4.0,
    ) {
        let model = CategoricalPmfModel::new(4, &probs).unwrap();
        let coupling = Coupling::Finite(eta);
        // the joint energy is linear in θ per coordinate plus a quadratic, so
        // evaluate it on the real embedding
        let energy = |theta: &[f64], aux: &[f64]| {
            let s = JointState { theta: DiscreteState::new(theta.to_vec()), theta_a: aux.to_vec() };
            joint_energy(&s, coupling, &model).unwrap()
        };
        let s = JointState { theta: DiscreteState::new(x.clone()), theta_a: a.clone() };
        let g = joint_gradient(&s, coupling, &model).unwrap();
        let gt = finite_difference_gradient(|y| energy(y, &a), &x, 1e-5);
        let ga = finite_difference_gradient(|y| energy(&x, y), &a, 1e-5);
        for (u, v) in g.theta.iter().zip(&gt).chain(g.theta_a.iter().zip(&ga)) {
            prop_assert!((u - v).abs() / v.abs().max(1.0) < 1e-5);
        }
    }

    #[test]
    fn tour_codes_round_trip(route in permutation(8)) {
        let model = TspModel::random(8, &mut ChaCha8Rng::seed_from_u64(8));
        let theta = model.encode_route(&route);
        prop_assert_eq!(model.decode_route(theta.values()), Some(route));
    }

    #[test]
    fn mismatch_count_is_a_metric(p in permutation(6), q in permutation(6), r in permutation(6)) {
        let d = |a: &[usize], b: &[usize]| pmc(a, b).unwrap();
        prop_assert_eq!(d(&p, &p), 0);
        prop_assert_eq!(d(&p, &q), d(&q, &p));
        prop_assert!(d(&p, &r) <= d(&p, &q) + d(&q, &r));
        prop_assert!(d(&p, &q) != 1);
    }

    #[test]
    fn mismatch_summary_matches_double_loop(
        best in permutation(5),
        others in prop::collection::vec(permutation(5), 1..20),
    ) {
        let (mean, std) = pairwise_mismatch_count(&best, &others).unwrap();
        let counts: Vec<f64> = others
            .iter()
            .map(|o| {
                let mut c = 0;
                for i in 0..best.len() {
                    if best[i] != o[i] {
                        c += 1;
                    }
                }
                c as f64
            })
            .collect();
        let m = counts.iter().sum::<f64>() / counts.len() as f64;
        let v = counts.iter().map(|c| (c - m).powi(2)).sum::<f64>() / counts.len() as f64;
        prop_assert!((mean - m).abs() < 1e-12);
        prop_assert!((std - v.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn distances_are_consistent(samples in prop::collection::vec(corner(), 1..200), probs in table()) {
        let model = CategoricalPmfModel::new(4, &probs).unwrap();
        let d = exact_distribution_distance(&samples, &model).unwrap();
        prop_assert!((d.tv - d.l1 / 2.0).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&d.tv));
    }

    #[test]
    fn rbm_gradient_matches_differences(seed in 0u64..1000, x in prop::collection::vec(0.0f64..1.0, 5)) {
        let model = RbmModel::random(5, 3, 1.5, &mut ChaCha8Rng::seed_from_u64(seed));
        let g = model.gradient(&x).unwrap();
        let fd = finite_difference_gradient(|y| model.energy(y).unwrap(), &x, 1e-5);
        for (a, b) in g.iter().zip(&fd) {
            prop_assert!((a - b).abs() / b.abs().max(1.0) < 1e-5);
        }
    }
}

#[test]
fn mismatch_count_metric_holds_for_all_four_city_routes() {
    let mut perms = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = vec![a, b, c, d];
                    let mut s = p.clone();
                    s.sort();
                    if s == [0, 1, 2, 3] {
                        perms.push(p);
                    }
                }
            }
        }
    }
    assert_eq!(perms.len(), 24);
    for p in &perms {
        for q in &perms {
            let pq = pmc(p, q).unwrap();
            assert_eq!(pq, pmc(q, p).unwrap());
            assert_eq!(pq == 0, p == q);
            for r in &perms {
                assert!(pmc(p, r).unwrap() <= pq + pmc(q, r).unwrap());
            }
        }
    }
}

#[test]
fn state_index_is_a_bijection() {
    let model = CategoricalPmfModel::bernoulli4d();
    for (k, s) in enumerate_states(&model).unwrap().enumerate() {
        assert_eq!(state_index(&model, s.values()).unwrap(), k);
    }
}

#[test]
fn sampler_configs_survive_serialization() {
    for config in [
        SamplerConfig::dula(0.1),
        SamplerConfig::edmala(0.4, 0.05, 0.05).with_aux_box(-1.0, 2.0),
        SamplerConfig::glu_edula(0.2, 3.0).with_gradient_mode(GradientMode::ExactDifference),
    ] {
        let text = serde_json::to_string(&config).unwrap();
        let back: SamplerConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, config);
    }
}
