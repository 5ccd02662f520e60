use flatland::model::{
    enumerate_states, exact_distribution, BinaryRegressionNetModel, CategoricalPmfModel, RbmModel,
    TspModel,
};
use flatland::oracle::finite_difference_gradient;
use flatland::EnergyModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn worst_gradient_error(model: &dyn EnergyModel, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let x: Vec<f64> = (0..model.dim())
            .map(|i| {
                let d = model.domain(i);
                d[0] + (d[d.len() - 1] - d[0]) * rng.random::<f64>()
            })
            .collect();
        let g = model.gradient(&x).unwrap();
        let fd = finite_difference_gradient(|y| model.energy(y).unwrap(), &x, 1e-5);
        let scale = fd.iter().map(|v| v.abs()).fold(1.0, f64::max);
        for (a, b) in g.iter().zip(&fd) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    worst
}

#[test]
fn analytic_gradients_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let rbm = RbmModel::random(12, 6, 1.5, &mut rng);
    let net = BinaryRegressionNetModel::synthetic(4, 8, 60, 20, 0.3, 0.1, &mut rng).0;
    let models: Vec<Box<dyn EnergyModel>> = vec![
        Box::new(CategoricalPmfModel::bernoulli4d()),
        Box::new(rbm),
        Box::new(net),
    ];
    for m in &models {
        assert!(worst_gradient_error(m.as_ref(), &mut rng) < 1e-5);
    }
}

#[test]
fn bernoulli_corner_energy_is_the_log_table() {
    let m = CategoricalPmfModel::bernoulli4d();
    assert!((m.energy(&[0.0; 4]).unwrap() - 0.07688f64.ln()).abs() < 1e-12);
    let pmf = exact_distribution(&m).unwrap();
    for (a, b) in pmf.iter().zip(m.pmf()) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_eq!(enumerate_states(&m).unwrap().count(), 16);
}

#[test]
fn zero_rbm_energy_and_gradient() {
    let m = RbmModel::zeros(5, 3);
    let x = [1.0, 0.0, 1.0, 1.0, 0.0];
    assert!((m.energy(&x).unwrap() - 3.0 * 2f64.ln()).abs() < 1e-12);
    assert!(m.gradient(&x).unwrap().iter().all(|&g| g == 0.0));
}

#[test]
fn triangle_tour_cost() {
    let m = TspModel::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], None, None).unwrap();
    let theta = m.encode_route(&[0, 1, 2]);
    let want = -(1.0 + 2f64.sqrt() + 1.0);
    assert!((m.energy(theta.values()).unwrap() - want).abs() < 1e-12);
    assert!(m.gradient(theta.values()).is_err());
}

#[test]
fn regression_energy_is_never_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (net, _) = BinaryRegressionNetModel::synthetic(3, 4, 30, 10, 1.0, 0.2, &mut rng);
    for _ in 0..100 {
        let theta = net.random_state(&mut rng);
        assert!(net.energy(theta.values()).unwrap() <= 0.0);
    }
}
