//! Multi-chain runs and the files experiments write.

use std::path::{Path, PathBuf};

use flatland::experiment::{
    compare, read_chain_jsonl, read_compare_csv, read_eigenvalues_csv, read_json, read_routes_csv,
    read_sweep_csv, run_experiment, sweep, write_compare_csv, write_run, write_sweep_csv,
    Experiment, Manifest, Overrides, Preset, SummaryReport, SweepParam,
};
use flatland::model::{CategoricalPmfModel, TspModel};
use flatland::runner::{run_with, Execution};
use flatland::{run, GradientMode, RunPlan, SamplerConfig, SamplerKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

fn load(name: &str) -> Experiment {
    Experiment::load(&config(name), &Overrides::default()).unwrap()
}

#[test]
fn bernoulli_protocol_keeps_800_samples_per_chain() {
    let plan = RunPlan::new(SamplerKind::Edula, SamplerConfig::edula(0.1, 0.3, 0.1))
        .chains(4)
        .iterations(1000, 200)
        .seed(9);
    let report = run(&plan, &CategoricalPmfModel::bernoulli4d()).unwrap();
    assert_eq!(report.chains.len(), 4);
    assert!(report.chains.iter().all(|c| c.archive.samples.len() == 800));
    assert_eq!(report.acceptance_rate(), 1.0);
}

#[test]
fn archive_sizes_follow_the_thinning_formula() {
    let model = CategoricalPmfModel::bernoulli4d();
    for (iters, burn, thin) in [(10, 9, 1), (100, 0, 7), (101, 20, 3), (50, 10, 40)] {
        let plan = RunPlan::new(SamplerKind::Dmala, SamplerConfig::dmala(0.4))
            .iterations(iters, burn)
            .thinning(thin);
        let got = run(&plan, &model).unwrap().chains[0].archive.samples.len();
        assert_eq!(got, (iters - burn + thin - 1) / thin);
    }
}

#[test]
fn parallel_matches_sequential_and_reruns() {
    let model = CategoricalPmfModel::bernoulli4d();
    let plan = RunPlan::new(SamplerKind::Edmala, SamplerConfig::edmala(0.4, 0.05, 0.05))
        .chains(5)
        .iterations(500, 50)
        .seed(77)
        .collect_aux(true);
    let seq = run_with(&plan, &model, Execution::Sequential).unwrap();
    let again = run_with(&plan, &model, Execution::Sequential).unwrap();
    let par = run(&plan, &model).unwrap();
    assert_eq!(seq.chains, again.chains);
    assert_eq!(seq.chains, par.chains);
    let seeds: Vec<u64> = seq.chains.iter().map(|c| c.archive.seed).collect();
    assert_eq!(seeds, vec![77, 78, 79, 80, 81]);
    assert_ne!(seq.chains[0].archive.samples, seq.chains[1].archive.samples);
}

#[test]
fn tour_runs_keep_only_feasible_routes() {
    let model = TspModel::random(5, &mut ChaCha8Rng::seed_from_u64(4));
    let plan = RunPlan::new(
        SamplerKind::Edmala,
        SamplerConfig::edmala(0.2, 0.05, 0.2).with_gradient_mode(GradientMode::ExactDifference),
    )
    .iterations(3000, 100)
    .seed(3);
    let report = run(&plan, &model).unwrap();
    let c = &report.chains[0];
    assert!(c.rejected_invalid > 0);
    assert_eq!(c.proposals + c.rejected_invalid, 3000);
    assert!(c
        .archive
        .samples
        .iter()
        .all(|s| model.decode_route(s.values()).is_some()));
}

#[test]
fn run_outputs_round_trip_through_the_readers() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["bernoulli4d.toml", "tsp8.toml"] {
        let exp = load(name);
        let outcome = run_experiment(&exp).unwrap();
        let out = dir.path().join(name);
        let written = write_run(&exp, &outcome, &out).unwrap();
        assert!(written.iter().all(|p| p.exists()));

        let manifest: Manifest = read_json(&out.join("manifest.json")).unwrap();
        assert_eq!(manifest.plan, exp.plan);
        assert_eq!(manifest.chains.len(), exp.plan.chains);
        let summary: SummaryReport = read_json(&out.join("report.json")).unwrap();
        assert_eq!(summary, outcome.summary);
        for c in &outcome.report.chains {
            let back =
                read_chain_jsonl(&out.join(format!("chain_{}.jsonl", c.archive.chain_id))).unwrap();
            assert_eq!(back, c.archive.samples);
        }
        if let Some(eig) = &outcome.eigenvalues {
            assert_eq!(
                &read_eigenvalues_csv(&out.join("eigenvalues.csv")).unwrap(),
                eig
            );
        }
        if let Some(routes) = &outcome.routes {
            assert_eq!(&read_routes_csv(&out.join("routes.csv")).unwrap(), routes);
        }
    }
}

#[test]
fn bernoulli_config_reports_modes_and_four_archives() {
    let exp = load("bernoulli4d.toml");
    let dir = tempfile::tempdir().unwrap();
    let outcome = run_experiment(&exp).unwrap();
    write_run(&exp, &outcome, dir.path()).unwrap();
    for k in 0..4 {
        assert_eq!(
            read_chain_jsonl(&dir.path().join(format!("chain_{k}.jsonl")))
                .unwrap()
                .len(),
            800
        );
    }
    let modes = outcome.summary.mode_frequencies.unwrap();
    let names: Vec<&str> = modes.iter().map(|m| m.mode.as_str()).collect();
    assert_eq!(names, ["0100", "1001", "0010", "0111"]);
}

#[test]
fn compare_and_sweep_tables_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let rows = compare(&[load("bernoulli4d_dula.toml"), load("bernoulli4d.toml")]).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].sampler, "DULA");
    assert_eq!(rows[1].sampler, "EDULA");
    assert!(rows.iter().all(|r| r.tv.is_some() && r.eigen_std.is_some()));
    assert!(rows
        .iter()
        .all(|r| r.pmc_mean.is_none() && r.rmse_mean.is_none()));
    let p = dir.path().join("compare.csv");
    write_compare_csv(&rows, &p).unwrap();
    assert_eq!(read_compare_csv(&p).unwrap(), rows);

    let exp = load("bernoulli4d.toml");
    let values = [0.1, 0.2, 0.5, 1.0, 2.0];
    let rows = sweep(&exp, SweepParam::Eta, &values).unwrap();
    assert_eq!(rows.len(), values.len());
    assert!(rows.iter().all(|r| r.coupling_norm.is_some()));
    let p = dir.path().join("sweep.csv");
    write_sweep_csv(SweepParam::Eta, &rows, &p).unwrap();
    let (param, back) = read_sweep_csv(&p).unwrap();
    assert_eq!(param, SweepParam::Eta);
    assert_eq!(back, rows);
}

#[test]
fn compare_rejects_different_models() {
    let err = compare(&[load("bernoulli4d.toml"), load("tsp8.toml")]).unwrap_err();
    assert!(err.is_config());
}

#[test]
fn missing_model_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(
        &p,
        "[model]\nkind = \"categorical\"\npath = \"nowhere.json\"\n\n[plan]\nsampler = \"dula\"\niterations = 10\n",
    )
    .unwrap();
    let err = Experiment::load(&p, &Overrides::default()).unwrap_err();
    assert!(
        err.is_config() && err.to_string().contains("nowhere.json"),
        "{err}"
    );
}

#[test]
fn presets_mirror_the_hyperparameter_table() {
    let compas = Preset::lookup("COMPAS").unwrap();
    assert_eq!(
        compas.values(SamplerKind::Edula),
        (0.1, Some(0.01), Some(4.0))
    );
    assert_eq!(
        compas.values(SamplerKind::Edmala),
        (0.1, Some(0.001), Some(4.0))
    );
    assert!(Preset::lookup("mnist").is_err());
}
