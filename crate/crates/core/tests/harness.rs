use usvt::harness::{run_experiment, run_experiment_with_threads, ExperimentSpec, ModelSpec};
use usvt::rng::RngSeed;

fn spec(model: ModelSpec, n_grid: Vec<usize>, p_grid: Vec<f64>, trials: usize) -> ExperimentSpec {
    ExperimentSpec {
        model,
        n_grid,
        p_grid,
        eta: 0.01,
        sigma_sq: None,
        trials,
        seed: RngSeed(21),
        baseline_trivial: true,
        interval: None,
        noise: None,
        mainest_bracket: true,
        mask_diagonal: false,
    }
}

#[test]
fn every_cell_appears_once() {
    let s = spec(ModelSpec::LowRank { rank: 1 }, vec![10, 20, 15], vec![0.2, 0.7, 1.0], 2);
    let r = run_experiment(&s).unwrap();
    assert_eq!(r.cells.len(), 9);
    for &n in &s.n_grid {
        for &p in &s.p_grid {
            assert_eq!(r.cells.iter().filter(|c| c.n == n && c.p == p).count(), 1);
        }
    }
    assert!(r.cells.iter().all(|c| c.std_mse.unwrap() >= 0.0));
    assert_eq!(r.rate_fits.len(), 3);
}

#[test]
fn more_observations_help_on_paired_seeds() {
    let block = ModelSpec::Blockmodel { k: 3, block_probs: None, within: 0.7, between: 0.2 };
    for model in [block, ModelSpec::LowRank { rank: 2 }] {
        let r = run_experiment(&spec(model.clone(), vec![150], vec![0.3, 1.0], 20)).unwrap();
        let low = r.cell(150, 0.3).unwrap().mean_mse.unwrap();
        let full = r.cell(150, 1.0).unwrap().mean_mse.unwrap();
        assert!(full <= low, "{model:?}: {full} > {low}");
    }
}

#[test]
fn usvt_beats_trivial_on_noisy_blockmodel() {
    let block = ModelSpec::Blockmodel { k: 4, block_probs: None, within: 0.6, between: 0.2 };
    let mut s = spec(block, vec![1000], vec![1.0], 2);
    s.mainest_bracket = false;
    let r = run_experiment(&s).unwrap();
    let c = &r.cells[0];
    assert!(c.mean_mse.unwrap() < c.trivial_mse.unwrap());
    // Mean of m(1-m) over pairs with four equal-sized blocks in expectation.
    let expected = 0.25 * 0.6 * 0.4 + 0.75 * 0.2 * 0.8;
    assert!((c.trivial_mse.unwrap() - expected).abs() < 0.01);
}

#[test]
fn zero_model_any_grid() {
    let r = run_experiment(&spec(ModelSpec::Zero, vec![5, 9], vec![0.1, 1.0], 3)).unwrap();
    assert!(r.cells.iter().all(|c| c.mean_mse.unwrap() <= 1e-12));
}

#[test]
fn thread_count_does_not_change_reports() {
    let s = spec(ModelSpec::Correlation, vec![30, 60], vec![0.3, 1.0], 3);
    let a = run_experiment_with_threads(&s, 1).unwrap();
    let b = run_experiment_with_threads(&s, 3).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
}

#[test]
fn spec_round_trips_through_json() {
    let s = spec(ModelSpec::Distance { dim: 2, metric: usvt::generators::Metric::Manhattan }, vec![10], vec![1.0], 1);
    let text = serde_json::to_string(&s).unwrap();
    assert_eq!(ExperimentSpec::from_json(&text).unwrap(), s);
}
