//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use usvt::bounds::{mse, psd_bracket, spectral_concentration_trial, EntryDistribution};
use usvt::checks::{check_suite, key_lemma_case, key_lemma_holds, Battery, SuiteSize};
use usvt::estimator::{usvt_estimate, EstimatorConfig, MaskedMatrix, SymmetryMode};
use usvt::generators::{Metric, TournamentFamily};
use usvt::harness::{run_experiment_with_threads, ExperimentReport, ExperimentSpec, ModelSpec, NoiseModel};
use usvt::linalg::{singular_values, DenseMatrix};
use usvt::rng::RngSeed;

struct Outcome {
    pass: bool,
    detail: String,
}

fn within(limit: Duration, start: Instant) -> (bool, String) {
    let t = start.elapsed();
    (t < limit, format!("{:.1}s < {}s", t.as_secs_f64(), limit.as_secs()))
}

fn spec(model: ModelSpec, n_grid: Vec<usize>, p_grid: Vec<f64>, trials: usize, seed: u64) -> ExperimentSpec {
    ExperimentSpec {
        model,
        n_grid,
        p_grid,
        eta: 0.01,
        sigma_sq: None,
        trials,
        seed: RngSeed(seed),
        baseline_trivial: true,
        interval: None,
        noise: None,
        mainest_bracket: false,
        mask_diagonal: false,
    }
}

fn means(report: &ExperimentReport, p: f64) -> Vec<f64> {
    report
        .cells
        .iter()
        .filter(|c| c.p == p)
        .map(|c| c.mean_mse.unwrap_or(f64::NAN))
        .collect()
}

fn sci(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn slope(report: &ExperimentReport, p: f64) -> f64 {
    report
        .rate_fits
        .iter()
        .find(|f| f.p == p)
        .and_then(|f| f.fit.as_ref())
        .map_or(f64::NAN, |f| f.slope)
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = RngSeed(20_240_101).rng();
    let mut held = 0;
    for _ in 0..1000 {
        let (a, b, delta) = key_lemma_case(&mut rng).unwrap();
        if key_lemma_holds(&a, &b, delta).unwrap() {
            held += 1;
        }
    }
    let (fast, time) = within(Duration::from_secs(30), start);
    Outcome { pass: held == 1000 && fast, detail: format!("{held}/1000 hold; {time}") }
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = Vec::new();
    for (k, (name, dist)) in [("uniform", EntryDistribution::Uniform), ("rademacher", EntryDistribution::Rademacher)]
        .into_iter()
        .enumerate()
    {
        let o = spectral_concentration_trial(400, dist, SymmetryMode::Symmetric, 0.1, 100, RngSeed(77 + k as u64)).unwrap();
        pass &= o.fraction >= 0.95;
        detail.push(format!("{name} {:.2}", o.fraction));
    }
    let (fast, time) = within(Duration::from_secs(120), start);
    Outcome { pass: pass && fast, detail: format!("{}; {time}", detail.join(", ")) }
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let n = 200;
    let u: Vec<f64> = (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let v: Vec<f64> = (0..n).map(|j| if (j / 3) % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let m = DenseMatrix::from_fn(n, n, |i, j| 0.5 + 0.4 * u[i] * v[j] * (1.0 - 0.5 * (i as f64 / n as f64)));
    let config = EstimatorConfig::new(0.01, SymmetryMode::Asymmetric).unwrap();
    let data = MaskedMatrix::fully_observed(m.clone(), SymmetryMode::Asymmetric).unwrap();
    let report = usvt_estimate(&data, &config).unwrap();
    let s = singular_values(&m).unwrap();
    let above = s[1] > report.threshold;
    let err = mse(&report.estimate, &m).unwrap();
    let (fast, time) = within(Duration::from_secs(5), start);
    Outcome {
        pass: above && report.retained_rank == 2 && err <= 1e-6 && fast,
        detail: format!("s2 {:.1} > threshold {:.1}; mse {err:.2e}; {time}", s[1], report.threshold),
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let model = ModelSpec::Blockmodel { k: 4, block_probs: None, within: 0.6, between: 0.2 };
    let report = run_experiment_with_threads(&spec(model, vec![250, 500, 1000, 2000], vec![1.0], 20, 4), threads()).unwrap();
    let s = slope(&report, 1.0);
    let last = report.cell(2000, 1.0).unwrap();
    let (usvt_mse, trivial) = (last.mean_mse.unwrap(), last.trivial_mse.unwrap());
    let (fast, time) = within(Duration::from_secs(600), start);
    Outcome {
        pass: s <= -0.3 && trivial >= 2.0 * usvt_mse && fast,
        detail: format!("slope {s:.3}; n=2000 mse {usvt_mse:.2e} vs trivial {trivial:.3}; {time}"),
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let model = ModelSpec::Distance { dim: 1, metric: Metric::Euclidean };
    let mut s5 = spec(model, vec![250, 500, 1000, 2000], vec![1.0], 20, 5);
    s5.noise = Some(NoiseModel::Bernoulli);
    let report = run_experiment_with_threads(&s5, threads()).unwrap();
    let m = means(&report, 1.0);
    let s = slope(&report, 1.0);
    let (fast, time) = within(Duration::from_secs(600), start);
    Outcome {
        pass: strictly_decreasing(&m) && s <= -0.2 && fast,
        detail: format!("mse [{}]; slope {s:.3}; {time}", sci(&m)),
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let model = ModelSpec::BradleyTerry { family: TournamentFamily::NonparametricMonotone, games_per_pair: 1 };
    let report = run_experiment_with_threads(&spec(model, vec![250, 500, 1000], vec![1.0], 20, 6), threads()).unwrap();
    let m = means(&report, 1.0);
    let raw: Vec<f64> = report.cells.iter().map(|c| c.trivial_mse.unwrap()).collect();
    let below = m.iter().zip(&raw).all(|(a, b)| a < b);
    let (fast, time) = within(Duration::from_secs(600), start);
    Outcome {
        pass: strictly_decreasing(&m) && below && fast,
        detail: format!("mse [{}]; raw [{}]; {time}", sci(&m), sci(&raw)),
    }
}

fn criterion_7() -> Outcome {
    let ps = [0.1, 0.3, 1.0];
    let report = run_experiment_with_threads(&spec(ModelSpec::Correlation, vec![1000], ps.to_vec(), 10, 7), threads()).unwrap();
    let m: Vec<f64> = ps.iter().map(|&p| report.cell(1000, p).unwrap().mean_mse.unwrap()).collect();
    let ratios: Vec<f64> = ps.iter().zip(&m).map(|(&p, &e)| e / psd_bracket(1000, p)).collect();
    let monotone = m.windows(2).all(|w| w[1] <= w[0]);
    let bounded = ratios.iter().all(|&r| r <= 5.0);
    let spread = ratios.iter().cloned().fold(f64::MIN, f64::max) / ratios.iter().cloned().fold(f64::MAX, f64::min);
    Outcome {
        pass: monotone && bounded && spread <= 3.0,
        detail: format!("mse [{}]; mse/bracket [{}]; spread {spread:.2}", sci(&m), sci(&ratios)),
    }
}

fn criterion_8() -> Outcome {
    let size = SuiteSize { generator_draws: 100, ..SuiteSize::default() };
    let report = check_suite(Battery::Generators, &size, RngSeed(8)).unwrap();
    let detail = report
        .properties
        .iter()
        .map(|p| format!("{} {}/{}", p.name, p.passed, p.cases()))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome { pass: report.ok() && report.properties.iter().all(|p| p.failed == 0 && p.cases() == 100), detail }
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("usvt-acceptance-{}-{tag}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn criterion_9() -> Outcome {
    let specs = [
        spec(
            ModelSpec::Blockmodel { k: 3, block_probs: None, within: 0.6, between: 0.2 },
            vec![40, 80, 120],
            vec![0.3, 1.0],
            4,
            9,
        ),
        spec(
            ModelSpec::BradleyTerry { family: TournamentFamily::NonparametricMonotone, games_per_pair: 3 },
            vec![30, 60, 90],
            vec![0.5, 1.0],
            3,
            10,
        ),
        ExperimentSpec { mainest_bracket: true, ..spec(ModelSpec::LowRank { rank: 2 }, vec![20, 40, 60], vec![0.4, 1.0], 3, 11) },
    ];
    let mut identical = 0;
    for (k, s) in specs.iter().enumerate() {
        let dirs: Vec<PathBuf> = [1, 4, 1].iter().enumerate().map(|(r, &t)| {
            let dir = scratch(&format!("{k}-{r}"));
            run_experiment_with_threads(s, t).unwrap().write_to_dir(&dir).unwrap();
            dir
        }).collect();
        let same = ["report.json", "report.csv"].iter().all(|f| {
            let first = fs::read(dirs[0].join(f)).unwrap();
            dirs[1..].iter().all(|d| fs::read(d.join(f)).unwrap() == first)
        });
        identical += same as usize;
        for d in dirs {
            let _ = fs::remove_dir_all(d);
        }
    }
    Outcome {
        pass: identical == specs.len(),
        detail: format!("{identical}/{} specs byte-identical across runs with 1 and 4 threads", specs.len()),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("key lemma battery", criterion_1),
        ("spectral norm concentration", criterion_2),
        ("exact recovery", criterion_3),
        ("blockmodel rate", criterion_4),
        ("distance matrix rate", criterion_5),
        ("bradley-terry", criterion_6),
        ("psd completion", criterion_7),
        ("generator certificates", criterion_8),
        ("reproducibility", criterion_9),
    ];
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let o = run();
        println!("{} criterion {} ({name}): {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += !o.pass as usize;
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
