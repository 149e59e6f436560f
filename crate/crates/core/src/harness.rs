//! Configuration-driven Monte Carlo experiments.
//!
//! An [`ExperimentSpec`] names a model family and a grid of sizes `n` and
//! observation probabilities `p`. For every size and trial a parameter
//! matrix and its noisy data are drawn once; each `p` then draws its own
//! mask. The same matrix is therefore compared across `p` (paired seeds).
//!
//! Seeds: the model and noise for size index `i` and trial `t` use
//! `mix(seed, [i, t])`; the mask for probability index `j` uses
//! `mix(seed, [i, j, t])`. Results are identical for any thread count.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, RateFit};
use crate::error::{Error, Result};
use crate::estimator::{
    trivial_estimate, usvt_estimate, EstimatorConfig, Interval, MaskedMatrix, SymmetryMode,
};
use crate::generators::{self as gen, Graphon, LatentKernel, Metric, TournamentFamily};
use crate::linalg::DenseMatrix;
use crate::rng::{mix, RngSeed};

/// Report format version.
pub const SCHEMA_VERSION: u32 = 1;

fn default_within() -> f64 {
    0.6
}

fn default_between() -> f64 {
    0.2
}

fn default_dim() -> usize {
    1
}

fn default_games() -> usize {
    1
}

fn default_true() -> bool {
    true
}

/// Model families with their parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ModelSpec {
    /// The zero matrix.
    Zero,
    /// Normalized product of two Uniform[-1,1] factors.
    LowRank { rank: usize },
    /// Blockmodel with uniform labels. Without `block_probs` the blocks are
    /// assortative with `within` and `between` probabilities.
    Blockmodel {
        k: usize,
        #[serde(default)]
        block_probs: Option<Vec<Vec<f64>>>,
        #[serde(default = "default_within")]
        within: f64,
        #[serde(default = "default_between")]
        between: f64,
    },
    /// Normalized distances between uniform points in `[0,1]^dim`.
    Distance {
        #[serde(default = "default_dim")]
        dim: usize,
        #[serde(default = "default_metric")]
        metric: Metric,
    },
    LatentSpace {
        #[serde(default = "default_dim")]
        dim: usize,
        kernel: LatentKernel,
    },
    /// Correlation matrix of one-factor data.
    Correlation,
    Graphon { graphon: Graphon },
    BradleyTerry {
        family: TournamentFamily,
        #[serde(default = "default_games")]
        games_per_pair: usize,
    },
    LowRankAdversary { rank: usize },
    /// Hard instance with nuclear norm `budget_fraction · n√n`; needs `p < 1`.
    Minimax { budget_fraction: f64 },
}

fn default_metric() -> Metric {
    Metric::Euclidean
}

impl ModelSpec {
    pub fn mode(&self) -> SymmetryMode {
        match self {
            ModelSpec::Blockmodel { .. }
            | ModelSpec::Distance { .. }
            | ModelSpec::LatentSpace { .. }
            | ModelSpec::Correlation
            | ModelSpec::Graphon { .. } => SymmetryMode::Symmetric,
            ModelSpec::BradleyTerry { .. } => SymmetryMode::SkewSymmetric,
            _ => SymmetryMode::Asymmetric,
        }
    }

    pub fn default_interval(&self) -> Interval {
        match self {
            ModelSpec::Blockmodel { .. }
            | ModelSpec::Distance { .. }
            | ModelSpec::Graphon { .. }
            | ModelSpec::BradleyTerry { .. } => Interval::unit(),
            _ => Interval::default(),
        }
    }

    pub fn default_noise(&self) -> NoiseModel {
        match self {
            ModelSpec::Blockmodel { .. } | ModelSpec::Graphon { .. } => NoiseModel::Bernoulli,
            ModelSpec::BradleyTerry { .. } => NoiseModel::Games,
            _ => NoiseModel::Exact,
        }
    }

    fn depends_on_p(&self) -> bool {
        matches!(self, ModelSpec::Minimax { .. })
    }

    /// Constant-free rate bracket for this family, where one exists.
    pub fn theorem_bracket(&self, n: usize, p: f64) -> Option<f64> {
        match self {
            ModelSpec::Zero => Some(0.0),
            ModelSpec::LowRank { rank } => Some(bounds::low_rank_bracket(*rank, n, p)),
            ModelSpec::Blockmodel { k, .. } => Some(bounds::low_rank_bracket(*k, n, p)),
            ModelSpec::Distance { dim, .. } => {
                let d = *dim as i32;
                Some(bounds::distance_bracket(n, p, &|delta| bounds::interval_covering(delta).powi(d)))
            }
            ModelSpec::LatentSpace { dim, .. } => Some(bounds::lipschitz_latent_bracket(n, p, *dim).min(1.0)),
            ModelSpec::Correlation => Some(bounds::psd_bracket(n, p).min(1.0)),
            ModelSpec::BradleyTerry { .. } => Some(bounds::bradley_bracket(n, p).min(1.0)),
            ModelSpec::LowRankAdversary { rank } => Some(bounds::lowrank_lower(n, *rank, p)),
            ModelSpec::Graphon { .. } | ModelSpec::Minimax { .. } => None,
        }
    }
}

/// How data are drawn from the parameter matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseModel {
    /// Data equal the parameters.
    Exact,
    /// 0/1 data with mean `m_ij`; needs `M` in `[0, 1]`.
    Bernoulli,
    /// ±1 data with mean `m_ij`; needs `M` in `[-1, 1]`.
    Sign,
    /// Tournament games (Bradley–Terry models only).
    Games,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub model: ModelSpec,
    pub n_grid: Vec<usize>,
    pub p_grid: Vec<f64>,
    pub eta: f64,
    #[serde(default)]
    pub sigma_sq: Option<f64>,
    pub trials: usize,
    pub seed: RngSeed,
    /// Also score the clipped `Y / p̂` estimator.
    #[serde(default)]
    pub baseline_trivial: bool,
    /// Overrides the family's default interval `[a, b]`.
    #[serde(default)]
    pub interval: Option<[f64; 2]>,
    #[serde(default)]
    pub noise: Option<NoiseModel>,
    /// Compute the nuclear-norm bracket (one extra decomposition per matrix).
    #[serde(default = "default_true")]
    pub mainest_bracket: bool,
    /// Never observe diagonal entries (no self-pairs in graph models).
    #[serde(default)]
    pub mask_diagonal: bool,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() || self.p_grid.is_empty() {
            return Err(Error::InvalidArgument("n_grid and p_grid must be nonempty".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.n_grid.contains(&0) {
            return Err(Error::InvalidArgument("sizes must be positive".into()));
        }
        if let Some(&p) = self.p_grid.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::InvalidArgument(format!("p = {p} must lie in (0, 1]")));
        }
        let tournament = matches!(self.model, ModelSpec::BradleyTerry { .. });
        if (self.noise() == NoiseModel::Games) != tournament {
            return Err(Error::InvalidArgument("Bradley-Terry models take game noise, and only they do".into()));
        }
        self.config()?;
        Ok(())
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise.unwrap_or_else(|| self.model.default_noise())
    }

    pub fn interval(&self) -> Result<Interval> {
        match self.interval {
            Some([a, b]) => Interval::new(a, b),
            None => Ok(self.model.default_interval()),
        }
    }

    pub fn config(&self) -> Result<EstimatorConfig> {
        let mut config = EstimatorConfig::new(self.eta, self.model.mode())?.with_interval(self.interval()?);
        if let Some(s) = self.sigma_sq {
            config = config.with_sigma_sq(s)?;
        }
        Ok(config)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Aggregates for one `(n, p)` grid cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub n: usize,
    pub p: f64,
    pub trials: usize,
    pub mean_mse: Option<f64>,
    pub std_mse: Option<f64>,
    pub mean_retained_rank: Option<f64>,
    /// Mean nuclear-norm bracket over the trials.
    pub bracket: Option<f64>,
    /// Family-specific rate bracket.
    pub theorem_bracket: Option<f64>,
    pub trivial_mse: Option<f64>,
    /// First error met in trial order; aggregates are then absent.
    pub failure: Option<String>,
    /// Summed trial time; kept out of the serialized report.
    #[serde(skip)]
    pub wall_time: f64,
}

/// Log-log fit of mean MSE against `n` at one `p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PFit {
    pub p: f64,
    pub fit: Option<RateFit>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema: u32,
    pub spec: ExperimentSpec,
    pub mode: SymmetryMode,
    pub noise: NoiseModel,
    pub interval: [f64; 2],
    /// Cells in `n`-major order.
    pub cells: Vec<CellReport>,
    pub rate_fits: Vec<PFit>,
}

impl ExperimentReport {
    pub fn cell(&self, n: usize, p: f64) -> Option<&CellReport> {
        self.cells.iter().find(|c| c.n == n && c.p == p)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// One row per cell.
    pub fn to_csv(&self) -> Result<String> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::InvalidArgument(e.to_string());
        wtr.write_record([
            "n",
            "p",
            "trials",
            "mean_mse",
            "std_mse",
            "mean_retained_rank",
            "bracket",
            "theorem_bracket",
            "trivial_mse",
            "failure",
        ])
        .map_err(io)?;
        let num = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        for c in &self.cells {
            wtr.write_record([
                c.n.to_string(),
                format!("{:?}", c.p),
                c.trials.to_string(),
                num(c.mean_mse),
                num(c.std_mse),
                num(c.mean_retained_rank),
                num(c.bracket),
                num(c.theorem_bracket),
                num(c.trivial_mse),
                c.failure.clone().unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        let bytes = wtr.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    /// Writes `report.json`, `report.csv` and `timings.json` into `dir`.
    /// Only the timings differ between repeated runs.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), self.to_json()?)?;
        fs::write(dir.join("report.csv"), self.to_csv()?)?;
        let timings: Vec<_> = self
            .cells
            .iter()
            .map(|c| serde_json::json!({ "n": c.n, "p": c.p, "wall_time": c.wall_time }))
            .collect();
        let mut f = fs::File::create(dir.join("timings.json"))?;
        serde_json::to_writer_pretty(&mut f, &timings)?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

struct Instance {
    m: DenseMatrix,
    data: Data,
}

enum Data {
    Values(DenseMatrix),
    Tournament(gen::TournamentModel, usize),
}

fn generate(spec: &ExperimentSpec, n: usize, p: f64, seed: RngSeed) -> Result<Instance> {
    let model_seed = seed.derive(&[0]);
    let noise_seed = seed.derive(&[1]);
    let noise = spec.noise();
    let m = match &spec.model {
        ModelSpec::Zero => DenseMatrix::zeros(n, n),
        ModelSpec::LowRank { rank } => gen::gen_low_rank(n, n, *rank, model_seed)?,
        ModelSpec::Blockmodel { k, block_probs, within, between } => {
            let probs = match block_probs {
                Some(rows) => DenseMatrix::from_rows(rows)?,
                None => gen::assortative_blocks(*k, *within, *between),
            };
            if probs.rows() != *k {
                return Err(Error::Shape(format!("block_probs must be {k} x {k}")));
            }
            gen::gen_blockmodel(n, &probs, None, model_seed)?.m
        }
        ModelSpec::Distance { dim, metric } => gen::gen_random_distance_matrix(n, *dim, *metric, model_seed)?.0,
        ModelSpec::LatentSpace { dim, kernel } => {
            gen::gen_latent_space(n, *dim, &|x, y| kernel.eval(x, y), model_seed)?.m
        }
        ModelSpec::Correlation => gen::gen_correlation_matrix(n, model_seed)?,
        ModelSpec::Graphon { graphon } => gen::gen_graphon(n, &|x, y| graphon.eval(x, y), model_seed)?.m,
        ModelSpec::BradleyTerry { family, games_per_pair } => {
            let model = gen::gen_bradley_terry(n, family, model_seed)?;
            let m = model.p.clone();
            return Ok(Instance { m, data: Data::Tournament(model, *games_per_pair) });
        }
        ModelSpec::LowRankAdversary { rank } => gen::gen_low_rank_adversary(n, n, *rank, model_seed)?,
        ModelSpec::Minimax { budget_fraction } => {
            let delta = budget_fraction * n as f64 * (n as f64).sqrt();
            gen::gen_minimax_instance(n, n, delta, p, model_seed)?.m_matrix
        }
    };
    let mode = spec.model.mode();
    let values = match noise {
        NoiseModel::Exact => m.clone(),
        NoiseModel::Bernoulli => gen::bernoulli_round(&m, mode, noise_seed)?,
        NoiseModel::Sign => gen::sign_round(&m, mode, noise_seed)?,
        NoiseModel::Games => unreachable!("validated"),
    };
    Ok(Instance { m, data: Data::Values(values) })
}

fn masked(instance: &Instance, p: f64, mode: SymmetryMode, seed: RngSeed, skip_diagonal: bool) -> Result<MaskedMatrix> {
    let data = match &instance.data {
        Data::Values(x) => {
            let mask = gen::bernoulli_mask(x.rows(), x.cols(), p, mode, seed)?;
            MaskedMatrix::new(x.clone(), mask, mode)?
        }
        Data::Tournament(model, games) => gen::play_tournament(model, p, *games, seed)?,
    };
    if !skip_diagonal {
        return Ok(data);
    }
    let mut mask = data.mask().clone();
    for i in 0..data.shape().0.min(data.shape().1) {
        mask.set(i, i, false);
    }
    MaskedMatrix::new(data.values().clone(), mask, mode)
}

#[derive(Clone, Debug)]
struct TrialOutcome {
    mse: f64,
    rank: usize,
    bracket: Option<f64>,
    trivial: Option<f64>,
    seconds: f64,
}

fn run_trials_for(
    spec: &ExperimentSpec,
    config: &EstimatorConfig,
    n_idx: usize,
    t: usize,
) -> Vec<std::result::Result<TrialOutcome, String>> {
    let n = spec.n_grid[n_idx];
    let base_seed = RngSeed(mix(spec.seed.0, &[n_idx as u64, t as u64]));
    let mode = spec.model.mode();
    let interval = config.interval();
    let mut shared: Option<(Instance, Option<f64>)> = None;
    let mut out = Vec::with_capacity(spec.p_grid.len());
    for (p_idx, &p) in spec.p_grid.iter().enumerate() {
        let start = Instant::now();
        let result = (|| -> Result<TrialOutcome> {
            if shared.is_none() || spec.model.depends_on_p() {
                let inst = generate(spec, n, p, base_seed)?;
                // Brackets are stated on the [-1, 1] scale.
                let nuclear = if spec.mainest_bracket {
                    let scaled = inst.m.map(|x| (x - interval.midpoint()) / interval.half_width());
                    Some(bounds::nuclear_norm_fast(&scaled)?)
                } else {
                    None
                };
                shared = Some((inst, nuclear));
            }
            let (inst, nuclear) = shared.as_ref().expect("instance generated");
            let mask_seed = RngSeed(mix(spec.seed.0, &[n_idx as u64, p_idx as u64, t as u64]));
            let data = masked(inst, p, mode, mask_seed, spec.mask_diagonal)?;
            let report = usvt_estimate(&data, config)?;
            let mse = bounds::mse(&report.estimate, &inst.m)?;
            let bracket = nuclear
                .map(|v| bounds::BoundBracket::from_nuclear_norm(v, n, n, p).map(|b| b.bracket))
                .transpose()?;
            let trivial = if spec.baseline_trivial {
                Some(bounds::mse(&trivial_estimate(&data, config)?, &inst.m)?)
            } else {
                None
            };
            Ok(TrialOutcome {
                mse,
                rank: report.retained_rank,
                bracket,
                trivial,
                seconds: 0.0,
            })
        })();
        let elapsed = start.elapsed().as_secs_f64();
        out.push(
            result
                .map(|mut o| {
                    o.seconds = elapsed;
                    o
                })
                .map_err(|e| e.to_string()),
        );
    }
    out
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let mu = mean(xs);
    (xs.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Runs the experiment on the global rayon pool.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let config = spec.config()?;
    let jobs: Vec<(usize, usize)> = (0..spec.n_grid.len())
        .flat_map(|i| (0..spec.trials).map(move |t| (i, t)))
        .collect();
    let outcomes: Vec<Vec<std::result::Result<TrialOutcome, String>>> = jobs
        .par_iter()
        .map(|&(i, t)| run_trials_for(spec, &config, i, t))
        .collect();

    let mut cells = Vec::with_capacity(spec.n_grid.len() * spec.p_grid.len());
    for (i, &n) in spec.n_grid.iter().enumerate() {
        let per_trial = &outcomes[i * spec.trials..(i + 1) * spec.trials];
        for (j, &p) in spec.p_grid.iter().enumerate() {
            let trials: Vec<&std::result::Result<TrialOutcome, String>> =
                per_trial.iter().map(|v| &v[j]).collect();
            let wall_time = trials.iter().filter_map(|r| r.as_ref().ok()).map(|o| o.seconds).sum();
            let theorem_bracket = spec.model.theorem_bracket(n, p);
            if let Some(Err(reason)) = trials.iter().find(|r| r.is_err()) {
                cells.push(CellReport {
                    n,
                    p,
                    trials: spec.trials,
                    mean_mse: None,
                    std_mse: None,
                    mean_retained_rank: None,
                    bracket: None,
                    theorem_bracket,
                    trivial_mse: None,
                    failure: Some(reason.clone()),
                    wall_time,
                });
                continue;
            }
            let ok: Vec<&TrialOutcome> = trials.iter().map(|r| r.as_ref().unwrap()).collect();
            let mses: Vec<f64> = ok.iter().map(|o| o.mse).collect();
            let ranks: Vec<f64> = ok.iter().map(|o| o.rank as f64).collect();
            let brackets: Option<Vec<f64>> = ok.iter().map(|o| o.bracket).collect();
            let trivials: Option<Vec<f64>> = ok.iter().map(|o| o.trivial).collect();
            cells.push(CellReport {
                n,
                p,
                trials: spec.trials,
                mean_mse: Some(mean(&mses)),
                std_mse: Some(sample_std(&mses)),
                mean_retained_rank: Some(mean(&ranks)),
                bracket: brackets.map(|b| mean(&b)),
                theorem_bracket,
                trivial_mse: trivials.map(|v| mean(&v)),
                failure: None,
                wall_time,
            });
        }
    }

    let rate_fits = spec
        .p_grid
        .iter()
        .map(|&p| {
            let pts: Vec<(f64, f64)> = cells
                .iter()
                .filter(|c| c.p == p)
                .filter_map(|c| c.mean_mse.map(|m| (c.n as f64, m)))
                .collect();
            let ns: Vec<f64> = pts.iter().map(|x| x.0).collect();
            let ms: Vec<f64> = pts.iter().map(|x| x.1).collect();
            match bounds::rate_fit(&ns, &ms) {
                Ok(fit) => PFit { p, fit: Some(fit), note: None },
                Err(e) => PFit { p, fit: None, note: Some(e.to_string()) },
            }
        })
        .collect();

    let interval = config.interval();
    Ok(ExperimentReport {
        schema: SCHEMA_VERSION,
        spec: spec.clone(),
        mode: spec.model.mode(),
        noise: spec.noise(),
        interval: [interval.lo(), interval.hi()],
        cells,
        rate_fits,
    })
}

/// Runs the experiment on a dedicated pool with `threads` workers.
pub fn run_experiment_with_threads(spec: &ExperimentSpec, threads: usize) -> Result<ExperimentReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    pool.install(|| run_experiment(spec))
}
