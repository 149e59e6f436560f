//! Error metrics, constant-free bound brackets, the parametric bootstrap and
//! random-matrix concentration checks.
//!
//! The rate theorems for USVT only hold up to unspecified constants, so every
//! bracket here is the rate expression with its constants dropped. Compare
//! brackets with empirical errors through log-log slopes, not ratios.

use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{usvt_estimate, EstimatorConfig, MaskedMatrix, SymmetryMode};
use crate::generators::{bernoulli_mask, bernoulli_round};
use crate::linalg::{self, DenseMatrix};
use crate::rng::RngSeed;

/// `np` below this value makes the exponentially small term of the main
/// bound non-negligible; brackets are flagged rather than adjusted.
pub const SMALL_NP_CUTOFF: f64 = 20.0;

/// Mean squared error per entry, `‖A - B‖_F² / (mn)`.
pub fn mse(estimate: &DenseMatrix, truth: &DenseMatrix) -> Result<f64> {
    let diff = estimate.sub(truth)?;
    Ok(diff.as_slice().iter().map(|d| d * d).sum::<f64>() / diff.len() as f64)
}

/// `min{‖M‖_*/(m√(np)), ‖M‖_*²/(mn), 1}` with its three terms, for the wide
/// orientation `m ≤ n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundBracket {
    pub nuclear_norm: f64,
    pub term_nuclear: f64,
    pub term_nuclear_sq: f64,
    pub term_one: f64,
    pub bracket: f64,
    /// `np < 20`: the additive exponential term cannot be ignored.
    pub small_np: bool,
}

impl BoundBracket {
    /// Bracket for a matrix of shape `rows × cols` with the given nuclear norm.
    pub fn from_nuclear_norm(nuclear_norm: f64, rows: usize, cols: usize, p: f64) -> Result<Self> {
        Self::build(nuclear_norm, rows, cols, p, None)
    }

    /// Variant for a known variance bound: the first term becomes
    /// `‖M‖_* √q / (m √n p)` with `q = pσ² + p(1-p)(1-σ²)`.
    pub fn from_nuclear_norm_with_variance(
        nuclear_norm: f64,
        rows: usize,
        cols: usize,
        p: f64,
        sigma_sq: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&sigma_sq) {
            return Err(Error::InvalidArgument(format!("sigma_sq = {sigma_sq} must lie in [0, 1]")));
        }
        Self::build(nuclear_norm, rows, cols, p, Some(sigma_sq))
    }

    fn build(nuclear: f64, rows: usize, cols: usize, p: f64, sigma_sq: Option<f64>) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidArgument(format!("p = {p} must lie in (0, 1]")));
        }
        let (m, n) = (rows.min(cols) as f64, rows.max(cols) as f64);
        let term_nuclear = match sigma_sq {
            None => nuclear / (m * (n * p).sqrt()),
            Some(s) => {
                let q = crate::estimator::variance_proxy(p, s);
                nuclear * q.sqrt() / (m * n.sqrt() * p)
            }
        };
        let term_nuclear_sq = nuclear * nuclear / (m * n);
        Ok(Self {
            nuclear_norm: nuclear,
            term_nuclear,
            term_nuclear_sq,
            term_one: 1.0,
            bracket: term_nuclear.min(term_nuclear_sq).min(1.0),
            small_np: n * p < SMALL_NP_CUTOFF,
        })
    }
}

/// Nuclear norm, using the cheaper eigenvalue route for symmetric input.
pub fn nuclear_norm_fast(m: &DenseMatrix) -> Result<f64> {
    if m.is_symmetric() {
        Ok(linalg::symmetric_eigenvalues(m)?.iter().map(|x| x.abs()).sum())
    } else {
        linalg::nuclear_norm(m)
    }
}

/// Main-theorem bracket for parameter matrix `m` observed with probability `p`.
pub fn mainest_bracket(m: &DenseMatrix, p: f64) -> Result<BoundBracket> {
    BoundBracket::from_nuclear_norm(nuclear_norm_fast(m)?, m.rows(), m.cols(), p)
}

/// [`mainest_bracket`] with a known variance bound `sigma_sq`.
pub fn mainest_bracket_with_variance(m: &DenseMatrix, p: f64, sigma_sq: f64) -> Result<BoundBracket> {
    BoundBracket::from_nuclear_norm_with_variance(nuclear_norm_fast(m)?, m.rows(), m.cols(), p, sigma_sq)
}

/// Number of log-spaced radii tried by [`distance_bracket`].
pub const DISTANCE_GRID_POINTS: usize = 50;

/// `inf_δ min{(δ + √(N(δ/4)/n))/√p, 1}` over 50 log-spaced radii in
/// `[1/n, 1]`, where `covering(δ)` is the number of δ-balls needed to cover
/// the space.
pub fn distance_bracket(n: usize, p: f64, covering: &dyn Fn(f64) -> f64) -> f64 {
    let nf = n as f64;
    let lo = (1.0 / nf).ln();
    (0..DISTANCE_GRID_POINTS)
        .map(|k| {
            let t = k as f64 / (DISTANCE_GRID_POINTS - 1) as f64;
            let delta = (lo * (1.0 - t)).exp();
            ((delta + (covering(delta / 4.0) / nf).sqrt()) / p.sqrt()).min(1.0)
        })
        .fold(1.0, f64::min)
}

/// Covering number of the unit interval by δ-balls, `⌈1/δ⌉`.
pub fn interval_covering(delta: f64) -> f64 {
    (1.0 / delta).ceil()
}

/// `n^{-1/(dim+2)} / √p` for Lipschitz latent space models.
pub fn lipschitz_latent_bracket(n: usize, p: f64, dim: usize) -> f64 {
    (n as f64).powf(-1.0 / (dim as f64 + 2.0)) / p.sqrt()
}

/// `n^{-1/4} / √p` for monotone tournaments.
pub fn bradley_bracket(n: usize, p: f64) -> f64 {
    (n as f64).powf(-0.25) / p.sqrt()
}

/// `1 / √(np)` for positive semidefinite matrices.
pub fn psd_bracket(n: usize, p: f64) -> f64 {
    1.0 / (n as f64 * p).sqrt()
}

/// `√(k/n)` for a blockmodel with `k` blocks.
pub fn blockmodel_bracket(k: usize, n: usize) -> f64 {
    (k as f64 / n as f64).sqrt()
}

/// `min{√(r/(mp)), 1}` for rank-`r` matrices with `m` the smaller dimension.
pub fn low_rank_bracket(r: usize, m: usize, p: f64) -> f64 {
    (r as f64 / (m as f64 * p)).sqrt().min(1.0)
}

/// `(1-p)^{⌊m/r⌋}`: the lower bound for rank-`r` matrices.
pub fn lowrank_lower(m: usize, r: usize, p: f64) -> f64 {
    (1.0 - p).powi((m / r) as i32)
}

/// How bootstrap data are drawn from the plug-in parameter matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleModel {
    /// 0/1 entries with the estimate as success probability; the estimate
    /// must lie in `[0, 1]`.
    BernoulliRound,
    /// Noiseless data equal to the estimate; only the mask is random.
    ExactMean,
}

/// Parametric bootstrap estimate of the mean squared error of `estimate`.
///
/// Treats `estimate` as the true parameter, draws `k` synthetic data sets
/// (resampled values, Bernoulli(`p`) mask in the configured mode), re-runs
/// the estimator and averages `‖M̂⁽ⁱ⁾ - M̂‖_F²/(mn)`.
///
/// The number is only as trustworthy as `estimate` itself. No procedure can
/// tell from the data alone whether the error of a nontrivial estimator is
/// small, so read this as a diagnostic under the assumption that the
/// estimate is already accurate, never as a guarantee.
pub fn bootstrap_mse(
    estimate: &DenseMatrix,
    p: f64,
    config: &EstimatorConfig,
    k: usize,
    resample: ResampleModel,
    seed: RngSeed,
) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("bootstrap needs at least one replicate".into()));
    }
    let mode = config.mode();
    let (rows, cols) = estimate.shape();
    let replicate = |i: usize| -> Result<f64> {
        let values = match resample {
            ResampleModel::BernoulliRound => {
                bernoulli_round(estimate, mode, seed.derive(&[i as u64, 0]))?
            }
            ResampleModel::ExactMean => estimate.clone(),
        };
        let mask = bernoulli_mask(rows, cols, p, mode, seed.derive(&[i as u64, 1]))?;
        let data = MaskedMatrix::new(values, mask, mode)?;
        mse(&usvt_estimate(&data, config)?.estimate, estimate)
    };
    let errors: Vec<f64> = (0..k)
        .into_par_iter()
        .map(replicate)
        .collect::<Result<Vec<f64>>>()?;
    Ok(errors.iter().sum::<f64>() / k as f64)
}

/// Bounded, zero-mean entry laws for concentration experiments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EntryDistribution {
    /// Uniform on `[-1, 1]`, variance 1/3.
    Uniform,
    /// ±1 with equal probability, variance 1.
    Rademacher,
    /// ±1 with probability `q/2` each, 0 otherwise; variance `q`.
    SparseRademacher { q: f64 },
}

impl EntryDistribution {
    pub fn variance(&self) -> f64 {
        match *self {
            EntryDistribution::Uniform => 1.0 / 3.0,
            EntryDistribution::Rademacher => 1.0,
            EntryDistribution::SparseRademacher { q } => q,
        }
    }

    fn sample(&self, rng: &mut crate::rng::StreamRng) -> f64 {
        match *self {
            EntryDistribution::Uniform => 2.0 * rng.random::<f64>() - 1.0,
            EntryDistribution::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryDistribution::SparseRademacher { q } => {
                let u = rng.random::<f64>();
                if u < q / 2.0 {
                    1.0
                } else if u < q {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Outcome of [`spectral_concentration_trial`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationOutcome {
    /// `(2+η)σ√n`.
    pub threshold: f64,
    /// Fraction of trials with spectral norm at most the threshold.
    pub fraction: f64,
    /// Spectral norm of each trial, in trial order.
    pub norms: Vec<f64>,
}

/// The variance floor `σ² ≥ n^{-1+ε}` is enforced with this `ε`.
pub const CONCENTRATION_EPSILON: f64 = 0.1;

/// Random `n × n` matrices with i.i.d. entries from `dist` (independent on
/// and above the diagonal in the symmetric modes, zero diagonal in skew
/// mode); reports how often `‖A‖ ≤ (2+η)σ√n`.
///
/// For `n = 1` only laws with `σ² = 1` pass the variance floor, and the
/// single entry `±1` always satisfies `1 ≤ (2+η)`.
pub fn spectral_concentration_trial(
    n: usize,
    dist: EntryDistribution,
    mode: SymmetryMode,
    eta: f64,
    trials: usize,
    seed: RngSeed,
) -> Result<ConcentrationOutcome> {
    let sigma_sq = dist.variance();
    if n == 0 || trials == 0 {
        return Err(Error::InvalidArgument("need n >= 1 and at least one trial".into()));
    }
    let floor = (n as f64).powf(-1.0 + CONCENTRATION_EPSILON);
    if !(sigma_sq >= floor && sigma_sq <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "variance {sigma_sq} is below the floor n^(-0.9) = {floor}"
        )));
    }
    let threshold = (2.0 + eta) * sigma_sq.sqrt() * (n as f64).sqrt();
    let norms: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seed.derive(&[t as u64]).rng();
            let mut a = DenseMatrix::zeros(n, n);
            match mode {
                SymmetryMode::Asymmetric => {
                    for i in 0..n {
                        for j in 0..n {
                            a.set(i, j, dist.sample(&mut rng));
                        }
                    }
                    linalg::spectral_norm(&a)
                }
                SymmetryMode::Symmetric => {
                    for i in 0..n {
                        for j in i..n {
                            let v = dist.sample(&mut rng);
                            a.set(i, j, v);
                            a.set(j, i, v);
                        }
                    }
                    linalg::spectral_norm_symmetric(&a)
                }
                SymmetryMode::SkewSymmetric => {
                    for i in 0..n {
                        for j in i + 1..n {
                            let v = dist.sample(&mut rng);
                            a.set(i, j, v);
                            a.set(j, i, -v);
                        }
                    }
                    linalg::spectral_norm(&a)
                }
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let within = norms.iter().filter(|&&x| x <= threshold).count();
    Ok(ConcentrationOutcome {
        threshold,
        fraction: within as f64 / trials as f64,
        norms,
    })
}

/// Least-squares fit of `ln(mse) = intercept + slope · ln(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub ns: Vec<f64>,
    pub mses: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn rate_fit(ns: &[f64], mses: &[f64]) -> Result<RateFit> {
    if ns.len() != mses.len() || ns.len() < 3 {
        return Err(Error::InvalidArgument("rate fit needs at least three (n, mse) pairs".into()));
    }
    if ns.iter().chain(mses).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument("rate fit needs positive sizes and errors".into()));
    }
    let x: Vec<f64> = ns.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = mses.iter().map(|v| v.ln()).collect();
    let count = x.len() as f64;
    let mx = x.iter().sum::<f64>() / count;
    let my = y.iter().sum::<f64>() / count;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("rate fit needs at least two distinct sizes".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(RateFit {
        ns: ns.to_vec(),
        mses: mses.to_vec(),
        slope,
        intercept,
        r_squared,
    })
}
