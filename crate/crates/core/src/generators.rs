//! Parameter and data matrices for each application class: low-rank
//! matrices, stochastic blockmodels, distance matrices, latent space models,
//! correlation matrices, graphons and tournaments, plus the block-copied
//! constructions behind the lower bounds.
//!
//! All randomness comes from an [`RngSeed`]; equal seeds and parameters give
//! bit-identical matrices.

use rand::seq::SliceRandom;
use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{Mask, MaskedMatrix, SymmetryMode};
use crate::linalg::DenseMatrix;
use crate::rng::{RngSeed, StreamRng};

fn uniform_sym(rng: &mut StreamRng) -> f64 {
    2.0 * rng.random::<f64>() - 1.0
}

fn bernoulli(rng: &mut StreamRng, p: f64) -> bool {
    rng.random::<f64>() < p
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("{name} = {p} must lie in [0, 1]")));
    }
    Ok(())
}

fn check_square(mode: SymmetryMode, rows: usize, cols: usize) -> Result<()> {
    if mode.requires_square() && rows != cols {
        return Err(Error::Shape(format!("{mode:?} mode needs a square shape, got {rows}x{cols}")));
    }
    Ok(())
}

/// Sum of `r` random outer products with Uniform[-1,1] factors, rescaled so the
/// largest entry has absolute value 1.
pub fn gen_low_rank(m: usize, n: usize, r: usize, seed: RngSeed) -> Result<DenseMatrix> {
    if m == 0 || n == 0 || r == 0 || r > m.min(n) {
        return Err(Error::InvalidArgument(format!(
            "rank {r} must lie in 1..={} for a {m}x{n} matrix",
            m.min(n)
        )));
    }
    let mut rng = seed.rng();
    let left = DenseMatrix::from_fn(m, r, |_, _| uniform_sym(&mut rng));
    let right = DenseMatrix::from_fn(r, n, |_, _| uniform_sym(&mut rng));
    let product = left.matmul(&right)?;
    let peak = product.max_abs();
    Ok(if peak > 0.0 { product.scale(1.0 / peak) } else { product })
}

/// Independent Bernoulli(p) observation pattern; in the symmetric modes the
/// entries on and above the diagonal are drawn and mirrored.
pub fn bernoulli_mask(
    rows: usize,
    cols: usize,
    p: f64,
    mode: SymmetryMode,
    seed: RngSeed,
) -> Result<Mask> {
    check_probability("p", p)?;
    check_square(mode, rows, cols)?;
    let mut rng = seed.rng();
    let mut mask = Mask::filled(rows, cols, false);
    match mode {
        SymmetryMode::Asymmetric => {
            for i in 0..rows {
                for j in 0..cols {
                    mask.set(i, j, bernoulli(&mut rng, p));
                }
            }
        }
        _ => {
            for i in 0..rows {
                for j in i..cols {
                    let seen = bernoulli(&mut rng, p);
                    mask.set(i, j, seen);
                    mask.set(j, i, seen);
                }
            }
        }
    }
    Ok(mask)
}

/// 0/1 data with `E x_ij = m_ij`.
///
/// Symmetric mode draws on and above the diagonal and mirrors. Skew mode
/// draws above the diagonal and sets `x_ji = m_ij + m_ji - x_ij`, so that
/// `X - M` is skew; the diagonal is copied from `m`. Skew mode therefore
/// needs `m_ij + m_ji = 1` off the diagonal (as for win probabilities).
pub fn bernoulli_round(m: &DenseMatrix, mode: SymmetryMode, seed: RngSeed) -> Result<DenseMatrix> {
    if let Some(&bad) = m.as_slice().iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::FunctionRange {
            value: bad,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let (rows, cols) = m.shape();
    check_square(mode, rows, cols)?;
    let mut rng = seed.rng();
    let mut x = DenseMatrix::zeros(rows, cols);
    let draw = |rng: &mut StreamRng, p: f64| if bernoulli(rng, p) { 1.0 } else { 0.0 };
    match mode {
        SymmetryMode::Asymmetric => {
            for i in 0..rows {
                for j in 0..cols {
                    x.set(i, j, draw(&mut rng, m.get(i, j)));
                }
            }
        }
        SymmetryMode::Symmetric => {
            if !m.is_symmetric() {
                return Err(Error::InvalidArgument("symmetric rounding needs a symmetric mean".into()));
            }
            for i in 0..rows {
                for j in i..cols {
                    let v = draw(&mut rng, m.get(i, j));
                    x.set(i, j, v);
                    x.set(j, i, v);
                }
            }
        }
        SymmetryMode::SkewSymmetric => {
            for i in 0..rows {
                x.set(i, i, m.get(i, i));
                for j in i + 1..cols {
                    let total = m.get(i, j) + m.get(j, i);
                    if (total - 1.0).abs() > 1e-12 {
                        return Err(Error::InvalidArgument(format!(
                            "skew rounding needs m_ij + m_ji = 1, got {total} at ({i}, {j})"
                        )));
                    }
                    let v = draw(&mut rng, m.get(i, j));
                    x.set(i, j, v);
                    x.set(j, i, 1.0 - v);
                }
            }
        }
    }
    Ok(x)
}

/// ±1 data with `E x_ij = m_ij` for a mean matrix in `[-1, 1]`: `+1` with
/// probability `(1 + m_ij)/2`. Symmetric mode mirrors the upper triangle.
pub fn sign_round(m: &DenseMatrix, mode: SymmetryMode, seed: RngSeed) -> Result<DenseMatrix> {
    let half = m.map(|x| (x + 1.0) / 2.0);
    let mode = match mode {
        SymmetryMode::SkewSymmetric => {
            return Err(Error::InvalidArgument("sign rounding has no skew variant".into()))
        }
        other => other,
    };
    Ok(bernoulli_round(&half, mode, seed)?.map(|x| 2.0 * x - 1.0))
}

/// A stochastic blockmodel draw.
#[derive(Clone, Debug)]
pub struct BlockmodelSample {
    /// Edge probabilities `m_ij = B[block(i)][block(j)]`, diagonal included.
    pub m: DenseMatrix,
    /// Symmetric 0/1 adjacency (self-pairs drawn like any other pair).
    pub adjacency: DenseMatrix,
    /// Zero-based block label of every vertex.
    pub assignment: Vec<usize>,
}

/// Stochastic blockmodel on `n` vertices with `k × k` block probabilities.
/// Labels are drawn uniformly unless `assignment` (zero-based) is supplied;
/// empty blocks are allowed.
pub fn gen_blockmodel(
    n: usize,
    block_probs: &DenseMatrix,
    assignment: Option<&[usize]>,
    seed: RngSeed,
) -> Result<BlockmodelSample> {
    let k = block_probs.rows();
    if !block_probs.is_square() || !block_probs.is_symmetric() {
        return Err(Error::InvalidArgument("block probabilities must be a symmetric k x k matrix".into()));
    }
    if let Some(&bad) = block_probs.as_slice().iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::FunctionRange {
            value: bad,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("blockmodel needs at least one vertex".into()));
    }
    let mut rng = seed.rng();
    let labels: Vec<usize> = match assignment {
        Some(a) => {
            if a.len() != n || a.iter().any(|&b| b >= k) {
                return Err(Error::InvalidArgument(format!(
                    "assignment must give each of {n} vertices a block in 0..{k}"
                )));
            }
            a.to_vec()
        }
        None => (0..n).map(|_| rng.random_range(0..k)).collect(),
    };
    let m = DenseMatrix::from_fn(n, n, |i, j| block_probs.get(labels[i], labels[j]));
    let adjacency = bernoulli_round(&m, SymmetryMode::Symmetric, RngSeed(rng.random()))?;
    Ok(BlockmodelSample {
        m,
        adjacency,
        assignment: labels,
    })
}

/// Block probabilities with `within` on the diagonal and `between` elsewhere.
pub fn assortative_blocks(k: usize, within: f64, between: f64) -> DenseMatrix {
    DenseMatrix::from_fn(k, k, |a, b| if a == b { within } else { between })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl Metric {
    pub fn distance(self, x: &[f64], y: &[f64]) -> f64 {
        let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
        match self {
            Metric::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Metric::Manhattan => diffs.sum(),
            Metric::Chebyshev => diffs.fold(0.0, f64::max),
        }
    }
}

/// Pairwise distances divided by the diameter of the point set, so the
/// largest entry is exactly 1 (all zeros when the points coincide).
pub fn distance_matrix(points: &[Vec<f64>], metric: Metric) -> Result<DenseMatrix> {
    let n = points.len();
    if n == 0 {
        return Err(Error::InvalidArgument("distance matrix needs at least one point".into()));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::Shape("points have different dimensions".into()));
    }
    if points.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("points must have finite coordinates".into()));
    }
    let raw = DenseMatrix::from_fn(n, n, |i, j| {
        if i <= j {
            metric.distance(&points[i], &points[j])
        } else {
            metric.distance(&points[j], &points[i])
        }
    });
    let diameter = raw.max_abs();
    Ok(if diameter > 0.0 { raw.scale(1.0 / diameter) } else { raw })
}

/// `n` points drawn uniformly from the unit cube `[0,1]^dim`.
pub fn sample_unit_cube(n: usize, dim: usize, seed: RngSeed) -> Vec<Vec<f64>> {
    let mut rng = seed.rng();
    (0..n).map(|_| (0..dim).map(|_| rng.random::<f64>()).collect()).collect()
}

/// Normalized distance matrix of `n` uniform points in `[0,1]^dim`.
pub fn gen_random_distance_matrix(
    n: usize,
    dim: usize,
    metric: Metric,
    seed: RngSeed,
) -> Result<(DenseMatrix, Vec<Vec<f64>>)> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let points = sample_unit_cube(n, dim, seed);
    Ok((distance_matrix(&points, metric)?, points))
}

/// Latent positions and the matrix `m_ij = f(β_i, β_j)`.
#[derive(Clone, Debug)]
pub struct LatentSample {
    pub m: DenseMatrix,
    pub betas: Vec<Vec<f64>>,
}

/// Latent space model with positions uniform on `[0,1]^dim`. `f` must map
/// into `[-1, 1]`; any other value is rejected.
pub fn gen_latent_space(
    n: usize,
    dim: usize,
    f: &dyn Fn(&[f64], &[f64]) -> f64,
    seed: RngSeed,
) -> Result<LatentSample> {
    if n == 0 || dim == 0 {
        return Err(Error::InvalidArgument("latent model needs n >= 1 and dim >= 1".into()));
    }
    let betas = sample_unit_cube(n, dim, seed);
    let mut data = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let v = f(&betas[i], &betas[j]);
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::FunctionRange {
                    value: v,
                    lo: -1.0,
                    hi: 1.0,
                });
            }
            data.push(v);
        }
    }
    Ok(LatentSample {
        m: DenseMatrix::new(n, n, data)?,
        betas,
    })
}

/// Built-in latent kernels selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LatentKernel {
    /// `f ≡ c`.
    Constant { value: f64 },
    /// `xᵀy / dim`; a Gram matrix of rank at most `dim`.
    InnerProduct,
    /// `1 - ‖x - y‖₁ / dim`; Lipschitz with constant `1/dim` in each argument.
    L1Similarity,
    /// `2·logistic(4 xᵀy/dim) - 1`.
    Logistic,
}

impl LatentKernel {
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let dim = x.len() as f64;
        match *self {
            LatentKernel::Constant { value } => value,
            LatentKernel::InnerProduct => x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / dim,
            LatentKernel::L1Similarity => {
                1.0 - x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum::<f64>() / dim
            }
            LatentKernel::Logistic => {
                let t = 4.0 * x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / dim;
                2.0 / (1.0 + (-t).exp()) - 1.0
            }
        }
    }
}

/// Correlation matrix with `m_ij = u_i u_j` off the diagonal and 1 on it.
/// It equals `uuᵀ + diag(1 - u_i²)` and is positive semidefinite whenever
/// every `|u_i| ≤ 1`.
pub fn correlation_from_factors(u: &[f64]) -> Result<DenseMatrix> {
    if u.is_empty() || u.iter().any(|x| !(-1.0..=1.0).contains(x)) {
        return Err(Error::InvalidArgument("factors must be nonempty and lie in [-1, 1]".into()));
    }
    let n = u.len();
    Ok(DenseMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { u[i] * u[j] }))
}

/// [`correlation_from_factors`] with Uniform[0,1] factors.
pub fn gen_correlation_matrix(n: usize, seed: RngSeed) -> Result<DenseMatrix> {
    let mut rng = seed.rng();
    let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    correlation_from_factors(&u)
}

/// A graph sampled from a graphon.
#[derive(Clone, Debug)]
pub struct GraphonSample {
    /// Latent uniforms `U_i`.
    pub u: Vec<f64>,
    /// `m_ij = f(U_i, U_j)`, diagonal included.
    pub m: DenseMatrix,
    /// Symmetric 0/1 adjacency with `E[adjacency_ij | U] = m_ij`.
    pub adjacency: DenseMatrix,
}

/// Samples a graph on `n` vertices from the symmetric function `f: [0,1]² → [0,1]`.
pub fn gen_graphon(n: usize, f: &dyn Fn(f64, f64) -> f64, seed: RngSeed) -> Result<GraphonSample> {
    if n == 0 {
        return Err(Error::InvalidArgument("graphon sample needs n >= 1".into()));
    }
    let mut rng = seed.rng();
    let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = f(u[i], u[j]);
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::FunctionRange {
                    value: v,
                    lo: 0.0,
                    hi: 1.0,
                });
            }
            m.set(i, j, v);
            m.set(j, i, v);
        }
    }
    let adjacency = bernoulli_round(&m, SymmetryMode::Symmetric, RngSeed(rng.random()))?;
    Ok(GraphonSample { u, m, adjacency })
}

/// Built-in graphons selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Graphon {
    /// Erdős–Rényi with edge probability `value`.
    Constant { value: f64 },
    /// `(x + y) / 2`.
    Average,
    /// `x y`.
    Product,
    /// `exp(-|x - y| / width)`: a smooth band around the diagonal.
    Band { width: f64 },
    /// `1 / (1 + exp(-(x + y - 1) * steepness))`.
    Logistic { steepness: f64 },
}

impl Graphon {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            Graphon::Constant { value } => value,
            Graphon::Average => (x + y) / 2.0,
            Graphon::Product => x * y,
            Graphon::Band { width } => (-(x - y).abs() / width).exp(),
            Graphon::Logistic { steepness } => 1.0 / (1.0 + (-(x + y - 1.0) * steepness).exp()),
        }
    }
}

/// Win probabilities for a tournament and the teams from strongest to weakest.
#[derive(Clone, Debug)]
pub struct TournamentModel {
    /// `p_ij` = probability that `i` beats `j`; zero diagonal.
    pub p: DenseMatrix,
    pub strength_order: Vec<usize>,
}

impl TournamentModel {
    pub fn teams(&self) -> usize {
        self.p.rows()
    }

    /// Whether `p_ji = 1 - p_ij` off the diagonal (within `tol`) and the
    /// diagonal is zero.
    pub fn is_complementary(&self, tol: f64) -> bool {
        let n = self.teams();
        (0..n).all(|i| {
            self.p.get(i, i) == 0.0
                && (i + 1..n).all(|j| (self.p.get(i, j) + self.p.get(j, i) - 1.0).abs() <= tol)
        })
    }

    /// Whether a stronger team beats every third team at least as often as a
    /// weaker one does.
    pub fn is_monotone(&self) -> bool {
        let n = self.teams();
        let order = &self.strength_order;
        (0..n).all(|a| {
            (a + 1..n).all(|b| {
                let (strong, weak) = (order[a], order[b]);
                (0..n)
                    .filter(|&k| k != strong && k != weak)
                    .all(|k| self.p.get(strong, k) >= self.p.get(weak, k))
            })
        })
    }
}

/// Family of win-probability models.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TournamentFamily {
    /// Classical Bradley–Terry: `p_ij = a_i / (a_i + a_j)`.
    Parametric { strengths: Vec<f64> },
    /// `p_ij = 1/2 + (h_i - h_j)/2` where `h` is a random strictly increasing
    /// function of strength rank with values in `[0, 1]`.
    NonparametricMonotone,
}

pub fn gen_bradley_terry(n: usize, family: &TournamentFamily, seed: RngSeed) -> Result<TournamentModel> {
    if n == 0 {
        return Err(Error::InvalidArgument("tournament needs at least one team".into()));
    }
    match family {
        TournamentFamily::Parametric { strengths } => {
            if strengths.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "{} strengths supplied for {n} teams",
                    strengths.len()
                )));
            }
            if strengths.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
                return Err(Error::InvalidArgument("strengths must be positive".into()));
            }
            let p = DenseMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    0.0
                } else {
                    strengths[i] / (strengths[i] + strengths[j])
                }
            });
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| strengths[b].total_cmp(&strengths[a]));
            Ok(TournamentModel {
                p,
                strength_order: order,
            })
        }
        TournamentFamily::NonparametricMonotone => {
            let mut rng = seed.rng();
            let mut levels: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            levels.sort_by(|a, b| b.total_cmp(a));
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut h = vec![0.0; n];
            for (rank, &team) in order.iter().enumerate() {
                h[team] = levels[rank];
            }
            let p = DenseMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    0.0
                } else {
                    0.5 + (h[i] - h[j]) / 2.0
                }
            });
            Ok(TournamentModel {
                p,
                strength_order: order,
            })
        }
    }
}

/// Plays each pair with probability `p`, `games_per_pair` times. An observed
/// entry is the fraction of games `i` won; `x_ji = 1 - x_ij`; the diagonal is
/// observed as zero.
pub fn play_tournament(
    model: &TournamentModel,
    p: f64,
    games_per_pair: usize,
    seed: RngSeed,
) -> Result<MaskedMatrix> {
    check_probability("p", p)?;
    if games_per_pair == 0 {
        return Err(Error::InvalidArgument("games_per_pair must be positive".into()));
    }
    let n = model.teams();
    let mut rng = seed.rng();
    let mut x = DenseMatrix::zeros(n, n);
    let mut mask = Mask::filled(n, n, false);
    for i in 0..n {
        mask.set(i, i, true);
        for j in i + 1..n {
            if !bernoulli(&mut rng, p) {
                continue;
            }
            let pij = model.p.get(i, j);
            let wins = (0..games_per_pair).filter(|_| bernoulli(&mut rng, pij)).count();
            let frac = wins as f64 / games_per_pair as f64;
            x.set(i, j, frac);
            x.set(j, i, 1.0 - frac);
            mask.set(i, j, true);
            mask.set(j, i, true);
        }
    }
    MaskedMatrix::new(x, mask, SymmetryMode::SkewSymmetric)
}

/// Which block-copied construction a minimax instance uses, by the regime of
/// `θ = δ/(m√n)` and `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimaxCase {
    /// `θ/√p ≤ 1` and `mθ√p ≥ 1`: `⌊mθ√p⌋` Uniform[-1,1] rows copied `⌊1/p⌋` times.
    CopiedBlock,
    /// `θ/√p ≤ 1` and `mθ√p < 1`: one row of Uniform[-mθ√p, mθ√p] copied `⌊1/p⌋` times.
    CopiedRow,
    /// `θ/√p > 1`: `⌊mp⌋` Uniform[-1,1] rows copied `⌊1/p⌋` times.
    Saturated,
}

/// A hard instance for a nuclear-norm budget.
#[derive(Clone, Debug)]
pub struct MinimaxInstance {
    pub m_matrix: DenseMatrix,
    pub nuclear_budget: f64,
    pub observed_p: f64,
    pub case: MinimaxCase,
    /// Height of the random block that is copied down the matrix.
    pub block_rows: usize,
    /// Number of copies of the block.
    pub copies: usize,
    /// Entries were halved (done when `p ≥ 1/2`).
    pub halved: bool,
}

/// Builds a matrix whose nuclear norm is at most `delta` and whose entries
/// are repeated `⌊1/p⌋` times, so that with probability bounded below none
/// of the copies of an entry is observed.
pub fn gen_minimax_instance(
    m: usize,
    n: usize,
    delta: f64,
    p: f64,
    seed: RngSeed,
) -> Result<MinimaxInstance> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument("dimensions must be positive".into()));
    }
    let max_budget = m as f64 * (n as f64).sqrt();
    if !(0.0..=max_budget).contains(&delta) {
        return Err(Error::InvalidArgument(format!("delta = {delta} must lie in [0, {max_budget}]")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidArgument(format!("p = {p} must lie in (0, 1)")));
    }
    let theta = delta / max_budget;
    let sqrt_p = p.sqrt();
    let copies = (1.0 / p).floor() as usize;
    let scaled = m as f64 * theta * sqrt_p;
    let (case, block_rows, width) = if theta / sqrt_p > 1.0 {
        (MinimaxCase::Saturated, (m as f64 * p).floor() as usize, 1.0)
    } else if scaled >= 1.0 {
        (MinimaxCase::CopiedBlock, scaled.floor() as usize, 1.0)
    } else {
        (MinimaxCase::CopiedRow, 1, scaled)
    };
    let mut rng = seed.rng();
    let block: Vec<Vec<f64>> = (0..block_rows)
        .map(|_| (0..n).map(|_| width * uniform_sym(&mut rng)).collect())
        .collect();
    let filled = (block_rows * copies).min(m);
    let halved = p >= 0.5;
    let factor = if halved { 0.5 } else { 1.0 };
    let m_matrix = DenseMatrix::from_fn(m, n, |i, j| {
        if i < filled {
            factor * block[i % block_rows][j]
        } else {
            0.0
        }
    });
    Ok(MinimaxInstance {
        m_matrix,
        nuclear_budget: delta,
        observed_p: p,
        case,
        block_rows,
        copies,
        halved,
    })
}

/// First `r` rows Uniform[-1,1], copied `⌊m/r⌋` times; remaining rows zero.
pub fn gen_low_rank_adversary(m: usize, n: usize, r: usize, seed: RngSeed) -> Result<DenseMatrix> {
    if r == 0 || r > m || n == 0 {
        return Err(Error::InvalidArgument(format!("rank {r} must lie in 1..={m}")));
    }
    let mut rng = seed.rng();
    let block = DenseMatrix::from_fn(r, n, |_, _| uniform_sym(&mut rng));
    let filled = r * (m / r);
    Ok(DenseMatrix::from_fn(m, n, |i, j| if i < filled { block.get(i % r, j) } else { 0.0 }))
}
