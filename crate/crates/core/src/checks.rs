//! Seeded property batteries and fixture certificates.

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::bounds::{spectral_concentration_trial, EntryDistribution};
use crate::error::{Error, Result};
use crate::estimator::{key_lemma_constant, key_lemma_estimate, SymmetryMode};
use crate::generators::{self as gen, TournamentFamily, TournamentModel};
use crate::linalg::{self, DenseMatrix, DEFAULT_RANK_TOL};
use crate::rng::{RngSeed, StreamRng};

/// Slack for inequalities between computed norms.
pub const NUMERICAL_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Battery {
    KeyLemma,
    Concentration,
    Norms,
    Generators,
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    /// Fraction of cases that must pass (1.0 for deterministic properties).
    pub required_fraction: f64,
}

impl PropertyResult {
    fn new(name: &str, required_fraction: f64) -> Self {
        Self { name: name.into(), passed: 0, failed: 0, required_fraction }
    }

    fn record(&mut self, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    pub fn cases(&self) -> usize {
        self.passed + self.failed
    }

    pub fn ok(&self) -> bool {
        self.cases() > 0 && self.passed as f64 >= self.required_fraction * self.cases() as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub properties: Vec<PropertyResult>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.properties.iter().all(PropertyResult::ok)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.properties.iter().filter(|p| !p.ok()).map(|p| p.name.as_str()).collect()
    }
}

/// Case counts for each battery.
#[derive(Clone, Copy, Debug)]
pub struct SuiteSize {
    pub key_lemma_cases: usize,
    pub concentration_n: usize,
    pub concentration_trials: usize,
    pub norm_cases: usize,
    pub generator_draws: usize,
    pub generator_n: usize,
}

impl Default for SuiteSize {
    fn default() -> Self {
        Self {
            key_lemma_cases: 1000,
            concentration_n: 400,
            concentration_trials: 100,
            norm_cases: 200,
            generator_draws: 100,
            generator_n: 40,
        }
    }
}

pub fn check_suite(battery: Battery, size: &SuiteSize, seed: RngSeed) -> Result<SuiteReport> {
    let mut properties = Vec::new();
    let run = |b: Battery| battery == b || battery == Battery::All;
    if run(Battery::KeyLemma) {
        properties.push(key_lemma_battery(size.key_lemma_cases, seed.derive(&[1]))?);
    }
    if run(Battery::Concentration) {
        properties.extend(concentration_battery(size.concentration_n, size.concentration_trials, seed.derive(&[2]))?);
    }
    if run(Battery::Norms) {
        properties.extend(norm_battery(size.norm_cases, seed.derive(&[3]))?);
    }
    if run(Battery::Generators) {
        properties.extend(generator_battery(size.generator_draws, size.generator_n, seed.derive(&[4]))?);
    }
    Ok(SuiteReport { properties })
}

fn uniform_matrix(rng: &mut StreamRng, rows: usize, cols: usize, scale: f64) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| scale * (2.0 * rng.random::<f64>() - 1.0))
}

/// A random `(A, B, δ)` triple with shapes up to 20×30.
pub fn key_lemma_case(rng: &mut StreamRng) -> Result<(DenseMatrix, DenseMatrix, f64)> {
    let rows = rng.random_range(1..=20);
    let cols = rng.random_range(1..=30);
    let rank = rng.random_range(1..=rows.min(cols));
    let u = uniform_matrix(rng, rows, rank, 1.0);
    let v = uniform_matrix(rng, rank, cols, 1.0);
    let b = u.matmul(&v)?;
    let noise = 10f64.powf(rng.random_range(-4.0..1.5));
    let a = b.add(&uniform_matrix(rng, rows, cols, noise))?;
    let delta = [0.5, 1.0, 2.0][rng.random_range(0..3)];
    Ok((a, b, delta))
}

/// `‖B̂ - B‖_F ≤ K(δ)(‖A - B‖ ‖B‖_*)^{1/2}`, up to [`NUMERICAL_SLACK`].
pub fn key_lemma_holds(a: &DenseMatrix, b: &DenseMatrix, delta: f64) -> Result<bool> {
    let b_hat = key_lemma_estimate(a, b, delta)?;
    let lhs = linalg::frobenius_norm(&b_hat.sub(b)?);
    let gap = linalg::spectral_norm(&a.sub(b)?)?;
    let rhs = key_lemma_constant(delta) * (gap * linalg::nuclear_norm(b)?).sqrt();
    Ok(lhs <= rhs + NUMERICAL_SLACK)
}

fn key_lemma_battery(cases: usize, seed: RngSeed) -> Result<PropertyResult> {
    let mut result = PropertyResult::new("key_lemma", 1.0);
    let mut rng = seed.rng();
    for _ in 0..cases {
        let (a, b, delta) = key_lemma_case(&mut rng)?;
        result.record(key_lemma_holds(&a, &b, delta)?);
    }
    Ok(result)
}

fn concentration_battery(n: usize, trials: usize, seed: RngSeed) -> Result<Vec<PropertyResult>> {
    let cases = [
        ("concentration_uniform", EntryDistribution::Uniform),
        ("concentration_rademacher", EntryDistribution::Rademacher),
    ];
    let mut out = Vec::new();
    for (k, (name, dist)) in cases.into_iter().enumerate() {
        let outcome = spectral_concentration_trial(n, dist, SymmetryMode::Symmetric, 0.1, trials, seed.derive(&[k as u64]))?;
        let mut result = PropertyResult::new(name, 0.95);
        for norm in &outcome.norms {
            result.record(*norm <= outcome.threshold);
        }
        out.push(result);
    }
    Ok(out)
}

fn norm_battery(cases: usize, seed: RngSeed) -> Result<Vec<PropertyResult>> {
    let mut ordering = PropertyResult::new("norm_ordering", 1.0);
    let mut rank_bound = PropertyResult::new("nuclear_rank_bound", 1.0);
    let mut triangle = PropertyResult::new("norm_triangle", 1.0);
    let mut rng = seed.rng();
    for _ in 0..cases {
        let rows = rng.random_range(1..=15);
        let cols = rng.random_range(1..=15);
        let a = uniform_matrix(&mut rng, rows, cols, 1.0);
        let b = uniform_matrix(&mut rng, rows, cols, 1.0);
        let (s, f, nuc) = (linalg::spectral_norm(&a)?, linalg::frobenius_norm(&a), linalg::nuclear_norm(&a)?);
        let tol = NUMERICAL_SLACK * (1.0 + nuc);
        ordering.record(s <= f + tol && f <= nuc + tol);
        let r = linalg::numerical_rank(&a, DEFAULT_RANK_TOL)? as f64;
        let cap = rows.min(cols) as f64 * (rows.max(cols) as f64).sqrt();
        rank_bound.record(nuc <= r.sqrt() * f + tol && nuc <= cap + tol);
        let sum = a.add(&b)?;
        triangle.record(
            linalg::spectral_norm(&sum)? <= s + linalg::spectral_norm(&b)? + tol
                && linalg::nuclear_norm(&sum)? <= nuc + linalg::nuclear_norm(&b)? + tol,
        );
    }
    Ok(vec![ordering, rank_bound, triangle])
}

/// Generator and fixture certificates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fixture {
    /// A blockmodel probability matrix with at most `k` blocks.
    Blockmodel { k: usize, matrix: Vec<Vec<f64>> },
    /// A rank-`rank` matrix with entries in `[-1, 1]`.
    LowRank { rank: usize, matrix: Vec<Vec<f64>> },
    Correlation { matrix: Vec<Vec<f64>> },
    Distance { matrix: Vec<Vec<f64>> },
    /// Win probabilities; strength order is taken from row sums.
    Tournament { matrix: Vec<Vec<f64>> },
}

pub fn blockmodel_certificate(m: &DenseMatrix, k: usize) -> Result<bool> {
    Ok(linalg::numerical_rank(m, 1e-8)? <= k)
}

pub fn low_rank_certificate(m: &DenseMatrix, r: usize) -> Result<bool> {
    let bound = ((r * m.rows() * m.cols()) as f64).sqrt();
    Ok(m.max_abs() <= 1.0 && linalg::nuclear_norm(m)? <= bound * (1.0 + NUMERICAL_SLACK))
}

pub fn psd_certificate(m: &DenseMatrix) -> Result<bool> {
    if !m.is_symmetric() {
        return Ok(false);
    }
    let eig = linalg::symmetric_eigenvalues(m)?;
    Ok(eig.first().is_some_and(|&l| l >= -1e-8))
}

pub fn triangle_certificate(d: &DenseMatrix) -> bool {
    let n = d.rows();
    if !d.is_square() || !d.is_symmetric() {
        return false;
    }
    (0..n).all(|i| {
        d.get(i, i) == 0.0
            && (0..n).all(|j| (0..n).all(|k| d.get(i, k) <= d.get(i, j) + d.get(j, k) + 1e-12))
    })
}

pub fn tournament_certificate(model: &TournamentModel) -> (bool, bool) {
    (model.is_complementary(1e-12), model.is_monotone())
}

fn generator_battery(draws: usize, n: usize, seed: RngSeed) -> Result<Vec<PropertyResult>> {
    let mut block = PropertyResult::new("blockmodel_rank", 1.0);
    let mut low = PropertyResult::new("low_rank_nuclear", 1.0);
    let mut psd = PropertyResult::new("correlation_psd", 1.0);
    let mut tri = PropertyResult::new("distance_triangle", 1.0);
    let mut comp = PropertyResult::new("tournament_complementary", 1.0);
    let mut mono = PropertyResult::new("tournament_monotone", 1.0);
    for d in 0..draws {
        let s = |tag: u64| seed.derive(&[d as u64, tag]);
        let k = 1 + d % 5;
        let probs = gen::assortative_blocks(k, 0.7, 0.1);
        block.record(blockmodel_certificate(&gen::gen_blockmodel(n, &probs, None, s(0))?.m, k)?);
        let r = 1 + d % 4;
        low.record(low_rank_certificate(&gen::gen_low_rank(n, n + 7, r, s(1))?, r)?);
        psd.record(psd_certificate(&gen::gen_correlation_matrix(n, s(2))?)?);
        let dim = 1 + d % 3;
        tri.record(triangle_certificate(&gen::gen_random_distance_matrix(n, dim, gen::Metric::Euclidean, s(3))?.0));
        let family = if d % 2 == 0 {
            TournamentFamily::NonparametricMonotone
        } else {
            let mut rng = s(4).rng();
            TournamentFamily::Parametric { strengths: (0..n).map(|_| 0.1 + rng.random::<f64>()).collect() }
        };
        let (c, m) = tournament_certificate(&gen::gen_bradley_terry(n, &family, s(5))?);
        comp.record(c);
        mono.record(m);
    }
    Ok(vec![block, low, psd, tri, comp, mono])
}

/// Checks a single fixture; the property is named after the fixture kind.
pub fn check_fixture(fixture: &Fixture) -> Result<SuiteReport> {
    let mut properties = Vec::new();
    let mut single = |name: &str, ok: bool| {
        let mut r = PropertyResult::new(name, 1.0);
        r.record(ok);
        properties.push(r);
    };
    match fixture {
        Fixture::Blockmodel { k, matrix } => {
            single("blockmodel_rank", blockmodel_certificate(&DenseMatrix::from_rows(matrix)?, *k)?)
        }
        Fixture::LowRank { rank, matrix } => {
            single("low_rank_nuclear", low_rank_certificate(&DenseMatrix::from_rows(matrix)?, *rank)?)
        }
        Fixture::Correlation { matrix } => single("correlation_psd", psd_certificate(&DenseMatrix::from_rows(matrix)?)?),
        Fixture::Distance { matrix } => single("distance_triangle", triangle_certificate(&DenseMatrix::from_rows(matrix)?)),
        Fixture::Tournament { matrix } => {
            let p = DenseMatrix::from_rows(matrix)?;
            if !p.is_square() {
                return Err(Error::Shape("tournament matrix must be square".into()));
            }
            let n = p.rows();
            let sums: Vec<f64> = (0..n).map(|i| p.row(i).iter().sum()).collect();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| sums[b].total_cmp(&sums[a]));
            let (c, m) = tournament_certificate(&TournamentModel { p, strength_order: order });
            single("tournament_complementary", c);
            single("tournament_monotone", m);
        }
    }
    Ok(SuiteReport { properties })
}
