//! The universal singular value thresholding (USVT) estimator.
//!
//! Given a partially observed data matrix whose entries are bounded and have
//! the unknown parameter matrix as their mean, the estimator
//!
//! 1. rescales the known value interval `[a, b]` onto `[-1, 1]`,
//! 2. zero-fills the unobserved entries,
//! 3. keeps the singular triples with `s_i ≥ (2+η)√(n p̂)`,
//! 4. divides their sum by the observed fraction `p̂`,
//! 5. clips to `[-1, 1]` and maps back to `[a, b]`.
//!
//! Wide orientation is enforced by transposing tall inputs, so `n` is always
//! the larger dimension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix, SvdFactorization};

/// How the observations relate across the diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryMode {
    /// Every entry is observed independently.
    Asymmetric,
    /// `X` and `M` are symmetric; entries on and above the diagonal are independent.
    Symmetric,
    /// `X - M` is skew-symmetric; `X` itself need not be.
    SkewSymmetric,
}

impl SymmetryMode {
    pub fn requires_square(self) -> bool {
        !matches!(self, SymmetryMode::Asymmetric)
    }
}

/// Boolean observation pattern; `true` marks an observed entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mask {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn filled(rows: usize, cols: usize, observed: bool) -> Self {
        Self {
            rows,
            cols,
            data: vec![observed; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, observed: bool) {
        self.data[i * self.cols + j] = observed;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Observed entries with `i <= j`.
    pub fn count_upper(&self) -> usize {
        (0..self.rows)
            .map(|i| (i..self.cols).filter(|&j| self.get(i, j)).count())
            .sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }
}

/// A data matrix together with its observation mask and symmetry mode.
///
/// Values at unobserved positions are ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskedMatrix {
    values: DenseMatrix,
    mask: Mask,
    mode: SymmetryMode,
}

impl MaskedMatrix {
    pub fn new(values: DenseMatrix, mask: Mask, mode: SymmetryMode) -> Result<Self> {
        if values.shape() != mask.shape() {
            return Err(Error::Shape(format!(
                "mask is {:?} but values are {:?}",
                mask.shape(),
                values.shape()
            )));
        }
        if mode.requires_square() {
            if !values.is_square() {
                return Err(Error::Shape(format!("{mode:?} mode needs a square matrix")));
            }
            if !mask.is_symmetric() {
                return Err(Error::InvalidArgument(format!(
                    "{mode:?} mode needs a symmetric mask"
                )));
            }
        }
        if mode == SymmetryMode::Symmetric {
            let n = values.rows();
            for i in 0..n {
                for j in i + 1..n {
                    if mask.get(i, j) && values.get(i, j) != values.get(j, i) {
                        return Err(Error::InvalidArgument(format!(
                            "symmetric mode: value at ({i}, {j}) differs from ({j}, {i})"
                        )));
                    }
                }
            }
        }
        Ok(Self { values, mask, mode })
    }

    /// Every entry observed.
    pub fn fully_observed(values: DenseMatrix, mode: SymmetryMode) -> Result<Self> {
        let (r, c) = values.shape();
        Self::new(values, Mask::filled(r, c, true), mode)
    }

    pub fn values(&self) -> &DenseMatrix {
        &self.values
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn mode(&self) -> SymmetryMode {
        self.mode
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }

    /// Observed value at `(i, j)`, if any.
    pub fn observed(&self, i: usize, j: usize) -> Option<f64> {
        self.mask.get(i, j).then(|| self.values.get(i, j))
    }

    /// Fraction of observed entries: over the whole matrix in asymmetric mode,
    /// over the entries on and above the diagonal otherwise.
    pub fn observed_fraction(&self) -> f64 {
        let (m, n) = self.shape();
        match self.mode {
            SymmetryMode::Asymmetric => self.mask.count() as f64 / (m * n) as f64,
            _ => self.mask.count_upper() as f64 / (n * (n + 1) / 2) as f64,
        }
    }

    /// Transposed data; only meaningful (and only allowed) in asymmetric mode.
    pub fn transpose(&self) -> Result<Self> {
        if self.mode != SymmetryMode::Asymmetric {
            return Err(Error::InvalidArgument("only asymmetric data can be transposed".into()));
        }
        Ok(Self {
            values: self.values.transpose(),
            mask: self.mask.transpose(),
            mode: self.mode,
        })
    }

    /// Applies `f` to every value (observed or not).
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.map(f), self.mask.clone(), self.mode)
    }
}

/// A closed value range `[lo, hi]` with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Default for Interval {
    fn default() -> Self {
        Self { lo: -1.0, hi: 1.0 }
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// `[0, 1]`, the natural range for probabilities and adjacency data.
    pub fn unit() -> Self {
        Self { lo: 0.0, hi: 1.0 }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn midpoint(&self) -> f64 {
        (self.lo + self.hi) / 2.0
    }

    pub fn half_width(&self) -> f64 {
        (self.hi - self.lo) / 2.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Maps `[lo, hi]` onto `[-1, 1]`.
    pub fn normalize(&self, x: f64) -> f64 {
        (x - self.midpoint()) / self.half_width()
    }

    /// Maps `[-1, 1]` back onto `[lo, hi]`, clamping away rounding overshoot.
    pub fn denormalize(&self, x: f64) -> f64 {
        (x * self.half_width() + self.midpoint()).clamp(self.lo, self.hi)
    }
}

/// Everything the estimator needs besides the data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    eta: f64,
    sigma_sq: Option<f64>,
    interval: Option<Interval>,
    mode: SymmetryMode,
}

impl EstimatorConfig {
    /// `eta` must lie in `(0, 1)`. There is deliberately no default.
    pub fn new(eta: f64, mode: SymmetryMode) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::InvalidArgument(format!("eta = {eta} must lie in (0, 1)")));
        }
        Ok(Self {
            eta,
            sigma_sq: None,
            interval: None,
            mode,
        })
    }

    /// Like [`EstimatorConfig::new`] but also admits `eta = 0`, which works
    /// well in simulations but carries no error guarantee.
    pub fn exploratory(eta: f64, mode: SymmetryMode) -> Result<Self> {
        if eta == 0.0 {
            return Ok(Self {
                eta,
                sigma_sq: None,
                interval: None,
                mode,
            });
        }
        Self::new(eta, mode)
    }

    /// Known bound on `Var(x_ij)`, expressed on the normalized `[-1, 1]` scale.
    pub fn with_sigma_sq(mut self, sigma_sq: f64) -> Result<Self> {
        if !(sigma_sq > 0.0 && sigma_sq <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "sigma_sq = {sigma_sq} must lie in (0, 1]"
            )));
        }
        self.sigma_sq = Some(sigma_sq);
        Ok(self)
    }

    pub fn with_interval(mut self, interval: Interval) -> Self {
        self.interval = Some(interval);
        self
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn sigma_sq(&self) -> Option<f64> {
        self.sigma_sq
    }

    pub fn mode(&self) -> SymmetryMode {
        self.mode
    }

    /// The configured interval, or `[-1, 1]`.
    pub fn interval(&self) -> Interval {
        self.interval.unwrap_or_default()
    }
}

/// Estimate plus the quantities computed along the way.
#[derive(Clone, Debug)]
pub struct EstimateReport {
    pub estimate: DenseMatrix,
    pub p_hat: f64,
    pub q_hat: Option<f64>,
    pub threshold: f64,
    /// Indices (into the descending singular values) that cleared the threshold.
    pub retained_indices: Vec<usize>,
    pub retained_rank: usize,
    /// The larger dimension, used in the threshold.
    pub n: usize,
    /// The computation ran on the transpose.
    pub transposed: bool,
    /// No entry was observed; the estimate is the interval midpoint.
    pub no_data: bool,
}

/// Serializable summary of an [`EstimateReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateDiagnostics {
    pub schema: u32,
    pub rows: usize,
    pub cols: usize,
    pub n: usize,
    pub p_hat: f64,
    pub q_hat: Option<f64>,
    pub threshold: f64,
    pub retained_rank: usize,
    pub retained_indices: Vec<usize>,
    pub transposed: bool,
    pub no_data: bool,
}

impl EstimateReport {
    pub fn diagnostics(&self) -> EstimateDiagnostics {
        EstimateDiagnostics {
            schema: 1,
            rows: self.estimate.rows(),
            cols: self.estimate.cols(),
            n: self.n,
            p_hat: self.p_hat,
            q_hat: self.q_hat,
            threshold: self.threshold,
            retained_rank: self.retained_rank,
            retained_indices: self.retained_indices.clone(),
            transposed: self.transposed,
            no_data: self.no_data,
        }
    }
}

/// `q̂ = p̂σ² + p̂(1-p̂)(1-σ²)`.
pub fn variance_proxy(p_hat: f64, sigma_sq: f64) -> f64 {
    p_hat * sigma_sq + p_hat * (1.0 - p_hat) * (1.0 - sigma_sq)
}

/// `(2+η)√(n p̂)`, or `(2+η)√(n q̂)` when a variance bound is supplied.
pub fn threshold_value(n: usize, p_hat: f64, eta: f64, sigma_sq: Option<f64>) -> f64 {
    let level = match sigma_sq {
        Some(s) => variance_proxy(p_hat, s),
        None => p_hat,
    };
    (2.0 + eta) * (n as f64 * level).sqrt()
}

/// Entrywise clamp to `[lo, hi]`.
pub fn clip_to_interval(a: &DenseMatrix, interval: Interval) -> DenseMatrix {
    a.map(|x| x.clamp(interval.lo(), interval.hi()))
}

fn check_observed_range(data: &MaskedMatrix, interval: Interval) -> Result<()> {
    let (m, n) = data.shape();
    for i in 0..m {
        for j in 0..n {
            if let Some(x) = data.observed(i, j) {
                if !interval.contains(x) {
                    return Err(Error::OutOfInterval {
                        row: i,
                        col: j,
                        value: x,
                        lo: interval.lo(),
                        hi: interval.hi(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Zero-filled, interval-normalized data in wide orientation.
struct Prepared {
    y: DenseMatrix,
    p_hat: f64,
    transposed: bool,
}

fn prepare(data: &MaskedMatrix, config: &EstimatorConfig) -> Result<Prepared> {
    if data.mode() != config.mode() {
        return Err(Error::InvalidArgument(format!(
            "data is in {:?} mode but the estimator is configured for {:?}",
            data.mode(),
            config.mode()
        )));
    }
    let interval = config.interval();
    check_observed_range(data, interval)?;
    let (m, n) = data.shape();
    let transposed = m > n;
    let y = if transposed {
        DenseMatrix::from_fn(n, m, |i, j| data.observed(j, i).map_or(0.0, |x| interval.normalize(x)))
    } else {
        DenseMatrix::from_fn(m, n, |i, j| data.observed(i, j).map_or(0.0, |x| interval.normalize(x)))
    };
    Ok(Prepared {
        y,
        p_hat: data.observed_fraction(),
        transposed,
    })
}

fn orient(matrix: DenseMatrix, transposed: bool) -> DenseMatrix {
    if transposed {
        matrix.transpose()
    } else {
        matrix
    }
}

/// Runs the USVT estimator.
///
/// Observed values must lie in the configured interval (default `[-1, 1]`).
/// With no observed entries the estimate is the interval midpoint and the
/// report is flagged `no_data`.
pub fn usvt_estimate(data: &MaskedMatrix, config: &EstimatorConfig) -> Result<EstimateReport> {
    let interval = config.interval();
    let Prepared { y, p_hat, transposed } = prepare(data, config)?;
    let n = y.cols();
    let (rows, cols) = data.shape();

    if p_hat == 0.0 {
        return Ok(EstimateReport {
            estimate: DenseMatrix::filled(rows, cols, interval.midpoint()),
            p_hat,
            q_hat: config.sigma_sq().map(|s| variance_proxy(0.0, s)),
            threshold: 0.0,
            retained_indices: Vec::new(),
            retained_rank: 0,
            n,
            transposed,
            no_data: true,
        });
    }

    let factorization: SvdFactorization = match config.mode() {
        SymmetryMode::Symmetric => linalg::svd_symmetric(&y)?,
        _ => linalg::svd(&y)?,
    };
    let threshold = threshold_value(n, p_hat, config.eta(), config.sigma_sq());
    let retained: Vec<usize> = factorization
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= threshold)
        .map(|(i, _)| i)
        .collect();

    let mut w = factorization.partial_sum(&retained, 1.0 / p_hat);
    if config.mode() == SymmetryMode::Symmetric {
        w = symmetrize(&w);
    }
    let estimate = w.map(|x| interval.denormalize(x.clamp(-1.0, 1.0)));

    Ok(EstimateReport {
        estimate: orient(estimate, transposed),
        p_hat,
        q_hat: config.sigma_sq().map(|s| variance_proxy(p_hat, s)),
        threshold,
        retained_rank: retained.len(),
        retained_indices: retained,
        n,
        transposed,
        no_data: false,
    })
}

fn symmetrize(w: &DenseMatrix) -> DenseMatrix {
    DenseMatrix::from_fn(w.rows(), w.cols(), |i, j| 0.5 * (w.get(i, j) + w.get(j, i)))
}

/// The trivial estimator: the zero-filled data rescaled by `1/p̂` and clipped
/// to the interval. With every entry observed this is the data itself.
pub fn trivial_estimate(data: &MaskedMatrix, config: &EstimatorConfig) -> Result<DenseMatrix> {
    let interval = config.interval();
    let Prepared { y, p_hat, transposed } = prepare(data, config)?;
    if p_hat == 0.0 {
        let (r, c) = data.shape();
        return Ok(DenseMatrix::filled(r, c, interval.midpoint()));
    }
    let est = y.map(|x| interval.denormalize((x / p_hat).clamp(-1.0, 1.0)));
    Ok(orient(est, transposed))
}

/// `K(δ) = (4+2δ)√(2/δ) + √(2+δ)`.
pub fn key_lemma_constant(delta: f64) -> f64 {
    (4.0 + 2.0 * delta) * (2.0 / delta).sqrt() + (2.0 + delta).sqrt()
}

/// Hard-thresholds the SVD of `a` at `(1+δ)‖a - b‖`: keeps the triples with
/// `σ_i > (1+δ)‖a - b‖` (strictly) and returns their sum. The result is
/// within `K(δ)(‖a - b‖ ‖b‖_*)^{1/2}` of `b` in Frobenius norm.
pub fn key_lemma_estimate(a: &DenseMatrix, b: &DenseMatrix, delta: f64) -> Result<DenseMatrix> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta = {delta} must be positive")));
    }
    let gap = linalg::spectral_norm(&a.sub(b)?)?;
    let f = linalg::svd(a)?;
    let cut = (1.0 + delta) * gap;
    let keep: Vec<usize> = (0..f.rank_capacity())
        .filter(|&i| f.singular_values[i] > cut)
        .collect();
    Ok(f.partial_sum(&keep, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius_norm;

    fn cfg(eta: f64) -> EstimatorConfig {
        EstimatorConfig::new(eta, SymmetryMode::Asymmetric).unwrap()
    }

    #[test]
    fn threshold_arithmetic() {
        assert!((threshold_value(100, 1.0, 0.01, None) - 20.1).abs() < 1e-12);
        assert!((threshold_value(100, 0.5, 0.01, Some(0.0)) - 10.05).abs() < 1e-12);
        for p in [0.1, 0.37, 0.9] {
            assert_eq!(threshold_value(50, p, 0.2, Some(1.0)), threshold_value(50, p, 0.2, None));
        }
        assert_eq!(variance_proxy(0.5, 0.0), 0.25);
    }

    #[test]
    fn clip_examples() {
        let a = DenseMatrix::from_rows(&[vec![3.0, -0.5], vec![-7.0, 1.0]]).unwrap();
        let c = clip_to_interval(&a, Interval::default());
        assert_eq!(c.as_slice(), &[1.0, -0.5, -1.0, 1.0]);
        let c = clip_to_interval(&a, Interval::unit());
        assert_eq!(c.as_slice(), &[1.0, 0.0, 0.0, 1.0]);
        let inside = DenseMatrix::filled(2, 3, 0.25);
        assert_eq!(clip_to_interval(&inside, Interval::default()), inside);
    }

    #[test]
    fn config_validation() {
        assert!(EstimatorConfig::new(0.0, SymmetryMode::Asymmetric).is_err());
        assert!(EstimatorConfig::new(1.0, SymmetryMode::Asymmetric).is_err());
        assert!(EstimatorConfig::exploratory(0.0, SymmetryMode::Asymmetric).is_ok());
        assert!(cfg(0.1).with_sigma_sq(0.0).is_err());
        assert!(cfg(0.1).with_sigma_sq(1.5).is_err());
        assert!(Interval::new(1.0, 1.0).is_err());
    }

    #[test]
    fn zero_data_gives_zero_estimate() {
        let data = MaskedMatrix::fully_observed(DenseMatrix::zeros(10, 10), SymmetryMode::Asymmetric)
            .unwrap();
        let r = usvt_estimate(&data, &cfg(0.01)).unwrap();
        assert_eq!(r.estimate, DenseMatrix::zeros(10, 10));
        assert!(r.retained_indices.is_empty());
        assert_eq!(r.p_hat, 1.0);
    }

    #[test]
    fn all_ones_is_recovered_exactly() {
        let ones = DenseMatrix::filled(100, 100, 1.0);
        let data = MaskedMatrix::fully_observed(ones.clone(), SymmetryMode::Asymmetric).unwrap();
        let r = usvt_estimate(&data, &cfg(0.01)).unwrap();
        assert!((r.threshold - 20.1).abs() < 1e-12);
        assert_eq!(r.retained_indices, vec![0]);
        assert!(frobenius_norm(&r.estimate.sub(&ones).unwrap()) < 1e-10);
    }

    #[test]
    fn no_observations_gives_midpoint() {
        let values = DenseMatrix::filled(4, 6, 0.3);
        let data = MaskedMatrix::new(values, Mask::filled(4, 6, false), SymmetryMode::Asymmetric)
            .unwrap();
        let r = usvt_estimate(&data, &cfg(0.01)).unwrap();
        assert!(r.no_data);
        assert_eq!(r.p_hat, 0.0);
        assert_eq!(r.threshold, 0.0);
        assert_eq!(r.estimate, DenseMatrix::zeros(4, 6));

        let shifted = cfg(0.01).with_interval(Interval::new(2.0, 4.0).unwrap());
        let values = DenseMatrix::filled(3, 3, 3.5);
        let data = MaskedMatrix::new(values, Mask::filled(3, 3, false), SymmetryMode::Asymmetric)
            .unwrap();
        let r = usvt_estimate(&data, &shifted).unwrap();
        assert_eq!(r.estimate, DenseMatrix::filled(3, 3, 3.0));
    }

    #[test]
    fn rejects_values_outside_interval() {
        let values = DenseMatrix::from_rows(&[vec![0.5, 1.5], vec![0.0, 0.0]]).unwrap();
        let data = MaskedMatrix::fully_observed(values.clone(), SymmetryMode::Asymmetric).unwrap();
        assert!(matches!(
            usvt_estimate(&data, &cfg(0.1)),
            Err(Error::OutOfInterval { row: 0, col: 1, .. })
        ));
        // The same value is fine when it is not observed.
        let mut mask = Mask::filled(2, 2, true);
        mask.set(0, 1, false);
        let data = MaskedMatrix::new(values, mask, SymmetryMode::Asymmetric).unwrap();
        assert!(usvt_estimate(&data, &cfg(0.1)).is_ok());
    }

    #[test]
    fn mode_mismatch_and_shape_checks() {
        let sq = DenseMatrix::zeros(3, 3);
        let data = MaskedMatrix::fully_observed(sq.clone(), SymmetryMode::Symmetric).unwrap();
        assert!(usvt_estimate(&data, &cfg(0.1)).is_err());
        assert!(MaskedMatrix::fully_observed(DenseMatrix::zeros(2, 3), SymmetryMode::Symmetric)
            .is_err());
        let mut mask = Mask::filled(3, 3, true);
        mask.set(0, 2, false);
        assert!(MaskedMatrix::new(sq, mask, SymmetryMode::SkewSymmetric).is_err());
        let asym = DenseMatrix::from_rows(&[vec![0.0, 0.2], vec![0.1, 0.0]]).unwrap();
        assert!(MaskedMatrix::fully_observed(asym.clone(), SymmetryMode::Symmetric).is_err());
        assert!(MaskedMatrix::fully_observed(asym, SymmetryMode::SkewSymmetric).is_ok());
    }

    #[test]
    fn symmetric_fraction_counts_upper_triangle() {
        let mut mask = Mask::filled(3, 3, false);
        for (i, j) in [(0, 0), (0, 2), (2, 0)] {
            mask.set(i, j, true);
        }
        let data = MaskedMatrix::new(DenseMatrix::zeros(3, 3), mask, SymmetryMode::Symmetric).unwrap();
        assert!((data.observed_fraction() - 2.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn tall_input_runs_on_transpose() {
        let values = DenseMatrix::from_fn(30, 8, |i, j| ((i * 7 + j * 3) % 5) as f64 / 5.0 - 0.4);
        let data = MaskedMatrix::fully_observed(values, SymmetryMode::Asymmetric).unwrap();
        let r = usvt_estimate(&data, &cfg(0.05)).unwrap();
        assert!(r.transposed);
        assert_eq!(r.n, 30);
        assert_eq!(r.estimate.shape(), (30, 8));
    }

    #[test]
    fn key_lemma_constant_values() {
        assert!((key_lemma_constant(2.0) - 10.0).abs() < 1e-12);
        assert!((key_lemma_constant(0.5) - (10.0 + 2.5_f64.sqrt())).abs() < 1e-12);
        assert!((key_lemma_constant(0.5) - 11.5811).abs() < 1e-4);
    }

    #[test]
    fn key_lemma_degenerate_cases() {
        let a = DenseMatrix::from_fn(5, 7, |i, j| ((i + 2 * j) % 4) as f64 - 1.5);
        let same = key_lemma_estimate(&a, &a, 1.0).unwrap();
        assert!(frobenius_norm(&same.sub(&a).unwrap()) < 1e-10);
        let zero = key_lemma_estimate(&a, &DenseMatrix::zeros(5, 7), 1.0).unwrap();
        assert_eq!(zero, DenseMatrix::zeros(5, 7));
        assert!(key_lemma_estimate(&a, &a, 0.0).is_err());
    }
}
