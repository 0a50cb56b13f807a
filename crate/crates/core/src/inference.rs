//! Largest-root tests, spiked-model predictions, canonical correlations.

use crate::error::{Error, Result};
use crate::laws::{center_scale, CenterScale, Dims, EnsembleCase, Field};
use crate::linalg::{cholesky, generalized_eig, lower_solve_matrix, sym_eig, Matrix};
use crate::specfun::TwDistribution;

/// Outcome of a largest-root test.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub case: EnsembleCase,
    /// `n l1` for single Wishart, the root itself for double Wishart.
    pub raw_statistic: f64,
    pub standardized: f64,
    /// `1 - F_beta(standardized)`.
    pub p_value: f64,
    pub center_scale: CenterScale,
}

/// Tracy-Widom largest-root test.
///
/// For single Wishart `l1_hat` is the top eigenvalue of `S = X X^T / n` and
/// the statistic is `n l1_hat`; for double Wishart it is the top root of
/// `det(x (A + B) - A) = 0`, in `(0, 1)`. Real cases use `F1`, complex
/// cases `F2`.
pub fn largest_root_test(case: &EnsembleCase, l1_hat: f64) -> Result<TestResult> {
    let raw_statistic = match case.dims {
        Dims::Single { n, .. } => {
            if !(l1_hat.is_finite() && l1_hat >= 0.0) {
                return Err(Error::domain(format!(
                    "largest_root_test: eigenvalue {l1_hat} must be finite and nonnegative"
                )));
            }
            n as f64 * l1_hat
        }
        Dims::Double { .. } => {
            if !(l1_hat > 0.0 && l1_hat < 1.0) {
                return Err(Error::domain(format!(
                    "largest_root_test: double-Wishart root {l1_hat} must lie in (0, 1)"
                )));
            }
            l1_hat
        }
    };
    let cs = center_scale(case)?;
    let standardized = cs.standardize(raw_statistic);
    let tw = TwDistribution::shared(case.beta())?;
    Ok(TestResult {
        case: *case,
        raw_statistic,
        standardized,
        p_value: tw.sf(standardized).clamp(0.0, 1.0),
        center_scale: cs,
    })
}

/// Subtracts each row's mean.
pub fn center_rows(x: &Matrix) -> Matrix {
    let mut out = x.clone();
    for i in 0..out.rows() {
        let row = out.row_mut(i);
        let mean = row.iter().sum::<f64>() / row.len() as f64;
        row.iter_mut().for_each(|v| *v -= mean);
    }
    out
}

/// Largest eigenvalue of `X X^T` for a `p x n` matrix, using the smaller of
/// the two Gram matrices.
pub fn top_gram_eigenvalue(x: &Matrix) -> Result<f64> {
    let gram = if x.rows() <= x.cols() {
        x.row_gram()
    } else {
        x.col_gram()
    };
    Ok(sym_eig(&gram, false)?.values[0])
}

/// Single-Wishart real test on a `p x n` data matrix (variables in rows).
///
/// With `centered`, row means are removed and the test uses `n - 1`
/// degrees of freedom.
pub fn single_test_from_data(x: &Matrix, centered: bool) -> Result<TestResult> {
    let (p, n) = (x.rows(), x.cols());
    let dof = if centered { n.saturating_sub(1) } else { n };
    if p < 1 || dof < 1 {
        return Err(Error::domain(format!(
            "single test: need p >= 1 and at least {} observations",
            if centered { 2 } else { 1 }
        )));
    }
    let data = if centered { center_rows(x) } else { x.clone() };
    let top = top_gram_eigenvalue(&data)?;
    let case = EnsembleCase::single(Field::Real, dof, p)?;
    largest_root_test(&case, top / dof as f64)
}

/// Double-Wishart real test of independence between a `p x n` block and a
/// `q x n` block, through the largest squared canonical correlation.
/// Blocks are centered, so `B` has `n - 1 - q` degrees of freedom.
pub fn double_test_from_data(x: &Matrix, y: &Matrix) -> Result<TestResult> {
    let (p, q, n) = (x.rows(), y.rows(), x.cols());
    let r2 = canonical_correlations(x, y)?;
    let (small, large) = if p <= q { (p, q) } else { (q, p) };
    let case = EnsembleCase::double(Field::Real, large, n - 1 - large, small)?;
    let root = r2[0].clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON);
    largest_root_test(&case, root)
}

/// Squared sample canonical correlations of two blocks with observations
/// in columns, descending; `min(p, q)` values in `[0, 1]`.
///
/// With `S` the centered cross-product blocks, the roots solve
/// `A v = r^2 (A + B) v` with `A = S_xy S_yy^{-1} S_yx`, `A + B = S_xx`
/// (after swapping blocks so that `p <= q`).
pub fn canonical_correlations(x: &Matrix, y: &Matrix) -> Result<Vec<f64>> {
    if x.cols() != y.cols() {
        return Err(Error::domain(format!(
            "canonical_correlations: blocks have {} and {} observations",
            x.cols(),
            y.cols()
        )));
    }
    let (x, y) = if x.rows() <= y.rows() { (x, y) } else { (y, x) };
    let (p, q, n) = (x.rows(), y.rows(), x.cols());
    if p < 1 || n <= p + q {
        return Err(Error::domain(format!(
            "canonical_correlations: need n > p + q (n = {n}, p = {p}, q = {q})"
        )));
    }
    if !(x.is_finite() && y.is_finite()) {
        return Err(Error::domain("canonical_correlations: non-finite data"));
    }
    let xc = center_rows(x);
    let yc = center_rows(y);
    let sxx = xc.row_gram();
    let syy = yc.row_gram();
    let syx = yc.matmul(&xc.transpose())?;
    let rank_error = |e: Error, which: &str| match e {
        Error::NotPositiveDefinite { .. } => Error::numerical(format!(
            "canonical_correlations: {which} block covariance is rank deficient"
        )),
        other => other,
    };
    let ly = cholesky(&syy).map_err(|e| rank_error(e, "second"))?;
    let w = lower_solve_matrix(&ly, &syx);
    let a = w.col_gram();
    let roots = generalized_eig(&a, &sxx).map_err(|e| rank_error(e, "first"))?;
    Ok(roots.values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
}

/// Covariance `diag(l1, ..., lM, s2, ..., s2)` with aspect ratio `gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikedModel {
    pub gamma: f64,
    pub base_var: f64,
    pub spikes: Vec<f64>,
}

impl SpikedModel {
    pub fn new(gamma: f64, base_var: f64, spikes: Vec<f64>) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::domain(format!("spiked model: gamma = {gamma} must be >= 0")));
        }
        if !(base_var.is_finite() && base_var > 0.0) {
            return Err(Error::domain(format!(
                "spiked model: base variance {base_var} must be positive"
            )));
        }
        if spikes.iter().any(|l| !(l.is_finite() && *l > base_var)) {
            return Err(Error::domain(
                "spiked model: spikes must be finite and exceed the base variance",
            ));
        }
        if spikes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain("spiked model: spikes must be descending"));
        }
        Ok(SpikedModel {
            gamma,
            base_var,
            spikes,
        })
    }

    /// `lambda = l / base_var - 1` for each spike.
    pub fn lambdas(&self) -> Vec<f64> {
        self.spikes.iter().map(|l| l / self.base_var - 1.0).collect()
    }

    fn spike(&self, which: usize) -> Result<f64> {
        self.spikes.get(which).copied().ok_or_else(|| {
            Error::domain(format!(
                "spiked model: spike {which} requested, model has {}",
                self.spikes.len()
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluctuationLaw {
    TracyWidom,
    Gaussian,
}

/// Predicted behaviour of a top sample eigenvalue, in covariance units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikePrediction {
    pub regime: Regime,
    /// `base_var (1 + sqrt(gamma))`.
    pub threshold: f64,
    pub mean: f64,
    /// Standard deviation of the sample eigenvalue at sample size `n`.
    /// Zero at the critical point; `None` elsewhere when `n` is not given.
    /// In the Gaussian regime this is the complex-data value; see
    /// [`sd_real_data`](Self::sd_real_data).
    pub sd: Option<f64>,
    /// `base_var sigma(l)`: the standard deviation of `sqrt(n)` times the
    /// sample eigenvalue in the Gaussian regime (complex data), 0 otherwise.
    pub limit_sd: f64,
    /// No law is attached at the critical point.
    pub fluctuation_law: Option<FluctuationLaw>,
}

impl SpikePrediction {
    /// [`sd`](Self::sd) for real Gaussian data: the Gaussian-regime variance
    /// is twice the complex one, `2 l^2 (1 - gamma / (l - 1)^2) / n`.
    pub fn sd_real_data(&self) -> Option<f64> {
        match self.regime {
            Regime::Supercritical => self.sd.map(|s| s * std::f64::consts::SQRT_2),
            _ => self.sd,
        }
    }
}

/// Relative width of the band treated as the critical point.
const CRITICAL_BAND: f64 = 1e-12;

/// Phase-transition prediction for spike `which`.
///
/// Supercritical spikes `l > 1 + sqrt(gamma)` (in base-variance units)
/// give Gaussian fluctuations with mean `l (1 + gamma / (l - 1))` and
/// variance `l^2 (1 - gamma / (l - 1)^2) / n`. Below the threshold the top
/// eigenvalue sticks to the bulk edge `(1 + sqrt(gamma))^2` with
/// Tracy-Widom fluctuations of size `sigma_np / n`.
pub fn spike_predict(model: &SpikedModel, which: usize, n: Option<usize>) -> Result<SpikePrediction> {
    let ell = model.spike(which)? / model.base_var;
    if ell <= 1.0 {
        return Err(Error::domain(format!(
            "spike_predict: spike {ell} is not above the base variance"
        )));
    }
    if n == Some(0) {
        return Err(Error::domain("spike_predict: n must be positive"));
    }
    let g = model.gamma;
    let threshold = 1.0 + g.sqrt();
    let s2 = model.base_var;
    let regime = if (ell - threshold).abs() <= CRITICAL_BAND * threshold {
        Regime::Critical
    } else if ell < threshold {
        Regime::Subcritical
    } else {
        Regime::Supercritical
    };
    let pred = match regime {
        Regime::Critical => SpikePrediction {
            regime,
            threshold: threshold * s2,
            mean: threshold * threshold * s2,
            sd: Some(0.0),
            limit_sd: 0.0,
            fluctuation_law: None,
        },
        Regime::Subcritical => {
            let sd = match n {
                Some(n) => {
                    let p = ((g * n as f64).round() as usize).max(1);
                    let cs = center_scale(&EnsembleCase::single(Field::Real, n, p)?)?;
                    let (_, tw_sd) = TwDistribution::shared(1)?.mean_sd();
                    Some(cs.sigma / n as f64 * tw_sd * s2)
                }
                None => None,
            };
            SpikePrediction {
                regime,
                threshold: threshold * s2,
                mean: threshold * threshold * s2,
                sd,
                limit_sd: 0.0,
                fluctuation_law: Some(FluctuationLaw::TracyWidom),
            }
        }
        Regime::Supercritical => {
            let mean = ell * (1.0 + g / (ell - 1.0));
            let limit = ell * (1.0 - g / (ell - 1.0).powi(2)).max(0.0).sqrt();
            SpikePrediction {
                regime,
                threshold: threshold * s2,
                mean: mean * s2,
                sd: n.map(|n| limit / (n as f64).sqrt() * s2),
                limit_sd: limit * s2,
                fluctuation_law: Some(FluctuationLaw::Gaussian),
            }
        }
    };
    Ok(pred)
}

/// Limiting overlap between sample and population eigenvectors:
/// 0 for `lambda <= sqrt(gamma)`, else
/// `(1 - gamma / lambda^2) / (1 + gamma / lambda)`.
pub fn overlap_from_lambda(gamma: f64, lambda: f64) -> f64 {
    if !(lambda > gamma.sqrt()) {
        return 0.0;
    }
    if lambda.is_infinite() {
        return 1.0;
    }
    ((1.0 - gamma / (lambda * lambda)) / (1.0 + gamma / lambda)).clamp(0.0, 1.0)
}

/// [`overlap_from_lambda`] for spike `which` of `model`.
pub fn overlap_limit(model: &SpikedModel, which: usize) -> Result<f64> {
    let lambda = model.spike(which)? / model.base_var - 1.0;
    Ok(overlap_from_lambda(model.gamma, lambda))
}

/// `|| a - sign(<a, b>) b ||^2` for unit vectors; `4 sin^2(angle / 2)`.
pub fn loss(theta_hat: &[f64], theta: &[f64]) -> Result<f64> {
    if theta_hat.len() != theta.len() {
        return Err(Error::domain("loss: vectors have different lengths"));
    }
    let na: f64 = theta_hat.iter().map(|v| v * v).sum();
    let nb: f64 = theta.iter().map(|v| v * v).sum();
    if (na.sqrt() - 1.0).abs() > 1e-8 || (nb.sqrt() - 1.0).abs() > 1e-8 {
        return Err(Error::domain("loss: inputs must be unit vectors"));
    }
    let dot: f64 = theta_hat.iter().zip(theta).map(|(a, b)| a * b).sum();
    Ok((na + nb - 2.0 * dot.abs()).max(0.0))
}

/// Population eigenvalues of the four-factor model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownEigenvalues {
    /// Market factor eigenvalue `p sf^2 (sb^2 + 4 beta) + se^2`.
    pub ell1: f64,
    /// Common value of `l2 = l3 = l4`, `p sf^2 sb^2 + se^2`.
    pub ell_rest: f64,
    pub base: f64,
}

impl BrownEigenvalues {
    /// `[l1, l2, l3, l4]`.
    pub fn spikes(&self) -> [f64; 4] {
        [self.ell1, self.ell_rest, self.ell_rest, self.ell_rest]
    }
}

pub fn brown_population_eigs(
    p: usize,
    beta_f: f64,
    sigma_b: f64,
    sigma_f: f64,
    sigma_e: f64,
) -> Result<BrownEigenvalues> {
    for (name, v) in [
        ("beta", beta_f),
        ("sigma_b", sigma_b),
        ("sigma_f", sigma_f),
        ("sigma_e", sigma_e),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::domain(format!(
                "brown_population_eigs: {name} = {v} must be finite and nonnegative"
            )));
        }
    }
    if p < 1 {
        return Err(Error::domain("brown_population_eigs: p must be positive"));
    }
    let common = p as f64 * sigma_f * sigma_f;
    let base = sigma_e * sigma_e;
    Ok(BrownEigenvalues {
        ell1: common * (sigma_b * sigma_b + 4.0 * beta_f) + base,
        ell_rest: common * sigma_b * sigma_b + base,
        base,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detectability {
    /// `ell > se^2 (1 + sqrt(p / T))`, strictly.
    pub detectable: bool,
    pub threshold: f64,
    /// Bulk edge `se^2 (1 + sqrt(p / T))^2`.
    pub mp_edge: f64,
}

pub fn detectability(p: usize, t: usize, sigma_e: f64, ell: f64) -> Result<Detectability> {
    if p < 1 || t < 1 {
        return Err(Error::domain("detectability: p and T must be positive"));
    }
    let r = 1.0 + (p as f64 / t as f64).sqrt();
    let base = sigma_e * sigma_e;
    let threshold = base * r;
    Ok(Detectability {
        detectable: ell > threshold,
        threshold,
        mp_edge: base * r * r,
    })
}
