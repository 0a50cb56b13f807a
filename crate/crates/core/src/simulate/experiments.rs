//! The Monte Carlo experiments: null largest roots, Marcenko-Pastur
//! spectra, spiked models and the four-factor market model.

use crate::error::{Error, Result};
use crate::inference::{
    brown_population_eigs, detectability, overlap_limit, spike_predict, top_gram_eigenvalue,
    BrownEigenvalues, SpikePrediction, SpikedModel,
};
use crate::laws::{center_scale, CenterScale, Dims, EnsembleCase, Field, MpLaw};
use crate::linalg::{generalized_eig, sym_eig, Matrix};
use crate::specfun::TwDistribution;

use super::summary::EmpiricalSummary;
use super::{draw_data_matrix, run_replicates, sample_covariance, Covariance, SimConfig};

/// Null distribution of the standardized largest root.
#[derive(Debug, Clone)]
pub struct LargestRootSim {
    /// The case the statistic was referred to, with degrees of freedom
    /// reduced by one when the data were centered.
    pub effective_case: EnsembleCase,
    pub centered: bool,
    pub center_scale: CenterScale,
    /// Raw statistic per replicate, in replicate order.
    pub raw: Vec<f64>,
    pub standardized: Vec<f64>,
    pub summary: EmpiricalSummary,
    /// KS distance of the standardized statistic to `F_beta`.
    pub ks: f64,
}

/// Simulates the null largest root of a real single- or double-Wishart
/// case.
///
/// Single Wishart: `n` observations of `N_p(0, I)`, statistic the top
/// eigenvalue of `X X^T` (that is `n l1` with `S = X X^T / n`). Double
/// Wishart: `A ~ W_p(n1, I)`, `B ~ W_p(n2, I)` drawn directly, statistic
/// the top root of `det(x (A + B) - A) = 0`; `config.center` does not
/// apply.
pub fn simulate_largest_root(config: &SimConfig, case: &EnsembleCase) -> Result<LargestRootSim> {
    if case.field != Field::Real {
        return Err(Error::domain(
            "simulate_largest_root: only real cases can be simulated",
        ));
    }
    let (raw, effective_case, centered) = match case.dims {
        Dims::Single { n, p } => {
            let center = config.center;
            let dof = if center { n - 1 } else { n };
            let effective = EnsembleCase::single(Field::Real, dof, p)?;
            let raw = run_replicates(config, 0, |_, g| {
                let mut x = draw_data_matrix(p, n, Covariance::Identity, g)?;
                if center {
                    x = crate::inference::center_rows(&x);
                }
                top_gram_eigenvalue(&x)
            })?;
            (raw, effective, center)
        }
        Dims::Double { n1, n2, p } => {
            let raw = run_replicates(config, 0, |_, g| {
                let a = draw_data_matrix(p, n1, Covariance::Identity, g)?.row_gram();
                let b = draw_data_matrix(p, n2, Covariance::Identity, g)?.row_gram();
                Ok(generalized_eig(&a, &a.add(&b)?)?.values[0])
            })?;
            (raw, *case, false)
        }
    };
    let cs = center_scale(&effective_case)?;
    let standardized: Vec<f64> = raw.iter().map(|&x| cs.standardize(x)).collect();
    let summary = EmpiricalSummary::new(standardized.clone())?;
    let tw = TwDistribution::shared(1)?;
    let ks = summary.ks(|s| tw.cdf(s));
    Ok(LargestRootSim {
        effective_case,
        centered,
        center_scale: cs,
        raw,
        standardized,
        summary,
        ks,
    })
}

/// Pooled eigenvalues of null sample covariance matrices.
#[derive(Debug, Clone)]
pub struct MpSim {
    pub n: usize,
    pub p: usize,
    pub law: MpLaw,
    /// Eigenvalues of `S = X X^T / n`, descending within each replicate,
    /// replicates in order.
    pub eigenvalues: Vec<f64>,
    pub summary: EmpiricalSummary,
    /// KS distance of the pooled eigenvalues to the Marcenko-Pastur law
    /// with `gamma = p / n`.
    pub ks: f64,
    /// `l_max / l_min` per replicate (infinite when `S` is singular).
    pub spread: Vec<f64>,
}

pub fn simulate_mp(config: &SimConfig, n: usize, p: usize) -> Result<MpSim> {
    if n < 1 || p < 1 {
        return Err(Error::domain("simulate_mp: n and p must be positive"));
    }
    let law = MpLaw::new(p as f64 / n as f64)?;
    let center = config.center;
    let per_rep = run_replicates(config, 0, |_, g| {
        let mut x = draw_data_matrix(p, n, Covariance::Identity, g)?;
        if center {
            x = crate::inference::center_rows(&x);
        }
        // The nonzero spectrum of X X^T / n from the smaller Gram matrix.
        let gram = if p <= n { x.row_gram() } else { x.col_gram() };
        let mut values = sym_eig(&gram, false)?.values;
        values.iter_mut().for_each(|v| *v = (*v / n as f64).max(0.0));
        values.resize(p, 0.0);
        Ok(values)
    })?;
    let spread = per_rep
        .iter()
        .map(|v| {
            let lo = v[v.len() - 1];
            if lo > 0.0 {
                v[0] / lo
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let eigenvalues: Vec<f64> = per_rep.into_iter().flatten().collect();
    let summary = EmpiricalSummary::new(eigenvalues.clone())?;
    let ks = summary.ks(|t| law.cdf(t));
    Ok(MpSim {
        n,
        p,
        law,
        eigenvalues,
        summary,
        ks,
        spread,
    })
}

/// Which overlap moment the limit formula describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapMoment {
    /// Mean of `|<v, theta>|`.
    Cosine,
    /// Mean of `<v, theta>^2`.
    SquaredCosine,
}

/// Single-spike simulation.
#[derive(Debug, Clone)]
pub struct SpikeSim {
    pub field: Field,
    pub model: SpikedModel,
    pub n: usize,
    pub p: usize,
    /// Top eigenvalue of `S` per replicate.
    pub top: Vec<f64>,
    /// `|<v1, e1>|` per replicate, `v1` the top sample eigenvector (real
    /// data only; empty for complex data).
    pub cosines: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
    pub mean_cosine: Option<f64>,
    pub mean_squared_cosine: Option<f64>,
    pub prediction: SpikePrediction,
    /// Predicted sd of the top eigenvalue for this field.
    pub predicted_sd: Option<f64>,
    pub overlap_limit: f64,
    /// The moment within 2% of [`overlap_limit`](Self::overlap_limit),
    /// the closer one if both are.
    pub overlap_match: Option<OverlapMoment>,
}

/// Rank-one spiked model with unit base variance and real Gaussian data:
/// `p = round(gamma n)` variables, population eigenvector the first
/// coordinate axis.
pub fn simulate_spike(config: &SimConfig, gamma: f64, ell1: f64, n: usize) -> Result<SpikeSim> {
    simulate_spike_in(config, Field::Real, gamma, ell1, n)
}

/// [`simulate_spike`] with real or complex Gaussian data. Complex entries
/// have independent `N(0, 1/2)` real and imaginary parts; eigenvectors are
/// not tracked for them.
pub fn simulate_spike_in(
    config: &SimConfig,
    field: Field,
    gamma: f64,
    ell1: f64,
    n: usize,
) -> Result<SpikeSim> {
    if n < 2 {
        return Err(Error::domain("simulate_spike: n must be at least 2"));
    }
    let p = (gamma * n as f64).round() as usize;
    if p < 1 {
        return Err(Error::domain("simulate_spike: gamma n rounds to zero variables"));
    }
    let model = SpikedModel::new(gamma, 1.0, vec![ell1])?;
    let center = config.center;
    let draws = run_replicates(config, 0, |_, g| match field {
        Field::Real => {
            let x = draw_data_matrix(p, n, Covariance::Spiked(&model), g)?;
            let spec = sym_eig(&sample_covariance(&x, center), true)?;
            let v = spec.vector(0).expect("vectors requested");
            Ok((spec.values[0], v[0].abs()))
        }
        Field::Complex => {
            let w = complex_embedding(p, n, &model, center, g)?;
            Ok((top_gram_eigenvalue(&w)? / n as f64, f64::NAN))
        }
    })?;
    let (top, mut cosines): (Vec<f64>, Vec<f64>) = draws.into_iter().unzip();
    let summary = EmpiricalSummary::new(top.clone())?;
    let limit = overlap_limit(&model, 0)?;
    let (mean_cosine, mean_squared_cosine, overlap_match) = if field == Field::Real {
        let reps = cosines.len() as f64;
        let first = cosines.iter().sum::<f64>() / reps;
        let second = cosines.iter().map(|c| c * c).sum::<f64>() / reps;
        (Some(first), Some(second), adjudicate(limit, first, second))
    } else {
        cosines.clear();
        (None, None, None)
    };
    let prediction = spike_predict(&model, 0, Some(n))?;
    let predicted_sd = match field {
        Field::Real => prediction.sd_real_data(),
        Field::Complex => prediction.sd,
    };
    Ok(SpikeSim {
        field,
        prediction,
        predicted_sd,
        model,
        n,
        p,
        mean: summary.mean(),
        sd: summary.sd(),
        top,
        cosines,
        mean_cosine,
        mean_squared_cosine,
        overlap_limit: limit,
        overlap_match,
    })
}

/// Real `2p x 2n` matrix `[[R, -I], [I, R]]` for complex data `R + iI`.
/// Its Gram matrix carries each eigenvalue of the Hermitian `X X^*` twice.
fn complex_embedding<R: rand::Rng>(
    p: usize,
    n: usize,
    model: &SpikedModel,
    center: bool,
    g: &mut super::Normal<R>,
) -> Result<Matrix> {
    let mut re = draw_data_matrix(p, n, Covariance::Spiked(model), g)?;
    let mut im = draw_data_matrix(p, n, Covariance::Spiked(model), g)?;
    if center {
        re = crate::inference::center_rows(&re);
        im = crate::inference::center_rows(&im);
    }
    let half = std::f64::consts::FRAC_1_SQRT_2;
    Ok(Matrix::from_fn(2 * p, 2 * n, |i, j| {
        let (bi, bj) = (i / p, j / n);
        let (r, c) = (i % p, j % n);
        let v = match (bi, bj) {
            (0, 0) | (1, 1) => re.get(r, c),
            (0, 1) => -im.get(r, c),
            _ => im.get(r, c),
        };
        v * half
    }))
}

fn adjudicate(limit: f64, first: f64, second: f64) -> Option<OverlapMoment> {
    if limit <= 0.0 {
        return None;
    }
    let e1 = (first / limit - 1.0).abs();
    let e2 = (second / limit - 1.0).abs();
    match (e1 <= 0.02, e2 <= 0.02) {
        (false, false) => None,
        (true, false) => Some(OverlapMoment::Cosine),
        (false, true) => Some(OverlapMoment::SquaredCosine),
        (true, true) => Some(if e1 < e2 {
            OverlapMoment::Cosine
        } else {
            OverlapMoment::SquaredCosine
        }),
    }
}

/// Top eigenvalue of `S` under `Sigma = I`, per replicate.
pub fn simulate_null_top(config: &SimConfig, n: usize, p: usize) -> Result<Vec<f64>> {
    if n < 2 || p < 1 {
        return Err(Error::domain("simulate_null_top: need n >= 2 and p >= 1"));
    }
    let center = config.center;
    run_replicates(config, 0, |_, g| {
        let mut x = draw_data_matrix(p, n, Covariance::Identity, g)?;
        if center {
            x = crate::inference::center_rows(&x);
        }
        Ok(top_gram_eigenvalue(&x)? / n as f64)
    })
}

/// How the factor loadings are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loadings {
    /// Loadings chosen so that the population covariance has exactly the
    /// eigenvalues of [`brown_population_eigs`], with the factor directions
    /// along the first coordinate axes.
    Matched,
    /// Market loadings `N(beta, sigma_b^2)`, other loadings
    /// `N(0, sigma_b^2)`, redrawn in every replicate.
    Random,
}

/// Parameters of the four-factor return model
/// `R_kt = sum_nu b_k,nu f_nu,t + e_kt`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModelParams {
    pub beta_f: f64,
    pub sigma_b: f64,
    pub sigma_f: f64,
    pub sigma_e: f64,
    pub num_factors: usize,
    /// Number of periods.
    pub t: usize,
    pub p_grid: Vec<usize>,
    pub loadings: Loadings,
}

impl FactorModelParams {
    /// `beta = 0.6`, `sigma_b = 0.4`, `sigma_f = 0.01257`,
    /// `sigma_e = 0.0671`, four factors, `T = 80`, `p = 50, 75, ..., 200`.
    pub fn harding() -> Self {
        FactorModelParams {
            beta_f: 0.6,
            sigma_b: 0.4,
            sigma_f: 0.01257,
            sigma_e: 0.0671,
            num_factors: 4,
            t: 80,
            p_grid: (50..=200).step_by(25).collect(),
            loadings: Loadings::Matched,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("beta", self.beta_f),
            ("sigma_b", self.sigma_b),
            ("sigma_f", self.sigma_f),
            ("sigma_e", self.sigma_e),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::domain(format!(
                    "factor model: {name} = {v} must be finite and nonnegative"
                )));
            }
        }
        if self.sigma_e <= 0.0 {
            return Err(Error::domain("factor model: sigma_e must be positive"));
        }
        if self.num_factors != 4 {
            return Err(Error::domain("factor model: exactly four factors are supported"));
        }
        if self.t < 2 {
            return Err(Error::domain("factor model: T must be at least 2"));
        }
        if self.p_grid.is_empty() || self.p_grid.iter().any(|&p| p < self.num_factors) {
            return Err(Error::domain("factor model: every p must be at least the factor count"));
        }
        Ok(())
    }
}

/// Number of sample eigenvalues recorded per `p`.
pub const HARDING_TOP: usize = 10;

/// One row of the factor-model experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct HardingRow {
    pub p: usize,
    pub t: usize,
    pub population: BrownEigenvalues,
    /// `sigma_e^2 (1 + sqrt(p / T))`.
    pub threshold: f64,
    /// `sigma_e^2 (1 + sqrt(p / T))^2`.
    pub mp_edge: f64,
    pub ell2_detectable: bool,
    /// Predicted mean of the top sample eigenvalue.
    pub predicted_top: f64,
    /// Replicate means of the ordered sample eigenvalues `1..=10`.
    pub mean_eigs: Vec<f64>,
    /// Replicate maxima of the ordered sample eigenvalues `1..=10`.
    pub max_eigs: Vec<f64>,
}

pub fn simulate_brown_harding(params: &FactorModelParams, config: &SimConfig) -> Result<Vec<HardingRow>> {
    params.validate()?;
    let t = params.t;
    let mut rows = Vec::with_capacity(params.p_grid.len());
    for (k, &p) in params.p_grid.iter().enumerate() {
        let pop = brown_population_eigs(p, params.beta_f, params.sigma_b, params.sigma_f, params.sigma_e)?;
        let det = detectability(p, t, params.sigma_e, pop.ell_rest)?;
        let base = pop.base;
        let predicted_top = if pop.ell1 > base {
            let model = SpikedModel::new(p as f64 / t as f64, base, pop.spikes().to_vec())?;
            spike_predict(&model, 0, Some(t))?.mean
        } else {
            det.mp_edge
        };

        let mut variances = vec![base; p];
        variances[..4].copy_from_slice(&pop.spikes());
        let center = config.center;
        let offset = (k * config.replicates) as u64;
        let tops = run_replicates(config, offset, |_, g| {
            let returns = match params.loadings {
                Loadings::Matched => draw_data_matrix(p, t, Covariance::Diagonal(&variances), g)?,
                Loadings::Random => random_loading_returns(params, p, g)?,
            };
            let x = if center {
                crate::inference::center_rows(&returns)
            } else {
                returns
            };
            let gram = if p <= t { x.row_gram() } else { x.col_gram() };
            let mut values = sym_eig(&gram, false)?.values;
            values.truncate(HARDING_TOP);
            values.iter_mut().for_each(|v| *v /= t as f64);
            values.resize(HARDING_TOP, 0.0);
            Ok(values)
        })?;
        let reps = tops.len() as f64;
        let mean_eigs = (0..HARDING_TOP)
            .map(|j| tops.iter().map(|v| v[j]).sum::<f64>() / reps)
            .collect();
        let max_eigs = (0..HARDING_TOP)
            .map(|j| tops.iter().map(|v| v[j]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        rows.push(HardingRow {
            p,
            t,
            population: pop,
            threshold: det.threshold,
            mp_edge: det.mp_edge,
            ell2_detectable: det.detectable,
            predicted_top,
            mean_eigs,
            max_eigs,
        });
    }
    Ok(rows)
}

fn random_loading_returns<R: rand::Rng>(
    params: &FactorModelParams,
    p: usize,
    g: &mut super::Normal<R>,
) -> Result<Matrix> {
    let t = params.t;
    let m = params.num_factors;
    let loadings = Matrix::from_fn(p, m, |_, nu| {
        let mean = if nu == 0 { params.beta_f } else { 0.0 };
        mean + params.sigma_b * g.sample()
    });
    let factors = Matrix::from_fn(m, t, |_, _| params.sigma_f * g.sample());
    let mut returns = loadings.matmul(&factors)?;
    for i in 0..p {
        for v in returns.row_mut(i) {
            *v += params.sigma_e * g.sample();
        }
    }
    Ok(returns)
}
