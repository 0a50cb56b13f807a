//! Tracy-Widom laws `F1` and `F2` tabulated from the Painleve II solution.
//!
//! With `q` the Hastings-McLeod solution,
//!
//! ```text
//! F2(s)   = exp(-int_s^inf (x - s) q(x)^2 dx)
//! F1(s)^2 = F2(s) exp(-int_s^inf q(x) dx)
//! ```
//!
//! The `F2` integrand is sometimes printed as `(x - s)^2 q(x)`. The build
//! evaluates both candidates and keeps the one that agrees with the
//! Airy-kernel Fredholm determinant; which one won and by how much is kept
//! in [`TwMetadata`].

use std::sync::OnceLock;

use super::airy::airy_ai;
use super::fredholm::fredholm_tw2_cdf;
use super::painleve::{solve_painleve_ii, PainleveDiagnostics};
use super::quadrature::integrate;
use crate::error::{Error, Result};

/// Grid of the tables.
pub const TW_GRID: (f64, f64) = (-13.0, 10.0);
pub const TW_STEP: f64 = 0.01;

/// Window on which the Painleve route is checked against the Fredholm
/// determinant.
pub const ORACLE_WINDOW: (f64, f64) = (-5.0, 3.0);
const ORACLE_ORDER: usize = 80;
/// Largest oracle disagreement tolerated before the build fails.
const ORACLE_FAIL: f64 = 1e-4;

/// Candidate integrands for `F2 = exp(-int_s^inf w(x, s) dx)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum F2Integrand {
    /// `(x - s) q(x)^2`
    LinearWeightSquaredSolution,
    /// `(x - s)^2 q(x)`
    QuadraticWeightLinearSolution,
}

/// How the tables were built.
#[derive(Debug, Clone, PartialEq)]
pub struct TwMetadata {
    pub integrand: F2Integrand,
    /// Largest `|F2 - fredholm|` over the oracle window for the adopted
    /// integrand.
    pub oracle_deviation: f64,
    /// Same for the rejected integrand.
    pub rejected_deviation: f64,
    pub oracle_nodes: usize,
    pub painleve: PainleveDiagnostics,
}

/// A tabulated Tracy-Widom distribution.
#[derive(Debug, Clone)]
pub struct TwDistribution {
    beta: u8,
    grid: Vec<f64>,
    cdf: Vec<f64>,
    pdf: Vec<f64>,
    q_tail: Vec<f64>,
    metadata: TwMetadata,
}

static TABLES: OnceLock<std::result::Result<(TwDistribution, TwDistribution), Error>> =
    OnceLock::new();

impl TwDistribution {
    /// Builds the table for `beta` in `{1, 2}`.
    pub fn build(beta: u8) -> Result<Self> {
        check_beta(beta)?;
        let (f1, f2) = build_pair()?;
        Ok(if beta == 1 { f1 } else { f2 })
    }

    /// Process-wide table, built on first use.
    pub fn shared(beta: u8) -> Result<&'static Self> {
        check_beta(beta)?;
        let tables = TABLES.get_or_init(build_pair);
        match tables {
            Ok((f1, f2)) => Ok(if beta == 1 { f1 } else { f2 }),
            Err(e) => Err(e.clone()),
        }
    }

    pub fn beta(&self) -> u8 {
        self.beta
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn cdf_values(&self) -> &[f64] {
        &self.cdf
    }

    pub fn pdf_values(&self) -> &[f64] {
        &self.pdf
    }

    /// `int_s^inf q(x) dx` at each grid node.
    pub fn q_tail_integral(&self) -> &[f64] {
        &self.q_tail
    }

    pub fn metadata(&self) -> &TwMetadata {
        &self.metadata
    }

    /// Mean and standard deviation, by quadrature of the tabulated density.
    pub fn mean_sd(&self) -> (f64, f64) {
        let h = self.grid[1] - self.grid[0];
        let moment = |k: i32| -> f64 {
            let g: Vec<f64> = self
                .grid
                .iter()
                .zip(&self.pdf)
                .map(|(s, f)| s.powi(k) * f)
                .collect();
            h * (g.iter().sum::<f64>() - 0.5 * (g[0] + g[g.len() - 1]))
        };
        let mean = moment(1);
        (mean, (moment(2) - mean * mean).sqrt())
    }

    /// Distribution function; 0 left of the grid, 1 right of it.
    pub fn cdf(&self, s: f64) -> f64 {
        if s.is_nan() {
            return f64::NAN;
        }
        let n = self.grid.len();
        if s <= self.grid[0] {
            return if s == self.grid[0] { self.cdf[0] } else { 0.0 };
        }
        if s >= self.grid[n - 1] {
            return if s == self.grid[n - 1] { self.cdf[n - 1] } else { 1.0 };
        }
        let i = self.cell(s);
        self.hermite(i, s).0.clamp(0.0, 1.0)
    }

    /// Density, from the same interpolant as [`cdf`](Self::cdf).
    pub fn pdf(&self, s: f64) -> f64 {
        let n = self.grid.len();
        if !(s > self.grid[0] && s < self.grid[n - 1]) {
            return 0.0;
        }
        let i = self.cell(s);
        self.hermite(i, s).1.max(0.0)
    }

    /// Upper tail `1 - F(s)`.
    pub fn sf(&self, s: f64) -> f64 {
        1.0 - self.cdf(s)
    }

    /// Inverse of [`cdf`](Self::cdf). Probabilities beyond the tabulated
    /// range map to the grid ends.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!(
                "quantile: probability {p} outside (0, 1)"
            )));
        }
        let n = self.grid.len();
        let (mut lo, mut hi) = (self.grid[0], self.grid[n - 1]);
        if p <= self.cdf(lo) {
            return Ok(lo);
        }
        if p >= self.cdf(hi) {
            return Ok(hi);
        }
        while hi - lo > 1e-10 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut s = 0.5 * (lo + hi);
        let density = self.pdf(s);
        if density > 0.0 {
            let refined = s - (self.cdf(s) - p) / density;
            if (lo - 1e-10..=hi + 1e-10).contains(&refined) {
                s = refined;
            }
        }
        Ok(s)
    }

    fn cell(&self, s: f64) -> usize {
        let h = self.grid[1] - self.grid[0];
        let i = ((s - self.grid[0]) / h).floor() as usize;
        let i = i.min(self.grid.len() - 2);
        // Guard against rounding at cell edges.
        if s < self.grid[i] {
            i.saturating_sub(1)
        } else if s > self.grid[i + 1] {
            i + 1
        } else {
            i
        }
    }

    /// Monotone cubic Hermite interpolant on cell `i`; returns value and
    /// derivative.
    fn hermite(&self, i: usize, s: f64) -> (f64, f64) {
        let (x0, x1) = (self.grid[i], self.grid[i + 1]);
        let h = x1 - x0;
        let (y0, y1) = (self.cdf[i], self.cdf[i + 1]);
        let (mut d0, mut d1) = (self.pdf[i], self.pdf[i + 1]);
        let slope = (y1 - y0) / h;
        if slope <= 0.0 {
            d0 = 0.0;
            d1 = 0.0;
        } else {
            // Fritsch-Carlson limiter.
            let a = d0 / slope;
            let b = d1 / slope;
            let r = a * a + b * b;
            if r > 9.0 {
                let tau = 3.0 / r.sqrt();
                d0 = tau * a * slope;
                d1 = tau * b * slope;
            }
        }
        let t = (s - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
        let dh00 = (6.0 * t2 - 6.0 * t) / h;
        let dh10 = 3.0 * t2 - 4.0 * t + 1.0;
        let dh01 = (-6.0 * t2 + 6.0 * t) / h;
        let dh11 = 3.0 * t2 - 2.0 * t;
        let deriv = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
        (value, deriv)
    }
}

fn check_beta(beta: u8) -> Result<()> {
    if beta == 1 || beta == 2 {
        Ok(())
    } else {
        Err(Error::domain(format!("beta must be 1 or 2, got {beta}")))
    }
}

/// Backward cumulative integral `G(s_i) = G(s_max) + int_{s_i}^{s_max} g`
/// with the end-corrected trapezoid rule (fourth order).
fn tail_integral(h: f64, g: &[f64], g_prime: &[f64], at_end: f64) -> Vec<f64> {
    let n = g.len();
    let mut out = vec![0.0; n];
    out[n - 1] = at_end;
    for i in (0..n - 1).rev() {
        let panel = 0.5 * h * (g[i] + g[i + 1]) + h * h / 12.0 * (g_prime[i] - g_prime[i + 1]);
        out[i] = out[i + 1] + panel;
    }
    out
}

fn build_pair() -> Result<(TwDistribution, TwDistribution)> {
    let sol = solve_painleve_ii(TW_GRID.0, TW_GRID.1, TW_STEP)?;
    let grid = sol.grid;
    let q = sol.q;
    let qp = sol.q_prime;
    let n = grid.len();
    let h = grid[1] - grid[0];
    let s_max = grid[n - 1];

    // Beyond s_max, q = Ai to far better than double precision.
    let ai = |x: f64| airy_ai(x).map(|v| v.ai).unwrap_or(0.0);
    let tail = |f: &dyn Fn(f64) -> f64| integrate(f, s_max, s_max + 20.0, 8, 20);
    let i_end = tail(&|x| ai(x).powi(2));
    let j_end = tail(&|x| (x - s_max) * ai(x).powi(2));
    let k_end = tail(&|x| ai(x));
    let m_end = tail(&|x| (x - s_max) * ai(x));
    let l_end = tail(&|x| (x - s_max).powi(2) * ai(x));

    let q2: Vec<f64> = q.iter().map(|v| v * v).collect();
    let q2p: Vec<f64> = q.iter().zip(&qp).map(|(a, b)| 2.0 * a * b).collect();
    // I = int q^2, J = int (x-s) q^2, K = int q, M = int (x-s) q,
    // L = int (x-s)^2 q, using J' = -I, M' = -K, L' = -2M.
    let i_int = tail_integral(h, &q2, &q2p, i_end);
    let neg_q2: Vec<f64> = q2.iter().map(|v| -v).collect();
    let j_int = tail_integral(h, &i_int, &neg_q2, j_end);
    let k_int = tail_integral(h, &q, &qp, k_end);
    let neg_q: Vec<f64> = q.iter().map(|v| -v).collect();
    let m_int = tail_integral(h, &k_int, &neg_q, m_end);
    let neg_k: Vec<f64> = k_int.iter().map(|v| -v).collect();
    let two_m: Vec<f64> = m_int.iter().map(|v| 2.0 * v).collect();
    let two_neg_k: Vec<f64> = neg_k.iter().map(|v| 2.0 * v).collect();
    let l_int = tail_integral(h, &two_m, &two_neg_k, l_end);

    let mut dev_j: f64 = 0.0;
    let mut dev_l: f64 = 0.0;
    let mut oracle_nodes = 0;
    for (i, &s) in grid.iter().enumerate() {
        if s < ORACLE_WINDOW.0 - 1e-9 || s > ORACLE_WINDOW.1 + 1e-9 {
            continue;
        }
        let reference = fredholm_tw2_cdf(s.clamp(ORACLE_WINDOW.0, ORACLE_WINDOW.1), ORACLE_ORDER)?;
        dev_j = dev_j.max(((-j_int[i]).exp() - reference).abs());
        dev_l = dev_l.max(((-l_int[i]).exp() - reference).abs());
        oracle_nodes += 1;
    }

    let (integrand, log_f2, f2_rate, oracle_deviation, rejected_deviation) = if dev_j <= dev_l {
        (
            F2Integrand::LinearWeightSquaredSolution,
            j_int.iter().map(|v| -v).collect::<Vec<_>>(),
            i_int.clone(),
            dev_j,
            dev_l,
        )
    } else {
        (
            F2Integrand::QuadraticWeightLinearSolution,
            l_int.iter().map(|v| -v).collect::<Vec<_>>(),
            two_m,
            dev_l,
            dev_j,
        )
    };
    if oracle_deviation > ORACLE_FAIL {
        return Err(Error::Build(format!(
            "Tracy-Widom build: neither F2 integrand matches the Fredholm determinant \
             (best deviation {oracle_deviation:e})"
        )));
    }

    let metadata = TwMetadata {
        integrand,
        oracle_deviation,
        rejected_deviation,
        oracle_nodes,
        painleve: sol.diagnostics,
    };

    let f2_cdf: Vec<f64> = log_f2.iter().map(|v| v.exp()).collect();
    let f2_pdf: Vec<f64> = f2_cdf.iter().zip(&f2_rate).map(|(f, r)| f * r).collect();
    let f1_cdf: Vec<f64> = log_f2
        .iter()
        .zip(&k_int)
        .map(|(lf, k)| (0.5 * (lf - k)).exp())
        .collect();
    let f1_pdf: Vec<f64> = (0..n)
        .map(|i| 0.5 * f1_cdf[i] * (f2_rate[i] + q[i]))
        .collect();

    for (name, cdf) in [("F1", &f1_cdf), ("F2", &f2_cdf)] {
        if cdf[0] >= 1e-8 || 1.0 - cdf[n - 1] >= 1e-8 {
            return Err(Error::Build(format!(
                "Tracy-Widom build: {name} table does not reach its tails"
            )));
        }
        if cdf.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Build(format!(
                "Tracy-Widom build: {name} table is not monotone"
            )));
        }
    }

    let f1 = TwDistribution {
        beta: 1,
        grid: grid.clone(),
        cdf: f1_cdf,
        pdf: f1_pdf,
        q_tail: k_int.clone(),
        metadata: metadata.clone(),
    };
    let f2 = TwDistribution {
        beta: 2,
        grid,
        cdf: f2_cdf,
        pdf: f2_pdf,
        q_tail: k_int,
        metadata,
    };
    Ok((f1, f2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(beta: u8) -> &'static TwDistribution {
        TwDistribution::shared(beta).unwrap()
    }

    #[test]
    fn adopts_the_integrand_matching_the_determinant() {
        let meta = f(2).metadata();
        assert_eq!(meta.integrand, F2Integrand::LinearWeightSquaredSolution);
        assert!(meta.oracle_deviation < 1e-6, "{}", meta.oracle_deviation);
        assert!(meta.rejected_deviation > 1e-2);
        assert!(meta.oracle_nodes >= 800);
    }

    #[test]
    fn tails_and_clamping() {
        for beta in [1, 2] {
            let d = f(beta);
            assert!(d.cdf(6.0) >= 1.0 - 1e-8 || beta == 1);
            assert_eq!(d.cdf(-50.0), 0.0);
            assert_eq!(d.cdf(50.0), 1.0);
            assert!(d.cdf_values()[0] < 1e-8);
            assert!(1.0 - d.cdf_values().last().unwrap() < 1e-8);
        }
        assert!(f(2).cdf(6.0) >= 1.0 - 1e-8);
    }

    #[test]
    fn known_f2_values() {
        // Independent high-precision evaluations of the Fredholm determinant.
        assert!((f(2).cdf(-3.0) - 0.080_319_552_939_333_9).abs() < 1e-8);
        assert!((f(2).cdf(-2.0) - 0.413_224_142_505_11).abs() < 1e-8);
    }

    #[test]
    fn medians_and_upper_quantiles() {
        assert!((f(2).quantile(0.5).unwrap() + 1.804_912_4).abs() < 1e-6);
        assert!((f(1).quantile(0.5).unwrap() + 1.268_6).abs() < 1e-3);
        assert!((f(1).cdf(0.9793) - 0.95).abs() < 2e-3);
    }

    #[test]
    fn moments_match_published_values() {
        let (m1, s1) = f(1).mean_sd();
        let (m2, s2) = f(2).mean_sd();
        assert!((m1 + 1.206_533_6).abs() < 1e-5 && (s1 - 1.267_983).abs() < 1e-5);
        assert!((m2 + 1.771_086_8).abs() < 1e-5 && (s2 - 0.901_773).abs() < 1e-5);
    }

    #[test]
    fn f1_square_relation_holds_on_the_grid() {
        let (f1, f2) = (f(1), f(2));
        for i in 0..f1.grid().len() {
            let lhs = f1.cdf_values()[i].powi(2);
            let rhs = f2.cdf_values()[i] * (-f1.q_tail_integral()[i]).exp();
            if rhs > 1e-280 {
                assert!((lhs / rhs - 1.0).abs() < 1e-8, "node {i}");
            }
        }
    }

    #[test]
    fn quantile_rejects_bad_probabilities() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(f(1).quantile(p).is_err());
        }
        assert!(TwDistribution::shared(4).is_err());
    }

    #[test]
    fn interpolant_reproduces_nodes() {
        let d = f(1);
        for i in (0..d.grid().len()).step_by(97) {
            assert_eq!(d.cdf(d.grid()[i]), d.cdf_values()[i].clamp(0.0, 1.0));
        }
    }
}
