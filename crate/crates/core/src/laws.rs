//! Marcenko-Pastur law, exact null eigenvalue densities, classical weight
//! functions, and the centering/scaling constants for the largest root.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::specfun::quadrature::gauss_legendre;

/// Marcenko-Pastur law with aspect ratio `gamma = p / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpLaw {
    pub gamma: f64,
    pub b_minus: f64,
    pub b_plus: f64,
    /// Point mass at zero, present when `p > n`.
    pub atom_at_zero: f64,
}

impl MpLaw {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::domain(format!(
                "Marcenko-Pastur: gamma = {gamma} must be positive and finite"
            )));
        }
        let r = gamma.sqrt();
        Ok(MpLaw {
            gamma,
            b_minus: (1.0 - r).powi(2),
            b_plus: (1.0 + r).powi(2),
            atom_at_zero: (1.0 - 1.0 / gamma).max(0.0),
        })
    }

    /// Density of the continuous part; the atom at zero is not included.
    pub fn density(&self, t: f64) -> f64 {
        if !(t > self.b_minus && t < self.b_plus) || t <= 0.0 {
            return 0.0;
        }
        ((self.b_plus - t) * (t - self.b_minus)).sqrt() / (2.0 * PI * self.gamma * t)
    }

    /// Distribution function, atom included.
    pub fn cdf(&self, t: f64) -> f64 {
        self.cdf_with_order(t, 64)
    }

    /// [`cdf`](Self::cdf) with an explicit Gauss-Legendre order, for
    /// convergence checks.
    pub fn cdf_with_order(&self, t: f64, order: usize) -> f64 {
        if t.is_nan() {
            return f64::NAN;
        }
        let atom = if t >= 0.0 { self.atom_at_zero } else { 0.0 };
        if t <= self.b_minus {
            return atom;
        }
        if t >= self.b_plus {
            return 1.0;
        }
        // t = c - r cos(theta) turns the square-root endpoints into a smooth
        // integrand r^2 sin^2(theta) / (2 pi gamma t).
        let c = 0.5 * (self.b_plus + self.b_minus);
        let r = 0.5 * (self.b_plus - self.b_minus);
        let upper = ((c - t) / r).clamp(-1.0, 1.0).acos();
        let (x, w) = gauss_legendre(order);
        let half = 0.5 * upper;
        let mut total = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            let theta = half * (xi + 1.0);
            let (s, cs) = theta.sin_cos();
            let tt = c - r * cs;
            // At gamma = 1 the lower edge is 0; cancel r (1 - cos) analytically.
            let value = if self.b_minus == 0.0 {
                r * (1.0 + cs) / (2.0 * PI * self.gamma)
            } else {
                r * r * s * s / (2.0 * PI * self.gamma * tt)
            };
            total += wi * value;
        }
        (atom + half * total).clamp(0.0, 1.0)
    }
}

/// Real or complex Gaussian data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Dyson index: 1 for real, 2 for complex.
    pub fn beta(self) -> u8 {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }
}

/// Single Wishart `W_p(n, I)` or double Wishart `W_p(n1, I), W_p(n2, I)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dims {
    Single { n: usize, p: usize },
    Double { n1: usize, n2: usize, p: usize },
}

/// One of the four single/double, real/complex settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EnsembleCase {
    pub field: Field,
    pub dims: Dims,
}

impl EnsembleCase {
    pub fn single(field: Field, n: usize, p: usize) -> Result<Self> {
        if n < 1 || p < 1 {
            return Err(Error::domain(format!(
                "single Wishart needs n, p >= 1 (got n = {n}, p = {p})"
            )));
        }
        Ok(EnsembleCase {
            field,
            dims: Dims::Single { n, p },
        })
    }

    pub fn double(field: Field, n1: usize, n2: usize, p: usize) -> Result<Self> {
        if p < 1 || n1 < p || n2 < p {
            return Err(Error::domain(format!(
                "double Wishart needs n1, n2 >= p >= 1 (got n1 = {n1}, n2 = {n2}, p = {p})"
            )));
        }
        Ok(EnsembleCase {
            field,
            dims: Dims::Double { n1, n2, p },
        })
    }

    pub fn beta(&self) -> u8 {
        self.field.beta()
    }

    pub fn p(&self) -> usize {
        match self.dims {
            Dims::Single { p, .. } | Dims::Double { p, .. } => p,
        }
    }

    pub fn is_double(&self) -> bool {
        matches!(self.dims, Dims::Double { .. })
    }

    /// Short label such as `single-real`.
    pub fn label(&self) -> &'static str {
        match (self.is_double(), self.field) {
            (false, Field::Real) => "single-real",
            (false, Field::Complex) => "single-complex",
            (true, Field::Real) => "double-real",
            (true, Field::Complex) => "double-complex",
        }
    }
}

/// Scale on which a statistic is compared with its centering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatisticScale {
    /// `(x - mu) / sigma`.
    Linear,
    /// `(logit x - logit mu) mu (1 - mu) / sigma`, for roots in `(0, 1)`.
    /// To first order this is the linear standardization; it removes most of
    /// the skew a bounded root has at small dimensions.
    Logit,
}

/// Centering and scaling of the largest root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterScale {
    pub mu: f64,
    pub sigma: f64,
    pub scale: StatisticScale,
    /// The two `(mu, sigma)` pairs whose average gives the complex-case
    /// constants.
    pub endpoints: Option<[(f64, f64); 2]>,
}

impl CenterScale {
    pub fn standardize(&self, x: f64) -> f64 {
        match self.scale {
            StatisticScale::Linear => (x - self.mu) / self.sigma,
            StatisticScale::Logit => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                if x >= 1.0 {
                    return f64::INFINITY;
                }
                (logit(x) - logit(self.mu)) * self.mu * (1.0 - self.mu) / self.sigma
            }
        }
    }

    /// Inverse of [`standardize`](Self::standardize).
    pub fn unstandardize(&self, z: f64) -> f64 {
        match self.scale {
            StatisticScale::Linear => self.mu + self.sigma * z,
            StatisticScale::Logit => {
                let y = logit(self.mu) + z * self.sigma / (self.mu * (1.0 - self.mu));
                1.0 / (1.0 + (-y).exp())
            }
        }
    }
}

fn logit(x: f64) -> f64 {
    (x / (1.0 - x)).ln()
}

fn single_constants(n: f64, p: f64) -> Result<(f64, f64)> {
    if !(n > 0.0 && p > 0.0) {
        return Err(Error::domain(format!(
            "center_scale: effective dimensions ({n}, {p}) must be positive"
        )));
    }
    let (a, b) = (n.sqrt(), p.sqrt());
    Ok(((a + b).powi(2), (a + b) * (1.0 / a + 1.0 / b).cbrt()))
}

fn double_constants(n1: f64, p: f64, kappa: f64) -> Result<(f64, f64)> {
    let s_phi = n1 / kappa;
    let s_gamma = p / kappa;
    if !(s_phi > 0.0 && s_phi < 1.0 && s_gamma > 0.0 && s_gamma < 1.0) {
        return Err(Error::domain(format!(
            "center_scale: sin^2 arguments ({s_phi}, {s_gamma}) outside (0, 1)"
        )));
    }
    let phi = 2.0 * s_phi.sqrt().asin();
    let gamma = 2.0 * s_gamma.sqrt().asin();
    if phi + gamma >= PI {
        return Err(Error::domain(format!(
            "center_scale: phi + gamma = {} is not below pi",
            phi + gamma
        )));
    }
    let mu = (0.5 * (phi + gamma)).sin().powi(2);
    let sigma3 = (phi + gamma).sin().powi(4) / (4.0 * kappa * kappa * phi.sin() * gamma.sin());
    Ok((mu, sigma3.cbrt()))
}

/// Centering and scaling for the largest root in each of the four cases.
///
/// * single/real: `(sqrt(n-1/2) + sqrt(p-1/2))^2` with the matching scale.
/// * single/complex: the equal-weight average of the `(n+1/2, p+1/2)`
///   constants evaluated at `(n-1, p)` and `(n, p-1)`.
/// * double/real: `kappa = n1 + n2 - 1` with `n1 - 1/2`, `p - 1/2` in the
///   angle definitions.
/// * double/complex: `kappa = n1 + n2 + 1` with `n1 + 1/2`, `p + 1/2`,
///   averaged with the `p - 1` constants.
///
/// Double-Wishart roots are standardized on the logit scale.
pub fn center_scale(case: &EnsembleCase) -> Result<CenterScale> {
    match (case.dims, case.field) {
        (Dims::Single { n, p }, Field::Real) => {
            let (mu, sigma) = single_constants(n as f64 - 0.5, p as f64 - 0.5)?;
            Ok(CenterScale {
                mu,
                sigma,
                scale: StatisticScale::Linear,
                endpoints: None,
            })
        }
        (Dims::Single { n, p }, Field::Complex) => {
            let (n, p) = (n as f64, p as f64);
            let a = single_constants(n - 0.5, p + 0.5)?;
            let b = single_constants(n + 0.5, p - 0.5)?;
            Ok(average(a, b, StatisticScale::Linear))
        }
        (Dims::Double { n1, n2, p }, Field::Real) => {
            let kappa = (n1 + n2) as f64 - 1.0;
            let (mu, sigma) = double_constants(n1 as f64 - 0.5, p as f64 - 0.5, kappa)?;
            Ok(CenterScale {
                mu,
                sigma,
                scale: StatisticScale::Logit,
                endpoints: None,
            })
        }
        (Dims::Double { n1, n2, p }, Field::Complex) => {
            let kappa = (n1 + n2) as f64 + 1.0;
            let a = double_constants(n1 as f64 + 0.5, p as f64 + 0.5, kappa)?;
            let b = double_constants(n1 as f64 + 0.5, p as f64 - 0.5, kappa)?;
            Ok(average(a, b, StatisticScale::Logit))
        }
    }
}

fn average(a: (f64, f64), b: (f64, f64), scale: StatisticScale) -> CenterScale {
    CenterScale {
        mu: 0.5 * (a.0 + b.0),
        sigma: 0.5 * (a.1 + b.1),
        scale,
        endpoints: Some([a, b]),
    }
}

/// Parameters of the exact null joint eigenvalue density (real case).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointDensityParams {
    /// Eigenvalues of `A ~ W_p(n, I)`.
    Single { n: usize, p: usize },
    /// Roots of `det(x (A + B) - A) = 0` with `A ~ W_p(n1, I)`, `B ~ W_p(n2, I)`.
    Double { n1: usize, n2: usize, p: usize },
}

/// `log Gamma_p(a)`, the multivariate gamma function.
pub fn ln_multivariate_gamma(p: usize, a: f64) -> f64 {
    let pf = p as f64;
    pf * (pf - 1.0) / 4.0 * PI.ln() + (0..p).map(|i| ln_gamma(a - i as f64 / 2.0)).sum::<f64>()
}

/// Log of the joint density of the ordered eigenvalues `x[0] > x[1] > ...`.
///
/// Ties give `-inf`. Unsorted input or values outside the support are
/// domain errors.
pub fn joint_density_log(params: JointDensityParams, x: &[f64]) -> Result<f64> {
    let p = match params {
        JointDensityParams::Single { n, p } => {
            if p < 1 || n < p {
                return Err(Error::domain(format!(
                    "joint density: single Wishart needs n >= p >= 1 (n = {n}, p = {p})"
                )));
            }
            p
        }
        JointDensityParams::Double { n1, n2, p } => {
            if p < 1 || n1 < p || n2 < p {
                return Err(Error::domain(format!(
                    "joint density: double Wishart needs n1, n2 >= p >= 1 (n1 = {n1}, n2 = {n2}, p = {p})"
                )));
            }
            p
        }
    };
    if x.len() != p {
        return Err(Error::domain(format!(
            "joint density: expected {p} eigenvalues, got {}",
            x.len()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("joint density: non-finite eigenvalue"));
    }
    if x.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::domain("joint density: eigenvalues must be in descending order"));
    }
    let in_support = |v: f64| match params {
        JointDensityParams::Single { .. } => v > 0.0,
        JointDensityParams::Double { .. } => v > 0.0 && v < 1.0,
    };
    if let Some(v) = x.iter().find(|&&v| !in_support(v)) {
        return Err(Error::domain(format!(
            "joint density: eigenvalue {v} outside the support"
        )));
    }
    if x.windows(2).any(|w| w[0] == w[1]) {
        return Ok(f64::NEG_INFINITY);
    }

    let pf = p as f64;
    let ln_pi = PI.ln();
    let (log_c, log_weight): (f64, Box<dyn Fn(f64) -> f64>) = match params {
        JointDensityParams::Single { n, .. } => {
            let nf = n as f64;
            let c = -(pf * nf / 2.0) * 2f64.ln() + (pf * pf / 2.0) * ln_pi
                - ln_multivariate_gamma(p, pf / 2.0)
                - ln_multivariate_gamma(p, nf / 2.0);
            let e = (nf - pf - 1.0) / 2.0;
            (c, Box::new(move |v: f64| e * v.ln() - v / 2.0))
        }
        JointDensityParams::Double { n1, n2, .. } => {
            let (a, b) = (n1 as f64, n2 as f64);
            let c = (pf * pf / 2.0) * ln_pi + ln_multivariate_gamma(p, (a + b) / 2.0)
                - ln_multivariate_gamma(p, pf / 2.0)
                - ln_multivariate_gamma(p, a / 2.0)
                - ln_multivariate_gamma(p, b / 2.0);
            let ea = (a - pf - 1.0) / 2.0;
            let eb = (b - pf - 1.0) / 2.0;
            (c, Box::new(move |v: f64| ea * v.ln() + eb * (1.0 - v).ln()))
        }
    };

    let mut total = log_c;
    for &v in x {
        total += log_weight(v);
    }
    for i in 0..p {
        for j in i + 1..p {
            total += (x[i] - x[j]).ln();
        }
    }
    Ok(total)
}

/// Classical orthogonal-polynomial weight families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightFamily {
    /// `exp(-x^2 / 2)` on the real line.
    Hermite,
    /// `x^a exp(-x)` on `x >= 0`.
    Laguerre { a: f64 },
    /// `(1 - x)^a (1 + x)^b` on `[-1, 1]`.
    Jacobi { a: f64, b: f64 },
}

/// Weight function of the family; zero outside its support.
pub fn weight_function(family: WeightFamily, x: f64) -> f64 {
    match family {
        WeightFamily::Hermite => (-0.5 * x * x).exp(),
        WeightFamily::Laguerre { a } => {
            if x >= 0.0 {
                x.powf(a) * (-x).exp()
            } else {
                0.0
            }
        }
        WeightFamily::Jacobi { a, b } => {
            if (-1.0..=1.0).contains(&x) {
                (1.0 - x).powf(a) * (1.0 + x).powf(b)
            } else {
                0.0
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quadrature::integrate;
    use proptest::prelude::*;

    fn continuous_moment(law: &MpLaw, k: i32) -> f64 {
        // Same substitution as the cdf, written out independently.
        let c = 0.5 * (law.b_plus + law.b_minus);
        let r = 0.5 * (law.b_plus - law.b_minus);
        integrate(
            |th| {
                let t = c - r * th.cos();
                law.density(t) * t.powi(k) * r * th.sin()
            },
            0.0,
            PI,
            16,
            20,
        )
    }

    #[test]
    fn support_edges() {
        let law = MpLaw::new(0.25).unwrap();
        assert_eq!((law.b_minus, law.b_plus), (0.25, 2.25));
        let law = MpLaw::new(1.0).unwrap();
        assert_eq!((law.b_minus, law.b_plus), (0.0, 4.0));
        assert!(MpLaw::new(0.0).is_err());
        assert!(MpLaw::new(f64::NAN).is_err());
    }

    #[test]
    fn density_normalizes() {
        let law = MpLaw::new(0.25).unwrap();
        assert!((continuous_moment(&law, 0) - 1.0).abs() < 1e-6);
        assert_eq!(law.density(0.2), 0.0);
        assert_eq!(MpLaw::new(1.0).unwrap().density(4.0), 0.0);
        assert_eq!(MpLaw::new(2.0).unwrap().density(0.0), 0.0);
    }

    #[test]
    fn cdf_edges_and_convergence() {
        let law = MpLaw::new(0.25).unwrap();
        assert_eq!(law.cdf(2.25), 1.0);
        assert_eq!(law.cdf(0.25), 0.0);
        let square = MpLaw::new(1.0).unwrap();
        let a = square.cdf_with_order(1.0, 32);
        let b = square.cdf_with_order(1.0, 128);
        assert!(a > 0.0 && a < 1.0);
        assert!((a - b).abs() < 1e-8);
        // At gamma = 1, t = 4 sin^2(u) gives F(2) = (4/pi) int_0^{pi/4} cos^2 = 1/2 + 1/pi.
        assert!((square.cdf(2.0) - (0.5 + 1.0 / PI)).abs() < 1e-12);
    }

    #[test]
    fn atom_for_wide_matrices() {
        let law = MpLaw::new(4.0).unwrap();
        assert_eq!(law.atom_at_zero, 0.75);
        assert_eq!(law.cdf(0.0), 0.75);
        assert!((continuous_moment(&law, 0) - 0.25).abs() < 1e-8);
    }

    #[test]
    fn single_real_ten_by_ten() {
        let cs = center_scale(&EnsembleCase::single(Field::Real, 10, 10).unwrap()).unwrap();
        assert!((cs.mu - 38.0).abs() < 1e-12);
        let want = 2.0 * 9.5f64.sqrt() * (2.0 / 9.5f64.sqrt()).cbrt();
        assert!((cs.sigma - want).abs() < 1e-12);
        assert!((cs.sigma - 5.3368).abs() < 1e-3);
    }

    #[test]
    fn complex_cases_expose_endpoints() {
        let cs = center_scale(&EnsembleCase::single(Field::Complex, 40, 20).unwrap()).unwrap();
        let [a, b] = cs.endpoints.unwrap();
        assert!((cs.mu - 0.5 * (a.0 + b.0)).abs() < 1e-12);
        assert!(a.0 != b.0);
        let cs = center_scale(&EnsembleCase::double(Field::Complex, 30, 40, 6).unwrap()).unwrap();
        assert!(cs.endpoints.is_some());
        assert!(cs.mu > 0.0 && cs.mu < 1.0);
    }

    #[test]
    fn double_constants_inside_unit_interval() {
        for p in 1..30 {
            let cs = center_scale(&EnsembleCase::double(Field::Real, 2 * p, 2 * p, p).unwrap())
                .unwrap();
            assert!(cs.mu > 0.0 && cs.mu < 1.0 && cs.sigma > 0.0);
        }
        assert!(EnsembleCase::double(Field::Real, 3, 10, 5).is_err());
    }

    #[test]
    fn logit_standardization_round_trips() {
        let cs = center_scale(&EnsembleCase::double(Field::Real, 25, 45, 5).unwrap()).unwrap();
        assert_eq!(cs.standardize(cs.mu), 0.0);
        for z in [-3.0, -0.5, 0.9, 2.5] {
            assert!((cs.standardize(cs.unstandardize(z)) - z).abs() < 1e-10);
        }
        assert_eq!(cs.standardize(1.0), f64::INFINITY);
    }

    #[test]
    fn double_recovers_single_as_n2_grows() {
        // n2 * mu_double -> mu_single (real case, n = n1).
        let (n1, p) = (60usize, 10usize);
        let single = center_scale(&EnsembleCase::single(Field::Real, n1, p).unwrap()).unwrap();
        let mut last = f64::INFINITY;
        for n2 in [1_000usize, 10_000, 100_000, 1_000_000] {
            let double = center_scale(&EnsembleCase::double(Field::Real, n1, n2, p).unwrap())
                .unwrap();
            let rel = (n2 as f64 * double.mu / single.mu - 1.0).abs();
            assert!(rel <= last + 1e-12);
            last = rel;
        }
        assert!(last < 0.05, "{last}");
    }

    #[test]
    fn single_growth_orders() {
        let p = 20usize;
        for n in [1_000usize, 100_000, 10_000_000] {
            let cs = center_scale(&EnsembleCase::single(Field::Real, n, p).unwrap()).unwrap();
            let bounded = cs.sigma / (n as f64).powf(2.0 / 3.0) * (p as f64).powf(1.0 / 6.0);
            assert!(bounded < 2.0);
            // For n >> p the scale behaves like sqrt(n) p^{-1/6}.
            let ratio = cs.sigma / (n as f64).sqrt() * (p as f64 - 0.5).powf(1.0 / 6.0);
            assert!((ratio - 1.0).abs() < 0.2, "{ratio}");
            if n == 10_000_000 {
                assert!((cs.mu / n as f64 - 1.0).abs() < 0.01);
            }
        }
    }

    #[test]
    fn joint_density_reduces_to_chi_square() {
        for n in [1usize, 2, 5, 17] {
            for i in 1..40 {
                let x = i as f64 * 0.37;
                let got = joint_density_log(JointDensityParams::Single { n, p: 1 }, &[x]).unwrap();
                let nf = n as f64;
                let want = -(nf / 2.0) * 2f64.ln() - ln_gamma(nf / 2.0) + (nf / 2.0 - 1.0) * x.ln()
                    - x / 2.0;
                assert!((got - want).abs() < 1e-12, "n = {n}, x = {x}");
            }
        }
    }

    #[test]
    fn joint_density_ties_and_domain() {
        let params = JointDensityParams::Single { n: 6, p: 3 };
        assert_eq!(joint_density_log(params, &[2.0, 2.0, 1.0]).unwrap(), f64::NEG_INFINITY);
        assert!(joint_density_log(params, &[1.0, 2.0, 0.5]).is_err());
        assert!(joint_density_log(params, &[2.0, 1.0, -0.5]).is_err());
        assert!(joint_density_log(params, &[2.0, 1.0]).is_err());
        let dbl = JointDensityParams::Double { n1: 5, n2: 6, p: 2 };
        assert!(joint_density_log(dbl, &[1.2, 0.5]).is_err());
        assert_eq!(joint_density_log(dbl, &[0.5, 0.5]).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn double_density_p1_is_beta() {
        let (a, b) = (7usize, 11usize);
        let x = 0.3;
        let got = joint_density_log(JointDensityParams::Double { n1: a, n2: b, p: 1 }, &[x]).unwrap();
        let (ha, hb) = (a as f64 / 2.0, b as f64 / 2.0);
        let want = ln_gamma(ha + hb) - ln_gamma(ha) - ln_gamma(hb)
            + (ha - 1.0) * x.ln()
            + (hb - 1.0) * (1.0 - x).ln();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn weights() {
        assert_eq!(weight_function(WeightFamily::Hermite, 0.0), 1.0);
        assert!((weight_function(WeightFamily::Laguerre { a: 0.0 }, 1.0) - (-1f64).exp()).abs() < 1e-16);
        assert_eq!(weight_function(WeightFamily::Jacobi { a: 0.0, b: 0.0 }, 0.3), 1.0);
        assert_eq!(weight_function(WeightFamily::Laguerre { a: 1.0 }, -1.0), 0.0);
        assert_eq!(weight_function(WeightFamily::Jacobi { a: 1.0, b: 1.0 }, 1.5), 0.0);
    }

    proptest! {
        #[test]
        fn mp_mean_is_one(gamma in 0.02f64..8.0) {
            let law = MpLaw::new(gamma).unwrap();
            // The atom sits at zero and adds nothing to the mean.
            prop_assert!((continuous_moment(&law, 1) - 1.0).abs() < 1e-8);
        }

        #[test]
        fn mp_cdf_is_monotone(gamma in 0.05f64..6.0, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let law = MpLaw::new(gamma).unwrap();
            let span = law.b_plus + 0.5;
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(law.cdf(lo * span) <= law.cdf(hi * span) + 1e-14);
        }

        #[test]
        fn single_real_symmetric_in_n_and_p(n in 1usize..500, p in 1usize..500) {
            let a = center_scale(&EnsembleCase::single(Field::Real, n, p).unwrap()).unwrap();
            let b = center_scale(&EnsembleCase::single(Field::Real, p, n).unwrap()).unwrap();
            prop_assert_eq!(a.mu, b.mu);
            prop_assert_eq!(a.sigma, b.sigma);
        }

        #[test]
        fn joint_density_invariant_under_resorting(mut x in prop::collection::vec(0.01f64..30.0, 4)) {
            let params = JointDensityParams::Single { n: 9, p: 4 };
            let mut sorted = x.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            x.reverse();
            x.sort_by(|a, b| b.total_cmp(a));
            let a = joint_density_log(params, &sorted).unwrap();
            let b = joint_density_log(params, &x).unwrap();
            prop_assert!(a == b || (a.is_infinite() && b.is_infinite()));
        }
    }
}
