//! Empirical distributions and Kolmogorov-Smirnov distances.

use crate::error::{Error, Result};

/// Sorted sample with its empirical distribution function.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSummary {
    sorted: Vec<f64>,
}

impl EmpiricalSummary {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::domain("empirical summary: no samples"));
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(Error::domain("empirical summary: NaN sample"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(EmpiricalSummary { sorted: samples })
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of samples `<= x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }

    /// Sample standard deviation (divisor `m - 1`; 0 for a single sample).
    pub fn sd(&self) -> f64 {
        let m = self.sorted.len();
        if m < 2 {
            return 0.0;
        }
        let mean = self.mean();
        let ss: f64 = self.sorted.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (m - 1) as f64).sqrt()
    }

    /// Quantile with linear interpolation between order statistics
    /// (position `(m - 1) p`).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("quantile: probability {p} outside [0, 1]")));
        }
        let pos = p * (self.sorted.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        Ok(self.sorted[lo] + frac * (self.sorted[hi] - self.sorted[lo]))
    }

    pub fn ks(&self, reference: impl Fn(f64) -> f64) -> f64 {
        ks_sorted(&self.sorted, reference)
    }
}

fn ks_sorted(sorted: &[f64], reference: impl Fn(f64) -> f64) -> f64 {
    let m = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = reference(x);
        d = d.max((i as f64 + 1.0) / m - f).max(f - i as f64 / m);
    }
    d.clamp(0.0, 1.0)
}

/// Kolmogorov-Smirnov distance between the sample and a continuous
/// reference distribution function.
pub fn ks_distance(samples: &[f64], reference: impl Fn(f64) -> f64) -> Result<f64> {
    Ok(EmpiricalSummary::new(samples.to_vec())?.ks(reference))
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    let ea = EmpiricalSummary::new(a.to_vec())?;
    let eb = EmpiricalSummary::new(b.to_vec())?;
    let mut d: f64 = 0.0;
    for &x in ea.sorted().iter().chain(eb.sorted()) {
        d = d.max((ea.ecdf(x) - eb.ecdf(x)).abs());
    }
    Ok(d)
}
