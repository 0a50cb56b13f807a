//! Deterministic Monte Carlo harness.
//!
//! Replicate `r` of a run with seed `s` draws from its own ChaCha8 stream
//! (see [`rng::replicate_rng`]), and per-replicate results are collected by
//! index, so the output is a pure function of the configuration whatever
//! the number of worker threads.

pub mod experiments;
pub mod rng;
pub mod summary;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::inference::SpikedModel;
use crate::linalg::{cholesky, Matrix, SymMatrix};

pub use experiments::{
    simulate_brown_harding, simulate_largest_root, simulate_mp, simulate_null_top,
    simulate_spike, simulate_spike_in, FactorModelParams, HardingRow, LargestRootSim, Loadings, MpSim,
    OverlapMoment, SpikeSim,
};
pub use rng::{replicate_rng, Normal};
pub use summary::{ks_distance, ks_two_sample, EmpiricalSummary};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "RMT_INFER_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub seed: u64,
    pub replicates: usize,
    /// Subtract each variable's sample mean before forming `S`. This costs
    /// one degree of freedom, which the harness accounts for.
    pub center: bool,
    /// Worker threads; `None` reads [`THREADS_ENV`], then falls back to the
    /// number of available cores.
    pub workers: Option<usize>,
}

impl SimConfig {
    pub fn new(seed: u64, replicates: usize) -> Self {
        SimConfig {
            seed,
            replicates,
            center: true,
            workers: None,
        }
    }

    pub fn uncentered(mut self) -> Self {
        self.center = false;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(Error::domain("simulation needs at least one replicate"));
        }
        Ok(())
    }

    fn worker_count(&self) -> Result<usize> {
        if let Some(w) = self.workers {
            return Ok(w.max(1));
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map(|w| w.max(1))
                .map_err(|_| Error::domain(format!("{THREADS_ENV} = {v:?} is not a count"))),
            Err(_) => Ok(std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)),
        }
    }
}

/// Runs `f` for replicates `0..config.replicates`, giving replicate `r` the
/// stream `stream_offset + r`. Results come back in replicate order; the
/// first error aborts the run.
pub fn run_replicates<T, F>(config: &SimConfig, stream_offset: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut Normal<ChaCha8Rng>) -> Result<T> + Sync,
{
    config.validate()?;
    let workers = config.worker_count()?;
    let job = |r: usize| {
        let stream = stream_offset + r as u64;
        let mut normal = Normal::new(replicate_rng(config.seed, stream));
        f(r as u64, &mut normal)
    };
    if workers == 1 {
        return (0..config.replicates).map(job).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::numerical(format!("thread pool: {e}")))?;
    pool.install(|| (0..config.replicates).into_par_iter().map(job).collect())
}

/// Population covariance for [`sample_data_matrix`].
#[derive(Debug, Clone, Copy)]
pub enum Covariance<'a> {
    Identity,
    /// Spikes on the first coordinate axes, base variance elsewhere.
    Spiked(&'a SpikedModel),
    /// Independent coordinates with the given variances.
    Diagonal(&'a [f64]),
    General(&'a SymMatrix),
}

/// `p x n` matrix whose columns are independent `N_p(0, Sigma)` draws.
pub fn draw_data_matrix<R: rand::Rng>(
    p: usize,
    n: usize,
    cov: Covariance<'_>,
    normal: &mut Normal<R>,
) -> Result<Matrix> {
    let mut x = Matrix::zeros(p, n);
    for i in 0..p {
        normal.fill(x.row_mut(i));
    }
    match cov {
        Covariance::Identity => {}
        Covariance::Spiked(model) => {
            let sd = model.base_var.sqrt();
            for i in 0..p {
                let scale = model.spikes.get(i).map_or(sd, |l| l.sqrt());
                x.row_mut(i).iter_mut().for_each(|v| *v *= scale);
            }
        }
        Covariance::Diagonal(vars) => {
            if vars.len() != p || vars.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::domain("diagonal covariance: need p nonnegative variances"));
            }
            for (i, var) in vars.iter().enumerate() {
                let scale = var.sqrt();
                x.row_mut(i).iter_mut().for_each(|v| *v *= scale);
            }
        }
        Covariance::General(sigma) => {
            if sigma.order() != p {
                return Err(Error::domain("covariance order does not match p"));
            }
            let l = cholesky(sigma)?;
            x = l.matmul(&x)?;
        }
    }
    Ok(x)
}

/// [`draw_data_matrix`] on stream 0 of `seed`.
pub fn sample_data_matrix(p: usize, n: usize, cov: Covariance<'_>, seed: u64) -> Result<Matrix> {
    let mut normal = Normal::new(replicate_rng(seed, 0));
    draw_data_matrix(p, n, cov, &mut normal)
}

/// `S = X X^T / n`, after removing row means when `center` is set.
pub fn sample_covariance(x: &Matrix, center: bool) -> SymMatrix {
    let data = if center {
        crate::inference::center_rows(x)
    } else {
        x.clone()
    };
    let mut s = data.row_gram();
    s.scale(1.0 / x.cols() as f64);
    s
}
