//! Per-replicate random streams and Gaussian variates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random stream for replicate `r`: the ChaCha8 key comes from `seed`
/// (expanded by `seed_from_u64`) and the stream number is `r`, so every
/// replicate draws from its own non-overlapping sequence regardless of
/// which thread runs it.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Standard normal variates by the Box-Muller transform.
pub struct Normal<R> {
    rng: R,
    spare: Option<f64>,
}

impl<R: Rng> Normal<R> {
    pub fn new(rng: R) -> Self {
        Normal { rng, spare: None }
    }

    pub fn sample(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2 = self.rng.gen::<f64>();
        let radius = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(radius * s);
        radius * c
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.sample();
        }
    }
}
