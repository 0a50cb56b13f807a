//! Hastings-McLeod solution of Painleve II, `q'' = s q + 2 q^3` with
//! `q(s) ~ Ai(s)` as `s -> inf`.
//!
//! The solution is a separatrix: perturbations grow like
//! `exp((2 sqrt 2 / 3) |s|^{3/2})` when integrating to the left, so a plain
//! initial-value integration from the Airy data loses all accuracy near
//! `s = -8` in double precision. The solver therefore works in two passes:
//!
//! 1. an adaptive Dormand-Prince 5(4) integration backwards from `s_max`
//!    with `q(s_max) = Ai(s_max)`, `q'(s_max) = Ai'(s_max)`, carried down to
//!    `s = -6` where it is still accurate to about `1e-7`; below that the
//!    left asymptotic series `q ~ sqrt(-s/2) (1 + 1/(8 s^3) - ...)` supplies
//!    the starting values;
//! 2. a Newton iteration on the fourth-order Numerov discretization of the
//!    equation over the whole grid, with `q(s_max) = Ai(s_max)` and the
//!    asymptotic series value at `s_min` as boundary conditions. The
//!    two-point problem is well conditioned, so the result is uniformly
//!    accurate to `O(h^4)`.

use super::airy::airy_ai;
use crate::error::{Error, Result};

/// The Painleve II solution tabulated on a uniform grid.
#[derive(Debug, Clone)]
pub struct PainleveSolution {
    pub grid: Vec<f64>,
    pub q: Vec<f64>,
    pub q_prime: Vec<f64>,
    pub diagnostics: PainleveDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PainleveDiagnostics {
    /// Left end of the initial-value integration.
    pub join: f64,
    /// Accepted Runge-Kutta steps.
    pub rk_steps: usize,
    /// Newton iterations of the boundary-value polish.
    pub newton_iterations: usize,
    /// Largest change the polish made to the Runge-Kutta values.
    pub max_polish_correction: f64,
}

impl PainleveSolution {
    /// `q'' - s q - 2 q^3` at nodes with a full five-point stencil, with
    /// `q''` from the fourth-order central difference.
    pub fn residuals(&self) -> Vec<(f64, f64)> {
        let h = self.grid[1] - self.grid[0];
        let q = &self.q;
        (2..q.len().saturating_sub(2))
            .map(|i| {
                let second = (-q[i - 2] + 16.0 * q[i - 1] - 30.0 * q[i] + 16.0 * q[i + 1]
                    - q[i + 2])
                    / (12.0 * h * h);
                (self.grid[i], second - rhs(self.grid[i], q[i]))
            })
            .collect()
    }
}

/// Left end of the initial-value pass.
const JOIN: f64 = -6.0;
/// Local error tolerance per Runge-Kutta step.
const RK_TOL: f64 = 1e-10;
const BLOW_UP: f64 = 1e6;

// q(s) = sqrt(-s/2) * (1 + sum_k c_k s^{-3k}) as s -> -inf.
const LEFT_SERIES: [f64; 6] = [
    1.0 / 8.0,
    -73.0 / 128.0,
    10657.0 / 1024.0,
    -13912277.0 / 32768.0,
    8045883943.0 / 262144.0,
    -14518451390349.0 / 4194304.0,
];

/// Left asymptotic series for `q` and `q'`, valid for `s <= -6`.
pub fn left_asymptote(s: f64) -> (f64, f64) {
    debug_assert!(s < 0.0);
    let r = (-s / 2.0).sqrt();
    let inv3 = 1.0 / (s * s * s);
    let mut series = 1.0;
    let mut series_prime = 0.0;
    let mut pow = 1.0;
    let mut prev = f64::INFINITY;
    for (k, c) in LEFT_SERIES.iter().enumerate() {
        pow *= inv3;
        let term = c * pow;
        if term.abs() >= prev {
            break;
        }
        prev = term.abs();
        let order = 3.0 * (k as f64 + 1.0);
        series += term;
        series_prime += -order * term / s;
    }
    let r_prime = -1.0 / (4.0 * r);
    (r * series, r_prime * series + r * series_prime)
}

#[inline]
fn rhs(s: f64, q: f64) -> f64 {
    s * q + 2.0 * q * q * q
}

/// Solves Painleve II on `[s_min, s_max]` and tabulates `q`, `q'` on a
/// uniform grid whose spacing is the largest value not exceeding `step`
/// that divides the interval evenly.
pub fn solve_painleve_ii(s_min: f64, s_max: f64, step: f64) -> Result<PainleveSolution> {
    if !(s_min.is_finite() && s_max.is_finite() && step.is_finite()) {
        return Err(Error::domain("solve_painleve_ii: non-finite argument"));
    }
    if s_min >= -8.0 {
        return Err(Error::domain(format!(
            "solve_painleve_ii: s_min = {s_min} must be below -8"
        )));
    }
    if s_max <= 5.0 || s_max > 100.0 {
        return Err(Error::domain(format!(
            "solve_painleve_ii: s_max = {s_max} must lie in (5, 100]"
        )));
    }
    if step <= 0.0 || step > 0.25 {
        return Err(Error::domain(format!(
            "solve_painleve_ii: step = {step} must lie in (0, 0.25]"
        )));
    }

    let intervals = ((s_max - s_min) / step - 1e-9).ceil() as usize;
    let h = (s_max - s_min) / intervals as f64;
    let mut grid: Vec<f64> = (0..=intervals).map(|i| s_min + i as f64 * h).collect();
    grid[intervals] = s_max;

    let (mut q, rk_steps) = initial_guess(&grid)?;
    let before = q.clone();

    let right = airy_ai(s_max)?;
    let (left_q, left_qp) = left_asymptote(s_min);
    q[0] = left_q;
    q[intervals] = right.ai;
    let newton_iterations = numerov_polish(&grid, h, &mut q)?;

    let max_polish_correction = q
        .iter()
        .zip(&before)
        .skip(1)
        .take(intervals - 1)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let mut q_prime = vec![0.0; grid.len()];
    q_prime[0] = left_qp;
    q_prime[intervals] = right.ai_prime;
    for i in 1..intervals {
        let f_hi = rhs(grid[i + 1], q[i + 1]);
        let f_lo = rhs(grid[i - 1], q[i - 1]);
        q_prime[i] = (q[i + 1] - q[i - 1]) / (2.0 * h) - h * (f_hi - f_lo) / 12.0;
    }

    if let Some(i) = q.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Integration(format!(
            "solve_painleve_ii: q({}) = {} is not positive; left the Hastings-McLeod branch",
            grid[i], q[i]
        )));
    }

    Ok(PainleveSolution {
        grid,
        q,
        q_prime,
        diagnostics: PainleveDiagnostics {
            join: JOIN,
            rk_steps,
            newton_iterations,
            max_polish_correction,
        },
    })
}

/// Backward Runge-Kutta values on the grid nodes down to [`JOIN`], left
/// asymptote beyond.
fn initial_guess(grid: &[f64]) -> Result<(Vec<f64>, usize)> {
    let n = grid.len();
    let mut q = vec![0.0; n];
    let s_max = grid[n - 1];
    let start = airy_ai(s_max)?;
    let mut state = [start.ai, start.ai_prime];
    q[n - 1] = state[0];

    let mut dp = DormandPrince::new(RK_TOL);
    let mut s = s_max;
    let mut trial = -0.01;
    for i in (0..n - 1).rev() {
        let target = grid[i];
        if target < JOIN {
            q[i] = left_asymptote(target).0;
            continue;
        }
        while s > target {
            let remaining = target - s;
            let attempt = if trial < remaining { remaining } else { trial };
            let (next, err) = dp.step(s, &state, attempt);
            if err <= 1.0 {
                s += attempt;
                if attempt == remaining {
                    s = target;
                }
                state = next;
                dp.accepted += 1;
                if state[0].abs() > BLOW_UP || !state[0].is_finite() {
                    return Err(Error::Integration(format!(
                        "solve_painleve_ii: |q| exceeded {BLOW_UP:e} at s = {s}"
                    )));
                }
            }
            trial = attempt * DormandPrince::step_factor(err);
            if trial.abs() < 1e-12 {
                return Err(Error::Integration(format!(
                    "solve_painleve_ii: step size underflow at s = {s}"
                )));
            }
        }
        q[i] = state[0];
    }
    Ok((q, dp.accepted))
}

/// Newton iteration on the Numerov equations
/// `q[i+1] - 2 q[i] + q[i-1] = h^2/12 (f[i+1] + 10 f[i] + f[i-1])`
/// with the end values held fixed.
fn numerov_polish(grid: &[f64], h: f64, q: &mut [f64]) -> Result<usize> {
    let n = grid.len();
    let m = n - 2;
    let c = h * h / 12.0;
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let mut r = vec![0.0; m];

    for iteration in 1..=50 {
        let f: Vec<f64> = grid.iter().zip(q.iter()).map(|(&s, &v)| rhs(s, v)).collect();
        let df: Vec<f64> = grid
            .iter()
            .zip(q.iter())
            .map(|(&s, &v)| s + 6.0 * v * v)
            .collect();
        for k in 0..m {
            let i = k + 1;
            r[k] = -(q[i + 1] - 2.0 * q[i] + q[i - 1] - c * (f[i + 1] + 10.0 * f[i] + f[i - 1]));
            diag[k] = -2.0 - 10.0 * c * df[i];
            sub[k] = 1.0 - c * df[i - 1];
            sup[k] = 1.0 - c * df[i + 1];
        }
        let delta = solve_tridiagonal(&sub, &diag, &sup, &r)?;
        let mut max_delta: f64 = 0.0;
        for k in 0..m {
            q[k + 1] += delta[k];
            max_delta = max_delta.max(delta[k].abs() / q[k + 1].abs().max(1e-300));
        }
        if !max_delta.is_finite() {
            return Err(Error::Integration(
                "solve_painleve_ii: Newton polish produced non-finite values".into(),
            ));
        }
        // Quadratic convergence reaches the rounding floor (a few 1e-14) in
        // two or three steps.
        if max_delta < 1e-12 {
            return Ok(iteration);
        }
    }
    Err(Error::Integration(
        "solve_painleve_ii: Newton polish did not converge in 50 iterations".into(),
    ))
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut pivot = diag[0];
    for k in 0..m {
        if k > 0 {
            pivot = diag[k] - sub[k] * c[k - 1];
        }
        if pivot.abs() < 1e-300 {
            return Err(Error::numerical("tridiagonal solve: zero pivot"));
        }
        c[k] = sup[k] / pivot;
        d[k] = (rhs[k] - if k > 0 { sub[k] * d[k - 1] } else { 0.0 }) / pivot;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = d[m - 1];
    for k in (0..m - 1).rev() {
        x[k] = d[k] - c[k] * x[k + 1];
    }
    Ok(x)
}

/// Dormand-Prince 5(4) embedded pair for `y'' = s y + 2 y^3` as a first
/// order system.
struct DormandPrince {
    tol: f64,
    accepted: usize,
}

impl DormandPrince {
    const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B_LOW: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    fn new(tol: f64) -> Self {
        DormandPrince { tol, accepted: 0 }
    }

    fn field(s: f64, y: &[f64; 2]) -> [f64; 2] {
        [y[1], rhs(s, y[0])]
    }

    /// One trial step; returns the fifth-order solution and the error norm
    /// relative to the tolerance.
    fn step(&self, s: f64, y: &[f64; 2], h: f64) -> ([f64; 2], f64) {
        let mut k = [[0.0; 2]; 7];
        for stage in 0..7 {
            let mut ys = *y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                let a = Self::A[stage][j];
                ys[0] += h * a * kj[0];
                ys[1] += h * a * kj[1];
            }
            k[stage] = Self::field(s + Self::C[stage] * h, &ys);
        }
        let mut high = *y;
        let mut err = [0.0; 2];
        for (stage, ks) in k.iter().enumerate() {
            for d in 0..2 {
                high[d] += h * Self::B[stage] * ks[d];
                err[d] += h * (Self::B[stage] - Self::B_LOW[stage]) * ks[d];
            }
        }
        let norm = (0..2)
            .map(|d| err[d].abs() / (self.tol * (1.0 + y[d].abs().max(high[d].abs()))))
            .fold(0.0, f64::max);
        (high, norm)
    }

    fn step_factor(err: f64) -> f64 {
        if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solution() -> PainleveSolution {
        solve_painleve_ii(-13.0, 8.0, 0.005).unwrap()
    }

    #[test]
    fn matches_airy_data_at_right_end() {
        let sol = solution();
        let last = sol.grid.len() - 1;
        let ai = airy_ai(8.0).unwrap().ai;
        assert!((sol.q[last] / ai - 1.0).abs() < 1e-6);
    }

    #[test]
    fn left_tail_tracks_square_root_asymptote() {
        let sol = solution();
        let i = sol.grid.iter().position(|&s| (s + 6.0).abs() < 1e-9).unwrap();
        let ratio = sol.q[i] / 3.0_f64.sqrt();
        assert!((ratio - 1.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn positive_everywhere() {
        assert!(solution().q.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn residual_is_small_at_every_interior_node() {
        let sol = solution();
        let worst = sol.residuals().iter().fold(0.0_f64, |m, r| m.max(r.1.abs()));
        assert!(worst < 1e-6, "{worst}");
    }

    #[test]
    fn derivative_matches_left_asymptote() {
        let sol = solution();
        for i in [1, 100, 400] {
            let (_, qp) = left_asymptote(sol.grid[i]);
            assert!((sol.q_prime[i] - qp).abs() < 1e-6, "s = {}", sol.grid[i]);
        }
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(solve_painleve_ii(-7.0, 8.0, 0.01).is_err());
        assert!(solve_painleve_ii(-10.0, 4.0, 0.01).is_err());
        assert!(solve_painleve_ii(-10.0, 8.0, 0.0).is_err());
        assert!(solve_painleve_ii(f64::NAN, 8.0, 0.01).is_err());
    }

    #[test]
    fn polish_only_touches_the_unstable_region() {
        // On the right the Runge-Kutta pass is already accurate, so the
        // polish should make at most small corrections there.
        let sol = solution();
        assert!(sol.diagnostics.max_polish_correction < 1e-3);
        assert!(sol.diagnostics.rk_steps > 0);
    }
}
