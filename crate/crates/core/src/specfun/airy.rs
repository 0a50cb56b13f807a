//! Airy function `Ai` and its derivative.
//!
//! Three regimes:
//!
//! * `|x| <= 8`: Maclaurin series `Ai = c1 f(x) - c2 g(x)`. The two series
//!   grow like `exp(2/3 |x|^{3/2})` while `Ai` itself decays on the right and
//!   oscillates on the left, so the sums and the final difference are carried
//!   in double-double arithmetic.
//! * `x > 8`: the exponentially decaying asymptotic expansion.
//! * `x < -8`: the oscillatory asymptotic expansion written with a modulus
//!   `z^{-1/4}/sqrt(pi)` and phase `zeta - pi/4`.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};

/// Value of `Ai` and `Ai'` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub ai: f64,
    pub ai_prime: f64,
}

/// Largest `|x|` accepted by [`airy_ai`].
pub const AIRY_MAX_ABS_ARG: f64 = 200.0;

const SERIES_LIMIT: f64 = 8.0;

// Ai(0) and -Ai'(0) split into high and low words.
const AI0: Dd = Dd {
    hi: 0.355_028_053_887_817_2,
    lo: 2.052_336_324_362_12e-17,
};
const MINUS_AIP0: Dd = Dd {
    hi: 0.258_819_403_792_806_8,
    lo: -2.522_243_111_610_832e-17,
};

/// Evaluates `Ai(x)` and `Ai'(x)`.
///
/// Absolute error is below `1e-12` on `|x| <= 10`; relative error is below
/// `1e-8` for `x > 10` until `Ai` underflows (around `x = 105`).
pub fn airy_ai(x: f64) -> Result<AiryValue> {
    if !x.is_finite() {
        return Err(Error::domain(format!("airy_ai: non-finite argument {x}")));
    }
    if x.abs() > AIRY_MAX_ABS_ARG {
        return Err(Error::domain(format!(
            "airy_ai: |x| = {} exceeds {AIRY_MAX_ABS_ARG}",
            x.abs()
        )));
    }
    Ok(if x.abs() <= SERIES_LIMIT {
        maclaurin(x)
    } else if x > 0.0 {
        decaying_asymptotic(x)
    } else {
        oscillatory_asymptotic(-x)
    })
}

fn maclaurin(x: f64) -> AiryValue {
    let x3 = Dd::from(x).mul(Dd::from(x)).mul(Dd::from(x));

    // f = sum a_k, g = sum b_k and their derivatives f' = sum d_k, g' = sum e_k.
    let mut a = Dd::from(1.0);
    let mut b = Dd::from(x);
    let mut d = Dd::from(0.5 * x * x);
    let mut e = Dd::from(1.0);
    let (mut f, mut g, mut fp, mut gp) = (a, b, d, e);

    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        a = a.mul(x3).div_f64((k3 - 1.0) * k3);
        b = b.mul(x3).div_f64(k3 * (k3 + 1.0));
        e = e.mul(x3).div_f64((k3 - 2.0) * k3);
        if k > 1 {
            d = d.mul(x3).div_f64((k3 - 3.0) * (k3 - 1.0));
        }
        f = f.add(a);
        g = g.add(b);
        if k > 1 {
            fp = fp.add(d);
        }
        gp = gp.add(e);

        let small = |t: Dd, s: Dd| t.hi.abs() <= 1e-33 * s.hi.abs().max(1e-300);
        if small(a, f) && small(b, g) && small(d, fp) && small(e, gp) {
            break;
        }
    }

    let ai = AI0.mul(f).add(MINUS_AIP0.mul(g).neg());
    let ai_prime = AI0.mul(fp).add(MINUS_AIP0.mul(gp).neg());
    AiryValue {
        ai: ai.to_f64(),
        ai_prime: ai_prime.to_f64(),
    }
}

/// `sum (-1)^k u_k / zeta^k` and the matching `v_k` sum, truncated where the
/// terms stop decreasing.
fn decaying_sums(zeta: f64) -> (f64, f64) {
    let mut sum_u = 1.0;
    let mut sum_v = 1.0;
    let mut u = 1.0_f64;
    let mut zpow = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 1..100 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        zpow *= zeta;
        let (term_u, term_v) = (u / zpow, v / zpow);
        if term_u.abs() >= prev {
            break;
        }
        prev = term_u.abs();
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        sum_u += sign * term_u;
        sum_v += sign * term_v;
        if term_u.abs() < 1e-17 && term_v.abs() < 1e-17 {
            break;
        }
    }
    (sum_u, sum_v)
}

fn decaying_asymptotic(x: f64) -> AiryValue {
    let sx = x.sqrt();
    let zeta = 2.0 / 3.0 * x * sx;
    let (sum_u, sum_v) = decaying_sums(zeta);
    let x14 = sx.sqrt();
    let pref = (-zeta).exp() / (2.0 * PI.sqrt());
    AiryValue {
        ai: pref / x14 * sum_u,
        ai_prime: -pref * x14 * sum_v,
    }
}

fn oscillatory_asymptotic(z: f64) -> AiryValue {
    let sz = z.sqrt();
    let zeta = 2.0 / 3.0 * z * sz;
    // Even-index terms carry (-1)^{k/2}, odd-index terms (-1)^{(k-1)/2}.
    let mut u_even = 0.0;
    let mut u_odd = 0.0;
    let mut v_even = 0.0;
    let mut v_odd = 0.0;
    let mut u = 1.0_f64;
    let mut zpow = 1.0_f64;
    let mut prev = f64::INFINITY;
    for k in 0..100 {
        let kf = k as f64;
        if k > 0 {
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            zpow *= zeta;
        }
        let v = if k == 0 {
            1.0
        } else {
            -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u
        };
        let term_u = u / zpow;
        let term_v = v / zpow;
        if term_u.abs() >= prev {
            break;
        }
        prev = term_u.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            u_even += sign * term_u;
            v_even += sign * term_v;
        } else {
            u_odd += sign * term_u;
            v_odd += sign * term_v;
        }
        if k > 0 && term_u.abs() < 1e-17 && term_v.abs() < 1e-17 {
            break;
        }
    }
    let phase = zeta - FRAC_PI_4;
    let (sin, cos) = phase.sin_cos();
    let z14 = sz.sqrt();
    let modulus = 1.0 / PI.sqrt();
    AiryValue {
        ai: modulus / z14 * (cos * u_even + sin * u_odd),
        ai_prime: modulus * z14 * (sin * v_even - cos * v_odd),
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl From<f64> for Dd {
    fn from(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd {
        hi: s,
        lo: b - (s - a),
    }
}

impl Dd {
    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let e = e + t;
        let r = quick_two_sum(s, e);
        quick_two_sum(r.hi, r.lo + f)
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn mul(self, other: Dd) -> Dd {
        let p = self.hi * other.hi;
        let e = self.hi.mul_add(other.hi, -p);
        quick_two_sum(p, e + (self.hi * other.lo + self.lo * other.hi))
    }

    fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let p = q1 * b;
        let pe = q1.mul_add(b, -p);
        let (s, e) = two_sum(self.hi, -p);
        let q2 = (s + (e - pe + self.lo)) / b;
        quick_two_sum(q1, q2)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}
