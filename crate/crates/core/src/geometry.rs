//! n-ball volumes and two-ball intersection (lens) volumes.
//!
//! The general-dimension lens is split at the radical hyperplane into two
//! hyperspherical caps; each cap is a regularized incomplete beta function of
//! its height. Dimensions 1, 2 and 3 use the closed forms directly.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{invalid, Result};

/// Spatial dimension, at least 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }
}

impl TryFrom<u32> for Dimension {
    type Error = crate::Error;
    fn try_from(n: u32) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Two balls: `B(o, r)` and `B(x e1, r_d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensSpec {
    r: f64,
    r_d: f64,
    x: f64,
}

impl LensSpec {
    pub fn new(r: f64, r_d: f64, x: f64) -> Result<Self> {
        if !(r.is_finite() && r_d.is_finite() && x.is_finite()) {
            return Err(invalid("lens radii and separation must be finite"));
        }
        if r < 0.0 || x < 0.0 {
            return Err(invalid("lens radius and separation must be non-negative"));
        }
        if r_d <= 0.0 {
            return Err(invalid("second lens radius must be positive"));
        }
        Ok(LensSpec { r, r_d, x })
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn r_d(&self) -> f64 {
        self.r_d
    }
    pub fn x(&self) -> f64 {
        self.x
    }
}

/// Volume of the unit n-ball, `pi^(n/2) / Gamma(n/2 + 1)`.
pub fn unit_ball_volume(n: Dimension) -> f64 {
    match n.get() {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => {
            let half = n.as_f64() / 2.0;
            PI.powf(half) / gamma(half + 1.0)
        }
    }
}

pub fn ball_volume(n: Dimension, radius: f64) -> f64 {
    unit_ball_volume(n) * radius.powi(n.get() as i32)
}

/// Volume of a cap of height `h` cut from an n-ball of radius `radius`,
/// `0 <= h <= 2 radius`.
pub fn cap_volume(n: Dimension, radius: f64, h: f64) -> f64 {
    let h = h.clamp(0.0, 2.0 * radius);
    if h > radius {
        return ball_volume(n, radius) - cap_volume(n, radius, 2.0 * radius - h);
    }
    let z = ((2.0 * radius * h - h * h) / (radius * radius)).clamp(0.0, 1.0);
    0.5 * ball_volume(n, radius) * beta_reg(0.5 * (n.as_f64() + 1.0), 0.5, z)
}

/// `vol(B(o, r) ∩ B(x e1, r_d))` in n dimensions.
pub fn intersection_volume(spec: &LensSpec, n: Dimension) -> f64 {
    lens_volume(n, spec.r, spec.r_d, spec.x)
}

/// Unchecked form of [`intersection_volume`] used on hot integration paths.
pub(crate) fn lens_volume(n: Dimension, r: f64, r_d: f64, x: f64) -> f64 {
    if r <= 0.0 || r_d <= 0.0 {
        return 0.0;
    }
    let small = r.min(r_d);
    if x <= (r - r_d).abs() {
        return ball_volume(n, small);
    }
    if x >= r + r_d {
        return 0.0;
    }
    let v = match n.get() {
        1 => r + r_d - x,
        2 => circular_lens(r, r_d, x),
        3 => spherical_lens(r, r_d, x),
        _ => cap_lens(n, r, r_d, x),
    };
    v.clamp(0.0, ball_volume(n, small))
}

/// Cap heights `(h1, h2)` cut from the balls of radius `r` and `r_d` by the
/// radical hyperplane, in a factored form that stays accurate near tangency.
fn lens_heights(r: f64, r_d: f64, x: f64) -> (f64, f64) {
    let s = r + r_d - x;
    let h1 = s * (x + r_d - r) / (2.0 * x);
    let h2 = s * (x + r - r_d) / (2.0 * x);
    (h1.clamp(0.0, 2.0 * r), h2.clamp(0.0, 2.0 * r_d))
}

/// Lens volume as two caps split at the radical hyperplane.
pub(crate) fn cap_lens(n: Dimension, r: f64, r_d: f64, x: f64) -> f64 {
    let (h1, h2) = lens_heights(r, r_d, x);
    cap_volume(n, r, h1) + cap_volume(n, r_d, h2)
}

/// `t - sin t` without cancellation for small `t`.
fn t_minus_sin(t: f64) -> f64 {
    if t >= 0.5 {
        return t - t.sin();
    }
    let t2 = t * t;
    // t^3/3! - t^5/5! + ... through t^21
    let mut term = t * t2 / 6.0;
    let mut sum = term;
    for k in 2..=10 {
        let j = (2 * k) as f64;
        term *= -t2 / (j * (j + 1.0));
        sum += term;
    }
    sum
}

fn disk_cap(radius: f64, h: f64) -> f64 {
    if h > radius {
        return PI * radius * radius - disk_cap(radius, 2.0 * radius - h);
    }
    let half_angle = 2.0 * (0.5 * h / radius).sqrt().min(1.0).asin();
    0.5 * radius * radius * t_minus_sin(2.0 * half_angle)
}

fn circular_lens(r: f64, r_d: f64, x: f64) -> f64 {
    let (h1, h2) = lens_heights(r, r_d, x);
    disk_cap(r, h1) + disk_cap(r_d, h2)
}

fn spherical_lens(r: f64, r_d: f64, x: f64) -> f64 {
    let cap = |radius: f64, h: f64| PI * h * h * (3.0 * radius - h) / 3.0;
    let (h1, h2) = lens_heights(r, r_d, x);
    cap(r, h1) + cap(r_d, h2)
}

const BETA_CF_TOL: f64 = 1e-12;
const BETA_CF_MAX_ITER: usize = 500;

/// Regularized incomplete beta function `I_x(a, b)` by Lentz's continued
/// fraction.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETA_CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETA_CF_TOL {
            break;
        }
    }
    h
}
