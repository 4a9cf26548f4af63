//! PGF of the in-ball count and its power-series coefficients.

use statrs::function::factorial::ln_factorial;

use super::{check_radius, poisson_terms, McpParams};
use crate::error::{invalid, Result};
use crate::geometry::lens_volume;
use crate::quadrature::Quadrature;

/// Kink of `x -> A(r, r_d, x)` inside `(lo, hi)`, if any.
fn kinks(r: f64, r_d: f64, lo: f64, hi: f64) -> Vec<f64> {
    let k = (r - r_d).abs();
    if k > lo && k < hi {
        vec![k]
    } else {
        Vec::new()
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(invalid(format!("PGF argument must lie in [0, 1], got {s}")));
    }
    Ok(())
}

/// Exponent `g(s)` of the PGF of `N = Phi(B(o, r))`:
/// `lambda_p n v_n * int_0^{r+r_d} (exp(lambda_d A(r, r_d, x)(s-1)) - 1) x^{n-1} dx`.
pub fn pgf_exponent(s: f64, r: f64, p: &McpParams) -> Result<f64> {
    check_s(s)?;
    check_radius(r)?;
    if r == 0.0 || s == 1.0 {
        return Ok(0.0);
    }
    let n = p.dim();
    let ni = n.get() as i32;
    let rd = p.cluster_radius();
    let ld = p.daughter_density();
    let upper = r + rd;
    let res = Quadrature::default().integrate(
        |x| (ld * lens_volume(n, r, rd, x) * (s - 1.0)).exp_m1() * x.powi(ni - 1),
        0.0,
        upper,
        &kinks(r, rd, 0.0, upper),
    )?;
    Ok(p.lambda_p() * n.as_f64() * p.unit_volume() * res.value)
}

/// `E[s^N]` for the number of points in `B(o, r)`.
pub fn pgf_count(s: f64, r: f64, p: &McpParams) -> Result<f64> {
    Ok(pgf_exponent(s, r, p)?.exp())
}

/// Closed form of `g(s)` on the line (n = 1), where the lens is piecewise
/// linear in the centre separation.
pub fn pgf_exponent_1d_closed_form(s: f64, r: f64, p: &McpParams) -> Result<f64> {
    check_s(s)?;
    check_radius(r)?;
    if p.dim().get() != 1 {
        return Err(invalid("the closed-form exponent exists only for n = 1"));
    }
    let rd = p.cluster_radius();
    let ld = p.daughter_density();
    let beta = 2.0 * r.min(rd);
    let t = ld * beta * (s - 1.0);
    // (e^t - 1) / (lambda_d (s - 1)) -> beta as s -> 1
    let ramp = if t == 0.0 {
        beta
    } else {
        t.exp_m1() / (ld * (s - 1.0))
    };
    Ok(2.0 * p.lambda_p() * ((r - rd).abs() * t.exp() - (r + rd) + ramp))
}

/// Power-series coefficients of `g` at radius `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct HCoefficients {
    r: f64,
    log_void: f64,
    window_mass: f64,
    coeffs: Vec<f64>,
}

impl HCoefficients {
    pub fn r(&self) -> f64 {
        self.r
    }

    /// `g(0) = h_0(r) - lambda_p v_n (r + r_d)^n`, the log void probability.
    pub fn log_void(&self) -> f64 {
        self.log_void
    }

    /// `lambda_p v_n (r + r_d)^n`.
    pub fn window_mass(&self) -> f64 {
        self.window_mass
    }

    /// `h_k(r)`; `h_0` is `g(0) + lambda_p v_n (r + r_d)^n`.
    pub fn h(&self, k: usize) -> f64 {
        if k == 0 {
            self.log_void + self.window_mass
        } else {
            self.coeffs[k]
        }
    }

    /// Highest available order.
    pub fn max_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `[h_0, h_1, ..., h_K]` (with `h_0` formed as in [`HCoefficients::h`]).
    pub fn to_vec(&self) -> Vec<f64> {
        (0..self.coeffs.len()).map(|k| self.h(k)).collect()
    }

    pub(crate) fn series(&self) -> &[f64] {
        &self.coeffs
    }
}

/// `h_0 .. h_{k_max}` from one shared integration.
///
/// `g(0)` is integrated directly as `-int (1 - e^{-lambda_d A}) x^{n-1}` so
/// that the void probability does not suffer cancellation against the window
/// volume.
pub fn h_coefficients(r: f64, p: &McpParams, k_max: usize) -> Result<HCoefficients> {
    check_radius(r)?;
    let n = p.dim();
    let ni = n.get() as i32;
    let rd = p.cluster_radius();
    let ld = p.daughter_density();
    let upper = r + rd;
    let prefactor = p.lambda_p() * n.as_f64() * p.unit_volume();
    let window_mass = p.lambda_p() * p.unit_volume() * upper.powi(ni);

    if r == 0.0 {
        let mut coeffs = vec![0.0; k_max + 1];
        coeffs[0] = 0.0;
        return Ok(HCoefficients {
            r,
            log_void: 0.0,
            window_mass,
            coeffs,
        });
    }

    let comps = k_max + 1;
    let res = Quadrature::default().integrate_many(
        |x, out| {
            let a = ld * lens_volume(n, r, rd, x);
            let w = x.powi(ni - 1);
            poisson_terms(a, out);
            out[0] = -(-a).exp_m1() * w;
            out[1..].iter_mut().for_each(|v| *v *= w);
        },
        comps,
        0.0,
        upper,
        &kinks(r, rd, 0.0, upper),
    )?;
    let log_void = -prefactor * res.values[0];
    let mut coeffs: Vec<f64> = res.values.iter().map(|v| prefactor * v).collect();
    coeffs[0] = log_void + window_mass;
    Ok(HCoefficients {
        r,
        log_void,
        window_mass,
        coeffs,
    })
}

/// Single coefficient `h_k(r) = g^{(k)}(0) / k!`.
pub fn h_coefficient(r: f64, k: usize, p: &McpParams) -> Result<f64> {
    check_radius(r)?;
    let n = p.dim();
    let ni = n.get() as i32;
    let rd = p.cluster_radius();
    let ld = p.daughter_density();
    let upper = r + rd;
    let prefactor = p.lambda_p() * n.as_f64() * p.unit_volume();
    let ln_kfact = ln_factorial(k as u64);
    let res = Quadrature::default().integrate(
        |x| {
            let a = ld * lens_volume(n, r, rd, x);
            let term = if k == 0 {
                (-a).exp()
            } else if a <= 0.0 {
                0.0
            } else if k <= 20 {
                a.powi(k as i32) * (-a).exp() / ln_kfact.exp()
            } else {
                (k as f64 * a.ln() - a - ln_kfact).exp()
            };
            term * x.powi(ni - 1)
        },
        0.0,
        upper,
        &kinks(r, rd, 0.0, upper),
    )?;
    Ok(prefactor * res.value)
}

/// `q_0(r) .. q_{j_max}(r)`: probabilities that the typical point has exactly
/// `j` cluster siblings inside `B(o, r)`.
pub fn q_weights(r: f64, p: &McpParams, j_max: usize) -> Result<Vec<f64>> {
    check_radius(r)?;
    let n = p.dim();
    let ni = n.get() as i32;
    let rd = p.cluster_radius();
    let ld = p.daughter_density();
    let nf = n.as_f64();
    // y = u r_d, u in [0, 1]
    let kink = (r - rd).abs() / rd;
    let bps: Vec<f64> = if kink > 0.0 && kink < 1.0 {
        vec![kink]
    } else {
        Vec::new()
    };
    let res = Quadrature::default().integrate_many(
        |u, out| {
            let a = ld * lens_volume(n, r, rd, u * rd);
            poisson_terms(a, out);
            let w = nf * u.powi(ni - 1);
            out.iter_mut().for_each(|v| *v *= w);
        },
        j_max + 1,
        0.0,
        1.0,
        &bps,
    )?;
    Ok(res.values)
}

pub fn q_weight(r: f64, j: usize, p: &McpParams) -> Result<f64> {
    Ok(q_weights(r, p, j)?[j])
}

/// `int_0^{r_d} exp((s-1) lambda_d A(r, r_d, y)) n y^{n-1} / r_d^n dy`, the
/// typical-cluster factor of the reduced Palm PGF.
pub fn palm_factor(s: f64, r: f64, p: &McpParams) -> Result<f64> {
    check_s(s)?;
    check_radius(r)?;
    let n = p.dim();
    let ni = n.get() as i32;
    let rd = p.cluster_radius();
    let ld = p.daughter_density();
    let nf = n.as_f64();
    let kink = (r - rd).abs() / rd;
    let bps: Vec<f64> = if kink > 0.0 && kink < 1.0 {
        vec![kink]
    } else {
        Vec::new()
    };
    let res = Quadrature::default().integrate(
        |u| ((s - 1.0) * ld * lens_volume(n, r, rd, u * rd)).exp() * nf * u.powi(ni - 1),
        0.0,
        1.0,
        &bps,
    )?;
    Ok(res.value)
}

/// PGF of the in-ball count under the reduced Palm distribution.
pub fn pgf_count_palm(s: f64, r: f64, p: &McpParams) -> Result<f64> {
    Ok(pgf_count(s, r, p)? * palm_factor(s, r, p)?)
}
