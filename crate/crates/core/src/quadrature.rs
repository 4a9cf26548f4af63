//! Globally adaptive Gauss–Kronrod (7, 15) integration on a finite interval.
//!
//! The interval is first cut at the caller's breakpoints, then the segment
//! with the worst error relative to its component tolerance is bisected until
//! every component meets `max(abs_tol, rel_tol * |value|)`. The vector form
//! integrates several integrands sharing the same abscissae in one pass.

use crate::error::{invalid, Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const DEFAULT_ABS_TOL: f64 = 1e-10;
pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_EVALUATIONS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiQuadratureResult {
    pub values: Vec<f64>,
    pub abs_error_estimates: Vec<f64>,
    pub evaluations: usize,
}

/// Tolerances and evaluation budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evaluations: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            abs_tol: DEFAULT_ABS_TOL,
            rel_tol: DEFAULT_REL_TOL,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
        }
    }
}

/// Integrates `f` over `[a, b]`, splitting first at `breakpoints`.
pub fn integrate<F>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    Quadrature {
        abs_tol,
        rel_tol,
        ..Quadrature::default()
    }
    .integrate(f, a, b, breakpoints)
}

struct Segment {
    a: f64,
    b: f64,
    values: Vec<f64>,
    errors: Vec<f64>,
    splittable: bool,
}

impl Quadrature {
    pub fn integrate<F>(
        &self,
        mut f: F,
        a: f64,
        b: f64,
        breakpoints: &[f64],
    ) -> Result<QuadratureResult>
    where
        F: FnMut(f64) -> f64,
    {
        let res = self.integrate_many(|x, out| out[0] = f(x), 1, a, b, breakpoints)?;
        Ok(QuadratureResult {
            value: res.values[0],
            abs_error_estimate: res.abs_error_estimates[0],
            evaluations: res.evaluations,
        })
    }

    /// Integrates `components` functions at once; `f(x, out)` fills
    /// `out[..components]`.
    pub fn integrate_many<F>(
        &self,
        mut f: F,
        components: usize,
        a: f64,
        b: f64,
        breakpoints: &[f64],
    ) -> Result<MultiQuadratureResult>
    where
        F: FnMut(f64, &mut [f64]),
    {
        self.check(a, b, breakpoints)?;
        if components == 0 || a == b {
            return Ok(MultiQuadratureResult {
                values: vec![0.0; components],
                abs_error_estimates: vec![0.0; components],
                evaluations: 0,
            });
        }

        let mut cuts: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
        cuts.push(a);
        cuts.extend(breakpoints.iter().copied().filter(|&c| c > a && c < b));
        cuts.push(b);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut scratch = vec![0.0; 15 * components];
        let mut evaluations = 0usize;
        let mut segments: Vec<Segment> = Vec::new();
        for w in cuts.windows(2) {
            segments.push(gk15(&mut f, w[0], w[1], components, &mut scratch));
            evaluations += 15;
        }

        let mut totals = vec![0.0; components];
        let mut errors = vec![0.0; components];
        loop {
            totals.iter_mut().for_each(|t| *t = 0.0);
            errors.iter_mut().for_each(|e| *e = 0.0);
            for s in &segments {
                for i in 0..components {
                    totals[i] += s.values[i];
                    errors[i] += s.errors[i];
                }
            }
            let tols: Vec<f64> = totals
                .iter()
                .map(|v| self.abs_tol.max(self.rel_tol * v.abs()))
                .collect();
            if errors.iter().zip(&tols).all(|(e, t)| e <= t) {
                break;
            }

            let worst = segments
                .iter()
                .enumerate()
                .filter(|(_, s)| s.splittable)
                .map(|(idx, s)| {
                    let score = s
                        .errors
                        .iter()
                        .zip(&tols)
                        .map(|(e, t)| e / t)
                        .fold(0.0, f64::max);
                    (idx, score)
                })
                .max_by(|x, y| x.1.total_cmp(&y.1));

            let Some((idx, _)) = worst else {
                return Err(self.non_convergence(a, b, evaluations, &errors));
            };
            if evaluations + 30 > self.max_evaluations {
                return Err(self.non_convergence(a, b, evaluations, &errors));
            }

            let seg = segments.swap_remove(idx);
            let mid = 0.5 * (seg.a + seg.b);
            if !(mid > seg.a && mid < seg.b)
                || (seg.b - seg.a) <= 1e-13 * (a.abs() + b.abs() + 1e-300)
            {
                segments.push(Segment {
                    splittable: false,
                    ..seg
                });
                continue;
            }
            segments.push(gk15(&mut f, seg.a, mid, components, &mut scratch));
            segments.push(gk15(&mut f, mid, seg.b, components, &mut scratch));
            evaluations += 30;
        }

        // final sums in left-to-right order
        segments.sort_by(|x, y| x.a.total_cmp(&y.a));
        let mut values = vec![0.0; components];
        let mut abs_error_estimates = vec![0.0; components];
        for s in &segments {
            for i in 0..components {
                values[i] += s.values[i];
                abs_error_estimates[i] += s.errors[i];
            }
        }
        Ok(MultiQuadratureResult {
            values,
            abs_error_estimates,
            evaluations,
        })
    }

    fn check(&self, a: f64, b: f64, breakpoints: &[f64]) -> Result<()> {
        if !(a.is_finite() && b.is_finite()) || a > b {
            return Err(invalid(format!(
                "integration interval [{a}, {b}] is not valid"
            )));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(invalid("quadrature tolerances must be positive"));
        }
        if let Some(c) = breakpoints.iter().find(|c| !(**c >= a && **c <= b)) {
            return Err(invalid(format!("breakpoint {c} outside [{a}, {b}]")));
        }
        Ok(())
    }

    fn non_convergence(&self, a: f64, b: f64, evaluations: usize, errors: &[f64]) -> Error {
        Error::QuadratureNonConvergence {
            a,
            b,
            evaluations,
            error_estimate: errors.iter().copied().fold(0.0, f64::max),
        }
    }
}

fn gk15<F>(f: &mut F, a: f64, b: f64, dim: usize, scratch: &mut [f64]) -> Segment
where
    F: FnMut(f64, &mut [f64]),
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    // scratch rows: 0 = center, 2j+1 / 2j+2 = center -/+ half * XGK[j]
    f(center, &mut scratch[..dim]);
    for j in 0..7 {
        let dx = half * XGK[j];
        let (lo, rest) = scratch[(2 * j + 1) * dim..].split_at_mut(dim);
        f(center - dx, lo);
        f(center + dx, &mut rest[..dim]);
    }

    let mut values = vec![0.0; dim];
    let mut errors = vec![0.0; dim];
    for i in 0..dim {
        let fc = scratch[i];
        let mut kron = WGK[7] * fc;
        let mut gauss = WG[3] * fc;
        let mut resabs = (WGK[7] * fc).abs();
        for j in 0..7 {
            let f1 = scratch[(2 * j + 1) * dim + i];
            let f2 = scratch[(2 * j + 2) * dim + i];
            kron += WGK[j] * (f1 + f2);
            resabs += WGK[j] * (f1.abs() + f2.abs());
            if j % 2 == 1 {
                gauss += WG[j / 2] * (f1 + f2);
            }
        }
        let mean = 0.5 * kron;
        let mut resasc = WGK[7] * (fc - mean).abs();
        for j in 0..7 {
            let f1 = scratch[(2 * j + 1) * dim + i];
            let f2 = scratch[(2 * j + 2) * dim + i];
            resasc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
        }
        let resabs = resabs * half.abs();
        let resasc = resasc * half.abs();
        values[i] = kron * half;
        errors[i] = rescale_error((kron - gauss) * half, resabs, resasc);
    }
    Segment {
        a,
        b,
        values,
        errors,
        splittable: true,
    }
}

fn rescale_error(err: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = err.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}
