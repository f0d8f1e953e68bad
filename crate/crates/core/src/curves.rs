//! Closed-form saddle-node curves in the `(V+, V−)` plane and the cusp
//! where the two branches of the parametric curve meet.
//!
//! Every curve has the form `V− = −σ_off·arcsinh[(Bτ+/Aτ−)·sinh(V+/σ_on)·e^E]`
//! for a curve-specific exponent `E`; the bracket is assembled in log
//! domain because `e^E` routinely exceeds the f64 range.

use crate::averaging::PulseDrive;
use crate::error::{Error, Result};
use crate::model::{memductance, ModelParams};
use crate::numerics::{asinh_of_exp, ln_sinh};

/// Pulse widths and period; the curves only depend on the width ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseTiming {
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub period: f64,
}

impl From<&PulseDrive> for PulseTiming {
    fn from(d: &PulseDrive) -> Self {
        Self {
            tau_plus: d.tau_plus,
            tau_minus: d.tau_minus,
            period: d.period,
        }
    }
}

impl Default for PulseTiming {
    fn default() -> Self {
        (&PulseDrive::default()).into()
    }
}

/// A point of a bifurcation curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub v_plus: f64,
    pub v_minus: f64,
}

/// Auxiliary quantities carried with each sample of curve A.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveAContext {
    /// `Γ(x) = 2x_off²/x³ + 2x/x_on²`.
    pub gamma_cap: f64,
    /// `γ̃(x) = 3x_off²/x² + x²/x_on²`.
    pub gamma_tilde: f64,
    /// `γ` evaluated at the emitted voltages.
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveASample {
    pub x: f64,
    pub point: CurvePoint,
    pub context: CurveAContext,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveDSample {
    pub point: CurvePoint,
    pub x_min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CuspPoint {
    pub x_c: f64,
    pub v_plus_c: f64,
    pub v_minus_c: f64,
}

/// How `V+(x)` on curve A is obtained from the zero-order amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Correction {
    /// One substitution of the zero-order amplitude into the exponential
    /// correction, giving the explicit closed form.
    #[default]
    OneStep,
    /// Fixed-point iteration of the implicit relation to 1e-10.
    Converged,
}

/// `γ = ln[A·τ−·sinh(|V−|/σ_off) / (B·τ+·sinh(V+/σ_on))]`.
pub fn gamma(p: &ModelParams, d: &PulseDrive) -> f64 {
    (p.rate_off * d.tau_minus).ln() + ln_sinh(d.v_minus.abs() / p.sigma_off)
        - (p.rate_on * d.tau_plus).ln()
        - ln_sinh(d.v_plus / p.sigma_on)
}

/// `V− = −σ_off·arcsinh[(Bτ+/Aτ−)·sinh(V+/σ_on)·e^exponent]`.
fn v_minus_from_exponent(p: &ModelParams, t: &PulseTiming, v_plus: f64, exponent: f64) -> f64 {
    let log_arg = (p.rate_on * t.tau_plus).ln() - (p.rate_off * t.tau_minus).ln()
        + ln_sinh(v_plus / p.sigma_on)
        + exponent;
    -p.sigma_off * asinh_of_exp(log_arg)
}

/// `G_M − a·e^{b√V+}`, the slope of the memductance in `x`.
fn memductance_slope(p: &ModelParams, v_plus: f64) -> f64 {
    p.g_m - p.tunnel_conductance(v_plus)
}

fn gamma_cap(p: &ModelParams, x: f64) -> f64 {
    2.0 * p.x_off * p.x_off / x.powi(3) + 2.0 * x / (p.x_on * p.x_on)
}

fn gamma_tilde(p: &ModelParams, x: f64) -> f64 {
    3.0 * p.x_off * p.x_off / (x * x) + x * x / (p.x_on * p.x_on)
}

/// `V+` on curve A at parameter `x`.
fn curve_a_v_plus(p: &ModelParams, x: f64, correction: Correction) -> Result<f64> {
    let radicand = gamma_cap(p, x) * p.sigma_p / p.g_m;
    if !(radicand > 0.0 && radicand.is_finite()) {
        return Err(Error::Range(format!(
            "zero-order amplitude undefined at x = {x}"
        )));
    }
    let zero_order = radicand.sqrt();
    match correction {
        Correction::OneStep => {
            Ok(zero_order * (1.0 + p.a / (2.0 * p.g_m) * (p.b * zero_order.sqrt()).exp()))
        }
        Correction::Converged => {
            let mut v = zero_order;
            for _ in 0..200 {
                let denom = 1.0 - p.tunnel_conductance(v) / p.g_m;
                if denom <= 0.0 {
                    return Err(Error::Range(format!(
                        "amplitude correction diverges at x = {x}"
                    )));
                }
                let next = zero_order / denom.sqrt();
                if (next - v).abs() <= 1e-10 * next {
                    return Ok(next);
                }
                v = next;
            }
            Err(Error::Range(format!(
                "amplitude correction did not converge at x = {x}"
            )))
        }
    }
}

/// Curve A sampled at one value of the parameter `x ∈ (0, 1)`.
pub fn curve_a_at(
    p: &ModelParams,
    t: &PulseTiming,
    x: f64,
    correction: Correction,
) -> Result<CurveASample> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!(
            "curve A parameter x = {x} outside (0, 1)"
        )));
    }
    let v_plus = curve_a_v_plus(p, x, correction)?;
    let g = memductance(p, x, v_plus)?;
    let exponent =
        p.x_off * p.x_off / (x * x) - x * x / (p.x_on * p.x_on) + v_plus * v_plus / p.sigma_p * g;
    let v_minus = v_minus_from_exponent(p, t, v_plus, exponent);
    let drive = PulseDrive {
        v_plus,
        v_minus,
        tau_plus: t.tau_plus,
        tau_minus: t.tau_minus,
        period: t.period,
    };
    Ok(CurveASample {
        x,
        point: CurvePoint { v_plus, v_minus },
        context: CurveAContext {
            gamma_cap: gamma_cap(p, x),
            gamma_tilde: gamma_tilde(p, x),
            gamma: gamma(p, &drive),
        },
    })
}

/// Parametric curve A, one sample per entry of `x_samples`, in input order.
pub fn curve_a(
    p: &ModelParams,
    t: &PulseTiming,
    x_samples: &[f64],
    correction: Correction,
) -> Result<Vec<CurveASample>> {
    x_samples
        .iter()
        .map(|&x| curve_a_at(p, t, x, correction))
        .collect()
}

/// Default parameter samples for curve A: 2000 log-spaced values in [0.02, 0.95].
pub fn default_curve_a_samples() -> Vec<f64> {
    crate::numerics::logspace(0.02, 0.95, 2000)
}

/// The cusp: `x_c = 3^{1/4}·sqrt(x_on·x_off)` mapped through curve A.
pub fn cusp(p: &ModelParams, t: &PulseTiming) -> Result<CuspPoint> {
    let x_c = 3f64.powf(0.25) * (p.x_on * p.x_off).sqrt();
    let s = curve_a_at(p, t, x_c, Correction::OneStep)?;
    Ok(CuspPoint {
        x_c,
        v_plus_c: s.point.v_plus,
        v_minus_c: s.point.v_minus,
    })
}

/// Curve B: a stable fixed point leaving through `x = 1`.
pub fn curve_b(
    p: &ModelParams,
    t: &PulseTiming,
    v_plus_samples: &[f64],
) -> Result<Vec<CurvePoint>> {
    v_plus_samples
        .iter()
        .map(|&v_plus| {
            check_amplitude(v_plus)?;
            let exponent = v_plus * v_plus * p.g_m / p.sigma_p - 1.0 / (p.x_on * p.x_on);
            Ok(CurvePoint {
                v_plus,
                v_minus: v_minus_from_exponent(p, t, v_plus, exponent),
            })
        })
        .collect()
}

/// Whether the left side of the reduced balance is non-monotone in `x` on
/// `(0, 1]`, which is required for a tangency to exist.
pub fn lhs_non_monotone(p: &ModelParams, v_plus: f64) -> bool {
    v_plus * v_plus / p.sigma_p * memductance_slope(p, v_plus) > 2.0 * p.x_off * p.x_off
}

/// Curve C: zero discriminant of the reduced quadratic (lower branch of A).
///
/// Samples where the left side of the reduced balance is monotone (small
/// `V+`) have a single root and emit no point.
pub fn curve_c(
    p: &ModelParams,
    t: &PulseTiming,
    v_plus_samples: &[f64],
) -> Result<Vec<CurvePoint>> {
    let mut out = Vec::with_capacity(v_plus_samples.len());
    for &v_plus in v_plus_samples {
        check_amplitude(v_plus)?;
        if !lhs_non_monotone(p, v_plus) {
            continue;
        }
        let tunnel = p.tunnel_conductance(v_plus);
        let slope = memductance_slope(p, v_plus);
        let exponent =
            v_plus.powi(4) * p.x_on * p.x_on / (4.0 * p.sigma_p * p.sigma_p) * slope * slope
                + v_plus * v_plus / p.sigma_p * tunnel;
        out.push(CurvePoint {
            v_plus,
            v_minus: v_minus_from_exponent(p, t, v_plus, exponent),
        });
    }
    Ok(out)
}

/// Minimum location of `V+²G(x,V+)/σ_p + x_off²/x²` over `x`.
pub fn x_min(p: &ModelParams, v_plus: f64) -> Result<f64> {
    let slope = memductance_slope(p, v_plus);
    if slope.is_nan() || slope <= 0.0 {
        return Err(Error::Range(format!(
            "memductance slope G_M − a·e^(b√V+) is non-positive at V+ = {v_plus}"
        )));
    }
    Ok((2.0 * p.x_off * p.x_off * p.sigma_p / (v_plus * v_plus * slope)).cbrt())
}

/// Curve D: tangency at the minimum of the left side (upper branch of A).
pub fn curve_d(
    p: &ModelParams,
    t: &PulseTiming,
    v_plus_samples: &[f64],
) -> Result<Vec<CurveDSample>> {
    v_plus_samples
        .iter()
        .map(|&v_plus| {
            check_amplitude(v_plus)?;
            let x = x_min(p, v_plus)?;
            let g = p.g_m * x + p.tunnel_conductance(v_plus) * (1.0 - x);
            let exponent = v_plus * v_plus / p.sigma_p * g + p.x_off * p.x_off / (x * x)
                - x * x / (p.x_on * p.x_on);
            Ok(CurveDSample {
                point: CurvePoint {
                    v_plus,
                    v_minus: v_minus_from_exponent(p, t, v_plus, exponent),
                },
                x_min: x,
            })
        })
        .collect()
}

fn check_amplitude(v_plus: f64) -> Result<()> {
    if !(v_plus > 0.0 && v_plus.is_finite()) {
        return Err(Error::Domain(format!(
            "V+ = {v_plus} must be finite and > 0"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn timing() -> PulseTiming {
        PulseTiming::default()
    }

    #[test]
    fn gamma_reference() {
        let p = ModelParams::default();
        let d = PulseDrive::default();
        // mpmath: ln(A sinh(0.6/σ_off)) − ln(B sinh(0.54/σ_on))
        assert!((gamma(&p, &d) - 31.233_435_546_404_28).abs() < 1e-10);
    }

    #[test]
    fn gamma_zero_at_balance() {
        let p = ModelParams::default();
        // choose V− so that A sinh(|V−|/σ_off) = B sinh(V+/σ_on)
        let v_plus = 0.5;
        let target = p.rate_on * (v_plus / p.sigma_on).sinh() / p.rate_off;
        let v_minus = -p.sigma_off * target.asinh();
        let d = PulseDrive::symmetric(v_plus, v_minus, 1e-9, 0.1);
        assert!(gamma(&p, &d).abs() < 1e-12);
    }

    #[test]
    fn gamma_decreasing_in_v_plus() {
        let p = ModelParams::default();
        let mut prev = f64::INFINITY;
        for i in 1..100 {
            let g = gamma(&p, &PulseDrive::symmetric(0.01 * i as f64, -0.6, 1e-9, 0.1));
            assert!(g < prev);
            prev = g;
        }
    }

    #[test]
    fn cusp_location() {
        let p = ModelParams::default();
        let c = cusp(&p, &timing()).unwrap();
        assert!((c.x_c - 0.203_885_309_381_654_7).abs() < 1e-15);
        assert!((c.v_plus_c - 0.49).abs() < 0.01, "{c:?}");
        assert!((c.v_minus_c + 0.51).abs() < 0.01, "{c:?}");
        let s = ModelParams {
            x_on: 0.2,
            x_off: 0.2,
            ..p
        };
        assert!((cusp(&s, &timing()).unwrap().x_c - 3f64.powf(0.25) * 0.2).abs() < 1e-15);
    }

    #[test]
    fn cusp_is_minimum_of_v_plus() {
        let p = ModelParams::default();
        let c = cusp(&p, &timing()).unwrap();
        let samples = curve_a(
            &p,
            &timing(),
            &default_curve_a_samples(),
            Correction::OneStep,
        )
        .unwrap();
        let lowest = samples
            .iter()
            .min_by(|a, b| a.point.v_plus.total_cmp(&b.point.v_plus))
            .unwrap();
        assert!((lowest.x - c.x_c).abs() < 2e-3);
        assert!(lowest.point.v_plus >= c.v_plus_c - 1e-12);
    }

    #[test]
    fn cusp_branches_meet_tangentially() {
        let p = ModelParams::default();
        let t = timing();
        let c = cusp(&p, &t).unwrap();
        for correction in [Correction::OneStep, Correction::Converged] {
            let at = |x| curve_a_at(&p, &t, x, correction).unwrap().point;
            // branch slope dV−/dV+ at a sample, by central differences in x
            let slope = |x: f64| {
                let (a, b) = (at(x - 1e-6), at(x + 1e-6));
                (b.v_minus - a.v_minus) / (b.v_plus - a.v_plus)
            };
            let (lo, hi) = (slope(c.x_c - 1e-3), slope(c.x_c + 1e-3));
            assert!(((lo - hi) / hi).abs() < 0.01, "{correction:?}: {lo} {hi}");
            // V+ is stationary at the cusp
            let centre = at(c.x_c);
            assert!((at(c.x_c - 1e-3).v_plus - centre.v_plus).abs() < 1e-4);
            assert!((at(c.x_c + 1e-3).v_plus - centre.v_plus).abs() < 1e-4);
        }
    }

    #[test]
    fn auxiliary_identities_hold_when_converged() {
        let p = ModelParams::default();
        for s in curve_a(&p, &timing(), &[0.1, 0.2, 0.35, 0.6], Correction::Converged).unwrap() {
            let v = s.point.v_plus;
            let slope = memductance_slope(&p, v);
            let cap = v * v / p.sigma_p * slope;
            assert!((cap - s.context.gamma_cap).abs() < 1e-8 * cap);
            let tilde = s.context.gamma - v * v / p.sigma_p * p.tunnel_conductance(v);
            assert!(
                (tilde - s.context.gamma_tilde).abs() < 1e-7 * tilde.abs(),
                "{tilde} {:?}",
                s.context
            );
        }
    }

    #[test]
    fn one_step_close_to_converged() {
        let p = ModelParams::default();
        let xs = [0.1, 0.2, 0.35];
        let a = curve_a(&p, &timing(), &xs, Correction::OneStep).unwrap();
        let b = curve_a(&p, &timing(), &xs, Correction::Converged).unwrap();
        for (u, w) in a.iter().zip(&b) {
            assert!((u.point.v_plus - w.point.v_plus).abs() < 2e-3);
        }
    }

    #[test]
    fn curve_b_negative_and_finite() {
        let p = ModelParams::default();
        let vs: Vec<f64> = (1..=100).map(|i| 0.01 * i as f64).collect();
        for pt in curve_b(&p, &timing(), &vs).unwrap() {
            assert!(pt.v_minus < 0.0 && pt.v_minus.is_finite());
        }
        let b = curve_b(&p, &timing(), &[0.72]).unwrap()[0];
        // (0.72, −0.6) lies above curve B, on the side without stable points
        assert!(b.v_minus < -0.6);
    }

    #[test]
    fn curve_c_skips_monotone_regime() {
        let p = ModelParams::default();
        assert!(!lhs_non_monotone(&p, 0.02));
        assert!(lhs_non_monotone(&p, 0.025));
        let pts = curve_c(&p, &timing(), &[0.01, 0.02, 0.3, 0.5714]).unwrap();
        assert_eq!(pts.len(), 2);
        assert!((pts[1].v_minus + 0.7).abs() < 0.02, "{:?}", pts[1]);
    }

    #[test]
    fn curve_d_values() {
        let p = ModelParams::default();
        let d = curve_d(&p, &timing(), &[0.6197, 0.7]).unwrap();
        assert!((d[0].point.v_minus + 0.7).abs() < 0.02, "{:?}", d[0]);
        assert!((d[1].x_min - 0.102).abs() < 5e-4, "{:?}", d[1]);
        assert!(matches!(
            curve_d(&p, &timing(), &[3.5]),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn x_min_zeroes_the_derivative() {
        let p = ModelParams::default();
        let mut prev = f64::INFINITY;
        for i in 0..60 {
            let v = 0.3 + 0.01 * i as f64;
            let x = x_min(&p, v).unwrap();
            let first = v * v / p.sigma_p * memductance_slope(&p, v);
            let second = 2.0 * p.x_off * p.x_off / x.powi(3);
            assert!((first - second).abs() <= 1e-8 * first.max(second));
            assert!(x < prev);
            prev = x;
        }
    }
}
