//! Cross-module consistency checks, shared by the `validate` command and
//! the test suites.

use std::fmt;

use crate::averaging::{effective_g, fixed_point_condition, PulseDrive};
use crate::bifurcation::{
    crossings_at, distance_to_polylines, nst_map, saddle_node_threshold, trace_boundary, AxisRange,
    Polyline, SaddleNode,
};
use crate::curves::{self, Correction, CurvePoint, PulseTiming};
use crate::error::Result;
use crate::fixedpoints::{count_stable, find_fixed_points, ScanSpec, Stability};
use crate::model::{evolution_rate, memductance, ModelParams};
use crate::numerics::linspace;
use crate::simulate::{integrate_pulse, IntegratorSpec};

/// Largest `|LHS − RHS|` of the full fixed-point condition over the roots
/// found at drive `d`; `None` if there are no roots.
pub fn max_condition_residual(
    p: &ModelParams,
    d: &PulseDrive,
    scan: &ScanSpec,
) -> Result<Option<f64>> {
    let mut worst: Option<f64> = None;
    for fp in find_fixed_points(p, d, scan)? {
        let (lhs, rhs) = fixed_point_condition(p, d, fp.x)?;
        let r = (lhs - rhs).abs();
        worst = Some(worst.map_or(r, |w| w.max(r)));
    }
    Ok(worst)
}

/// `|∂ ln|f(x, v)| / ∂x|`.
pub fn log_rate_slope(p: &ModelParams, x: f64, v: f64) -> Result<f64> {
    let slope_g = p.g_m - p.tunnel_conductance(v);
    Ok(if v > 0.0 {
        (-2.0 * x / (p.x_on * p.x_on) + v * v / p.sigma_p * slope_g).abs()
    } else {
        let g = memductance(p, x, v)?;
        let denom = 1.0 + p.beta * g * v * v;
        (2.0 * p.x_off * p.x_off / x.powi(3) - p.beta * v * v * slope_g / (denom * denom)).abs()
    })
}

/// Relative gap `|Δx/T − g(x)| / |g(x)|` after one period of the full
/// dynamics started at `x`.
///
/// Returns `None` when first-order averaging is not expected to hold:
/// the two pulse contributions nearly cancel (within a factor 2), or the
/// rate changes by more than 1% across one pulse.
pub fn averaging_gap(p: &ModelParams, d: &PulseDrive, x: f64) -> Result<Option<f64>> {
    let (up, down) = match (
        evolution_rate(p, x, d.v_plus),
        evolution_rate(p, x, d.v_minus),
    ) {
        (Ok(u), Ok(w)) => (u, w),
        _ => return Ok(None),
    };
    let big = up.abs().max(down.abs());
    if (up + down).abs() < 0.5 * big {
        return Ok(None);
    }
    let tau = d.tau_plus.max(d.tau_minus);
    let stiffness = log_rate_slope(p, x, d.v_plus)?.max(log_rate_slope(p, x, d.v_minus)?);
    if tau * big * stiffness > 0.01 {
        return Ok(None);
    }
    let g = effective_g(p, d, x)?;
    let spec = IntegratorSpec {
        max_rel_step: 1e-3,
        ..IntegratorSpec::default()
    };
    let after_up = integrate_pulse(p, x, d.v_plus, d.tau_plus, &spec)?.x;
    let after = integrate_pulse(p, after_up, d.v_minus, d.tau_minus, &spec)?.x;
    Ok(Some(((after - x) / d.period - g).abs() / g.abs()))
}

/// Distance from curve samples to the numeric `N_st` boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapSummary {
    pub max_gap: f64,
    /// Samples inside the traced window.
    pub scored: usize,
    /// Samples outside the window or within one grid step of its edge,
    /// not compared.
    pub skipped: usize,
}

/// For each sample at least one grid step inside the window, the `V−` distance to the
/// nearest boundary crossing at the same `V+`; where no boundary crosses
/// that `V+`, the Euclidean distance to the nearest boundary segment.
pub fn boundary_gap(
    polylines: &[Polyline],
    samples: &[CurvePoint],
    v_plus: AxisRange,
    v_minus: AxisRange,
) -> GapSummary {
    let mut summary = GapSummary {
        max_gap: 0.0,
        scored: 0,
        skipped: 0,
    };
    for s in samples {
        let inside = within(&v_plus, s.v_plus) && within(&v_minus, s.v_minus);
        if !inside {
            summary.skipped += 1;
            continue;
        }
        let crossing = crossings_at(polylines, s.v_plus)
            .iter()
            .map(|(vm, _)| (vm - s.v_minus).abs())
            .min_by(f64::total_cmp);
        let gap = crossing
            .or_else(|| distance_to_polylines(polylines, (s.v_plus, s.v_minus)))
            .unwrap_or(f64::INFINITY);
        summary.scored += 1;
        summary.max_gap = summary.max_gap.max(gap);
    }
    summary
}

fn within(axis: &AxisRange, v: f64) -> bool {
    let step = if axis.n > 1 {
        (axis.max - axis.min) / (axis.n - 1) as f64
    } else {
        0.0
    };
    v >= axis.min + step && v <= axis.max - step
}

/// Window and resolution of the numeric map used for boundary comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapWindow {
    pub v_plus: AxisRange,
    pub v_minus: AxisRange,
}

impl Default for GapWindow {
    fn default() -> Self {
        Self {
            v_plus: AxisRange::new(0.44, 0.76, 161),
            v_minus: AxisRange::new(-1.2, -0.3, 301),
        }
    }
}

/// Curve A and curve B gaps against boundaries traced on `window`.
pub fn analytic_numeric_gaps(
    p: &ModelParams,
    template: &PulseDrive,
    window: &GapWindow,
    scan: &ScanSpec,
) -> Result<(GapSummary, GapSummary)> {
    let grid = nst_map(p, template, window.v_plus, window.v_minus, scan)?;
    let lines = trace_boundary(&grid);
    let timing = PulseTiming::from(template);
    let a: Vec<CurvePoint> = curves::curve_a(
        p,
        &timing,
        &curves::default_curve_a_samples(),
        Correction::OneStep,
    )?
    .into_iter()
    .map(|s| s.point)
    .filter(|pt| (0.45..=0.65).contains(&pt.v_plus))
    .collect();
    let b = curves::curve_b(p, &timing, &linspace(0.55, 0.75, 201))?;
    Ok((
        boundary_gap(&lines, &a, window.v_plus, window.v_minus),
        boundary_gap(&lines, &b, window.v_plus, window.v_minus),
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn within(name: &str, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            measured,
            tolerance,
            passed: measured.is_finite() && measured <= tolerance,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<44} measured={:.6e} tolerance={:.6e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs the full cross-module suite. `tolerance_scale` multiplies every
/// tolerance (values below 1 tighten the suite).
pub fn run_validation(
    p: &ModelParams,
    template: &PulseDrive,
    scan: &ScanSpec,
    window: &GapWindow,
    tolerance_scale: f64,
) -> Result<Report> {
    let tol = |t: f64| t * tolerance_scale;
    let mut report = Report::default();
    let drive = |vp, vm| template.with_amplitudes(vp, vm);

    let anchors = [(0.72, -0.6, 0usize), (0.54, -0.4, 1), (0.54, -0.6, 2)];
    let mut mismatches = 0.0;
    for (vp, vm, n) in anchors {
        if count_stable(p, &drive(vp, vm), scan)? != n {
            mismatches += 1.0;
        }
    }
    report.checks.push(Check::within(
        "region-map anchors (mismatch count)",
        mismatches,
        0.0,
    ));

    let fps = find_fixed_points(p, &drive(0.54, -0.6), scan)?;
    let reference = [
        (0.106, Stability::Stable),
        (0.237, Stability::Unstable),
        (0.371, Stability::Stable),
    ];
    let location_err = if fps.len() == reference.len()
        && fps.iter().zip(reference).all(|(f, r)| f.stability == r.1)
    {
        fps.iter()
            .zip(reference)
            .map(|(f, r)| (f.x - r.0).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    report.checks.push(Check::within(
        "fixed points at (0.54, -0.6) [|dx|]",
        location_err,
        tol(0.005),
    ));

    let mut residual: f64 = 0.0;
    for (vp, vm) in [
        (0.54, -0.6),
        (0.54, -0.4),
        (0.6, -0.7),
        (0.6, -0.9),
        (0.7, -0.8),
    ] {
        if let Some(r) = max_condition_residual(p, &drive(vp, vm), scan)? {
            residual = residual.max(r);
        }
    }
    report.checks.push(Check::within(
        "fixed-point condition residual",
        residual,
        tol(1e-6),
    ));

    let creation =
        saddle_node_threshold(p, template, 0.6, SaddleNode::Creation, (-0.9, -0.75), scan)?;
    let annihilation = saddle_node_threshold(
        p,
        template,
        0.6,
        SaddleNode::Annihilation,
        (-0.7, -0.6),
        scan,
    )?;
    report.checks.push(Check::within(
        "creation threshold at V+=0.6 [|V- + 0.817|]",
        (creation + 0.817).abs(),
        tol(0.005),
    ));
    report.checks.push(Check::within(
        "annihilation threshold at V+=0.6 [|V- + 0.657|]",
        (annihilation + 0.657).abs(),
        tol(0.005),
    ));

    let timing = PulseTiming::from(template);
    let c = curves::cusp(p, &timing)?;
    report.checks.push(Check::within(
        "cusp x_c [|x_c - 0.2039|]",
        (c.x_c - 0.2039).abs(),
        tol(5e-4),
    ));
    report.checks.push(Check::within(
        "cusp voltages [max |dV|]",
        (c.v_plus_c - 0.49).abs().max((c.v_minus_c + 0.51).abs()),
        tol(0.01),
    ));

    let mut worst_avg: f64 = 0.0;
    let mut used = 0;
    let fine = PulseDrive {
        tau_plus: 1e-3 * template.period,
        tau_minus: 1e-3 * template.period,
        ..*template
    };
    // golden-ratio sequence over the study window
    let phi = [
        0.754_877_666_246_692_7,
        0.569_840_290_998_053_2,
        0.438_283_435_101_5,
    ];
    let mut k = 0u32;
    while used < 50 && k < 20_000 {
        k += 1;
        let u = phi.map(|a| (0.5 + a * f64::from(k)).fract());
        let d = fine.with_amplitudes(0.3 + 0.5 * u[0], -1.0 + 0.7 * u[1]);
        let x = 0.05 + 0.9 * u[2];
        if let Some(gap) = averaging_gap(p, &d, x)? {
            worst_avg = worst_avg.max(gap);
            used += 1;
        }
    }
    if used < 50 {
        worst_avg = f64::INFINITY;
    }
    report.checks.push(Check::within(
        "averaging consistency [rel. error]",
        worst_avg,
        tol(0.05),
    ));

    let (gap_a, gap_b) = analytic_numeric_gaps(p, template, window, scan)?;
    report.checks.push(Check::within(
        "curve A vs numeric boundary [V]",
        gap_a.max_gap,
        tol(0.03),
    ));
    report.checks.push(Check::within(
        "curve B vs numeric boundary [V]",
        gap_b.max_gap,
        tol(0.03),
    ));

    let d_pt = curves::curve_d(p, &timing, &[0.6197])?[0].point;
    let c_pt = curves::curve_c(p, &timing, &[0.5714])?;
    report.checks.push(Check::within(
        "curve D at V+=0.6197 [|V- + 0.7|]",
        (d_pt.v_minus + 0.7).abs(),
        tol(0.02),
    ));
    report.checks.push(Check::within(
        "curve C at V+=0.5714 [|V- + 0.7|]",
        c_pt.first()
            .map_or(f64::INFINITY, |pt| (pt.v_minus + 0.7).abs()),
        tol(0.02),
    ));
    Ok(report)
}
