//! Time-domain integration of the full model under the periodic pulse
//! train.
//!
//! Within a period the positive pulse starts at `t = 0` and the negative
//! one at `T/2` (moved earlier or later only when a width forces it); the
//! rest of the period is at zero voltage, where the state does not move.

use crate::averaging::PulseDrive;
use crate::error::{Error, Result};
use crate::model::{log_evolution_rate, ModelParams, Sign};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSpec {
    /// Largest accepted `|Δx| / max(x, 0.01)` per sub-step.
    pub max_rel_step: f64,
    pub max_substeps_per_pulse: usize,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        Self {
            max_rel_step: 0.01,
            max_substeps_per_pulse: 1_000_000,
        }
    }
}

impl IntegratorSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.max_rel_step > 0.0 && self.max_rel_step <= 0.1) {
            return Err(Error::InvalidParameter(format!(
                "integrator.max_rel_step must be in (0, 0.1], got {}",
                self.max_rel_step
            )));
        }
        if self.max_substeps_per_pulse == 0 {
            return Err(Error::InvalidParameter(
                "integrator.max_substeps_per_pulse must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Which edge of `[0, 1]` the state was clamped to, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryHit {
    #[default]
    None,
    Upper,
    Lower,
}

impl BoundaryHit {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryHit::None => "none",
            BoundaryHit::Upper => "upper",
            BoundaryHit::Lower => "lower",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseOutcome {
    pub x: f64,
    pub boundary: BoundaryHit,
    pub substeps: usize,
}

/// `Δx = f(x)·dt`, formed in log domain so huge rates do not overflow.
fn increment(p: &ModelParams, x: f64, v: f64, dt: f64) -> Result<f64> {
    let r = log_evolution_rate(p, x, v)?;
    Ok(match r.sign {
        Sign::Zero => 0.0,
        s => s.as_f64() * (r.log_magnitude + dt.ln()).exp(),
    })
}

/// Advances `dx/dt = f(x, v)` over a pulse of constant voltage.
///
/// Explicit Euler sub-steps sized so that `|Δx| ≤ max_rel_step·max(x, 0.01)`;
/// each step is checked against two half steps and halved until the two
/// agree to `max_rel_step²·max(x, 0.01)`, and the accepted update is the
/// extrapolated (midpoint) value. The state is clamped to `[0, 1]`.
pub fn integrate_pulse(
    p: &ModelParams,
    x: f64,
    v: f64,
    width: f64,
    spec: &IntegratorSpec,
) -> Result<PulseOutcome> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("state x = {x} outside [0, 1]")));
    }
    if !(width >= 0.0 && width.is_finite()) {
        return Err(Error::Domain(format!(
            "pulse width {width} must be finite and >= 0"
        )));
    }
    let mut out = PulseOutcome {
        x,
        boundary: BoundaryHit::None,
        substeps: 0,
    };
    if v == 0.0 || width == 0.0 {
        return Ok(out);
    }
    let mut t = 0.0;
    while t < width {
        let x = out.x;
        let rate = log_evolution_rate(p, x, v)?;
        if rate.sign == Sign::Zero
            || (x >= 1.0 && rate.sign == Sign::Positive)
            || (x <= 0.0 && rate.sign == Sign::Negative)
        {
            break;
        }
        let scale = x.max(0.01);
        let limit = spec.max_rel_step * scale;
        let tol = spec.max_rel_step * spec.max_rel_step * scale;
        let mut dt = (width - t).min((limit.ln() - rate.log_magnitude).exp());
        let next = loop {
            if out.substeps >= spec.max_substeps_per_pulse {
                return Err(Error::Integration(format!(
                    "more than {} sub-steps in one pulse at x = {x}, v = {v}",
                    spec.max_substeps_per_pulse
                )));
            }
            out.substeps += 1;
            let full = rate.sign.as_f64() * (rate.log_magnitude + dt.ln()).exp();
            let half = 0.5 * full;
            let x_half = (x + half).clamp(0.0, 1.0);
            let second = increment(p, x_half, v, 0.5 * dt)?;
            let err = (half + second - full).abs();
            if err <= tol || dt <= width * f64::EPSILON {
                break x + 2.0 * second;
            }
            dt *= 0.5;
        };
        t += dt;
        out.x = if next >= 1.0 {
            if out.boundary == BoundaryHit::None {
                out.boundary = BoundaryHit::Upper;
            }
            1.0
        } else if next <= 0.0 {
            if out.boundary == BoundaryHit::None {
                out.boundary = BoundaryHit::Lower;
            }
            0.0
        } else {
            next
        };
    }
    Ok(out)
}

/// State samples at every pulse edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<f64>,
    pub drive: PulseDrive,
    pub x0: f64,
    pub n_periods: usize,
    /// First saturation event, if the state was ever clamped.
    pub boundary_hit: BoundaryHit,
}

impl Trajectory {
    /// States at `t = kT`, `k = 1..=n_periods`.
    pub fn period_end_states(&self) -> Vec<f64> {
        // four edges per period plus the closing sample
        (1..=self.n_periods).map(|k| self.states[4 * k]).collect()
    }
}

/// Start of the negative pulse within a period.
pub fn negative_pulse_offset(d: &PulseDrive) -> f64 {
    (0.5 * d.period).min(d.period - d.tau_minus).max(d.tau_plus)
}

/// Integrates `n_periods` periods starting from `x0`, recording the state
/// at both edges of every pulse and at `t = n_periods·T`.
pub fn simulate(
    p: &ModelParams,
    d: &PulseDrive,
    x0: f64,
    n_periods: usize,
    spec: &IntegratorSpec,
) -> Result<Trajectory> {
    d.validate()?;
    spec.validate()?;
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::Domain(format!("initial state {x0} outside (0, 1)")));
    }
    let offset = negative_pulse_offset(d);
    let mut traj = Trajectory {
        times: Vec::with_capacity(4 * n_periods + 1),
        states: Vec::with_capacity(4 * n_periods + 1),
        drive: *d,
        x0,
        n_periods,
        boundary_hit: BoundaryHit::None,
    };
    if n_periods == 0 {
        return Ok(traj);
    }
    let mut x = x0;
    for k in 0..n_periods {
        let start = k as f64 * d.period;
        for (edge, v, width) in [
            (0.0, d.v_plus, d.tau_plus),
            (offset, d.v_minus, d.tau_minus),
        ] {
            traj.times.push(start + edge);
            traj.states.push(x);
            let step = integrate_pulse(p, x, v, width, spec)?;
            if traj.boundary_hit == BoundaryHit::None {
                traj.boundary_hit = step.boundary;
            }
            x = step.x;
            traj.times.push(start + edge + width);
            traj.states.push(x);
        }
    }
    traj.times.push(n_periods as f64 * d.period);
    traj.states.push(x);
    Ok(traj)
}

/// Location and size of the long-time oscillation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attractor {
    /// Mean of the edge samples in the tail; with narrow pulses this is the
    /// period-averaged state.
    pub mean: f64,
    /// Peak-to-peak spread of the edge samples in the tail.
    pub amplitude: f64,
}

/// Summarises the trailing `tail_fraction` of the periods.
pub fn detect_attractor(t: &Trajectory, tail_fraction: f64) -> Result<Attractor> {
    if t.n_periods < 10 {
        return Err(Error::TooShort(format!(
            "{} periods, need at least 10",
            t.n_periods
        )));
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "tail fraction {tail_fraction} outside (0, 1]"
        )));
    }
    let tail_periods = ((t.n_periods as f64 * tail_fraction).ceil() as usize).max(1);
    let first = 4 * (t.n_periods - tail_periods);
    // edges of the tail periods, excluding the closing sample
    let tail = &t.states[first..4 * t.n_periods];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Attractor {
        mean,
        amplitude: max - min,
    })
}
