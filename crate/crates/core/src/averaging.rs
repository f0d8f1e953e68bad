//! The pulse-averaged evolution function `g(x, V+, V−)` and its
//! overflow-safe sign.

use crate::error::{Error, Result};
use crate::model::{evolution_rate, log_evolution_rate, memductance, ModelParams, Sign};

/// Absolute tolerance, in log units, below which the two pulse
/// contributions are considered balanced.
pub const LOG_TIE_TOLERANCE: f64 = 1e-12;

/// A periodic train of one positive and one negative rectangular pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseDrive {
    pub v_plus: f64,
    pub v_minus: f64,
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub period: f64,
}

impl Default for PulseDrive {
    /// The bistable drive: V+ = 0.54 V, V− = −0.6 V, T = 1 ns, τ± = 0.1 T.
    fn default() -> Self {
        Self::symmetric(0.54, -0.6, 1e-9, 0.1)
    }
}

impl PulseDrive {
    /// Equal pulse widths `duty · period`.
    pub fn symmetric(v_plus: f64, v_minus: f64, period: f64, duty: f64) -> Self {
        Self {
            v_plus,
            v_minus,
            tau_plus: duty * period,
            tau_minus: duty * period,
            period,
        }
    }

    /// Same timing, different amplitudes.
    pub fn with_amplitudes(&self, v_plus: f64, v_minus: f64) -> Self {
        Self {
            v_plus,
            v_minus,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.v_plus,
            self.v_minus,
            self.tau_plus,
            self.tau_minus,
            self.period,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter(
                "drive values must be finite".into(),
            ));
        }
        if self.v_plus <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "drive.v_plus must be > 0, got {}",
                self.v_plus
            )));
        }
        if self.v_minus >= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "drive.v_minus must be < 0, got {}",
                self.v_minus
            )));
        }
        if self.tau_plus <= 0.0 || self.tau_minus <= 0.0 {
            return Err(Error::InvalidParameter("pulse widths must be > 0".into()));
        }
        if self.tau_plus + self.tau_minus > self.period {
            return Err(Error::InvalidParameter(format!(
                "pulse widths {} + {} exceed the period {}",
                self.tau_plus, self.tau_minus, self.period
            )));
        }
        Ok(())
    }
}

fn check_interior(x: f64) -> Result<()> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain(format!("state x = {x} outside (0, 1]")));
    }
    Ok(())
}

/// `g = (f(x,V+)·τ+ + f(x,V−)·τ−) / T` in 1/s.
pub fn effective_g(p: &ModelParams, d: &PulseDrive, x: f64) -> Result<f64> {
    check_interior(x)?;
    let up = evolution_rate(p, x, d.v_plus)?;
    let down = evolution_rate(p, x, d.v_minus)?;
    let g = (up * d.tau_plus + down * d.tau_minus) / d.period;
    if g.is_finite() {
        Ok(g)
    } else {
        Err(Error::Overflow(format!("g({x}) exceeds the f64 range")))
    }
}

/// `ln(τ+·|f(x,V+)|) − ln(τ−·|f(x,V−)|)`.
///
/// Positive where the on-branch wins, so its sign is the sign of `g`.
pub fn log_balance(p: &ModelParams, d: &PulseDrive, x: f64) -> Result<f64> {
    check_interior(x)?;
    let up = log_evolution_rate(p, x, d.v_plus)?;
    let down = log_evolution_rate(p, x, d.v_minus)?;
    Ok((d.tau_plus.ln() + up.log_magnitude) - (d.tau_minus.ln() + down.log_magnitude))
}

/// Sign of `g(x)` by log-domain comparison of the two pulse contributions.
pub fn g_sign(p: &ModelParams, d: &PulseDrive, x: f64) -> Result<Sign> {
    let balance = log_balance(p, d, x)?;
    Ok(if balance.abs() <= LOG_TIE_TOLERANCE {
        Sign::Zero
    } else {
        Sign::of(balance)
    })
}

/// Both sides of the full fixed-point condition
///
/// `V+²G(x,V+)/σ_p + x_off²/x² = γ + x²/x_on² + 1/(1 + β·G(x,V−)·V−²)`,
///
/// built from the memductance and γ independently of [`log_balance`].
/// At a root of `g` the two sides agree.
pub fn fixed_point_condition(p: &ModelParams, d: &PulseDrive, x: f64) -> Result<(f64, f64)> {
    check_interior(x)?;
    let g_plus = memductance(p, x, d.v_plus)?;
    let g_minus = memductance(p, x, d.v_minus)?;
    let lhs = d.v_plus * d.v_plus / p.sigma_p * g_plus + p.x_off * p.x_off / (x * x);
    let rhs = crate::curves::gamma(p, d)
        + x * x / (p.x_on * p.x_on)
        + 1.0 / (1.0 + p.beta * g_minus * d.v_minus * d.v_minus);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drive(vp: f64, vm: f64) -> PulseDrive {
        PulseDrive::symmetric(vp, vm, 1e-9, 0.1)
    }

    #[test]
    fn drive_validation() {
        assert!(PulseDrive::default().validate().is_ok());
        assert!(drive(0.5, 0.1).validate().is_err());
        assert!(drive(-0.5, -0.1).validate().is_err());
        assert!(PulseDrive::symmetric(0.5, -0.5, 1e-9, 0.6)
            .validate()
            .is_err());
        assert!(PulseDrive::symmetric(0.5, -0.5, 1e-9, 0.5)
            .validate()
            .is_ok());
    }

    #[test]
    fn reference_signs() {
        let p = ModelParams::default();
        assert!(effective_g(&p, &drive(0.54, -0.6), 0.05).unwrap() > 0.0);
        assert!(effective_g(&p, &drive(0.72, -0.6), 0.5).unwrap() > 0.0);
        // between the unstable root 0.237 and the upper stable root 0.371
        assert_eq!(g_sign(&p, &drive(0.54, -0.6), 0.3).unwrap(), Sign::Positive);
        assert_eq!(g_sign(&p, &drive(0.54, -0.6), 0.2).unwrap(), Sign::Negative);
        let d = drive(0.6, -0.9);
        assert_eq!(g_sign(&p, &d, 0.04).unwrap(), Sign::Positive);
        assert_eq!(g_sign(&p, &d, 0.07).unwrap(), Sign::Negative);
    }

    #[test]
    fn positive_near_zero() {
        let p = ModelParams::default();
        for &vp in &[0.01, 0.3, 0.8, 1.0] {
            for &vm in &[-0.01, -0.5, -1.0] {
                assert_eq!(g_sign(&p, &drive(vp, vm), 1e-3).unwrap(), Sign::Positive);
            }
        }
    }

    #[test]
    fn sign_agrees_with_linear_g() {
        let p = ModelParams::default();
        for i in 1..=100 {
            let x = i as f64 / 100.0;
            for &(vp, vm) in &[(0.54, -0.6), (0.6, -0.8), (0.72, -0.6), (0.4, -0.4)] {
                let d = drive(vp, vm);
                if let Ok(g) = effective_g(&p, &d, x) {
                    assert_eq!(g_sign(&p, &d, x).unwrap(), Sign::of(g), "x={x} {vp} {vm}");
                }
            }
        }
    }

    #[test]
    fn domain_excludes_zero() {
        let p = ModelParams::default();
        assert!(matches!(
            g_sign(&p, &PulseDrive::default(), 0.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            effective_g(&p, &PulseDrive::default(), 1.01),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn condition_sides_match_log_balance() {
        let p = ModelParams::default();
        let d = drive(0.54, -0.6);
        for &x in &[0.1, 0.3, 0.7] {
            let (lhs, rhs) = fixed_point_condition(&p, &d, x).unwrap();
            let balance = log_balance(&p, &d, x).unwrap();
            assert!(((lhs - rhs) - balance).abs() < 1e-9 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn growing_negative_amplitude_never_raises_g() {
        let p = ModelParams::default();
        for i in 1..=20 {
            let x = i as f64 / 20.0;
            for j in 0..8 {
                let vp = 0.3 + 0.07 * j as f64;
                let mut previous = Sign::Positive;
                for k in 1..=40 {
                    let vm = -0.025 * k as f64;
                    let s = g_sign(&p, &drive(vp, vm), x).unwrap();
                    assert!(!(previous == Sign::Negative && s == Sign::Positive));
                    previous = s;
                }
            }
        }
    }
}
