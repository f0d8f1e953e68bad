//! Constitutive relations of the TaO memristor: memductance, current and
//! the state evolution rate, in linear and log domain.

use crate::error::{domain, Error, Result};
use crate::numerics::ln_sinh;

/// Physical constants of the TaO model, strict SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Off-branch rate prefactor `A` (1/s).
    pub rate_off: f64,
    /// On-branch rate prefactor `B` (1/s).
    pub rate_on: f64,
    /// Off-branch voltage scale (V).
    pub sigma_off: f64,
    /// On-branch voltage scale (V).
    pub sigma_on: f64,
    /// Power scale of the on-branch heating term (A·V).
    pub sigma_p: f64,
    pub x_off: f64,
    pub x_on: f64,
    /// Inverse power scale of the off-branch term (1/(A·V)).
    pub beta: f64,
    /// Conductance of the fully formed channel, `x = 1` (S).
    pub g_m: f64,
    /// Prefactor of the tunnelling conductance at `x = 0` (S).
    pub a: f64,
    /// Voltage exponent of the tunnelling conductance (V^-1/2).
    pub b: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            rate_off: 1e-10,
            rate_on: 1e-4,
            sigma_off: 0.013,
            sigma_on: 0.45,
            sigma_p: 4e-5,
            x_off: 0.4,
            x_on: 0.06,
            beta: 500.0,
            g_m: 0.025,
            a: 7.2e-6,
            b: 4.7,
        }
    }
}

impl ModelParams {
    /// Field names paired with values, in declaration order.
    pub fn fields(&self) -> [(&'static str, f64); 11] {
        [
            ("rate_off", self.rate_off),
            ("rate_on", self.rate_on),
            ("sigma_off", self.sigma_off),
            ("sigma_on", self.sigma_on),
            ("sigma_p", self.sigma_p),
            ("x_off", self.x_off),
            ("x_on", self.x_on),
            ("beta", self.beta),
            ("g_m", self.g_m),
            ("a", self.a),
            ("b", self.b),
        ]
    }

    /// Mutable access by field name, used by the config loader.
    pub fn field_mut(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "rate_off" => &mut self.rate_off,
            "rate_on" => &mut self.rate_on,
            "sigma_off" => &mut self.sigma_off,
            "sigma_on" => &mut self.sigma_on,
            "sigma_p" => &mut self.sigma_p,
            "x_off" => &mut self.x_off,
            "x_on" => &mut self.x_on,
            "beta" => &mut self.beta,
            "g_m" => &mut self.g_m,
            "a" => &mut self.a,
            "b" => &mut self.b,
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in self.fields() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "model.{name} must be finite and > 0, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// `a·exp(b·sqrt|v|)`, the x = 0 limit of the memductance.
    pub fn tunnel_conductance(&self, v: f64) -> f64 {
        self.a * (self.b * v.abs().sqrt()).exp()
    }
}

/// Sign of a quantity, kept separate from its magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative = -1,
    Zero = 0,
    Positive = 1,
}

impl Sign {
    pub fn of(value: f64) -> Self {
        if value > 0.0 {
            Sign::Positive
        } else if value < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_i8(self) -> i8 {
        self as i8
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.as_i8())
    }
}

/// An evolution rate stored as sign and `ln|rate|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogRate {
    pub sign: Sign,
    /// `ln|rate|`; negative infinity when `sign` is zero.
    pub log_magnitude: f64,
}

impl SignedLogRate {
    pub const ZERO: Self = Self {
        sign: Sign::Zero,
        log_magnitude: f64::NEG_INFINITY,
    };

    /// Linear-domain value; may be infinite for huge magnitudes.
    pub fn to_linear(self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            s => s.as_f64() * self.log_magnitude.exp(),
        }
    }
}

fn check_state(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("state x = {x} outside [0, 1]")));
    }
    Ok(())
}

fn check_voltage(v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(domain(format!("voltage {v} is not finite")));
    }
    Ok(())
}

/// `G(x, v) = G_M·x + a·exp(b·sqrt|v|)·(1 − x)` in siemens.
pub fn memductance(p: &ModelParams, x: f64, v: f64) -> Result<f64> {
    check_state(x)?;
    check_voltage(v)?;
    Ok(p.g_m * x + p.tunnel_conductance(v) * (1.0 - x))
}

/// `I = G(x, v)·v` in amperes.
pub fn current(p: &ModelParams, x: f64, v: f64) -> Result<f64> {
    Ok(memductance(p, x, v)? * v)
}

/// Linear-domain `dx/dt` (1/s).
///
/// Fails with [`Error::Overflow`] if the magnitude is not representable;
/// callers that only need signs or comparisons should use
/// [`log_evolution_rate`].
pub fn evolution_rate(p: &ModelParams, x: f64, v: f64) -> Result<f64> {
    check_state(x)?;
    check_voltage(v)?;
    let rate = if v > 0.0 {
        let g = memductance(p, x, v)?;
        let exponent = -(x * x) / (p.x_on * p.x_on) + g * v * v / p.sigma_p;
        p.rate_on * (v / p.sigma_on).sinh() * exponent.exp()
    } else if v < 0.0 {
        if x == 0.0 {
            return Ok(0.0);
        }
        let g = memductance(p, x, v)?;
        let exponent = -(p.x_off * p.x_off) / (x * x) + 1.0 / (1.0 + p.beta * g * v * v);
        p.rate_off * (v / p.sigma_off).sinh() * exponent.exp()
    } else {
        return Ok(0.0);
    };
    if rate.is_finite() {
        Ok(rate)
    } else {
        Err(Error::Overflow(format!(
            "evolution rate at x = {x}, v = {v} exceeds the f64 range"
        )))
    }
}

/// Sign and `ln|dx/dt|`, summed factor by factor so it never overflows.
pub fn log_evolution_rate(p: &ModelParams, x: f64, v: f64) -> Result<SignedLogRate> {
    check_state(x)?;
    check_voltage(v)?;
    if v > 0.0 {
        let g = memductance(p, x, v)?;
        Ok(SignedLogRate {
            sign: Sign::Positive,
            log_magnitude: p.rate_on.ln() + ln_sinh(v / p.sigma_on) - (x * x) / (p.x_on * p.x_on)
                + g * v * v / p.sigma_p,
        })
    } else if v < 0.0 {
        if x == 0.0 {
            return Ok(SignedLogRate::ZERO);
        }
        let g = memductance(p, x, v)?;
        Ok(SignedLogRate {
            sign: Sign::Negative,
            log_magnitude: p.rate_off.ln() + ln_sinh(-v / p.sigma_off)
                - (p.x_off * p.x_off) / (x * x)
                + 1.0 / (1.0 + p.beta * g * v * v),
        })
    } else {
        Ok(SignedLogRate::ZERO)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn defaults() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn memductance_endpoints() {
        let p = defaults();
        assert_eq!(memductance(&p, 1.0, 0.7).unwrap(), 0.025);
        assert_eq!(memductance(&p, 0.0, 0.0).unwrap(), 7.2e-6);
    }

    #[test]
    fn memductance_reference_value() {
        // 0.025·0.3 + 7.2e-6·exp(4.7·sqrt(0.54))·0.7, evaluated with mpmath
        let g = memductance(&defaults(), 0.3, 0.54).unwrap();
        assert!((g - 7.659_363_318_797_6e-3).abs() < 1e-15, "{g}");
    }

    #[test]
    fn current_values() {
        let p = defaults();
        assert_eq!(current(&p, 0.4, 0.0).unwrap(), 0.0);
        assert!((current(&p, 1.0, 0.5).unwrap() - 0.0125).abs() < 1e-17);
        let i = current(&p, 0.3, -0.6).unwrap();
        assert!((i - (-4.615_259_349_675_4e-3)).abs() < 1e-14, "{i}");
    }

    #[test]
    fn domain_errors() {
        let p = defaults();
        assert!(matches!(memductance(&p, 1.5, 0.1), Err(Error::Domain(_))));
        assert!(matches!(memductance(&p, -0.1, 0.1), Err(Error::Domain(_))));
        assert!(matches!(
            memductance(&p, 0.5, f64::NAN),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            evolution_rate(&p, 2.0, 0.1),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            log_evolution_rate(&p, 0.5, f64::INFINITY),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn evolution_rate_cases() {
        let p = defaults();
        assert_eq!(evolution_rate(&p, 0.5, 0.0).unwrap(), 0.0);
        assert_eq!(evolution_rate(&p, 0.0, -0.5).unwrap(), 0.0);
        assert!(evolution_rate(&p, 0.5, -0.5).unwrap() < 0.0);
        // B·sinh(1.2)·exp(-25)·exp(G·0.2916/σ_p), mpmath reference
        let r = evolution_rate(&p, 0.3, 0.54).unwrap();
        assert!((r / 3.724_398_096_82e9 - 1.0).abs() < 1e-9, "{r}");
    }

    #[test]
    fn overflow_is_reported() {
        let p = ModelParams {
            sigma_p: 1e-7,
            ..defaults()
        };
        assert!(matches!(
            evolution_rate(&p, 1.0, 1.0),
            Err(Error::Overflow(_))
        ));
        let l = log_evolution_rate(&p, 1.0, 1.0).unwrap();
        assert!(l.log_magnitude.is_finite() && l.log_magnitude > 709.0);
    }

    #[test]
    fn log_rate_cases() {
        let p = defaults();
        assert_eq!(log_evolution_rate(&p, 0.5, 0.0).unwrap().sign, Sign::Zero);
        let l = log_evolution_rate(&p, 0.3, 0.54).unwrap();
        assert_eq!(l.sign, Sign::Positive);
        assert!((l.log_magnitude - 3.724_398_096_82e9_f64.ln()).abs() < 1e-9);
        let l = log_evolution_rate(&p, 0.5, -1.0).unwrap();
        assert_eq!(l.sign, Sign::Negative);
        let g = memductance(&p, 0.5, -1.0).unwrap();
        let expected =
            1e-10_f64.ln() + 1.0 / 0.013 - std::f64::consts::LN_2 - 0.64 + 1.0 / (1.0 + 500.0 * g);
        assert!((l.log_magnitude - expected).abs() < 1e-12);
    }

    #[test]
    fn continuity_at_zero_voltage() {
        let p = defaults();
        for &x in &[0.1, 0.5, 1.0] {
            assert!(evolution_rate(&p, x, 1e-12).unwrap().abs() < 1e-9);
            assert!(evolution_rate(&p, x, -1e-12).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(defaults().validate().is_ok());
        let p = ModelParams {
            sigma_p: -4e-5,
            ..defaults()
        };
        assert!(matches!(p.validate(), Err(Error::InvalidParameter(_))));
    }

    proptest! {
        #[test]
        fn sign_dichotomy(x in 1e-3f64..=1.0, v in 1e-3f64..1.0) {
            let p = defaults();
            prop_assert!(log_evolution_rate(&p, x, v).unwrap().sign == Sign::Positive);
            prop_assert!(log_evolution_rate(&p, x, -v).unwrap().sign == Sign::Negative);
        }

        #[test]
        fn memductance_affine_in_x(x in 0.0f64..=1.0, v in -1.0f64..1.0) {
            let p = defaults();
            let g0 = memductance(&p, 0.0, v).unwrap();
            let g1 = memductance(&p, 1.0, v).unwrap();
            let gx = memductance(&p, x, v).unwrap();
            prop_assert!((gx - (g1 * x + g0 * (1.0 - x))).abs() <= 1e-15);
            prop_assert!(gx > 0.0);
        }

        #[test]
        fn log_linear_consistency(x in 0.02f64..=1.0, v in -1.0f64..1.0) {
            let p = defaults();
            if let Ok(linear) = evolution_rate(&p, x, v) {
                let log = log_evolution_rate(&p, x, v).unwrap();
                if linear != 0.0 && linear.abs() > f64::MIN_POSITIVE {
                    prop_assert!((log.to_linear() - linear).abs() <= 1e-9 * linear.abs());
                    prop_assert!((log.log_magnitude - linear.abs().ln()).abs()
                        <= 1e-10 * log.log_magnitude.abs().max(1.0));
                }
            }
        }
    }
}
