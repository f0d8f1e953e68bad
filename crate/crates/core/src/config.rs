//! Run configuration: a flat `section.key = value` text format where every
//! key is optional and defaults to the reference parameter set.
//!
//! ```text
//! # bistable drive
//! drive.v_plus = 0.54
//! drive.v_minus = -0.6
//! nst_map.n_v_plus = 101
//! ```

use std::fmt::Display;
use std::str::FromStr;

use thiserror::Error;

use crate::averaging::PulseDrive;
use crate::bifurcation::AxisRange;
use crate::checks::GapWindow;
use crate::curves::Correction;
use crate::fixedpoints::ScanSpec;
use crate::model::ModelParams;
use crate::simulate::IntegratorSpec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("invalid override `{0}`, expected key=value")]
    BadOverride(String),
    #[error(transparent)]
    Invalid(#[from] crate::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignMapSettings {
    pub v_plus: f64,
    pub v_minus: AxisRange,
    pub x: AxisRange,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateSettings {
    pub x0: f64,
    pub n_periods: usize,
    pub tail_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSettings {
    /// Log-spaced parameter samples of curve A.
    pub x: AxisRange,
    /// Amplitude samples of curves B, C and D.
    pub v_plus: AxisRange,
    pub correction: Correction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateSettings {
    pub tolerance_scale: f64,
    pub window: GapWindow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub drive: PulseDrive,
    pub sign_map: SignMapSettings,
    pub nst_map: (AxisRange, AxisRange),
    pub scan: ScanSpec,
    pub integrator: IntegratorSpec,
    pub simulate: SimulateSettings,
    pub curves: CurveSettings,
    pub validate: ValidateSettings,
    pub output_prefix: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::default(),
            drive: PulseDrive::default(),
            sign_map: SignMapSettings {
                v_plus: 0.6,
                v_minus: AxisRange::new(-1.0, -0.3, 201),
                x: AxisRange::new(1e-3, 1.0, 201),
            },
            nst_map: (
                AxisRange::new(0.3, 0.8, 251),
                AxisRange::new(-1.0, -0.3, 251),
            ),
            scan: ScanSpec::default(),
            integrator: IntegratorSpec::default(),
            simulate: SimulateSettings {
                x0: 0.2,
                n_periods: 20_000,
                tail_fraction: 0.2,
            },
            curves: CurveSettings {
                x: AxisRange::new(0.02, 0.95, 2000),
                v_plus: AxisRange::new(0.3, 0.8, 501),
                correction: Correction::OneStep,
            },
            validate: ValidateSettings {
                tolerance_scale: 1.0,
                window: GapWindow::default(),
            },
            output_prefix: String::new(),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
    })
}

fn range_field<'a>(r: &'a mut AxisRange, field: &str) -> Option<RangeField<'a>> {
    match field {
        "min" => Some(RangeField::F(&mut r.min)),
        "max" => Some(RangeField::F(&mut r.max)),
        "n" => Some(RangeField::N(&mut r.n)),
        _ => None,
    }
}

enum RangeField<'a> {
    F(&'a mut f64),
    N(&'a mut usize),
}

impl RunConfig {
    /// Parses a config file body on top of the defaults. Values are not
    /// validated until [`RunConfig::validate`].
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: k + 1,
                text: raw.to_string(),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Applies a `key=value` command-line override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::BadOverride(assignment.to_string()))?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let unknown = || ConfigError::UnknownKey(key.to_string());
        let (section, field) = key.split_once('.').ok_or_else(unknown)?;
        match section {
            "model" => *self.model.field_mut(field).ok_or_else(unknown)? = parse(key, value)?,
            "drive" => {
                let d = &mut self.drive;
                *match field {
                    "v_plus" => &mut d.v_plus,
                    "v_minus" => &mut d.v_minus,
                    "tau_plus" => &mut d.tau_plus,
                    "tau_minus" => &mut d.tau_minus,
                    "period" => &mut d.period,
                    _ => return Err(unknown()),
                } = parse(key, value)?;
            }
            "sign_map" if field == "v_plus" => self.sign_map.v_plus = parse(key, value)?,
            "sign_map" | "nst_map" | "curves" | "validate" => {
                let (axis, part) = field.rsplit_once('_').ok_or_else(unknown)?;
                let range = match (section, axis) {
                    ("sign_map", "v_minus") => &mut self.sign_map.v_minus,
                    ("sign_map", "x") => &mut self.sign_map.x,
                    ("nst_map", "v_plus") => &mut self.nst_map.0,
                    ("nst_map", "v_minus") => &mut self.nst_map.1,
                    ("curves", "x") => &mut self.curves.x,
                    ("curves", "v_plus") => &mut self.curves.v_plus,
                    ("validate", "v_plus") => &mut self.validate.window.v_plus,
                    ("validate", "v_minus") => &mut self.validate.window.v_minus,
                    ("curves", "amplitude") if part == "correction" => {
                        self.curves.correction = match value {
                            "one-step" => Correction::OneStep,
                            "converged" => Correction::Converged,
                            _ => {
                                return Err(ConfigError::BadValue {
                                    key: key.into(),
                                    value: value.into(),
                                })
                            }
                        };
                        return Ok(());
                    }
                    ("validate", "tolerance") if part == "scale" => {
                        self.validate.tolerance_scale = parse(key, value)?;
                        return Ok(());
                    }
                    _ => return Err(unknown()),
                };
                match range_field(range, part).ok_or_else(unknown)? {
                    RangeField::F(f) => *f = parse(key, value)?,
                    RangeField::N(n) => *n = parse(key, value)?,
                }
            }
            "scan" => match field {
                "x_lo" => self.scan.x_lo = parse(key, value)?,
                "x_hi" => self.scan.x_hi = parse(key, value)?,
                "n_grid" => self.scan.n_grid = parse(key, value)?,
                "refine_tol" => self.scan.refine_tol = parse(key, value)?,
                _ => return Err(unknown()),
            },
            "integrator" => match field {
                "max_rel_step" => self.integrator.max_rel_step = parse(key, value)?,
                "max_substeps_per_pulse" => {
                    self.integrator.max_substeps_per_pulse = parse(key, value)?
                }
                _ => return Err(unknown()),
            },
            "simulate" => match field {
                "x0" => self.simulate.x0 = parse(key, value)?,
                "n_periods" => self.simulate.n_periods = parse(key, value)?,
                "tail_fraction" => self.simulate.tail_fraction = parse(key, value)?,
                _ => return Err(unknown()),
            },
            "output" if field == "prefix" => self.output_prefix = value.to_string(),
            _ => return Err(unknown()),
        }
        Ok(())
    }

    /// Every key with its current value, in a fixed order.
    pub fn entries(&self) -> Vec<(String, String)> {
        fn e(v: f64) -> String {
            format!("{v:e}")
        }
        fn push_range(out: &mut Vec<(String, String)>, prefix: &str, r: &AxisRange) {
            out.push((format!("{prefix}_min"), e(r.min)));
            out.push((format!("{prefix}_max"), e(r.max)));
            out.push((format!("{prefix}_n"), r.n.to_string()));
        }
        let mut out: Vec<(String, String)> = self
            .model
            .fields()
            .iter()
            .map(|(k, v)| (format!("model.{k}"), e(*v)))
            .collect();
        let d = &self.drive;
        for (k, v) in [
            ("v_plus", d.v_plus),
            ("v_minus", d.v_minus),
            ("tau_plus", d.tau_plus),
            ("tau_minus", d.tau_minus),
            ("period", d.period),
        ] {
            out.push((format!("drive.{k}"), e(v)));
        }
        out.push(("sign_map.v_plus".into(), e(self.sign_map.v_plus)));
        push_range(&mut out, "sign_map.v_minus", &self.sign_map.v_minus);
        push_range(&mut out, "sign_map.x", &self.sign_map.x);
        push_range(&mut out, "nst_map.v_plus", &self.nst_map.0);
        push_range(&mut out, "nst_map.v_minus", &self.nst_map.1);
        out.push(("scan.x_lo".into(), e(self.scan.x_lo)));
        out.push(("scan.x_hi".into(), e(self.scan.x_hi)));
        out.push(("scan.n_grid".into(), self.scan.n_grid.to_string()));
        out.push(("scan.refine_tol".into(), e(self.scan.refine_tol)));
        out.push((
            "integrator.max_rel_step".into(),
            e(self.integrator.max_rel_step),
        ));
        out.push((
            "integrator.max_substeps_per_pulse".into(),
            self.integrator.max_substeps_per_pulse.to_string(),
        ));
        out.push(("simulate.x0".into(), e(self.simulate.x0)));
        out.push((
            "simulate.n_periods".into(),
            self.simulate.n_periods.to_string(),
        ));
        out.push((
            "simulate.tail_fraction".into(),
            e(self.simulate.tail_fraction),
        ));
        push_range(&mut out, "curves.x", &self.curves.x);
        push_range(&mut out, "curves.v_plus", &self.curves.v_plus);
        out.push((
            "curves.amplitude_correction".into(),
            match self.curves.correction {
                Correction::OneStep => "one-step",
                Correction::Converged => "converged",
            }
            .into(),
        ));
        out.push((
            "validate.tolerance_scale".into(),
            e(self.validate.tolerance_scale),
        ));
        push_range(&mut out, "validate.v_plus", &self.validate.window.v_plus);
        push_range(&mut out, "validate.v_minus", &self.validate.window.v_minus);
        out.push(("output.prefix".into(), self.output_prefix.clone()));
        out
    }

    /// Re-checks every embedded invariant.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.validate()?;
        self.drive.validate()?;
        self.scan.validate()?;
        self.integrator.validate()?;
        let bad = |msg: String| ConfigError::Invalid(crate::Error::InvalidParameter(msg));
        let sm = &self.sign_map;
        sm.v_minus.validate("sign_map.v_minus")?;
        sm.x.validate("sign_map.x")?;
        if sm.v_minus.n < 2 || sm.x.n < 2 {
            return Err(bad("sign map needs at least 2 samples per axis".into()));
        }
        if !(sm.x.min > 0.0 && sm.x.max <= 1.0) {
            return Err(bad("sign_map.x window must lie in (0, 1]".into()));
        }
        if sm.v_plus.is_nan() || sm.v_plus <= 0.0 || sm.v_minus.max >= 0.0 {
            return Err(bad("sign map needs V+ > 0 and V− < 0".into()));
        }
        self.nst_map.0.validate("nst_map.v_plus")?;
        self.nst_map.1.validate("nst_map.v_minus")?;
        if self.nst_map.0.min <= 0.0 || self.nst_map.1.max >= 0.0 {
            return Err(bad("nst map needs V+ > 0 and V− < 0".into()));
        }
        let c = &self.curves;
        c.x.validate("curves.x")?;
        c.v_plus.validate("curves.v_plus")?;
        if !(c.x.min > 0.0 && c.x.max < 1.0) || c.v_plus.min <= 0.0 {
            return Err(bad("curve samples need x in (0, 1) and V+ > 0".into()));
        }
        let s = &self.simulate;
        if !(s.x0 > 0.0 && s.x0 < 1.0) {
            return Err(bad(format!("simulate.x0 = {} outside (0, 1)", s.x0)));
        }
        if !(s.tail_fraction > 0.0 && s.tail_fraction <= 1.0) {
            return Err(bad("simulate.tail_fraction must be in (0, 1]".into()));
        }
        let v = &self.validate;
        if !(v.tolerance_scale > 0.0 && v.tolerance_scale.is_finite()) {
            return Err(bad("validate.tolerance_scale must be > 0".into()));
        }
        v.window.v_plus.validate("validate.v_plus")?;
        v.window.v_minus.validate("validate.v_minus")?;
        Ok(())
    }

    /// `#`-prefixed header recording the program version, the command and
    /// the full configuration.
    pub fn header(&self, command: impl Display) -> Vec<String> {
        let mut lines = vec![
            format!("tao-memristor {}", crate::VERSION),
            format!("command: {command}"),
        ];
        lines.extend(
            self.entries()
                .into_iter()
                .map(|(k, v)| format!("{k} = {v}")),
        );
        lines
    }
}
