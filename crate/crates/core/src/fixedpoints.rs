//! Fixed points of the averaged dynamics on `(0, 1]`: sign-change scan,
//! bisection refinement and stability classification.

use crate::averaging::{g_sign, log_balance, PulseDrive};
use crate::error::{Error, Result};
use crate::model::{ModelParams, Sign};
use crate::numerics::linspace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    Stable,
    Unstable,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub x: f64,
    pub stability: Stability,
    /// Enclosing interval; `g` has opposite signs at its ends.
    pub bracket: (f64, f64),
    /// `|ln(τ+|f+|) − ln(τ−|f−|)|` at `x`.
    pub residual_log: f64,
}

/// Grid and tolerance of the sign-change scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_grid: usize,
    pub refine_tol: f64,
}

impl Default for ScanSpec {
    fn default() -> Self {
        Self {
            x_lo: 1e-3,
            x_hi: 1.0,
            n_grid: 2001,
            refine_tol: 1e-6,
        }
    }
}

impl ScanSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_lo > 0.0 && self.x_lo < self.x_hi && self.x_hi <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "scan bounds must satisfy 0 < x_lo < x_hi <= 1, got [{}, {}]",
                self.x_lo, self.x_hi
            )));
        }
        if self.n_grid < 3 {
            return Err(Error::InvalidParameter("scan.n_grid must be >= 3".into()));
        }
        if !(self.refine_tol > 0.0 && self.refine_tol.is_finite()) {
            return Err(Error::InvalidParameter(
                "scan.refine_tol must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Bisection on the sign of `g` inside `[lo, hi]`, where the ends carry
/// signs `s_lo` and `-s_lo`. Returns the refined bracket, or a point
/// where `g` is exactly balanced.
fn refine(
    p: &ModelParams,
    d: &PulseDrive,
    mut lo: f64,
    mut hi: f64,
    s_lo: Sign,
    tol: f64,
) -> Result<(f64, f64, Option<f64>)> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match g_sign(p, d, mid)? {
            Sign::Zero => return Ok((lo, hi, Some(mid))),
            s if s == s_lo => lo = mid,
            _ => hi = mid,
        }
    }
    Ok((lo, hi, None))
}

/// All sign changes of `g` on the scan grid, refined and classified,
/// in ascending order.
///
/// Tangential zeros without a sign change are not reported, and the
/// domain edge `x = 1` never counts as a fixed point.
pub fn find_fixed_points(p: &ModelParams, d: &PulseDrive, s: &ScanSpec) -> Result<Vec<FixedPoint>> {
    s.validate()?;
    let grid = linspace(s.x_lo, s.x_hi, s.n_grid);
    let mut points = Vec::new();
    let mut last: Option<(f64, Sign)> = None;
    for &x in &grid {
        let sign = g_sign(p, d, x)?;
        if sign == Sign::Zero {
            continue;
        }
        if let Some((x_prev, s_prev)) = last {
            if s_prev != sign {
                let (lo, hi, exact) = refine(p, d, x_prev, x, s_prev, s.refine_tol)?;
                let root = match exact {
                    Some(root) => root,
                    None => interpolate_root(p, d, lo, hi)?,
                };
                points.push(FixedPoint {
                    x: root,
                    stability: if s_prev == Sign::Positive {
                        Stability::Stable
                    } else {
                        Stability::Unstable
                    },
                    bracket: (lo, hi),
                    residual_log: log_balance(p, d, root)?.abs(),
                });
            }
        }
        last = Some((x, sign));
    }
    Ok(points)
}

/// Zero of the secant through the log balance at the bracket ends.
fn interpolate_root(p: &ModelParams, d: &PulseDrive, lo: f64, hi: f64) -> Result<f64> {
    let b_lo = log_balance(p, d, lo)?;
    let b_hi = log_balance(p, d, hi)?;
    let t = b_lo / (b_lo - b_hi);
    Ok(if t.is_finite() {
        lo + t.clamp(0.0, 1.0) * (hi - lo)
    } else {
        0.5 * (lo + hi)
    })
}

/// Number of stable interior fixed points, `N_st`.
pub fn count_stable(p: &ModelParams, d: &PulseDrive, s: &ScanSpec) -> Result<usize> {
    Ok(find_fixed_points(p, d, s)?
        .iter()
        .filter(|fp| fp.stability == Stability::Stable)
        .count())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn drive(vp: f64, vm: f64) -> PulseDrive {
        PulseDrive::symmetric(vp, vm, 1e-9, 0.1)
    }

    #[test]
    fn bistable_drive_has_three_roots() {
        let p = ModelParams::default();
        let fps = find_fixed_points(&p, &drive(0.54, -0.6), &ScanSpec::default()).unwrap();
        let got: Vec<_> = fps.iter().map(|f| (f.x, f.stability)).collect();
        assert_eq!(got.len(), 3, "{got:?}");
        let expected = [
            (0.1062, Stability::Stable),
            (0.2371, Stability::Unstable),
            (0.3705, Stability::Stable),
        ];
        for ((x, s), (xe, se)) in got.iter().zip(expected) {
            assert_eq!(*s, se);
            assert!((x - xe).abs() < 1e-3, "{x} vs {xe}");
        }
    }

    #[test]
    fn brackets_are_tight_and_signed() {
        let p = ModelParams::default();
        let d = drive(0.54, -0.6);
        for fp in find_fixed_points(&p, &d, &ScanSpec::default()).unwrap() {
            let (lo, hi) = fp.bracket;
            assert!(hi - lo <= 1e-6);
            assert!(lo <= fp.x && fp.x <= hi);
            let product = g_sign(&p, &d, lo).unwrap().as_i8() * g_sign(&p, &d, hi).unwrap().as_i8();
            assert_eq!(product, -1);
            assert!(fp.residual_log < 1e-6);
        }
    }

    #[test]
    fn reference_counts() {
        let p = ModelParams::default();
        let s = ScanSpec::default();
        assert!(find_fixed_points(&p, &drive(0.72, -0.6), &s)
            .unwrap()
            .is_empty());
        assert_eq!(count_stable(&p, &drive(0.72, -0.6), &s).unwrap(), 0);
        assert_eq!(count_stable(&p, &drive(0.54, -0.4), &s).unwrap(), 1);
        assert_eq!(count_stable(&p, &drive(0.54, -0.6), &s).unwrap(), 2);
        let single = find_fixed_points(&p, &drive(0.54, -0.4), &s).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].stability, Stability::Stable);
    }

    #[test]
    fn bisection_step_budget() {
        let s = ScanSpec::default();
        let spacing = (s.x_hi - s.x_lo) / (s.n_grid - 1) as f64;
        let steps = (spacing / s.refine_tol).log2().ceil();
        assert!(steps <= 40.0);
    }

    #[test]
    fn invalid_scans() {
        let p = ModelParams::default();
        let d = PulseDrive::default();
        let bad = [
            ScanSpec {
                x_lo: 0.0,
                ..ScanSpec::default()
            },
            ScanSpec {
                x_hi: 1.5,
                ..ScanSpec::default()
            },
            ScanSpec {
                n_grid: 2,
                ..ScanSpec::default()
            },
            ScanSpec {
                refine_tol: 0.0,
                ..ScanSpec::default()
            },
        ];
        for s in bad {
            assert!(matches!(
                find_fixed_points(&p, &d, &s),
                Err(Error::InvalidParameter(_))
            ));
        }
    }
}
