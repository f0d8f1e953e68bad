//! Log-domain helpers shared by the model and the closed-form curves.

use std::f64::consts::LN_2;

/// Above this argument `ln(sinh(y))` is evaluated as `y - ln 2`; the
/// relative error of the asymptotic form is below `e^-60` there.
pub const LN_SINH_SWITCHOVER: f64 = 30.0;

/// Above this argument `arcsinh(y)` is evaluated as `ln(2y)`.
pub const ASINH_LOG_SWITCHOVER: f64 = 1e15;

/// Natural log of `sinh(y)` for `y > 0`.
pub fn ln_sinh(y: f64) -> f64 {
    debug_assert!(y > 0.0);
    if y > LN_SINH_SWITCHOVER {
        y - LN_2
    } else {
        // sinh(y) = e^y (1 - e^{-2y}) / 2, stable for small y through exp_m1
        (0.5 * (-(-2.0 * y).exp_m1())).ln() + y
    }
}

/// `arcsinh(e^log_arg)` without forming `e^log_arg` when it would overflow.
pub fn asinh_of_exp(log_arg: f64) -> f64 {
    if log_arg > ASINH_LOG_SWITCHOVER.ln() {
        log_arg + LN_2
    } else {
        log_arg.exp().asinh()
    }
}

/// `n` evenly spaced samples over `[lo, hi]` (inclusive). `n == 1` yields `lo`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// `n` logarithmically spaced samples over `[lo, hi]`, both positive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n)
        .into_iter()
        .enumerate()
        .map(|(i, l)| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => l.exp(),
        })
        .collect()
}
