//! C ABI over `tao_memristor`.
//!
//! Every fallible call returns a [`TaoStatus`] and writes results through
//! out-pointers. On failure, [`tao_last_error_message`] describes the most
//! recent error on the calling thread. Objects that own memory are opaque
//! handles released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tao_memristor::bifurcation::SaddleNode;
use tao_memristor::curves::{self, Correction, PulseTiming};
use tao_memristor::simulate::BoundaryHit;
use tao_memristor::{
    Error, FixedPoint, ModelParams, PulseDrive, ScanSpec, Sign, Stability, Trajectory,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaoStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Overflow = 3,
    InvalidBracket = 4,
    Range = 5,
    Integration = 6,
    TooShort = 7,
    InvalidParameter = 8,
    UnknownField = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaoStability {
    Stable = 1,
    Unstable = -1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaoSaddleNode {
    Creation = 0,
    Annihilation = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaoBoundaryHit {
    None = 0,
    Upper = 1,
    Lower = 2,
}

/// Rectangular pulse train: amplitudes in volts, widths and period in seconds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaoDrive {
    pub v_plus: f64,
    pub v_minus: f64,
    pub tau_plus: f64,
    pub tau_minus: f64,
    pub period: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaoScan {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_grid: usize,
    pub refine_tol: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaoIntegrator {
    pub max_rel_step: f64,
    pub max_substeps_per_pulse: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaoFixedPoint {
    pub x: f64,
    pub stability: TaoStability,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub residual_log: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaoCurvePoint {
    pub v_plus: f64,
    pub v_minus: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaoCusp {
    pub x_c: f64,
    pub v_plus: f64,
    pub v_minus: f64,
}

/// Model parameter set.
pub struct TaoModel {
    params: ModelParams,
}

/// Fixed points of one drive, ascending in x.
pub struct TaoFixedPointList {
    points: Vec<FixedPoint>,
}

/// Recorded pulse-edge samples of a simulation.
pub struct TaoTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(TaoStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) => TaoStatus::Domain,
            Error::Overflow(_) => TaoStatus::Overflow,
            Error::InvalidBracket(_) => TaoStatus::InvalidBracket,
            Error::Range(_) => TaoStatus::Range,
            Error::Integration(_) => TaoStatus::Integration,
            Error::TooShort(_) => TaoStatus::TooShort,
            Error::InvalidParameter(_) => TaoStatus::InvalidParameter,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TaoStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TaoStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TaoStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(TaoStatus::NullPointer, format!("{what} is null"))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

impl From<TaoDrive> for PulseDrive {
    fn from(d: TaoDrive) -> Self {
        PulseDrive {
            v_plus: d.v_plus,
            v_minus: d.v_minus,
            tau_plus: d.tau_plus,
            tau_minus: d.tau_minus,
            period: d.period,
        }
    }
}

impl From<PulseDrive> for TaoDrive {
    fn from(d: PulseDrive) -> Self {
        TaoDrive {
            v_plus: d.v_plus,
            v_minus: d.v_minus,
            tau_plus: d.tau_plus,
            tau_minus: d.tau_minus,
            period: d.period,
        }
    }
}

impl From<TaoScan> for ScanSpec {
    fn from(s: TaoScan) -> Self {
        ScanSpec {
            x_lo: s.x_lo,
            x_hi: s.x_hi,
            n_grid: s.n_grid,
            refine_tol: s.refine_tol,
        }
    }
}

unsafe fn drive_arg(d: *const TaoDrive) -> Result<PulseDrive, Failure> {
    let d: PulseDrive = (*get(d, "drive")?).into();
    d.validate()?;
    Ok(d)
}

unsafe fn scan_arg(s: *const TaoScan) -> Result<ScanSpec, Failure> {
    let s: ScanSpec = (*get(s, "scan")?).into();
    s.validate()?;
    Ok(s)
}

fn sign_code(s: Sign) -> i32 {
    s.as_i8() as i32
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tao_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tao_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn tao_drive_default() -> TaoDrive {
    PulseDrive::default().into()
}

#[no_mangle]
pub extern "C" fn tao_scan_default() -> TaoScan {
    let s = ScanSpec::default();
    TaoScan {
        x_lo: s.x_lo,
        x_hi: s.x_hi,
        n_grid: s.n_grid,
        refine_tol: s.refine_tol,
    }
}

#[no_mangle]
pub extern "C" fn tao_integrator_default() -> TaoIntegrator {
    let s = tao_memristor::IntegratorSpec::default();
    TaoIntegrator {
        max_rel_step: s.max_rel_step,
        max_substeps_per_pulse: s.max_substeps_per_pulse,
    }
}

/// New model with the default parameter set. Release with [`tao_model_free`].
#[no_mangle]
pub extern "C" fn tao_model_new() -> *mut TaoModel {
    Box::into_raw(Box::new(TaoModel {
        params: ModelParams::default(),
    }))
}

/// # Safety
/// `model` must come from [`tao_model_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tao_model_free(model: *mut TaoModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Sets a parameter by name (`rate_off`, `rate_on`, `sigma_off`, `sigma_on`,
/// `sigma_p`, `x_off`, `x_on`, `beta`, `g_m`, `a`, `b`). Values must be
/// finite and positive.
///
/// # Safety
/// `model` must be a live handle and `name` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn tao_model_set(
    model: *mut TaoModel,
    name: *const c_char,
    value: f64,
) -> TaoStatus {
    guard(|| {
        let model = model.as_mut().ok_or_else(|| null("model"))?;
        let name = CStr::from_ptr(get(name, "name")?).to_string_lossy();
        let mut next = model.params;
        let slot = next.field_mut(&name).ok_or_else(|| {
            Failure(
                TaoStatus::UnknownField,
                format!("unknown parameter `{name}`"),
            )
        })?;
        *slot = value;
        next.validate()?;
        model.params = next;
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle, `name` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tao_model_get(
    model: *const TaoModel,
    name: *const c_char,
    out: *mut f64,
) -> TaoStatus {
    guard(|| {
        let model = get(model, "model")?;
        let name = CStr::from_ptr(get(name, "name")?).to_string_lossy();
        let value = model
            .params
            .fields()
            .iter()
            .find(|(n, _)| *n == name)
            .map(|&(_, v)| v)
            .ok_or_else(|| {
                Failure(
                    TaoStatus::UnknownField,
                    format!("unknown parameter `{name}`"),
                )
            })?;
        put(out, value, "out")
    })
}

/// Memductance `G(x, v)` in siemens.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_memductance(
    model: *const TaoModel,
    x: f64,
    v: f64,
    out: *mut f64,
) -> TaoStatus {
    guard(|| {
        put(
            out,
            tao_memristor::memductance(&get(model, "model")?.params, x, v)?,
            "out",
        )
    })
}

/// State evolution rate `f(x, v)` in 1/s; fails with overflow where the
/// linear value is not representable.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_evolution_rate(
    model: *const TaoModel,
    x: f64,
    v: f64,
    out: *mut f64,
) -> TaoStatus {
    guard(|| {
        put(
            out,
            tao_memristor::evolution_rate(&get(model, "model")?.params, x, v)?,
            "out",
        )
    })
}

/// Sign (−1, 0, +1) and natural log of the magnitude of `f(x, v)`.
///
/// # Safety
/// `model` must be a live handle; `sign` and `log_magnitude` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_log_evolution_rate(
    model: *const TaoModel,
    x: f64,
    v: f64,
    sign: *mut i32,
    log_magnitude: *mut f64,
) -> TaoStatus {
    guard(|| {
        let r = tao_memristor::log_evolution_rate(&get(model, "model")?.params, x, v)?;
        put(sign, sign_code(r.sign), "sign")?;
        put(log_magnitude, r.log_magnitude, "log_magnitude")
    })
}

/// Period-averaged rate `g(x)` in 1/s.
///
/// # Safety
/// `model` and `drive` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_effective_g(
    model: *const TaoModel,
    drive: *const TaoDrive,
    x: f64,
    out: *mut f64,
) -> TaoStatus {
    guard(|| {
        let d = drive_arg(drive)?;
        put(
            out,
            tao_memristor::effective_g(&get(model, "model")?.params, &d, x)?,
            "out",
        )
    })
}

/// Overflow-safe sign of `g(x)`.
///
/// # Safety
/// `model` and `drive` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_g_sign(
    model: *const TaoModel,
    drive: *const TaoDrive,
    x: f64,
    out: *mut i32,
) -> TaoStatus {
    guard(|| {
        let d = drive_arg(drive)?;
        let s = tao_memristor::g_sign(&get(model, "model")?.params, &d, x)?;
        put(out, sign_code(s), "out")
    })
}

/// Fixed points of `g` for one drive. Release the list with
/// [`tao_fixed_point_list_free`].
///
/// # Safety
/// `model`, `drive`, `scan` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_find_fixed_points(
    model: *const TaoModel,
    drive: *const TaoDrive,
    scan: *const TaoScan,
    out: *mut *mut TaoFixedPointList,
) -> TaoStatus {
    guard(|| {
        let (d, s) = (drive_arg(drive)?, scan_arg(scan)?);
        let points = tao_memristor::find_fixed_points(&get(model, "model")?.params, &d, &s)?;
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(Box::into_raw(Box::new(TaoFixedPointList { points })));
        Ok(())
    })
}

/// # Safety
/// `list` must be a live list handle or null.
#[no_mangle]
pub unsafe extern "C" fn tao_fixed_point_list_len(list: *const TaoFixedPointList) -> usize {
    list.as_ref().map_or(0, |l| l.points.len())
}

/// # Safety
/// `list` must be a live list handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_fixed_point_list_get(
    list: *const TaoFixedPointList,
    index: usize,
    out: *mut TaoFixedPoint,
) -> TaoStatus {
    guard(|| {
        let list = get(list, "list")?;
        let fp = list.points.get(index).ok_or_else(|| {
            Failure(
                TaoStatus::Range,
                format!(
                    "index {index} out of range for {} fixed points",
                    list.points.len()
                ),
            )
        })?;
        let value = TaoFixedPoint {
            x: fp.x,
            stability: match fp.stability {
                Stability::Stable => TaoStability::Stable,
                Stability::Unstable => TaoStability::Unstable,
            },
            bracket_lo: fp.bracket.0,
            bracket_hi: fp.bracket.1,
            residual_log: fp.residual_log,
        };
        put(out, value, "out")
    })
}

/// # Safety
/// `list` must come from [`tao_find_fixed_points`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tao_fixed_point_list_free(list: *mut TaoFixedPointList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}

/// Number of stable fixed points.
///
/// # Safety
/// `model`, `drive`, `scan` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_count_stable(
    model: *const TaoModel,
    drive: *const TaoDrive,
    scan: *const TaoScan,
    out: *mut usize,
) -> TaoStatus {
    guard(|| {
        let (d, s) = (drive_arg(drive)?, scan_arg(scan)?);
        put(
            out,
            tao_memristor::count_stable(&get(model, "model")?.params, &d, &s)?,
            "out",
        )
    })
}

/// `V−` of a saddle-node event at fixed `v_plus`, bisected inside
/// `[v_minus_lo, v_minus_hi]`. Only the widths and period of `drive` are used.
///
/// # Safety
/// `model`, `drive`, `scan` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_saddle_node_threshold(
    model: *const TaoModel,
    drive: *const TaoDrive,
    v_plus: f64,
    which: TaoSaddleNode,
    v_minus_lo: f64,
    v_minus_hi: f64,
    scan: *const TaoScan,
    out: *mut f64,
) -> TaoStatus {
    guard(|| {
        let (d, s) = (drive_arg(drive)?, scan_arg(scan)?);
        let which = match which {
            TaoSaddleNode::Creation => SaddleNode::Creation,
            TaoSaddleNode::Annihilation => SaddleNode::Annihilation,
        };
        let p = &get(model, "model")?.params;
        let v = tao_memristor::saddle_node_threshold(
            p,
            &d,
            v_plus,
            which,
            (v_minus_lo, v_minus_hi),
            &s,
        )?;
        put(out, v, "out")
    })
}

unsafe fn timing_arg(drive: *const TaoDrive) -> Result<PulseTiming, Failure> {
    Ok(PulseTiming::from(&drive_arg(drive)?))
}

/// Cusp of the closed-form saddle-node curve.
///
/// # Safety
/// `model` and `drive` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_cusp(
    model: *const TaoModel,
    drive: *const TaoDrive,
    out: *mut TaoCusp,
) -> TaoStatus {
    guard(|| {
        let c = curves::cusp(&get(model, "model")?.params, &timing_arg(drive)?)?;
        put(
            out,
            TaoCusp {
                x_c: c.x_c,
                v_plus: c.v_plus_c,
                v_minus: c.v_minus_c,
            },
            "out",
        )
    })
}

/// Point of curve A at parameter `x`; `converged` iterates the amplitude
/// correction to convergence instead of applying it once.
///
/// # Safety
/// `model` and `drive` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_curve_a_point(
    model: *const TaoModel,
    drive: *const TaoDrive,
    x: f64,
    converged: bool,
    out: *mut TaoCurvePoint,
) -> TaoStatus {
    guard(|| {
        let correction = if converged {
            Correction::Converged
        } else {
            Correction::OneStep
        };
        let s = curves::curve_a_at(
            &get(model, "model")?.params,
            &timing_arg(drive)?,
            x,
            correction,
        )?;
        put(
            out,
            TaoCurvePoint {
                v_plus: s.point.v_plus,
                v_minus: s.point.v_minus,
            },
            "out",
        )
    })
}

/// Point of curve B at `v_plus`.
///
/// # Safety
/// `model` and `drive` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_curve_b_point(
    model: *const TaoModel,
    drive: *const TaoDrive,
    v_plus: f64,
    out: *mut TaoCurvePoint,
) -> TaoStatus {
    guard(|| {
        let b = curves::curve_b(&get(model, "model")?.params, &timing_arg(drive)?, &[v_plus])?[0];
        put(
            out,
            TaoCurvePoint {
                v_plus: b.v_plus,
                v_minus: b.v_minus,
            },
            "out",
        )
    })
}

/// Point of curve C at `v_plus`; fails with `TAO_STATUS_RANGE` where the
/// curve does not exist.
///
/// # Safety
/// `model` and `drive` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_curve_c_point(
    model: *const TaoModel,
    drive: *const TaoDrive,
    v_plus: f64,
    out: *mut TaoCurvePoint,
) -> TaoStatus {
    guard(|| {
        let c = curves::curve_c(&get(model, "model")?.params, &timing_arg(drive)?, &[v_plus])?;
        let c = c.first().ok_or_else(|| {
            Failure(
                TaoStatus::Range,
                format!("no curve C point at V+ = {v_plus}"),
            )
        })?;
        put(
            out,
            TaoCurvePoint {
                v_plus: c.v_plus,
                v_minus: c.v_minus,
            },
            "out",
        )
    })
}

/// Point of curve D at `v_plus` and the state `x_min` it is built from.
///
/// # Safety
/// `model` and `drive` must be valid pointers; `out` and `x_min` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_curve_d_point(
    model: *const TaoModel,
    drive: *const TaoDrive,
    v_plus: f64,
    out: *mut TaoCurvePoint,
    x_min: *mut f64,
) -> TaoStatus {
    guard(|| {
        let d = curves::curve_d(&get(model, "model")?.params, &timing_arg(drive)?, &[v_plus])?[0];
        put(
            out,
            TaoCurvePoint {
                v_plus: d.point.v_plus,
                v_minus: d.point.v_minus,
            },
            "out",
        )?;
        put(x_min, d.x_min, "x_min")
    })
}

/// Integrates `n_periods` pulse periods from `x0`. Release the result with
/// [`tao_trajectory_free`].
///
/// # Safety
/// `model`, `drive`, `integrator` must be valid pointers and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_simulate(
    model: *const TaoModel,
    drive: *const TaoDrive,
    x0: f64,
    n_periods: usize,
    integrator: *const TaoIntegrator,
    out: *mut *mut TaoTrajectory,
) -> TaoStatus {
    guard(|| {
        let i = get(integrator, "integrator")?;
        let spec = tao_memristor::IntegratorSpec {
            max_rel_step: i.max_rel_step,
            max_substeps_per_pulse: i.max_substeps_per_pulse,
        };
        let t = tao_memristor::simulate(
            &get(model, "model")?.params,
            &drive_arg(drive)?,
            x0,
            n_periods,
            &spec,
        )?;
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(Box::into_raw(Box::new(TaoTrajectory { inner: t })));
        Ok(())
    })
}

/// Number of samples; `times` and `states` each hold this many values.
///
/// # Safety
/// `traj` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tao_trajectory_len(traj: *const TaoTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.inner.states.len())
}

/// Sample times in seconds, owned by the trajectory.
///
/// # Safety
/// `traj` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tao_trajectory_times(traj: *const TaoTrajectory) -> *const f64 {
    traj.as_ref()
        .map_or(ptr::null(), |t| t.inner.times.as_ptr())
}

/// State samples, owned by the trajectory.
///
/// # Safety
/// `traj` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tao_trajectory_states(traj: *const TaoTrajectory) -> *const f64 {
    traj.as_ref()
        .map_or(ptr::null(), |t| t.inner.states.as_ptr())
}

/// First edge of `[0, 1]` the state was clamped to.
///
/// # Safety
/// `traj` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn tao_trajectory_boundary_hit(traj: *const TaoTrajectory) -> TaoBoundaryHit {
    match traj.as_ref().map(|t| t.inner.boundary_hit) {
        Some(BoundaryHit::Upper) => TaoBoundaryHit::Upper,
        Some(BoundaryHit::Lower) => TaoBoundaryHit::Lower,
        _ => TaoBoundaryHit::None,
    }
}

/// Mean and peak-to-peak amplitude over the trailing `tail_fraction` of
/// the periods.
///
/// # Safety
/// `traj` must be a live handle; `mean` and `amplitude` writable.
#[no_mangle]
pub unsafe extern "C" fn tao_trajectory_attractor(
    traj: *const TaoTrajectory,
    tail_fraction: f64,
    mean: *mut f64,
    amplitude: *mut f64,
) -> TaoStatus {
    guard(|| {
        let a = tao_memristor::detect_attractor(&get(traj, "trajectory")?.inner, tail_fraction)?;
        put(mean, a.mean, "mean")?;
        put(amplitude, a.amplitude, "amplitude")
    })
}

/// # Safety
/// `traj` must come from [`tao_simulate`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tao_trajectory_free(traj: *mut TaoTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}
