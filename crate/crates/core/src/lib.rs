//! Bifurcation analysis of a TaO memristor driven by narrow pulses of
//! alternating polarity.
//!
//! The state equation averaged over one pulse period gives a vector field
//! on the line, `dx/dt = g(x, V+, V−)`. Its zeros and their stability are
//! enumerated in [`fixedpoints`], mapped over the pulse amplitudes in
//! [`bifurcation`], compared against closed-form saddle-node curves in
//! [`curves`], and checked against direct time-domain integration in
//! [`simulate`].

pub mod averaging;
pub mod bifurcation;
pub mod checks;
pub mod config;
pub mod curves;
pub mod error;
pub mod fixedpoints;
pub mod model;
pub mod numerics;
pub mod output;
pub mod simulate;

pub use averaging::{effective_g, g_sign, PulseDrive};
pub use bifurcation::{
    nst_map, saddle_node_threshold, sign_map, trace_boundary, AxisRange, RegionGrid, SaddleNode,
};
pub use error::{Error, Result};
pub use fixedpoints::{count_stable, find_fixed_points, FixedPoint, ScanSpec, Stability};
pub use model::{
    evolution_rate, log_evolution_rate, memductance, ModelParams, Sign, SignedLogRate,
};
pub use simulate::{detect_attractor, simulate, IntegratorSpec, Trajectory};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
