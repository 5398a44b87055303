//! Randomized building blocks: top-eigenvalue estimation by power iteration
//! and Gaussian trace estimation.

mod power;
mod trace;

pub use power::{
    boosted_power_method, default_power_iterations, power_method, PowerMethodResult, ALPHA_FACTOR,
    MAX_RESTARTS,
};
pub use trace::{gaussian_trace, gaussian_trace_with_accuracy, probes_needed, TraceEstimate};
