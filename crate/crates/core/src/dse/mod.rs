//! Dynamic state estimation over sliding windows with a chi-squared test.

pub mod chi2;
pub mod config;
pub mod detect;
pub mod jacobian;
pub mod residual;
pub mod solver;

pub use chi2::chi_squared_cdf;
pub use config::{DseConfig, Weights, VIRTUAL_SIGMA};
pub use detect::{sliding_detection, summarize, Detection, Interval, IntervalSummary, WindowResult};
pub use jacobian::numerical_jacobian;
pub use residual::{build_residual, residual_rows, state_dim, ObservationWindow};
pub use solver::{gauss_newton, gauss_newton_solve, EstimationResult, GnOutcome, GnSettings, Verdict};
