//! Numerical toolkit for signed redundancy measures and soliton wave trains.
//!
//! The crate is split by subject:
//!
//! - [`infocalc`]: Shannon entropies over categorical joint tables, signed
//!   interaction information and mutual redundancy.
//! - [`soliton`]: closed-form KdV solitons (single and Hirota N-soliton), a
//!   finite-difference PDE residual checker, sech² pulse trains and the
//!   amplitude/time ratio law.
//! - [`fitter`]: decomposition of a time series into a sech² wave train by
//!   damped Gauss-Newton least squares.
//! - [`stats`]: Pearson correlation, OLS, Dickey-Fuller and Engle-Granger.
//! - [`io`]: the CSV formats consumed and produced by the command-line tool.

pub mod error;
pub mod fitter;
pub mod infocalc;
pub mod io;
pub mod soliton;
pub mod stats;

pub use error::{Error, Result};
pub use fitter::{
    detect_peaks, fit_wave_train, goodness, smooth, ConstraintMode, FitConfig, FitResult,
    Goodness, Peak, TimeSeries,
};
pub use infocalc::{
    interaction_information, marginalize, mutual_redundancy, redundancy_tradeoff,
    relative_redundancy, shannon_entropy, total_uncertainty, CategoricalJoint, Dimension,
    EntropyReport, TradeoffVectors,
};
pub use soliton::{
    hirota_f, hirota_log_f, kdv_residual, logistic, logistic_derivative, n_soliton_field, phase_shift,
    n_soliton_value, ratio_law, sech2, sech2_train, single_soliton, single_soliton_field, FieldGrid, Pulse,
    RatioReport, SolitonSpec, WaveTrain,
};
pub use stats::{
    adf_test, engle_granger, ols, pearson, CointegrationResult, RegressionResult,
    UnitRootResult,
};
