//! Representation-level metrics: marked length spectra, entropy estimates,
//! the asymmetric distance between representations with witnesses, and the
//! Finsler norm along analytic families.

mod derivative;
mod distance;
mod entropy;
mod lengths;

pub use derivative::{
    finsler_norm_reps, length_derivative, DerivativeMethod, FinslerReport, LengthDerivative,
    ENTROPY_STEP, FD_STEP,
};
pub use distance::{dth_reps, dth_tables, RepDistanceReport, TracePoint};
pub use entropy::{
    entropy_estimate, entropy_from_table, EntropyEstimate, EstimatorMode, MIN_WINDOW_COUNT,
};
pub use lengths::{length_spectrum, LengthEntry, LengthRow, LengthTable, LENGTH_FLOOR};
