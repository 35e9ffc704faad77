//! Least squares, weighted least squares and Chebyshev (minimax) fits of
//! the constant vector by residue-matrix columns.

mod lsq;
mod minimax;
mod probe;
mod simplex;
mod weighted;

pub use lsq::{lsq_unweighted, lsq_unweighted_float, LsqResult};
pub use minimax::{
    chebyshev_fit, chebyshev_fit_float_raw, feasibility, FloatFit, MinimaxOptions, MinimaxResult,
    SolvePath,
};
pub use probe::{optimality_probe, Objective, ProbeOutcome};
pub use weighted::{distance, weighted_lsq, DistanceResult, WeightedOptions};
