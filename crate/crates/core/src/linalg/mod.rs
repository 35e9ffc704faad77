//! Dense linear algebra over exact rationals, with an `f64` mirror used only
//! for norms and large solves. Rank decisions are always made exactly.

mod elimination;
mod matrix;
mod norms;
mod pinv;

pub use elimination::{rank_exact, solve_exact, solve_exact_multi};
pub use matrix::{ExactMatrix, FloatMatrix, Matrix};
pub use norms::{op_norm_2, op_norm_inf_exact, op_norm_inf_float, DEFAULT_POWER_ITERATIONS};
pub use pinv::{
    gram, penrose_check, projection, projection_float, projection_norm_inf_exact, pseudoinverse,
    trace, PenroseReport,
};
