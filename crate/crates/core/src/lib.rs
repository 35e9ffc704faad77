//! Exact laboratory for Nyman–Beurling style approximation of the constant
//! sequence by fractional-part (Beurling) sequences in the weighted space
//! with inner product `Σ aᵢ bᵢ / (i(i+1))`.
//!
//! The crate is split by concern:
//!
//! * [`sequences`] builds residues, Beurling entries, lcm periods and the
//!   residue matrices `A(n, M)`.
//! * [`linalg`] is dense exact-rational linear algebra (rank, Gram matrix,
//!   pseudoinverse, projections, operator norms) with an `f64` mirror.
//! * [`hilbert`] holds the weights and certified residue-class weight sums.
//! * [`solvers`] has the least-squares, weighted least-squares and
//!   Chebyshev (minimax) fits.
//! * [`probes`] turns each structural claim about these objects into a
//!   computation that reports `Holds`, `Fails` or `Measured`.

pub mod error;
pub mod exact;
pub mod hilbert;
pub mod linalg;
pub mod probes;
pub mod sequences;
pub mod solvers;

pub use error::{Error, Result};
pub use exact::Rational;
pub use hilbert::{Interval, WeightedSpace};
pub use linalg::{ExactMatrix, FloatMatrix, Matrix};
pub use sequences::{CoefficientVector, Convention, ResidueSpec};

/// Default tolerance for certified class sums.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default seed for every randomized probe.
pub const DEFAULT_SEED: u64 = 2025;
