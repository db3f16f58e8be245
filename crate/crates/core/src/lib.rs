//! Diversity-multiplexing tradeoff lab for real and quaternionic lattice
//! space-time codes over Rayleigh MIMO channels.
//!
//! * [`linalg`]: small dense complex matrices, determinants, Hermitian
//!   eigenvalues.
//! * [`channel`]: the block-fading channel, equivalent real and
//!   quaternionic channels, mutual information.
//! * [`lattice`]: matrix lattices, shell enumeration, shaped codebooks.
//! * [`dmt`]: tradeoff curves and the exponent minimization behind them.
//! * [`sim`]: Monte Carlo outage and error estimators, slope fits.

// Negated float comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod dmt;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod rng;
pub mod sim;

pub use channel::{Mode, SystemConfig};
pub use dmt::{Lemma2Problem, PiecewiseLinearCurve};
pub use error::{Error, Result};
pub use lattice::{Codebook, Flavor, MatrixLattice, ShellPoint};
pub use linalg::ComplexMatrix;
pub use num_complex::Complex64;
pub use sim::{EigenProfile, SimulationResult, SlopeEstimate};
