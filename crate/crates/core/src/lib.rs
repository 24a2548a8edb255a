//! Finite-dimensional phase operators and ring-waveguide propagation.
//!
//! The library lives on truncated mode spaces where the discrete Fourier
//! transform diagonalizes every operator of interest analytically:
//!
//! * [`linalg`]: dense complex matrices and field vectors, sized for spaces
//!   of at most a few hundred dimensions, plus the named tolerances used by
//!   every comparison.
//! * [`phase`]: number operator, DFT, phase states, the phase operator
//!   built along independent routes, the cyclic shift, and spectral
//!   operator functions including the matrix logarithm on the branch that
//!   makes the shift/phase identities exact.
//! * [`bessel`]: integer-order Bessel functions of the first kind, from
//!   scratch, accurate to near machine precision over the range the series
//!   propagator needs.
//! * [`waveguide`]: propagation in a ring of coupled waveguides by four
//!   independent methods, with power conservation and revival detection.
//! * [`verify`]: the runtime verification suite that re-derives every
//!   invariant the crate promises and reports residuals against bounds.

pub mod bessel;
pub mod error;
pub mod linalg;
pub mod phase;
pub mod verify;
pub mod waveguide;

pub use error::{Error, Result};

/// The complex scalar used throughout the public API, re-exported so
/// downstream crates need not depend on `num-complex` themselves.
pub use num_complex::Complex64;
