//! Zernike radial polynomials `R_n^|m|`, their Chebyshev connection coefficients, and
//! exact bounds on their radial derivatives.
//!
//! The crate is organised bottom-up:
//!
//! - [`exact_arith`]: big-rational scalars and dense polynomials, the ground truth for
//!   every other module.
//! - [`classical_polys`]: Jacobi, Chebyshev (first kind) and Gegenbauer polynomials,
//!   exactly and in floating point.
//! - [`zernike_radial`]: `R_n^|m|` and its k-th derivative by three independent routes.
//! - [`connection`]: the non-negative coefficients `a_i` with
//!   `R_n^|m|(cos t) = sum_i a_i cos(i t)`.
//! - [`bounds_sharpness`]: the bound `n^2 (n^2 - 1) ... (n^2 - (k-1)^2) / (2^k (1/2)_k)`
//!   on `max |R^(k)|`, its lower companion, and asymptotic diagnostics.
//! - [`verify`]: exhaustive exact sweeps over all of the above.

pub mod bounds_sharpness;
pub mod classical_polys;
pub mod connection;
pub mod error;
pub mod exact_arith;
pub mod text;
pub mod verify;
pub mod zernike_radial;

pub use error::{Error, Result};
pub use exact_arith::{BigRational, RationalPoly};
pub use zernike_radial::RadialIndex;
