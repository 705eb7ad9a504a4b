//! Spectral theory of nonnegative tensors at desk scale.
//!
//! The crate computes three families of spectral quantities for nonnegative
//! partially symmetric tensors and certifies each one:
//!
//! * the Perron root of the homogeneous eigenproblem T(x) = rho x^{o(d-1)},
//!   with Collatz-Wielandt bounds, left data, perturbation coefficients, and
//!   diagonal-equivalence scalings ([`perron`]);
//! * entropic characterizations of log rho via occupation measures and
//!   Donsker-Varadhan functionals ([`entropy`]);
//! * the tropical (max-times) spectral radius via damped fixed-point
//!   iteration, Howard policy iteration, and cycle enumeration, together with
//!   an LP emitter and verifier ([`tropical`]);
//!
//! plus spectral-norm machinery and a bound-aware inequality audit
//! ([`norm`]), structural classification ([`structure`]), and seeded random
//! ensembles ([`ensemble`]).

pub mod ensemble;
pub mod entropy;
pub mod error;
pub mod io;
pub mod linalg;
pub mod norm;
pub mod perron;
pub mod report;
pub mod structure;
pub mod tensor;
pub mod tropical;

pub use error::{Result, TenspecError};
