//! Exact linking numbers in Sol torus bundles and the boundary linking
//! q-expansions of special cycles on Hilbert modular surfaces.
//!
//! The crate is organised bottom-up:
//!
//! * [`qfield`]: exact arithmetic in real quadratic fields, unit groups and
//!   totally positive elements of fixed norm up to totally positive units.
//! * [`sol`]: torus bundles with hyperbolic gluing, the closed-form fiber
//!   linking pairing and an explicit rational cap chain used as an oracle.
//! * [`cycles`]: boundary circles of the special cycles and the exact
//!   boundary linking matrix.
//! * [`special_fn`]: the scalar Schwartz-type profiles and the `beta` kernel.
//! * [`qseries`]: q-expansions, the non-holomorphic boundary theta function
//!   and the capped-intersection combiner.
//! * [`oracle`] and [`selftest`]: independent brute-force/quadrature checks
//!   and a seeded runtime verification suite.

pub mod cycles;
pub mod error;
pub mod oracle;
pub mod qfield;
pub mod qseries;
pub mod rational;
pub mod selftest;
pub mod sol;
pub mod special_fn;

pub use error::{Error, Result};
pub use rational::Rational;
