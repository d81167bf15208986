//! Weak measurements with post-selection on a qubit coupled to a bosonic
//! Fock-space pointer.
//!
//! * [`hilbert`]: dense states, operators, matrix exponentials and a
//!   time-ordered propagator used as an oracle by the analytic engines.
//! * [`weak_value`]: first-order weak-measurement algebra (weak values,
//!   pointer weak values, conditional intensities, cancellation identities).
//! * [`exact`]: closed-form evolution under `g₀ a†a σx`.
//! * [`ion`]: pulse-level two-ion realization of the same measurement.
//! * [`estimation`]: seeded shot sampling and a linear estimator for `g`.
//! * [`runner`]: configuration parsing, experiment dispatch and table output.

pub mod error;
pub mod estimation;
pub mod exact;
pub mod hilbert;
pub mod ion;
pub mod runner;
pub mod weak_value;

pub use error::{ConfigError, Error, Result};
