//! Dense complex linear algebra on small truncated Hilbert spaces.
//!
//! Conventions used everywhere in the crate:
//!
//! * ħ = 1, so every Hamiltonian is an angular frequency and a propagator is
//!   `exp(-i H t)`.
//! * Qubit basis: `|g⟩` = index 0, `|e⟩` = index 1. Ion internal levels:
//!   `|↓⟩` = index 0, `|↑⟩` = index 1. A Fock index equals the occupation number.
//! * Composite states are stored row-major with the first subsystem varying
//!   slowest: for `dims = [d0, d1, d2]` the amplitude of `|i0, i1, i2⟩` lives
//!   at `(i0 * d1 + i1) * d2 + i2`.

mod operator;
mod propagate;
mod state;

pub use num_complex::Complex64 as C64;

pub use operator::{
    annihilation, creation, expm, identity, number, op_tensor, sigma_minus, sigma_plus, sigma_x,
    sigma_y, sigma_z, DenseOperator,
};
pub use propagate::{expm_action, expm_propagate, timeordered_propagate};
pub use state::{tensor_product, FockPointerState, JointState, QubitOutcome, QubitState};

/// Tolerance for the "normalized" flag of states.
pub const NORM_TOL: f64 = 1e-12;
/// Maximum entrywise `|M - M†|` accepted for an operator flagged hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Maximum entrywise `|U†U - 1|` accepted for an operator flagged unitary.
pub const UNITARY_TOL: f64 = 1e-10;
/// Population on the top Fock level above which truncation is reported.
pub const TRUNCATION_TOL: f64 = 1e-8;
/// Default Fock cutoff.
pub const DEFAULT_N_MAX: usize = 16;
/// Default cap on the total Hilbert-space dimension.
pub const DEFAULT_MAX_DIM: usize = 4096;
/// Environment variable overriding [`DEFAULT_MAX_DIM`].
pub const MAX_DIM_ENV: &str = "WEAKMEAS_MAX_DIM";

/// Current cap on the total dimension of any state or operator.
pub fn max_total_dim() -> usize {
    match std::env::var(MAX_DIM_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => n,
            _ => {
                log::warn!("ignoring {MAX_DIM_ENV}={v:?}: expected a positive integer");
                DEFAULT_MAX_DIM
            }
        },
        Err(_) => DEFAULT_MAX_DIM,
    }
}

pub(crate) fn check_capacity(requested: usize) -> crate::Result<()> {
    let max = max_total_dim();
    if requested > max {
        return Err(crate::Error::Capacity { requested, max });
    }
    Ok(())
}

pub(crate) fn all_finite(values: &[C64]) -> bool {
    values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `⟨a|b⟩` for raw amplitude slices of equal length.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}
