//! Closed-form evolution under `H = g₀ a†a σx`.
//!
//! `a†a` commutes with `H`, so every Fock level `n` evolves independently by
//! the qubit rotation `exp(-i g n σx)`:
//!
//! ```text
//! exp(-i g a†a σx) Σ c_n (α|g⟩ + β|e⟩)|n⟩ = Σ c_n (η_gn|g⟩ + η_en|e⟩)|n⟩
//! η_gn = α cos(gn) − iβ sin(gn),   η_en = β cos(gn) − iα sin(gn)
//! ```
//!
//! Joint states produced here have `dims = [2, n_max + 1]` (qubit slowest).

use serde::{Deserialize, Serialize};

use crate::hilbert::{
    inner, FockPointerState, JointState, QubitOutcome, QubitState, C64, TRUNCATION_TOL,
};
use crate::weak_value::{IntensityReport, Order, PointerOutcome};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaPair {
    pub eta_g: C64,
    pub eta_e: C64,
    pub n: usize,
    pub g: f64,
}

impl EtaPair {
    pub fn get(&self, outcome: QubitOutcome) -> C64 {
        match outcome {
            QubitOutcome::G => self.eta_g,
            QubitOutcome::E => self.eta_e,
        }
    }
}

pub fn eta_coefficients(s0: &QubitState, g: f64, n: usize) -> EtaPair {
    let phase = g * n as f64;
    let (sin, cos) = phase.sin_cos();
    let minus_i_sin = C64::new(0.0, -sin);
    EtaPair {
        eta_g: s0.alpha() * cos + s0.beta() * minus_i_sin,
        eta_e: s0.beta() * cos + s0.alpha() * minus_i_sin,
        n,
        g,
    }
}

/// `|η_gn|²` (or `|η_en|²`) from the expanded modulus
/// `|α|²cos²(gn) + |β|²sin²(gn) ± sin(2gn) Im(α*β)`.
pub fn eta_modulus_sq_closed_form(s0: &QubitState, g: f64, n: usize, outcome: QubitOutcome) -> f64 {
    let phase = g * n as f64;
    let (sin, cos) = phase.sin_cos();
    let (a2, b2) = (s0.alpha().norm_sqr(), s0.beta().norm_sqr());
    let cross = (2.0 * phase).sin() * s0.coherence().im;
    match outcome {
        QubitOutcome::G => a2 * cos * cos + b2 * sin * sin + cross,
        QubitOutcome::E => b2 * cos * cos + a2 * sin * sin - cross,
    }
}

/// `|ψ_f⟩ = exp(-i g a†a σx) |S₀⟩|φ₀⟩` by per-level rotation.
pub fn evolve_exact(s0: &QubitState, phi0: &FockPointerState, g: f64) -> Result<JointState> {
    let levels = phi0.dim();
    let mut amps = vec![C64::new(0.0, 0.0); 2 * levels];
    for (n, &c_n) in phi0.amps().iter().enumerate() {
        let eta = eta_coefficients(s0, g, n);
        amps[n] = c_n * eta.eta_g;
        amps[levels + n] = c_n * eta.eta_e;
    }
    let top = phi0.amps()[levels - 1].norm_sqr();
    if top > TRUNCATION_TOL {
        log::warn!(
            "Fock level n_max = {} carries population {top:e}",
            levels - 1
        );
    }
    JointState::new(vec![2, levels], amps)
}

fn pointer_levels(psi: &JointState) -> Result<usize> {
    match psi.dims() {
        [2, levels] => Ok(*levels),
        other => Err(Error::Precondition(format!(
            "expected a qubit-pointer state with dims [2, n_max + 1], got {other:?}"
        ))),
    }
}

/// Unconditional Fock probability `I_m = Σ_q |⟨q, m|ψ⟩|²`.
pub fn fock_probability(psi: &JointState, m: usize) -> Result<f64> {
    let levels = pointer_levels(psi)?;
    if m >= levels {
        return Err(Error::IndexOutOfRange {
            index: m,
            len: levels,
        });
    }
    psi.level_population(1, m)
}

/// Joint probability `|⟨q, m|ψ⟩|²` of pointer outcome `m` and qubit outcome `q`
/// (equal to `I_m |η_qm|²` for a state from [`evolve_exact`]).
pub fn conditional_probability(psi: &JointState, m: usize, outcome: QubitOutcome) -> Result<f64> {
    let levels = pointer_levels(psi)?;
    if m >= levels {
        return Err(Error::IndexOutOfRange {
            index: m,
            len: levels,
        });
    }
    Ok(psi.amp(&[outcome.index(), m])?.norm_sqr())
}

/// Probability of qubit outcome `q` within the pointer sub-ensemble `m`,
/// i.e. `|η_qm|²`.
pub fn conditional_probability_renormalized(
    psi: &JointState,
    m: usize,
    outcome: QubitOutcome,
) -> Result<f64> {
    let i_m = fock_probability(psi, m)?;
    if i_m == 0.0 {
        return Err(Error::EmptyConditioning);
    }
    Ok(conditional_probability(psi, m, outcome)? / i_m)
}

/// Unconditional probability `‖⟨x|ψ⟩‖²` of a general pointer outcome.
pub fn projected_probability(psi: &JointState, outcome: &PointerOutcome) -> Result<f64> {
    let levels = pointer_levels(psi)?;
    let bra = outcome.vector(levels)?;
    Ok(psi.contract(1, &bra)?.norm().powi(2))
}

/// Joint probability `|⟨q|⟨x|ψ⟩|²` of a general pointer outcome and qubit
/// outcome `q`.
pub fn projected_conditional_probability(
    psi: &JointState,
    outcome: &PointerOutcome,
    qubit: QubitOutcome,
) -> Result<f64> {
    let levels = pointer_levels(psi)?;
    let bra = outcome.vector(levels)?;
    Ok(psi.contract(1, &bra)?.amps()[qubit.index()].norm_sqr())
}

/// Exact counterpart of [`crate::weak_value::intensity_first_order`] for
/// `A = σx`.
pub fn exact_intensity(
    s0: &QubitState,
    phi0: &FockPointerState,
    g: f64,
    outcome: &PointerOutcome,
) -> Result<IntensityReport> {
    let psi = evolve_exact(s0, phi0, g)?;
    let bra = outcome.vector(phi0.dim())?;
    let i0 = inner(&bra, phi0.amps()).norm_sqr();
    let reduced = psi.contract(1, &bra)?;
    let i_s = reduced.amps()[0].norm_sqr();
    let i_comp = reduced.amps()[1].norm_sqr();
    Ok(IntensityReport {
        i0,
        i_s,
        i_comp,
        i_g: i_s - i0 * s0.alpha().norm_sqr(),
        total: i_s + i_comp,
        order: Order::Exact,
    })
}

/// Joint measurement outcome: pointer Fock level and qubit level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct JointOutcome {
    pub fock: usize,
    pub qubit: QubitOutcome,
}

impl std::fmt::Display for JointOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "m={},{}", self.fock, self.qubit)
    }
}

/// Every `(m, q)` outcome of a qubit-pointer state with its probability,
/// ordered by `m` then `q`.
pub fn joint_outcome_probabilities(psi: &JointState) -> Result<Vec<(JointOutcome, f64)>> {
    let levels = pointer_levels(psi)?;
    let mut out = Vec::with_capacity(2 * levels);
    for fock in 0..levels {
        for qubit in QubitOutcome::ALL {
            out.push((
                JointOutcome { fock, qubit },
                psi.amps()[qubit.index() * levels + fock].norm_sqr(),
            ));
        }
    }
    Ok(out)
}
