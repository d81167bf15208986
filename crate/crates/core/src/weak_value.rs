//! First-order weak-measurement algebra.
//!
//! A qubit prepared in `|S₀⟩ = α|g⟩ + β|e⟩` is coupled to a pointer `|φ₀⟩`
//! by `exp(-i g A P)`. To first order in `g` the probability of finding the
//! pointer in `|x⟩` is
//!
//! ```text
//! I   = I₀ [1 + 2g Im(P_w ⟨S₀|A|S₀⟩)],        P_w = ⟨x|P|φ₀⟩ / ⟨x|φ₀⟩
//! ```
//!
//! and, after post-selecting the qubit on `|S_f⟩`,
//!
//! ```text
//! I_s = I₀ [|⟨S_f|S₀⟩|² + 2g Im(P_w ⟨S₀|S_f⟩⟨S_f|A|S₀⟩)]
//!     = I₀ |⟨S_f|S₀⟩|² [1 + 2g Im(P_w A_w)].
//! ```
//!
//! With `A = σx` and a real `P_w` the unconditional shift vanishes while the
//! two post-selected branches move by `±2g P_w Im(α*β) I₀`.
//!
//! The pointer is the Fock mode with `P = a†a`. A pointer outcome is either a
//! number state `|m⟩` (then `P_w = m`) or an arbitrary normalized vector `|x⟩`
//! of the truncated ladder.

use serde::{Deserialize, Serialize};

use crate::hilbert::{
    inner, number, DenseOperator, FockPointerState, QubitOutcome, QubitState, C64,
};
use crate::{Error, Result};

/// Overlaps below this magnitude make a weak value undefined.
pub const ORTHOGONALITY_TOL: f64 = 1e-14;
/// Tolerance of the reality condition `Im(P_w ⟨A⟩) = 0`.
pub const REALITY_TOL: f64 = 1e-12;
/// First-order validity is flagged once `g · n_max` exceeds this.
pub const FIRST_ORDER_WARN: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValueResult {
    /// `⟨S_f|A|S₀⟩ / ⟨S_f|S₀⟩`.
    pub value: C64,
    /// `⟨S_f|S₀⟩`.
    pub overlap: C64,
    /// `|⟨S_f|S₀⟩|²`, the post-selection success probability.
    pub overlap_prob: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointerWeakValue {
    pub value: C64,
    pub basis_index: usize,
}

/// Coupling strength `g = g₀ t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSpec {
    pub g0: f64,
    pub t: f64,
    pub g: f64,
}

impl CouplingSpec {
    pub fn from_g(g: f64) -> Result<Self> {
        Self::validate(g)?;
        Ok(Self { g0: g, t: 1.0, g })
    }

    pub fn from_rate(g0: f64, t: f64) -> Result<Self> {
        if !(g0.is_finite() && t.is_finite()) || t < 0.0 {
            return Err(Error::Precondition(format!(
                "coupling rate and duration must be finite with t >= 0, got g0 = {g0}, t = {t}"
            )));
        }
        let g = g0 * t;
        Self::validate(g)?;
        Ok(Self { g0, t, g })
    }

    fn validate(g: f64) -> Result<()> {
        if !g.is_finite() || g < 0.0 {
            return Err(Error::Precondition(format!(
                "coupling g must be finite and nonnegative, got {g}"
            )));
        }
        Ok(())
    }
}

/// Whether a report holds first-order predictions or exact probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    FirstOrder,
    Exact,
}

/// Pointer probabilities for one pointer outcome, unconditional and split by
/// the qubit post-selection `{|g⟩, |e⟩}`.
///
/// First-order values are reported raw and may leave `[0, 1]` slightly when
/// the expansion breaks down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntensityReport {
    /// Baseline `I₀ = |⟨x|φ₀⟩|²` (for a Fock outcome, `I_m = |c_m|²`).
    pub i0: f64,
    /// Joint probability of the pointer outcome and qubit outcome `|g⟩`.
    pub i_s: f64,
    /// Joint probability of the pointer outcome and qubit outcome `|e⟩`.
    pub i_comp: f64,
    /// Coupling-induced shift of `i_s`: `i_s - I₀ |⟨g|S₀⟩|²`.
    pub i_g: f64,
    /// Unconditional probability of the pointer outcome, `i_s + i_comp`.
    pub total: f64,
    pub order: Order,
}

impl IntensityReport {
    pub fn conditional(&self, outcome: QubitOutcome) -> f64 {
        match outcome {
            QubitOutcome::G => self.i_s,
            QubitOutcome::E => self.i_comp,
        }
    }
}

/// Pointer measurement outcome: a number state or a general pointer vector.
#[derive(Debug, Clone, PartialEq)]
pub enum PointerOutcome {
    Fock(usize),
    Projector(FockPointerState),
}

impl PointerOutcome {
    fn bra(&self, dim: usize) -> Result<Vec<C64>> {
        match self {
            PointerOutcome::Fock(m) => {
                if *m >= dim {
                    return Err(Error::IndexOutOfRange {
                        index: *m,
                        len: dim,
                    });
                }
                let mut v = vec![C64::new(0.0, 0.0); dim];
                v[*m] = C64::new(1.0, 0.0);
                Ok(v)
            }
            PointerOutcome::Projector(x) => {
                if x.dim() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: x.dim(),
                    });
                }
                Ok(x.amps().to_vec())
            }
        }
    }

    /// The pointer vector `|x⟩` on a ladder of dimension `dim`.
    pub fn vector(&self, dim: usize) -> Result<Vec<C64>> {
        self.bra(dim)
    }
}

fn expect_qubit_operator(a: &DenseOperator) -> Result<()> {
    if a.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: a.dim(),
        });
    }
    Ok(())
}

/// `⟨s|A|s⟩` for a qubit operator.
pub fn expectation(a: &DenseOperator, s: &QubitState) -> Result<C64> {
    expect_qubit_operator(a)?;
    a.sandwich(&s.amplitudes(), &s.amplitudes())
}

/// Weak value `A_w = ⟨S_f|A|S₀⟩ / ⟨S_f|S₀⟩`.
pub fn weak_value(a: &DenseOperator, s0: &QubitState, sf: &QubitState) -> Result<WeakValueResult> {
    expect_qubit_operator(a)?;
    let overlap = sf.inner(s0);
    if overlap.norm() < ORTHOGONALITY_TOL {
        return Err(Error::OrthogonalPostSelection {
            overlap: overlap.norm(),
        });
    }
    let numerator = a.sandwich(&sf.amplitudes(), &s0.amplitudes())?;
    Ok(WeakValueResult {
        value: numerator / overlap,
        overlap,
        overlap_prob: overlap.norm_sqr(),
    })
}

/// Pointer weak value of `a†a` for the number-state outcome `|m⟩`.
///
/// `a†a` is diagonal, so `⟨m|a†a|φ₀⟩ / ⟨m|φ₀⟩ = m` whenever `c_m ≠ 0`.
pub fn pointer_weak_value(phi0: &FockPointerState, m: usize) -> Result<PointerWeakValue> {
    let c_m = phi0.amp(m)?;
    if c_m.norm() < ORTHOGONALITY_TOL {
        return Err(Error::UndefinedPointerWeakValue { m });
    }
    Ok(PointerWeakValue {
        value: C64::new(m as f64, 0.0),
        basis_index: m,
    })
}

/// Pointer weak value `⟨x|a†a|φ₀⟩ / ⟨x|φ₀⟩` for a general pointer outcome.
///
/// For [`PointerOutcome::Fock`] this defers to [`pointer_weak_value`];
/// `basis_index` of a general projector is the index of its largest
/// component.
pub fn pointer_weak_value_for(
    phi0: &FockPointerState,
    outcome: &PointerOutcome,
) -> Result<PointerWeakValue> {
    match outcome {
        PointerOutcome::Fock(m) => pointer_weak_value(phi0, *m),
        PointerOutcome::Projector(x) => {
            let bra = outcome.bra(phi0.dim())?;
            let overlap = inner(&bra, phi0.amps());
            if overlap.norm() < ORTHOGONALITY_TOL {
                return Err(Error::OrthogonalPostSelection {
                    overlap: overlap.norm(),
                });
            }
            let numerator = number(phi0.n_max()).sandwich(&bra, phi0.amps())?;
            let basis_index = x
                .amps()
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm_sqr().total_cmp(&b.1.norm_sqr()))
                .map(|(k, _)| k)
                .unwrap_or(0);
            Ok(PointerWeakValue {
                value: numerator / overlap,
                basis_index,
            })
        }
    }
}

/// Warns when `g · n_top` is large, `n_top` being the highest populated level.
fn warn_if_beyond_first_order(g: f64, phi0: &FockPointerState) {
    let n_top = phi0
        .amps()
        .iter()
        .rposition(|c| c.norm_sqr() > 0.0)
        .unwrap_or(0);
    if g * n_top as f64 > FIRST_ORDER_WARN {
        log::warn!(
            "g * n = {:.3} at pointer level n = {n_top} exceeds {FIRST_ORDER_WARN}; first-order intensities are unreliable",
            g * n_top as f64
        );
    }
}

/// First-order pointer intensities for the coupling `exp(-i g A a†a)`.
///
/// The unconditional intensity is `I₀[1 + 2g Im(P_w ⟨S₀|A|S₀⟩)]`; the
/// conditional ones post-select the qubit on `|g⟩` and `|e⟩`.
pub fn intensity_first_order(
    s0: &QubitState,
    phi0: &FockPointerState,
    a: &DenseOperator,
    g: f64,
    outcome: &PointerOutcome,
) -> Result<IntensityReport> {
    expect_qubit_operator(a)?;
    warn_if_beyond_first_order(g, phi0);
    let bra = outcome.bra(phi0.dim())?;
    let i0 = inner(&bra, phi0.amps()).norm_sqr();
    let p_w = pointer_weak_value_for(phi0, outcome)?.value;

    let a_s0 = a.apply(&s0.amplitudes())?;
    let branch = |sf: QubitState| {
        let overlap = sf.inner(s0);
        let transition = inner(&sf.amplitudes(), &a_s0);
        i0 * (overlap.norm_sqr() + 2.0 * g * (p_w * overlap.conj() * transition).im)
    };
    let i_s = branch(QubitState::ground());
    let i_comp = branch(QubitState::excited());
    let mean = expectation(a, s0)?;
    Ok(IntensityReport {
        i0,
        i_s,
        i_comp,
        i_g: i_s - i0 * s0.alpha().norm_sqr(),
        total: i0 * (1.0 + 2.0 * g * (p_w * mean).im),
        order: Order::FirstOrder,
    })
}

/// First-order post-selected intensities for `A = σx`, a Fock outcome `m`
/// and the post-selection basis `{|g⟩, |e⟩}`:
///
/// `I_s = |c_m|² [|α|² + 2gm Im(α*β)]`, `I^s = |c_m|² [|β|² − 2gm Im(α*β)]`.
pub fn postselected_intensity_first_order(
    s0: &QubitState,
    c_m: C64,
    g: f64,
    m: usize,
) -> IntensityReport {
    let i0 = c_m.norm_sqr();
    let shift = 2.0 * g * m as f64 * s0.coherence().im;
    let i_g = shift * i0;
    let i_s = i0 * (s0.alpha().norm_sqr() + shift);
    let i_comp = i0 * (s0.beta().norm_sqr() - shift);
    IntensityReport {
        i0,
        i_s,
        i_comp,
        i_g,
        total: i0,
        order: Order::FirstOrder,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealityCheck {
    /// `true` when the first-order shift of the unconditional intensity
    /// vanishes.
    pub holds: bool,
    /// `|Im(P_w ⟨S₀|A|S₀⟩)|`.
    pub residual: f64,
}

/// Tests the reality condition `Im(P_w ⟨S₀|A|S₀⟩) = 0`.
pub fn reality_condition_check(
    a: &DenseOperator,
    s0: &QubitState,
    p_w: C64,
) -> Result<RealityCheck> {
    let residual = (p_w * expectation(a, s0)?).im.abs();
    Ok(RealityCheck {
        holds: residual <= REALITY_TOL,
        residual,
    })
}
