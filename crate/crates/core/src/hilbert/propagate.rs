use super::{expm, norm_sqr, DenseOperator, JointState, C64, HERMITIAN_TOL};
use crate::{Error, Result};

fn check_generator(h: &DenseOperator, psi: &JointState) -> Result<()> {
    if h.dim() != psi.len() {
        return Err(Error::DimensionMismatch {
            expected: psi.len(),
            found: h.dim(),
        });
    }
    let deviation = h.hermiticity_error();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// `exp(-i H t) |psi⟩` for a time-independent hermitian `H`, via the dense
/// matrix exponential.
pub fn expm_propagate(h: &DenseOperator, t: f64, psi: &JointState) -> Result<JointState> {
    check_generator(h, psi)?;
    let u = expm(&h.scale(C64::new(0.0, -t)));
    let out = u.apply_unchecked(psi.amps());
    JointState::new(psi.dims().to_vec(), out)
}

/// `exp(A) v` by a sub-stepped Taylor series, without forming `exp(A)`.
pub fn expm_action(a: &DenseOperator, v: &[C64]) -> Result<Vec<C64>> {
    if v.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: v.len(),
        });
    }
    let substeps = a.one_norm().ceil().max(1.0) as usize;
    let inv = 1.0 / substeps as f64;
    let mut w = v.to_vec();
    for _ in 0..substeps {
        let mut term = w.clone();
        let mut acc = w.clone();
        for k in 1..=60 {
            term = a.apply_unchecked(&term);
            let factor = inv / k as f64;
            term.iter_mut().for_each(|z| *z *= factor);
            acc.iter_mut().zip(&term).for_each(|(s, t)| *s += t);
            if norm_sqr(&term) <= 1e-34 * norm_sqr(&acc) {
                break;
            }
        }
        w = acc;
    }
    Ok(w)
}

// Gauss-Legendre nodes and mixing weights of the two-exponential
// commutator-free fourth-order integrator.
const SQRT3_6: f64 = 0.288_675_134_594_812_9; // √3 / 6
const NODE_EARLY: f64 = 0.5 - SQRT3_6;
const NODE_LATE: f64 = 0.5 + SQRT3_6;
const WEIGHT_MAJOR: f64 = 0.25 + SQRT3_6;
const WEIGHT_MINOR: f64 = 0.25 - SQRT3_6;

/// Time-ordered evolution of `|psi⟩` under `H(t)` from `t0` to `t1` with
/// `steps` equal steps of a fourth-order commutator-free integrator.
///
/// Each step applies
/// `exp(-i h (w₋ H(t+c₋h) + w₊ H(t+c₊h))) · exp(-i h (w₊ H(t+c₋h) + w₋ H(t+c₊h)))`
/// with Gauss-Legendre nodes `c∓ = 1/2 ∓ √3/6` and weights `w± = 1/4 ± √3/6`.
/// Every sample of `H` must be hermitian.
pub fn timeordered_propagate<F>(
    h_of_t: F,
    t0: f64,
    t1: f64,
    psi: &JointState,
    steps: usize,
) -> Result<JointState>
where
    F: Fn(f64) -> DenseOperator,
{
    if t0.is_nan() || t1.is_nan() || t1 < t0 {
        return Err(Error::Precondition(format!(
            "time-ordered propagation needs t1 >= t0, got [{t0}, {t1}]"
        )));
    }
    if steps == 0 {
        return Err(Error::Precondition("steps must be at least 1".into()));
    }
    let h = (t1 - t0) / steps as f64;
    let mut amps = psi.amps().to_vec();
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        let early = h_of_t(t + NODE_EARLY * h);
        let late = h_of_t(t + NODE_LATE * h);
        check_generator(&early, psi)?;
        check_generator(&late, psi)?;
        let first = early
            .scale(C64::new(0.0, -h * WEIGHT_MAJOR))
            .add(&late.scale(C64::new(0.0, -h * WEIGHT_MINOR)))?;
        let second = early
            .scale(C64::new(0.0, -h * WEIGHT_MINOR))
            .add(&late.scale(C64::new(0.0, -h * WEIGHT_MAJOR)))?;
        amps = expm_action(&first, &amps)?;
        amps = expm_action(&second, &amps)?;
    }
    JointState::new(psi.dims().to_vec(), amps)
}
