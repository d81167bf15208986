//! Seeded shot sampling and a first-order estimator for the coupling `g`.
//!
//! Counts are drawn as a multinomial by sequential conditional binomials
//! (`rand_distr` 0.5.1 `Binomial`) from a `ChaCha8Rng` (`rand_chacha` 0.9.0)
//! seeded with [`SeedableRng::seed_from_u64`]. Both crates are pinned to exact
//! versions, so a `(probabilities, shots, seed)` triple always yields the
//! same counts.

use std::collections::BTreeMap;
use std::fmt::Display;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::exact::{joint_outcome_probabilities, JointOutcome};
use crate::hilbert::{JointState, QubitOutcome, QubitState};
use crate::{Error, Result};

/// Probabilities more negative than this are rejected.
pub const NEGATIVE_PROB_TOL: f64 = 1e-9;
/// Distributions whose total differs from 1 by more than this are renormalized.
pub const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotRecord<L: Ord> {
    pub counts: BTreeMap<L, u64>,
    pub total: u64,
    pub seed: u64,
}

impl<L: Ord> ShotRecord<L> {
    pub fn count(&self, label: &L) -> u64 {
        self.counts.get(label).copied().unwrap_or(0)
    }
}

impl ShotRecord<JointOutcome> {
    /// Shots whose pointer outcome was `m`, any qubit outcome.
    pub fn pointer_count(&self, m: usize) -> u64 {
        QubitOutcome::ALL
            .iter()
            .map(|&qubit| self.count(&JointOutcome { fock: m, qubit }))
            .sum()
    }
}

/// Independent stream seed for task `index` of a run seeded with `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.next_u64()
}

/// Draws `n` shots from `probs`. Repeated labels are merged.
pub fn sample_shots<L>(probs: &[(L, f64)], n: u64, seed: u64) -> Result<ShotRecord<L>>
where
    L: Ord + Clone + Display,
{
    let mut weights = Vec::with_capacity(probs.len());
    for (label, p) in probs {
        if !p.is_finite() || *p < -NEGATIVE_PROB_TOL {
            return Err(Error::InvalidProbability {
                label: label.to_string(),
                value: *p,
            });
        }
        weights.push(p.max(0.0));
    }
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        return Err(Error::InvalidProbability {
            label: "<total>".into(),
            value: sum,
        });
    }
    if (sum - 1.0).abs() > SUM_TOL {
        log::warn!("outcome probabilities sum to {sum}; renormalizing");
    }
    weights.iter_mut().for_each(|w| *w /= sum);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let last_live = weights
        .iter()
        .rposition(|&w| w > 0.0)
        .expect("positive total");
    let mut counts = BTreeMap::new();
    let mut remaining_shots = n;
    let mut remaining_mass = 1.0;
    for (k, ((label, _), &w)) in probs.iter().zip(&weights).enumerate() {
        let drawn = if w == 0.0 || remaining_shots == 0 {
            0
        } else if k == last_live {
            remaining_shots
        } else {
            let q = (w / remaining_mass).clamp(0.0, 1.0);
            if q >= 1.0 {
                remaining_shots
            } else {
                Binomial::new(remaining_shots, q)
                    .expect("q in [0, 1)")
                    .sample(&mut rng)
            }
        };
        remaining_shots -= drawn;
        remaining_mass -= w;
        *counts.entry(label.clone()).or_insert(0) += drawn;
    }
    Ok(ShotRecord {
        counts,
        total: n,
        seed,
    })
}

/// Samples `(m, q)` outcomes of a qubit-pointer state.
pub fn sample_joint_outcomes(
    psi: &JointState,
    n: u64,
    seed: u64,
) -> Result<ShotRecord<JointOutcome>> {
    sample_shots(&joint_outcome_probabilities(psi)?, n, seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GEstimate {
    pub g_hat: f64,
    pub std_error: f64,
    /// Shots in the conditioning event.
    pub n_used: u64,
}

impl GEstimate {
    /// Whether `value` lies within `k` standard errors of the estimate.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.g_hat - value).abs() <= k * self.std_error
    }
}

fn sensitivity(s0: &QubitState, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::NoSignal);
    }
    let coherence = s0.coherence().im;
    if coherence == 0.0 {
        return Err(Error::Unidentifiable);
    }
    Ok(2.0 * m as f64 * coherence)
}

/// Inverts `P(g | m) ≈ |α|² + 2gm Im(α*β)` using the shots whose pointer
/// outcome was `m`.
pub fn estimate_g(
    record: &ShotRecord<JointOutcome>,
    s0: &QubitState,
    m: usize,
) -> Result<GEstimate> {
    let slope = sensitivity(s0, m)?;
    let n_used = record.pointer_count(m);
    if n_used == 0 {
        return Err(Error::EmptyConditioning);
    }
    let hits = record.count(&JointOutcome {
        fock: m,
        qubit: QubitOutcome::G,
    });
    let p_hat = hits as f64 / n_used as f64;
    Ok(GEstimate {
        g_hat: (p_hat - s0.alpha().norm_sqr()) / slope,
        std_error: (p_hat * (1.0 - p_hat) / n_used as f64).sqrt() / slope.abs(),
        n_used,
    })
}

/// The same linear inversion applied to the total ensemble, ignoring the
/// qubit outcome: `ĝ = (p̂_m − I_m) / (2m Im(α*β) I_m)` with `p̂_m` the
/// pointer-`m` fraction of all shots and `I_m = |c_m|²` its value at `g = 0`.
///
/// Under the reality condition the pointer marginal has no first-order
/// dependence on `g`, so this estimate stays centred on zero.
pub fn estimate_g_unconditional(
    record: &ShotRecord<JointOutcome>,
    s0: &QubitState,
    i_m: f64,
    m: usize,
) -> Result<GEstimate> {
    let slope = sensitivity(s0, m)? * i_m;
    if slope == 0.0 {
        return Err(Error::NoSignal);
    }
    if record.total == 0 {
        return Err(Error::EmptyConditioning);
    }
    let p_hat = record.pointer_count(m) as f64 / record.total as f64;
    Ok(GEstimate {
        g_hat: (p_hat - i_m) / slope,
        std_error: (p_hat * (1.0 - p_hat) / record.total as f64).sqrt() / slope.abs(),
        n_used: record.total,
    })
}
