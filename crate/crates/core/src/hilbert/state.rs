use serde::{Deserialize, Serialize};

use super::{all_finite, check_capacity, inner, norm_sqr, DenseOperator, C64, NORM_TOL};
use crate::{Error, Result};

/// Outcome of a projective qubit measurement in the `{|g⟩, |e⟩}` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QubitOutcome {
    G,
    E,
}

impl QubitOutcome {
    pub const ALL: [QubitOutcome; 2] = [QubitOutcome::G, QubitOutcome::E];

    pub fn index(self) -> usize {
        match self {
            QubitOutcome::G => 0,
            QubitOutcome::E => 1,
        }
    }

    pub fn complement(self) -> Self {
        match self {
            QubitOutcome::G => QubitOutcome::E,
            QubitOutcome::E => QubitOutcome::G,
        }
    }
}

impl std::fmt::Display for QubitOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            QubitOutcome::G => "g",
            QubitOutcome::E => "e",
        })
    }
}

/// Normalized qubit state `α|g⟩ + β|e⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    alpha: C64,
    beta: C64,
}

impl QubitState {
    /// Builds the state, rejecting amplitudes whose squared norm is not 1
    /// within [`NORM_TOL`].
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        if !all_finite(&[alpha, beta]) {
            return Err(Error::NonFinite);
        }
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { alpha, beta })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalize(alpha: C64, beta: C64) -> Result<Self> {
        if !all_finite(&[alpha, beta]) {
            return Err(Error::NonFinite);
        }
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            alpha: alpha / norm,
            beta: beta / norm,
        })
    }

    pub fn ground() -> Self {
        Self {
            alpha: C64::new(1.0, 0.0),
            beta: C64::new(0.0, 0.0),
        }
    }

    pub fn excited() -> Self {
        Self {
            alpha: C64::new(0.0, 0.0),
            beta: C64::new(1.0, 0.0),
        }
    }

    pub fn basis(outcome: QubitOutcome) -> Self {
        match outcome {
            QubitOutcome::G => Self::ground(),
            QubitOutcome::E => Self::excited(),
        }
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn amplitudes(&self) -> [C64; 2] {
        [self.alpha, self.beta]
    }

    /// `α* β`, the cross term that carries every first-order signal.
    pub fn coherence(&self) -> C64 {
        self.alpha.conj() * self.beta
    }

    /// The orthogonal partner `-β*|g⟩ + α*|e⟩`.
    pub fn orthogonal(&self) -> Self {
        Self {
            alpha: -self.beta.conj(),
            beta: self.alpha.conj(),
        }
    }

    pub fn inner(&self, other: &QubitState) -> C64 {
        self.alpha.conj() * other.alpha + self.beta.conj() * other.beta
    }

    pub fn with_phase(&self, phase: C64) -> Self {
        Self {
            alpha: self.alpha * phase,
            beta: self.beta * phase,
        }
    }

    pub fn to_joint(&self) -> JointState {
        JointState::from_parts(vec![2], vec![self.alpha, self.beta])
    }
}

/// Pointer state `Σ c_n |n⟩` on the Fock ladder `0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockPointerState {
    amps: Vec<C64>,
}

impl FockPointerState {
    /// Amplitudes `c_0..=c_{n_max}`; must be normalized within [`NORM_TOL`].
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        Self::validate_shape(&amps)?;
        let norm = norm_sqr(&amps).sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amps })
    }

    pub fn normalize(mut amps: Vec<C64>) -> Result<Self> {
        Self::validate_shape(&amps)?;
        let norm = norm_sqr(&amps).sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        amps.iter_mut().for_each(|c| *c /= norm);
        Ok(Self { amps })
    }

    /// Builds a state from `(n, c_n)` pairs on a ladder of cutoff `n_max`.
    /// Repeated indices are summed. The result must already be normalized.
    pub fn from_sparse(n_max: usize, entries: &[(usize, C64)]) -> Result<Self> {
        let len = n_max + 1;
        let mut amps = vec![C64::new(0.0, 0.0); len];
        for &(n, c) in entries {
            if n > n_max {
                return Err(Error::IndexOutOfRange { index: n, len });
            }
            amps[n] += c;
        }
        Self::new(amps)
    }

    /// Number state `|n⟩`.
    pub fn fock(n_max: usize, n: usize) -> Result<Self> {
        Self::from_sparse(n_max, &[(n, C64::new(1.0, 0.0))])
    }

    fn validate_shape(amps: &[C64]) -> Result<()> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        check_capacity(amps.len())?;
        if !all_finite(amps) {
            return Err(Error::NonFinite);
        }
        Ok(())
    }

    pub fn n_max(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, n: usize) -> Result<C64> {
        self.amps.get(n).copied().ok_or(Error::IndexOutOfRange {
            index: n,
            len: self.amps.len(),
        })
    }

    /// `|c_n|²`, the unconditional Fock probability `I_n` before any coupling.
    pub fn population(&self, n: usize) -> Result<f64> {
        self.amp(n).map(|c| c.norm_sqr())
    }

    /// Copy of this state on a larger ladder, padded with zeros.
    pub fn extended(&self, n_max: usize) -> Result<Self> {
        if n_max < self.n_max() {
            return Err(Error::Precondition(format!(
                "cannot shrink Fock ladder from n_max = {} to {}",
                self.n_max(),
                n_max
            )));
        }
        let mut amps = self.amps.clone();
        amps.resize(n_max + 1, C64::new(0.0, 0.0));
        Self::new(amps)
    }

    pub fn with_phase(&self, phase: C64) -> Self {
        Self {
            amps: self.amps.iter().map(|c| c * phase).collect(),
        }
    }

    pub fn to_joint(&self) -> JointState {
        JointState::from_parts(vec![self.amps.len()], self.amps.clone())
    }
}

/// Dense amplitude vector over a product of subsystems (first subsystem slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    dims: Vec<usize>,
    amps: Vec<C64>,
    normalized: bool,
}

impl JointState {
    pub fn new(dims: Vec<usize>, amps: Vec<C64>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Precondition(format!(
                "invalid subsystem dimensions {dims:?}"
            )));
        }
        let total = checked_product(&dims)?;
        check_capacity(total)?;
        if amps.len() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: amps.len(),
            });
        }
        if !all_finite(&amps) {
            return Err(Error::NonFinite);
        }
        Ok(Self::from_parts(dims, amps))
    }

    /// Basis state `|indices⟩`.
    pub fn basis(dims: Vec<usize>, indices: &[usize]) -> Result<Self> {
        let total = checked_product(&dims)?;
        let mut amps = vec![C64::new(0.0, 0.0); total];
        let probe = Self::from_parts(dims, Vec::new());
        let idx = probe.index(indices)?;
        amps[idx] = C64::new(1.0, 0.0);
        Self::new(probe.dims, amps)
    }

    pub(crate) fn from_parts(dims: Vec<usize>, amps: Vec<C64>) -> Self {
        let normalized = (norm_sqr(&amps).sqrt() - 1.0).abs() <= NORM_TOL;
        Self {
            dims,
            amps,
            normalized,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<C64> {
        self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.amps).sqrt()
    }

    /// Flat index of `|indices⟩`.
    pub fn index(&self, indices: &[usize]) -> Result<usize> {
        if indices.len() != self.dims.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.len(),
                found: indices.len(),
            });
        }
        let mut flat = 0;
        for (&i, &d) in indices.iter().zip(&self.dims) {
            if i >= d {
                return Err(Error::IndexOutOfRange { index: i, len: d });
            }
            flat = flat * d + i;
        }
        Ok(flat)
    }

    pub fn amp(&self, indices: &[usize]) -> Result<C64> {
        Ok(self.amps[self.index(indices)?])
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &JointState) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(inner(&self.amps, &other.amps))
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &JointState) -> Result<f64> {
        self.inner(other).map(|z| z.norm_sqr())
    }

    pub fn max_abs_diff(&self, other: &JointState) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn with_phase(&self, phase: C64) -> Self {
        Self::from_parts(
            self.dims.clone(),
            self.amps.iter().map(|a| a * phase).collect(),
        )
    }

    fn check_axis(&self, axis: usize) -> Result<(usize, usize, usize)> {
        if axis >= self.dims.len() {
            return Err(Error::IndexOutOfRange {
                index: axis,
                len: self.dims.len(),
            });
        }
        let outer: usize = self.dims[..axis].iter().product();
        let inner: usize = self.dims[axis + 1..].iter().product();
        Ok((outer, self.dims[axis], inner))
    }

    /// Applies a local operator to subsystem `axis`, identity elsewhere.
    pub fn apply_local(&self, axis: usize, op: &DenseOperator) -> Result<JointState> {
        let (outer, d, inner_len) = self.check_axis(axis)?;
        if op.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: op.dim(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        let mut column = vec![C64::new(0.0, 0.0); d];
        for o in 0..outer {
            for i in 0..inner_len {
                for (k, c) in column.iter_mut().enumerate() {
                    *c = self.amps[(o * d + k) * inner_len + i];
                }
                for r in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for (k, c) in column.iter().enumerate() {
                        acc += op.get(r, k) * c;
                    }
                    out[(o * d + r) * inner_len + i] = acc;
                }
            }
        }
        Ok(Self::from_parts(self.dims.clone(), out))
    }

    /// Contracts subsystem `axis` with the bra `⟨bra|`, returning the
    /// (unnormalized) state on the remaining subsystems.
    pub fn contract(&self, axis: usize, bra: &[C64]) -> Result<JointState> {
        let (outer, d, inner_len) = self.check_axis(axis)?;
        if self.dims.len() < 2 {
            return Err(Error::Precondition(
                "cannot contract the only subsystem of a state".into(),
            ));
        }
        if bra.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bra.len(),
            });
        }
        let mut out = vec![C64::new(0.0, 0.0); outer * inner_len];
        for o in 0..outer {
            for i in 0..inner_len {
                out[o * inner_len + i] = (0..d)
                    .map(|k| bra[k].conj() * self.amps[(o * d + k) * inner_len + i])
                    .sum();
            }
        }
        let mut dims = self.dims.clone();
        dims.remove(axis);
        Ok(Self::from_parts(dims, out))
    }

    /// Probability that subsystem `axis` is found in basis level `level`.
    pub fn level_population(&self, axis: usize, level: usize) -> Result<f64> {
        let (outer, d, inner_len) = self.check_axis(axis)?;
        if level >= d {
            return Err(Error::IndexOutOfRange {
                index: level,
                len: d,
            });
        }
        Ok((0..outer)
            .flat_map(|o| (0..inner_len).map(move |i| (o * d + level) * inner_len + i))
            .map(|idx| self.amps[idx].norm_sqr())
            .sum())
    }

    /// Probability of the joint event "subsystem `axes[k]` is in `levels[k]`".
    pub fn joint_population(&self, constraints: &[(usize, usize)]) -> Result<f64> {
        for &(axis, level) in constraints {
            let (_, d, _) = self.check_axis(axis)?;
            if level >= d {
                return Err(Error::IndexOutOfRange {
                    index: level,
                    len: d,
                });
            }
        }
        let mut indices = vec![0usize; self.dims.len()];
        let mut total = 0.0;
        for (flat, a) in self.amps.iter().enumerate() {
            let mut rem = flat;
            for k in (0..self.dims.len()).rev() {
                indices[k] = rem % self.dims[k];
                rem /= self.dims[k];
            }
            if constraints
                .iter()
                .all(|&(axis, level)| indices[axis] == level)
            {
                total += a.norm_sqr();
            }
        }
        Ok(total)
    }
}

fn checked_product(dims: &[usize]) -> Result<usize> {
    dims.iter().try_fold(1usize, |acc, &d| {
        acc.checked_mul(d).ok_or(Error::Capacity {
            requested: usize::MAX,
            max: super::max_total_dim(),
        })
    })
}

/// Kronecker product `a ⊗ b` in the crate-wide layout (`a` slowest).
pub fn tensor_product(a: &JointState, b: &JointState) -> Result<JointState> {
    if a.is_normalized() != b.is_normalized() {
        return Err(Error::Precondition(
            "tensor_product operands must both be normalized or both unnormalized".into(),
        ));
    }
    let total = a.len().checked_mul(b.len()).ok_or(Error::Capacity {
        requested: usize::MAX,
        max: super::max_total_dim(),
    })?;
    check_capacity(total)?;
    let amps = a
        .amps
        .iter()
        .flat_map(|x| b.amps.iter().map(move |y| x * y))
        .collect();
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    Ok(JointState::from_parts(dims, amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn qubit_rejects_unnormalized() {
        assert!(matches!(
            QubitState::new(c(1.0, 0.0), c(1.0, 0.0)),
            Err(Error::NotNormalized { .. })
        ));
        assert!(QubitState::new(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)).is_ok());
        assert!(matches!(
            QubitState::new(c(f64::NAN, 0.0), c(1.0, 0.0)),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn orthogonal_partner() {
        let s = QubitState::normalize(c(0.3, 0.1), c(-0.2, 0.7)).unwrap();
        assert!(s.inner(&s.orthogonal()).norm() < 1e-15);
    }

    #[test]
    fn basis_times_basis() {
        let j = tensor_product(
            &QubitState::ground().to_joint(),
            &FockPointerState::fock(3, 0).unwrap().to_joint(),
        )
        .unwrap();
        assert_eq!(j.dims(), &[2, 4]);
        assert_eq!(j.amps()[0], c(1.0, 0.0));
        assert!(j.amps()[1..].iter().all(|a| *a == c(0.0, 0.0)));
    }

    #[test]
    fn qubit_major_layout() {
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let (c0, c1) = (c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2));
        let q = QubitState::new(a, b).unwrap();
        let p = FockPointerState::new(vec![c0, c1]).unwrap();
        let j = tensor_product(&q.to_joint(), &p.to_joint()).unwrap();
        assert_eq!(j.amps(), &[a * c0, a * c1, b * c0, b * c1]);
        assert_eq!(j.index(&[1, 0]).unwrap(), 2);
    }

    #[test]
    fn mixed_normalization_flags_rejected() {
        let q = QubitState::ground().to_joint();
        let u = JointState::new(vec![2], vec![c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(!u.is_normalized());
        assert!(matches!(
            tensor_product(&q, &u),
            Err(Error::Precondition(_))
        ));
        let both = tensor_product(&u, &u).unwrap();
        assert!((both.norm() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn capacity_is_enforced() {
        let big = JointState::basis(vec![64], &[0]).unwrap();
        let bigger = JointState::basis(vec![65], &[0]).unwrap();
        assert!(tensor_product(&big, &big).is_ok());
        assert!(matches!(
            tensor_product(&big, &bigger),
            Err(Error::Capacity {
                requested: 4160,
                ..
            })
        ));
    }

    #[test]
    fn contract_recovers_factor() {
        let q = QubitState::normalize(c(0.2, -0.4), c(0.9, 0.1)).unwrap();
        let p = FockPointerState::normalize(vec![c(0.1, 0.2), c(0.5, 0.0), c(-0.3, 0.4)]).unwrap();
        let j = tensor_product(&q.to_joint(), &p.to_joint()).unwrap();
        let rest = j.contract(1, p.amps()).unwrap();
        assert_eq!(rest.dims(), &[2]);
        assert!((rest.amps()[0] - q.alpha()).norm() < 1e-15);
        assert!((rest.amps()[1] - q.beta()).norm() < 1e-15);
        let qubit_bra = q.amplitudes();
        let rest = j.contract(0, &qubit_bra).unwrap();
        for (x, y) in rest.amps().iter().zip(p.amps()) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn index_errors() {
        let j = JointState::basis(vec![2, 3], &[1, 2]).unwrap();
        assert_eq!(j.index(&[1, 2]).unwrap(), 5);
        assert!(matches!(
            j.index(&[2, 0]),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        ));
        assert!(matches!(
            JointState::new(vec![2, 3], vec![c(0.0, 0.0); 5]),
            Err(Error::DimensionMismatch {
                expected: 6,
                found: 5
            })
        ));
    }

    #[test]
    fn populations() {
        let q = QubitState::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let p = FockPointerState::new(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
        let j = tensor_product(&q.to_joint(), &p.to_joint()).unwrap();
        assert!((j.level_population(0, 1).unwrap() - 0.64).abs() < 1e-15);
        assert!((j.joint_population(&[(0, 0), (1, 1)]).unwrap() - 0.18).abs() < 1e-15);
    }
}
