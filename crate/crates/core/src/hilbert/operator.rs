use super::{all_finite, check_capacity, C64, HERMITIAN_TOL, UNITARY_TOL};
use crate::{Error, Result};

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    entries: Vec<C64>,
}

impl DenseOperator {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        check_capacity(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if !all_finite(&entries) {
            return Err(Error::NonFinite);
        }
        Ok(Self { dim, entries })
    }

    /// Constructs an operator flagged hermitian; the flag is re-checked.
    pub fn hermitian(dim: usize, entries: Vec<C64>) -> Result<Self> {
        let op = Self::new(dim, entries)?;
        let deviation = op.hermiticity_error();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(op)
    }

    /// Constructs an operator flagged unitary; the flag is re-checked.
    pub fn unitary(dim: usize, entries: Vec<C64>) -> Result<Self> {
        let op = Self::new(dim, entries)?;
        let deviation = op.unitarity_error();
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(op)
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> C64) -> Result<Self> {
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self::new(dim, entries)
    }

    pub(crate) fn from_fn_unchecked(dim: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        Self {
            dim,
            entries: (0..dim * dim).map(|k| f(k / dim, k % dim)).collect(),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn_unchecked(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self.matmul_unchecked(other))
    }

    fn matmul_unchecked(&self, other: &Self) -> Self {
        let n = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.entries[k * n..(k + 1) * n];
                for (o, b) in out[r * n..(r + 1) * n].iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Self {
            dim: n,
            entries: out,
        }
    }

    /// `M v` for a raw amplitude vector.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(self.apply_unchecked(v))
    }

    pub(crate) fn apply_unchecked(&self, v: &[C64]) -> Vec<C64> {
        self.entries
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `⟨u|M|v⟩`.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> Result<C64> {
        let mv = self.apply(v)?;
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: u.len(),
            });
        }
        Ok(super::inner(u, &mv))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_dim(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn unitarity_error(&self) -> f64 {
        let product = self.adjoint().matmul_unchecked(self);
        product
            .max_abs_diff(&identity(self.dim))
            .unwrap_or(f64::INFINITY)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() <= HERMITIAN_TOL
    }

    /// Induced 1-norm (max column sum).
    pub fn one_norm(&self) -> f64 {
        (0..self.dim)
            .map(|c| (0..self.dim).map(|r| self.get(r, c).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Kronecker product `a ⊗ b`, consistent with [`super::tensor_product`].
pub fn op_tensor(a: &DenseOperator, b: &DenseOperator) -> Result<DenseOperator> {
    let dim = a.dim.checked_mul(b.dim).ok_or(Error::Capacity {
        requested: usize::MAX,
        max: super::max_total_dim(),
    })?;
    check_capacity(dim)?;
    Ok(DenseOperator::from_fn_unchecked(dim, |r, c| {
        a.get(r / b.dim, c / b.dim) * b.get(r % b.dim, c % b.dim)
    }))
}

pub fn identity(dim: usize) -> DenseOperator {
    DenseOperator::from_fn_unchecked(dim, |r, c| {
        if r == c {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn two_level(entries: [[C64; 2]; 2]) -> DenseOperator {
    DenseOperator::from_fn_unchecked(2, |r, c| entries[r][c])
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// `|0⟩⟨1| + |1⟩⟨0|`; on the qubit this is `|e⟩⟨g| + |g⟩⟨e|`.
pub fn sigma_x() -> DenseOperator {
    two_level([[ZERO, ONE], [ONE, ZERO]])
}

pub fn sigma_y() -> DenseOperator {
    two_level([[ZERO, -I], [I, ZERO]])
}

/// `diag(1, -1)` in index order; for ion levels (`↓` = 0, `↑` = 1) use
/// `-sigma_z()` to get `τ_z = |↑⟩⟨↑| - |↓⟩⟨↓|`.
pub fn sigma_z() -> DenseOperator {
    two_level([[ONE, ZERO], [ZERO, -ONE]])
}

/// Raising operator `|1⟩⟨0|` (`|↑⟩⟨↓|` for an ion).
pub fn sigma_plus() -> DenseOperator {
    two_level([[ZERO, ZERO], [ONE, ZERO]])
}

/// Lowering operator `|0⟩⟨1|`.
pub fn sigma_minus() -> DenseOperator {
    two_level([[ZERO, ONE], [ZERO, ZERO]])
}

/// Truncated annihilation operator on `0..=n_max`.
pub fn annihilation(n_max: usize) -> DenseOperator {
    DenseOperator::from_fn_unchecked(n_max + 1, |r, c| {
        if c == r + 1 {
            C64::new((c as f64).sqrt(), 0.0)
        } else {
            ZERO
        }
    })
}

/// Truncated creation operator; `creation(n)|n_max⟩ = 0`.
pub fn creation(n_max: usize) -> DenseOperator {
    annihilation(n_max).adjoint()
}

pub fn number(n_max: usize) -> DenseOperator {
    DenseOperator::from_fn_unchecked(n_max + 1, |r, c| {
        if r == c {
            C64::new(r as f64, 0.0)
        } else {
            ZERO
        }
    })
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm(a: &DenseOperator) -> DenseOperator {
    let n = a.dim;
    let norm = a.one_norm();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(C64::new(2f64.powi(-squarings), 0.0));

    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=40 {
        term = term
            .matmul_unchecked(&scaled)
            .scale(C64::new(1.0 / k as f64, 0.0));
        result = result.add(&term).expect("same dimension");
        if term.one_norm() <= 1e-18 * result.one_norm() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul_unchecked(&result);
    }
    result
}
