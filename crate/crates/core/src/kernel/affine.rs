//! Affine subspaces of symmetric matrices in the scaled upper-triangle
//! vectorization.

use std::f64::consts::SQRT_2;

use super::{KernelError, Matrix};

/// Relative norm below which an orthogonalized constraint counts as dependent.
pub const RANK_TOL: f64 = 1e-12;

/// Right-hand-side mismatch tolerated on a dependent constraint before the
/// system is declared inconsistent.
pub const CONSISTENCY_TOL: f64 = 1e-6;

/// Space of `n×n` symmetric matrices, vectorized as the upper triangle
/// (row-major) with off-diagonal entries scaled by √2 so that the Frobenius
/// inner product becomes the Euclidean one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetricSpace {
    n: usize,
}

impl SymmetricSpace {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    /// Position of entry `(i, j)` in the vectorized form.
    pub fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    pub fn vectorize(&self, a: &Matrix) -> Vec<f64> {
        debug_assert_eq!(a.rows(), self.n);
        let mut out = Vec::with_capacity(self.dim());
        for i in 0..self.n {
            out.push(a[(i, i)]);
            for j in (i + 1)..self.n {
                out.push(SQRT_2 * 0.5 * (a[(i, j)] + a[(j, i)]));
            }
        }
        out
    }

    pub fn devectorize(&self, x: &[f64]) -> Matrix {
        debug_assert_eq!(x.len(), self.dim());
        let mut a = Matrix::zeros(self.n, self.n);
        let mut k = 0;
        for i in 0..self.n {
            a[(i, i)] = x[k];
            k += 1;
            for j in (i + 1)..self.n {
                let v = x[k] / SQRT_2;
                a[(i, j)] = v;
                a[(j, i)] = v;
                k += 1;
            }
        }
        a
    }
}

/// A linear functional `Σ coeff · X[i][j] = rhs` on symmetric matrices.
/// Terms on `(i, j)` and `(j, i)` address the same entry.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, usize, f64)>,
    pub rhs: f64,
}

impl LinearConstraint {
    pub fn entry(i: usize, j: usize, value: f64) -> Self {
        Self {
            terms: vec![(i, j, 1.0)],
            rhs: value,
        }
    }

    pub fn evaluate(&self, x: &Matrix) -> f64 {
        self.terms.iter().map(|&(i, j, c)| c * x[(i, j)]).sum()
    }
}

/// Affine constraint set `{X : ⟨A_k, X⟩ = b_k}` with a precomputed orthonormal
/// basis of the constraint span.
#[derive(Debug, Clone)]
pub struct AffineConstraintSet {
    space: SymmetricSpace,
    constraints: Vec<LinearConstraint>,
    basis: Vec<Vec<f64>>,
    basis_rhs: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl AffineConstraintSet {
    /// Orthonormalizes the constraints by modified Gram-Schmidt with one
    /// re-orthogonalization pass.
    pub fn new(n: usize, constraints: Vec<LinearConstraint>) -> Result<Self, KernelError> {
        let space = SymmetricSpace::new(n);
        let dim = space.dim();
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut basis_rhs: Vec<f64> = Vec::new();

        for (idx, c) in constraints.iter().enumerate() {
            let mut a = vec![0.0; dim];
            for &(i, j, coeff) in &c.terms {
                if i >= n || j >= n {
                    return Err(KernelError::ConstraintOutOfRange { constraint: idx, n });
                }
                let k = space.index(i, j);
                a[k] += if i == j { coeff } else { coeff / SQRT_2 };
            }
            let mut b = c.rhs;
            let norm0 = dot(&a, &a).sqrt();
            if norm0 == 0.0 {
                if b.abs() > CONSISTENCY_TOL {
                    return Err(KernelError::Inconsistent {
                        constraint: idx,
                        residual: b.abs(),
                    });
                }
                continue;
            }
            for _pass in 0..2 {
                for (q, &qb) in basis.iter().zip(&basis_rhs) {
                    let r = dot(q, &a);
                    if r != 0.0 {
                        for (ai, qi) in a.iter_mut().zip(q) {
                            *ai -= r * qi;
                        }
                        b -= r * qb;
                    }
                }
            }
            let norm = dot(&a, &a).sqrt();
            if norm <= RANK_TOL * norm0 {
                let residual = b.abs() / norm0;
                if residual > CONSISTENCY_TOL {
                    return Err(KernelError::Inconsistent {
                        constraint: idx,
                        residual,
                    });
                }
                continue;
            }
            for ai in &mut a {
                *ai /= norm;
            }
            basis.push(a);
            basis_rhs.push(b / norm);
        }

        Ok(Self {
            space,
            constraints,
            basis,
            basis_rhs,
        })
    }

    pub fn space(&self) -> SymmetricSpace {
        self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn constraints(&self) -> &[LinearConstraint] {
        &self.constraints
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// True when the set is a single point.
    pub fn is_fully_determined(&self) -> bool {
        self.rank() == self.space.dim()
    }

    /// Nearest point of the affine set, in vectorized coordinates.
    pub fn project_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        for (q, &qb) in self.basis.iter().zip(&self.basis_rhs) {
            let r = dot(q, x) - qb;
            if r != 0.0 {
                for (o, qi) in out.iter_mut().zip(q) {
                    *o -= r * qi;
                }
            }
        }
        out
    }

    pub fn project(&self, x: &Matrix) -> Matrix {
        self.space
            .devectorize(&self.project_vec(&self.space.vectorize(x)))
    }

    /// Largest absolute violation over the original constraints.
    pub fn max_residual(&self, x: &Matrix) -> f64 {
        self.constraints
            .iter()
            .map(|c| (c.evaluate(x) - c.rhs).abs())
            .fold(0.0, f64::max)
    }
}
