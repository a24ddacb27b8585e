use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Sweep cap for the cyclic Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Convergence when the off-diagonal Frobenius norm drops below this times `‖M‖_F`.
pub const JACOBI_RELATIVE_TOLERANCE: f64 = 1e-14;

/// Dense real symmetric matrix stored as its packed lower triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    lower: Vec<f64>,
}

impl SymmetricMatrix {
    /// Builds the matrix by evaluating `f(i, j)` for `j <= i` only.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("symmetric matrix dimension must be at least 1"));
        }
        let mut lower = Vec::with_capacity(dim * (dim + 1) / 2);
        for i in 0..dim {
            for j in 0..=i {
                lower.push(f(i, j));
            }
        }
        Ok(Self { dim, lower })
    }

    /// Builds the matrix from full rows, rejecting anything not exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::domain("matrix rows must form a square array"));
        }
        for i in 0..dim {
            for j in 0..i {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::domain(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        self.lower[r * (r + 1) / 2 + c]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            for j in 0..=i {
                let x = self.get(i, j);
                acc += if i == j { x * x } else { 2.0 * x * x };
            }
        }
        libm::sqrt(acc)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }

    /// `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    fn is_finite(&self) -> bool {
        self.lower.iter().all(|x| x.is_finite())
    }
}

/// An eigenvalue with its unit-norm eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Full eigendecomposition by cyclic Jacobi rotations, sorted by ascending eigenvalue.
///
/// Eigenvectors are normalized and signed so their first nonzero component is positive.
pub fn symmetric_eigen(m: &SymmetricMatrix) -> Result<Vec<EigenPair>> {
    if !m.is_finite() {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    let n = m.dim();
    let mut a = m.to_rows();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let tol = JACOBI_RELATIVE_TOLERANCE * m.frobenius_norm();

    let mut off = off_diagonal_norm(&a);
    let mut sweeps = 0;
    while off > tol {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::numerical(
                format!("Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps"),
                off,
            ));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        off = off_diagonal_norm(&a);
    }

    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|k| {
            let mut vector: Vec<f64> = (0..n).map(|i| v[i][k]).collect();
            normalize_and_orient(&mut vector);
            EigenPair {
                value: a[k][k],
                vector,
            }
        })
        .collect();
    // Stable sort keeps Jacobi column order among exact ties.
    pairs.sort_by(|x, y| x.value.total_cmp(&y.value));
    Ok(pairs)
}

/// The algebraically smallest eigenvalue and its eigenvector.
pub fn min_eigenpair(m: &SymmetricMatrix) -> Result<EigenPair> {
    let mut pairs = symmetric_eigen(m)?;
    Ok(pairs.swap_remove(0))
}

fn off_diagonal_norm(a: &[Vec<f64>]) -> f64 {
    let mut acc = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if i != j {
                acc += x * x;
            }
        }
    }
    libm::sqrt(acc)
}

fn rotate(a: &mut [Vec<f64>], v: &mut [Vec<f64>], p: usize, q: usize) {
    let apq = a[p][q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + libm::sqrt(theta * theta + 1.0));
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    let n = a.len();

    for k in 0..n {
        let akp = a[k][p];
        let akq = a[k][q];
        a[k][p] = c * akp - s * akq;
        a[k][q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p][k];
        let aqk = a[q][k];
        a[p][k] = c * apk - s * aqk;
        a[q][k] = s * apk + c * aqk;
    }
    a[p][q] = 0.0;
    a[q][p] = 0.0;

    for row in v.iter_mut() {
        let vkp = row[p];
        let vkq = row[q];
        row[p] = c * vkp - s * vkq;
        row[q] = s * vkp + c * vkq;
    }
}

fn normalize_and_orient(x: &mut [f64]) {
    let norm = libm::sqrt(x.iter().map(|c| c * c).sum::<f64>());
    if norm > 0.0 {
        x.iter_mut().for_each(|c| *c /= norm);
    }
    // "Nonzero" means above rotation round-off.
    if let Some(first) = x.iter().find(|c| c.abs() > 1e-12) {
        if *first < 0.0 {
            x.iter_mut().for_each(|c| *c = -*c);
        }
    }
}

#[cfg(test)]
/// Residual `‖M v − λ v‖₂`.
pub(crate) fn residual_norm(m: &SymmetricMatrix, pair: &EigenPair) -> f64 {
    let mv = m.mul_vec(&pair.vector);
    libm::sqrt(
        mv.iter()
            .zip(&pair.vector)
            .map(|(a, b)| (a - pair.value * b) * (a - pair.value * b))
            .sum(),
    )
}
