//! Concrete semisimple data: Cartan involution, Killing form, the Iwasawa splitting
//! g = k ⊕ a ⊕ n of the Lie algebra, and the chamber-dependent subspaces.
//!
//! Downstream code only talks to [`MatrixLieModel`]; [`SpecialLinear`] is the one
//! implemented model.

mod chamber;
mod sampling;

use std::fmt;

pub use chamber::{chamber_element, Block, ChamberBases, ChamberElement};
pub use sampling::{random_algebra_element, random_group_element, Sampler};

use crate::error::{Error, Result};
use crate::numerics::Matrix;

/// The three components of `X = X_k + X_a + X_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KanSplit {
    pub k: Matrix,
    pub a: Matrix,
    pub n: Matrix,
}

impl KanSplit {
    pub fn sum(&self) -> Matrix {
        &self.k + &self.a + &self.n
    }
}

/// A real semisimple matrix Lie algebra with a fixed Cartan involution and Iwasawa
/// splitting.
pub trait MatrixLieModel: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;

    /// Size of the matrices representing the algebra.
    fn matrix_size(&self) -> usize;

    fn algebra_dim(&self) -> usize;

    /// Scalar `c` such that the Killing form is `c·tr(XY)`.
    fn killing_coefficient(&self) -> f64;

    fn killing(&self, x: &Matrix, y: &Matrix) -> f64 {
        self.killing_coefficient() * trace_of_product(x, y)
    }

    fn cartan_involution(&self, x: &Matrix) -> Matrix;

    fn decompose_kan(&self, x: &Matrix) -> KanSplit;

    fn k_basis(&self) -> &[Matrix];
    fn a_basis(&self) -> &[Matrix];
    fn n_basis(&self) -> &[Matrix];

    /// Subspace bases attached to a chamber element, given the block label of each
    /// diagonal position (equal labels ⇔ equal entries).
    fn chamber_bases(&self, block_index: &[usize]) -> ChamberBases;
}

/// `tr(XY)` without forming the product.
pub fn trace_of_product(x: &Matrix, y: &Matrix) -> f64 {
    x.component_mul(&y.transpose()).sum()
}

pub fn bracket(x: &Matrix, y: &Matrix) -> Matrix {
    x * y - y * x
}

pub fn invert(g: &Matrix) -> Result<Matrix> {
    g.clone().try_inverse().ok_or(Error::SingularInput {
        pivot: 0,
        norm: 0.0,
    })
}

/// `Ad(g)X = g·X·g⁻¹`.
pub fn adjoint(g: &Matrix, x: &Matrix) -> Result<Matrix> {
    Ok(g * x * invert(g)?)
}

/// `Ad(g)⁻¹X = g⁻¹·X·g`.
pub fn adjoint_inverse(g: &Matrix, x: &Matrix) -> Result<Matrix> {
    Ok(invert(g)? * x * g)
}

/// `Ad(k)X` for orthogonal `k`, using `k⁻¹ = kᵀ`.
pub fn adjoint_orthogonal(k: &Matrix, x: &Matrix) -> Matrix {
    k * x * k.transpose()
}

/// Elementary matrix `E_ij` (zero-based indices).
pub fn elementary(n: usize, i: usize, j: usize) -> Matrix {
    let mut e = Matrix::zeros(n, n);
    e[(i, j)] = 1.0;
    e
}

/// Coefficients of `x` in the span of `basis`, plus the distance from `x` to that span.
pub fn span_coefficients(basis: &[Matrix], x: &Matrix) -> Result<(Vec<f64>, f64)> {
    if basis.is_empty() {
        return Ok((Vec::new(), x.norm()));
    }
    let rows = x.len();
    let a = Matrix::from_fn(rows, basis.len(), |r, c| basis[c].as_slice()[r]);
    let b = crate::numerics::Vector::from_column_slice(x.as_slice());
    let ls = crate::numerics::solve_least_squares(&a, &b)?;
    Ok((ls.solution.iter().copied().collect(), ls.residual))
}

/// Linear combination `Σ cᵢ·basisᵢ`.
pub fn combine(basis: &[Matrix], coefficients: &[f64], n: usize) -> Matrix {
    basis
        .iter()
        .zip(coefficients)
        .fold(Matrix::zeros(n, n), |acc, (b, &c)| acc + b * c)
}

/// sl(n, ℝ) with θ(X) = −Xᵀ, K = SO(n), A = positive diagonal, N = unit upper
/// triangular.
#[derive(Debug, Clone)]
pub struct SpecialLinear {
    n: usize,
    k_basis: Vec<Matrix>,
    a_basis: Vec<Matrix>,
    n_basis: Vec<Matrix>,
}

impl SpecialLinear {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Dimension(format!("sl(n) needs n ≥ 2, got {n}")));
        }
        let mut k_basis = Vec::new();
        let mut n_basis = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                k_basis.push(elementary(n, i, j) - elementary(n, j, i));
                n_basis.push(elementary(n, i, j));
            }
        }
        let a_basis = (0..n - 1)
            .map(|i| elementary(n, i, i) - elementary(n, i + 1, i + 1))
            .collect();
        Ok(Self {
            n,
            k_basis,
            a_basis,
            n_basis,
        })
    }

    /// Basis of the whole algebra, ordered k, a, n.
    pub fn algebra_basis(&self) -> Vec<Matrix> {
        self.k_basis
            .iter()
            .chain(&self.a_basis)
            .chain(&self.n_basis)
            .cloned()
            .collect()
    }
}

impl MatrixLieModel for SpecialLinear {
    fn name(&self) -> &str {
        "sl(n,R)"
    }

    fn matrix_size(&self) -> usize {
        self.n
    }

    fn algebra_dim(&self) -> usize {
        self.n * self.n - 1
    }

    fn killing_coefficient(&self) -> f64 {
        2.0 * self.n as f64
    }

    fn cartan_involution(&self, x: &Matrix) -> Matrix {
        -x.transpose()
    }

    fn decompose_kan(&self, x: &Matrix) -> KanSplit {
        let n = self.n;
        let lower = Matrix::from_fn(n, n, |i, j| if i > j { x[(i, j)] } else { 0.0 });
        let k = &lower - lower.transpose();
        let a = Matrix::from_fn(n, n, |i, j| if i == j { x[(i, j)] } else { 0.0 });
        let rest = x - &k;
        let upper = Matrix::from_fn(n, n, |i, j| if i < j { rest[(i, j)] } else { 0.0 });
        KanSplit { k, a, n: upper }
    }

    fn k_basis(&self) -> &[Matrix] {
        &self.k_basis
    }

    fn a_basis(&self) -> &[Matrix] {
        &self.a_basis
    }

    fn n_basis(&self) -> &[Matrix] {
        &self.n_basis
    }

    fn chamber_bases(&self, block_index: &[usize]) -> ChamberBases {
        let n = self.n;
        let mut bases = ChamberBases::default();
        for i in 0..n {
            for j in (i + 1)..n {
                let e_ij = elementary(n, i, j);
                let e_ji = elementary(n, j, i);
                if block_index[i] == block_index[j] {
                    bases.z_k_of_h.push(&e_ij - &e_ji);
                    bases.z_of_h.push(e_ij);
                    bases.z_of_h.push(e_ji);
                } else {
                    bases.m_of_h.push(&e_ij - &e_ji);
                    bases.theta_n_of_h.push(self.cartan_involution(&e_ij));
                    bases.n_of_h.push(e_ij);
                }
            }
        }
        bases.z_of_h.extend(self.a_basis.iter().cloned());
        bases
    }
}
