//! Group-level Iwasawa decomposition `g = K(g)·A(g)·N(g)` and its derivatives along
//! right translates `g·exp(tX)`.

use crate::error::Result;
use crate::lie_model::{adjoint, adjoint_inverse, invert, MatrixLieModel};
use crate::numerics::{central_diff_matrix, mat_exp, qr_positive, Matrix};

/// Default step for the finite-difference oracles.
pub const DEFAULT_FD_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct IwasawaFactors {
    /// Orthogonal, determinant one.
    pub k_factor: Matrix,
    /// Positive diagonal.
    pub a_factor: Matrix,
    /// Unit upper triangular.
    pub n_factor: Matrix,
    /// `log A(g)`, diagonal and traceless.
    pub h_projection: Matrix,
}

impl IwasawaFactors {
    /// `A(g)·N(g)`, the upper-triangular factor of the QR decomposition.
    pub fn an(&self) -> Matrix {
        &self.a_factor * &self.n_factor
    }

    pub fn reconstruct(&self) -> Matrix {
        &self.k_factor * &self.a_factor * &self.n_factor
    }
}

/// KAN factorisation through the positive-diagonal QR decomposition.
pub fn iwasawa(g: &Matrix) -> Result<IwasawaFactors> {
    let (q, r) = qr_positive(g)?;
    let n = g.nrows();
    let a_factor = Matrix::from_fn(n, n, |i, j| if i == j { r[(i, i)] } else { 0.0 });
    let n_factor = Matrix::from_fn(
        n,
        n,
        |i, j| if i <= j { r[(i, j)] / r[(i, i)] } else { 0.0 },
    );
    let h_projection = Matrix::from_fn(n, n, |i, j| if i == j { r[(i, i)].ln() } else { 0.0 });
    Ok(IwasawaFactors {
        k_factor: q,
        a_factor,
        n_factor,
        h_projection,
    })
}

/// Left-translated velocities `K(X,g)`, `A(X,g)`, `N(X,g)` of the three factor
/// curves `t ↦ K(g·exp tX)`, `A(g·exp tX)`, `N(g·exp tX)` at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfinitesimalIwasawa {
    pub k_deriv: Matrix,
    pub a_deriv: Matrix,
    pub n_deriv: Matrix,
}

impl InfinitesimalIwasawa {
    /// `K(X,g) + A(X,g) + Ad(AN(g))N(X,g)`, which must equal `Ad(AN(g))X`.
    pub fn recombine(&self, factors: &IwasawaFactors) -> Result<Matrix> {
        Ok(&self.k_deriv + &self.a_deriv + adjoint(&factors.an(), &self.n_deriv)?)
    }
}

/// Closed form: split `Ad(AN(g))X` into its k, a, n parts and pull the n part back
/// by `Ad(AN(g))⁻¹`.
pub fn infinitesimal_iwasawa(
    model: &dyn MatrixLieModel,
    x: &Matrix,
    g: &Matrix,
) -> Result<InfinitesimalIwasawa> {
    infinitesimal_from_factors(model, x, &iwasawa(g)?)
}

/// As [`infinitesimal_iwasawa`], reusing an existing factorisation of `g`.
pub fn infinitesimal_from_factors(
    model: &dyn MatrixLieModel,
    x: &Matrix,
    factors: &IwasawaFactors,
) -> Result<InfinitesimalIwasawa> {
    let an = factors.an();
    let an_inv = invert(&an)?;
    let y = &an * x * &an_inv;
    let split = model.decompose_kan(&y);
    Ok(InfinitesimalIwasawa {
        k_deriv: split.k,
        a_deriv: split.a,
        n_deriv: &an_inv * &split.n * &an,
    })
}

/// Finite-difference oracle for [`infinitesimal_iwasawa`]: fourth-order central
/// differences of the factor curves, left-translated to the identity.
pub fn fd_iwasawa_derivatives(x: &Matrix, g: &Matrix, h: f64) -> Result<InfinitesimalIwasawa> {
    let base = iwasawa(g)?;
    let curve = |t: f64| iwasawa(&(g * mat_exp(&(x * t))));
    let dk = central_diff_matrix(|t| Ok(curve(t)?.k_factor), 0.0, h)?;
    let da = central_diff_matrix(|t| Ok(curve(t)?.a_factor), 0.0, h)?;
    let dn = central_diff_matrix(|t| Ok(curve(t)?.n_factor), 0.0, h)?;
    Ok(InfinitesimalIwasawa {
        k_deriv: base.k_factor.transpose() * dk,
        a_deriv: invert(&base.a_factor)? * da,
        n_deriv: invert(&base.n_factor)? * dn,
    })
}

/// `Ad(AN(g))X`, the left-hand side of the infinitesimal decomposition.
pub fn an_adjoint(x: &Matrix, factors: &IwasawaFactors) -> Result<Matrix> {
    adjoint(&factors.an(), x)
}

/// `Ad(AN(g))⁻¹X`.
pub fn an_adjoint_inverse(x: &Matrix, factors: &IwasawaFactors) -> Result<Matrix> {
    adjoint_inverse(&factors.an(), x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_model::{elementary, Sampler, SpecialLinear};
    use crate::numerics::Vector;

    fn max_abs(m: &Matrix) -> f64 {
        m.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    #[test]
    fn identity_factors() {
        let f = iwasawa(&Matrix::identity(3, 3)).unwrap();
        assert_eq!(f.k_factor, Matrix::identity(3, 3));
        assert_eq!(f.a_factor, Matrix::identity(3, 3));
        assert_eq!(f.n_factor, Matrix::identity(3, 3));
        assert_eq!(f.h_projection, Matrix::zeros(3, 3));
    }

    #[test]
    fn unipotent_input_is_its_own_n_factor() {
        let g = Matrix::identity(3, 3) + elementary(3, 0, 1) * 2.5 - elementary(3, 1, 2) * 0.5;
        let f = iwasawa(&g).unwrap();
        assert!(max_abs(&(&f.k_factor - Matrix::identity(3, 3))) < 1e-15);
        assert!(max_abs(&(&f.a_factor - Matrix::identity(3, 3))) < 1e-15);
        assert!(max_abs(&(&f.n_factor - &g)) < 1e-15);
    }

    #[test]
    fn diagonal_input() {
        let g = Matrix::from_diagonal(&Vector::from_vec(vec![2.0, 0.5]));
        let f = iwasawa(&g).unwrap();
        assert_eq!(f.k_factor, Matrix::identity(2, 2));
        assert_eq!(f.a_factor, g);
        assert_eq!(f.n_factor, Matrix::identity(2, 2));
        assert!((f.h_projection[(0, 0)] - 2f64.ln()).abs() < 1e-16);
        assert!((f.h_projection[(1, 1)] + 2f64.ln()).abs() < 1e-16);
    }

    #[test]
    fn infinitesimal_at_identity_is_the_kan_split() {
        let model = SpecialLinear::new(3).unwrap();
        let mut s = Sampler::new(3, 11);
        let x = s.algebra(1.0);
        let d = infinitesimal_iwasawa(&model, &x, &Matrix::identity(3, 3)).unwrap();
        let split = model.decompose_kan(&x);
        assert!(max_abs(&(d.k_deriv - split.k)) < 1e-15);
        assert!(max_abs(&(d.a_deriv - split.a)) < 1e-15);
        assert!(max_abs(&(d.n_deriv - split.n)) < 1e-15);

        let y = elementary(3, 0, 2) - elementary(3, 1, 2) * 3.0;
        let d = infinitesimal_iwasawa(&model, &y, &Matrix::identity(3, 3)).unwrap();
        assert_eq!(d.k_deriv, Matrix::zeros(3, 3));
        assert_eq!(d.a_deriv, Matrix::zeros(3, 3));
        assert_eq!(d.n_deriv, y);
    }

    #[test]
    fn fd_oracle_trivial_cases() {
        let g = Sampler::new(3, 2).group(0.5);
        let zero = fd_iwasawa_derivatives(&Matrix::zeros(3, 3), &g, 1e-3).unwrap();
        assert_eq!(max_abs(&zero.k_deriv), 0.0);
        assert_eq!(max_abs(&zero.a_deriv), 0.0);
        assert_eq!(max_abs(&zero.n_deriv), 0.0);

        let x = Matrix::from_diagonal(&Vector::from_vec(vec![0.4, -0.1, -0.3]));
        let d = fd_iwasawa_derivatives(&x, &Matrix::identity(3, 3), 1e-3).unwrap();
        assert!(max_abs(&d.k_deriv) < 1e-12);
        assert!(max_abs(&(d.a_deriv - &x)) < 1e-10);
        assert!(max_abs(&d.n_deriv) < 1e-12);
    }

    #[test]
    fn closed_form_matches_fd_oracle() {
        let model = SpecialLinear::new(3).unwrap();
        for seed in 0..10 {
            let mut s = Sampler::new(3, seed);
            let g = s.group(0.5);
            let x = s.algebra(1.0);
            let exact = infinitesimal_iwasawa(&model, &x, &g).unwrap();
            let fd = fd_iwasawa_derivatives(&x, &g, DEFAULT_FD_STEP).unwrap();
            let tol = 1e-6 * (x.norm() * g.norm()).max(1.0);
            assert!(max_abs(&(&exact.k_deriv - &fd.k_deriv)) < tol);
            assert!(max_abs(&(&exact.a_deriv - &fd.a_deriv)) < tol);
            assert!(max_abs(&(&exact.n_deriv - &fd.n_deriv)) < tol);
        }
    }
}
