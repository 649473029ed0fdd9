//! Dense real matrix kernel.
//!
//! Everything above this module works with small square matrices (n ≤ 8), so the
//! routines here favour transparency over blocking or vectorisation.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense real matrix. Row/column indexing follows nalgebra.
pub type Matrix = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Relative pivot threshold below which `qr_positive` reports a singular input.
pub const SINGULAR_PIVOT: f64 = 1e-10;

const EXP_SCALE_TARGET: f64 = 0.5;
const EXP_TAYLOR_DEGREE: usize = 18;

/// Builds a matrix from row-major entries, rejecting NaN and infinities.
pub fn matrix_from_rows(rows: usize, cols: usize, entries: &[f64]) -> Result<Matrix> {
    if entries.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "{} entries supplied for a {rows}x{cols} matrix",
            entries.len()
        )));
    }
    let m = Matrix::from_row_slice(rows, cols, entries);
    ensure_finite(&m)?;
    Ok(m)
}

pub fn ensure_finite(m: &Matrix) -> Result<()> {
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if !m[(r, c)].is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
        }
    }
    Ok(())
}

/// QR factorisation `M = Q·R` with `Q` orthogonal and `R` upper triangular with a
/// strictly positive diagonal.
///
/// Modified Gram–Schmidt with one reorthogonalisation pass. Column norms are taken
/// positive, which is exactly the sign normalisation that makes the factors unique.
pub fn qr_positive(m: &Matrix) -> Result<(Matrix, Matrix)> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension(format!(
            "qr_positive needs a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    ensure_finite(m)?;
    let scale = m.norm();
    let mut q = m.clone();
    let mut r = Matrix::zeros(n, n);
    for j in 0..n {
        for _pass in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                r[(i, j)] += proj;
                let qi = q.column(i).clone_owned();
                q.column_mut(j).axpy(-proj, &qi, 1.0);
            }
        }
        let norm = q.column(j).norm();
        if norm.is_nan() || norm <= SINGULAR_PIVOT * scale {
            return Err(Error::SingularInput { pivot: j, norm });
        }
        r[(j, j)] = norm;
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    Ok((q, r))
}

fn one_norm(m: &Matrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring around a degree-18 Taylor polynomial.
pub fn mat_exp(x: &Matrix) -> Matrix {
    let n = x.nrows();
    assert_eq!(n, x.ncols(), "mat_exp needs a square matrix");
    let norm = one_norm(x);
    let mut squarings = 0u32;
    if norm > EXP_SCALE_TARGET {
        squarings = (norm / EXP_SCALE_TARGET).log2().ceil() as u32;
    }
    let scaled = x / 2f64.powi(squarings as i32);

    // Horner: I + A(I + A/2(I + A/3(...)))
    let identity = Matrix::identity(n, n);
    let mut acc = identity.clone();
    for k in (1..=EXP_TAYLOR_DEGREE).rev() {
        acc = &identity + (&scaled * &acc) / k as f64;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// Minimum-norm least-squares solution together with its residual `‖A·x − b‖`.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: Vector,
    pub residual: f64,
}

impl LeastSquares {
    /// Accepts the solution only when the system was consistent to `tolerance`.
    pub fn exact(self, tolerance: f64) -> Result<Vector> {
        if self.residual > tolerance {
            return Err(Error::NoSolution {
                residual: self.residual,
                tolerance,
            });
        }
        Ok(self.solution)
    }
}

/// Minimum-norm least-squares solve through the SVD.
///
/// Singular values below `1e-12·σ_max` are treated as zero, which is what makes the
/// returned solution the minimum-norm one on rank-deficient systems.
pub fn solve_least_squares(a: &Matrix, b: &Vector) -> Result<LeastSquares> {
    if a.nrows() != b.len() {
        return Err(Error::Dimension(format!(
            "least squares: {} rows against a right-hand side of length {}",
            a.nrows(),
            b.len()
        )));
    }
    if a.ncols() == 0 || a.nrows() == 0 {
        return Ok(LeastSquares {
            solution: Vector::zeros(a.ncols()),
            residual: b.norm(),
        });
    }
    let svd = thin_svd(a)?;
    let sigma_max = svd.s.iter().copied().fold(0.0, f64::max);
    let cutoff = (1e-12 * sigma_max).max(f64::MIN_POSITIVE);
    let mut projected = svd.u.transpose() * b;
    for (p, &s) in projected.iter_mut().zip(&svd.s) {
        *p = if s > cutoff { *p / s } else { 0.0 };
    }
    let solution = svd.v * projected;
    let residual = (a * &solution - b).norm();
    Ok(LeastSquares { solution, residual })
}

struct ThinSvd {
    u: Matrix,
    s: Vec<f64>,
    v: Matrix,
}

// The SVD comes from faer: nalgebra's SVD returns factors that do not reconstruct
// the input on some of the structured matrices built here (near-repeated singular
// values), with or without its sorting step.
fn to_faer(a: &Matrix) -> faer::Mat<f64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, f64>) -> Matrix {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn thin_svd(a: &Matrix) -> Result<ThinSvd> {
    let svd = to_faer(a).thin_svd().map_err(|_| Error::NoConvergence)?;
    let s = svd.S().column_vector();
    Ok(ThinSvd {
        u: from_faer(svd.U()),
        s: (0..s.nrows()).map(|i| s[i]).collect(),
        v: from_faer(svd.V()),
    })
}

/// Singular values in descending order.
pub fn singular_values(a: &Matrix) -> Result<Vec<f64>> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    let mut s = to_faer(a)
        .singular_values()
        .map_err(|_| Error::NoConvergence)?;
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Numerical rank with a relative cutoff on the singular values.
pub fn numerical_rank(a: &Matrix, relative: f64) -> Result<usize> {
    let s = singular_values(a)?;
    Ok(match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&v| v > relative * top).count(),
        _ => 0,
    })
}

/// Fourth-order central difference `(f(t−2h) − 8f(t−h) + 8f(t+h) − f(t+2h)) / 12h`.
///
/// Evaluated as paired differences, so constant functions give exactly zero.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> f64 {
    let near = f(t + h) - f(t - h);
    let far = f(t + 2.0 * h) - f(t - 2.0 * h);
    (8.0 * near - far) / (12.0 * h)
}

/// Same stencil applied entrywise to a matrix-valued curve.
pub fn central_diff_matrix<F>(f: F, t: f64, h: f64) -> Result<Matrix>
where
    F: Fn(f64) -> Result<Matrix>,
{
    let near = f(t + h)? - f(t - h)?;
    let far = f(t + 2.0 * h)? - f(t - 2.0 * h)?;
    Ok((near * 8.0 - far) / (12.0 * h))
}

/// Characteristic polynomial coefficients `[c₀, …, c_{n−1}]` of
/// `det(λI − M) = λⁿ + c_{n−1}λⁿ⁻¹ + … + c₀` (Faddeev–LeVerrier).
pub fn char_poly(m: &Matrix) -> Vec<f64> {
    let n = m.nrows();
    let identity = Matrix::identity(n, n);
    let mut coeffs = vec![0.0; n];
    let mut aux = Matrix::zeros(n, n);
    let mut c_prev = 1.0;
    for k in 1..=n {
        aux = m * &aux + &identity * c_prev;
        let c = -(m * &aux).trace() / k as f64;
        coeffs[n - k] = c;
        c_prev = c;
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn max_abs(m: &Matrix) -> f64 {
        m.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    #[test]
    fn qr_of_identity() {
        let (q, r) = qr_positive(&Matrix::identity(2, 2)).unwrap();
        assert_eq!(q, Matrix::identity(2, 2));
        assert_eq!(r, Matrix::identity(2, 2));
    }

    #[test]
    fn qr_of_rotation_is_the_rotation() {
        let t: f64 = 0.7;
        let m = matrix_from_rows(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]).unwrap();
        let (q, r) = qr_positive(&m).unwrap();
        assert!(max_abs(&(q - &m)) < 1e-15);
        assert!(max_abs(&(r - Matrix::identity(2, 2))) < 1e-15);
    }

    #[test]
    fn qr_of_shear() {
        // columns (1,0) and (1,1): first is already unit, second loses its e₁ part.
        let m = matrix_from_rows(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        let (q, r) = qr_positive(&m).unwrap();
        assert_eq!(q, Matrix::identity(2, 2));
        assert_eq!(r, m);
    }

    #[test]
    fn qr_rejects_rank_deficient_input() {
        let m = matrix_from_rows(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(
            qr_positive(&m),
            Err(Error::SingularInput { pivot: 1, .. })
        ));
    }

    #[test]
    fn non_finite_entries_are_rejected() {
        assert_eq!(
            matrix_from_rows(1, 2, &[1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        );
        let m = Matrix::from_element(2, 2, f64::INFINITY);
        assert!(qr_positive(&m).is_err());
    }

    #[test]
    fn exp_of_zero_diagonal_and_nilpotent() {
        assert_eq!(mat_exp(&Matrix::zeros(3, 3)), Matrix::identity(3, 3));

        let a = 1.3;
        let d = mat_exp(&Matrix::from_diagonal(&Vector::from_vec(vec![a, -a])));
        assert_relative_eq!(d[(0, 0)], a.exp(), max_relative = 1e-14);
        assert_relative_eq!(d[(1, 1)], (-a).exp(), max_relative = 1e-14);
        assert_eq!(d[(0, 1)], 0.0);

        let e12 = matrix_from_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let e = mat_exp(&e12);
        assert!(max_abs(&(e - (Matrix::identity(2, 2) + e12))) < 1e-16);
    }

    #[test]
    fn exp_of_large_rotation_generator() {
        // exp(θJ) is a rotation by θ; θ = 9 forces several squarings.
        let theta: f64 = 9.0;
        let j = matrix_from_rows(2, 2, &[0.0, -theta, theta, 0.0]).unwrap();
        let e = mat_exp(&j);
        let expected =
            matrix_from_rows(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]).unwrap();
        assert!(max_abs(&(e - expected)) < 1e-12);
    }

    #[test]
    fn least_squares_examples() {
        let b = Vector::from_vec(vec![0.3, -2.0, 5.0]);
        let ls = solve_least_squares(&Matrix::identity(3, 3), &b).unwrap();
        assert!((ls.solution - &b).norm() < 1e-15);

        let a = matrix_from_rows(2, 1, &[1.0, 1.0]).unwrap();
        let ls = solve_least_squares(&a, &Vector::from_vec(vec![1.0, 1.0])).unwrap();
        assert_relative_eq!(ls.solution[0], 1.0, epsilon = 1e-15);
        assert!(ls.residual < 1e-15);

        let ls = solve_least_squares(&a, &Vector::from_vec(vec![1.0, 0.0])).unwrap();
        assert_relative_eq!(ls.solution[0], 0.5, epsilon = 1e-15);
        assert_relative_eq!(ls.residual, 0.5f64.sqrt(), epsilon = 1e-15);
        assert!(matches!(ls.exact(1e-9), Err(Error::NoSolution { .. })));
    }

    #[test]
    fn least_squares_is_minimum_norm_on_rank_deficient_systems() {
        // x + y = 2 has minimum-norm solution (1, 1).
        let a = matrix_from_rows(1, 2, &[1.0, 1.0]).unwrap();
        let x = solve_least_squares(&a, &Vector::from_vec(vec![2.0]))
            .unwrap()
            .exact(1e-12)
            .unwrap();
        assert_relative_eq!(x[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(x[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn central_diff_examples() {
        assert_relative_eq!(central_diff(|t| t * t, 1.0, 1e-3), 2.0, epsilon = 1e-9);
        assert_eq!(central_diff(|_| 4.2, 0.3, 1e-3), 0.0);
        // Truncation bound h⁴/30·max|f⁽⁵⁾| ≈ 3.4e-14 on [−2h, 2h].
        assert_relative_eq!(central_diff(f64::exp, 0.0, 1e-3), 1.0, epsilon = 1e-11);
    }

    #[test]
    fn char_poly_of_diagonal() {
        let m = Matrix::from_diagonal(&Vector::from_vec(vec![1.0, 0.0, -1.0]));
        // (λ−1)λ(λ+1) = λ³ − λ
        let c = char_poly(&m);
        assert!((c[0]).abs() < 1e-15);
        assert!((c[1] + 1.0).abs() < 1e-15);
        assert!((c[2]).abs() < 1e-15);
    }
}
