//! Adjoint-orbit geometry.
//!
//! Points of `Ad(G)H` always carry a group witness `g` with `x = g·H·g⁻¹`. The
//! ruling projection, the identification with `T*Ad(K)H` and all charts are built
//! from that witness, never from an eigendecomposition of `x`.

mod chart;
mod cotangent;

pub use chart::{default_chart, orbit_chart, split_chart, OrbitChart};
pub use cotangent::{from_cotangent, to_cotangent, CotangentRep, FIBER_TOLERANCE};

use crate::error::{Error, Result};
use crate::iwasawa::{iwasawa, IwasawaFactors};
use crate::lie_model::{adjoint, adjoint_orthogonal, bracket, ChamberElement};
use crate::numerics::{char_poly, solve_least_squares, Matrix, Vector};

/// Orthogonality defect allowed for witnesses of flag-manifold points.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

/// Residual allowed by [`solve_generator`], relative to the operand sizes.
pub const GENERATOR_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct OrbitPoint<'a> {
    witness: Matrix,
    point: Matrix,
    chamber: &'a ChamberElement,
}

/// A tangent vector `V` at an orbit point, optionally with a generator `Z`,
/// `[Z, x] = V`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub value: Matrix,
    pub generator: Option<Matrix>,
}

impl TangentVector {
    pub fn bare(value: Matrix) -> Self {
        Self {
            value,
            generator: None,
        }
    }
}

/// `x = Ad(g)H`.
pub fn orbit_point<'a>(g: &Matrix, chamber: &'a ChamberElement) -> Result<OrbitPoint<'a>> {
    if g.nrows() != chamber.n() || g.ncols() != chamber.n() {
        return Err(Error::Dimension(format!(
            "witness is {}x{}, model is {}x{}",
            g.nrows(),
            g.ncols(),
            chamber.n(),
            chamber.n()
        )));
    }
    Ok(OrbitPoint {
        point: adjoint(g, chamber.h())?,
        witness: g.clone(),
        chamber,
    })
}

/// A point `Ad(k)H` of the flag manifold; `k` must be a rotation.
pub fn flag_point<'a>(k: &Matrix, chamber: &'a ChamberElement) -> Result<OrbitPoint<'a>> {
    let n = chamber.n();
    let defect = (k.transpose() * k - Matrix::identity(n, n)).norm();
    if defect.is_nan() || defect > ORTHOGONALITY_TOLERANCE {
        return Err(Error::NotOrthogonal { defect });
    }
    let det = k.determinant();
    if det < 0.0 {
        return Err(Error::NotOrthogonal {
            defect: (det - 1.0).abs(),
        });
    }
    let point = adjoint_orthogonal(k, chamber.h());
    debug_assert!((&point - point.transpose()).norm() <= 1e-12 * point.norm().max(1.0));
    Ok(OrbitPoint {
        witness: k.clone(),
        point,
        chamber,
    })
}

impl<'a> OrbitPoint<'a> {
    pub fn witness(&self) -> &Matrix {
        &self.witness
    }

    pub fn point(&self) -> &Matrix {
        &self.point
    }

    pub fn chamber(&self) -> &'a ChamberElement {
        self.chamber
    }

    pub fn iwasawa(&self) -> Result<IwasawaFactors> {
        iwasawa(&self.witness)
    }

    /// The tangent vector `[Z, x]` generated by `Z`.
    pub fn tangent(&self, generator: &Matrix) -> TangentVector {
        TangentVector {
            value: bracket(generator, &self.point),
            generator: Some(generator.clone()),
        }
    }

    /// Largest coefficient difference between the characteristic polynomials of
    /// `x` and `H`.
    pub fn spectral_defect(&self) -> f64 {
        char_poly(&self.point)
            .iter()
            .zip(char_poly(self.chamber.h()))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Ruling projection `pr(Ad(g)H) = Ad(K(g))H` onto the flag manifold.
pub fn project_ruling<'a>(x: &OrbitPoint<'a>) -> Result<OrbitPoint<'a>> {
    let factors = x.iwasawa()?;
    flag_point(&factors.k_factor, x.chamber)
}

/// Minimum-norm `Z` with `[Z, x] = V`.
pub fn solve_generator(x: &OrbitPoint<'_>, v: &Matrix) -> Result<Matrix> {
    let n = x.chamber.n();
    let dim = n * n;
    // columns: [E_rc, x] for the standard basis of gl(n), in column-major order
    let mut a = Matrix::zeros(dim, dim);
    for c in 0..n {
        for r in 0..n {
            let mut e = Matrix::zeros(n, n);
            e[(r, c)] = 1.0;
            let image = bracket(&e, &x.point);
            a.column_mut(c * n + r).copy_from_slice(image.as_slice());
        }
    }
    let b = Vector::from_column_slice(v.as_slice());
    let ls = solve_least_squares(&a, &b)?;
    let scale = 1f64.max(v.norm()).max(x.point.norm());
    if ls.residual > GENERATOR_TOLERANCE * scale {
        return Err(Error::NotTangent {
            residual: ls.residual,
        });
    }
    Ok(Matrix::from_column_slice(n, n, ls.solution.as_slice()))
}

/// The generator of `v`, solving for one when it is not attached.
pub fn generator_of(x: &OrbitPoint<'_>, v: &TangentVector) -> Result<Matrix> {
    match &v.generator {
        Some(z) => Ok(z.clone()),
        None => solve_generator(x, &v.value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_model::{chamber_element, elementary, Sampler};
    use crate::numerics::mat_exp;

    fn max_abs(m: &Matrix) -> f64 {
        m.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    #[test]
    fn identity_witness_gives_h() {
        let c = chamber_element(&[1.0, 0.0, -1.0]).unwrap();
        let x = orbit_point(&Matrix::identity(3, 3), &c).unwrap();
        assert_eq!(x.point(), c.h());
    }

    #[test]
    fn quarter_turn_negates_h_in_sl2() {
        let c = chamber_element(&[1.0, -1.0]).unwrap();
        let k = Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        let x = flag_point(&k, &c).unwrap();
        assert!(max_abs(&(x.point() + c.h())) < 1e-15);
    }

    #[test]
    fn unipotent_conjugate_in_sl2() {
        let c = chamber_element(&[1.0, -1.0]).unwrap();
        let g = mat_exp(&elementary(2, 0, 1));
        let x = orbit_point(&g, &c).unwrap();
        let expected = Matrix::from_row_slice(2, 2, &[1.0, -2.0, 0.0, -1.0]);
        assert!(max_abs(&(x.point() - expected)) < 1e-14);
    }

    #[test]
    fn flag_point_rejects_non_rotations() {
        let c = chamber_element(&[1.0, -1.0]).unwrap();
        let g = mat_exp(&elementary(2, 0, 1));
        assert!(matches!(
            flag_point(&g, &c),
            Err(Error::NotOrthogonal { .. })
        ));
        let reflection = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            flag_point(&reflection, &c),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn orbit_points_are_isospectral() {
        let c = chamber_element(&[2.0, 0.5, -1.0, -1.5]).unwrap();
        for seed in 0..10 {
            let g = Sampler::new(4, seed).group(0.5);
            let x = orbit_point(&g, &c).unwrap();
            assert!(x.spectral_defect() < 1e-9 * x.point().norm().max(1.0).powi(4));
            assert!(x.point().trace().abs() < 1e-10 * x.point().norm().max(1.0));
        }
    }

    #[test]
    fn projection_fixes_zero_section_and_kills_n() {
        let c = chamber_element(&[1.0, 0.0, -1.0]).unwrap();
        let mut s = Sampler::new(3, 4);
        let k = s.rotation();
        let x = flag_point(&k, &c).unwrap();
        let p = project_ruling(&x).unwrap();
        assert!(max_abs(&(p.point() - x.point())) < 1e-13);

        let n = mat_exp(&s.in_span(c.n_of_h(), 1.0));
        let y = orbit_point(&n, &c).unwrap();
        let p = project_ruling(&y).unwrap();
        assert!(max_abs(&(p.point() - c.h())) < 1e-13);
    }

    #[test]
    fn generator_examples() {
        let c = chamber_element(&[1.0, 0.0, -1.0]).unwrap();
        let x = orbit_point(&Matrix::identity(3, 3), &c).unwrap();
        let z = solve_generator(&x, &Matrix::zeros(3, 3)).unwrap();
        assert_eq!(max_abs(&z), 0.0);

        let v = bracket(&elementary(3, 0, 1), c.h());
        let z = solve_generator(&x, &v).unwrap();
        assert!(max_abs(&(bracket(&z, c.h()) - &v)) < 1e-12);
        // the difference from E₁₂ commutes with H
        assert!(max_abs(&bracket(&(z - elementary(3, 0, 1)), c.h())) < 1e-12);

        assert!(matches!(
            solve_generator(&x, c.h()),
            Err(Error::NotTangent { .. })
        ));
    }
}
