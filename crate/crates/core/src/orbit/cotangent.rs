use super::{orbit_point, project_ruling, OrbitPoint};
use crate::error::{Error, Result};
use crate::lie_model::{adjoint_orthogonal, bracket, combine, span_coefficients, ChamberElement};
use crate::numerics::{mat_exp, solve_least_squares, Matrix, Vector};

/// Relative residual allowed when checking that a fiber lies in `Ad(k)n(H)`.
pub const FIBER_TOLERANCE: f64 = 1e-10;

const WITNESS_MAX_ITERATIONS: usize = 50;
const WITNESS_TOLERANCE: f64 = 1e-12;

/// A point of `T*Ad(K)H`: base `b = Ad(k)H` and a fiber `v ∈ Ad(k)n(H)`, read as
/// the covector `[W, b] ↦ ⟨v, W⟩` for `W ∈ Ad(k)k`.
#[derive(Debug, Clone)]
pub struct CotangentRep<'a> {
    base_witness: Matrix,
    base: Matrix,
    fiber: Matrix,
    coords: Vec<f64>,
    chamber: &'a ChamberElement,
}

impl<'a> CotangentRep<'a> {
    /// Checks that `Ad(k)⁻¹fiber` lies in n(H) and records its pairing coordinates.
    pub fn new(chamber: &'a ChamberElement, k: &Matrix, fiber: Matrix) -> Result<Self> {
        let base = super::flag_point(k, chamber)?.point().clone();
        let pulled = adjoint_orthogonal(&k.transpose(), &fiber);
        let (_, residual) = span_coefficients(chamber.n_of_h(), &pulled)?;
        if residual > FIBER_TOLERANCE * fiber.norm().max(1.0) {
            return Err(Error::FiberResidual { residual });
        }
        let coords = chamber
            .m_of_h()
            .iter()
            .map(|e| chamber.killing(&fiber, &adjoint_orthogonal(k, e)))
            .collect();
        Ok(Self {
            base_witness: k.clone(),
            base,
            fiber,
            coords,
            chamber,
        })
    }

    /// The covector over `Ad(k)H` whose pairings with the conjugated m(H)-basis are
    /// `coords`.
    pub fn from_coords(chamber: &'a ChamberElement, k: &Matrix, coords: &[f64]) -> Result<Self> {
        if coords.len() != chamber.m_of_h().len() {
            return Err(Error::Dimension(format!(
                "{} coordinates for a {}-dimensional fiber",
                coords.len(),
                chamber.m_of_h().len()
            )));
        }
        let pairing = chamber.pairing_matrix();
        let rhs = Vector::from_column_slice(coords);
        let c =
            solve_least_squares(&pairing.transpose(), &rhs)?.exact(1e-10 * rhs.norm().max(1.0))?;
        let u = combine(chamber.n_of_h(), c.as_slice(), chamber.n());
        Self::new(chamber, k, adjoint_orthogonal(k, &u))
    }

    pub fn base_witness(&self) -> &Matrix {
        &self.base_witness
    }

    pub fn base(&self) -> &Matrix {
        &self.base
    }

    pub fn fiber(&self) -> &Matrix {
        &self.fiber
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// `⟨v, W⟩`; the value of the covector on the flag tangent `[W, b]`.
    pub fn covector(&self, w: &Matrix) -> f64 {
        self.chamber.killing(&self.fiber, w)
    }

    /// Evaluates the covector on a flag tangent vector given only as a matrix, by
    /// solving `[Ad(k)M, b] = tangent` for `M ∈ m(H)`.
    pub fn covector_on_tangent(&self, tangent: &Matrix) -> Result<f64> {
        let k = &self.base_witness;
        let conjugated: Vec<Matrix> = self
            .chamber
            .m_of_h()
            .iter()
            .map(|e| adjoint_orthogonal(k, e))
            .collect();
        let images: Vec<Matrix> = conjugated.iter().map(|w| bracket(w, &self.base)).collect();
        let (c, residual) = span_coefficients(&images, tangent)?;
        if residual > super::GENERATOR_TOLERANCE * tangent.norm().max(1.0) {
            return Err(Error::NotTangent { residual });
        }
        Ok(self.covector(&combine(&conjugated, &c, self.chamber.n())))
    }
}

/// `i⁻¹`: base point from the ruling projection, fiber the displacement to it.
pub fn to_cotangent<'a>(x: &OrbitPoint<'a>) -> Result<CotangentRep<'a>> {
    let base = project_ruling(x)?;
    let fiber = x.point() - base.point();
    let scale = x.point().norm().max(1.0);
    let pulled = adjoint_orthogonal(&base.witness().transpose(), &fiber);
    let (_, residual) = span_coefficients(x.chamber().n_of_h(), &pulled)?;
    if residual > FIBER_TOLERANCE * scale {
        return Err(Error::FiberResidual { residual });
    }
    let chamber = x.chamber();
    let k = base.witness().clone();
    let coords = chamber
        .m_of_h()
        .iter()
        .map(|e| chamber.killing(&fiber, &adjoint_orthogonal(&k, e)))
        .collect();
    Ok(CotangentRep {
        base_witness: k,
        base: base.point().clone(),
        fiber,
        coords,
        chamber,
    })
}

/// `i`: the orbit point `b + v`, with witness `k·exp(Y)` where `Y ∈ n(H)` solves
/// `Ad(exp Y)H = H + Ad(k)⁻¹v`.
///
/// The iteration freezes the Jacobian at its linear part `Y ↦ [Y, H]`. The
/// nonlinear remainder raises root height, so each pass fixes one more height and
/// the loop terminates after at most n − 1 corrections in exact arithmetic.
pub fn from_cotangent<'a>(rep: &CotangentRep<'a>) -> Result<OrbitPoint<'a>> {
    let chamber = rep.chamber;
    let n = chamber.n();
    let h = chamber.h();
    let k = &rep.base_witness;
    let target = adjoint_orthogonal(&k.transpose(), &rep.fiber);
    let linear: Vec<Matrix> = chamber.n_of_h().iter().map(|y| bracket(y, h)).collect();
    let tolerance = WITNESS_TOLERANCE * target.norm().max(1.0);

    let mut coefficients = vec![0.0; linear.len()];
    let mut residual = f64::INFINITY;
    for _ in 0..WITNESS_MAX_ITERATIONS {
        let nil = mat_exp(&combine(chamber.n_of_h(), &coefficients, n));
        let nil_inv = mat_exp(&-combine(chamber.n_of_h(), &coefficients, n));
        let defect = &target - (&nil * h * &nil_inv - h);
        residual = defect.norm();
        if residual <= tolerance {
            return orbit_point(&(k * nil), chamber);
        }
        let (step, _) = span_coefficients(&linear, &defect)?;
        for (c, d) in coefficients.iter_mut().zip(step) {
            *c += d;
        }
    }
    Err(Error::NoNilpotentWitness {
        iterations: WITNESS_MAX_ITERATIONS,
        residual,
    })
}
