//! The Iwasawa potential `F_{g,H}(k) = ⟨H, H(gk)⟩` and the 1-form whose graph is
//! the translated flag manifold `Ad(g)Ad(K)H`.

use crate::error::Result;
use crate::iwasawa::{infinitesimal_from_factors, infinitesimal_iwasawa, iwasawa};
use crate::lie_model::{adjoint_orthogonal, bracket, ChamberElement};
use crate::numerics::{central_diff, mat_exp, Matrix};
use crate::orbit::{orbit_point, to_cotangent};

#[allow(non_snake_case)]
pub fn potential_F(chamber: &ChamberElement, g: &Matrix, k: &Matrix) -> Result<f64> {
    let f = iwasawa(&(g * k))?;
    Ok(chamber.killing(chamber.h(), &f.h_projection))
}

/// `α_{g,H}` on the flag tangent `L_{K(gk)*}K(X, gk)`: `−⟨H, A(X, gk)⟩`.
pub fn alpha_form(chamber: &ChamberElement, g: &Matrix, k: &Matrix, x: &Matrix) -> Result<f64> {
    let d = infinitesimal_iwasawa(chamber.model(), x, &(g * k))?;
    Ok(-chamber.killing(chamber.h(), &d.a_deriv))
}

/// The same quantity through the identification: the fiber covector of
/// `Ad(gk)H` evaluated on the flag tangent `[Ad(K(gk))K(X, gk), pr(Ad(gk)H)]`.
pub fn alpha_via_covector(
    chamber: &ChamberElement,
    g: &Matrix,
    k: &Matrix,
    x: &Matrix,
) -> Result<f64> {
    let gk = g * k;
    let point = orbit_point(&gk, chamber)?;
    let rep = to_cotangent(&point)?;
    let factors = iwasawa(&gk)?;
    let d = infinitesimal_from_factors(chamber.model(), x, &factors)?;
    let w = adjoint_orthogonal(&factors.k_factor, &d.k_deriv);
    rep.covector_on_tangent(&bracket(&w, rep.base()))
}

/// `−d/dt F_{g,H}(k·exp(tX))` at `t = 0` by central differences.
pub fn minus_d_potential(
    chamber: &ChamberElement,
    g: &Matrix,
    k: &Matrix,
    x: &Matrix,
    h: f64,
) -> Result<f64> {
    // central_diff takes an infallible closure; surface the first failure afterwards
    let failure = std::cell::RefCell::new(None);
    let value = central_diff(
        |t| match potential_F(chamber, g, &(k * mat_exp(&(x * t)))) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        h,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(-value),
    }
}
