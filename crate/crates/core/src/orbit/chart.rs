use super::{orbit_point, OrbitPoint, TangentVector};
use crate::error::{Error, Result};
use crate::lie_model::{adjoint, bracket, combine};
use crate::numerics::{mat_exp, numerical_rank, Matrix};

const RANK_CUTOFF: f64 = 1e-10;
const DEXP_MAX_TERMS: usize = 40;

/// The chart `t ↦ Ad(g·exp(Σ tᵢXᵢ))H` around `x = Ad(g)H`.
///
/// Coordinate fields are the pushforwards of `∂/∂tᵢ`, so they commute. Their
/// generators involve the derivative of the exponential map and reduce to
/// `Ad(g)Xᵢ` only at `t = 0`.
#[derive(Debug, Clone)]
pub struct OrbitChart<'a> {
    center: OrbitPoint<'a>,
    directions: Vec<Matrix>,
}

/// Chart with explicit directions; they must be independent modulo z(H).
pub fn orbit_chart<'a>(x: &OrbitPoint<'a>, directions: Vec<Matrix>) -> Result<OrbitChart<'a>> {
    let chamber = x.chamber();
    let n = chamber.n();
    let count = directions.len();
    if count > 0 {
        let images = Matrix::from_fn(n * n, count, |r, c| {
            bracket(&directions[c], chamber.h()).as_slice()[r]
        });
        let rank = numerical_rank(&images, RANK_CUTOFF)?;
        if rank < count {
            return Err(Error::DegenerateChart { rank, count });
        }
    }
    Ok(OrbitChart {
        center: x.clone(),
        directions,
    })
}

/// Directions θn(H) ⊕ n(H), in that order.
pub fn default_chart<'a>(x: &OrbitPoint<'a>) -> Result<OrbitChart<'a>> {
    let c = x.chamber();
    let directions = c.theta_n_of_h().iter().chain(c.n_of_h()).cloned().collect();
    orbit_chart(x, directions)
}

/// Directions m(H) ⊕ n(H): horizontal (flag) block first, then vertical.
pub fn split_chart<'a>(x: &OrbitPoint<'a>) -> Result<OrbitChart<'a>> {
    let c = x.chamber();
    let directions = c.m_of_h().iter().chain(c.n_of_h()).cloned().collect();
    orbit_chart(x, directions)
}

impl<'a> OrbitChart<'a> {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn center(&self) -> &OrbitPoint<'a> {
        &self.center
    }

    pub fn directions(&self) -> &[Matrix] {
        &self.directions
    }

    /// Rescales every direction so that `Ad(g)Xᵢ` has unit Frobenius norm, which
    /// makes a coordinate step of size `h` comparable across witnesses.
    pub fn normalized(mut self) -> Result<Self> {
        let g = self.center.witness().clone();
        for d in &mut self.directions {
            let size = adjoint(&g, d)?.norm();
            if size > 0.0 {
                *d /= size;
            }
        }
        Ok(self)
    }

    fn exponent(&self, t: &[f64]) -> Matrix {
        combine(&self.directions, t, self.center.chamber().n())
    }

    /// `g·exp(Σ tᵢXᵢ)`.
    pub fn witness_at(&self, t: &[f64]) -> Matrix {
        self.center.witness() * mat_exp(&self.exponent(t))
    }

    pub fn point(&self, t: &[f64]) -> Result<OrbitPoint<'a>> {
        orbit_point(&self.witness_at(t), self.center.chamber())
    }

    /// Body-frame velocity `W = ((1 − e^{−ad S})/ad S)Xᵢ` with `S = Σ tⱼXⱼ`, so that
    /// `∂ᵢ[g·exp(S)] = g·exp(S)·W`.
    pub fn body_velocity(&self, t: &[f64], i: usize) -> Matrix {
        let s = self.exponent(t);
        let mut term = self.directions[i].clone();
        let mut acc = term.clone();
        let floor = 1e-18 * term.norm().max(f64::MIN_POSITIVE);
        for k in 1..DEXP_MAX_TERMS {
            term = -bracket(&s, &term) / (k as f64 + 1.0);
            acc += &term;
            if term.norm() <= floor {
                break;
            }
        }
        acc
    }

    /// Ambient generator of the coordinate field `∂ᵢ` at `t`.
    pub fn velocity_generator(&self, t: &[f64], i: usize) -> Result<Matrix> {
        adjoint(&self.witness_at(t), &self.body_velocity(t, i))
    }

    pub fn velocity(&self, t: &[f64], i: usize) -> Result<TangentVector> {
        let x = self.point(t)?;
        Ok(x.tangent(&self.velocity_generator(t, i)?))
    }

    /// `Ad(g(t))Xᵢ`, the direction transported by the chart witness.
    pub fn translated_generator(&self, t: &[f64], i: usize) -> Result<Matrix> {
        adjoint(&self.witness_at(t), &self.directions[i])
    }
}
