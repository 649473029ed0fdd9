use crate::error::Result;
use crate::iwasawa::{infinitesimal_from_factors, iwasawa, IwasawaFactors};
use crate::lie_model::{adjoint, adjoint_inverse, adjoint_orthogonal, bracket, ChamberElement};
use crate::numerics::{central_diff_matrix, singular_values, Matrix};
use crate::orbit::{generator_of, OrbitChart, OrbitPoint, TangentVector};

/// Values of a 2-form on all pairs of chart coordinate fields at the chart center.
#[derive(Debug, Clone, PartialEq)]
pub struct FormMatrix {
    entries: Matrix,
}

impl FormMatrix {
    /// Builds an antisymmetric matrix from its strict upper triangle.
    pub fn from_upper(dim: usize, upper: impl Fn(usize, usize) -> f64) -> Self {
        let mut entries = Matrix::zeros(dim, dim);
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = upper(i, j);
                entries[(i, j)] = v;
                entries[(j, i)] = -v;
            }
        }
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    /// Smallest singular value; zero for the empty form.
    pub fn sigma_min(&self) -> Result<f64> {
        Ok(singular_values(&self.entries)?
            .last()
            .copied()
            .unwrap_or(0.0))
    }
}

/// `ω_KKS(x)([Z_V, x], [Z_W, x]) = ⟨x, [Z_V, Z_W]⟩`.
pub fn kks(x: &OrbitPoint<'_>, v: &TangentVector, w: &TangentVector) -> Result<f64> {
    let zv = generator_of(x, v)?;
    let zw = generator_of(x, w)?;
    Ok(x.chamber().killing(x.point(), &bracket(&zv, &zw)))
}

/// Tautological 1-form transported to the orbit: the fiber covector of `x`
/// evaluated on the ruling projection of `V`.
///
/// With `V = [Z, x]` and `x = Ad(g)H` this is
/// `⟨x − pr(x), Ad(K(g))·K(Ad(g)⁻¹Z, g)⟩`.
pub fn tautological(x: &OrbitPoint<'_>, v: &TangentVector) -> Result<f64> {
    let z = generator_of(x, v)?;
    let factors = x.iwasawa()?;
    let body = adjoint_inverse(x.witness(), &z)?;
    Ok(tautological_body(x.chamber(), x.point(), &factors, &[body])?[0])
}

/// λ on several tangents at `x = Ad(g)H`, each given by its body generator
/// `Ad(g)⁻¹Z`, with the factorisation of `g` shared.
pub(crate) fn tautological_body(
    chamber: &ChamberElement,
    point: &Matrix,
    factors: &IwasawaFactors,
    bodies: &[Matrix],
) -> Result<Vec<f64>> {
    let k = &factors.k_factor;
    let fiber = point - adjoint_orthogonal(k, chamber.h());
    bodies
        .iter()
        .map(|body| {
            let d = infinitesimal_from_factors(chamber.model(), body, factors)?;
            Ok(chamber.killing(&fiber, &adjoint_orthogonal(k, &d.k_deriv)))
        })
        .collect()
}

/// `λⱼ(t)` for every coordinate field `j` at the chart point `t`.
fn chart_lambda(chart: &OrbitChart<'_>, t: &[f64]) -> Result<Matrix> {
    let chamber = chart.center().chamber();
    let witness = chart.witness_at(t);
    let factors = iwasawa(&witness)?;
    let point = adjoint(&witness, chamber.h())?;
    let bodies: Vec<Matrix> = (0..chart.dim())
        .map(|j| chart.body_velocity(t, j))
        .collect();
    let values = tautological_body(chamber, &point, &factors, &bodies)?;
    Ok(Matrix::from_column_slice(values.len(), 1, &values))
}

/// `ω_std = −dλ` at the chart center: `ωᵢⱼ = −(∂ᵢλⱼ − ∂ⱼλᵢ)`, derivatives by the
/// fourth-order central stencil with step `h`.
pub fn omega_std_chart(chart: &OrbitChart<'_>, h: f64) -> Result<FormMatrix> {
    let dim = chart.dim();
    // row i holds ∂ᵢλ
    let mut grad = Matrix::zeros(dim, dim);
    for i in 0..dim {
        let d = central_diff_matrix(
            |s| {
                let mut t = vec![0.0; dim];
                t[i] = s;
                chart_lambda(chart, &t)
            },
            0.0,
            h,
        )?;
        for j in 0..dim {
            grad[(i, j)] = d[(j, 0)];
        }
    }
    Ok(FormMatrix::from_upper(dim, |i, j| {
        -(grad[(i, j)] - grad[(j, i)])
    }))
}

/// KKS form on the coordinate fields at the chart center, evaluated as
/// `⟨x, [Ad(g)Xᵢ, Ad(g)Xⱼ]⟩`.
pub fn omega_kks_chart(chart: &OrbitChart<'_>) -> Result<FormMatrix> {
    kks_transported(chart, &vec![0.0; chart.dim()])
}

/// `⟨x(t), [Ad(g(t))Xᵢ, Ad(g(t))Xⱼ]⟩` at an arbitrary chart point.
pub fn kks_transported(chart: &OrbitChart<'_>, t: &[f64]) -> Result<FormMatrix> {
    let x = chart.point(t)?;
    let generators = (0..chart.dim())
        .map(|i| chart.translated_generator(t, i))
        .collect::<Result<Vec<_>>>()?;
    let killing = |a: &Matrix, b: &Matrix| x.chamber().killing(a, b);
    Ok(FormMatrix::from_upper(chart.dim(), |i, j| {
        killing(x.point(), &bracket(&generators[i], &generators[j]))
    }))
}

/// Largest scaled deviation of [`kks_transported`] from its value at the center,
/// over the points `±radius·eᵢ` and `radius·(1, …, 1)`.
pub fn kks_constancy_defect(chart: &OrbitChart<'_>, radius: f64) -> Result<f64> {
    let dim = chart.dim();
    let center = omega_kks_chart(chart)?;
    let mut grid: Vec<Vec<f64>> = Vec::new();
    for i in 0..dim {
        for sign in [-1.0, 1.0] {
            let mut t = vec![0.0; dim];
            t[i] = sign * radius;
            grid.push(t);
        }
    }
    if dim > 0 {
        grid.push(vec![radius; dim]);
    }
    let mut worst: f64 = 0.0;
    for t in &grid {
        let x = chart.point(t)?;
        let form = kks_transported(chart, t)?;
        let norms: Vec<f64> = (0..dim)
            .map(|i| chart.translated_generator(t, i).map(|m| m.norm()))
            .collect::<Result<_>>()?;
        for i in 0..dim {
            for j in (i + 1)..dim {
                let scale = (x.point().norm() * norms[i] * norms[j]).max(1.0);
                worst = worst.max((form.get(i, j) - center.get(i, j)).abs() / scale);
            }
        }
    }
    Ok(worst)
}
