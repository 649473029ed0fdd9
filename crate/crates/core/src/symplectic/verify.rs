//! Sample-level checks for the Lagrangian, graph and main-equality statements, and
//! the report-producing wrappers around them.

use serde::{Deserialize, Serialize};

use super::forms::{kks_constancy_defect, omega_kks_chart, omega_std_chart, FormMatrix};
use super::potential::{alpha_form, alpha_via_covector, minus_d_potential, potential_F};
use super::report::{scaled, Measurement, ReportMeta, Tolerances, VerificationReport};
use crate::error::Result;
use crate::iwasawa::{an_adjoint, infinitesimal_from_factors, iwasawa};
use crate::lie_model::{adjoint, bracket, combine, ChamberElement, Sampler};
use crate::numerics::{mat_exp, Matrix};
use crate::orbit::{default_chart, orbit_chart, orbit_point, split_chart, OrbitChart};

/// Radius of the t-grid on which the transported KKS matrix must stay constant.
pub const CONSTANCY_RADIUS: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LagrangianMode {
    /// Tangent spaces of the ruling fibers.
    Vertical,
    /// Tangent spaces of the translated flag manifold `Ad(g)Ad(K)H`.
    Horizontal,
}

/// Largest scaled `|ω_std − ω_KKS|` over the chart entries.
fn form_discrepancy(chart: &OrbitChart<'_>, std: &FormMatrix, kks: &FormMatrix) -> Result<f64> {
    let x = chart.center().point().norm();
    let norms: Vec<f64> = (0..chart.dim())
        .map(|i| {
            chart
                .translated_generator(&vec![0.0; chart.dim()], i)
                .map(|m| m.norm())
        })
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..chart.dim() {
        for j in (i + 1)..chart.dim() {
            let err = (std.get(i, j) - kks.get(i, j)).abs();
            worst = worst.max(scaled(err, x * norms[i] * norms[j]));
        }
    }
    Ok(worst)
}

/// Largest scaled `|ω(∂ᵢ, ∂ⱼ)|` over a diagonal block `[lo, hi)` of a chart form.
fn block_magnitude(chart: &OrbitChart<'_>, form: &FormMatrix, lo: usize, hi: usize) -> Result<f64> {
    let x = chart.center().point().norm();
    let zero = vec![0.0; chart.dim()];
    let mut worst: f64 = 0.0;
    for i in lo..hi {
        let ni = chart.translated_generator(&zero, i)?.norm();
        for j in (i + 1)..hi {
            let nj = chart.translated_generator(&zero, j)?.norm();
            worst = worst.max(scaled(form.get(i, j).abs(), x * ni * nj));
        }
    }
    Ok(worst)
}

/// Largest scaled `|⟨x, [Zᵢ, Zⱼ]⟩|` over pairs of generators.
fn kks_pair_magnitude(chamber: &ChamberElement, x: &Matrix, generators: &[Matrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, zi) in generators.iter().enumerate() {
        for zj in &generators[i + 1..] {
            let value = chamber.killing(x, &bracket(zi, zj));
            worst = worst.max(scaled(value.abs(), x.norm() * zi.norm() * zj.norm()));
        }
    }
    worst
}

/// Vertical or horizontal Lagrangian checks at `x = Ad(w)H`: exact KKS vanishing
/// on generator pairs and the matching diagonal block of `ω_std` in the
/// m(H) ⊕ n(H) chart.
pub fn lagrangian_sample(
    chamber: &ChamberElement,
    witness: &Matrix,
    mode: LagrangianMode,
    fd_step: f64,
    tol: &Tolerances,
) -> Result<Vec<Measurement>> {
    let x = orbit_point(witness, chamber)?;
    let body: &[Matrix] = match mode {
        LagrangianMode::Vertical => chamber.n_of_h(),
        LagrangianMode::Horizontal => chamber.model().k_basis(),
    };
    let generators = body
        .iter()
        .map(|b| adjoint(witness, b))
        .collect::<Result<Vec<_>>>()?;
    let kks_value = kks_pair_magnitude(chamber, x.point(), &generators);

    let chart = split_chart(&x)?.normalized()?;
    let form = omega_std_chart(&chart, fd_step)?;
    let m = chamber.m_of_h().len();
    let (lo, hi) = match mode {
        LagrangianMode::Horizontal => (0, m),
        LagrangianMode::Vertical => (m, 2 * m),
    };
    let std_value = block_magnitude(&chart, &form, lo, hi)?;

    let (kks_name, std_name) = match mode {
        LagrangianMode::Vertical => ("kks_vertical_pairs", "omega_std_vertical_block"),
        LagrangianMode::Horizontal => ("kks_horizontal_pairs", "omega_std_horizontal_block"),
    };
    Ok(vec![
        Measurement::upper(kks_name, kks_value, tol.strict),
        Measurement::upper(std_name, std_value, tol.fd),
    ])
}

/// The three routes to `α_{g,H}` at the flag point `K(gk)`: closed form through
/// `A(X, gk)`, the fiber covector of `Ad(gk)H`, and `−dF_{g,H}` by finite
/// differences; directions run over m(H) and z_K(H). Also checks that `F_{g,H}`
/// is invariant under right multiplication by `exp(z_K(H))`.
pub fn graph_sample(
    chamber: &ChamberElement,
    g: &Matrix,
    k: &Matrix,
    sampler: &mut Sampler,
    fd_step: f64,
    tol: &Tolerances,
) -> Result<Vec<Measurement>> {
    let x_norm = adjoint(&(g * k), chamber.h())?.norm();
    let mut exact_gap: f64 = 0.0;
    let mut alpha_fd_gap: f64 = 0.0;
    let mut covector_fd_gap: f64 = 0.0;
    for dir in chamber.m_of_h().iter().chain(chamber.z_k_of_h()) {
        let a = alpha_form(chamber, g, k, dir)?;
        let b = alpha_via_covector(chamber, g, k, dir)?;
        let c = minus_d_potential(chamber, g, k, dir, fd_step)?;
        let scale = x_norm * dir.norm();
        exact_gap = exact_gap.max(scaled((a - b).abs(), scale));
        alpha_fd_gap = alpha_fd_gap.max(scaled((a - c).abs(), scale));
        covector_fd_gap = covector_fd_gap.max(scaled((b - c).abs(), scale));
    }
    let mut out = vec![
        Measurement::upper("alpha_vs_covector", exact_gap, tol.exact),
        Measurement::upper("alpha_vs_minus_dF", alpha_fd_gap, tol.fd),
        Measurement::upper("covector_vs_minus_dF", covector_fd_gap, tol.fd),
    ];
    if !chamber.z_k_of_h().is_empty() {
        let z = mat_exp(&sampler.in_span(chamber.z_k_of_h(), std::f64::consts::PI));
        let f = potential_F(chamber, g, k)?;
        let fz = potential_F(chamber, g, &(k * z))?;
        out.push(Measurement::upper(
            "potential_descends",
            scaled((f - fz).abs(), f.abs()),
            tol.exact,
        ));
    }
    Ok(out)
}

/// Main equality at `x = Ad(g)H`: `ω_std` against `ω_KKS` in the default chart and in
/// a randomly mixed chart, constancy of the transported KKS matrix, its
/// nondegeneracy, and the closed-form mixed-pair identity for `X ∈ k`,
/// `Y ∈ n(H)`.
pub fn theorem_sample(
    chamber: &ChamberElement,
    g: &Matrix,
    sampler: &mut Sampler,
    fd_step: f64,
    tol: &Tolerances,
) -> Result<Vec<Measurement>> {
    let x = orbit_point(g, chamber)?;
    let chart = default_chart(&x)?.normalized()?;
    let std = omega_std_chart(&chart, fd_step)?;
    let kks = omega_kks_chart(&chart)?;
    let mut out = vec![Measurement::upper(
        "omega_std_vs_kks",
        form_discrepancy(&chart, &std, &kks)?,
        tol.fd,
    )];

    let dim = chart.dim();
    if dim > 0 {
        let mixed: Vec<Matrix> = (0..dim)
            .map(|i| {
                let weights: Vec<f64> = (0..dim)
                    .map(|j| f64::from(u8::from(i == j)) + 0.3 * sampler.unit())
                    .collect();
                combine(chart.directions(), &weights, chamber.n())
            })
            .collect();
        // a singular mixing matrix is astronomically unlikely; fall back to m(H) ⊕ n(H)
        let second = match orbit_chart(&x, mixed) {
            Ok(c) => c,
            Err(_) => split_chart(&x)?,
        }
        .normalized()?;
        let std2 = omega_std_chart(&second, fd_step)?;
        let kks2 = omega_kks_chart(&second)?;
        out.push(Measurement::upper(
            "omega_std_vs_kks_mixed_chart",
            form_discrepancy(&second, &std2, &kks2)?,
            tol.fd,
        ));
        out.push(Measurement::upper(
            "kks_constancy",
            kks_constancy_defect(&chart, CONSTANCY_RADIUS)?,
            tol.exact,
        ));
        out.push(Measurement::lower(
            "kks_sigma_min",
            kks.sigma_min()?,
            tol.nondegeneracy,
        ));
    }

    let factors = iwasawa(g)?;
    let h_an = an_adjoint(chamber.h(), &factors)?;
    let mut mixed_gap: f64 = 0.0;
    for xk in chamber.model().k_basis() {
        let kd = infinitesimal_from_factors(chamber.model(), xk, &factors)?.k_deriv;
        for y in chamber.n_of_h() {
            let y_an = an_adjoint(y, &factors)?;
            let lhs = chamber.killing(&bracket(&y_an, &h_an), &kd);
            let rhs = chamber.killing(&bracket(y, chamber.h()), xk);
            let kks_form = chamber.killing(chamber.h(), &bracket(xk, y));
            let scale = y_an.norm() * h_an.norm() * kd.norm();
            mixed_gap = mixed_gap
                .max(scaled((lhs - rhs).abs(), scale))
                .max(scaled((rhs - kks_form).abs(), scale));
        }
    }
    out.push(Measurement::upper(
        "mixed_pair_closed_form",
        mixed_gap,
        tol.strict,
    ));
    Ok(out)
}

fn meta(chamber: &ChamberElement, suite: &str, seed: u64, fd_step: f64) -> ReportMeta {
    ReportMeta {
        suite: suite.to_string(),
        h: chamber.entries().to_vec(),
        seed,
        fd_step,
    }
}

fn flag_sample(n: usize, seed: u64, index: usize) -> (Matrix, Sampler) {
    let mut sampler = Sampler::for_sample(n, seed, index as u64);
    let k = if index == 0 {
        Matrix::identity(n, n)
    } else {
        sampler.rotation()
    };
    (k, sampler)
}

/// Graph check for a fixed `g`, sampling `k` (the identity first, then random rotations).
pub fn verify_graph(
    chamber: &ChamberElement,
    g: &Matrix,
    samples: usize,
    seed: u64,
    fd_step: f64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let n = chamber.n();
    let outcomes = (0..samples)
        .map(|s| {
            let (k, mut sampler) = flag_sample(n, seed, s);
            graph_sample(chamber, g, &k, &mut sampler, fd_step, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::assemble(
        meta(chamber, "graph", seed, fd_step),
        tol.fd,
        outcomes,
    ))
}

/// Lagrangian check for a fixed `g` at the points `Ad(g·k)H`.
pub fn verify_lagrangian(
    chamber: &ChamberElement,
    g: &Matrix,
    mode: LagrangianMode,
    samples: usize,
    seed: u64,
    fd_step: f64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let n = chamber.n();
    let outcomes = (0..samples)
        .map(|s| {
            let (k, _) = flag_sample(n, seed, s);
            lagrangian_sample(chamber, &(g * k), mode, fd_step, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    let suite = match mode {
        LagrangianMode::Vertical => "lagrangian-vertical",
        LagrangianMode::Horizontal => "lagrangian-horizontal",
    };
    Ok(VerificationReport::assemble(
        meta(chamber, suite, seed, fd_step),
        tol.fd,
        outcomes,
    ))
}

/// Main equality at the single point `Ad(g)H`.
pub fn verify_theorem(
    chamber: &ChamberElement,
    g: &Matrix,
    seed: u64,
    fd_step: f64,
    tol: &Tolerances,
) -> Result<VerificationReport> {
    let mut sampler = Sampler::new(chamber.n(), seed);
    let outcome = theorem_sample(chamber, g, &mut sampler, fd_step, tol)?;
    Ok(VerificationReport::assemble(
        meta(chamber, "theorem", seed, fd_step),
        tol.fd,
        vec![outcome],
    ))
}
