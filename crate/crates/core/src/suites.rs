//! Named verification suites over seeded samples, as run by the command line.
//!
//! Sample `i` draws everything from its own ChaCha stream `(seed, i)` and the
//! witness schedule is fixed (identity, an element of A, then products of three
//! exponentials), so reports are identical for a fixed seed no matter how the
//! samples are scheduled across threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::iwasawa::{
    fd_iwasawa_derivatives, infinitesimal_from_factors, iwasawa, DEFAULT_FD_STEP,
};
use crate::lie_model::{adjoint_orthogonal, span_coefficients, ChamberElement, Sampler};
use crate::numerics::{mat_exp, singular_values, Matrix};
use crate::orbit::{from_cotangent, orbit_point, project_ruling, to_cotangent, CotangentRep};
use crate::symplectic::{
    graph_sample, lagrangian_sample, scaled, theorem_sample, LagrangianMode, Measurement,
    ReportMeta, Tolerances, VerificationReport,
};

/// Entry scale of the random algebra elements behind sampled witnesses.
pub const DEFAULT_SAMPLE_SCALE: f64 = 0.5;
pub const DEFAULT_SAMPLES: usize = 50;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Iwasawa,
    Infinitesimal,
    Projection,
    LagrangianVertical,
    LagrangianHorizontal,
    Graph,
    Theorem,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Iwasawa,
        Suite::Infinitesimal,
        Suite::Projection,
        Suite::LagrangianVertical,
        Suite::LagrangianHorizontal,
        Suite::Graph,
        Suite::Theorem,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Iwasawa => "iwasawa",
            Suite::Infinitesimal => "infinitesimal",
            Suite::Projection => "projection",
            Suite::LagrangianVertical => "lagrangian-vertical",
            Suite::LagrangianHorizontal => "lagrangian-horizontal",
            Suite::Graph => "graph",
            Suite::Theorem => "theorem",
            Suite::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Suite> {
        match self {
            Suite::All => Suite::EACH.to_vec(),
            one => vec![one],
        }
    }

    /// Threshold the suite's `max_error` is reported against.
    pub fn primary_tolerance(self, tol: &Tolerances) -> f64 {
        match self {
            Suite::Iwasawa => tol.identity,
            Suite::Infinitesimal => tol.iwasawa_fd,
            Suite::Projection => tol.exact,
            _ => tol.fd,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub samples: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub tolerances: Tolerances,
    pub scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            fd_step: DEFAULT_FD_STEP,
            tolerances: Tolerances::default(),
            scale: DEFAULT_SAMPLE_SCALE,
        }
    }
}

fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// KAN reconstruction, factor shapes, and recovery of known factors.
pub fn iwasawa_sample(n: usize, index: usize, config: &SuiteConfig) -> Result<Vec<Measurement>> {
    let tol = &config.tolerances;
    let mut s = Sampler::for_sample(n, config.seed, index as u64);
    let g = s.scheduled_witness(index, config.scale);
    let f = iwasawa(&g)?;
    let reconstruction = scaled((&g - f.reconstruct()).norm(), g.norm());

    let identity = Matrix::identity(n, n);
    let orthogonality = (f.k_factor.transpose() * &f.k_factor - &identity).norm();
    let mut shape = (f.k_factor.determinant() - 1.0).abs();
    let mut a_min = f64::INFINITY;
    for i in 0..n {
        a_min = a_min.min(f.a_factor[(i, i)]);
        shape = shape.max((f.n_factor[(i, i)] - 1.0).abs());
        for j in 0..n {
            if i != j {
                shape = shape.max(f.a_factor[(i, j)].abs());
            }
            if i > j {
                shape = shape.max(f.n_factor[(i, j)].abs());
            }
        }
    }
    let trace = f.h_projection.trace().abs();

    // iwasawa(k·a·n) must return (k, a, n)
    let k = s.rotation();
    let a = s.torus(2.0 * config.scale);
    let nil = mat_exp(&s.in_span(&upper_basis(n), 2.0 * config.scale));
    let product = &k * &a * &nil;
    let back = iwasawa(&product)?;
    let roundtrip = [
        max_abs(&(&back.k_factor - &k)),
        scaled(max_abs(&(&back.a_factor - &a)), max_abs(&a)),
        scaled(max_abs(&(&back.n_factor - &nil)), max_abs(&nil)),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let roundtrip = scaled(roundtrip, product.norm());

    Ok(vec![
        Measurement::upper("reconstruction", reconstruction, tol.identity),
        Measurement::upper("k_orthogonality", orthogonality, tol.identity),
        Measurement::upper("factor_shapes", shape, tol.identity),
        Measurement::lower("a_diagonal_min", a_min, 0.0),
        Measurement::upper(
            "h_projection_trace",
            scaled(trace, f.h_projection.norm()),
            tol.identity,
        ),
        Measurement::upper("kan_roundtrip", roundtrip, tol.identity),
    ])
}

fn upper_basis(n: usize) -> Vec<Matrix> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(crate::lie_model::elementary(n, i, j));
        }
    }
    out
}

/// Closed-form infinitesimal Iwasawa data against the finite-difference oracle and
/// the recombination identity.
pub fn infinitesimal_sample(
    chamber: &ChamberElement,
    index: usize,
    config: &SuiteConfig,
) -> Result<Vec<Measurement>> {
    let tol = &config.tolerances;
    let n = chamber.n();
    let model = chamber.model();
    let mut s = Sampler::for_sample(n, config.seed, index as u64);
    let g = s.scheduled_witness(index, config.scale);
    let x = s.algebra(1.0);

    let factors = iwasawa(&g)?;
    let exact = infinitesimal_from_factors(model, &x, &factors)?;
    let lhs = crate::iwasawa::an_adjoint(&x, &factors)?;
    let identity_defect = scaled((&lhs - exact.recombine(&factors)?).norm(), lhs.norm());

    // the derivatives are linear in X: difference along the unit-speed curve
    // exp(t·Ad(g)X̂)·g and scale back
    let speed = crate::lie_model::adjoint(&g, &x)?
        .norm()
        .max(f64::MIN_POSITIVE);
    let mut fd = fd_iwasawa_derivatives(&(&x / speed), &g, config.fd_step)?;
    fd.k_deriv *= speed;
    fd.a_deriv *= speed;
    fd.n_deriv *= speed;
    let fd_scale = x.norm() * g.norm();
    let fd_defect = [
        max_abs(&(&exact.k_deriv - &fd.k_deriv)),
        max_abs(&(&exact.a_deriv - &fd.a_deriv)),
        max_abs(&(&exact.n_deriv - &fd.n_deriv)),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    // only AN(g) matters
    let stripped = factors.k_factor.transpose() * &g;
    let other = infinitesimal_from_factors(model, &x, &iwasawa(&stripped)?)?;
    let an_only = [
        max_abs(&(&exact.k_deriv - &other.k_deriv)),
        max_abs(&(&exact.a_deriv - &other.a_deriv)),
        max_abs(&(&exact.n_deriv - &other.n_deriv)),
    ]
    .into_iter()
    .fold(0.0, f64::max);

    Ok(vec![
        Measurement::upper("fd_oracle", scaled(fd_defect, fd_scale), tol.iwasawa_fd),
        Measurement::upper("decomposition_identity", identity_defect, tol.identity),
        Measurement::upper("an_dependence", scaled(an_only, lhs.norm()), tol.identity),
    ])
}

/// Ruling projection, the identification and its inverse, and the pairing.
pub fn projection_sample(
    chamber: &ChamberElement,
    index: usize,
    config: &SuiteConfig,
) -> Result<Vec<Measurement>> {
    let tol = &config.tolerances;
    let n = chamber.n();
    let mut s = Sampler::for_sample(n, config.seed, index as u64);
    let g = s.scheduled_witness(index, config.scale);
    let x = orbit_point(&g, chamber)?;
    let x_norm = x.point().norm();
    let pr = project_ruling(&x)?;

    // witness changes by the centralizer and by its compact part
    let z = mat_exp(&s.in_span(chamber.z_of_h(), config.scale));
    let zk = mat_exp(&s.in_span(chamber.z_k_of_h(), std::f64::consts::PI));
    let mut well_defined: f64 = 0.0;
    for w in [&g * &z, &g * &zk] {
        let other = project_ruling(&orbit_point(&w, chamber)?)?;
        well_defined = well_defined.max(scaled(
            max_abs(&(other.point() - pr.point())),
            chamber.h().norm(),
        ));
    }

    let displacement = x.point() - pr.point();
    let pulled = adjoint_orthogonal(&pr.witness().transpose(), &displacement);
    let (_, residual) = span_coefficients(chamber.n_of_h(), &pulled)?;

    let rep = to_cotangent(&x)?;
    let back = from_cotangent(&rep)?;
    let i_after_inverse = scaled(max_abs(&(back.point() - x.point())), x_norm);

    // start from the bundle side: random base and coordinates
    let k = s.rotation();
    let dim = chamber.m_of_h().len();
    let c1: Vec<f64> = (0..dim).map(|_| 3.0 * s.unit()).collect();
    let c2: Vec<f64> = (0..dim).map(|_| 3.0 * s.unit()).collect();
    let rep1 = CotangentRep::from_coords(chamber, &k, &c1)?;
    let there = from_cotangent(&rep1)?;
    let again = to_cotangent(&there)?;
    let coord_scale = c1.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut inverse_after_i = scaled(max_abs(&(again.base() - rep1.base())), chamber.h().norm())
        .max(scaled(
            max_abs(&(again.fiber() - rep1.fiber())),
            there.point().norm(),
        ));
    for (a, b) in again.coords().iter().zip(&c1) {
        inverse_after_i = inverse_after_i.max(scaled((a - b).abs(), coord_scale));
    }

    // coordinates add along a fiber
    let rep2 = CotangentRep::from_coords(chamber, &k, &c2)?;
    let sum = CotangentRep::new(chamber, &k, rep1.fiber() + rep2.fiber())?;
    let sum_back = to_cotangent(&from_cotangent(&sum)?)?;
    let mut linearity = scaled(
        max_abs(&(sum_back.base() - rep1.base())),
        chamber.h().norm(),
    );
    for ((a, b), c) in sum_back.coords().iter().zip(&c1).zip(&c2) {
        let s = b + c;
        linearity = linearity.max(scaled((a - s).abs(), s.abs()));
    }

    let spectral = scaled(x.spectral_defect(), x_norm.max(1.0).powi(n as i32));

    let mut out = vec![
        Measurement::upper("projection_well_defined", well_defined, tol.exact),
        Measurement::upper("fiber_residual", scaled(residual, x_norm), tol.strict),
        Measurement::upper("i_after_inverse", i_after_inverse, tol.exact),
        Measurement::upper("inverse_after_i", inverse_after_i, tol.exact),
        Measurement::upper("fiber_linearity", linearity, tol.exact),
        Measurement::upper("isospectral", spectral, tol.exact),
    ];
    if dim > 0 {
        let sigma = singular_values(&chamber.pairing_matrix())?
            .last()
            .copied()
            .unwrap_or(0.0);
        out.push(Measurement::lower(
            "pairing_sigma_min",
            sigma,
            tol.nondegeneracy,
        ));
    }
    Ok(out)
}

fn sample_measurements(
    chamber: &ChamberElement,
    suite: Suite,
    index: usize,
    config: &SuiteConfig,
) -> Result<Vec<Measurement>> {
    let n = chamber.n();
    let tol = &config.tolerances;
    match suite {
        Suite::Iwasawa => iwasawa_sample(n, index, config),
        Suite::Infinitesimal => infinitesimal_sample(chamber, index, config),
        Suite::Projection => projection_sample(chamber, index, config),
        Suite::LagrangianVertical | Suite::LagrangianHorizontal => {
            let mut s = Sampler::for_sample(n, config.seed, index as u64);
            let g = s.scheduled_witness(index, config.scale);
            let k = if index == 0 {
                Matrix::identity(n, n)
            } else {
                s.rotation()
            };
            let mode = if suite == Suite::LagrangianVertical {
                LagrangianMode::Vertical
            } else {
                LagrangianMode::Horizontal
            };
            lagrangian_sample(chamber, &(g * k), mode, config.fd_step, tol)
        }
        Suite::Graph => {
            let mut s = Sampler::for_sample(n, config.seed, index as u64);
            let g = s.scheduled_witness(index, config.scale);
            let k = if index == 0 {
                Matrix::identity(n, n)
            } else {
                s.rotation()
            };
            graph_sample(chamber, &g, &k, &mut s, config.fd_step, tol)
        }
        Suite::Theorem => {
            let mut s = Sampler::for_sample(n, config.seed, index as u64);
            let g = s.scheduled_witness(index, config.scale);
            theorem_sample(chamber, &g, &mut s, config.fd_step, tol)
        }
        Suite::All => unreachable!("expanded by run_suites"),
    }
}

/// Runs one concrete suite; samples are evaluated on the current rayon pool.
pub fn run_suite(
    chamber: &ChamberElement,
    suite: Suite,
    config: &SuiteConfig,
) -> Result<VerificationReport> {
    let outcomes = (0..config.samples)
        .into_par_iter()
        .map(|i| sample_measurements(chamber, suite, i, config))
        .collect::<Result<Vec<_>>>()?;
    let meta = ReportMeta {
        suite: suite.name().to_string(),
        h: chamber.entries().to_vec(),
        seed: config.seed,
        fd_step: config.fd_step,
    };
    Ok(VerificationReport::assemble(
        meta,
        suite.primary_tolerance(&config.tolerances),
        outcomes,
    ))
}

pub fn run_suites(
    chamber: &ChamberElement,
    suite: Suite,
    config: &SuiteConfig,
) -> Result<Vec<VerificationReport>> {
    suite
        .expand()
        .into_iter()
        .map(|s| run_suite(chamber, s, config))
        .collect()
}
