//! The two symplectic structures on the orbit and the checks comparing them.

mod forms;
mod potential;
mod report;
mod verify;

pub use forms::{
    kks, kks_constancy_defect, kks_transported, omega_kks_chart, omega_std_chart, tautological,
    FormMatrix,
};
pub use potential::{alpha_form, alpha_via_covector, minus_d_potential, potential_F};
pub use report::{
    scaled, BoundKind, CheckSummary, Measurement, ReportMeta, SampleError, Tolerances,
    VerificationReport,
};
pub use verify::{
    graph_sample, lagrangian_sample, theorem_sample, verify_graph, verify_lagrangian,
    verify_theorem, LagrangianMode, CONSTANCY_RADIUS,
};
