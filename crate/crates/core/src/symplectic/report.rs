use serde::{Deserialize, Serialize};

/// Pass thresholds, split by error regime.
///
/// Every threshold is compared against an error already divided by
/// `max(1, product of operand norms)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Algebraic identities evaluated in closed form (reconstruction, kan-split).
    pub identity: f64,
    /// Exact vanishing statements and subspace residuals.
    pub strict: f64,
    /// Agreement between two exact-formula routes.
    pub exact: f64,
    /// Closed-form Iwasawa derivatives against their finite-difference oracle.
    pub iwasawa_fd: f64,
    /// Comparisons that go through a numerical exterior derivative.
    pub fd: f64,
    /// Lower bound on smallest singular values of pairings and forms.
    pub nondegeneracy: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-12,
            strict: 1e-10,
            exact: 1e-9,
            iwasawa_fd: 1e-6,
            fd: 1e-5,
            nondegeneracy: 1e-8,
        }
    }
}

impl Tolerances {
    /// Replaces every exact-formula threshold by `value`.
    pub fn with_exact(mut self, value: f64) -> Self {
        self.identity = value;
        self.strict = value;
        self.exact = value;
        self
    }

    /// Replaces every finite-difference threshold by `value`.
    pub fn with_fd(mut self, value: f64) -> Self {
        self.iwasawa_fd = value;
        self.fd = value;
        self
    }
}

/// `err / max(1, scale)`.
pub fn scaled(err: f64, scale: f64) -> f64 {
    err / scale.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// value must not exceed the bound
    Max,
    /// value must exceed the bound
    Min,
}

/// One named quantity from one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub name: &'static str,
    pub value: f64,
    pub bound: f64,
    pub kind: BoundKind,
}

impl Measurement {
    pub fn upper(name: &'static str, value: f64, bound: f64) -> Self {
        Self {
            name,
            value,
            bound,
            kind: BoundKind::Max,
        }
    }

    pub fn lower(name: &'static str, value: f64, bound: f64) -> Self {
        Self {
            name,
            value,
            bound,
            kind: BoundKind::Min,
        }
    }

    pub fn passes(&self) -> bool {
        match self.kind {
            BoundKind::Max => self.value <= self.bound,
            BoundKind::Min => self.value > self.bound,
        }
    }

    /// Fraction of the allowance used; ≤ 1 means pass (up to the strict/non-strict
    /// boundary of `Min` bounds).
    fn ratio(&self) -> f64 {
        let r = match self.kind {
            BoundKind::Max => self.value / self.bound,
            BoundKind::Min if self.value > 0.0 => self.bound / self.value,
            BoundKind::Min => f64::MAX,
        };
        if r.is_nan() {
            f64::MAX
        } else {
            r.min(f64::MAX)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleError {
    pub index: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub kind: BoundKind,
    /// Worst value over all samples (largest for `max`, smallest for `min`).
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Outcome of one verification suite.
///
/// `max_error` is expressed in units of `tolerance`: every measurement contributes
/// `tolerance · value / bound` (or `tolerance · bound / value` for lower bounds),
/// so `pass` is equivalent to `max_error ≤ tolerance` even when a suite mixes
/// error regimes. Raw per-check values are kept in `checks`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub n: usize,
    #[serde(rename = "H")]
    pub h: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples_detail: Option<Vec<SampleError>>,
    #[serde(default)]
    pub checks: Vec<CheckSummary>,
}

/// Identification fields shared by every report of one run.
#[derive(Debug, Clone)]
pub struct ReportMeta {
    pub suite: String,
    pub h: Vec<f64>,
    pub seed: u64,
    pub fd_step: f64,
}

impl VerificationReport {
    /// Aggregates per-sample measurements; `samples[i]` belongs to sample index `i`.
    pub fn assemble(meta: ReportMeta, tolerance: f64, samples: Vec<Vec<Measurement>>) -> Self {
        let mut checks: Vec<CheckSummary> = Vec::new();
        let mut detail = Vec::with_capacity(samples.len());
        for (index, measurements) in samples.iter().enumerate() {
            let mut worst: f64 = 0.0;
            for m in measurements {
                worst = worst.max(m.ratio() * tolerance);
                match checks.iter_mut().find(|c| c.name == m.name) {
                    Some(c) => {
                        c.value = match m.kind {
                            BoundKind::Max => c.value.max(m.value),
                            BoundKind::Min => c.value.min(m.value),
                        };
                        c.pass &= m.passes();
                    }
                    None => checks.push(CheckSummary {
                        name: m.name.to_string(),
                        kind: m.kind,
                        value: m.value,
                        bound: m.bound,
                        pass: m.passes(),
                    }),
                }
            }
            detail.push(SampleError {
                index,
                error: worst.min(f64::MAX),
            });
        }
        let max_error = detail.iter().map(|d| d.error).fold(0.0, f64::max);
        let pass = checks.iter().all(|c| c.pass) && max_error <= tolerance;
        Self {
            suite: meta.suite,
            n: meta.h.len(),
            h: meta.h,
            samples: samples.len(),
            seed: meta.seed,
            fd_step: meta.fd_step,
            max_error,
            tolerance,
            pass,
            samples_detail: Some(detail),
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// One line: suite, sample count, max error, tolerance, PASS/FAIL.
    pub fn summary_line(&self) -> String {
        format!(
            "{:<22} samples={:<4} max_error={:.3e} tolerance={:.1e} {}",
            self.suite,
            self.samples,
            self.max_error,
            self.tolerance,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}
