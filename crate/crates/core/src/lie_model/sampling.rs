use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lie_model::combine;
use crate::numerics::{mat_exp, Matrix};

/// Deterministic source of random algebra and group elements for sl(n, ℝ).
///
/// `for_sample` gives each sample index its own ChaCha stream, so results do not
/// depend on the order in which samples are evaluated.
#[derive(Debug, Clone)]
pub struct Sampler {
    n: usize,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn for_sample(n: usize, seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { n, rng }
    }

    fn uniform(&mut self, scale: f64) -> f64 {
        if scale == 0.0 {
            return 0.0;
        }
        self.rng.gen_range(-scale..=scale)
    }

    pub fn unit(&mut self) -> f64 {
        self.rng.gen_range(-1.0..=1.0)
    }

    /// Entries uniform in `[−scale, scale]`, then projected to trace zero.
    pub fn algebra(&mut self, scale: f64) -> Matrix {
        let n = self.n;
        let mut x = Matrix::from_fn(n, n, |_, _| 0.0);
        for v in x.iter_mut() {
            *v = self.uniform(scale);
        }
        let shift = x.trace() / n as f64;
        for i in 0..n {
            x[(i, i)] -= shift;
        }
        x
    }

    /// `exp(X₁)·exp(X₂)·exp(X₃)` for independent algebra samples.
    pub fn group(&mut self, scale: f64) -> Matrix {
        let n = self.n;
        (0..3).fold(Matrix::identity(n, n), |acc, _| {
            acc * mat_exp(&self.algebra(scale))
        })
    }

    pub fn antisymmetric(&mut self, scale: f64) -> Matrix {
        let x = self.algebra(scale);
        (&x - x.transpose()) * 0.5
    }

    /// A rotation `exp(W)` with `W` antisymmetric, entries up to π.
    pub fn rotation(&mut self) -> Matrix {
        mat_exp(&self.antisymmetric(std::f64::consts::PI))
    }

    /// Element of A: `exp` of a traceless diagonal matrix.
    pub fn torus(&mut self, scale: f64) -> Matrix {
        let x = self.algebra(scale);
        let d = Matrix::from_fn(self.n, self.n, |i, j| if i == j { x[(i, j)] } else { 0.0 });
        mat_exp(&d)
    }

    /// Witness schedule used by the verification suites: the identity for sample 0,
    /// an element of A for sample 1, and a product of three exponentials after that.
    pub fn scheduled_witness(&mut self, index: usize, scale: f64) -> Matrix {
        match index {
            0 => Matrix::identity(self.n, self.n),
            1 => self.torus(4.0 * scale),
            _ => self.group(scale),
        }
    }

    /// Random combination of `basis` with coefficients in `[−scale, scale]`.
    pub fn in_span(&mut self, basis: &[Matrix], scale: f64) -> Matrix {
        let coefficients: Vec<f64> = basis.iter().map(|_| self.uniform(scale)).collect();
        combine(basis, &coefficients, self.n)
    }
}

pub fn random_algebra_element(n: usize, seed: u64, scale: f64) -> Matrix {
    Sampler::new(n, seed).algebra(scale)
}

pub fn random_group_element(n: usize, seed: u64, scale: f64) -> Matrix {
    Sampler::new(n, seed).group(scale)
}
