//! Sampling harness, law checks and independent oracles.

mod checks;
mod envelope;
mod identities;
pub mod oracle;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sets::{SetDescriptor, SetError};
use crate::vector::Vector;

pub use checks::{
    firm_nonexpansiveness_check, gradient_criterion_check, homogeneity_check, idempotence_check,
    monotonicity_check, CheckReport, GRADIENT_BUDGET,
};
pub use envelope::{moreau_envelope_check, EnvelopeError, Phi};
pub use identities::{identity_suite, IdentityReport};
pub use oracle::{dykstra, frank_wolfe, oracle_project, FwResult, FwStep, OracleError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("n_samples must be at least 1")]
    NoSamples,
    #[error("fd_step must lie in (0, 1e-2], got {0}")]
    FdStep(f64),
    #[error("{0} must be finite and positive")]
    NotPositive(&'static str),
    #[error("{0} must be finite and nonnegative")]
    Negative(&'static str),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub seed: u64,
    pub n_samples: usize,
    /// Standard deviation of the Gaussian sampler.
    pub scale: f64,
    pub atol: f64,
    pub rtol: f64,
    pub fd_step: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 0,
            n_samples: 512,
            scale: 1.0,
            atol: 1e-8,
            rtol: 1e-8,
            fd_step: 1e-4,
        }
    }
}

/// Independent random streams, so results do not depend on call order.
#[derive(Clone, Copy, Debug)]
#[repr(u64)]
pub(crate) enum Stream {
    Points = 1,
    Pairs = 2,
    Directions = 3,
    Resample = 4,
    Fresh = 5,
    Wide = 6,
}

impl SampleConfig {
    pub fn with_seed(seed: u64) -> Self {
        SampleConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_samples == 0 {
            return Err(ConfigError::NoSamples);
        }
        if !(self.fd_step > 0.0 && self.fd_step <= 1e-2) {
            return Err(ConfigError::FdStep(self.fd_step));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(ConfigError::NotPositive("scale"));
        }
        for (name, v) in [("atol", self.atol), ("rtol", self.rtol)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(ConfigError::Negative(name));
            }
        }
        Ok(())
    }

    /// Tolerance band for a sampled quantity with typical size `magnitude`.
    pub fn tolerance(&self, magnitude: f64) -> f64 {
        self.atol + self.rtol * magnitude.abs()
    }

    pub(crate) fn rng(&self, stream: Stream) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream as u64);
        rng
    }

    /// 0 and ±scale·e_i.
    pub fn probes(&self, dim: usize) -> Vec<Vector> {
        let mut out = vec![Vector::zeros(dim)];
        for i in 0..dim {
            out.push(Vector::basis(dim, i).scale(self.scale));
            out.push(Vector::basis(dim, i).scale(-self.scale));
        }
        out
    }

    /// Probes followed by `n_samples` Gaussian points.
    pub fn sample_points(&self, dim: usize) -> Vec<Vector> {
        let mut out = self.probes(dim);
        out.extend(self.gaussian_points(dim, self.n_samples, Stream::Points));
        out
    }

    /// Like `sample_points` but drawn from a stream disjoint from the one
    /// used by the decision procedures.
    pub fn fresh_points(&self, dim: usize) -> Vec<Vector> {
        let mut out = self.probes(dim);
        out.extend(self.gaussian_points(dim, self.n_samples, Stream::Fresh));
        out
    }

    /// `sample_points` plus points at 10x and 100x the scale.
    pub fn wide_points(&self, dim: usize) -> Vec<Vector> {
        let mut out = self.sample_points(dim);
        let mut rng = self.rng(Stream::Wide);
        let extra = (self.n_samples / 4).max(1);
        for mult in [10.0, 100.0] {
            for _ in 0..extra {
                out.push(gaussian(&mut rng, dim, self.scale * mult));
            }
        }
        out
    }

    /// (0, ±scale·e_i) followed by `n_samples` Gaussian pairs.
    pub fn sample_pairs(&self, dim: usize) -> Vec<(Vector, Vector)> {
        let mut out: Vec<(Vector, Vector)> = self
            .probes(dim)
            .into_iter()
            .skip(1)
            .map(|p| (Vector::zeros(dim), p))
            .collect();
        let mut rng = self.rng(Stream::Pairs);
        for _ in 0..self.n_samples {
            let x = gaussian(&mut rng, dim, self.scale);
            let y = gaussian(&mut rng, dim, self.scale);
            out.push((x, y));
        }
        out
    }

    pub(crate) fn gaussian_points(&self, dim: usize, count: usize, stream: Stream) -> Vec<Vector> {
        let mut rng = self.rng(stream);
        (0..count).map(|_| gaussian(&mut rng, dim, self.scale)).collect()
    }

    /// Unit directions: coordinate axes followed by `extra` random ones.
    pub(crate) fn directions(&self, dim: usize, extra: usize) -> Vec<Vector> {
        let mut out: Vec<Vector> = (0..dim).map(|i| Vector::basis(dim, i)).collect();
        let mut rng = self.rng(Stream::Directions);
        while out.len() < dim + extra {
            if let Some(u) = gaussian(&mut rng, dim, 1.0).normalized() {
                out.push(u);
            }
        }
        out
    }
}

pub(crate) fn gaussian<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> Vector {
    Vector::new(
        (0..dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                scale * z
            })
            .collect(),
    )
}

type Eval<'a> = Box<dyn Fn(&Vector) -> Vector + Send + Sync + 'a>;
type Domain<'a> = Box<dyn Fn(&Vector) -> bool + Send + Sync + 'a>;

/// An operator on R^n under test.
pub struct OperatorHandle<'a> {
    eval: Eval<'a>,
    domain: Option<Domain<'a>>,
    dim: usize,
    label: String,
}

impl fmt::Debug for OperatorHandle<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorHandle")
            .field("dim", &self.dim)
            .field("label", &self.label)
            .finish()
    }
}

impl<'a> OperatorHandle<'a> {
    pub fn new(
        dim: usize,
        label: impl Into<String>,
        eval: impl Fn(&Vector) -> Vector + Send + Sync + 'a,
    ) -> Self {
        OperatorHandle {
            eval: Box::new(eval),
            domain: None,
            dim,
            label: label.into(),
        }
    }

    /// Restricts sampling to points where `inside` holds. Used for
    /// fixtures that are deliberately not total.
    pub fn with_domain(mut self, inside: impl Fn(&Vector) -> bool + Send + Sync + 'a) -> Self {
        self.domain = Some(Box::new(inside));
        self
    }

    /// Projector onto `s`. Fails if `s` has no exact projector.
    pub fn projector(s: &'a SetDescriptor) -> Result<Self, SetError> {
        s.project(&Vector::zeros(s.dim()))?;
        Ok(Self::new(s.dim(), format!("P[{}]", s.label()), move |x| {
            s.project(x).expect("projection checked at construction")
        }))
    }

    /// x ↦ Σ α_i P_{C_i} x.
    pub fn combination(terms: &'a [(f64, SetDescriptor)]) -> Result<Self, SetError> {
        let dim = terms.first().map_or(0, |t| t.1.dim());
        for (_, s) in terms {
            if s.dim() != dim {
                return Err(SetError::DimensionMismatch {
                    expected: dim,
                    found: s.dim(),
                });
            }
            s.project(&Vector::zeros(dim))?;
        }
        Ok(Self::new(dim, "linear combination", move |x| {
            let mut out = Vector::zeros(x.dim());
            for (a, s) in terms {
                out.axpy(*a, &s.project(x).expect("projection checked at construction"));
            }
            out
        }))
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        (self.eval)(x)
    }

    pub fn in_domain(&self, x: &Vector) -> bool {
        self.domain.as_ref().is_none_or(|d| d(x))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}
