//! Decision procedures for linear combinations of projectors.

mod cones;
mod convex;
mod dichotomy;
mod matrix;
mod pair;
mod sampling;

use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::certifier::SampleConfig;
use crate::sets::{SetDescriptor, SetError};
use crate::vector::Vector;

pub use cones::{
    cone_difference_projector, cone_intersection_projector, decide_cone_family_sum, decide_generated_cone,
    decide_ray_pair,
};
pub use convex::decide_convex_combination;
pub use dichotomy::{decide_1d_pair, decide_1d_sets};
pub use matrix::{matrix_projector_check, MatrixCheck};
pub use pair::decide_pair_sum;

use sampling::{Band, Scan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("combination has no terms")]
    Empty,
    #[error("coefficient {0} is not finite")]
    NonFiniteCoefficient(f64),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("not a cone: {0}")]
    NotACone(String),
    #[error("zero vector")]
    ZeroVector,
    #[error("expected dimension {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("matrix is {rows}x{cols}, not square")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFiniteMatrix,
    #[error("invalid sample configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Σ α_i P_{C_i}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Term>", into = "Vec<Term>")]
pub struct Combination {
    terms: Vec<(f64, SetDescriptor)>,
}

/// JSON form of one term.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coefficient: f64,
    pub set: SetDescriptor,
}

impl TryFrom<Vec<Term>> for Combination {
    type Error = AlgebraError;
    fn try_from(terms: Vec<Term>) -> Result<Self, AlgebraError> {
        Combination::new(terms.into_iter().map(|t| (t.coefficient, t.set)).collect())
    }
}

impl From<Combination> for Vec<Term> {
    fn from(c: Combination) -> Self {
        c.terms
            .into_iter()
            .map(|(coefficient, set)| Term { coefficient, set })
            .collect()
    }
}

impl Combination {
    /// Validates every descriptor, the coefficients and the dimensions.
    pub fn new(terms: Vec<(f64, SetDescriptor)>) -> Result<Self, AlgebraError> {
        let Some(first) = terms.first() else {
            return Err(AlgebraError::Empty);
        };
        let n = first.1.dim();
        let mut out = Vec::with_capacity(terms.len());
        for (a, s) in terms {
            if !a.is_finite() {
                return Err(AlgebraError::NonFiniteCoefficient(a));
            }
            let s = s.validated()?;
            if s.dim() != n {
                return Err(AlgebraError::DimensionMismatch {
                    expected: n,
                    found: s.dim(),
                });
            }
            out.push((a, s));
        }
        Ok(Combination { terms: out })
    }

    /// Unit coefficients.
    pub fn sum_of(sets: Vec<SetDescriptor>) -> Result<Self, AlgebraError> {
        Self::new(sets.into_iter().map(|s| (1.0, s)).collect())
    }

    pub fn terms(&self) -> &[(f64, SetDescriptor)] {
        &self.terms
    }

    /// α = Σ α_i.
    pub fn alpha(&self) -> f64 {
        self.terms.iter().map(|t| t.0).sum()
    }

    pub fn dim(&self) -> usize {
        self.terms[0].1.dim()
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector, SetError> {
        let mut out = Vector::zeros(x.dim());
        for (a, s) in &self.terms {
            out.axpy(*a, &s.project(x)?);
        }
        Ok(out)
    }

    /// g(x) = (α-1) Σ α_i q(P_i x) - ½ Σ_i Σ_j α_i α_j q(P_i x - P_j x);
    /// with unit coefficients this equals Σ_{i<j} <P_i x, P_j x>.
    pub fn criterion(&self, x: &Vector) -> Result<f64, SetError> {
        let xs: Vec<Vector> = self.terms.iter().map(|(_, s)| s.project(x)).collect::<Result<_, _>>()?;
        if self.terms.iter().all(|t| t.0 == 1.0) {
            let mut g = 0.0;
            for i in 0..xs.len() {
                for j in i + 1..xs.len() {
                    g += xs[i].dot(&xs[j]);
                }
            }
            return Ok(g);
        }
        let alpha = self.alpha();
        let mut g = 0.0;
        for (i, (ai, _)) in self.terms.iter().enumerate() {
            g += (alpha - 1.0) * ai * 0.5 * xs[i].norm_sq();
            for (j, (aj, _)) in self.terms.iter().enumerate() {
                g -= 0.25 * ai * aj * (&xs[i] - &xs[j]).norm_sq();
            }
        }
        Ok(g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    SingletonPair,
    SingletonShift,
    OrthogonalSets,
    SubspaceOrthogonality,
    PolarPair,
    RayLemma,
    ConePairSampled,
    Dichotomy1d,
    BoxSeparable,
    ConstancySampled,
    ConstantOperator,
    SingleProjector,
    ScalarMultiple,
    PairwiseInduction,
    LinearCriterionSampled,
    ConvexCombination,
    ConeFamily,
    GeneratedCone,
    DualizedIntersection,
    DualizedIntersectionSampled,
    Zarantonello,
    ZarantonelloSampled,
    DifferenceCriterionSampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    Exact,
    Sampled,
}

/// The condition a witness violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    /// x ↦ g(x) is constant (for two sets: <P_C x, P_D x>).
    Criterion,
    /// T x = x for x in the candidate range.
    FixedPoint,
    /// ||P_1 x||² + ||P_2 x||² = ||x||² + <P_1 x, P_2 x>.
    DualizedIdentity,
    /// P_2 P_1 x = P_2 x.
    Zarantonello,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    /// Two points at which a quantity that must be constant differs.
    Constancy {
        condition: Condition,
        x: Vector,
        y: Vector,
        value_x: f64,
        value_y: f64,
        tolerance: f64,
    },
    /// <Tx - Ty, x - y> < 0.
    Monotonicity {
        x: Vector,
        y: Vector,
        pairing: f64,
        tolerance: f64,
    },
    /// A pointwise identity failing at x.
    Point {
        condition: Condition,
        x: Vector,
        violation: f64,
        tolerance: f64,
    },
}

impl Witness {
    pub fn tolerance(&self) -> f64 {
        match self {
            Witness::Constancy { tolerance, .. }
            | Witness::Monotonicity { tolerance, .. }
            | Witness::Point { tolerance, .. } => *tolerance,
        }
    }

    /// Re-evaluates the violated condition against `subject` and returns
    /// the size of the violation.
    pub fn recheck(&self, subject: &Combination) -> Result<f64, SetError> {
        match self {
            Witness::Constancy { condition, x, y, .. } => {
                let f = |p: &Vector| -> Result<f64, SetError> {
                    match condition {
                        Condition::Criterion => subject.criterion(p),
                        _ => point_violation(*condition, subject, p),
                    }
                };
                Ok((f(x)? - f(y)?).abs())
            }
            Witness::Monotonicity { x, y, .. } => {
                let p = (&subject.apply(x)? - &subject.apply(y)?).dot(&(x - y));
                Ok(-p)
            }
            Witness::Point { condition, x, .. } => point_violation(*condition, subject, x),
        }
    }
}

/// Size of a pointwise violation. For `DualizedIdentity` and `Zarantonello`
/// the subject's first two terms are K1 and K2.
pub(crate) fn point_violation(condition: Condition, subject: &Combination, x: &Vector) -> Result<f64, SetError> {
    let t = subject.terms();
    Ok(match condition {
        Condition::Criterion => subject.criterion(x)?.abs(),
        Condition::FixedPoint => (&subject.apply(x)? - x).norm(),
        Condition::DualizedIdentity => {
            let p1 = t[0].1.project(x)?;
            let p2 = t[1].1.project(x)?;
            (p1.norm_sq() + p2.norm_sq() - x.norm_sq() - p1.dot(&p2)).abs()
        }
        Condition::Zarantonello => {
            let p1 = t[0].1.project(x)?;
            (&t[1].1.project(&p1)? - &t[1].1.project(x)?).norm()
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    pub seed: u64,
    pub samples: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// `result_set` is `None` when the range is not identified.
    IsProjector {
        result_set: Option<SetDescriptor>,
        gamma: Option<f64>,
    },
    NotProjector {
        witness: Witness,
    },
    Inconclusive {
        diagnostics: String,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub method: Method,
    pub evidence: Evidence,
    pub confidence: Confidence,
    /// The operator that was decided, as a combination.
    pub subject: Combination,
}

impl Certificate {
    pub fn is_projector(&self) -> bool {
        matches!(self.verdict, Verdict::IsProjector { .. })
    }

    pub fn is_not_projector(&self) -> bool {
        matches!(self.verdict, Verdict::NotProjector { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.verdict, Verdict::Inconclusive { .. })
    }

    pub fn result_set(&self) -> Option<&SetDescriptor> {
        match &self.verdict {
            Verdict::IsProjector { result_set, .. } => result_set.as_ref(),
            _ => None,
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match &self.verdict {
            Verdict::IsProjector { gamma, .. } => *gamma,
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::NotProjector { witness } => Some(witness),
            _ => None,
        }
    }

    /// Re-evaluated violation of the witness, if any.
    pub fn recheck_witness(&self) -> Option<Result<f64, SetError>> {
        self.witness().map(|w| w.recheck(&self.subject))
    }

    pub(crate) fn exact(subject: Combination, method: Method, cfg: &SampleConfig, verdict: Verdict) -> Self {
        Certificate {
            verdict,
            method,
            evidence: Evidence {
                seed: cfg.seed,
                samples: 0,
                min: None,
                max: None,
            },
            confidence: Confidence::Exact,
            subject,
        }
    }

    pub(crate) fn with_scan(mut self, scan: &Scan) -> Self {
        self.evidence.samples = scan.values;
        self.evidence.min = Some(scan.min);
        self.evidence.max = Some(scan.max);
        self
    }

    pub fn verdict_name(&self) -> &'static str {
        match self.verdict {
            Verdict::IsProjector { .. } => "is-projector",
            Verdict::NotProjector { .. } => "not-projector",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

impl Serialize for Certificate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Flat<'a> {
            verdict: &'static str,
            method: Method,
            result: Option<String>,
            result_set: Option<&'a SetDescriptor>,
            gamma: Option<f64>,
            witness: Option<&'a Witness>,
            diagnostics: Option<&'a str>,
            evidence: &'a Evidence,
            confidence: Confidence,
        }
        let diagnostics = match &self.verdict {
            Verdict::Inconclusive { diagnostics } => Some(diagnostics.as_str()),
            _ => None,
        };
        let result = match &self.verdict {
            Verdict::IsProjector { result_set, .. } => {
                Some(result_set.as_ref().map_or("unknown-range".to_string(), SetDescriptor::label))
            }
            _ => None,
        };
        Flat {
            verdict: self.verdict_name(),
            method: self.method,
            result,
            result_set: self.result_set(),
            gamma: self.gamma(),
            witness: self.witness(),
            diagnostics,
            evidence: &self.evidence,
            confidence: self.confidence,
        }
        .serialize(s)
    }
}

fn check_config(cfg: &SampleConfig) -> Result<(), AlgebraError> {
    cfg.validate().map_err(|e| AlgebraError::Config(e.to_string()))
}

fn same_dims(a: &SetDescriptor, b: &SetDescriptor) -> Result<(), AlgebraError> {
    if a.dim() != b.dim() {
        return Err(AlgebraError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Merges structurally equal sets and drops zero coefficients.
fn merge_terms(terms: &[(f64, SetDescriptor)]) -> Vec<(f64, SetDescriptor)> {
    let mut out: Vec<(f64, SetDescriptor)> = Vec::new();
    for (a, s) in terms {
        match out.iter_mut().find(|(_, t)| t == s) {
            Some(slot) => slot.0 += a,
            None => out.push((*a, s.clone())),
        }
    }
    out.retain(|(a, _)| *a != 0.0);
    out
}

/// Decides whether Σ α_i P_{C_i} is a projector.
///
/// Structural rules are tried first; what remains goes to the sampled
/// test of monotonicity plus constancy of the criterion g.
pub fn decide_linear_combination(comb: &Combination, cfg: &SampleConfig) -> Result<Certificate, AlgebraError> {
    check_config(cfg)?;
    let n = comb.dim();
    let merged = merge_terms(comb.terms());

    if merged.is_empty() {
        let zero = SetDescriptor::Singleton { u: Vector::zeros(n) };
        return Ok(Certificate::exact(
            comb.clone(),
            Method::ConstantOperator,
            cfg,
            Verdict::IsProjector {
                result_set: Some(zero),
                gamma: Some(comb.criterion(&Vector::zeros(n))?),
            },
        ));
    }

    let convex = merged.len() >= 2
        && merged.iter().all(|(a, _)| *a > 0.0 && *a <= 1.0)
        && (merged.iter().map(|t| t.0).sum::<f64>() - 1.0).abs() <= 1e-12;
    if convex {
        let c = Combination { terms: merged };
        let mut cert = decide_convex_combination(&c, cfg)?;
        cert.subject = comb.clone();
        return Ok(cert);
    }

    let mut shift = Vector::zeros(n);
    let mut rest: Vec<(f64, SetDescriptor)> = Vec::new();
    for (a, s) in &merged {
        match s {
            SetDescriptor::Singleton { u } => shift.axpy(*a, u),
            _ => rest.push((*a, s.clone())),
        }
    }

    if rest.is_empty() {
        return Ok(Certificate::exact(
            comb.clone(),
            Method::ConstantOperator,
            cfg,
            Verdict::IsProjector {
                result_set: Some(SetDescriptor::Singleton { u: shift }),
                gamma: Some(comb.criterion(&Vector::zeros(n))?),
            },
        ));
    }

    if rest.len() == 1 {
        let (a, s) = &rest[0];
        if *a == 1.0 {
            if shift.is_zero() {
                let cert = Certificate::exact(
                    comb.clone(),
                    Method::SingleProjector,
                    cfg,
                    Verdict::IsProjector {
                        result_set: Some(s.clone()),
                        gamma: None,
                    },
                );
                return finish(cert, comb, cfg);
            }
            if let Some(cert) = pair::shift_rule(&shift, s, cfg)? {
                return finish(cert, comb, cfg);
            }
        } else if shift.is_zero() {
            // αP_C is a projector only when C is a singleton
            return scalar_multiple(comb, cfg);
        }
    }

    if rest.len() >= 2 && rest.iter().all(|t| t.0 == 1.0) {
        let sets: Vec<SetDescriptor> = rest.iter().map(|t| t.1.clone()).collect();
        if rest.len() == 2 {
            let cert = decide_pair_sum(&sets[0], &sets[1], cfg)?;
            if shift.is_zero() {
                return finish(cert, comb, cfg);
            }
            if cert.confidence == Confidence::Exact {
                if let Some(e) = cert.result_set() {
                    if let Some(shifted) = pair::shift_rule(&shift, e, cfg)? {
                        return finish(shifted, comb, cfg);
                    }
                }
            }
        } else if shift.is_zero() && sets.iter().all(SetDescriptor::is_cone) {
            let cert = decide_cone_family_sum(&sets, cfg)?;
            if !cert.is_inconclusive() {
                return finish(cert, comb, cfg);
            }
        } else if shift.is_zero() {
            if let Some(cert) = pair::pairwise_induction(&sets, cfg)? {
                return finish(cert, comb, cfg);
            }
        }
    }

    generic(comb, cfg, Method::LinearCriterionSampled)
}

/// Rebinds a certificate for a reduced problem to `comb`: γ is
/// re-evaluated for `comb`, and a witness that does not carry over is
/// searched for again.
fn finish(mut cert: Certificate, comb: &Combination, cfg: &SampleConfig) -> Result<Certificate, AlgebraError> {
    cert.subject = comb.clone();
    if let Verdict::IsProjector { gamma, .. } = &mut cert.verdict {
        *gamma = Some(comb.criterion(&Vector::zeros(comb.dim()))?);
    }
    let Some(w) = cert.witness() else {
        return Ok(cert);
    };
    if w.recheck(comb)? > 10.0 * w.tolerance() {
        return Ok(cert);
    }
    let found = sampling::search_witness(comb, cfg, &[])?;
    Ok(match found {
        Some(witness) => Certificate {
            verdict: Verdict::NotProjector { witness },
            ..cert
        },
        None => Certificate {
            verdict: Verdict::Inconclusive {
                diagnostics: "structural rule rejected the combination but no sampled witness was found".into(),
            },
            ..cert
        },
    })
}

fn scalar_multiple(comb: &Combination, cfg: &SampleConfig) -> Result<Certificate, AlgebraError> {
    let found = sampling::search_witness(comb, cfg, &[])?;
    let verdict = match found {
        Some(witness) => Verdict::NotProjector { witness },
        None => Verdict::Inconclusive {
            diagnostics: "scalar multiple of a non-singleton projector, but no sampled witness".into(),
        },
    };
    Ok(Certificate::exact(comb.clone(), Method::ScalarMultiple, cfg, verdict))
}

/// Sampled monotonicity plus constancy of g.
fn generic(comb: &Combination, cfg: &SampleConfig, method: Method) -> Result<Certificate, AlgebraError> {
    let mono = sampling::scan_monotonicity(comb, cfg)?;
    let base = |verdict| Certificate {
        verdict,
        method,
        evidence: Evidence {
            seed: cfg.seed,
            samples: 0,
            min: None,
            max: None,
        },
        confidence: Confidence::Sampled,
        subject: comb.clone(),
    };
    if let Some(w) = mono.witness {
        return Ok(base(Verdict::NotProjector { witness: w }));
    }
    if mono.ambiguous {
        return Ok(base(Verdict::Inconclusive {
            diagnostics: format!("monotonicity pairing {:e} is within the tolerance band", mono.min),
        }));
    }
    let scan = sampling::scan_criterion(comb, cfg, &[])?;
    let cert = match scan.band() {
        Band::Constant => base(Verdict::IsProjector {
            result_set: None,
            gamma: Some(scan.median),
        }),
        Band::Varies => base(Verdict::NotProjector {
            witness: scan.constancy_witness(Condition::Criterion),
        }),
        Band::Ambiguous => base(Verdict::Inconclusive {
            diagnostics: format!(
                "criterion spread {:e} lies between the tolerance {:e} and ten times it",
                scan.spread(),
                scan.tolerance
            ),
        }),
    };
    Ok(cert.with_scan(&scan))
}

/// Decides P_D - P_C through monotonicity and constancy of
/// <P_C x, P_D x - P_C x> (equivalently, of g for coefficients (1, -1)).
pub fn decide_difference(c: &SetDescriptor, d: &SetDescriptor, cfg: &SampleConfig) -> Result<Certificate, AlgebraError> {
    same_dims(c, d)?;
    check_config(cfg)?;
    let comb = Combination::new(vec![(1.0, d.clone()), (-1.0, c.clone())])?;
    if c == d {
        return decide_linear_combination(&comb, cfg);
    }
    generic(&comb, cfg, Method::DifferenceCriterionSampled)
}
