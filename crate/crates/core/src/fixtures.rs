//! Worked examples with known verdicts, reproducible by name.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    decide_1d_pair, decide_cone_family_sum, decide_linear_combination, decide_pair_sum, AlgebraError, Certificate,
    Combination, Witness,
};
use crate::certifier::{monotonicity_check, OperatorHandle, SampleConfig};
use crate::sets::{Interval, SetDescriptor};
use crate::vector::Vector;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

pub const FIXTURES: &[(&str, &str)] = &[
    ("counter-sum", "P_C - P_C = P_{0} although C - C is not {0}"),
    ("two-rays", "rays R+w and R+(-w) sum to the projector onto the line Rw"),
    ("counter-cone-set", "Id - P_K - P_{u} is monotone, yet u + P_K is not a projector"),
    ("counter-cone-set2", "P_{R+(1,0)} + P_{R+(-1,1)} misses x = (1,1) in the sum of the cones"),
    ("shifted-projector", "u + P_C is a projector iff u is orthogonal to C - C"),
    ("partial-sum-fails", "a certified four-term family with a failing sub-family"),
    ("1d-dichotomy", "interval pairs: singletons, or meeting exactly at 0"),
];

#[derive(Clone, Debug, Serialize)]
pub struct FixtureCase {
    pub label: String,
    pub expected: String,
    pub observed: String,
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureReport {
    pub name: String,
    pub description: String,
    pub seed: u64,
    pub pass: bool,
    pub cases: Vec<FixtureCase>,
}

fn verdict_case(label: &str, expected: &str, cert: Certificate) -> FixtureCase {
    let observed = match cert.result_set() {
        Some(r) => format!("{} ({})", cert.verdict_name(), r.label()),
        None => cert.verdict_name().to_string(),
    };
    FixtureCase {
        label: label.into(),
        expected: expected.into(),
        matches: cert.verdict_name() == expected,
        observed,
        certificate: Some(cert),
    }
}

fn fact_case(label: &str, expected: &str, observed: String, matches: bool) -> FixtureCase {
    FixtureCase {
        label: label.into(),
        expected: expected.into(),
        observed,
        matches,
        certificate: None,
    }
}

const YES: &str = "is-projector";
const NO: &str = "not-projector";

fn v<const N: usize>(a: [f64; N]) -> Vector {
    Vector::from(a)
}

pub fn reproduce(name: &str, cfg: &SampleConfig) -> Result<FixtureReport, FixtureError> {
    let Some((_, description)) = FIXTURES.iter().find(|f| f.0 == name) else {
        return Err(FixtureError::UnknownFixture(name.into()));
    };
    let cases = match name {
        "counter-sum" => counter_sum(cfg)?,
        "two-rays" => two_rays(cfg)?,
        "counter-cone-set" => counter_cone_set(cfg)?,
        "counter-cone-set2" => counter_cone_set2(cfg)?,
        "shifted-projector" => shifted_projector(cfg)?,
        "partial-sum-fails" => partial_sum_fails(cfg)?,
        "1d-dichotomy" => dichotomy(),
        _ => unreachable!(),
    };
    Ok(FixtureReport {
        name: name.into(),
        description: (*description).into(),
        seed: cfg.seed,
        pass: cases.iter().all(|c| c.matches),
        cases,
    })
}

fn counter_sum(cfg: &SampleConfig) -> Result<Vec<FixtureCase>, FixtureError> {
    let c = SetDescriptor::boxed(vec![0.0, 0.0], vec![1.0, 1.0]).map_err(AlgebraError::from)?;
    let comb = Combination::new(vec![(1.0, c.clone()), (-1.0, c.clone())])?;
    let cert = decide_linear_combination(&comb, cfg)?;
    let zero = SetDescriptor::Singleton { u: Vector::zeros(2) };
    let range_ok = cert.result_set() == Some(&zero);
    let mut first = verdict_case("(1)P_C + (-1)P_C", YES, cert);
    first.matches &= range_ok;
    let dirs = c.direction_space().unwrap_or_default();
    Ok(vec![
        first,
        fact_case(
            "C - C",
            "not {0}",
            format!("spans {} dimensions", dirs.len()),
            !dirs.is_empty(),
        ),
    ])
}

fn two_rays(cfg: &SampleConfig) -> Result<Vec<FixtureCase>, FixtureError> {
    let w = v([1.0, 2.0]);
    let u = SetDescriptor::ray(w.clone()).map_err(AlgebraError::from)?;
    let m = SetDescriptor::ray(-&w).map_err(AlgebraError::from)?;
    let pair = decide_pair_sum(&u, &m, cfg)?;
    let line = pair.result_set().is_some_and(|r| r.label() == "line") && pair.gamma() == Some(0.0);
    let mut first = verdict_case("P_U + P_V", YES, pair);
    first.matches &= line;
    Ok(vec![first, verdict_case("cone family [U, V]", YES, decide_cone_family_sum(&[u, m], cfg)?)])
}

fn counter_cone_set(cfg: &SampleConfig) -> Result<Vec<FixtureCase>, FixtureError> {
    let k = SetDescriptor::ray([1.0, 0.0]).map_err(AlgebraError::from)?;
    let u = v([1.0, 1.0]);
    let polar = SetDescriptor::polar(k.clone()).map_err(AlgebraError::from)?;
    let op = {
        let polar = polar.clone();
        let u = u.clone();
        OperatorHandle::new(2, "Id - P_K - P_{u}", move |x: &Vector| {
            &polar.project(x).expect("dimension checked") - &u
        })
    };
    let report = monotonicity_check(&op, cfg);
    let singleton = SetDescriptor::Singleton { u };
    Ok(vec![
        fact_case(
            "Id - P_K - P_{u} monotone",
            "pass",
            format!("min pairing {:e}", report.min_pairing.unwrap_or(f64::NAN)),
            report.pass,
        ),
        verdict_case("P_{u} + P_K", NO, decide_pair_sum(&singleton, &k, cfg)?),
    ])
}

fn counter_cone_set2(cfg: &SampleConfig) -> Result<Vec<FixtureCase>, FixtureError> {
    let k = SetDescriptor::ray([1.0, 0.0]).map_err(AlgebraError::from)?;
    let c = SetDescriptor::ray([-1.0, 1.0]).map_err(AlgebraError::from)?;
    let cert = decide_cone_family_sum(&[k, c], cfg)?;
    let expected_x = v([1.0, 1.0]);
    let witness_case = match cert.witness() {
        Some(Witness::Point { x, .. }) => {
            let tx = cert.subject.apply(x).map_err(AlgebraError::from)?;
            fact_case(
                "witness",
                "x = (1, 1), P_C x + P_K x = (1, 0)",
                format!("x = {x}, P_C x + P_K x = {tx}"),
                (x - &expected_x).norm() <= 1e-12 && (&tx - &v([1.0, 0.0])).norm() <= 1e-12,
            )
        }
        other => fact_case("witness", "x = (1, 1)", format!("{other:?}"), false),
    };
    Ok(vec![verdict_case("P_K + P_C", NO, cert), witness_case])
}

fn shifted_projector(cfg: &SampleConfig) -> Result<Vec<FixtureCase>, FixtureError> {
    let c = SetDescriptor::boxed(vec![0.0, 0.0], vec![1.0, 0.0]).map_err(AlgebraError::from)?;
    let ok = SetDescriptor::singleton([0.0, 2.0]).map_err(AlgebraError::from)?;
    let bad = SetDescriptor::singleton([1.0, 1.0]).map_err(AlgebraError::from)?;
    Ok(vec![
        verdict_case("u = (0, 2), orthogonal to C - C", YES, decide_pair_sum(&ok, &c, cfg)?),
        verdict_case("u = (1, 1), not orthogonal to C - C", NO, decide_pair_sum(&bad, &c, cfg)?),
    ])
}

fn partial_sum_fails(cfg: &SampleConfig) -> Result<Vec<FixtureCase>, FixtureError> {
    let w = v([1.0, 0.0]);
    let z = v([1.0, 1.0]);
    let u = SetDescriptor::ray(w.clone()).map_err(AlgebraError::from)?;
    let m = SetDescriptor::ray(-&w).map_err(AlgebraError::from)?;
    let pz = SetDescriptor::Singleton { u: z.clone() };
    let mz = SetDescriptor::Singleton { u: -&z };
    let whole = Combination::sum_of(vec![u.clone(), m, pz.clone(), mz])?;
    let sub = Combination::sum_of(vec![pz, u])?;
    Ok(vec![
        verdict_case("P_U + P_V + P_{z} + P_{-z}", YES, decide_linear_combination(&whole, cfg)?),
        verdict_case("P_{z} + P_U", NO, decide_linear_combination(&sub, cfg)?),
    ])
}

fn dichotomy() -> Vec<FixtureCase> {
    let iv = |a, b| Interval::new(a, b).expect("valid interval");
    [
        ("[-2, 0] + [0, 3]", iv(-2.0, 0.0), iv(0.0, 3.0), YES),
        ("{5} + {-1}", Interval::point(5.0), Interval::point(-1.0), YES),
        ("[0, 1] + [0, 1]", iv(0.0, 1.0), iv(0.0, 1.0), NO),
        ("{2} + [-1, 1]", Interval::point(2.0), iv(-1.0, 1.0), NO),
        ("[-inf, 0] + [0, inf]", iv(f64::NEG_INFINITY, 0.0), iv(0.0, f64::INFINITY), YES),
        ("[1, 2] + [-3, -1]", iv(1.0, 2.0), iv(-3.0, -1.0), NO),
    ]
    .into_iter()
    .map(|(label, c, d, expected)| verdict_case(label, expected, decide_1d_pair(c, d)))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_reproduce() {
        for (name, _) in FIXTURES {
            let r = reproduce(name, &SampleConfig::default()).unwrap();
            for c in &r.cases {
                assert!(c.matches, "{name}: {} expected {} observed {}", c.label, c.expected, c.observed);
            }
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(
            reproduce("nope", &SampleConfig::default()),
            Err(FixtureError::UnknownFixture(_))
        ));
    }
}
