//! Properties of the decision procedures.

mod common;

use common::*;
use projkit::certifier::{firm_nonexpansiveness_check, gradient_criterion_check, idempotence_check};
use projkit::{
    decide_cone_family_sum, decide_convex_combination, decide_pair_sum, decide_ray_pair, set_difference_witness,
    Certificate, Combination, OperatorHandle, SampleConfig, SetDescriptor, Vector,
};
use proptest::prelude::*;
use rand::Rng;

const SUM_TOL: f64 = 1e-9;
const AFFINE_TOL: f64 = 1e-9;

fn cfg(seed: u64) -> SampleConfig {
    SampleConfig {
        n_samples: 64,
        ..SampleConfig::with_seed(seed)
    }
}

/// Fresh-sample laws for a certified operator, and agreement with its range set.
fn check_sound(cert: &Certificate, seed: u64) -> Result<(), TestCaseError> {
    let fresh = cfg(seed.wrapping_add(1));
    let terms = cert.subject.terms().to_vec();
    let t = OperatorHandle::combination(&terms).unwrap();
    let label = cert.subject.terms().iter().map(|t| t.1.label()).collect::<Vec<_>>().join(" + ");
    for report in [
        idempotence_check(&t, &fresh),
        firm_nonexpansiveness_check(&t, &fresh),
        gradient_criterion_check(&t, &fresh),
    ] {
        prop_assert!(report.pass, "{label}: {} failed ({:?})", report.check, report.witnesses.first());
    }
    if let Some(r) = cert.result_set() {
        for x in fresh.fresh_points(t.dim()) {
            let err = r.project(&x).unwrap().dist(&t.apply(&x));
            prop_assert!(err <= SUM_TOL * (1.0 + x.norm()), "{label}: range set off by {err:e}");
        }
    }
    Ok(())
}

fn check_witness(cert: &Certificate) -> Result<(), TestCaseError> {
    let w = cert.witness().unwrap();
    let violation = cert.recheck_witness().unwrap().unwrap();
    prop_assert!(violation > 10.0 * w.tolerance(), "violation {violation:e} vs tolerance {:e}", w.tolerance());
    Ok(())
}

fn check_verdict(cert: &Certificate, seed: u64) -> Result<(), TestCaseError> {
    if cert.is_projector() {
        check_sound(cert, seed)
    } else if cert.is_not_projector() {
        check_witness(cert)
    } else {
        Ok(())
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pair_verdicts_are_sound(seed in any::<u64>(), n in 1usize..=3, i in 0usize..64, j in 0usize..64) {
        let sets = catalog(&mut rng(seed), n);
        let (c, d) = (&sets[i % sets.len()], &sets[j % sets.len()]);
        let cert = decide_pair_sum(c, d, &cfg(seed)).unwrap();
        check_verdict(&cert, seed)?;
    }

    #[test]
    fn cone_pairs_have_gamma_zero(seed in any::<u64>(), n in 1usize..=4, i in 0usize..64, j in 0usize..64) {
        let cones = cone_catalog(&mut rng(seed), n);
        let (c, d) = (&cones[i % cones.len()], &cones[j % cones.len()]);
        let cert = decide_pair_sum(c, d, &cfg(seed)).unwrap();
        if let Some(g) = cert.gamma() {
            prop_assert_eq!(g, 0.0);
        }
        check_verdict(&cert, seed)?;
    }

    #[test]
    fn orthogonal_block_sums_equal_the_sum_set(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = rng(seed);
        let (a, b) = orthogonal_blocks(&mut r, n);
        let (c, d) = (block_set(&mut r, &a), block_set(&mut r, &b));
        let cert = decide_pair_sum(&c, &d, &cfg(seed)).unwrap();
        prop_assert!(cert.is_projector(), "{} + {}: {}", c.label(), d.label(), cert.verdict_name());
        check_sound(&cert, seed)?;
        let sum = cert.result_set().unwrap();
        for x in cfg(seed).fresh_points(n) {
            let lhs = &c.project(&x).unwrap() + &d.project(&x).unwrap();
            prop_assert!(sum.project(&x).unwrap().dist(&lhs) <= SUM_TOL * (1.0 + x.norm()));
        }
    }

    #[test]
    fn ray_lemma_matches_pair_decision(u in prop::collection::vec(-3.0..3.0f64, 2..=4), seed in any::<u64>()) {
        let n = u.len();
        let u = Vector::new(u);
        prop_assume!(u.norm() > 1e-3);
        let mut r = rng(seed);
        // mix in exact orthogonal and antipodal partners
        let v = match r.random_range(0..3) {
            0 => -&u,
            1 => {
                let g = gaussian(&mut r, n);
                &g - &u.scale(g.dot(&u) / u.norm_sq())
            }
            _ => gaussian(&mut r, n),
        };
        prop_assume!(v.norm() > 1e-3);
        let lemma = decide_ray_pair(&u, &v).unwrap();
        let cert = decide_pair_sum(
            &SetDescriptor::ray(u.clone()).unwrap(),
            &SetDescriptor::ray(v.clone()).unwrap(),
            &cfg(seed),
        )
        .unwrap();
        prop_assert_eq!(lemma, cert.is_projector(), "{} {}: {}", u, v, cert.verdict_name());
        prop_assert!(!cert.is_inconclusive());
        check_verdict(&cert, seed)?;
    }

    #[test]
    fn certified_cone_families_have_the_partial_sum_property(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let q = orthonormal_basis(&mut r, n);
        let m = r.random_range(2..=n.min(4));
        let dirs: Vec<Vector> = q.iter().take(m).map(|b| if r.random_bool(0.5) { b.clone() } else { -b }).collect();
        let mut family: Vec<SetDescriptor> = dirs.iter().map(|d| SetDescriptor::ray(d.clone()).unwrap()).collect();
        if r.random_bool(0.5) {
            family.push(SetDescriptor::ray(-&dirs[0]).unwrap());
        }
        let cert = decide_cone_family_sum(&family, &cfg(seed)).unwrap();
        prop_assert!(cert.is_projector());
        check_sound(&cert, seed)?;
        for mask in 1u32..(1 << family.len()) {
            let sub: Vec<_> = (0..family.len()).filter(|i| mask & (1 << i) != 0).map(|i| family[i].clone()).collect();
            let sub_cert = decide_cone_family_sum(&sub, &cfg(seed)).unwrap();
            prop_assert!(sub_cert.is_projector(), "mask {mask:b}");
        }
    }

    #[test]
    fn skewed_cone_families_have_reproducible_witnesses(seed in any::<u64>(), n in 2usize..=4) {
        let mut r = rng(seed);
        let q = orthonormal_basis(&mut r, n);
        let mut family: Vec<SetDescriptor> = q.iter().map(|b| SetDescriptor::ray(b.clone()).unwrap()).collect();
        let t: f64 = r.random_range(0.2..1.3);
        family.push(SetDescriptor::ray(&q[0].scale(t.cos()) + &q[1].scale(t.sin())).unwrap());
        let cert = decide_cone_family_sum(&family, &cfg(seed)).unwrap();
        prop_assert!(cert.is_not_projector());
        check_witness(&cert)?;
        let again = decide_cone_family_sum(&family, &cfg(seed)).unwrap();
        prop_assert_eq!(serde_json::to_string(&cert).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn affine_weights_follow_the_translate_formula(seed in any::<u64>(), n in 2usize..=5) {
        let mut r = rng(seed);
        let q = orthonormal_basis(&mut r, n);
        let k = r.random_range(1..n);
        let flat = SetDescriptor::subspace(q[..k].to_vec()).unwrap();
        // a flat disc or the whole subspace
        let base = if r.random_bool(0.5) { SetDescriptor::truncated(flat, 1.5).unwrap() } else { flat };
        let m = r.random_range(2..=4);
        let sets: Vec<SetDescriptor> = (0..m)
            .map(|_| {
                let mut s = Vector::zeros(n);
                for b in &q[k..] {
                    s.axpy(r.random_range(-2.0..2.0), b);
                }
                SetDescriptor::translate(base.clone(), s).unwrap()
            })
            .collect();
        let raw: Vec<f64> = (0..m).map(|_| r.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut w: Vec<f64> = raw.iter().map(|a| a / total).collect();
        w[m - 1] = 1.0 - w[..m - 1].iter().sum::<f64>();
        let comb = Combination::new(w.iter().copied().zip(sets.iter().cloned()).collect()).unwrap();
        let cert = decide_convex_combination(&comb, &cfg(seed)).unwrap();
        prop_assert!(cert.is_projector(), "{}", cert.verdict_name());
        check_sound(&cert, seed)?;

        let vs: Vec<Vector> = sets.iter().map(|c| set_difference_witness(&sets[0], c, &cfg(seed)).unwrap()).collect();
        let mut beta: Vec<f64> = (0..m).map(|_| r.random_range(-3.0..3.0)).collect();
        beta[0] = 1.0 - beta[1..].iter().sum::<f64>();
        let mut shift = Vector::zeros(n);
        for (b, v) in beta.iter().zip(&vs) {
            shift.axpy(*b, v);
        }
        let target = SetDescriptor::translate(sets[0].clone(), shift).unwrap();
        let affine = Combination::new(beta.iter().copied().zip(sets.iter().cloned()).collect()).unwrap();
        for x in cfg(seed).fresh_points(n) {
            let err = target.project(&x).unwrap().dist(&affine.apply(&x).unwrap());
            prop_assert!(err <= AFFINE_TOL * (1.0 + x.norm()), "{err:e}");
        }
    }
}

#[test]
fn partial_sums_can_fail_outside_cones() {
    let w = Vector::new(vec![1.0, 0.0]);
    let z = Vector::new(vec![1.0, 1.0]);
    let family = vec![
        SetDescriptor::ray(w.clone()).unwrap(),
        SetDescriptor::ray(-&w).unwrap(),
        SetDescriptor::singleton(z.clone()).unwrap(),
        SetDescriptor::singleton(-&z).unwrap(),
    ];
    let whole = projkit::decide_linear_combination(&Combination::sum_of(family.clone()).unwrap(), &cfg(0)).unwrap();
    assert!(whole.is_projector());
    let sub = Combination::sum_of(vec![family[2].clone(), family[0].clone()]).unwrap();
    let cert = projkit::decide_linear_combination(&sub, &cfg(0)).unwrap();
    assert!(cert.is_not_projector());
    assert!(cert.recheck_witness().unwrap().unwrap() > 10.0 * cert.witness().unwrap().tolerance());
}
