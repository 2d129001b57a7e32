//! Random set constructions shared by the integration tests.

#![allow(dead_code)]

use projkit::linalg::{complement, orthonormalize};
use projkit::{cone_intersection_projector, decide_pair_sum, SampleConfig, SetDescriptor, Vector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vector {
    Vector::new((0..n).map(|_| StandardNormal.sample(&mut *rng)).collect())
}

/// Random orthonormal basis of R^n.
pub fn orthonormal_basis(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vector> {
    loop {
        let vs: Vec<Vector> = (0..n).map(|_| gaussian(rng, n)).collect();
        let q = orthonormalize(&vs);
        if q.len() == n {
            return q;
        }
    }
}

/// Pairwise generator list built from ± a random orthonormal basis.
pub fn pairwise_cone(rng: &mut ChaCha8Rng, n: usize) -> SetDescriptor {
    let q = orthonormal_basis(rng, n);
    let mut gens = Vec::new();
    for b in q.iter().take(rng.random_range(1..=n)) {
        match rng.random_range(0..3) {
            0 => gens.push(b.clone()),
            1 => gens.push(-b),
            _ => {
                gens.push(b.clone());
                gens.push(-b);
            }
        }
    }
    SetDescriptor::generated_cone(gens).unwrap()
}

fn random_box(rng: &mut ChaCha8Rng, n: usize) -> SetDescriptor {
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for _ in 0..n {
        let a: f64 = rng.random_range(-2.0..1.0);
        let w: f64 = rng.random_range(0.1..2.0);
        lower.push(if rng.random_bool(0.2) { f64::NEG_INFINITY } else { a });
        upper.push(if rng.random_bool(0.2) { f64::INFINITY } else { a + w });
    }
    SetDescriptor::boxed(lower, upper).unwrap()
}

fn random_subspace(rng: &mut ChaCha8Rng, n: usize) -> SetDescriptor {
    let k = rng.random_range(1..=n);
    let q = orthonormal_basis(rng, n);
    SetDescriptor::subspace(q[..k].to_vec()).unwrap()
}

/// One descriptor of every catalog variant in R^n.
pub fn catalog(rng: &mut ChaCha8Rng, n: usize) -> Vec<SetDescriptor> {
    let cfg = SampleConfig::default();
    let mut out = vec![
        SetDescriptor::singleton(gaussian(rng, n)).unwrap(),
        SetDescriptor::ball(gaussian(rng, n), rng.random_range(0.2..2.0)).unwrap(),
        random_box(rng, n),
        SetDescriptor::hyperplane(gaussian(rng, n), rng.random_range(-1.0..1.0)).unwrap(),
        SetDescriptor::halfspace(gaussian(rng, n), rng.random_range(-1.0..1.0)).unwrap(),
        random_subspace(rng, n),
        SetDescriptor::ray(gaussian(rng, n)).unwrap(),
        pairwise_cone(rng, n),
    ];
    let k = pairwise_cone(rng, n);
    out.push(SetDescriptor::polar(k.clone()).unwrap());
    out.push(SetDescriptor::truncated(k.clone(), rng.random_range(0.5..2.0)).unwrap());
    out.push(SetDescriptor::translate(SetDescriptor::ball(Vector::zeros(n), 1.0).unwrap(), gaussian(rng, n)).unwrap());
    out.push(SetDescriptor::translate(pairwise_cone(rng, n), gaussian(rng, n)).unwrap());
    let m = rng.random_range(1..=n + 2);
    out.push(SetDescriptor::polytope((0..m).map(|_| gaussian(rng, n)).collect()).unwrap());

    // a certified sum: truncated cone plus its truncated polar
    let pair = decide_pair_sum(
        &SetDescriptor::truncated(k.clone(), 1.0).unwrap(),
        &SetDescriptor::truncated(SetDescriptor::polar(k.clone()).unwrap(), 0.5).unwrap(),
        &cfg,
    )
    .unwrap();
    out.push(pair.result_set().unwrap().clone());

    // a certified intersection of two halfspace cones with orthogonal normals
    if n >= 2 {
        let q = orthonormal_basis(rng, n);
        let h1 = SetDescriptor::halfspace(q[0].clone(), 0.0).unwrap();
        let h2 = SetDescriptor::halfspace(q[1].clone(), 0.0).unwrap();
        let cert = cone_intersection_projector(&h1, &h2, &cfg).unwrap();
        out.push(cert.result_set().unwrap().clone());
    }
    out
}

/// Cone variants of the catalog in R^n.
pub fn cone_catalog(rng: &mut ChaCha8Rng, n: usize) -> Vec<SetDescriptor> {
    let mut lower = vec![0.0; n];
    let mut upper = vec![0.0; n];
    for i in 0..n {
        match rng.random_range(0..3) {
            0 => upper[i] = f64::INFINITY,
            1 => lower[i] = f64::NEG_INFINITY,
            _ => {
                lower[i] = f64::NEG_INFINITY;
                upper[i] = f64::INFINITY;
            }
        }
    }
    let mut out = vec![
        SetDescriptor::singleton(Vector::zeros(n)).unwrap(),
        SetDescriptor::boxed(lower, upper).unwrap(),
        SetDescriptor::hyperplane(gaussian(rng, n), 0.0).unwrap(),
        SetDescriptor::halfspace(gaussian(rng, n), 0.0).unwrap(),
        random_subspace(rng, n),
        SetDescriptor::ray(gaussian(rng, n)).unwrap(),
        pairwise_cone(rng, n),
        SetDescriptor::polar(pairwise_cone(rng, n)).unwrap(),
        SetDescriptor::whole_space(n),
    ];
    if n >= 2 {
        let q = orthonormal_basis(rng, n);
        let h1 = SetDescriptor::halfspace(q[0].clone(), 0.0).unwrap();
        let h2 = SetDescriptor::halfspace(-&q[1], 0.0).unwrap();
        let cert = cone_intersection_projector(&h1, &h2, &SampleConfig::default()).unwrap();
        out.push(cert.result_set().unwrap().clone());
    }
    out
}

/// A set whose linear span lies in span(block).
pub fn block_set(rng: &mut ChaCha8Rng, block: &[Vector]) -> SetDescriptor {
    let n = block[0].dim();
    let combo = |rng: &mut ChaCha8Rng| {
        let mut v = Vector::zeros(n);
        for b in block {
            v.axpy(StandardNormal.sample(&mut *rng), b);
        }
        v
    };
    match rng.random_range(0..5) {
        0 => SetDescriptor::span(&[combo(rng)], n).unwrap(),
        1 => SetDescriptor::ray(combo(rng)).unwrap(),
        2 => {
            let k = rng.random_range(1..=block.len());
            let mut gens = Vec::new();
            let q = orthonormalize(&(0..k).map(|_| combo(rng)).collect::<Vec<_>>());
            for b in q {
                if rng.random_bool(0.5) {
                    gens.push(-&b);
                }
                gens.push(b);
            }
            SetDescriptor::generated_cone(gens).unwrap()
        }
        3 => {
            let m = rng.random_range(1..=block.len() + 2);
            SetDescriptor::polytope((0..m).map(|_| combo(rng)).collect()).unwrap()
        }
        _ => {
            let cone = SetDescriptor::generated_cone(vec![combo(rng)]).unwrap();
            SetDescriptor::truncated(cone, rng.random_range(0.5..2.0)).unwrap()
        }
    }
}

/// A block of coordinates and its orthogonal complement, both rotated.
pub fn orthogonal_blocks(rng: &mut ChaCha8Rng, n: usize) -> (Vec<Vector>, Vec<Vector>) {
    let q = orthonormal_basis(rng, n);
    let k = rng.random_range(1..n);
    let a = q[..k].to_vec();
    let b = complement(&a, n);
    (a, b)
}
