//! Quadrature results against plain sampling, within four standard errors.

use gaussbalance::cones::{cone_state, m_theta};
use gaussbalance::counterexample::{cone_measure, shifted_cone_measure};
use gaussbalance::planar::{gamma2_region, random_hypograph, HypographRegion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

fn within_band(est: f64, exact: f64, samples: usize) -> bool {
    let sd = (exact * (1.0 - exact) / samples as f64).sqrt();
    (est - exact).abs() <= 4.0 * sd + 1e-9
}

fn fraction(seed: u64, samples: usize, dim: usize, hit: impl Fn(&[f64]) -> bool) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = vec![0.0; dim];
    let mut hits = 0usize;
    for _ in 0..samples {
        for v in x.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        hits += usize::from(hit(&x));
    }
    hits as f64 / samples as f64
}

#[test]
fn planar_regions_match_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let regions: Vec<HypographRegion> = (0..20)
        .map(|_| {
            let p = rng.random_range(0.05..0.5);
            random_hypograph(&mut rng, p).unwrap()
        })
        .collect();
    let samples = 1_000_000;
    regions.par_iter().enumerate().for_each(|(i, r)| {
        let exact = gamma2_region(r).unwrap();
        let est = fraction(100 + i as u64, samples, 2, |x| r.contains(x[0], x[1]));
        assert!(
            within_band(est, exact, samples),
            "region {i}: {est} vs {exact}"
        );
    });
}

#[test]
fn truncated_cones_match_sampling() {
    let samples = 400_000;
    for (i, (n, d, t, s)) in [
        (2, 3.0, 1.0, 0.0),
        (3, 10.0, 2.0, 0.0),
        (3, 1.0, 1.0, 0.3),
        (4, 2.5, 0.7, 0.1),
    ]
    .into_iter()
    .enumerate()
    {
        let exact = if s == 0.0 {
            cone_measure(n, d, t).unwrap()
        } else {
            shifted_cone_measure(n, d, t, s).unwrap()
        };
        let est = fraction(i as u64, samples, n, |x| {
            let z = x[n - 1] + s;
            let r = x[..n - 1].iter().map(|v| v * v).sum::<f64>().sqrt();
            (0.0..=d).contains(&z) && r <= t * z
        });
        assert!(
            within_band(est, exact, samples),
            "case {i}: {est} vs {exact}"
        );
    }
}

#[test]
fn cone_family_half_measure_matches_sampling() {
    let samples = 400_000;
    for (i, (p, theta)) in [(0.25, 0.3), (0.4, 1.0), (0.1, 1.4)]
        .into_iter()
        .enumerate()
    {
        let st = cone_state(p, theta).unwrap();
        let exact = m_theta(p, theta).unwrap();
        let est = fraction(50 + i as u64, samples, 2, |x| {
            x[1] >= 0.0 && st.contains(x[0], x[1])
        });
        assert!(
            within_band(est, exact, samples),
            "case {i}: {est} vs {exact}"
        );
    }
}

#[test]
fn cone_family_convex_past_theta0() {
    for p in [0.1, 0.25, 0.4] {
        let st = cone_state(p, 0.5).unwrap();
        let theta0 = st.theta0.unwrap();
        let n = 60;
        let step = (std::f64::consts::FRAC_PI_2 - 1e-3 - theta0) / n as f64;
        let m: Vec<f64> = (0..=n)
            .map(|i| m_theta(p, theta0 + i as f64 * step).unwrap())
            .collect();
        for w in m.windows(3) {
            assert!(w[0] + w[2] - 2.0 * w[1] > -1e-12, "p = {p}: {w:?}");
        }
    }
}
