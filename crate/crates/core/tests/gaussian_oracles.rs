//! Gaussian primitives against independent series and continued fractions.

use std::f64::consts::PI;

use gaussbalance::gaussian::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// erf(x) = 2/√π · e^{−x²} · Σ 2ⁿx^{2n+1}/(2n+1)!!, all terms positive.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term.abs() > 1e-18 * sum.abs() {
        n += 1.0;
        term *= 2.0 * x * x / (2.0 * n + 1.0);
        sum += term;
    }
    2.0 / PI.sqrt() * (-x * x).exp() * sum
}

/// erfc(x) = e^{−x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))), x > 0.
fn erfc_fraction(x: f64) -> f64 {
    let mut k = x;
    for n in (1..300).rev() {
        k = x + n as f64 / 2.0 / k;
    }
    (-x * x).exp() / PI.sqrt() / k
}

fn oracle_cdf(x: f64) -> f64 {
    let z = x / 2f64.sqrt();
    if z.abs() <= 3.0 {
        0.5 * (1.0 + erf_series(z))
    } else if z > 0.0 {
        1.0 - 0.5 * erfc_fraction(z)
    } else {
        0.5 * erfc_fraction(-z)
    }
}

#[test]
fn cdf_matches_series_and_fraction() {
    for i in 0..=2000 {
        let x = -12.0 + 24.0 * i as f64 / 2000.0;
        let (got, want) = (cdf(x), oracle_cdf(x));
        assert!(
            (got - want).abs() <= 5e-15 + 1e-13 * want,
            "x = {x}: {got} vs {want}"
        );
    }
    // deep lower tail, relative accuracy
    for x in [-20.0, -30.0, -37.0] {
        let want = 0.5 * erfc_fraction(-x / 2f64.sqrt());
        assert!((cdf(x) / want - 1.0).abs() < 1e-12, "x = {x}");
    }
}

#[test]
fn inverses_round_trip() {
    for i in 1..1000 {
        let q = i as f64 / 1000.0;
        assert!((cdf(inv_cdf(q).unwrap()) - q).abs() < 1e-14, "q = {q}");
        assert!((sf(inv_sf(q).unwrap()) - q).abs() < 1e-14);
        assert!((psi(inv_psi(q).unwrap()).unwrap() - q).abs() < 1e-14);
        assert!((1.0 - psi(inv_psi_complement(q).unwrap()).unwrap() - q).abs() < 1e-14);
        let x = -8.0 + 16.0 * q;
        // the upper half goes through sf, where cdf has no resolution left
        let back = if x <= 0.0 {
            inv_cdf(cdf(x))
        } else {
            inv_sf(sf(x))
        }
        .unwrap();
        assert!((back - x).abs() < 1e-9 * (1.0 + x.abs()), "x = {x}");
    }
    for tail in [1e-20, 1e-50, 1e-300] {
        let x = inv_sf(tail).unwrap();
        assert!((sf(x) / tail - 1.0).abs() < 1e-12);
    }
}

#[test]
fn tail_envelope_brackets_sf() {
    for x in [0.5, 1.0, 3.0, 10.0] {
        let (lo, hi) = tail_envelope(x).unwrap();
        assert!(lo <= sf(x) && sf(x) <= hi, "{x}");
    }
}

#[test]
fn ball_measure_closed_forms() {
    for r in [0.1, 1.0, 2.5, 6.0] {
        let two = ball_measure(2, r).unwrap();
        assert!((two - (1.0 - (-r * r / 2.0).exp())).abs() < 1e-14);
        assert!((ball_measure(1, r).unwrap() - psi(r).unwrap()).abs() < 1e-14);
        for n in 1..8 {
            let (a, b) = (
                ball_measure(n, r).unwrap(),
                ball_measure_complement(n, r).unwrap(),
            );
            assert!((a + b - 1.0).abs() < 1e-14);
        }
    }
    for n in 1..10 {
        for p in [0.01, 0.5, 0.99] {
            let r = chi_quantile(n, p).unwrap();
            assert!(
                (ball_measure(n, r).unwrap() - p).abs() < 1e-12,
                "n = {n}, p = {p}"
            );
        }
    }
    let (p, q) = gamma_pq(2.5, 3.0).unwrap();
    assert!((p + q - 1.0).abs() < 1e-15);
}

#[test]
fn ball_measure_against_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let samples = 200_000;
    for (n, r) in [(2usize, 1.0), (3, 1.5), (5, 2.0)] {
        let hits = (0..samples)
            .filter(|_| {
                let s: f64 = (0..n)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        z * z
                    })
                    .sum();
                s <= r * r
            })
            .count();
        let est = hits as f64 / samples as f64;
        let exact = ball_measure(n, r).unwrap();
        let sd = (exact * (1.0 - exact) / samples as f64).sqrt();
        assert!((est - exact).abs() < 4.0 * sd, "n = {n}: {est} vs {exact}");
    }
}
