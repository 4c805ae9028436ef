//! One-dimensional Gaussian primitives and radial measures of centered balls.
//!
//! Conventions: `cdf` is the standard normal distribution function Φ,
//! `psi(x) = γ₁([−x, x]) = 2Φ(x) − 1`, and `ball_measure(n, r)` is the
//! standard Gaussian measure of the Euclidean ball of radius `r` in ℝⁿ.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{check_probability, Error, Result};

/// 1/√(2π)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

const MAX_ITER: usize = 200;

pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Φ(x).
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Upper tail 1 − Φ(x), without cancellation for large `x`.
pub fn sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Ψ(x) = γ₁([−x, x]).
pub fn psi(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            expected: "x >= 0",
        });
    }
    Ok(libm::erf(x * FRAC_1_SQRT_2))
}

/// Rational approximation of Φ⁻¹ on (0, 1/2] (relative error ~1e−9); only
/// used to seed the refinement in [`inv_cdf`].
fn lower_quantile_guess(q: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    if q < 0.02425 {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    } else {
        let r = q - 0.5;
        let s = r * r;
        (((((A[0] * s + A[1]) * s + A[2]) * s + A[3]) * s + A[4]) * s + A[5]) * r
            / (((((B[0] * s + B[1]) * s + B[2]) * s + B[3]) * s + B[4]) * s + 1.0)
    }
}

/// Solves Φ(x) = q for q ∈ (0, 1/2]. Newton steps inside a bisection bracket,
/// stopping on relative step size so deep tails keep full accuracy.
fn lower_quantile(q: f64) -> f64 {
    if q == 0.5 {
        return 0.0;
    }
    let mut lo = -40.0_f64;
    let mut hi = 0.0_f64;
    let mut x = lower_quantile_guess(q).clamp(lo, hi);
    for _ in 0..MAX_ITER {
        let fx = cdf(x) - q;
        if fx == 0.0 {
            return x;
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = pdf(x);
        let mut next = if d > 0.0 { x - fx / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1e-300) || hi - lo <= 1e-15 * lo.abs() {
            return next;
        }
        x = next;
    }
    x
}

/// Φ⁻¹(q).
pub fn inv_cdf(q: f64) -> Result<f64> {
    check_probability("q", q)?;
    Ok(if q <= 0.5 {
        lower_quantile(q)
    } else {
        -lower_quantile(1.0 - q)
    })
}

/// Solves 1 − Φ(x) = tail, accurate for tiny tails.
pub fn inv_sf(tail: f64) -> Result<f64> {
    check_probability("tail", tail)?;
    Ok(if tail <= 0.5 {
        -lower_quantile(tail)
    } else {
        lower_quantile(1.0 - tail)
    })
}

/// Ψ⁻¹(p) for 0 ≤ p < 1.
pub fn inv_psi(p: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Domain {
            name: "p",
            value: p,
            expected: "0 <= p < 1",
        });
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    inv_sf(0.5 * (1.0 - p))
}

/// Ψ⁻¹(1 − tail), for arguments too close to 1 to be represented directly.
pub fn inv_psi_complement(tail: f64) -> Result<f64> {
    if !(tail > 0.0 && tail <= 1.0) {
        return Err(Error::Domain {
            name: "tail",
            value: tail,
            expected: "0 < tail <= 1",
        });
    }
    if tail == 1.0 {
        return Ok(0.0);
    }
    inv_sf(0.5 * tail)
}

/// Mills-ratio bracket for the Gaussian tail: returns `(lower, upper)` with
/// `lower ≤ 1 − Φ(x) ≤ upper` for every x > 1 (the lower bound is negative
/// below 1 and vanishes at x = 1).
pub fn tail_envelope(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            expected: "x > 0",
        });
    }
    let upper = pdf(x) / x;
    Ok((upper * (1.0 - 1.0 / (x * x)), upper))
}

/// The scalars attached to a probability `p`: `h = Ψ⁻¹(p)` and `w = −Φ⁻¹(p)`,
/// so that γ₁((−∞, −w]) = γ₁([−h, h]) = p.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GaussScalarTable {
    pub p: f64,
    pub h: f64,
    pub w: f64,
}

impl GaussScalarTable {
    pub fn new(p: f64) -> Result<Self> {
        check_probability("p", p)?;
        let h = inv_psi(p)?;
        let w = -inv_cdf(p)?;
        Ok(Self { p, h, w })
    }
}

// ---------------------------------------------------------------------------
// Incomplete gamma and radial measures

fn ln_gamma(a: f64) -> f64 {
    libm::lgamma(a)
}

/// Series for P(a, x), valid (and fast) for x < a + 1.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..100_000 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-17 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Lentz continued fraction for Q(a, x), valid for x ≥ a + 1.
fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..100_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized incomplete gamma pair `(P(a, x), Q(a, x))`.
pub fn gamma_pq(a: f64, x: f64) -> Result<(f64, f64)> {
    if !(a > 0.0) || !(x >= 0.0) {
        return Err(Error::Domain {
            name: "a, x",
            value: if a > 0.0 { x } else { a },
            expected: "a > 0 and x >= 0",
        });
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    if x < a + 1.0 {
        let p = gamma_p_series(a, x);
        Ok((p, 1.0 - p))
    } else {
        let q = gamma_q_continued_fraction(a, x);
        Ok((1.0 - q, q))
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::Domain {
            name: "n",
            value: 0.0,
            expected: "n >= 1",
        })
    } else {
        Ok(())
    }
}

/// γₙ(r·B₂ⁿ) = P(n/2, r²/2).
pub fn ball_measure(n: usize, r: f64) -> Result<f64> {
    check_dimension(n)?;
    if !(r >= 0.0) {
        return Err(Error::Domain {
            name: "r",
            value: r,
            expected: "r >= 0",
        });
    }
    match n {
        1 => psi(r),
        2 => Ok(-(-0.5 * r * r).exp_m1()),
        _ => Ok(gamma_pq(0.5 * n as f64, 0.5 * r * r)?.0),
    }
}

/// γₙ(ℝⁿ ∖ r·B₂ⁿ), accurate in the far tail.
pub fn ball_measure_complement(n: usize, r: f64) -> Result<f64> {
    check_dimension(n)?;
    if !(r >= 0.0) {
        return Err(Error::Domain {
            name: "r",
            value: r,
            expected: "r >= 0",
        });
    }
    match n {
        1 => Ok(2.0 * sf(r)),
        2 => Ok((-0.5 * r * r).exp()),
        _ => Ok(gamma_pq(0.5 * n as f64, 0.5 * r * r)?.1),
    }
}

/// Density of the chi distribution with `n` degrees of freedom, i.e. the
/// derivative of `ball_measure(n, ·)`.
fn chi_density(n: usize, r: f64) -> f64 {
    if r <= 0.0 {
        return if n == 1 { 2.0 * INV_SQRT_2PI } else { 0.0 };
    }
    let a = 0.5 * n as f64;
    let ln = (n as f64 - 1.0) * r.ln() - 0.5 * r * r - (a - 1.0) * 2f64.ln() - ln_gamma(a);
    ln.exp()
}

/// R with γₙ(R·B₂ⁿ) = p, the `p`-quantile of ‖Z‖ for Z ~ N(0, Iₙ).
pub fn chi_quantile(n: usize, p: f64) -> Result<f64> {
    check_dimension(n)?;
    check_probability("p", p)?;
    match n {
        1 => return inv_psi(p),
        2 => return Ok((-2.0 * (-p).ln_1p()).sqrt()),
        _ => {}
    }
    let residual = |r: f64| -> Result<f64> {
        // work on the smaller side to keep relative accuracy
        if p <= 0.5 {
            Ok(ball_measure(n, r)? - p)
        } else {
            Ok((1.0 - p) - ball_measure_complement(n, r)?)
        }
    };
    let mut lo = 0.0_f64;
    let mut hi = (n as f64).sqrt() + 2.0;
    while residual(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::RootSearch {
                what: "chi quantile",
            });
        }
    }
    let mut r = (n as f64 - 0.5).sqrt().clamp(lo, hi);
    for _ in 0..MAX_ITER {
        let f = residual(r)?;
        if f == 0.0 {
            return Ok(r);
        }
        if f > 0.0 {
            hi = r;
        } else {
            lo = r;
        }
        let d = chi_density(n, r);
        let mut next = if d > 0.0 { r - f / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - r).abs() <= 1e-15 * r.max(1e-300) || hi - lo <= 1e-15 * hi {
            return Ok(next);
        }
        r = next;
    }
    Err(Error::RootSearch {
        what: "chi quantile",
    })
}

/// √(π/2), the threshold appearing in the endpoint derivative of the cone measure.
pub const SQRT_HALF_PI: f64 = 1.253_314_137_315_500_3;

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn pdf_values() {
        assert_eq!(pdf(0.0), 0.398_942_280_401_432_7);
        assert!((pdf(1.0) - 0.241_970_724_519_143_37).abs() < 1e-17);
        assert_eq!(pdf(-1.0), pdf(1.0));
    }

    #[test]
    fn cdf_values() {
        assert_eq!(cdf(0.0), 0.5);
        assert!((cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!(cdf(-8.0) <= 1e-15);
        assert!(cdf(-8.0) > 0.0);
    }

    #[test]
    fn inv_cdf_values() {
        assert_eq!(inv_cdf(0.5).unwrap(), 0.0);
        assert!((inv_cdf(0.25).unwrap() + 0.674_489_750_196_081_7).abs() < 1e-14);
        assert!((inv_cdf(0.841_344_746_068_542_9).unwrap() - 1.0).abs() < 1e-9);
        assert!(inv_cdf(0.0).is_err());
        assert!(inv_cdf(1.0).is_err());
        assert!(inv_cdf(f64::NAN).is_err());
    }

    #[test]
    fn inv_psi_values() {
        assert_eq!(psi(0.0).unwrap(), 0.0);
        assert!((inv_psi(0.5).unwrap() - 0.674_489_750_196_081_7).abs() < 1e-14);
        assert!((inv_psi(0.25).unwrap() - 0.318_639_363_964_375_1).abs() < 1e-14);
        assert!(psi(-1.0).is_err());
        assert!(inv_psi(1.0).is_err());
    }

    #[test]
    fn deep_tail_quantiles_keep_relative_accuracy() {
        for &q in &[1e-300, 1e-100, 1e-20, 1e-10] {
            let x = inv_cdf(q).unwrap();
            assert!((cdf(x) / q - 1.0).abs() < 1e-12, "q = {q}");
        }
        let x = inv_psi_complement(1e-12).unwrap();
        assert!((2.0 * sf(x) / 1e-12 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_table() {
        let t = GaussScalarTable::new(0.25).unwrap();
        assert!((psi(t.h).unwrap() - 0.25).abs() < 1e-10);
        assert!((cdf(-t.w) - 0.25).abs() < 1e-10);
        assert!(t.w > 0.0);
        let half = GaussScalarTable::new(0.5).unwrap();
        assert_eq!(half.w, 0.0);
        assert!(GaussScalarTable::new(0.7).unwrap().w < 0.0);
    }

    #[test]
    fn tail_envelope_values() {
        let (lo, hi) = tail_envelope(2.0).unwrap();
        assert!((lo - 0.020_246_6).abs() < 1e-6, "{lo}");
        assert!((hi - 0.026_995_9).abs() < 1e-6, "{hi}");
        assert!(lo <= sf(2.0) && sf(2.0) <= hi);
        assert_eq!(tail_envelope(1.0).unwrap().0, 0.0);
        let (lo, hi) = tail_envelope(5.0).unwrap();
        assert!((hi - lo) / hi <= 0.04);
        assert!(tail_envelope(0.0).is_err());
    }

    #[test]
    fn ball_measure_values() {
        assert!((ball_measure(1, 0.674_49).unwrap() - 0.5).abs() < 1e-5);
        let r = (2.0 * 2f64.ln()).sqrt();
        assert!((ball_measure(2, r).unwrap() - 0.5).abs() < 1e-15);
        for n in 1..8 {
            assert_eq!(ball_measure(n, 0.0).unwrap(), 0.0);
        }
        // n = 3 closed form: erf(r/√2) − √(2/π) r e^{−r²/2}
        for &r in &[0.1, 0.7, 1.5, 3.0, 6.0] {
            let exact = libm::erf(r / SQRT_2) - (2.0 / PI).sqrt() * r * (-0.5 * r * r).exp();
            assert!((ball_measure(3, r).unwrap() - exact).abs() < 1e-14);
            let c = ball_measure_complement(3, r).unwrap();
            assert!((c + ball_measure(3, r).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!(ball_measure(0, 1.0).is_err());
        assert!(ball_measure(2, -1.0).is_err());
    }

    #[test]
    fn chi_quantile_values() {
        assert!((chi_quantile(1, 0.5).unwrap() - 0.674_49).abs() < 1e-5);
        let p = 1.0 - (-0.5f64).exp();
        assert!((chi_quantile(2, p).unwrap() - 1.0).abs() < 1e-9);
        let r = chi_quantile(100, 0.99).unwrap();
        assert!(r <= 10.0 + 2.0 * (0.01f64.ln().abs()).sqrt());
        for n in [3, 5, 17, 100, 1000] {
            for p in [0.01, 0.3, 0.5, 0.9, 0.999] {
                let r = chi_quantile(n, p).unwrap();
                assert!(
                    (ball_measure(n, r).unwrap() - p).abs() <= 1e-9,
                    "n={n} p={p}"
                );
            }
        }
        assert!(chi_quantile(3, 1.0).is_err());
    }

    #[test]
    fn incomplete_gamma_edges() {
        assert_eq!(gamma_pq(2.0, 0.0).unwrap(), (0.0, 1.0));
        let (p, _) = gamma_pq(1.0, 1.5).unwrap();
        assert!((p - (1.0 - (-1.5f64).exp())).abs() < 1e-15);
        let (_, q) = gamma_pq(1.0, 30.0).unwrap();
        assert!((q / (-30.0f64).exp() - 1.0).abs() < 1e-13);
        assert!(gamma_pq(0.0, 1.0).is_err());
    }
}
