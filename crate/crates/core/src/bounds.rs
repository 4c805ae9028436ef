//! Closed-form bound functions of the Gaussian measure p and the asymptotic
//! sweeps built from them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::gaussian::{cdf, chi_quantile, inv_cdf, inv_psi, inv_psi_complement};

fn require_above_half(p: f64) -> Result<()> {
    check_probability("p", p)?;
    if p > 0.5 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "p",
            value: p,
            expected: "1/2 < p < 1",
        })
    }
}

/// (2Ψ⁻¹(1/2))⁻¹, the value of the bound functions on (1/2, 1).
pub fn half_measure_constant() -> f64 {
    1.0 / (2.0 * inv_psi(0.5).expect("1/2 is in range"))
}

/// Upper bound on α(B₂ⁿ, K) for any closed convex K of measure p.
pub fn f_main(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    if p <= 0.5 {
        Ok(1.0 / (2.0 * inv_psi(p)?))
    } else {
        Ok(half_measure_constant())
    }
}

/// The symmetric-body α bound; same formula as [`f_main`].
pub fn f_alpha(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    if p <= 0.5 {
        Ok(0.5 / inv_psi(p)?)
    } else {
        Ok(0.5 / inv_psi(0.5)?)
    }
}

/// The symmetric-body β bound 5·Ψ⁻¹(1/2)/Ψ⁻¹(p), capped at 5 above p = 1/2.
pub fn f_beta(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    if p <= 0.5 {
        Ok(5.0 * inv_psi(0.5)? / inv_psi(p)?)
    } else {
        Ok(5.0)
    }
}

/// q(p) = Φ(√2·Φ⁻¹(p)), defined for p > 1/2.
pub fn q_of(p: f64) -> Result<f64> {
    require_above_half(p)?;
    Ok(cdf(std::f64::consts::SQRT_2 * inv_cdf(p)?))
}

/// pₙ = Φ(2^{−n/2}·Φ⁻¹(p)).
pub fn p_n(p: f64, n: usize) -> Result<f64> {
    require_above_half(p)?;
    Ok(cdf(2f64.powf(-0.5 * n as f64) * inv_cdf(p)?))
}

/// fₙ(p) = (2Ψ⁻¹(pₙ))⁻¹.
pub fn f_n(p: f64, n: usize) -> Result<f64> {
    Ok(0.5 / inv_psi(p_n(p, n)?)?)
}

/// √n/(2Φ⁻¹(p)), the bound obtained from the inscribed ball of radius Φ⁻¹(p).
pub fn r_ball(p: f64, n: usize) -> Result<f64> {
    require_above_half(p)?;
    Ok((n as f64).sqrt() / (2.0 * inv_cdf(p)?))
}

/// t_{p,n} = Ψ⁻¹(p^{1/n}), the half-side of the cube of measure p.
pub fn t_pn(p: f64, n: usize) -> Result<f64> {
    check_probability("p", p)?;
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            expected: "n >= 1",
        });
    }
    let tail = -(p.ln() / n as f64).exp_m1();
    inv_psi_complement(tail)
}

/// All bound values attached to one probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundProfile {
    pub p: f64,
    pub f: f64,
    pub f_alpha: f64,
    pub f_beta: f64,
    pub q: Option<f64>,
    pub f_n: BTreeMap<usize, f64>,
    pub t_pn: BTreeMap<usize, f64>,
    pub r_ball: BTreeMap<usize, f64>,
}

/// Evaluates every bound at `p`; the fields that only make sense for p > 1/2
/// are left empty below that.
pub fn bound_profile(p: f64, ns: &[usize]) -> Result<BoundProfile> {
    check_probability("p", p)?;
    let above = p > 0.5;
    let mut profile = BoundProfile {
        p,
        f: f_main(p)?,
        f_alpha: f_alpha(p)?,
        f_beta: f_beta(p)?,
        q: if above { Some(q_of(p)?) } else { None },
        f_n: BTreeMap::new(),
        t_pn: BTreeMap::new(),
        r_ball: BTreeMap::new(),
    };
    for &n in ns {
        profile.t_pn.insert(n, t_pn(p, n)?);
        if above {
            profile.f_n.insert(n, f_n(p, n)?);
            profile.r_ball.insert(n, r_ball(p, n)?);
        }
    }
    Ok(profile)
}

/// inf over p ∈ (0, 1/2] of Ψ⁻¹(p^{1/n}) / (2Ψ⁻¹(p)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioInfimum {
    pub n: usize,
    pub inf_value: f64,
    pub argmin_p: f64,
    /// inf_value / √(ln n)
    pub normalized: f64,
}

/// Lower end of the p grid used by [`ratio_infimum`].
pub const RATIO_P_MIN: f64 = 1e-8;

fn cube_ratio(p: f64, n: usize) -> Result<f64> {
    Ok(t_pn(p, n)? / (2.0 * inv_psi(p)?))
}

/// Minimizes the cube-to-slab ratio over a log-spaced grid of p in
/// [1e−8, 1/2] followed by golden-section refinement in ln p.
pub fn ratio_infimum(n: usize) -> Result<RatioInfimum> {
    if n < 2 {
        return Err(Error::Domain {
            name: "n",
            value: n as f64,
            expected: "n >= 2",
        });
    }
    const GRID: usize = 400;
    let (lmin, lmax) = (RATIO_P_MIN.ln(), 0.5f64.ln());
    let at = |i: usize| lmin + (lmax - lmin) * i as f64 / (GRID - 1) as f64;
    let mut best = (GRID - 1, cube_ratio(0.5, n)?);
    for i in 0..GRID - 1 {
        let v = cube_ratio(at(i).exp(), n)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let (mut a, mut b) = (at(best.0.saturating_sub(1)), at((best.0 + 1).min(GRID - 1)));
    let g = |l: f64| cube_ratio(l.exp(), n);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (g(c)?, g(d)?);
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = g(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = g(d)?;
        }
    }
    let mut arg = 0.5 * (a + b);
    let mut value = g(arg)?;
    if best.1 < value {
        arg = at(best.0);
        value = best.1;
    }
    let argmin_p = arg.exp().min(0.5);
    Ok(RatioInfimum {
        n,
        inf_value: value,
        argmin_p,
        normalized: value / (n as f64).ln().sqrt(),
    })
}

/// Ball-based lower bounds on the balancing constants of the ball of
/// measure p in dimension n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub n: usize,
    pub r_p: f64,
    /// √n / R_p(n)
    pub beta_ratio: f64,
    /// √n / (2 R_p(n))
    pub alpha_ratio: f64,
    /// 1 − 2√|ln(1−p)|/√n, only when n ≥ |ln(1−p)|.
    pub concentration_bound: Option<f64>,
    pub holds: bool,
}

pub fn limit_lower_bounds(p: f64, ns: &[usize]) -> Result<Vec<LimitRow>> {
    check_probability("p", p)?;
    let log_tail = (1.0 - p).ln().abs();
    ns.iter()
        .map(|&n| {
            let r_p = chi_quantile(n, p)?;
            let root_n = (n as f64).sqrt();
            let beta_ratio = root_n / r_p;
            let concentration_bound =
                (n as f64 >= log_tail).then(|| 1.0 - 2.0 * log_tail.sqrt() / root_n);
            Ok(LimitRow {
                n,
                r_p,
                beta_ratio,
                alpha_ratio: beta_ratio / 2.0,
                concentration_bound,
                holds: concentration_bound.is_none_or(|b| beta_ratio >= b),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_values() {
        let b = bound_profile(0.5, &[]).unwrap();
        assert!((b.f - 0.741_30).abs() < 1e-5);
        assert_eq!(b.f, b.f_alpha);
        let b = bound_profile(0.25, &[]).unwrap();
        assert!((b.f_beta - 10.583).abs() < 1e-3, "{}", b.f_beta);
        let b = bound_profile(0.75, &[2]).unwrap();
        let pn = p_n(0.75, 2).unwrap();
        assert!((pn - 0.6320).abs() < 1e-4);
        assert!((b.f_n[&2] - 0.5 / inv_psi(pn).unwrap()).abs() < 1e-15);
        assert!(b.q.is_some());
    }

    #[test]
    fn below_half_fields_are_empty() {
        let b = bound_profile(0.3, &[2, 5]).unwrap();
        assert!(b.q.is_none() && b.f_n.is_empty() && b.r_ball.is_empty());
        assert_eq!(b.t_pn.len(), 2);
        assert!(q_of(0.3).is_err());
        assert!(f_n(0.5, 3).is_err());
    }

    #[test]
    fn cube_half_side() {
        // one dimension: t_{p,1} = Ψ⁻¹(p)
        assert!((t_pn(0.3, 1).unwrap() - inv_psi(0.3).unwrap()).abs() < 1e-13);
        let t = t_pn(0.5, 1_000_000).unwrap();
        assert!(t > 4.0 && t < 6.0);
    }

    #[test]
    fn infimum_band() {
        let r = ratio_infimum(100).unwrap();
        assert!((0.2..=5.0).contains(&r.normalized));
        let at_half = t_pn(0.5, 100).unwrap() / (2.0 * inv_psi(0.5).unwrap());
        assert!(r.inf_value <= at_half + 1e-15);
        assert!(ratio_infimum(1).is_err());
    }

    #[test]
    fn limit_rows() {
        let rows = limit_lower_bounds(0.99, &[10, 100, 1000]).unwrap();
        assert!(rows.iter().all(|r| r.holds));
        assert!(rows.windows(2).all(|w| w[1].beta_ratio > w[0].beta_ratio));
        let last = rows[2];
        assert!((last.concentration_bound.unwrap() - 0.8642).abs() < 1e-4);
        assert!(last.beta_ratio < 1.0);
        for r in &rows {
            assert_eq!(r.alpha_ratio, r.beta_ratio / 2.0);
        }
    }
}
