//! The symmetric planar cones C_θ opening to the left whose trace on the
//! vertical line x = Φ⁻¹(p) is the segment between (−w, −h) and (−w, h),
//! together with the half-plane measure m(θ) = γ₂(C_θ ∩ {y ≥ 0}).

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{check_probability, Error, Result};
use crate::gaussian::{cdf, pdf, GaussScalarTable};
use crate::quad::{self, QuadConfig};

/// Lower integration limit for m(θ); the Gaussian mass to its left is < 1e−18.
pub const TRUNCATION: f64 = -9.0;

/// Sweep grids stay this far away from the degenerate endpoints 0 and π/2.
pub const GRID_MARGIN: f64 = 1e-3;

/// Bisection on θ stops once the bracket is this narrow.
pub const THETA_TOL: f64 = 1e-10;

/// Full geometric state of C_θ at a given (p, θ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeState {
    pub p: f64,
    pub theta: f64,
    pub h: f64,
    pub w: f64,
    /// Abscissa of the apex.
    pub y: f64,
    /// Distance from the apex to (−w, h).
    pub y_prime: f64,
    pub h_y: f64,
    pub w_y: f64,
    pub u: f64,
    /// E[N | N > −u] = φ(u)/Φ(u).
    pub lambda_theta: f64,
    /// Angle at which the apex sits at the origin; only defined for p < 1/2.
    pub theta0: Option<f64>,
}

fn check_angle(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "theta",
            value: theta,
            expected: "0 < theta < pi/2",
        })
    }
}

/// Builds the state of C_θ.
pub fn cone_state(p: f64, theta: f64) -> Result<ConeState> {
    check_probability("p", p)?;
    check_angle(theta)?;
    let GaussScalarTable { h, w, .. } = GaussScalarTable::new(p)?;
    let (s, c) = theta.sin_cos();
    let y = h * c / s - w;
    let u = y * c;
    Ok(ConeState {
        p,
        theta,
        h,
        w,
        y,
        y_prime: h / s,
        h_y: y * s,
        w_y: h * s + w * c,
        u,
        lambda_theta: pdf(u) / cdf(u),
        theta0: (w > 0.0).then(|| (h / w).atan()),
    })
}

impl ConeState {
    /// The cone as a planar set: (x, v) with x ≤ y and |v| ≤ (y − x)·tan θ.
    pub fn contains(&self, x: f64, v: f64) -> bool {
        x <= self.y && v.abs() <= (self.y - x) * self.theta.tan()
    }
}

/// m(θ) = γ₂(C_θ ∩ H₊), integrating φ(x)·(Φ(top(x)) − 1/2) over the abscissa
/// where top(x) = (y − x)·tan θ is the upper edge of the vertical slice.
pub fn m_theta(p: f64, theta: f64) -> Result<f64> {
    let st = cone_state(p, theta)?;
    m_of_state(&st, &QuadConfig::with_abs_tol(1e-14))
}

/// [`m_theta`] with an explicit quadrature configuration.
pub fn m_of_state(st: &ConeState, cfg: &QuadConfig) -> Result<f64> {
    let slope = st.theta.tan();
    let apex = st.y;
    if apex <= TRUNCATION {
        return Ok(0.0);
    }
    let f = |x: f64| pdf(x) * (cdf((apex - x) * slope) - 0.5);
    // the integrand varies on the scale 1/tan θ next to the apex
    let hi = apex.min(-TRUNCATION);
    let mut breaks = vec![TRUNCATION];
    let near = apex - 8.0 / slope;
    if near > TRUNCATION && near < hi {
        breaks.push(near);
    }
    breaks.push(hi);
    Ok(quad::integrate_breaks(f, &breaks, cfg)?.value)
}

/// Closed-form m′(θ) = Φ(u)·φ(h_y)·(λ_θ − w_y), evaluated as
/// φ(h_y)·(φ(u) − Φ(u)·w_y) so that no division is needed.
pub fn m_prime(st: &ConeState) -> f64 {
    pdf(st.h_y) * (pdf(st.u) - cdf(st.u) * st.w_y)
}

/// Limit of m′ as θ → 0⁺: −w·e^{−h²/2}/√(2π).
pub fn m_prime_at_zero(p: f64) -> Result<f64> {
    let t = GaussScalarTable::new(p)?;
    Ok(-t.w * pdf(t.h))
}

/// Limit of m′ as θ → π/2⁻. There u → 0, h_y → −w and w_y → h, so the
/// closed form tends to e^{−w²/2}/√(8π)·(√(2/π) − h), positive whenever
/// h < √(2/π) (in particular for all p ≤ 1/2).
pub fn m_prime_at_right_angle(p: f64) -> Result<f64> {
    let t = GaussScalarTable::new(p)?;
    Ok((-0.5 * t.w * t.w).exp() / (8.0 * PI).sqrt() * ((2.0 / PI).sqrt() - t.h))
}

/// `n` equally spaced angles covering [GRID_MARGIN, π/2 − GRID_MARGIN].
pub fn theta_grid(n: usize) -> Vec<f64> {
    let lo = GRID_MARGIN;
    let hi = FRAC_PI_2 - GRID_MARGIN;
    match n {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Location of the interior minimum of m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPointReport {
    pub p: f64,
    pub theta_star: f64,
    pub m_at_star: f64,
    pub sign_changes: usize,
}

/// Counts sign changes of m′ on a `grid`-point sweep and bisects the unique
/// one down to [`THETA_TOL`].
pub fn find_critical_theta(p: f64, grid: usize) -> Result<CriticalPointReport> {
    check_probability("p", p)?;
    if p > 0.5 {
        return Err(Error::Domain {
            name: "p",
            value: p,
            expected: "0 < p <= 1/2",
        });
    }
    let thetas = theta_grid(grid.max(2));
    let signs: Vec<bool> = thetas
        .iter()
        .map(|&t| cone_state(p, t).map(|st| m_prime(&st) > 0.0))
        .collect::<Result<_>>()?;
    let changes: Vec<usize> = (1..signs.len())
        .filter(|&i| signs[i] != signs[i - 1])
        .collect();
    match changes.len() {
        0 => return Err(Error::NoCriticalPoint),
        1 => {}
        count => {
            return Err(Error::CriticalPointNotUnique {
                count,
                locations: changes.iter().map(|&i| thetas[i]).collect(),
            })
        }
    }
    let i = changes[0];
    let (mut lo, mut hi) = (thetas[i - 1], thetas[i]);
    let lo_positive = signs[i - 1];
    while hi - lo > THETA_TOL {
        let mid = 0.5 * (lo + hi);
        if (m_prime(&cone_state(p, mid)?) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta_star = 0.5 * (lo + hi);
    Ok(CriticalPointReport {
        p,
        theta_star,
        m_at_star: m_theta(p, theta_star)?,
        sign_changes: 1,
    })
}

/// Left-hand side minus right-hand side of the inequality that forces
/// m″ > 0 at critical points with positive apex abscissa:
/// (h² + wx)(x³ + 2xh² − wh²) − h²(x − w), where x = y + w > w.
pub fn lem5_margin(h: f64, w: f64, x: f64) -> f64 {
    let h2 = h * h;
    (h2 + w * x) * (x * x * x + 2.0 * x * h2 - w * h2) - h2 * (x - w)
}

/// Smallest x = y + w compatible with a critical point: (y′)² = x² + h² must
/// exceed 2/π there, so x > √(2/π − h²) (and x > w).
pub fn lem5_admissible_start(h: f64, w: f64) -> f64 {
    (2.0 / PI - h * h).max(0.0).sqrt().max(w)
}

/// `n` abscissae spread over (start, start + span] with
/// start = [`lem5_admissible_start`].
pub fn lem5_admissible_grid(p: f64, n: usize, span: f64) -> Result<Vec<f64>> {
    let t = GaussScalarTable::new(p)?;
    let start = lem5_admissible_start(t.h, t.w);
    Ok((1..=n)
        .map(|i| start + span * i as f64 / n as f64)
        .collect())
}

/// Evaluates [`lem5_margin`] on `xs` and returns the `(x, margin)` pairs that
/// fail to be strictly positive.
pub fn check_lem5_inequality(p: f64, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let t = GaussScalarTable::new(p)?;
    if p > 0.5 {
        return Err(Error::Domain {
            name: "p",
            value: p,
            expected: "0 < p <= 1/2",
        });
    }
    if let Some(&bad) = xs.iter().find(|&&x| !(x > t.w)) {
        return Err(Error::Domain {
            name: "x",
            value: bad,
            expected: "x > w",
        });
    }
    Ok(xs
        .iter()
        .map(|&x| (x, lem5_margin(t.h, t.w, x)))
        .filter(|&(_, m)| !(m > 0.0))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim7Report {
    pub p: f64,
    pub theta_star: f64,
    /// Apex abscissa at θ*; the claim concerns critical points with y > 0.
    pub y_at_star: f64,
    pub y_prime_sq: f64,
    /// (y′)² − 2/π.
    pub margin: f64,
    pub holds: bool,
}

/// At the critical angle θ*, (w + y)² + h² = (y′)² exceeds 2/π.
pub fn check_claim7(p: f64) -> Result<Claim7Report> {
    let crit = find_critical_theta(p, 1000)?;
    let st = cone_state(p, crit.theta_star)?;
    let y_prime_sq = st.y_prime * st.y_prime;
    let margin = y_prime_sq - 2.0 / PI;
    Ok(Claim7Report {
        p,
        theta_star: crit.theta_star,
        y_at_star: st.y,
        y_prime_sq,
        margin,
        holds: margin > 0.0,
    })
}

/// One failed evaluation of the h/w inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim8Violation {
    pub p: f64,
    /// (h² + w²)(2/π + h²) − h²
    pub product_form: f64,
    /// h² + w² + (7/11)·w²/h² − 4/11
    pub intermediate_form: f64,
}

/// Checks (h² + w²)(2/π + h²) ≥ h² and h² + w² + (7/11)w²/h² ≥ 4/11 for every
/// p in `ps`, returning the probabilities where either fails.
pub fn check_claim8(ps: &[f64]) -> Result<Vec<Claim8Violation>> {
    let mut out = Vec::new();
    for &p in ps {
        if p > 0.5 {
            return Err(Error::Domain {
                name: "p",
                value: p,
                expected: "0 < p <= 1/2",
            });
        }
        let GaussScalarTable { h, w, .. } = GaussScalarTable::new(p)?;
        let (h2, w2) = (h * h, w * w);
        let product_form = (h2 + w2) * (2.0 / PI + h2) - h2;
        let intermediate_form = h2 + w2 + 7.0 / 11.0 * w2 / h2 - 4.0 / 11.0;
        if product_form < 0.0 || intermediate_form < 0.0 {
            out.push(Claim8Violation {
                p,
                product_form,
                intermediate_form,
            });
        }
    }
    Ok(out)
}

/// Result of sweeping m(θ) over a θ grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub p: f64,
    pub points: usize,
    /// max over the grid of m(θ) − p/2.
    pub max_excess: f64,
    pub argmax_theta: f64,
    /// Number of grid points with m(θ) ≥ p/2.
    pub violations: usize,
    /// For p > 1/2 only: the bound q(p) = Φ(√2·Φ⁻¹(p)) and whether
    /// max 2m(θ) stays below it. This is a conjecture check, never asserted.
    pub q: Option<f64>,
    pub conjecture_holds: Option<bool>,
}

/// Evaluates m on `points` angles of [`theta_grid`].
pub fn sweep_verify(p: f64, points: usize) -> Result<SweepReport> {
    check_probability("p", p)?;
    let thetas = theta_grid(points);
    let half = 0.5 * p;
    let values: Vec<f64> = thetas
        .par_iter()
        .map(|&t| m_theta(p, t))
        .collect::<Result<_>>()?;
    let (arg, max) = values
        .iter()
        .enumerate()
        .map(|(i, &m)| (i, m - half))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::Domain {
            name: "points",
            value: 0.0,
            expected: "points >= 1",
        })?;
    let violations = values.iter().filter(|&&m| m >= half).count();
    let (q, conjecture_holds) = if p > 0.5 {
        let q = bounds::q_of(p)?;
        (Some(q), Some(2.0 * (max + half) <= q))
    } else {
        (None, None)
    };
    Ok(SweepReport {
        p,
        points,
        max_excess: max,
        argmax_theta: thetas[arg],
        violations,
        q,
        conjecture_holds,
    })
}
