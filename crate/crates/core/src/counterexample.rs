//! Truncated cones C_{d,t} = Conv(0, d(eₙ + t·B)), their Gaussian measure,
//! and a planar family of shifted cones of fixed measure whose balancing
//! constant against the Euclidean ball grows like 1/s.

use serde::{Deserialize, Serialize};

use crate::balancing::{min_sign_balance, VectorTuple};
use crate::body::ConvexBody;
use crate::error::{check_probability, Error, Result};
use crate::gaussian::{ball_measure, pdf};
use crate::quad::{integrate, QuadConfig};

/// Upper cut-off for z integrals; the Gaussian tail beyond is below 1e−30.
const Z_MAX: f64 = 12.0;
/// Extra measure asked of C_{d,t} over p + max(s)/2.
pub const MEASURE_MARGIN: f64 = 0.02;

fn check_cone(n: usize, d: f64, t: f64) -> Result<()> {
    if !(2..=6).contains(&n) {
        return Err(Error::Domain {
            name: "n",
            value: n as f64,
            expected: "2 <= n <= 6",
        });
    }
    if !(d >= 0.0) {
        return Err(Error::Domain {
            name: "d",
            value: d,
            expected: "d >= 0",
        });
    }
    if !(t > 0.0) || t.is_infinite() {
        return Err(Error::Domain {
            name: "t",
            value: t,
            expected: "0 < t < inf",
        });
    }
    Ok(())
}

/// γₙ(C_{d,t}) = ∫₀^d φ(z)·γ_{n−1}(tz·B) dz; `d` may be infinite.
pub fn cone_measure(n: usize, d: f64, t: f64) -> Result<f64> {
    shifted_cone_measure(n, d, t, 0.0)
}

/// γₙ(C_{d,t} − s·eₙ).
pub fn shifted_cone_measure(n: usize, d: f64, t: f64, s: f64) -> Result<f64> {
    check_cone(n, d, t)?;
    let (lo, hi) = ((-s).max(-Z_MAX), (d - s).min(Z_MAX));
    if lo >= hi {
        return Ok(0.0);
    }
    let f =
        |z: f64| pdf(z) * ball_measure(n - 1, t * (z + s).max(0.0)).expect("radius is nonnegative");
    Ok(integrate(f, lo, hi, &QuadConfig::with_abs_tol(1e-12))?.value)
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let u = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    (p[0] - a[0] - u * dx).hypot(p[1] - a[1] - u * dy)
}

/// Euclidean distance from a point of the plane to the triangle C_{d,t}
/// with apex 0 and top edge from (−dt, d) to (dt, d).
pub fn dist_to_cone(point: [f64; 2], d: f64, t: f64) -> Result<f64> {
    check_cone(2, d, t)?;
    let [x, y] = point;
    if (0.0..=d).contains(&y) && x.abs() <= t * y {
        return Ok(0.0);
    }
    let o = [0.0, 0.0];
    let (left, right) = ([-d * t, d], [d * t, d]);
    Ok(segment_distance(point, o, left)
        .min(segment_distance(point, o, right))
        .min(segment_distance(point, left, right)))
}

/// One certified member of the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleInstance {
    pub p: f64,
    pub n: usize,
    /// Aperture with γ₂ of the infinite cone equal to p.
    pub t_p: f64,
    pub t: f64,
    pub d: f64,
    pub s: f64,
    /// γ₂(C_{d,t})
    pub gamma: f64,
    /// γ₂(C_{d,t} − s·e₂)
    pub gamma_shifted: f64,
    /// dist(P⁰, C_{d,t})
    pub delta: f64,
    pub tuple: Vec<Vec<f64>>,
    /// delta / s
    pub beta_lb: f64,
    /// min over signs of the shifted-cone gauge of the signed tuple sum.
    pub balance: f64,
    /// The cone contains the disc of radius n around (0, ball_center).
    pub ball_center: f64,
    pub ball_inside: bool,
    /// No point of P⁰ lies in the shifted cone.
    pub separated: bool,
}

impl CounterexampleInstance {
    pub fn certified(&self) -> bool {
        self.balance >= self.beta_lb - 1e-6
            && self.gamma_shifted >= self.p
            && self.gamma - self.s / 2.0 > self.p
            && self.ball_inside
            && self.separated
    }
}

fn bisect_increasing<F: Fn(f64) -> Result<f64>>(
    f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64> {
    if f(lo)? > target || f(hi)? < target {
        return Err(Error::RootSearch {
            what: "cone aperture",
        });
    }
    while hi - lo > 1e-13 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Aperture t_p with γ₂ of the infinite planar cone equal to p.
pub fn critical_aperture(p: f64) -> Result<f64> {
    bisect_increasing(|t| cone_measure(2, f64::INFINITY, t), p, 1e-8, 1e8)
}

/// Builds the planar instances for each shift in `shifts`. The aperture is
/// chosen so the infinite cone has measure p + max(s)/2 + margin, the height
/// is doubled until the truncated cone keeps half of that margin and holds
/// a disc of radius 2, and the tuple is {e₁, a·e₂} with a = min(1, 1/(2t)).
pub fn build_counterexample(p: f64, shifts: &[f64]) -> Result<Vec<CounterexampleInstance>> {
    check_probability("p", p)?;
    if p >= 0.5 {
        return Err(Error::Domain {
            name: "p",
            value: p,
            expected: "0 < p < 1/2",
        });
    }
    if shifts.is_empty() || shifts.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::Infeasible(
            "shifts must be positive and non-empty".into(),
        ));
    }
    let n = 2usize;
    let s_max = shifts.iter().cloned().fold(0.0, f64::max);
    let target = p + s_max / 2.0 + MEASURE_MARGIN;
    if target >= 0.5 - 1e-6 {
        return Err(Error::Infeasible(format!(
            "target measure {target} is not below 1/2; use smaller shifts"
        )));
    }
    let t_p = critical_aperture(p)?;
    let t = bisect_increasing(|t| cone_measure(2, f64::INFINITY, t), target, t_p, 1e8)?;

    let radius = n as f64;
    let ball_center = radius * (1.0 + t * t).sqrt() / t;
    let mut d = (ball_center + radius).max(1.0);
    let mut gamma = cone_measure(n, d, t)?;
    let mut doublings = 0;
    while gamma <= p + s_max / 2.0 + MEASURE_MARGIN / 2.0 {
        doublings += 1;
        if doublings > 60 {
            return Err(Error::Infeasible(
                "no height reaches the target measure".into(),
            ));
        }
        d *= 2.0;
        gamma = cone_measure(n, d, t)?;
    }
    let ball_inside = (0..720).all(|i| {
        let a = std::f64::consts::TAU * i as f64 / 720.0;
        let (x, y) = (radius * a.cos(), ball_center + radius * a.sin());
        y >= -1e-12 && y <= d + 1e-12 && x.abs() <= t * y + 1e-9
    });

    let a = (0.5 / t).min(1.0);
    let tuple = vec![vec![1.0, 0.0], vec![0.0, a]];
    let vertices = [[1.0, a], [-1.0, a], [1.0, -a], [-1.0, -a]];
    let delta = vertices
        .iter()
        .map(|&v| dist_to_cone(v, d, t))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let tuple_v = VectorTuple::new(tuple.clone())?;

    shifts
        .iter()
        .map(|&s| {
            if s >= delta / 2.0 {
                return Err(Error::Infeasible(format!(
                    "shift {s} is not below delta/2 = {}",
                    delta / 2.0
                )));
            }
            let body = ConvexBody::ShiftedCone {
                n,
                height: d,
                aperture: t,
                shift: s,
            };
            let balance = min_sign_balance(&tuple_v, &body)?.value;
            Ok(CounterexampleInstance {
                p,
                n,
                t_p,
                t,
                d,
                s,
                gamma,
                gamma_shifted: shifted_cone_measure(n, d, t, s)?,
                delta,
                tuple: tuple.clone(),
                beta_lb: delta / s,
                balance,
                ball_center,
                ball_inside,
                separated: vertices.iter().all(|v| !body.contains(v)),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::psi;
    use std::f64::consts::PI;

    #[test]
    fn planar_infinite_cone_is_an_angle() {
        for t in [0.3, 1.0, 4.0] {
            let m = cone_measure(2, f64::INFINITY, t).unwrap();
            assert!((m - t.atan() / PI).abs() < 1e-11, "{t}: {m}");
        }
        assert_eq!(cone_measure(2, 0.0, 1.0).unwrap(), 0.0);
        assert!((critical_aperture(0.25).unwrap() - 1.0).abs() < 1e-10);
        // the integrand of the d = ∞ case written with Ψ
        let direct = integrate(
            |z| pdf(z) * psi(2.0 * z).unwrap(),
            0.0,
            12.0,
            &QuadConfig::default(),
        )
        .unwrap()
        .value;
        assert!((cone_measure(2, f64::INFINITY, 2.0).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn distances() {
        assert_eq!(dist_to_cone([0.0, 1.0], 5.0, 1.0).unwrap(), 0.0);
        assert_eq!(dist_to_cone([0.0, -1.0], 5.0, 0.5).unwrap(), 1.0);
        let side = dist_to_cone([-1.0, 0.0], 5.0, 0.5).unwrap();
        assert!((side - 1.0 / 1.25f64.sqrt()).abs() < 1e-15);
        let t = 0.01;
        let eps = 1e-3;
        let d = dist_to_cone([1.0 + eps, 0.0], 1e3, t).unwrap();
        let ray = (1.0 + eps) / (1.0 + t * t).sqrt();
        assert!((d - ray).abs() < 1e-12);
        // above the top edge
        assert!((dist_to_cone([0.0, 7.0], 5.0, 1.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn quarter_instance() {
        let out = build_counterexample(0.25, &[1e-1, 1e-2, 1e-3]).unwrap();
        assert_eq!(out.len(), 3);
        for w in out.windows(2) {
            assert!((w[1].beta_lb / w[0].beta_lb - 10.0).abs() < 1e-9);
        }
        for inst in &out {
            assert!(inst.certified(), "{inst:?}");
            assert_eq!(inst.beta_lb, inst.delta / inst.s);
        }
        assert!(build_counterexample(0.6, &[0.1]).is_err());
        assert!(matches!(
            build_counterexample(0.25, &[0.5]),
            Err(Error::Infeasible(_))
        ));
    }
}
