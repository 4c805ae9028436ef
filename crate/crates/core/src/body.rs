//! Convex bodies given by a membership test and a gauge (Minkowski
//! functional) ‖x‖_V = min{r > 0 : x ∈ rV}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative width at which gauge bisection stops.
pub const GAUGE_TOL: f64 = 1e-10;

/// Membership slack used when comparing against the boundary.
const BOUNDARY_SLACK: f64 = 1e-12;

/// A closed convex body in ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexBody {
    /// `radius · B_pⁿ`; `p` may be `"inf"` in JSON.
    LpBall {
        n: usize,
        #[serde(with = "lp_exponent")]
        p: f64,
        #[serde(default = "one")]
        radius: f64,
    },
    /// {x : |⟨ν, x⟩| ≤ half_width} with ν the normalized `normal`.
    Slab { normal: Vec<f64>, half_width: f64 },
    /// {x : ⟨aᵢ, x⟩ ≤ bᵢ for all i}.
    Polytope {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    /// Conv(0, d(eₙ + t·B)) − s·eₙ with B the unit ball of eₙ^⊥.
    ShiftedCone {
        n: usize,
        height: f64,
        aperture: f64,
        shift: f64,
    },
    /// factor · body
    Scaled { body: Box<ConvexBody>, factor: f64 },
    /// body + offset
    Translated {
        body: Box<ConvexBody>,
        offset: Vec<f64>,
    },
    /// body × ℝ, the extra coordinate appended last.
    Cylinder { body: Box<ConvexBody> },
}

fn one() -> f64 {
    1.0
}

mod lp_exponent {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(p),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => {
                Ok(f64::INFINITY)
            }
            Raw::Text(t) => Err(serde::de::Error::custom(format!("bad exponent `{t}`"))),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn lp_norm(x: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        norm2(x)
    } else {
        x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

impl ConvexBody {
    pub fn lp_ball(n: usize, p: f64) -> Self {
        Self::LpBall { n, p, radius: 1.0 }
    }

    pub fn euclidean_ball(n: usize, radius: f64) -> Self {
        Self::LpBall { n, p: 2.0, radius }
    }

    /// The slab ℝ^{n−1} × [−c, c] (normal eₙ).
    pub fn coordinate_slab(n: usize, half_width: f64) -> Self {
        let mut normal = vec![0.0; n];
        normal[n - 1] = 1.0;
        Self::Slab { normal, half_width }
    }

    pub fn scaled(self, factor: f64) -> Self {
        Self::Scaled {
            body: Box::new(self),
            factor,
        }
    }

    pub fn translated(self, offset: Vec<f64>) -> Self {
        Self::Translated {
            body: Box::new(self),
            offset,
        }
    }

    pub fn cylinder(self) -> Self {
        Self::Cylinder {
            body: Box::new(self),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::LpBall { n, .. } | Self::ShiftedCone { n, .. } => *n,
            Self::Slab { normal, .. } => normal.len(),
            Self::Polytope { normals, .. } => normals.first().map_or(0, Vec::len),
            Self::Scaled { body, .. } | Self::Translated { body, .. } => body.dim(),
            Self::Cylinder { body } => body.dim() + 1,
        }
    }

    /// Checks the parameters, including that the origin is interior.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidBody(m.to_string()));
        match self {
            Self::LpBall { n, p, radius } => {
                if *n == 0 || !(*p >= 1.0) || !(*radius > 0.0) || radius.is_infinite() {
                    return bad("lp ball needs n >= 1, p >= 1, 0 < radius < inf");
                }
            }
            Self::Slab { normal, half_width } => {
                if normal.is_empty() || !(norm2(normal) > 0.0) || !(*half_width > 0.0) {
                    return bad("slab needs a nonzero normal and positive half-width");
                }
            }
            Self::Polytope { normals, offsets } => {
                let n = self.dim();
                if n == 0 || normals.len() != offsets.len() {
                    return bad("polytope needs matching normals and offsets");
                }
                if normals.iter().any(|a| a.len() != n || !(norm2(a) > 0.0)) {
                    return bad("polytope normals must be nonzero and of equal length");
                }
            }
            Self::ShiftedCone {
                n,
                height,
                aperture,
                shift,
            } => {
                if *n < 2 || !(*height > 0.0) || !(*aperture > 0.0) || !(*shift >= 0.0) {
                    return bad("shifted cone needs n >= 2, height > 0, aperture > 0, shift >= 0");
                }
            }
            Self::Scaled { body, factor } => {
                if !(*factor > 0.0) || factor.is_infinite() {
                    return bad("scale factor must be positive and finite");
                }
                body.validate_params()?;
            }
            Self::Translated { body, offset } => {
                if offset.len() != body.dim() {
                    return Err(Error::Dimension {
                        expected: body.dim(),
                        found: offset.len(),
                    });
                }
                body.validate_params()?;
            }
            Self::Cylinder { body } => body.validate_params()?,
        }
        if !(self.inradius() > 0.0) {
            return Err(Error::OriginNotInterior);
        }
        Ok(())
    }

    fn validate_params(&self) -> Result<()> {
        match self.validate() {
            Err(Error::OriginNotInterior) => Ok(()),
            other => other,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Self::LpBall { p, radius, .. } => lp_norm(x, *p) <= radius * (1.0 + BOUNDARY_SLACK),
            Self::Slab { .. }
            | Self::Polytope { .. }
            | Self::Scaled { .. }
            | Self::Cylinder { .. } => {
                self.closed_form_gauge(x).expect("closed form") <= 1.0 + BOUNDARY_SLACK
            }
            Self::ShiftedCone {
                height,
                aperture,
                shift,
                ..
            } => {
                let (last, head) = x.split_last().expect("n >= 2");
                let z = last + shift;
                let slack = BOUNDARY_SLACK * (1.0 + z.abs());
                z >= -slack && z <= height + slack && norm2(head) <= aperture * z + slack
            }
            Self::Translated { body, offset } => {
                let y: Vec<f64> = x.iter().zip(offset).map(|(a, b)| a - b).collect();
                body.contains(&y)
            }
        }
    }

    fn closed_form_gauge(&self, x: &[f64]) -> Option<f64> {
        match self {
            Self::LpBall { p, radius, .. } => Some(lp_norm(x, *p) / radius),
            Self::Slab { normal, half_width } => {
                Some(dot(normal, x).abs() / (norm2(normal) * half_width))
            }
            Self::Polytope { normals, offsets } => Some(
                normals
                    .iter()
                    .zip(offsets)
                    .fold(0.0_f64, |m, (a, b)| m.max(dot(a, x) / b)),
            ),
            Self::Scaled { body, factor } => Some(body.gauge_unchecked(x) / factor),
            Self::Cylinder { body } => Some(body.gauge_unchecked(&x[..x.len() - 1])),
            Self::ShiftedCone { .. } | Self::Translated { .. } => None,
        }
    }

    /// Gauge without re-validating the body. Callers must have run
    /// [`ConvexBody::validate`] once.
    pub fn gauge_unchecked(&self, x: &[f64]) -> f64 {
        if let Some(g) = self.closed_form_gauge(x) {
            return g;
        }
        self.bisect_gauge(x)
    }

    /// Bisection on r ↦ [x/r ∈ V] over [0, 2‖x‖/r_in]; the upper end of the
    /// bracket always satisfies the membership test.
    fn bisect_gauge(&self, x: &[f64]) -> f64 {
        let len = norm2(x);
        if len == 0.0 {
            return 0.0;
        }
        let inside = |r: f64| {
            let y: Vec<f64> = x.iter().map(|v| v / r).collect();
            self.contains(&y)
        };
        let mut lo = 0.0;
        let mut hi = 2.0 * len / self.inradius();
        while !inside(hi) {
            lo = hi;
            hi *= 2.0;
        }
        while hi - lo > GAUGE_TOL * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if inside(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// ‖x‖_V; errors when the origin is not interior or dimensions disagree.
    pub fn gauge(&self, x: &[f64]) -> Result<f64> {
        self.validate()?;
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(self.gauge_unchecked(x))
    }

    /// Radius of a Euclidean ball around the origin contained in the body
    /// (non-positive when the origin is not interior).
    pub fn inradius(&self) -> f64 {
        match self {
            Self::LpBall { n, p, radius } => {
                let exponent = (1.0 / p - 0.5).min(0.0);
                radius * (*n as f64).powf(exponent)
            }
            Self::Slab { half_width, .. } => *half_width,
            Self::Polytope { normals, offsets } => normals
                .iter()
                .zip(offsets)
                .map(|(a, b)| b / norm2(a))
                .fold(f64::INFINITY, f64::min),
            Self::ShiftedCone {
                height,
                aperture,
                shift,
                ..
            } => {
                let lateral = shift * aperture / (1.0 + aperture * aperture).sqrt();
                lateral.min(height - shift)
            }
            Self::Scaled { body, factor } => factor * body.inradius(),
            Self::Translated { body, offset } => body.inradius() - norm2(offset),
            Self::Cylinder { body } => body.inradius(),
        }
    }

    /// Radius of a centered Euclidean ball containing the body, if bounded.
    pub fn circumradius(&self) -> Option<f64> {
        match self {
            Self::LpBall { n, p, radius } => {
                let exponent = (0.5 - 1.0 / p).max(0.0);
                Some(radius * (*n as f64).powf(exponent))
            }
            Self::Slab { normal, half_width } => (normal.len() == 1).then_some(*half_width),
            Self::Polytope { .. } | Self::Cylinder { .. } => None,
            Self::ShiftedCone {
                height,
                aperture,
                shift,
                ..
            } => {
                let rim = (height * aperture).hypot(height - shift);
                Some(rim.max(*shift))
            }
            Self::Scaled { body, factor } => body.circumradius().map(|r| r * factor),
            Self::Translated { body, offset } => body.circumradius().map(|r| r + norm2(offset)),
        }
    }

    /// Whether V = −V (decided structurally).
    pub fn is_symmetric(&self) -> bool {
        match self {
            Self::LpBall { .. } | Self::Slab { .. } => true,
            Self::Polytope { normals, offsets } => normals.iter().zip(offsets).all(|(a, b)| {
                normals.iter().zip(offsets).any(|(c, d)| {
                    (d - b).abs() <= 1e-12 * b.abs()
                        && a.iter().zip(c).all(|(u, v)| (u + v).abs() <= 1e-12)
                })
            }),
            Self::ShiftedCone { .. } => false,
            Self::Scaled { body, .. } | Self::Cylinder { body } => body.is_symmetric(),
            Self::Translated { body, offset } => {
                offset.iter().all(|&v| v == 0.0) && body.is_symmetric()
            }
        }
    }
}

/// ‖x‖_V.
pub fn gauge_norm(body: &ConvexBody, x: &[f64]) -> Result<f64> {
    body.gauge(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let b = ConvexBody::lp_ball(2, 2.0);
        assert_eq!(gauge_norm(&b, &[2.0, 0.0]).unwrap(), 2.0);
        let c = 0.7;
        let slab = ConvexBody::coordinate_slab(2, c);
        assert!((gauge_norm(&slab, &[5.0, c / 2.0]).unwrap() - 0.5).abs() < 1e-15);
        let cube = ConvexBody::lp_ball(3, f64::INFINITY);
        assert_eq!(gauge_norm(&cube, &[0.5, -2.0, 1.0]).unwrap(), 2.0);
        let l1 = ConvexBody::lp_ball(2, 1.0);
        assert_eq!(gauge_norm(&l1, &[0.5, -0.25]).unwrap(), 0.75);
    }

    #[test]
    fn origin_must_be_interior() {
        let outside = ConvexBody::euclidean_ball(2, 1.0).translated(vec![2.0, 0.0]);
        assert_eq!(
            gauge_norm(&outside, &[1.0, 0.0]),
            Err(Error::OriginNotInterior)
        );
        let apex = ConvexBody::ShiftedCone {
            n: 2,
            height: 5.0,
            aperture: 1.0,
            shift: 0.0,
        };
        assert_eq!(apex.validate(), Err(Error::OriginNotInterior));
        let half_plane = ConvexBody::Polytope {
            normals: vec![vec![1.0, 0.0]],
            offsets: vec![0.0],
        };
        assert!(half_plane.validate().is_err());
        assert!(matches!(
            ConvexBody::lp_ball(2, 0.5).validate(),
            Err(Error::InvalidBody(_))
        ));
        assert!(matches!(
            gauge_norm(&ConvexBody::lp_ball(2, 2.0), &[1.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn shifted_cone_gauge_by_bisection() {
        let body = ConvexBody::ShiftedCone {
            n: 2,
            height: 50.0,
            aperture: 2.0,
            shift: 0.1,
        };
        // (1, a) needs r with (1, a + 0.1 r) on the lateral ray |x₁| = 2 x₂
        let a = 0.25;
        let g = gauge_norm(&body, &[1.0, a]).unwrap();
        assert!((g - (0.5 - a) / 0.1).abs() < 1e-8, "{g}");
        // a point straight down the axis leaves through the apex
        let g = gauge_norm(&body, &[0.0, -0.05]).unwrap();
        assert!((g - 0.5).abs() < 1e-9);
    }

    #[test]
    fn translated_and_cylinder() {
        let b = ConvexBody::euclidean_ball(2, 1.0).translated(vec![0.5, 0.0]);
        assert!((gauge_norm(&b, &[1.5, 0.0]).unwrap() - 1.0).abs() < 1e-9);
        assert!((gauge_norm(&b, &[-0.5, 0.0]).unwrap() - 1.0).abs() < 1e-9);
        assert!(!b.is_symmetric());
        let cyl = ConvexBody::euclidean_ball(2, 1.0).cylinder();
        assert_eq!(cyl.dim(), 3);
        assert_eq!(gauge_norm(&cyl, &[3.0, 4.0, 100.0]).unwrap(), 5.0);
        assert!(cyl.circumradius().is_none());
    }

    #[test]
    fn polytope_symmetry_detection() {
        let square = ConvexBody::Polytope {
            normals: vec![
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
            offsets: vec![1.0; 4],
        };
        assert!(square.is_symmetric());
        assert_eq!(gauge_norm(&square, &[0.3, -2.0]).unwrap(), 2.0);
        let tri = ConvexBody::Polytope {
            normals: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
            offsets: vec![1.0; 3],
        };
        assert!(!tri.is_symmetric());
    }

    #[test]
    fn json_round_trip_with_infinite_exponent() {
        let b = ConvexBody::lp_ball(3, f64::INFINITY).scaled(2.0);
        let s = serde_json::to_string(&b).unwrap();
        assert!(s.contains("\"inf\""), "{s}");
        let back: ConvexBody = serde_json::from_str(&s).unwrap();
        assert_eq!(back, b);
        let parsed: ConvexBody = serde_json::from_str(r#"{"kind":"lp_ball","n":2,"p":1}"#).unwrap();
        assert_eq!(parsed, ConvexBody::lp_ball(2, 1.0));
    }
}
