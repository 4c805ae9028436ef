//! Planar hypograph regions {(x, y) : x ≤ t_y} with t concave and piecewise
//! linear: Gaussian measure, slice lengths on vertical lines, Steiner and
//! Ehrhard symmetrization.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cones::ConeState;
use crate::counterexample::cone_measure;
use crate::error::{Error, Result};
use crate::gaussian::{
    ball_measure, ball_measure_complement, cdf, inv_cdf, inv_psi, inv_sf, pdf, sf,
};
use crate::quad::{integrate_breaks, QuadConfig};

/// Half-width of the square window used for every planar quadrature.
pub const WINDOW: f64 = 9.0;

const SLOPE_TOL: f64 = 1e-9;

/// Piecewise-linear concave boundary y ↦ t_y given by knots (y, t).
///
/// Beyond the knot range t continues with the given slope; `None` means
/// t_y = −∞ there. `clip` caps t from above.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypographRegion {
    pub knots: Vec<[f64; 2]>,
    pub left_slope: Option<f64>,
    pub right_slope: Option<f64>,
    #[serde(default)]
    pub clip: Option<f64>,
}

/// Euclidean length of a slice, possibly unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceLength {
    Finite(f64),
    Unbounded,
}

impl SliceLength {
    pub fn value(self) -> f64 {
        match self {
            Self::Finite(v) => v,
            Self::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }
}

/// The vertical line x = abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceLine {
    pub abscissa: f64,
}

impl SliceLine {
    /// The line x = Φ⁻¹(p), i.e. x = −w for the half-plane of measure p.
    pub fn for_probability(p: f64) -> Result<Self> {
        Ok(Self {
            abscissa: inv_cdf(p)?,
        })
    }
}

/// {y ∈ [lo, hi] : t0 + s(y − y0) ≥ a}
fn linear_superlevel(y0: f64, t0: f64, s: f64, lo: f64, hi: f64, a: f64) -> Option<(f64, f64)> {
    if s == 0.0 {
        return (t0 >= a).then_some((lo, hi));
    }
    let cross = y0 + (a - t0) / s;
    let (l, h) = if s > 0.0 {
        (lo.max(cross), hi)
    } else {
        (lo, hi.min(cross))
    };
    (l <= h).then_some((l, h))
}

impl HypographRegion {
    /// Checks knot ordering, finiteness and concavity.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidRegion(m));
        if self.knots.is_empty() {
            return bad("at least one knot is required".into());
        }
        if self.knots.iter().flatten().any(|v| !v.is_finite()) {
            return bad("knots must be finite".into());
        }
        if let Some(c) = self.clip {
            if c.is_nan() {
                return bad("clip must be a number".into());
            }
        }
        for s in [self.left_slope, self.right_slope].into_iter().flatten() {
            if !s.is_finite() {
                return bad("tail slopes must be finite".into());
            }
        }
        let mut slopes = Vec::with_capacity(self.knots.len() + 1);
        slopes.extend(self.left_slope);
        for w in self.knots.windows(2) {
            let dy = w[1][0] - w[0][0];
            if !(dy > 0.0) {
                return bad(format!("knot y values must increase (at y = {})", w[1][0]));
            }
            slopes.push((w[1][1] - w[0][1]) / dy);
        }
        slopes.extend(self.right_slope);
        for w in slopes.windows(2) {
            if w[1] > w[0] + SLOPE_TOL * (1.0 + w[0].abs()) {
                return bad(format!(
                    "boundary is not concave (slope {} after {})",
                    w[1], w[0]
                ));
            }
        }
        Ok(())
    }

    /// x ≤ t with t constant on the whole line.
    pub fn half_plane(t: f64) -> Self {
        Self {
            knots: vec![[0.0, t]],
            left_slope: Some(0.0),
            right_slope: Some(0.0),
            clip: None,
        }
    }

    /// Cone with apex (apex_x, apex_y) opening to the left. The lower ray has
    /// slope dt/dy = `lower` > 0, the upper ray `upper` < 0; `None` stands for
    /// a horizontal ray.
    pub fn cone(apex_x: f64, apex_y: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        Self {
            knots: vec![[apex_y, apex_x]],
            left_slope: lower,
            right_slope: upper,
            clip: None,
        }
    }

    /// The planar cone C_θ: apex (y, 0), rays through (−w, ±h).
    pub fn from_cone_state(st: &ConeState) -> Self {
        let cot = 1.0 / st.theta.tan();
        Self::cone(st.y, 0.0, Some(cot), Some(-cot))
    }

    /// t_y (may be −∞).
    pub fn t_at(&self, y: f64) -> f64 {
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        let t = if y < first[0] {
            self.left_slope
                .map_or(f64::NEG_INFINITY, |s| first[1] + s * (y - first[0]))
        } else if y > last[0] {
            self.right_slope
                .map_or(f64::NEG_INFINITY, |s| last[1] + s * (y - last[0]))
        } else {
            let i = self
                .knots
                .partition_point(|k| k[0] <= y)
                .clamp(1, self.knots.len());
            if i == self.knots.len() {
                last[1]
            } else {
                let (a, b) = (self.knots[i - 1], self.knots[i]);
                a[1] + (b[1] - a[1]) * (y - a[0]) / (b[0] - a[0])
            }
        };
        match self.clip {
            Some(c) => t.min(c),
            None => t,
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x <= self.t_at(y)
    }

    /// {y : t_y ≥ a} as an interval with possibly infinite ends.
    pub fn superlevel(&self, a: f64) -> Option<(f64, f64)> {
        if self.clip.is_some_and(|c| c < a) {
            return None;
        }
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        let mut pieces = Vec::with_capacity(self.knots.len() + 1);
        if let Some(s) = self.left_slope {
            pieces.push(linear_superlevel(
                first[0],
                first[1],
                s,
                f64::NEG_INFINITY,
                first[0],
                a,
            ));
        }
        if self.knots.len() == 1 {
            pieces.push((first[1] >= a).then_some((first[0], first[0])));
        }
        for w in self.knots.windows(2) {
            let s = (w[1][1] - w[0][1]) / (w[1][0] - w[0][0]);
            pieces.push(linear_superlevel(w[0][0], w[0][1], s, w[0][0], w[1][0], a));
        }
        if let Some(s) = self.right_slope {
            pieces.push(linear_superlevel(
                last[0],
                last[1],
                s,
                last[0],
                f64::INFINITY,
                a,
            ));
        }
        pieces
            .into_iter()
            .flatten()
            .reduce(|(l1, h1), (l2, h2)| (l1.min(l2), h1.max(h2)))
    }

    /// y-range on which t is finite.
    fn domain(&self) -> (f64, f64) {
        let lo = if self.left_slope.is_some() {
            f64::NEG_INFINITY
        } else {
            self.knots[0][0]
        };
        let hi = if self.right_slope.is_some() {
            f64::INFINITY
        } else {
            self.knots[self.knots.len() - 1][0]
        };
        (lo, hi)
    }
}

/// Length of {y : t_y ≥ line.abscissa}.
pub fn slice_length(region: &HypographRegion, line: SliceLine) -> SliceLength {
    match region.superlevel(line.abscissa) {
        None => SliceLength::Finite(0.0),
        Some((lo, hi)) if lo.is_finite() && hi.is_finite() => SliceLength::Finite(hi - lo),
        Some(_) => SliceLength::Unbounded,
    }
}

/// γ₂ of the region: ∫ φ(y)Φ(t_y) dy over the window, panels split at the
/// knots and where t meets the clip level.
pub fn gamma2_region(region: &HypographRegion) -> Result<f64> {
    region.validate()?;
    let (dlo, dhi) = region.domain();
    let (lo, hi) = (dlo.max(-WINDOW), dhi.min(WINDOW));
    if lo >= hi {
        return Ok(0.0);
    }
    let mut breaks = vec![lo, hi];
    breaks.extend(
        region
            .knots
            .iter()
            .map(|k| k[0])
            .filter(|&y| y > lo && y < hi),
    );
    if let Some(c) = region.clip {
        if let Some((a, b)) = region.superlevel(c) {
            breaks.extend([a, b].into_iter().filter(|&y| y > lo && y < hi));
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let est = integrate_breaks(
        |y| pdf(y) * cdf(region.t_at(y)),
        &breaks,
        &QuadConfig::with_abs_tol(1e-12),
    )?;
    Ok(est.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanarStatus {
    /// The slice hypothesis fails, nothing to check.
    Vacuous,
    Holds,
    Violated,
}

/// Outcome of testing "slice at most 2Ψ⁻¹(p) implies γ₂ < p".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanarCheck {
    pub p: f64,
    pub slice_length: SliceLength,
    pub threshold: f64,
    pub measure: f64,
    pub status: PlanarStatus,
}

pub fn verify_prop_planar(p: f64, region: &HypographRegion) -> Result<PlanarCheck> {
    let threshold = 2.0 * inv_psi(p)?;
    if p > 0.5 {
        return Err(Error::Domain {
            name: "p",
            value: p,
            expected: "0 < p <= 1/2",
        });
    }
    let line = SliceLine::for_probability(p)?;
    let length = slice_length(region, line);
    let measure = gamma2_region(region)?;
    // the boundary case L = 2Ψ⁻¹(p) is the cone family itself and is checked
    let status = if length.value() > threshold * (1.0 + 1e-12) {
        PlanarStatus::Vacuous
    } else if measure < p {
        PlanarStatus::Holds
    } else {
        PlanarStatus::Violated
    };
    Ok(PlanarCheck {
        p,
        slice_length: length,
        threshold,
        measure,
        status,
    })
}

/// Replaces every vertical slice of a left-opening cone by the centered
/// segment of the same length. The result has apex (apex_x, 0) and slopes
/// ±k with 2/k = 1/s_lower + 1/|s_upper|.
pub fn steiner_symmetrize(region: &HypographRegion) -> Result<HypographRegion> {
    region.validate()?;
    let not_cone = |m: &str| Err(Error::InvalidRegion(format!("not a cone: {m}")));
    if region.knots.len() != 1 || region.clip.is_some() {
        return not_cone("expected a single apex knot and no clip");
    }
    let [apex_y, apex_x] = region.knots[0];
    let inv_lower = match region.left_slope {
        Some(s) if s > 0.0 => 1.0 / s,
        None => 0.0,
        Some(_) => return not_cone("lower ray must open to the left"),
    };
    let inv_upper = match region.right_slope {
        Some(s) if s < 0.0 => -1.0 / s,
        None => 0.0,
        Some(_) => return not_cone("upper ray must open to the left"),
    };
    if inv_lower + inv_upper == 0.0 {
        return not_cone("both rays are horizontal");
    }
    if apex_y == 0.0
        && region
            .left_slope
            .zip(region.right_slope)
            .is_some_and(|(a, b)| a == -b)
    {
        return Ok(region.clone());
    }
    let k = 2.0 / (inv_lower + inv_upper);
    Ok(HypographRegion::cone(apex_x, 0.0, Some(k), Some(-k)))
}

/// Draws a random concave hypograph with 3 to 8 knots whose slice on the
/// line x = Φ⁻¹(p) is shorter than 2Ψ⁻¹(p), resampling until it is.
pub fn random_hypograph<R: Rng + ?Sized>(rng: &mut R, p: f64) -> Result<HypographRegion> {
    let threshold = 2.0 * inv_psi(p)?;
    let line = SliceLine::for_probability(p)?;
    loop {
        let k = rng.random_range(3..=8);
        let mut ys: Vec<f64> = (0..k).map(|_| rng.random_range(-3.0..3.0)).collect();
        ys.sort_by(f64::total_cmp);
        if ys.windows(2).any(|w| w[1] - w[0] < 1e-6) {
            continue;
        }
        let mut slopes: Vec<f64> = (0..=k).map(|_| rng.random_range(-3.0..3.0)).collect();
        slopes.sort_by(|a, b| b.total_cmp(a));
        let mut t = line.abscissa + rng.random_range(-3.0..1.0);
        let mut knots = vec![[ys[0], t]];
        for i in 1..k {
            t += slopes[i] * (ys[i] - ys[i - 1]);
            knots.push([ys[i], t]);
        }
        let region = HypographRegion {
            knots,
            left_slope: (rng.random::<f64>() >= 0.2).then_some(slopes[0]),
            right_slope: (rng.random::<f64>() >= 0.2).then_some(slopes[k]),
            clip: None,
        };
        if slice_length(&region, line).value() < threshold {
            return Ok(region);
        }
    }
}

/// A convex body in ℝⁿ whose sections orthogonal to the last axis have a
/// known Gaussian measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SectionedBody {
    /// {x : xₙ ≤ a}
    HalfSpace { n: usize, a: f64 },
    /// Conv(0, d(eₙ + t·B)), sections are balls of radius t·z.
    Cone {
        n: usize,
        height: f64,
        aperture: f64,
    },
    /// ∏ [lowerᵢ, upperᵢ]
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// r·B₂^{n−1} × [z_min, z_max]
    Cylinder {
        n: usize,
        radius: f64,
        z_min: f64,
        z_max: f64,
    },
}

impl SectionedBody {
    pub fn dim(&self) -> usize {
        match self {
            Self::HalfSpace { n, .. } | Self::Cone { n, .. } | Self::Cylinder { n, .. } => *n,
            Self::Box { lower, .. } => lower.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidBody(m.to_string()));
        let n = self.dim();
        if !(2..=6).contains(&n) {
            return bad("sectioned bodies need 2 <= n <= 6");
        }
        match self {
            Self::HalfSpace { a, .. } if a.is_nan() => bad("half-space level must be a number"),
            Self::Cone {
                height, aperture, ..
            } if !(*height > 0.0 && *aperture > 0.0) => bad("cone needs height > 0, aperture > 0"),
            Self::Box { lower, upper }
                if lower.len() != upper.len() || lower.iter().zip(upper).any(|(l, u)| !(l < u)) =>
            {
                bad("box needs lower < upper in every coordinate")
            }
            Self::Cylinder {
                radius,
                z_min,
                z_max,
                ..
            } if !(*radius > 0.0 && z_min < z_max) => {
                bad("cylinder needs radius > 0, z_min < z_max")
            }
            _ => Ok(()),
        }
    }

    /// Range of the last coordinate.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::HalfSpace { a, .. } => (f64::NEG_INFINITY, *a),
            Self::Cone { height, .. } => (0.0, *height),
            Self::Box { lower, upper } => (lower[lower.len() - 1], upper[upper.len() - 1]),
            Self::Cylinder { z_min, z_max, .. } => (*z_min, *z_max),
        }
    }

    /// (γ_{n−1}(K_z), 1 − γ_{n−1}(K_z)), the complement kept accurate.
    pub fn section_measure(&self, z: f64) -> Result<(f64, f64)> {
        let (lo, hi) = self.support();
        if z < lo || z > hi {
            return Ok((0.0, 1.0));
        }
        match self {
            Self::HalfSpace { .. } => Ok((1.0, 0.0)),
            Self::Cone { n, aperture, .. } => Ok((
                ball_measure(n - 1, aperture * z)?,
                ball_measure_complement(n - 1, aperture * z)?,
            )),
            Self::Box { lower, upper } => {
                let m = lower.len() - 1;
                let p: f64 = lower[..m]
                    .iter()
                    .zip(&upper[..m])
                    .map(|(&l, &u)| cdf(u) - cdf(l))
                    .product();
                Ok((p, 1.0 - p))
            }
            Self::Cylinder { n, radius, .. } => Ok((
                ball_measure(n - 1, *radius)?,
                ball_measure_complement(n - 1, *radius)?,
            )),
        }
    }

    /// γₙ of the body, computed without going through sections where a
    /// closed form exists.
    pub fn measure(&self) -> Result<f64> {
        self.validate()?;
        match self {
            Self::HalfSpace { a, .. } => Ok(cdf(*a)),
            Self::Cone {
                n,
                height,
                aperture,
            } => cone_measure(*n, *height, *aperture),
            Self::Box { lower, upper } => Ok(lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| {
                    if l >= 0.0 {
                        sf(l) - sf(u)
                    } else {
                        cdf(u) - cdf(l)
                    }
                })
                .product()),
            Self::Cylinder {
                n,
                radius,
                z_min,
                z_max,
            } => Ok(ball_measure(n - 1, *radius)? * (cdf(*z_max) - cdf(*z_min))),
        }
    }

    /// t_z = Φ⁻¹(γ_{n−1}(K_z)) capped at the window edge.
    pub fn profile(&self, z: f64) -> Result<f64> {
        let (m, tail) = self.section_measure(z)?;
        let t = if m <= 0.0 {
            f64::NEG_INFINITY
        } else if tail <= 0.0 {
            WINDOW
        } else if m <= 0.5 {
            inv_cdf(m)?
        } else {
            inv_sf(tail)?
        };
        Ok(t.min(WINDOW))
    }
}

/// Builds the planar region W with t_z = Φ⁻¹(γ_{n−1}(K_z)). Bodies with a
/// constant section profile are exact; for cones the profile is sampled on
/// `grid` uniform and `grid` geometric knots, then refined where the chord
/// misses the profile by a non-negligible amount of mass.
pub fn ehrhard_symmetrize(body: &SectionedBody, grid: usize) -> Result<HypographRegion> {
    body.validate()?;
    let (lo, hi) = body.support();
    let (lo, hi) = (lo.max(-WINDOW), hi.min(WINDOW));
    if lo >= hi {
        return Err(Error::InvalidBody("support lies outside the window".into()));
    }
    let knots = match body {
        SectionedBody::Cone { .. } => cone_profile_knots(body, lo, hi, grid.max(8))?,
        _ => {
            let t = body.profile(0.5 * (lo + hi))?;
            vec![[lo, t], [hi, t]]
        }
    };
    let region = HypographRegion {
        knots,
        left_slope: None,
        right_slope: None,
        clip: Some(WINDOW),
    };
    region.validate()?;
    Ok(region)
}

fn cone_profile_knots(
    body: &SectionedBody,
    lo: f64,
    hi: f64,
    grid: usize,
) -> Result<Vec<[f64; 2]>> {
    // first z where the profile is above −WINDOW
    let (mut a, mut b) = (lo, hi);
    if body.profile(b)? < -WINDOW {
        return Err(Error::InvalidBody("cone sections are negligible".into()));
    }
    for _ in 0..200 {
        let mid = if a > 0.0 {
            (a * b).sqrt()
        } else {
            0.5 * (a + b)
        };
        if body.profile(mid)? >= -WINDOW {
            b = mid;
        } else {
            a = mid;
        }
        if b - a <= 1e-15 * b {
            break;
        }
    }
    let start = b;
    let mut zs: Vec<f64> = (0..grid)
        .map(|i| start + (hi - start) * i as f64 / (grid - 1) as f64)
        .collect();
    let ratio = (hi / start).ln();
    zs.extend((1..grid - 1).map(|i| start * (ratio * i as f64 / (grid - 1) as f64).exp()));
    zs.sort_by(f64::total_cmp);
    zs.dedup_by(|x, y| *x - *y <= 1e-15 * x.abs());
    let mut knots: Vec<[f64; 2]> = zs
        .iter()
        .map(|&z| body.profile(z).map(|t| [z, t]))
        .collect::<Result<_>>()?;
    // local refinement: split while the mass between chord and profile matters
    let mut out = Vec::with_capacity(knots.len() * 2);
    let mut stack = Vec::new();
    knots.reverse();
    let mut current = knots.pop().expect("non-empty");
    out.push(current);
    while let Some(next) = knots.pop() {
        stack.push(next);
        while let Some(&right) = stack.last() {
            let zm = 0.5 * (current[0] + right[0]);
            let tm = body.profile(zm)?;
            let gap = tm - 0.5 * (current[1] + right[1]);
            let weight = pdf(zm) * pdf(tm.max(-WINDOW)) * gap.abs() * (right[0] - current[0]);
            if weight > 1e-12 && right[0] - current[0] > 1e-12 {
                stack.push([zm, tm]);
            } else {
                stack.pop();
                out.push(right);
                current = right;
            }
        }
    }
    Ok(out)
}

/// Section-profile concavity and measure comparison for one body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EhrhardReport {
    pub body: SectionedBody,
    pub knots: usize,
    pub gamma2: f64,
    pub body_measure: f64,
    pub concavity_violations: usize,
}

impl EhrhardReport {
    pub fn difference(&self) -> f64 {
        (self.gamma2 - self.body_measure).abs()
    }
}

/// Counts sampled points where t_z falls below the midpoint chord of its
/// neighbours by more than 1e−9.
pub fn profile_concavity_violations(body: &SectionedBody, samples: usize) -> Result<usize> {
    let (lo, hi) = body.support();
    let (lo, hi) = (lo.max(-WINDOW), hi.min(WINDOW));
    let ts: Vec<(f64, f64)> = (0..samples)
        .map(|i| {
            let z = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
            body.profile(z).map(|t| (z, t))
        })
        .collect::<Result<_>>()?;
    Ok(ts
        .windows(3)
        .filter(|w| w.iter().all(|(_, t)| *t > -WINDOW))
        .filter(|w| w[1].1 < 0.5 * (w[0].1 + w[2].1) - 1e-9)
        .count())
}

pub fn ehrhard_check(body: &SectionedBody, grid: usize) -> Result<EhrhardReport> {
    let region = ehrhard_symmetrize(body, grid)?;
    Ok(EhrhardReport {
        body: body.clone(),
        knots: region.knots.len(),
        gamma2: gamma2_region(&region)?,
        body_measure: body.measure()?,
        concavity_violations: profile_concavity_violations(body, 1001)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::cone_state;
    use crate::gaussian::{psi, GaussScalarTable};

    #[test]
    fn slice_examples() {
        let w = GaussScalarTable::new(0.25).unwrap().w;
        let line = SliceLine::for_probability(0.25).unwrap();
        assert!((line.abscissa + w).abs() < 1e-15);
        let hp = HypographRegion::half_plane(-w - 1.0);
        assert_eq!(slice_length(&hp, line), SliceLength::Finite(0.0));
        let slab = HypographRegion {
            knots: vec![[-1.0, 0.0], [1.0, 0.0]],
            left_slope: None,
            right_slope: None,
            clip: None,
        };
        assert_eq!(
            slice_length(&slab, SliceLine { abscissa: -0.5 }),
            SliceLength::Finite(2.0)
        );
        let st = cone_state(0.25, 0.5).unwrap();
        let cone = HypographRegion::from_cone_state(&st);
        let len = slice_length(&cone, line).value();
        assert!((len - 2.0 * st.h).abs() < 1e-9, "{len}");
        assert!((len - 0.63728).abs() < 1e-5);
    }

    #[test]
    fn measure_examples() {
        let g = gamma2_region(&HypographRegion::half_plane(0.0)).unwrap();
        assert!((g - 0.5).abs() < 1e-12);
        let table = GaussScalarTable::new(0.25).unwrap();
        let g = gamma2_region(&HypographRegion::half_plane(-table.w)).unwrap();
        assert!((g - 0.25).abs() < 1e-9);
        // symmetric horizontal slab |y| ≤ h with t = +∞ replaced by the clip
        let slab = HypographRegion {
            knots: vec![[-table.h, WINDOW], [table.h, WINDOW]],
            left_slope: None,
            right_slope: None,
            clip: Some(WINDOW),
        };
        assert!((gamma2_region(&slab).unwrap() - 0.25).abs() < 1e-6);
        assert!((psi(table.h).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn validation_rejects_convex_kinks() {
        let r = HypographRegion {
            knots: vec![[0.0, 0.0], [1.0, -1.0], [2.0, 0.0]],
            left_slope: None,
            right_slope: None,
            clip: None,
        };
        assert!(matches!(r.validate(), Err(Error::InvalidRegion(_))));
        let r = HypographRegion {
            knots: vec![[0.0, 0.0], [0.0, 1.0]],
            left_slope: None,
            right_slope: None,
            clip: None,
        };
        assert!(r.validate().is_err());
        let r = HypographRegion::cone(0.0, 0.0, Some(-1.0), Some(1.0));
        assert!(r.validate().is_err());
    }

    #[test]
    fn planar_property_on_cones_and_half_plane() {
        let w = GaussScalarTable::new(0.25).unwrap().w;
        for theta in [0.1, 0.5, 1.0, 1.5] {
            let st = cone_state(0.25, theta).unwrap();
            let c = verify_prop_planar(0.25, &HypographRegion::from_cone_state(&st)).unwrap();
            assert_eq!(c.status, PlanarStatus::Holds, "{c:?}");
        }
        let c = verify_prop_planar(0.25, &HypographRegion::half_plane(-w)).unwrap();
        assert_eq!(c.slice_length, SliceLength::Unbounded);
        assert_eq!(c.status, PlanarStatus::Vacuous);
        assert!(verify_prop_planar(0.75, &HypographRegion::half_plane(0.0)).is_err());
    }

    #[test]
    fn steiner_examples() {
        let t = GaussScalarTable::new(0.25).unwrap();
        let sym = HypographRegion::cone(0.3, 0.0, Some(2.0), Some(-2.0));
        assert_eq!(steiner_symmetrize(&sym).unwrap(), sym);
        // apex on the line y = h, rays through (−w, 0) and (−w, 2h)
        let apex_x = 0.4;
        let s = (apex_x + t.w) / t.h;
        let asym = HypographRegion::cone(apex_x, t.h, Some(s), Some(-s));
        let out = steiner_symmetrize(&asym).unwrap();
        let line = SliceLine { abscissa: -t.w };
        let (a, b) = (
            slice_length(&asym, line).value(),
            slice_length(&out, line).value(),
        );
        assert!(
            (a - b).abs() < 1e-12 && (a - 2.0 * t.h).abs() < 1e-12,
            "{a} {b} {}",
            2.0 * t.h
        );
        assert!((out.t_at(t.h) + t.w).abs() < 1e-12);
        assert!((out.t_at(-t.h) + t.w).abs() < 1e-12);
        // one horizontal ray
        let half = HypographRegion::cone(apex_x, t.h, Some(s), None);
        let out = steiner_symmetrize(&half).unwrap();
        let (a, b) = (
            slice_length(&half, line).value(),
            slice_length(&out, line).value(),
        );
        assert!((a - b).abs() < 1e-12 && (a - t.h).abs() < 1e-12);
        assert!(steiner_symmetrize(&HypographRegion::half_plane(0.0)).is_err());
    }

    #[test]
    fn ehrhard_examples() {
        let a = 0.3;
        let hs = SectionedBody::HalfSpace { n: 3, a };
        let r = ehrhard_symmetrize(&hs, 16).unwrap();
        assert_eq!(r.t_at(a - 1.0), WINDOW);
        assert_eq!(r.t_at(a + 0.1), f64::NEG_INFINITY);
        assert!((gamma2_region(&r).unwrap() - cdf(a)).abs() < 1e-12);

        let boxed = SectionedBody::Box {
            lower: vec![-1.0; 3],
            upper: vec![1.0; 3],
        };
        let rep = ehrhard_check(&boxed, 16).unwrap();
        assert!((rep.gamma2 - psi(1.0).unwrap().powi(3)).abs() < 1e-6);

        let cone = SectionedBody::Cone {
            n: 3,
            height: 10.0,
            aperture: 2.0,
        };
        let rep = ehrhard_check(&cone, 400).unwrap();
        assert!(rep.difference() < 1e-5, "{rep:?}");
        assert_eq!(rep.concavity_violations, 0);
    }
}
