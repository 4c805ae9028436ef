//! Exact vector balancing for short tuples: minimum over sign vectors of the
//! gauge of the signed sum, the subset variant, and the dyadic decomposition
//! P ⊂ P⁰ + B·V built from it.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::error::{Error, Result};

/// Largest tuple accepted by [`min_sign_balance`].
pub const MAX_SIGN_TUPLE: usize = 24;
/// Largest tuple accepted by [`beta_subset`].
pub const MAX_SUBSET_TUPLE: usize = 20;
/// Largest dyadic depth accepted by [`combiclaim_decompose`].
pub const MAX_DYADIC_DEPTH: u32 = 12;

/// Free sign bits below which enumeration stays on one thread.
const PARALLEL_BITS: usize = 14;
/// Number of leading sign bits fixed per parallel task.
const PREFIX_BITS: usize = 6;

/// A finite list of vectors of a common dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct VectorTuple {
    vectors: Vec<Vec<f64>>,
    dim: usize,
}

impl VectorTuple {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vectors.first().map_or(0, Vec::len);
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidBody("tuple vectors must be finite".into()));
            }
        }
        if vectors.len() > MAX_SIGN_TUPLE {
            return Err(Error::Budget {
                what: "tuple length",
                size: vectors.len(),
                limit: MAX_SIGN_TUPLE,
            });
        }
        Ok(Self { vectors, dim })
    }

    /// The standard basis of ℝⁿ.
    pub fn standard_basis(n: usize) -> Self {
        let vectors = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        Self { vectors, dim: n }
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl TryFrom<Vec<Vec<f64>>> for VectorTuple {
    type Error = Error;

    fn try_from(v: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<VectorTuple> for Vec<Vec<f64>> {
    fn from(t: VectorTuple) -> Self {
        t.vectors
    }
}

/// Best signed sum found by exhaustive enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Balance {
    pub value: f64,
    pub signs: Vec<i8>,
}

fn signed_sum(vectors: &[&[f64]], signs: &[i8], dim: usize) -> Vec<f64> {
    let mut s = vec![0.0; dim];
    for (v, &e) in vectors.iter().zip(signs) {
        for (a, b) in s.iter_mut().zip(v.iter()) {
            *a += f64::from(e) * b;
        }
    }
    s
}

/// Gray-code walk over the low `bits` signs of `active`, the higher signs
/// fixed by `prefix` and the running sum offset by `base`. Returns the best
/// (value, gray code), stopping early once a value at or below `cutoff`
/// is seen.
fn gray_walk(
    active: &[&[f64]],
    body: &ConvexBody,
    base: &[f64],
    bits: usize,
    prefix: u64,
    cutoff: f64,
) -> (f64, u64) {
    let mut signs: Vec<i8> = (0..active.len())
        .map(|j| {
            if j >= bits && prefix >> (j - bits) & 1 == 1 {
                -1
            } else {
                1
            }
        })
        .collect();
    let mut sum = signed_sum(active, &signs, base.len());
    for (a, b) in sum.iter_mut().zip(base) {
        *a += b;
    }
    let mut best = (body.gauge_unchecked(&sum), 0u64);
    if best.0 <= cutoff {
        return best;
    }
    for i in 1u64..(1u64 << bits) {
        let j = i.trailing_zeros() as usize;
        let e = f64::from(signs[j]);
        for (a, b) in sum.iter_mut().zip(active[j].iter()) {
            *a -= 2.0 * e * b;
        }
        signs[j] = -signs[j];
        let g = body.gauge_unchecked(&sum);
        if g < best.0 {
            best = (g, i ^ (i >> 1));
            if g <= cutoff {
                break;
            }
        }
    }
    best
}

/// Exhaustive minimum over signs, with early exit once `cutoff` is reached.
/// Assumes a validated body.
fn min_over_signs(vectors: &[&[f64]], body: &ConvexBody, dim: usize, cutoff: f64) -> Balance {
    let t = vectors.len();
    // for symmetric bodies the last sign may be fixed to +1
    let free = if body.is_symmetric() {
        t.saturating_sub(1)
    } else {
        t
    };
    let (active, fixed) = vectors.split_at(free);
    let base = signed_sum(fixed, &vec![1; fixed.len()], dim);
    let code = if free > PARALLEL_BITS && cutoff < 0.0 {
        let high = PREFIX_BITS.min(free);
        let low = free - high;
        (0..1u64 << high)
            .into_par_iter()
            .map(|prefix| {
                let (v, g) = gray_walk(active, body, &base, low, prefix, cutoff);
                (v, g | prefix << low)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((f64::INFINITY, 0), |b, c| if c.0 < b.0 { c } else { b })
            .1
    } else {
        gray_walk(active, body, &base, free, 0, cutoff).1
    };
    let mut signs: Vec<i8> = (0..free)
        .map(|j| if code >> j & 1 == 1 { -1 } else { 1 })
        .collect();
    signs.extend(std::iter::repeat_n(1, t - free));
    // recomputed from scratch to drop the drift of the incremental sums
    let value = body.gauge_unchecked(&signed_sum(vectors, &signs, dim));
    Balance { value, signs }
}

fn check_body(tuple: &VectorTuple, body: &ConvexBody) -> Result<()> {
    body.validate()?;
    if !tuple.is_empty() && tuple.dim() != body.dim() {
        return Err(Error::Dimension {
            expected: body.dim(),
            found: tuple.dim(),
        });
    }
    Ok(())
}

/// min over ε ∈ {±1}ᵗ of ‖Σ εᵢuᵢ‖_V with an achieving sign vector.
pub fn min_sign_balance(tuple: &VectorTuple, body: &ConvexBody) -> Result<Balance> {
    check_body(tuple, body)?;
    let refs: Vec<&[f64]> = tuple.vectors().iter().map(Vec::as_slice).collect();
    Ok(min_over_signs(&refs, body, body.dim(), -1.0))
}

/// Largest subset balance and the subset attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetBalance {
    pub value: f64,
    pub subset: Vec<usize>,
    pub signs: Vec<i8>,
}

/// max over Z ⊆ [t] of min over signs of ‖Σ_{i∈Z} εᵢuᵢ‖_V.
pub fn beta_subset(tuple: &VectorTuple, body: &ConvexBody) -> Result<SubsetBalance> {
    check_body(tuple, body)?;
    let t = tuple.len();
    if t > MAX_SUBSET_TUPLE {
        return Err(Error::Budget {
            what: "subset tuple length",
            size: t,
            limit: MAX_SUBSET_TUPLE,
        });
    }
    let dim = body.dim();
    let mut best = SubsetBalance {
        value: 0.0,
        subset: Vec::new(),
        signs: Vec::new(),
    };
    for mask in 1u32..(1u32 << t) {
        let subset: Vec<usize> = (0..t).filter(|i| mask >> i & 1 == 1).collect();
        let refs: Vec<&[f64]> = subset
            .iter()
            .map(|&i| tuple.vectors()[i].as_slice())
            .collect();
        // a subset whose minimum cannot exceed the current best is skipped early
        let b = min_over_signs(&refs, body, dim, best.value);
        if b.value > best.value {
            best = SubsetBalance {
                value: b.value,
                subset,
                signs: b.signs,
            };
        }
    }
    Ok(best)
}

/// y = vertex + remainder with vertex ∈ P⁰ and ‖remainder‖_V ≤ B(1 − 2⁻ᵏ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// 0/1 coefficients of the vertex in the tuple basis.
    pub vertex_coefficients: Vec<u8>,
    pub vertex: Vec<f64>,
    pub remainder: Vec<f64>,
    /// ‖remainder‖_V / bound
    pub scaled_gauge: f64,
    /// 1 − 2⁻ᵏ
    pub target: f64,
}

impl Decomposition {
    pub fn holds(&self) -> bool {
        self.scaled_gauge <= self.target + 1e-9
    }
}

/// Coefficients of `y` in the tuple basis scaled by 2ᵏ, checked to be
/// integers in [0, 2ᵏ].
fn dyadic_numerators(tuple: &VectorTuple, y: &[f64], k: u32) -> Result<Vec<u64>> {
    let n = tuple.dim();
    if tuple.len() != n || y.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: if y.len() != n { y.len() } else { tuple.len() },
        });
    }
    let basis = DMatrix::from_fn(n, n, |r, c| tuple.vectors()[c][r]);
    let lu = basis.clone().lu();
    let det = lu.determinant();
    if det.abs() < 1e-12 {
        return Err(Error::SingularBasis { det });
    }
    let coeffs = lu
        .solve(&DVector::from_column_slice(y))
        .ok_or(Error::SingularBasis { det })?;
    let scale = f64::from(1u32 << k);
    coeffs
        .iter()
        .map(|&c| {
            let m = c * scale;
            let r = m.round();
            if (m - r).abs() > 1e-7 || r < 0.0 || r > scale {
                Err(Error::NonDyadic { depth: k })
            } else {
                Ok(r as u64)
            }
        })
        .collect()
}

/// Recursion P^{k} = (P^{k−1} + P⁰)/2: returns the vertex coefficients and
/// the remainder for the point with numerators `m` at depth `k`.
fn decompose_rec(
    vectors: &[Vec<f64>],
    body: &ConvexBody,
    m: &[u64],
    k: u32,
) -> (Vec<u8>, Vec<f64>) {
    let dim = body.dim();
    if k == 0 {
        return (m.iter().map(|&x| x as u8).collect(), vec![0.0; dim]);
    }
    let half = 1u64 << (k - 1);
    let b: Vec<u64> = m.iter().map(|&x| u64::from(x > half)).collect();
    let rest: Vec<u64> = m.iter().zip(&b).map(|(&x, &bi)| x - bi * half).collect();
    let (inner, inner_rem) = decompose_rec(vectors, body, &rest, k - 1);
    // (b + inner)/2 has coordinates in {0, 1/2, 1}
    let mut vertex = vec![0u8; m.len()];
    let mut halves = Vec::new();
    for i in 0..m.len() {
        match b[i] as u8 + inner[i] {
            2 => vertex[i] = 1,
            1 => halves.push(i),
            _ => {}
        }
    }
    let refs: Vec<&[f64]> = halves.iter().map(|&i| vectors[i].as_slice()).collect();
    let balance = min_over_signs(&refs, body, dim, -1.0);
    let mut rem: Vec<f64> = inner_rem.iter().map(|x| 0.5 * x).collect();
    for (&i, &e) in halves.iter().zip(&balance.signs) {
        if e < 0 {
            vertex[i] = 1;
        }
        for (r, u) in rem.iter_mut().zip(&vectors[i]) {
            *r += 0.5 * f64::from(e) * u;
        }
    }
    (vertex, rem)
}

/// Splits a depth-`k` dyadic point y of the parallelotope spanned by the
/// tuple into a vertex of P⁰ plus a remainder of gauge at most
/// `bound`·(1 − 2⁻ᵏ); `bound` is usually [`beta_subset`] of the tuple.
pub fn combiclaim_decompose(
    tuple: &VectorTuple,
    body: &ConvexBody,
    y: &[f64],
    k: u32,
    bound: f64,
) -> Result<Decomposition> {
    if k > MAX_DYADIC_DEPTH {
        return Err(Error::Budget {
            what: "dyadic depth",
            size: k as usize,
            limit: MAX_DYADIC_DEPTH as usize,
        });
    }
    check_body(tuple, body)?;
    if !(bound > 0.0) {
        return Err(Error::Domain {
            name: "bound",
            value: bound,
            expected: "bound > 0",
        });
    }
    let m = dyadic_numerators(tuple, y, k)?;
    let (coefficients, _) = decompose_rec(tuple.vectors(), body, &m, k);
    let dim = body.dim();
    let mut vertex = vec![0.0; dim];
    for (c, u) in coefficients.iter().zip(tuple.vectors()) {
        if *c == 1 {
            for (a, b) in vertex.iter_mut().zip(u) {
                *a += b;
            }
        }
    }
    // the remainder is taken from the identity so that y = vertex + remainder
    // holds up to one rounding per coordinate
    let remainder: Vec<f64> = y.iter().zip(&vertex).map(|(a, b)| a - b).collect();
    Ok(Decomposition {
        scaled_gauge: body.gauge_unchecked(&remainder) / bound,
        target: 1.0 - 0.5f64.powi(k as i32),
        vertex_coefficients: coefficients,
        vertex,
        remainder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(v: &[&[f64]]) -> VectorTuple {
        VectorTuple::new(v.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    #[test]
    fn small_examples() {
        let b2 = ConvexBody::lp_ball(2, 2.0);
        let r = min_sign_balance(&tuple(&[&[1.0, 0.0], &[1.0, 0.0]]), &b2).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.signs[0], -r.signs[1]);
        let r = min_sign_balance(&VectorTuple::standard_basis(2), &b2).unwrap();
        assert!((r.value - 2f64.sqrt()).abs() < 1e-15);
        let s = beta_subset(&VectorTuple::standard_basis(2), &b2).unwrap();
        assert!((s.value - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.subset, vec![0, 1]);
        let s = beta_subset(&tuple(&[&[1.0, 0.0]]), &b2).unwrap();
        assert_eq!(s.value, 1.0);
        let u = [0.3, -0.4];
        let s = beta_subset(&tuple(&[&u, &[-0.3, 0.4]]), &b2).unwrap();
        assert!((s.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cube_example_matches_shuffled_recount() {
        let r = 0.5f64.sqrt();
        let cube = ConvexBody::lp_ball(2, f64::INFINITY);
        let a = min_sign_balance(&tuple(&[&[1.0, 0.0], &[0.0, 1.0], &[r, r]]), &cube).unwrap();
        let b = min_sign_balance(&tuple(&[&[r, r], &[1.0, 0.0], &[0.0, 1.0]]), &cube).unwrap();
        assert_eq!(a.value, b.value);
        assert!((a.value - (1.0 - r)).abs() < 1e-12, "{}", a.value);
    }

    #[test]
    fn asymmetric_body_uses_all_signs() {
        let tri = ConvexBody::Polytope {
            normals: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]],
            offsets: vec![1.0, 1.0, 1.0],
        };
        let t = tuple(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let r = min_sign_balance(&t, &tri).unwrap();
        // the four sums ±e₁ ± e₂ have gauges 2, 1, 1, 2
        assert_eq!(r.value, 1.0);
    }

    #[test]
    fn parallel_path_matches_sequential() {
        let b2 = ConvexBody::lp_ball(3, 2.0);
        let vs: Vec<Vec<f64>> = (0..17)
            .map(|i| {
                let a = i as f64 * 0.7;
                vec![a.cos(), a.sin(), (0.3 * a).cos()]
            })
            .collect();
        let t = VectorTuple::new(vs.clone()).unwrap();
        let fast = min_sign_balance(&t, &b2).unwrap();
        let refs: Vec<&[f64]> = vs.iter().map(Vec::as_slice).collect();
        let (slow, _) = gray_walk(&refs[..16], &b2, &vs[16], 16, 0, -1.0);
        assert!((fast.value - slow).abs() < 1e-12);
        let recount = signed_sum(&refs, &fast.signs, 3);
        assert_eq!(b2.gauge_unchecked(&recount), fast.value);
    }

    #[test]
    fn decomposition_vertex_and_half() {
        let b2 = ConvexBody::lp_ball(2, 2.0);
        let t = VectorTuple::standard_basis(2);
        let beta = beta_subset(&t, &b2).unwrap().value;
        let d = combiclaim_decompose(&t, &b2, &[1.0, 0.0], 3, beta).unwrap();
        assert_eq!(d.remainder, vec![0.0, 0.0]);
        let d = combiclaim_decompose(&t, &b2, &[0.5, 0.5], 1, beta).unwrap();
        assert!(d.scaled_gauge <= 0.5 + 1e-12 && d.holds());
        assert!(matches!(
            combiclaim_decompose(&t, &b2, &[0.3, 0.5], 2, beta),
            Err(Error::NonDyadic { depth: 2 })
        ));
        assert!(combiclaim_decompose(&t, &b2, &[0.5, 0.5], 13, beta).is_err());
    }

    #[test]
    fn tuple_limits() {
        assert!(VectorTuple::new(vec![vec![1.0]; 25]).is_err());
        assert!(VectorTuple::new(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
        let t = VectorTuple::new(vec![vec![1.0]; 21]).unwrap();
        assert!(beta_subset(&t, &ConvexBody::lp_ball(1, 2.0)).is_err());
        let parsed: VectorTuple = serde_json::from_str("[[1,0],[0,1]]").unwrap();
        assert_eq!(parsed, VectorTuple::standard_basis(2));
    }
}
