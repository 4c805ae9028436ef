//! Lattices L = B·ℤⁿ in small dimension: successive minima by enumeration,
//! covering radius by grid search over the fundamental cell, and the checks
//! relating them to balancing.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balancing::{beta_subset, VectorTuple};
use crate::body::ConvexBody;
use crate::error::{Error, Result};

/// Largest dimension for [`successive_minima`].
pub const MAX_MINIMA_DIM: usize = 4;
/// Largest dimension for [`covering_radius`].
pub const MAX_COVERING_DIM: usize = 3;
/// Coefficient half-window around a point when the body is unbounded.
pub const UNBOUNDED_WINDOW: i64 = 3;
/// Cap on the coefficient half-window for bounded bodies.
const MAX_WINDOW: i64 = 8;
/// Largest number of coefficient vectors enumerated for the minima.
const ENUMERATION_BUDGET: usize = 5_000_000;

/// Invertible basis; columns are the generators. JSON is row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct LatticeBasis {
    matrix: DMatrix<f64>,
}

impl LatticeBasis {
    /// Builds a basis from its rows.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > MAX_MINIMA_DIM {
            return Err(Error::Dimension {
                expected: MAX_MINIMA_DIM,
                found: n,
            });
        }
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: r.len(),
            });
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidBody("basis entries must be finite".into()));
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |r, c| rows[r][c]))
    }

    /// Builds a basis whose columns are `generators`.
    pub fn from_columns(generators: &[Vec<f64>]) -> Result<Self> {
        let n = generators.len();
        if n == 0 || generators.iter().any(|g| g.len() != n) {
            return Err(Error::Dimension {
                expected: n,
                found: generators.first().map_or(0, Vec::len),
            });
        }
        Self::from_rows(
            (0..n)
                .map(|r| generators.iter().map(|g| g[r]).collect())
                .collect(),
        )
    }

    fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        let scale = matrix.column_iter().map(|c| c.norm()).product::<f64>();
        let det = matrix.determinant();
        if !(det.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
            return Err(Error::SingularBasis { det });
        }
        if (matrix.transpose() * &matrix).cholesky().is_none() {
            return Err(Error::SingularBasis { det });
        }
        Ok(Self { matrix })
    }

    pub fn integer(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn diagonal(entries: &[f64]) -> Result<Self> {
        Self::from_matrix(DMatrix::from_diagonal(
            &nalgebra::DVector::from_column_slice(entries),
        ))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        self.matrix
            .column_iter()
            .map(|c| c.iter().copied().collect())
            .collect()
    }

    /// B·c
    pub fn point(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|r| (0..n).map(|c| self.matrix[(r, c)] * coeffs[c]).sum())
            .collect()
    }

    pub fn scaled(&self, a: f64) -> Result<Self> {
        Self::from_matrix(&self.matrix * a)
    }

    /// B·M for an integer matrix M given by rows; same lattice when M is
    /// unimodular.
    pub fn times_integer(&self, m: &[Vec<i64>]) -> Result<Self> {
        let n = self.dim();
        let mm = DMatrix::from_fn(n, n, |r, c| m[r][c] as f64);
        Self::from_matrix(&self.matrix * mm)
    }

    /// L ⊕ ℤ·e_{n+1}
    pub fn extended(&self) -> Result<Self> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(&self.matrix);
        m[(n, n)] = 1.0;
        Self::from_matrix(m)
    }

    /// sqrt of the diagonal of (BᵀB)⁻¹: |cᵢ| ≤ this·‖Bc‖₂.
    fn coefficient_bounds(&self) -> Vec<f64> {
        let gram = self.matrix.transpose() * &self.matrix;
        let inv = gram.try_inverse().expect("basis is invertible");
        (0..self.dim())
            .map(|i| inv[(i, i)].max(0.0).sqrt())
            .collect()
    }
}

impl TryFrom<Vec<Vec<f64>>> for LatticeBasis {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::from_rows(rows)
    }
}

impl From<LatticeBasis> for Vec<Vec<f64>> {
    fn from(b: LatticeBasis) -> Self {
        b.matrix
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

fn check_dims(lattice: &LatticeBasis, body: &ConvexBody) -> Result<()> {
    body.validate()?;
    if body.dim() != lattice.dim() {
        return Err(Error::Dimension {
            expected: lattice.dim(),
            found: body.dim(),
        });
    }
    Ok(())
}

/// Calls `f` on every integer vector with |cᵢ| ≤ bounds[i].
fn for_each_in_box(bounds: &[i64], mut f: impl FnMut(&[i64])) {
    let n = bounds.len();
    let mut c: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        f(&c);
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            if c[i] < bounds[i] {
                c[i] += 1;
                break;
            }
            c[i] = -bounds[i];
            i += 1;
        }
    }
}

/// λ₁ ≤ … ≤ λ_k with one achieving lattice vector each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessiveMinima {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    /// Euclidean enumeration radius used.
    pub radius: f64,
}

pub fn successive_minima(
    lattice: &LatticeBasis,
    body: &ConvexBody,
    k_max: usize,
) -> Result<SuccessiveMinima> {
    check_dims(lattice, body)?;
    let n = lattice.dim();
    if k_max == 0 || k_max > n {
        return Err(Error::Domain {
            name: "k_max",
            value: k_max as f64,
            expected: "1 <= k_max <= n",
        });
    }
    if !body.is_symmetric() {
        return Err(Error::InvalidBody(
            "successive minima need a symmetric body".into(),
        ));
    }
    let r_out = body
        .circumradius()
        .ok_or_else(|| Error::InvalidBody("successive minima need a bounded body".into()))?;
    // the basis vectors are n independent lattice vectors
    let lambda_cap = lattice
        .columns()
        .iter()
        .map(|c| body.gauge_unchecked(c))
        .fold(0.0, f64::max);
    let bounds_unit = lattice.coefficient_bounds();
    let mut radius = lambda_cap * r_out * (1.0 + 1e-9);
    for _ in 0..4 {
        let bounds: Vec<i64> = bounds_unit
            .iter()
            .map(|b| (2.0 * b * radius).ceil() as i64)
            .collect();
        let size: usize = bounds.iter().map(|&b| 2 * b as usize + 1).product();
        if size > ENUMERATION_BUDGET {
            return Err(Error::Budget {
                what: "lattice enumeration box",
                size,
                limit: ENUMERATION_BUDGET,
            });
        }
        let mut found: Vec<(f64, Vec<f64>)> = Vec::new();
        for_each_in_box(&bounds, |c| {
            // one of ±c suffices for a symmetric body
            if c.iter().find(|&&x| x != 0).is_none_or(|&x| x < 0) {
                return;
            }
            let cf: Vec<f64> = c.iter().map(|&x| x as f64).collect();
            let v = lattice.point(&cf);
            let g = body.gauge_unchecked(&v);
            if g <= lambda_cap * (1.0 + 1e-9) {
                found.push((g, v));
            }
        });
        found.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| cmp_vec(&a.1, &b.1)));
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut out = SuccessiveMinima {
            values: Vec::new(),
            vectors: Vec::new(),
            radius,
        };
        for (g, v) in found {
            if let Some(r) = independent_residual(&basis, &v) {
                basis.push(r);
                out.values.push(g);
                out.vectors.push(v);
                if out.values.len() == k_max {
                    return Ok(out);
                }
            }
        }
        radius *= 2.0;
    }
    Err(Error::EnumerationRadius {
        radius,
        wanted: k_max,
    })
}

fn cmp_vec(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Gram–Schmidt residual of `v` against an orthogonal family, if `v` is
/// independent of it.
fn independent_residual(orth: &[Vec<f64>], v: &[f64]) -> Option<Vec<f64>> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut r = v.to_vec();
    for q in orth {
        let c = dot(&r, q) / dot(q, q);
        for (a, b) in r.iter_mut().zip(q) {
            *a -= c * b;
        }
    }
    (dot(&r, &r).sqrt() > 1e-9 * dot(v, v).sqrt()).then_some(r)
}

/// Grid-and-refine estimate of μ(L, V).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringEstimate {
    pub value: f64,
    /// Point of the fundamental cell attaining `value`.
    pub witness: Vec<f64>,
    pub grid: usize,
    /// Euclidean diameter of one grid cell.
    pub resolution: f64,
}

/// min over lattice points ℓ of ‖x − ℓ‖_V for x = B·f with f in the unit
/// cube. The cell vertices are always candidates, so the value never
/// exceeds the vertex-only bound.
struct CellDistance<'a> {
    lattice: &'a LatticeBasis,
    body: &'a ConvexBody,
    bounds_unit: Vec<f64>,
    r_out: Option<f64>,
}

impl CellDistance<'_> {
    fn eval(&self, f: &[f64]) -> f64 {
        let n = f.len();
        let x = self.lattice.point(f);
        let dist = |k: &[f64]| {
            let l = self.lattice.point(k);
            let d: Vec<f64> = x.iter().zip(&l).map(|(a, b)| a - b).collect();
            self.body.gauge_unchecked(&d)
        };
        let base: Vec<f64> = f.iter().map(|v| v.floor()).collect();
        let mut best = f64::INFINITY;
        for corner in 0..1usize << n {
            let k: Vec<f64> = (0..n)
                .map(|i| base[i] + ((corner >> i) & 1) as f64)
                .collect();
            best = best.min(dist(&k));
        }
        let windows: Vec<i64> = match self.r_out {
            Some(r) => self
                .bounds_unit
                .iter()
                .map(|b| ((b * best * r).ceil() as i64 + 1).min(MAX_WINDOW))
                .collect(),
            None => vec![UNBOUNDED_WINDOW; n],
        };
        let mut k = vec![0.0; n];
        for_each_in_box(&windows, |c| {
            for i in 0..n {
                k[i] = base[i] + c[i] as f64;
            }
            let d = dist(&k);
            if d < best {
                best = d;
            }
        });
        best
    }
}

/// Estimates the covering radius μ(L, V) = least c with L + cV = ℝⁿ: the
/// distance function is maximized on a `grid`ⁿ grid of the fundamental cell
/// and the best grid points are refined by pattern search.
pub fn covering_radius(
    lattice: &LatticeBasis,
    body: &ConvexBody,
    grid: usize,
) -> Result<CoveringEstimate> {
    check_dims(lattice, body)?;
    let n = lattice.dim();
    if n > MAX_COVERING_DIM {
        return Err(Error::Dimension {
            expected: MAX_COVERING_DIM,
            found: n,
        });
    }
    let grid = grid.max(2);
    let oracle = CellDistance {
        lattice,
        body,
        bounds_unit: lattice.coefficient_bounds(),
        r_out: body.circumradius(),
    };
    let total = grid.pow(n as u32);
    let coords = |idx: usize| -> Vec<f64> {
        (0..n)
            .map(|i| ((idx / grid.pow(i as u32)) % grid) as f64 / grid as f64)
            .collect()
    };
    let mut values: Vec<(f64, usize)> = (0..total)
        .into_par_iter()
        .map(|idx| (oracle.eval(&coords(idx)), idx))
        .collect();
    values.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

    let mut directions: Vec<Vec<f64>> = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let d: Vec<f64> = (0..n)
            .map(|i| ((code / 3usize.pow(i as u32)) % 3) as f64 - 1.0)
            .collect();
        if d.iter().any(|&v| v != 0.0) {
            directions.push(d);
        }
    }
    let refined: Vec<(f64, Vec<f64>)> = values
        .iter()
        .take(8)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|&(v, idx)| {
            let mut f = coords(idx);
            let mut val = v;
            let mut step = 1.0 / grid as f64;
            while step > 1e-7 {
                let mut moved = false;
                for d in &directions {
                    let g: Vec<f64> = f.iter().zip(d).map(|(a, b)| a + step * b).collect();
                    let gv = oracle.eval(&g);
                    if gv > val {
                        val = gv;
                        f = g;
                        moved = true;
                        break;
                    }
                }
                if !moved {
                    step *= 0.5;
                }
            }
            (val, f)
        })
        .collect();
    let (value, f) = refined
        .into_iter()
        .fold((f64::NEG_INFINITY, Vec::new()), |b, c| {
            if c.0 > b.0 {
                c
            } else {
                b
            }
        });
    let cell: Vec<f64> = vec![1.0 / grid as f64; n];
    let resolution = (0..1usize << n)
        .map(|signs| {
            let v: Vec<f64> = cell
                .iter()
                .enumerate()
                .map(|(i, c)| if signs >> i & 1 == 1 { -c } else { *c })
                .collect();
            lattice.point(&v).iter().map(|x| x * x).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max);
    Ok(CoveringEstimate {
        value,
        witness: lattice.point(&f),
        grid,
        resolution,
    })
}

/// μ(L, V)/λₙ(L, U), a lower bound on α(U, V).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaCertificate {
    pub lattice: LatticeBasis,
    pub lambda_n: f64,
    pub mu: f64,
    pub ratio: f64,
}

pub fn alpha_certificate(
    lattice: &LatticeBasis,
    u: &ConvexBody,
    v: &ConvexBody,
    grid: usize,
) -> Result<AlphaCertificate> {
    let n = lattice.dim();
    let lambda_n = successive_minima(lattice, u, n)?.values[n - 1];
    let mu = covering_radius(lattice, v, grid)?.value;
    Ok(AlphaCertificate {
        lattice: lattice.clone(),
        lambda_n,
        mu,
        ratio: mu / lambda_n,
    })
}

/// Tolerance on μ in the lattice-versus-balancing comparisons.
pub const LATTICE_TOL: f64 = 3e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaBetaReport {
    pub mu: f64,
    pub beta_subset: f64,
    pub holds: bool,
}

/// Compares μ(L, V) for the lattice generated by the tuple with the subset
/// balancing constant of the tuple.
pub fn verify_alpha_le_beta(
    tuple: &VectorTuple,
    body: &ConvexBody,
    grid: usize,
) -> Result<AlphaBetaReport> {
    let lattice = LatticeBasis::from_columns(tuple.vectors())?;
    let mu = covering_radius(&lattice, body, grid)?.value;
    let beta = beta_subset(tuple, body)?.value;
    Ok(AlphaBetaReport {
        mu,
        beta_subset: beta,
        holds: mu <= beta + LATTICE_TOL,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorReport {
    pub mu: f64,
    pub mu_extended: f64,
    pub holds: bool,
}

/// μ(L, V) against μ(L ⊕ ℤ, V × ℝ).
pub fn tensor_extend(
    lattice: &LatticeBasis,
    body: &ConvexBody,
    grid: usize,
) -> Result<TensorReport> {
    if lattice.dim() > 2 {
        return Err(Error::Dimension {
            expected: 2,
            found: lattice.dim(),
        });
    }
    let mu = covering_radius(lattice, body, grid)?.value;
    let mu_extended = covering_radius(&lattice.extended()?, &body.clone().cylinder(), grid)?.value;
    Ok(TensorReport {
        mu,
        mu_extended,
        holds: (mu - mu_extended).abs() <= LATTICE_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minima_examples() {
        let b2 = ConvexBody::lp_ball(2, 2.0);
        let m = successive_minima(&LatticeBasis::integer(2), &b2, 2).unwrap();
        assert_eq!(m.values, vec![1.0, 1.0]);
        let m = successive_minima(&LatticeBasis::diagonal(&[1.0, 3.0]).unwrap(), &b2, 2).unwrap();
        assert_eq!(m.values, vec![1.0, 3.0]);
        let cube = ConvexBody::lp_ball(2, f64::INFINITY);
        let m = successive_minima(&LatticeBasis::integer(2), &cube, 2).unwrap();
        assert_eq!(m.values, vec![1.0, 1.0]);
        // a skewed basis of ℤ²
        let skew = LatticeBasis::from_rows(vec![vec![1.0, 5.0], vec![0.0, 1.0]]).unwrap();
        let m = successive_minima(&skew, &b2, 2).unwrap();
        assert_eq!(m.values, vec![1.0, 1.0]);
        assert!(successive_minima(&skew, &ConvexBody::coordinate_slab(2, 1.0), 2).is_err());
    }

    #[test]
    fn covering_examples() {
        let z2 = LatticeBasis::integer(2);
        let mu = covering_radius(&z2, &ConvexBody::lp_ball(2, 2.0), 32).unwrap();
        assert!((mu.value - 0.5f64.sqrt()).abs() < 1e-6, "{mu:?}");
        let mu = covering_radius(&z2, &ConvexBody::lp_ball(2, 1.0), 32).unwrap();
        assert!((mu.value - 1.0).abs() < 1e-6);
        let c = 0.3;
        let mu = covering_radius(&z2, &ConvexBody::coordinate_slab(2, c), 32).unwrap();
        assert!((mu.value - 1.0 / (2.0 * c)).abs() < 1e-6);
    }

    #[test]
    fn basis_validation_and_json() {
        assert!(matches!(
            LatticeBasis::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]),
            Err(Error::SingularBasis { .. })
        ));
        assert!(LatticeBasis::from_rows(vec![vec![1.0; 5]; 5]).is_err());
        let b: LatticeBasis = serde_json::from_str("[[1, 2], [0, 3]]").unwrap();
        assert_eq!(b.columns(), vec![vec![1.0, 0.0], vec![2.0, 3.0]]);
        assert_eq!(serde_json::to_string(&b).unwrap(), "[[1.0,2.0],[0.0,3.0]]");
    }

    #[test]
    fn tensor_and_alpha_beta() {
        let c = 0.4;
        let r = tensor_extend(
            &LatticeBasis::integer(1),
            &ConvexBody::lp_ball(1, 2.0).scaled(c),
            32,
        )
        .unwrap();
        assert!((r.mu - 1.0 / (2.0 * c)).abs() < 1e-6 && r.holds, "{r:?}");
        let r = verify_alpha_le_beta(
            &VectorTuple::standard_basis(2),
            &ConvexBody::lp_ball(2, 2.0),
            32,
        )
        .unwrap();
        assert!(r.holds && (r.beta_subset - 2f64.sqrt()).abs() < 1e-12);
    }
}
