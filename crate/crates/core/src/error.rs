use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument `{name}` = {value} is outside its domain ({expected})")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("root search failed to converge for {what}")]
    RootSearch { what: &'static str },

    #[error("no sign change of m' found on the grid")]
    NoCriticalPoint,

    #[error("{count} sign changes of m' found on the grid (expected exactly one)")]
    CriticalPointNotUnique { count: usize, locations: Vec<f64> },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid convex body: {0}")]
    InvalidBody(String),

    #[error("origin is not an interior point of the body")]
    OriginNotInterior,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("enumeration budget exceeded: {what} ({size} > {limit})")]
    Budget {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("point is not dyadic at depth {depth} in the given basis")]
    NonDyadic { depth: u32 },

    #[error("singular basis (|det| = {det:e})")]
    SingularBasis { det: f64 },

    #[error("enumeration radius {radius} insufficient to find {wanted} independent vectors")]
    EnumerationRadius { radius: f64, wanted: usize },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value: p,
            expected: "0 < p < 1",
        })
    }
}
