//! Complex polynomial, Laurent series and dense linear algebra primitives.

mod laurent;
mod linalg;
mod poly;
mod roots;

pub use laurent::{ExpansionPoint, LaurentSeries};
pub use linalg::CMatrix;
pub use poly::Polynomial;
pub use roots::{poly_roots, RootConfig};

use crate::C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumError {
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("root iteration failed to converge within {0} iterations")]
    NonConvergence(usize),
    #[error("truncation order {trunc} does not certify the residue coefficient")]
    InsufficientTruncation { trunc: i32 },
    #[error("polynomial is not monic (leading coefficient {0})")]
    NotMonic(C64),
    #[error("requested order {requested} below minimum {minimum}")]
    OrderTooSmall { requested: i32, minimum: i32 },
    #[error("series expanded at incompatible points")]
    IncompatibleExpansionPoints,
    #[error("series valuation unsuitable for the operation: {0}")]
    ValuationError(&'static str),
    #[error("degree {0} exceeds the configured root-finding cap {1}")]
    DegreeCap(usize, usize),
    #[error("singular linear system")]
    SingularSystem,
}

/// |a - b| for complex values, the distance used by all tolerance checks.
pub fn cdist(a: C64, b: C64) -> f64 {
    (a - b).norm()
}

/// Expansion of `x(t) = f(t)^{-1/n}` at infinity for monic `f` of degree `n`,
/// as a series in `1/t` with leading coefficient exactly 1 (principal
/// branch). The compositional inverse `t(x)` is `result.revert()`.
pub fn puiseux_inverse_root(f: &Polynomial, order: i32) -> Result<LaurentSeries, NumError> {
    if !f.is_monic() {
        return Err(NumError::NotMonic(f.leading()));
    }
    let n = f.degree() as i32;
    if order < n {
        return Err(NumError::OrderTooSmall {
            requested: order,
            minimum: n,
        });
    }
    // f(t)/t^n = 1 + sum_{i<n} a_i v^{n-i} with v = 1/t
    let inf = ExpansionPoint::Infinity;
    let mut s = LaurentSeries::zero(inf, 0, order);
    for i in 0..=f.degree() {
        let k = n - i as i32;
        if k <= order {
            s = s
                .add(&LaurentSeries::monomial(inf, f.coeff(i), k, order))
                .unwrap();
        }
    }
    let root = s.powf(-1.0 / n as f64)?;
    Ok(root.shift(1).truncate(order))
}

/// Largest coefficient magnitude, the scale against which tolerances are set.
pub fn coeff_scale(coeffs: &[C64]) -> f64 {
    coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0)
}
