//! Weierstrass functions, lattice invariants, quasi-periods and numerical
//! contour periods for the normalized lattice `Z + tau Z`.

mod cycle;
mod lattice;
mod quad;
mod weierstrass;

pub use cycle::{contour_period, Cycle, CycleKind, A_CYCLE_OFFSET};
pub use lattice::Lattice;
pub use quad::integrate_polyline;
pub use weierstrass::{g_invariants_row_sum, wp_row_sum};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EllipticError {
    #[error("tau must have positive imaginary part (got {0})")]
    LowerHalfPlane(f64),
    #[error("evaluation point within {0:.2e} of a lattice point")]
    PoleAtLatticePoint(f64),
    #[error("integration path passes within {0:.2e} of a pole")]
    PoleOnPath(f64),
    #[error("quadrature failed to reach tolerance {tol:.2e} (error estimate {err:.2e})")]
    QuadratureFailure { tol: f64, err: f64 },
}
