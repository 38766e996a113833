//! Moduli points of abelian integrals and their critical data.
//!
//! A point is a curve of genus 0 or 1 together with an integral `f` whose
//! differential `omega = df` has a single pole of order `n+1` at the marked
//! point and prescribed cycle periods. Critical points of `f` (zeros of
//! `omega`) and the critical values carry the structure everything else is
//! built from.

mod abelian;
mod zeros;

pub use abelian::{
    integration_path, solve_leaf_coefficients, AbelianIntegral, CriticalData, CurveData,
};

use crate::elliptic::EllipticError;
use crate::num::NumError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid moduli point: {0}")]
    InvalidModel(String),
    #[error("non-semisimple point: zeros of omega collide (separation {separation:.2e})")]
    NonSemisimplePoint { separation: f64 },
    #[error("located {found} zeros of omega, expected {expected}")]
    RootCountMismatch { found: usize, expected: usize },
    #[error("deformation left the semisimple locus")]
    LeftSemisimpleLocus,
    #[error("no pole-free integration path found (clearance {0:.2e})")]
    NoSafePath(f64),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}
