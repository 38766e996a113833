//! Fiber data of the pencil at a moduli point: the distinguished local
//! coordinate `x = f^{-1/n}`, primitive 1-form sections, the jump-kernel
//! section, and the tangent-fiber algebra with its residue metric.

mod fiber;
mod jumpform;
mod section;
mod xseries;

pub use fiber::{EngineConfig, FiberAlgebra, TangentVector};
pub use jumpform::JumpKernel;
pub use section::{PrimitiveSection, SectionCoeffs};
pub use xseries::{x_series_genus0, x_series_genus1, XData};

use crate::model::ModelError;
use crate::num::NumError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("section index k = {k} outside 2..=n with n = {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("section is not primitive at this point (min |rho(q)| = {min_value:.2e})")]
    NotPrimitive { min_value: f64 },
    #[error("chart/fiber frame is ill-conditioned (cond ~ {cond:.2e})")]
    SingularFrame { cond: f64 },
    #[error("polar part match failed: defect {0:.2e}")]
    PolarMatchFailure(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Num(#[from] NumError),
}

impl From<crate::elliptic::EllipticError> for EngineError {
    fn from(e: crate::elliptic::EllipticError) -> Self {
        EngineError::Model(ModelError::Elliptic(e))
    }
}
