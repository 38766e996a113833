//! Independent oracles and the axiom battery: cocycle multiplication against
//! componentwise multiplication, the simple-pole shape of the pencil in `z`,
//! flat transport in the forms-with-jumps model, and the full Frobenius
//! checks with per-genus thresholds.

mod cech;
mod jumps;
mod pencil;
mod suite;

pub use cech::{cech_multiplication_oracle, CechCocycle};
pub use jumps::{
    isotropy_pairing_defect, jumps_flatness_check, transport_pointwise, transport_stepwise,
    JumpsReport,
};
pub use pencil::{pencil_consistency, PencilReport, Z_SAMPLES};
pub use suite::{axiom_suite, CheckRecord, SuiteReport, SuiteThresholds};

use crate::engine::EngineError;
use crate::flat::FlatError;
use crate::model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("cocycle relation violated: defect {0:.2e}")]
    InvalidCocycle(f64),
    #[error("pencil fit failed: residual {0:.2e}")]
    FitFailure(f64),
    #[error("transport solve failed at step {step}: {reason}")]
    SolveFailure { step: usize, reason: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Flat(#[from] FlatError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<crate::num::NumError> for VerifyError {
    fn from(e: crate::num::NumError) -> Self {
        VerifyError::Engine(EngineError::Num(e))
    }
}
