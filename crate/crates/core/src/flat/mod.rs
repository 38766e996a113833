//! Flat coordinates, structure constants, the potential and the WDVV
//! residual.

mod genus0;
mod genus1;
mod potential;

pub use genus0::{flat_coordinates_genus0, FlatChartGenus0};
pub use genus1::{
    flat_frame_numeric, frame_targets, transported_frame, FlatFrameGrid, GridSpec, SectionSpace,
    SectionTargets,
};
pub use potential::{
    potential_genus0, potentiality_defect, structure_constants, wdvv_residual, PotentialFit,
};

use crate::engine::EngineError;
use crate::model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FlatError {
    #[error("no normalization makes eta constant: defect {0:.2e}")]
    FlatnessFailure(f64),
    #[error("frame closure defect {0:.2e} exceeds tolerance")]
    NonIntegrableFrame(f64),
    #[error("third derivatives are not a gradient: asymmetry {0:.2e}")]
    PotentialityFailure(f64),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<crate::num::NumError> for FlatError {
    fn from(e: crate::num::NumError) -> Self {
        FlatError::Engine(EngineError::Num(e))
    }
}
