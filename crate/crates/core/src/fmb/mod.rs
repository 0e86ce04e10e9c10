//! Filtered multiplicative bases: verification, obstructions, search, and
//! the decision pipeline that combines them into certificates.

mod certificate;
mod decide;
mod obstruction;
mod search;
mod verify;

pub use certificate::{Certificate, FoundRoute};
pub use decide::{abelian_basis, decide};
pub use obstruction::{
    class_two_obstruction, height_one_generators, quadratic_obstruction, ClassTwoReport, QuadraticReport,
};
pub use search::{search_fmb, SearchBudget, SearchOutcome, DEFAULT_BUDGET};
pub use verify::{is_fm_basis, VerifyReport};

use thiserror::Error;

use crate::abelian::AbelianError;
use crate::env::EnvError;
use crate::filtration::FiltrationError;
use crate::liealg::LieError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FmbError {
    #[error("candidate has {got} elements, expected {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("generators are not a minimal generating set of the augmentation ideal")]
    NotMinimalGenerating,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Filtration(#[from] FiltrationError),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}
