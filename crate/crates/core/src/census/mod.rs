//! The census over a universe of 2×2 matrices: signatures, bucketing,
//! pairwise class comparison, merging by certified equivalence search, and
//! the resulting counts of decided and open pairs.

mod report;
mod run;
mod store;
mod universe;

use thiserror::Error;

use crate::intmat::MatrixError;
use crate::invariants::InvariantError;
use crate::sse::SseError;

pub use report::{report, Report, Summary};
pub use run::{load_state, run_census, CensusState, Stage};
pub use store::{Record, Stamp, Store, StoreError, VERSION};
pub use universe::{enumerate_universe, is_member, Universe};

#[derive(Debug, Error)]
pub enum CensusError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error(transparent)]
    Sse(#[from] SseError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("{a} and {b} are certified equivalent but separated by {separator}")]
    Contradiction { a: String, b: String, separator: String },
}
