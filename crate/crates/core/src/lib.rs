pub mod causality;
pub mod channel;
pub mod error;
pub mod fixtures;
pub mod games;
pub mod localizability;
pub mod measurement;
mod optim;
pub mod protocols;
pub mod random;
pub mod report;
pub mod tensor;
pub mod twirl;

pub use channel::{ChoiState, KrausChannel};
pub use error::{Error, Result};
pub use measurement::OrthogonalBasis;
pub use tensor::{BiDims, ComplexMatrix, Side, C64};
