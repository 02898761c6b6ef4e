pub mod classical;
pub mod continuation;
pub mod error;
pub mod extrapolate;
pub mod integral_shuffle;
mod jet;
pub mod num;
pub mod poly;
pub mod qcore;
pub mod qseries;
pub mod quadrature;
pub mod shuffle;
pub mod qcalculus;
pub mod special_values;
pub mod verify;

pub use error::{Error, Result};
pub use num::CValue;
pub use qcore::{EvalResult, QParam};
pub use qseries::{SVec, SeriesConfig};
