#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::excessive_precision,
    clippy::too_many_arguments
)]

pub mod conditions;
pub mod error;
pub mod field;
pub mod geom;
pub mod grid;
pub mod hardy;
pub mod harness;
pub mod kernel;
pub mod operators;
pub mod quad;
pub mod report;
pub mod spaces;
pub mod weights;

pub use error::{Error, Result};
