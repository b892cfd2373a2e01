pub mod definite;
pub mod error;
pub mod form;
pub mod lattice;
pub mod matgroup;
pub mod matrix;
pub mod pipeline;

pub use error::{Error, Result};
