pub mod arith;
pub mod error;
pub mod glue;
pub mod ilim;
pub mod measure;
pub mod outside;
pub mod tent;
pub mod verify;

pub use error::{Error, Result};
