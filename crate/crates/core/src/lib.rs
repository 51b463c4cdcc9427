pub mod builders;
pub mod cli;
pub mod constants;
pub mod error;
pub mod fields;
pub mod forms;
pub mod group;
pub mod integration;
pub mod model;
pub mod poincare;
pub mod transport;

pub use error::{Error, Result};
