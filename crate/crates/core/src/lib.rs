pub mod analysis;
pub mod basis;
pub mod bivariate;
pub mod cli;
pub mod error;
pub mod expr;
pub mod field;
pub mod moduli;
pub mod special_functions;
pub mod univariate;

pub use error::{Error, Result};
