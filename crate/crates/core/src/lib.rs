//! Shadow-term expansions of eddy-current corner singularities and their extraction.

pub mod error;
pub mod extraction;
pub mod quadrature;
pub mod shadow_engine;
pub mod singular_functions;
pub mod term_algebra;

pub use error::{Error, Result};
