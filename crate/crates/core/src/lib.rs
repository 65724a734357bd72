pub mod bath;
pub mod eigenops;
pub mod error;
pub mod experiments;
pub mod gkls;
pub mod integrate;
pub mod jc;
pub mod operator;
pub mod propagate;

pub use error::{Error, Result};
