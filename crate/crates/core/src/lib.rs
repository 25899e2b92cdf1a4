pub mod classical;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod otoc;
pub mod protocol;
pub mod rng;
pub mod scramblers;
pub mod state;

pub use error::{Error, Result};
