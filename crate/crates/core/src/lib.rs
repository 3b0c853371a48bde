pub mod displacement;
pub mod ensembles;
pub mod error;
pub mod fitting;
pub mod io;
pub mod linalg;
pub mod multifractal;
pub mod numeric;
pub mod pipeline;
pub mod stats;
pub mod synthetic;
pub mod theory;

pub use error::{Error, Result};
