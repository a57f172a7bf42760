pub mod error;
pub mod linalg;
pub mod onebody;
pub mod permsym;
pub mod spectra;
pub mod twobody;
pub mod perturbation;
pub mod unitary;
pub mod cli;

pub use error::{Error, Result};
