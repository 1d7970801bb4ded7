//! Configuration, file formats, parallel shot simulation and the
//! experiment pipeline around `posmet-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod sim;

pub use config::Config;
pub use error::AppError;
