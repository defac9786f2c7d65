pub mod error;
pub mod poly;

pub use error::{Error, Result};
pub mod exterior;
pub mod algebroid;
pub mod report;
pub mod bundlemap;
pub mod homotopy;
pub mod tangentcase;
pub mod groupcase;
pub mod document;
pub mod cli;
