pub mod acceptance;
pub mod config;
pub mod density_recon;
pub mod error;
pub mod io;
pub mod moment_recovery;
pub mod mollifier;
pub mod numerics;
pub mod phantoms;
pub mod pipeline;
pub mod projector;
pub mod spectral_inversion;

pub use error::{Error, Result};
