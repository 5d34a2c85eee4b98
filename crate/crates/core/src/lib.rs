//! Spectral simulation and verification tools for the fifth-order continuum
//! equation of the α+β Fermi–Pasta–Ulam chain, its Gardner, KdV and KdV5
//! limits, closed-form solutions and Painlevé analysis.

pub mod equations;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod io;
pub mod painleve;
pub mod params;
pub mod spectral;

pub use error::{Error, Result};
pub use params::{EquationKind, ModelParams, PhysicalChainParams};
pub use spectral::{Grid, RealField, SpectralField};
