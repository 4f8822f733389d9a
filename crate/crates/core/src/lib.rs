//! Ridge-Nehari stationary solutions of the Swift–Hohenberg equation
//! `(Δ+1)²u − αu − βu² + u³ = 0` on Neumann boxes and flat tori.

pub mod bump;
pub mod domain;
pub mod equilibria;
pub mod error;
pub mod field;
pub mod functionals;
pub mod io;
pub mod lattice;
pub mod nehari;
pub mod optimize;
pub mod params;
pub mod report;
pub mod spectral;
pub mod tiling;

pub use domain::{DomainKind, DomainSpec};
pub use error::{NshError, Result};
pub use field::SpectralField;
pub use params::Params;
pub use spectral::{Basis, EigenTable, Mode, ModeKind};
