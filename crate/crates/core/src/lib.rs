//! Additive combinatorics on finite and discrete abelian groups: Fourier
//! analysis on `Z_{n_1} x ... x Z_{n_k}`, sumsets and their periods, densities
//! and means on `Z`, Bohr sets, and an explicit sumset construction.

pub mod abelian;
pub mod bits;
pub mod bohr;
pub mod cli;
pub mod commands;
pub mod config;
pub mod counterexample;
pub mod density;
pub mod error;
pub mod exhaustive;
pub mod floors;
pub mod frequency;
pub mod hartman;
pub mod means;
pub mod oracle;
pub mod report;
pub mod rules;
pub mod spectral;
pub mod suite;
pub mod sumset;

pub use abelian::{CharacterIndex, FiniteAbelianGroup, GroupElement, Subgroup};
pub use error::{LabError, Result};
pub use spectral::{GroupFunction, SpectralMeasure, Spectrum};
pub use sumset::{GroupSubset, KneserCertificate, QuotientMap};
