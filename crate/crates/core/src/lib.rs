//! Exact Fock-space predictions for photon-pair polarization experiments.
//!
//! States are sparse superpositions of number states over labelled bosonic
//! modes. Optical elements act on the positive-frequency field, which is kept
//! as a pair of linear forms over source-mode annihilators; every detection
//! rate is then a normally ordered expectation evaluated exactly on the state.
//!
//! Rates are dimensionless: the field normalization constant is fixed to one.

pub mod detection;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod jones;
pub mod scenario;

pub use error::{Error, Result};
pub use fock::{FockKet, Frequency, LinearForm, ModeId, Occupation, Polarization, StateKind};
pub use jones::{ChannelField, JonesMatrix};
