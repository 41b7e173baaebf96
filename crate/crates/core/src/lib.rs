//! Simulator for a driven pair of coupled optical cavities, one with loss and
//! one with either gain or extra loss, read out through a mechanical
//! modulation of the coupling.

pub mod commands;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod reproduce;
pub mod sensitivity;
pub mod spectrum;
pub mod sweep;
pub mod validate;

pub use error::{Error, Result};
pub use model::{decompose, CoupledModeSystem, Phase, SupermodeDecomposition};
pub use spectrum::MechanicalMode;
