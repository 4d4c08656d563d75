//! Simulation and audit toolkit for the two-particle spin-correlation
//! experiment: the singlet oracle, an instruction-set hidden-variable model,
//! a setting-pair assignment model, a seeded Monte Carlo engine and the
//! analyses that compare them.

pub mod analysis;
pub mod cli;
pub mod domain;
pub mod engine;
pub mod hvmodels;
pub mod quantum;
pub mod stream;
