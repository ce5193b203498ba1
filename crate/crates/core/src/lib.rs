//! Link-level simulation of a multi-user uplink using GFDM with index
//! modulation.
//!
//! Each user maps bits onto groups of subcarriers (index bits choose which
//! subcarriers are active, the rest ride on Gray-labelled QAM), spreads the
//! frame with a GFDM transmitter matrix and sends it over a multipath
//! Rayleigh MIMO channel. The base station separates all users and inverts
//! the modulation in one MMSE step, then decodes every group.
//!
//! The [`sim`] module wraps the chain in a seeded Monte Carlo BER harness
//! comparing GFDM-IM, classical GFDM and OFDM-IM.

pub mod channel;
pub mod codec;
pub mod error;
pub mod frame;
pub mod modulator;
pub mod numerics;
pub mod receiver;
pub mod sim;

pub use error::{Error, Result};
