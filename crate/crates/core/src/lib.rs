//! Deterministic mission and deployment simulation toolkit for a CubeSat
//! TT&C system.
//!
//! * [`budget`]: payload data volume, coding overhead, downlink time and rate.
//! * [`link`]: parametric antenna patterns, polarization mismatch, FSPL and
//!   link margin.
//! * [`adm`]: event-driven simulation of the UHF antenna deployment
//!   mechanism with thermal melt lines, redundant knives, timers,
//!   telecommands and fault injection.
//! * [`config`] / [`paper_check`]: the configuration schema and the reference
//!   check suite used by the `ttc-sim` binary.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adm;
pub mod budget;
pub mod config;
pub mod error;
pub mod link;
pub mod paper_check;
pub mod quantities;

pub use error::{DomainError, ProtocolError};
