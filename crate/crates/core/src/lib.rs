//! Link-level Monte-Carlo simulator of hybrid millimeter-wave networks.
//!
//! The simulator models two-tier cellular deployments that can transmit in
//! the unlicensed V-band (57-64 GHz, oxygen-absorption limited) and the
//! lightly licensed E-band (71-76 / 81-86 / 92-95 GHz, low absorption,
//! higher allowed power), separately or aggregated. It sweeps mean BS-user
//! distance or interferer density over seeded Monte-Carlo trials and emits
//! mean per-user throughput curves as CSV.
//!
//! Module map:
//! - [`propagation`]: path loss, atmospheric absorption, noise, Shannon rate.
//! - [`regulatory`]: band definitions, power/gain/spectrum rules, validation.
//! - [`transceiver`]: single- vs dual-chain handover state machines.
//! - [`network`]: topology, sector antennas, interference, per-link SINR.
//! - [`policy`]: SNR/density classification and band allocation.
//! - [`scenario`]: the `key = value` scenario file format and defaults.
//! - [`sweep`]: deterministic trial driver, aggregation, CSV emission.

pub mod error;
pub mod network;
pub mod policy;
pub mod propagation;
pub mod regulatory;
pub mod scenario;
pub mod sweep;
pub mod transceiver;
pub mod units;

pub use error::{Error, Result};
