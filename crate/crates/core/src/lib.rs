//! Link budgets and total cost of ownership for vertical free-space-optical
//! (FSO) backhaul/fronthaul between ground small cells and networked flying
//! platforms (NFPs).
//!
//! The crate is organised bottom-up:
//!
//! - [`atmosphere`]: Mie scattering (Kruse), fog, rain, layered clouds and
//!   Hufnagel-Valley scintillation.
//! - [`geometry`]: slant path and beam-spread loss.
//! - [`link_budget`]: received power, achievable rate and link margin.
//! - [`scenario`]: weather presets, default parameters and sweeps.
//! - [`aggregation`]: how many small cells one link can carry.
//! - [`hetnet_cost`]: Poisson HetNet layouts and per-technology TCO.
//! - [`config`] and [`report`]: run configuration and CSV/text output used by
//!   the `vfso` command-line tool.

pub mod aggregation;
pub mod atmosphere;
pub mod config;
pub mod error;
pub mod geometry;
pub mod hetnet_cost;
pub mod link_budget;
pub mod report;
pub mod scenario;

pub use error::{ModelError, Result};
