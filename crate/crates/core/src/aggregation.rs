//! Sizing how many small cells one vertical FSO link can backhaul.

use crate::error::{ensure_non_negative, ensure_positive, ModelError, Result};

/// Per-cell backhaul traffic figures in bit/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficProfile {
    busy_rate_bps: f64,
    peak_rate_bps: f64,
}

impl TrafficProfile {
    pub fn new(busy_rate_bps: f64, peak_rate_bps: f64) -> Result<Self> {
        let busy = ensure_positive("traffic.busy_rate", busy_rate_bps)?;
        let peak = ensure_positive("traffic.peak_rate", peak_rate_bps)?;
        if peak < busy {
            return Err(ModelError::Domain {
                field: "traffic.peak_rate",
                value: peak,
                reason: "must be >= busy_rate",
            });
        }
        Ok(Self {
            busy_rate_bps: busy,
            peak_rate_bps: peak,
        })
    }

    pub fn busy_rate_bps(&self) -> f64 {
        self.busy_rate_bps
    }

    pub fn peak_rate_bps(&self) -> f64 {
        self.peak_rate_bps
    }
}

/// `max(N·R_busy, R_peak)`.
pub fn aggregated_demand(n_cells: u64, profile: &TrafficProfile) -> Result<f64> {
    if n_cells == 0 {
        return Err(ModelError::Validation {
            what: "aggregation",
            reason: "need at least one cell".into(),
        });
    }
    Ok((n_cells as f64 * profile.busy_rate_bps).max(profile.peak_rate_bps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CellRounding {
    /// `⌈R/R_busy⌉`; may admit slight oversubscription.
    #[default]
    Ceiling,
    /// `⌊R/R_busy⌋`; every cell gets its full busy-time rate.
    Floor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellCapacity {
    pub cells: u64,
    /// Set when `cells·R_busy` exceeds the link rate.
    pub oversubscribed: bool,
}

pub fn supported_cells_with(
    link_rate_bps: f64,
    profile: &TrafficProfile,
    rounding: CellRounding,
) -> Result<CellCapacity> {
    let rate = ensure_non_negative("link_rate", link_rate_bps)?;
    let ratio = rate / profile.busy_rate_bps;
    let cells = match rounding {
        CellRounding::Ceiling => ratio.ceil(),
        CellRounding::Floor => ratio.floor(),
    } as u64;
    Ok(CellCapacity {
        cells,
        oversubscribed: cells as f64 * profile.busy_rate_bps > rate,
    })
}

/// `⌈R/R_busy⌉`.
pub fn supported_cells(link_rate_bps: f64, profile: &TrafficProfile) -> Result<u64> {
    supported_cells_with(link_rate_bps, profile, CellRounding::Ceiling).map(|c| c.cells)
}
