//! Received power, achievable data rate and link margin of a vertical FSO link.
//!
//! The rate model is photon-counting: the receiver needs `N_b` photons per
//! bit, so `R = P_r / (E_p · N_b)` with `E_p = h_p·c/λ`.

use crate::atmosphere::{total_atmospheric_loss, AtmosphericLoss};
use crate::error::{ensure_non_negative, ensure_positive, ModelError, Result};
use crate::geometry::{geometrical_capture_fraction, geometrical_loss, LinkGeometry};
use crate::scenario::WeatherScenario;

pub struct PhysicalConstants;

impl PhysicalConstants {
    /// Planck's constant, J·s.
    pub const PLANCK: f64 = 6.626e-34;
    /// Speed of light, m/s.
    pub const LIGHT_SPEED: f64 = 3.0e8;
}

/// Optical front-end parameters of one FSO transceiver pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransceiverParams {
    transmit_power_w: f64,
    tx_efficiency: f64,
    rx_efficiency: f64,
    wavelength_nm: f64,
    pointing_loss_db: f64,
    receiver_sensitivity: f64,
}

fn ensure_efficiency(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 && value <= 1.0 {
        Ok(value)
    } else {
        Err(ModelError::Domain {
            field,
            value,
            reason: "must lie in (0, 1]",
        })
    }
}

impl TransceiverParams {
    pub fn new(
        transmit_power_w: f64,
        tx_efficiency: f64,
        rx_efficiency: f64,
        wavelength_nm: f64,
        pointing_loss_db: f64,
        receiver_sensitivity: f64,
    ) -> Result<Self> {
        Ok(Self {
            transmit_power_w: ensure_positive("transceiver.transmit_power", transmit_power_w)?,
            tx_efficiency: ensure_efficiency("transceiver.tx_efficiency", tx_efficiency)?,
            rx_efficiency: ensure_efficiency("transceiver.rx_efficiency", rx_efficiency)?,
            wavelength_nm: ensure_positive("transceiver.wavelength", wavelength_nm)?,
            pointing_loss_db: ensure_non_negative("transceiver.pointing_loss", pointing_loss_db)?,
            receiver_sensitivity: ensure_positive(
                "transceiver.receiver_sensitivity",
                receiver_sensitivity,
            )?,
        })
    }

    pub fn transmit_power_w(&self) -> f64 {
        self.transmit_power_w
    }

    pub fn tx_efficiency(&self) -> f64 {
        self.tx_efficiency
    }

    pub fn rx_efficiency(&self) -> f64 {
        self.rx_efficiency
    }

    pub fn wavelength_nm(&self) -> f64 {
        self.wavelength_nm
    }

    pub fn pointing_loss_db(&self) -> f64 {
        self.pointing_loss_db
    }

    /// Photons per bit required at the target error rate.
    pub fn receiver_sensitivity(&self) -> f64 {
        self.receiver_sensitivity
    }

    pub fn optical_loss_db(&self) -> f64 {
        optical_loss(self.tx_efficiency, self.rx_efficiency)
    }
}

/// Every loss term of one link evaluation, in dB.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LossBreakdown {
    pub fog_db: f64,
    pub rain_db: f64,
    pub cloud_db: f64,
    pub scintillation_db: f64,
    pub geometrical_db: f64,
    pub pointing_db: f64,
    pub optical_db: f64,
}

impl LossBreakdown {
    pub fn atmospheric_db(&self) -> f64 {
        self.rain_db + self.fog_db + self.cloud_db + self.scintillation_db
    }

    pub fn total_db(&self) -> f64 {
        self.atmospheric_db() + self.geometrical_db + self.pointing_db + self.optical_db
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetResult {
    pub losses: LossBreakdown,
    pub received_power_w: f64,
    pub data_rate_bps: f64,
    pub target_rate_bps: f64,
    /// `-inf` when the received power underflows to zero.
    pub link_margin_db: f64,
    pub link_viable: bool,
}

/// `−10·log₁₀(η_t·η_r)`.
pub fn optical_loss(tx_efficiency: f64, rx_efficiency: f64) -> f64 {
    let product = tx_efficiency * rx_efficiency;
    if product >= 1.0 {
        0.0
    } else {
        -10.0 * product.log10()
    }
}

/// Photon energy in joules for a wavelength in nanometres.
pub fn photon_energy(wavelength_nm: f64) -> f64 {
    PhysicalConstants::PLANCK * PhysicalConstants::LIGHT_SPEED / (wavelength_nm * 1e-9)
}

pub fn received_power(tx: &TransceiverParams, geometry: &LinkGeometry, atm_loss_db: f64) -> f64 {
    let attenuation_db = tx.pointing_loss_db + atm_loss_db;
    tx.transmit_power_w
        * tx.tx_efficiency
        * tx.rx_efficiency
        * 10f64.powf(-attenuation_db / 10.0)
        * geometrical_capture_fraction(geometry)
}

fn rate_from_power(tx: &TransceiverParams, power_w: f64) -> f64 {
    power_w / (photon_energy(tx.wavelength_nm) * tx.receiver_sensitivity)
}

/// Achievable data rate in bit/s.
pub fn achievable_rate(
    tx: &TransceiverParams,
    geometry: &LinkGeometry,
    scenario: &WeatherScenario,
) -> Result<f64> {
    let atm = total_atmospheric_loss(scenario, geometry, tx.wavelength_nm)?;
    Ok(rate_from_power(
        tx,
        received_power(tx, geometry, atm.total_db()),
    ))
}

/// Link margin `10·log₁₀(rate/target)` in dB; `-inf` for a dead link.
pub fn link_margin(rate_bps: f64, target_rate_bps: f64) -> Result<f64> {
    ensure_non_negative("rate", rate_bps)?;
    let target = ensure_positive("target_rate", target_rate_bps)?;
    if rate_bps == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(10.0 * (rate_bps / target).log10())
}

/// Full link evaluation: loss breakdown, received power, rate and margin.
pub fn evaluate_link(
    tx: &TransceiverParams,
    geometry: &LinkGeometry,
    scenario: &WeatherScenario,
    target_rate_bps: f64,
) -> Result<LinkBudgetResult> {
    let AtmosphericLoss {
        fog_db,
        rain_db,
        cloud_db,
        scintillation_db,
    } = total_atmospheric_loss(scenario, geometry, tx.wavelength_nm)?;
    let losses = LossBreakdown {
        fog_db,
        rain_db,
        cloud_db,
        scintillation_db,
        geometrical_db: geometrical_loss(geometry),
        pointing_db: tx.pointing_loss_db,
        optical_db: tx.optical_loss_db(),
    };
    let received_power_w = received_power(tx, geometry, losses.atmospheric_db());
    let data_rate_bps = rate_from_power(tx, received_power_w);
    let link_margin_db = link_margin(data_rate_bps, target_rate_bps)?;
    Ok(LinkBudgetResult {
        losses,
        received_power_w,
        data_rate_bps,
        target_rate_bps,
        link_margin_db,
        link_viable: link_margin_db >= 0.0,
    })
}
