//! Flat-earth slant geometry and beam-spread loss.

use crate::error::{ensure_elevation, ensure_positive, Result};

/// Ground-terminal to NFP link geometry.
///
/// `divergence_rad` is the full opening angle of the beam, so the footprint
/// diameter at range `l` is `θ·l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    nfp_altitude_m: f64,
    elevation_rad: f64,
    divergence_rad: f64,
    receiver_radius_m: f64,
}

impl LinkGeometry {
    pub fn new(
        nfp_altitude_m: f64,
        elevation_rad: f64,
        divergence_rad: f64,
        receiver_radius_m: f64,
    ) -> Result<Self> {
        Ok(Self {
            nfp_altitude_m: ensure_positive("geometry.nfp_altitude", nfp_altitude_m)?,
            elevation_rad: ensure_elevation(elevation_rad)?,
            divergence_rad: ensure_positive("geometry.divergence", divergence_rad)?,
            receiver_radius_m: ensure_positive("geometry.receiver_radius", receiver_radius_m)?,
        })
    }

    pub fn nfp_altitude_m(&self) -> f64 {
        self.nfp_altitude_m
    }

    pub fn elevation_rad(&self) -> f64 {
        self.elevation_rad
    }

    pub fn divergence_rad(&self) -> f64 {
        self.divergence_rad
    }

    pub fn receiver_radius_m(&self) -> f64 {
        self.receiver_radius_m
    }

    pub fn with_altitude(self, nfp_altitude_m: f64) -> Result<Self> {
        Self::new(
            nfp_altitude_m,
            self.elevation_rad,
            self.divergence_rad,
            self.receiver_radius_m,
        )
    }

    pub fn with_divergence(self, divergence_rad: f64) -> Result<Self> {
        Self::new(
            self.nfp_altitude_m,
            self.elevation_rad,
            divergence_rad,
            self.receiver_radius_m,
        )
    }

    /// Slant path length `h / sin φ` in metres.
    pub fn slant_path_m(&self) -> f64 {
        slant_path(self)
    }
}

pub fn slant_path(geometry: &LinkGeometry) -> f64 {
    if geometry.elevation_rad == std::f64::consts::FRAC_PI_2 {
        return geometry.nfp_altitude_m;
    }
    geometry.nfp_altitude_m / geometry.elevation_rad.sin()
}

/// Beam footprint radius `θ·l/2`.
pub fn beam_radius(divergence_rad: f64, path_length_m: f64) -> Result<f64> {
    let theta = ensure_positive("divergence", divergence_rad)?;
    let l = ensure_positive("path_length", path_length_m)?;
    Ok(theta * l / 2.0)
}

/// Fraction of transmitted power intercepted by the aperture, `min(1, (r/r_B)²)`.
///
/// Capped at 1: when the footprint is smaller than the aperture the receiver
/// collects the whole beam.
pub fn geometrical_capture_fraction(geometry: &LinkGeometry) -> f64 {
    let beam = geometry.divergence_rad * geometry.slant_path_m() / 2.0;
    let ratio = geometry.receiver_radius_m / beam;
    (ratio * ratio).min(1.0)
}

/// Beam-spread loss in dB, `−10·log₁₀(capture fraction)`; never negative.
pub fn geometrical_loss(geometry: &LinkGeometry) -> f64 {
    let fraction = geometrical_capture_fraction(geometry);
    if fraction >= 1.0 {
        0.0
    } else {
        -10.0 * fraction.log10()
    }
}
