//! Atmospheric attenuation along a ground-to-NFP slant path.
//!
//! Every mechanism returns a positive loss in dB. Layer thicknesses and
//! altitudes are taken in metres and converted to kilometres inside the
//! visibility-based formulas; wavelengths are in nanometres.

use crate::error::{ensure_elevation, ensure_non_negative, ensure_positive, ModelError, Result};
use crate::geometry::LinkGeometry;
use crate::scenario::WeatherScenario;

/// Meteorological visibility range, in kilometres.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Visibility(f64);

impl Visibility {
    pub fn from_km(km: f64) -> Result<Self> {
        ensure_positive("visibility", km).map(Self)
    }

    pub fn from_meters(m: f64) -> Result<Self> {
        ensure_positive("visibility", m).map(|m| Self(m / 1000.0))
    }

    pub fn km(self) -> f64 {
        self.0
    }

    pub fn meters(self) -> f64 {
        self.0 * 1000.0
    }
}

/// Attenuation per unit path length, in dB/km.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SpecificAttenuation(f64);

impl SpecificAttenuation {
    pub fn db_per_km(self) -> f64 {
        self.0
    }

    /// Loss accumulated over `path_m` metres.
    pub fn over_meters(self, path_m: f64) -> f64 {
        self.0 * path_m / 1000.0
    }
}

/// A ground-anchored fog layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FogDescriptor {
    visibility: Visibility,
    layer_thickness_m: f64,
}

impl FogDescriptor {
    pub fn new(visibility: Visibility, layer_thickness_m: f64) -> Result<Self> {
        Ok(Self {
            visibility,
            layer_thickness_m: ensure_non_negative("fog.layer_thickness", layer_thickness_m)?,
        })
    }

    pub fn visibility(&self) -> Visibility {
        self.visibility
    }

    pub fn layer_thickness_m(&self) -> f64 {
        self.layer_thickness_m
    }
}

/// A ground-anchored rain layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RainDescriptor {
    rate_mm_per_h: f64,
    layer_thickness_m: f64,
}

impl RainDescriptor {
    pub fn new(rate_mm_per_h: f64, layer_thickness_m: f64) -> Result<Self> {
        Ok(Self {
            rate_mm_per_h: ensure_non_negative("rain.rate", rate_mm_per_h)?,
            layer_thickness_m: ensure_non_negative("rain.layer_thickness", layer_thickness_m)?,
        })
    }

    pub fn rate_mm_per_h(&self) -> f64 {
        self.rate_mm_per_h
    }

    pub fn layer_thickness_m(&self) -> f64 {
        self.layer_thickness_m
    }
}

/// One horizontal cloud layer, characterised by its liquid water content
/// (g/m³) and droplet number density (droplets/cm³).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloudLayer {
    base_altitude_m: f64,
    thickness_m: f64,
    lwc_g_per_m3: f64,
    droplet_density_per_cm3: f64,
}

impl CloudLayer {
    pub fn new(
        base_altitude_m: f64,
        thickness_m: f64,
        lwc_g_per_m3: f64,
        droplet_density_per_cm3: f64,
    ) -> Result<Self> {
        Ok(Self {
            base_altitude_m: ensure_non_negative("cloud.base_altitude", base_altitude_m)?,
            thickness_m: ensure_non_negative("cloud.thickness", thickness_m)?,
            lwc_g_per_m3: ensure_positive("cloud.lwc", lwc_g_per_m3)?,
            droplet_density_per_cm3: ensure_positive(
                "cloud.droplet_density",
                droplet_density_per_cm3,
            )?,
        })
    }

    pub fn base_altitude_m(&self) -> f64 {
        self.base_altitude_m
    }

    pub fn top_altitude_m(&self) -> f64 {
        self.base_altitude_m + self.thickness_m
    }

    pub fn thickness_m(&self) -> f64 {
        self.thickness_m
    }

    pub fn lwc_g_per_m3(&self) -> f64 {
        self.lwc_g_per_m3
    }

    pub fn droplet_density_per_cm3(&self) -> f64 {
        self.droplet_density_per_cm3
    }

    /// Vertical extent of this layer lying inside `[0, altitude_m]`.
    pub fn intersected_thickness_m(&self, altitude_m: f64) -> f64 {
        (self.top_altitude_m().min(altitude_m) - self.base_altitude_m).max(0.0)
    }
}

/// Hufnagel-Valley turbulence parameters.
///
/// `reference_altitude_m` selects where C_n² is sampled for the scintillation
/// loss; `None` means "at the NFP altitude".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbulenceDescriptor {
    wind_speed_mps: f64,
    structure_constant_a: f64,
    reference_altitude_m: Option<f64>,
}

impl TurbulenceDescriptor {
    pub fn new(wind_speed_mps: f64, structure_constant_a: f64) -> Result<Self> {
        Ok(Self {
            wind_speed_mps: ensure_non_negative("turbulence.wind_speed", wind_speed_mps)?,
            structure_constant_a: ensure_non_negative(
                "turbulence.structure_constant_a",
                structure_constant_a,
            )?,
            reference_altitude_m: None,
        })
    }

    /// Samples C_n² at a fixed altitude instead of at the NFP.
    pub fn with_reference_altitude(mut self, altitude_m: Option<f64>) -> Result<Self> {
        if let Some(h) = altitude_m {
            ensure_non_negative("turbulence.reference_altitude", h)?;
        }
        self.reference_altitude_m = altitude_m;
        Ok(self)
    }

    /// A descriptor that switches scintillation off entirely.
    pub fn none() -> Self {
        Self {
            wind_speed_mps: 0.0,
            structure_constant_a: 0.0,
            reference_altitude_m: None,
        }
    }

    pub fn wind_speed_mps(&self) -> f64 {
        self.wind_speed_mps
    }

    pub fn structure_constant_a(&self) -> f64 {
        self.structure_constant_a
    }

    pub fn reference_altitude_m(&self) -> Option<f64> {
        self.reference_altitude_m
    }

    pub fn is_quiescent(&self) -> bool {
        self.wind_speed_mps == 0.0 && self.structure_constant_a == 0.0
    }
}

/// Per-mechanism atmospheric losses in dB.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AtmosphericLoss {
    pub fog_db: f64,
    pub rain_db: f64,
    pub cloud_db: f64,
    pub scintillation_db: f64,
}

impl AtmosphericLoss {
    pub fn total_db(&self) -> f64 {
        self.rain_db + self.fog_db + self.cloud_db + self.scintillation_db
    }
}

/// Kruse particle-size exponent δ.
///
/// The middle branch is closed on both ends (δ = 1.3 at V = 6 km and at
/// V = 50 km). δ jumps at V = 6 km since 0.585·6^(1/3) ≈ 1.063.
pub fn kruse_size_exponent(visibility: Visibility) -> f64 {
    let v = visibility.km();
    if v < 6.0 {
        0.585 * v.cbrt()
    } else if v <= 50.0 {
        1.3
    } else {
        1.6
    }
}

/// Kruse Mie-scattering attenuation, `4.34 · (3.91/V) · (λ/550)^(−δ)` dB/km.
pub fn mie_specific_attenuation(
    visibility: Visibility,
    wavelength_nm: f64,
) -> Result<SpecificAttenuation> {
    let wavelength_nm = ensure_positive("wavelength", wavelength_nm)?;
    let delta = kruse_size_exponent(visibility);
    let beta = 3.91 / visibility.km() * (wavelength_nm / 550.0).powf(-delta);
    Ok(SpecificAttenuation(4.34 * beta))
}

fn slant_factor(elevation_rad: f64) -> Result<f64> {
    Ok(1.0 / ensure_elevation(elevation_rad)?.sin())
}

/// Fog loss over the slant crossing of a ground-anchored fog layer.
pub fn fog_attenuation(fog: &FogDescriptor, elevation_rad: f64, wavelength_nm: f64) -> Result<f64> {
    let slant_m = fog.layer_thickness_m * slant_factor(elevation_rad)?;
    Ok(mie_specific_attenuation(fog.visibility, wavelength_nm)?.over_meters(slant_m))
}

/// Rain loss `1.076 · R^0.67 · d_rain` dB, with `d_rain` the slant crossing in km.
pub fn rain_attenuation(rain: &RainDescriptor, elevation_rad: f64) -> Result<f64> {
    let slant_km = rain.layer_thickness_m * slant_factor(elevation_rad)? / 1000.0;
    Ok(1.076 * rain.rate_mm_per_h.powf(0.67) * slant_km)
}

/// In-cloud visibility `1.002 · (LWC · N_d)^(−0.6473)` km.
pub fn cloud_visibility(layer: &CloudLayer) -> Visibility {
    // lwc and droplet density are validated positive, so the result is too.
    Visibility(1.002 * (layer.lwc_g_per_m3 * layer.droplet_density_per_cm3).powf(-0.6473))
}

/// Rejects cloud profiles whose layers overlap in altitude.
pub fn validate_cloud_profile(profile: &[CloudLayer]) -> Result<()> {
    let mut sorted: Vec<&CloudLayer> = profile.iter().collect();
    sorted.sort_by(|a, b| a.base_altitude_m.total_cmp(&b.base_altitude_m));
    for pair in sorted.windows(2) {
        if pair[1].base_altitude_m < pair[0].top_altitude_m() {
            return Err(ModelError::Validation {
                what: "cloud profile",
                reason: format!(
                    "layer at {} m overlaps layer spanning {}..{} m",
                    pair[1].base_altitude_m,
                    pair[0].base_altitude_m,
                    pair[0].top_altitude_m()
                ),
            });
        }
    }
    Ok(())
}

/// Summed cloud loss for the part of each layer lying below the NFP.
pub fn cloud_attenuation(
    profile: &[CloudLayer],
    nfp_altitude_m: f64,
    elevation_rad: f64,
    wavelength_nm: f64,
) -> Result<f64> {
    validate_cloud_profile(profile)?;
    let slant = slant_factor(elevation_rad)?;
    profile.iter().try_fold(0.0, |acc, layer| {
        let crossed_m = layer.intersected_thickness_m(nfp_altitude_m);
        if crossed_m == 0.0 {
            return Ok(acc);
        }
        let specific = mie_specific_attenuation(cloud_visibility(layer), wavelength_nm)?;
        Ok(acc + specific.over_meters(crossed_m * slant))
    })
}

/// Hufnagel-Valley refractive-index structure parameter C_n²(h) in m^(−2/3).
pub fn refractive_index_structure(
    altitude_m: f64,
    turbulence: &TurbulenceDescriptor,
) -> Result<f64> {
    let h = ensure_non_negative("altitude", altitude_m)?;
    let wind = turbulence.wind_speed_mps / 27.0;
    let high_altitude = 0.00594 * wind * wind * (1e-5 * h).powi(10) * (-h / 1000.0).exp();
    let residual = 2.7e-16 * (-h / 1500.0).exp();
    let boundary = turbulence.structure_constant_a * (-h / 100.0).exp();
    Ok(high_altitude + residual + boundary)
}

/// Scintillation loss `2·sqrt(23.17 · k^(7/6) · C_n² · l^(11/6))` dB with
/// `k = 2π/λ` in m⁻¹ and `l` in metres.
pub fn scintillation_loss(wavelength_nm: f64, cn2: f64, path_length_m: f64) -> Result<f64> {
    let wavelength_nm = ensure_positive("wavelength", wavelength_nm)?;
    let cn2 = ensure_non_negative("cn2", cn2)?;
    let path_length_m = ensure_non_negative("path_length", path_length_m)?;
    let wavenumber = 2.0 * std::f64::consts::PI * 1e9 / wavelength_nm;
    let variance = 23.17 * wavenumber.powf(7.0 / 6.0) * cn2 * path_length_m.powf(11.0 / 6.0);
    Ok(2.0 * variance.sqrt())
}

/// All atmospheric losses on the slant path described by `geometry`.
pub fn total_atmospheric_loss(
    scenario: &WeatherScenario,
    geometry: &LinkGeometry,
    wavelength_nm: f64,
) -> Result<AtmosphericLoss> {
    let elevation = geometry.elevation_rad();
    let fog_db = match scenario.fog() {
        Some(fog) => fog_attenuation(fog, elevation, wavelength_nm)?,
        None => 0.0,
    };
    let rain_db = match scenario.rain() {
        Some(rain) => rain_attenuation(rain, elevation)?,
        None => 0.0,
    };
    let cloud_db = cloud_attenuation(
        scenario.clouds(),
        geometry.nfp_altitude_m(),
        elevation,
        wavelength_nm,
    )?;
    let turbulence = scenario.turbulence();
    let scintillation_db = if turbulence.is_quiescent() {
        0.0
    } else {
        let h = turbulence
            .reference_altitude_m()
            .unwrap_or(geometry.nfp_altitude_m());
        let cn2 = refractive_index_structure(h, turbulence)?;
        scintillation_loss(wavelength_nm, cn2, geometry.slant_path_m())?
    };
    Ok(AtmosphericLoss {
        fog_db,
        rain_db,
        cloud_db,
        scintillation_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_4;

    const DEG45: f64 = FRAC_PI_4;

    #[test]
    fn size_exponent_branches() {
        assert_eq!(kruse_size_exponent(Visibility::from_km(10.0).unwrap()), 1.3);
        assert_eq!(kruse_size_exponent(Visibility::from_km(60.0).unwrap()), 1.6);
        assert_relative_eq!(
            kruse_size_exponent(Visibility::from_km(0.05).unwrap()),
            0.2155,
            max_relative = 1e-3
        );
    }

    #[test]
    fn size_exponent_boundaries_take_middle_branch() {
        assert_eq!(kruse_size_exponent(Visibility::from_km(6.0).unwrap()), 1.3);
        assert_eq!(kruse_size_exponent(Visibility::from_km(50.0).unwrap()), 1.3);
        assert!(kruse_size_exponent(Visibility::from_km(5.999_999).unwrap()) < 1.07);
    }

    #[test]
    fn visibility_rejects_non_positive() {
        assert!(Visibility::from_km(0.0).is_err());
        assert!(Visibility::from_meters(-3.0).is_err());
        assert!(Visibility::from_km(f64::NAN).is_err());
    }

    #[test]
    fn mie_rejects_bad_wavelength() {
        let v = Visibility::from_km(1.0).unwrap();
        assert!(mie_specific_attenuation(v, 0.0).is_err());
    }

    #[test]
    fn fog_examples() {
        let fog = FogDescriptor::new(Visibility::from_meters(50.0).unwrap(), 50.0).unwrap();
        assert_relative_eq!(
            fog_attenuation(&fog, DEG45, 1550.0).unwrap(),
            19.2,
            max_relative = 5e-3
        );
        assert_relative_eq!(
            fog_attenuation(&fog, std::f64::consts::FRAC_PI_2, 1550.0).unwrap(),
            13.58,
            max_relative = 5e-3
        );
        let thin = FogDescriptor::new(Visibility::from_meters(50.0).unwrap(), 0.0).unwrap();
        assert_eq!(fog_attenuation(&thin, DEG45, 1550.0).unwrap(), 0.0);
        assert!(fog_attenuation(&fog, 0.0, 1550.0).is_err());
        assert!(fog_attenuation(&fog, -0.1, 1550.0).is_err());
    }

    #[test]
    fn rain_examples() {
        let rain = RainDescriptor::new(50.0, 1000.0).unwrap();
        assert_relative_eq!(
            rain_attenuation(&rain, DEG45).unwrap(),
            20.9,
            max_relative = 5e-3
        );
        assert_relative_eq!(
            rain_attenuation(&rain, std::f64::consts::FRAC_PI_2).unwrap(),
            14.8,
            max_relative = 5e-3
        );
        let dry = RainDescriptor::new(0.0, 1000.0).unwrap();
        assert_eq!(rain_attenuation(&dry, DEG45).unwrap(), 0.0);
        assert!(RainDescriptor::new(-1.0, 1000.0).is_err());
    }

    #[test]
    fn cloud_visibility_examples() {
        let layer = |nd| CloudLayer::new(1000.0, 48.0, 1.0, nd).unwrap();
        assert_relative_eq!(
            cloud_visibility(&layer(250.0)).km(),
            0.0281,
            max_relative = 5e-3
        );
        assert_relative_eq!(cloud_visibility(&layer(1.0)).km(), 1.002);
        assert_relative_eq!(
            cloud_visibility(&layer(100.0)).km(),
            0.0510,
            max_relative = 5e-3
        );
        assert!(CloudLayer::new(1000.0, 48.0, 0.0, 250.0).is_err());
        assert!(CloudLayer::new(1000.0, 48.0, 1.0, -5.0).is_err());
    }

    #[test]
    fn cloud_visibility_falls_with_water_content() {
        let thin = CloudLayer::new(0.0, 10.0, 3.128e-4, 250.0).unwrap();
        let thick = CloudLayer::new(0.0, 10.0, 1.0, 250.0).unwrap();
        assert!(cloud_visibility(&thin).km() > cloud_visibility(&thick).km());
    }

    #[test]
    fn cloud_attenuation_examples() {
        let layer = CloudLayer::new(1000.0, 48.0, 1.0, 250.0).unwrap();
        assert_eq!(
            cloud_attenuation(&[], 20_000.0, DEG45, 1550.0).unwrap(),
            0.0
        );
        let loss = cloud_attenuation(&[layer], 20_000.0, DEG45, 1550.0).unwrap();
        assert!((loss - 34.0).abs() < 0.5, "got {loss}");
        assert_eq!(
            cloud_attenuation(&[layer], 500.0, DEG45, 1550.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn cloud_attenuation_pro_rata_for_partial_layer() {
        let layer = CloudLayer::new(1000.0, 48.0, 1.0, 250.0).unwrap();
        let full = cloud_attenuation(&[layer], 20_000.0, DEG45, 1550.0).unwrap();
        let half = cloud_attenuation(&[layer], 1024.0, DEG45, 1550.0).unwrap();
        assert_relative_eq!(half, full / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn overlapping_layers_rejected() {
        let a = CloudLayer::new(1000.0, 100.0, 1.0, 250.0).unwrap();
        let b = CloudLayer::new(1050.0, 100.0, 0.5, 150.0).unwrap();
        let err = cloud_attenuation(&[b, a], 20_000.0, DEG45, 1550.0).unwrap_err();
        assert!(matches!(err, ModelError::Validation { .. }));
        let touching = CloudLayer::new(1100.0, 100.0, 0.5, 150.0).unwrap();
        assert!(validate_cloud_profile(&[a, touching]).is_ok());
    }

    #[test]
    fn hufnagel_valley_examples() {
        let turb = TurbulenceDescriptor::new(21.0, 1.7e-14).unwrap();
        assert_relative_eq!(
            refractive_index_structure(0.0, &turb).unwrap(),
            2.7e-16 + 1.7e-14,
            max_relative = 1e-12
        );
        let at_20km = refractive_index_structure(20_000.0, &turb).unwrap();
        assert_relative_eq!(at_20km, 7.6e-19, max_relative = 0.01);
        let at_5km = refractive_index_structure(5_000.0, &turb).unwrap();
        assert_relative_eq!(at_5km, 1.2e-17, max_relative = 0.03);
        assert!(refractive_index_structure(-1.0, &turb).is_err());
    }

    #[test]
    fn scintillation_examples() {
        let turb = TurbulenceDescriptor::new(21.0, 1.7e-14).unwrap();
        let cn2 = refractive_index_structure(20_000.0, &turb).unwrap();
        let loss = scintillation_loss(1550.0, cn2, 28_284.27).unwrap();
        assert!((loss - 0.7).abs() < 0.05, "got {loss}");
        assert_eq!(scintillation_loss(1550.0, 0.0, 28_284.27).unwrap(), 0.0);
        let cn2 = refractive_index_structure(5_000.0, &turb).unwrap();
        let loss = scintillation_loss(1550.0, cn2, 7_071.07).unwrap();
        assert!((loss - 0.8).abs() < 0.05, "got {loss}");
    }
}
