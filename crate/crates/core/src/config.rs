//! Run configuration: a TOML document with every field optional.
//!
//! Omitted fields take the reference defaults (200 mW, 1 mrad, 45°, 4 cm
//! aperture, 1550 nm, ...). Unknown keys are rejected. `key=value`
//! overrides address fields by dotted path, with numeric segments indexing
//! arrays (`scenarios.1.preset=fog_dense`).
//!
//! ```toml
//! seed = 7
//! target_rate_bps = 3e9
//!
//! [geometry]
//! nfp_altitude_m = 20000.0
//!
//! [fog]
//! visibility_m = 770.0
//!
//! [[scenarios]]
//! preset = "cloud_and_fog"
//!
//! [[sweeps]]
//! variable = "altitude"
//! start = 1000.0
//! stop = 20000.0
//! points = 40
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::aggregation::{CellRounding, TrafficProfile};
use crate::atmosphere::{
    CloudLayer, FogDescriptor, RainDescriptor, TurbulenceDescriptor, Visibility,
};
use crate::error::ModelError;
use crate::geometry::LinkGeometry;
use crate::hetnet_cost::{
    Area, CostParameters, FiberParams, RfNlosParams, TerrestrialFsoParams, VerticalFsoParams,
};
use crate::link_budget::TransceiverParams;
use crate::scenario::{
    default_optical_efficiency, Preset, SweepScale, SweepSpec, SweepVariable, WeatherScenario,
    DEFAULT_TARGET_RATE_BPS,
};

/// Used for `output_dir` when neither the file nor the command line sets one.
pub const OUTPUT_DIR_ENV: &str = "VFSO_OUTPUT_DIR";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse configuration: {0}")]
    Parse(String),
    #[error("invalid override `{0}` (expected key=value)")]
    Override(String),
    #[error("invalid value for `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>) -> impl FnOnce(ModelError) -> ConfigError {
    let field = field.into();
    move |e| ConfigError::Invalid {
        field,
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransceiverConfig {
    pub transmit_power_w: f64,
    pub tx_efficiency: f64,
    pub rx_efficiency: f64,
    pub wavelength_nm: f64,
    pub pointing_loss_db: f64,
    pub receiver_sensitivity_photons_per_bit: f64,
}

impl Default for TransceiverConfig {
    fn default() -> Self {
        Self {
            transmit_power_w: 0.2,
            tx_efficiency: default_optical_efficiency(),
            rx_efficiency: default_optical_efficiency(),
            wavelength_nm: 1550.0,
            pointing_loss_db: 2.0,
            receiver_sensitivity_photons_per_bit: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub nfp_altitude_m: f64,
    pub elevation_deg: f64,
    pub divergence_rad: f64,
    pub receiver_radius_m: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            nfp_altitude_m: 20_000.0,
            elevation_deg: 45.0,
            divergence_rad: 1e-3,
            receiver_radius_m: 0.04,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TurbulenceConfig {
    pub wind_speed_mps: f64,
    pub structure_constant_a: f64,
    /// Altitude at which C_n² is sampled; the NFP altitude when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_altitude_m: Option<f64>,
}

impl Default for TurbulenceConfig {
    fn default() -> Self {
        Self {
            wind_speed_mps: 21.0,
            structure_constant_a: 1.7e-14,
            reference_altitude_m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FogConfig {
    pub visibility_m: f64,
    pub layer_thickness_m: f64,
}

impl Default for FogConfig {
    fn default() -> Self {
        Self {
            visibility_m: 50.0,
            layer_thickness_m: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RainConfig {
    pub rate_mm_per_h: f64,
    pub layer_thickness_m: f64,
}

impl Default for RainConfig {
    fn default() -> Self {
        Self {
            rate_mm_per_h: 50.0,
            layer_thickness_m: 1000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CloudConfig {
    pub base_altitude_m: f64,
    pub thickness_m: f64,
    pub lwc_g_per_m3: f64,
    pub droplet_density_per_cm3: f64,
}

impl Default for CloudConfig {
    fn default() -> Self {
        Self {
            base_altitude_m: 1000.0,
            thickness_m: 48.0,
            lwc_g_per_m3: 1.0,
            droplet_density_per_cm3: 250.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub preset: String,
    /// Defaults to the preset name; must be unique within a run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// Replaces `geometry.divergence_rad` for this scenario only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence_rad: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    /// `altitude` (metres) or `divergence` (radians).
    pub variable: String,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    /// `linear` or `log`.
    pub scale: String,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            variable: "altitude".into(),
            start: 1_000.0,
            stop: 20_000.0,
            points: 40,
            scale: "linear".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficConfig {
    pub busy_rate_bps: f64,
    pub peak_rate_bps: f64,
    /// `ceiling` or `floor`.
    pub rounding: String,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        Self {
            busy_rate_bps: 50e6,
            peak_rate_bps: 300e6,
            rounding: "ceiling".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfNlosConfig {
    pub modules_per_hub: u32,
    pub hub_cost: f64,
    pub hub_install: f64,
    pub module_cost: f64,
    pub module_install: f64,
    pub spectrum_mhz: f64,
    pub spectrum_price_per_mhz_capita: f64,
    pub population: f64,
    pub pole_lease_per_year: f64,
    pub power_maintenance_per_year: f64,
}

impl Default for RfNlosConfig {
    fn default() -> Self {
        let d = RfNlosParams::default();
        Self {
            modules_per_hub: d.modules_per_hub,
            hub_cost: d.hub_cost,
            hub_install: d.hub_install,
            module_cost: d.module_cost,
            module_install: d.module_install,
            spectrum_mhz: d.spectrum_mhz,
            spectrum_price_per_mhz_capita: d.spectrum_price_per_mhz_capita,
            population: d.population,
            pole_lease_per_year: d.pole_lease_per_year,
            power_maintenance_per_year: d.power_maintenance_per_year,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiberConfig {
    pub cable_per_m: f64,
    pub install_per_m: f64,
    pub opex_per_link_per_year: f64,
    pub routing_factor: f64,
}

impl Default for FiberConfig {
    fn default() -> Self {
        let d = FiberParams::default();
        Self {
            cable_per_m: d.cable_per_m,
            install_per_m: d.install_per_m,
            opex_per_link_per_year: d.opex_per_link_per_year,
            routing_factor: d.routing_factor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TerrestrialFsoConfig {
    pub equipment_per_link: f64,
    pub install_per_link: f64,
    pub opex_per_link_per_year: f64,
    pub nlos_fraction: f64,
    pub nlos_hops: u32,
}

impl Default for TerrestrialFsoConfig {
    fn default() -> Self {
        let d = TerrestrialFsoParams::default();
        Self {
            equipment_per_link: d.equipment_per_link,
            install_per_link: d.install_per_link,
            opex_per_link_per_year: d.opex_per_link_per_year,
            nlos_fraction: d.nlos_fraction,
            nlos_hops: d.nlos_hops,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerticalFsoConfig {
    pub platforms: u32,
    pub platform_cost: f64,
    pub cost_per_flight_hour: f64,
    pub flight_hours_per_year: f64,
}

impl Default for VerticalFsoConfig {
    fn default() -> Self {
        let d = VerticalFsoParams::default();
        Self {
            platforms: d.platforms,
            platform_cost: d.platform_cost,
            cost_per_flight_hour: d.cost_per_flight_hour,
            flight_hours_per_year: d.flight_hours_per_year,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostConfig {
    pub years: f64,
    pub n_macro: usize,
    pub n_small: usize,
    pub area_width_m: f64,
    pub area_height_m: f64,
    pub rf_nlos: RfNlosConfig,
    pub fiber: FiberConfig,
    pub terrestrial_fso: TerrestrialFsoConfig,
    pub vertical_fso: VerticalFsoConfig,
}

impl Default for CostConfig {
    fn default() -> Self {
        Self {
            years: 1.0,
            n_macro: 100,
            n_small: 1000,
            area_width_m: 5000.0,
            area_height_m: 5000.0,
            rf_nlos: RfNlosConfig::default(),
            fiber: FiberConfig::default(),
            terrestrial_fso: TerrestrialFsoConfig::default(),
            vertical_fso: VerticalFsoConfig::default(),
        }
    }
}

/// The document as written, with defaults filled in. Serialising it gives
/// the resolved-config echo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    pub target_rate_bps: f64,
    pub transceiver: TransceiverConfig,
    pub geometry: GeometryConfig,
    pub turbulence: TurbulenceConfig,
    /// Fog used by presets that contain fog.
    pub fog: FogConfig,
    /// Rain used by presets that contain rain.
    pub rain: RainConfig,
    /// Cloud profile used by presets that contain clouds.
    pub clouds: Vec<CloudConfig>,
    pub scenarios: Vec<ScenarioConfig>,
    pub sweeps: Vec<SweepConfig>,
    pub traffic: TrafficConfig,
    pub cost: CostConfig,
}

impl Default for ConfigFile {
    fn default() -> Self {
        Self {
            seed: 1,
            output_dir: None,
            target_rate_bps: DEFAULT_TARGET_RATE_BPS,
            transceiver: TransceiverConfig::default(),
            geometry: GeometryConfig::default(),
            turbulence: TurbulenceConfig::default(),
            fog: FogConfig::default(),
            rain: RainConfig::default(),
            clouds: vec![CloudConfig::default()],
            scenarios: vec![ScenarioConfig {
                preset: Preset::ClearSky.name().into(),
                label: None,
                divergence_rad: None,
            }],
            sweeps: vec![SweepConfig::default()],
            traffic: TrafficConfig::default(),
            cost: CostConfig::default(),
        }
    }
}

impl ConfigFile {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises to TOML")
    }
}

/// One scenario to evaluate, with its own geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub scenario: WeatherScenario,
    pub geometry: LinkGeometry,
}

/// Validated configuration ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub target_rate_bps: f64,
    pub transceiver: TransceiverParams,
    pub geometry: LinkGeometry,
    pub turbulence: TurbulenceDescriptor,
    pub scenarios: Vec<ScenarioRun>,
    pub sweeps: Vec<SweepSpec>,
    pub traffic: TrafficProfile,
    pub rounding: CellRounding,
    pub layout_counts: (usize, usize),
    pub area: Area,
    pub cost: CostParameters,
    pub years: f64,
    /// Source document with defaults filled, for the resolved-config echo.
    pub resolved: ConfigFile,
}

/// Parses a TOML document, applies `key=value` overrides, and validates.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let file: ConfigFile = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    resolve(file)
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_config(&text, overrides)
}

fn parse_override_value(raw: &str) -> toml::Value {
    let raw = raw.trim();
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_owned()))
}

fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), ConfigError> {
    let bad = || ConfigError::Override(assignment.to_owned());
    let (key, value) = assignment.split_once('=').ok_or_else(bad)?;
    let segments: Vec<&str> = key.trim().split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(bad());
    }
    // Missing intermediate containers are created as arrays when the next
    // segment is an index, tables otherwise.
    let placeholder = |i: usize| match segments.get(i + 1) {
        Some(s) if s.parse::<usize>().is_ok() => toml::Value::Array(Vec::new()),
        _ => toml::Value::Table(toml::Table::new()),
    };
    let mut slot = table
        .entry(segments[0].to_owned())
        .or_insert_with(|| placeholder(0));
    for (i, seg) in segments.iter().enumerate().skip(1) {
        slot = match slot {
            toml::Value::Table(t) => t.entry(seg.to_string()).or_insert_with(|| placeholder(i)),
            toml::Value::Array(items) => {
                let idx: usize = seg.parse().map_err(|_| bad())?;
                if idx > items.len() {
                    return Err(bad());
                }
                if idx == items.len() {
                    items.push(placeholder(i));
                }
                &mut items[idx]
            }
            _ => return Err(bad()),
        };
    }
    *slot = parse_override_value(value);
    Ok(())
}

fn resolve(file: ConfigFile) -> Result<RunConfig, ConfigError> {
    let t = &file.transceiver;
    let transceiver = TransceiverParams::new(
        t.transmit_power_w,
        t.tx_efficiency,
        t.rx_efficiency,
        t.wavelength_nm,
        t.pointing_loss_db,
        t.receiver_sensitivity_photons_per_bit,
    )
    .map_err(invalid("transceiver"))?;

    let g = &file.geometry;
    let geometry = LinkGeometry::new(
        g.nfp_altitude_m,
        g.elevation_deg.to_radians(),
        g.divergence_rad,
        g.receiver_radius_m,
    )
    .map_err(invalid("geometry"))?;

    let tb = &file.turbulence;
    let turbulence = TurbulenceDescriptor::new(tb.wind_speed_mps, tb.structure_constant_a)
        .and_then(|d| d.with_reference_altitude(tb.reference_altitude_m))
        .map_err(invalid("turbulence"))?;

    let fog = Visibility::from_meters(file.fog.visibility_m)
        .and_then(|v| FogDescriptor::new(v, file.fog.layer_thickness_m))
        .map_err(invalid("fog"))?;
    let rain = RainDescriptor::new(file.rain.rate_mm_per_h, file.rain.layer_thickness_m)
        .map_err(invalid("rain"))?;
    let clouds = file
        .clouds
        .iter()
        .enumerate()
        .map(|(i, c)| {
            CloudLayer::new(
                c.base_altitude_m,
                c.thickness_m,
                c.lwc_g_per_m3,
                c.droplet_density_per_cm3,
            )
            .map_err(invalid(format!("clouds.{i}")))
        })
        .collect::<Result<Vec<_>, _>>()?;

    if !(file.target_rate_bps.is_finite() && file.target_rate_bps > 0.0) {
        return Err(ConfigError::Invalid {
            field: "target_rate_bps".into(),
            message: format!("{} must be finite and > 0", file.target_rate_bps),
        });
    }

    let mut scenarios = Vec::with_capacity(file.scenarios.len());
    for (i, s) in file.scenarios.iter().enumerate() {
        let field = format!("scenarios.{i}");
        let which: Preset = s
            .preset
            .parse()
            .map_err(invalid(format!("{field}.preset")))?;
        let label = s.label.clone().unwrap_or_else(|| which.name().to_owned());
        let has_fog = matches!(which, Preset::FogDense | Preset::CloudAndFog);
        let has_rain = matches!(which, Preset::HeavyRain | Preset::RainAndCloud);
        let has_clouds = matches!(which, Preset::CloudAndFog | Preset::RainAndCloud);
        let scenario = WeatherScenario::new(
            label,
            has_fog.then_some(fog),
            has_rain.then_some(rain),
            if has_clouds {
                clouds.clone()
            } else {
                Vec::new()
            },
            turbulence,
        )
        .map_err(invalid(field.clone()))?;
        let geometry = match s.divergence_rad {
            Some(theta) => geometry
                .with_divergence(theta)
                .map_err(invalid(format!("{field}.divergence_rad")))?,
            None => geometry,
        };
        if scenarios
            .iter()
            .any(|r: &ScenarioRun| r.scenario.label() == scenario.label())
        {
            return Err(ConfigError::Invalid {
                field: format!("{field}.label"),
                message: format!("duplicate scenario label `{}`", scenario.label()),
            });
        }
        scenarios.push(ScenarioRun { scenario, geometry });
    }
    if scenarios.is_empty() {
        return Err(ConfigError::Invalid {
            field: "scenarios".into(),
            message: "at least one scenario is required".into(),
        });
    }

    let sweeps = file
        .sweeps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let field = format!("sweeps.{i}");
            let variable = match s.variable.as_str() {
                "altitude" => SweepVariable::Altitude,
                "divergence" => SweepVariable::Divergence,
                other => {
                    return Err(ConfigError::Invalid {
                        field: format!("{field}.variable"),
                        message: format!("unknown sweep variable `{other}`"),
                    })
                }
            };
            let scale = match s.scale.as_str() {
                "linear" => SweepScale::Linear,
                "log" => SweepScale::Log,
                other => {
                    return Err(ConfigError::Invalid {
                        field: format!("{field}.scale"),
                        message: format!("unknown sweep scale `{other}`"),
                    })
                }
            };
            SweepSpec::new(variable, s.start, s.stop, s.points, scale).map_err(invalid(field))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let traffic = TrafficProfile::new(file.traffic.busy_rate_bps, file.traffic.peak_rate_bps)
        .map_err(invalid("traffic"))?;
    let rounding = match file.traffic.rounding.as_str() {
        "ceiling" => CellRounding::Ceiling,
        "floor" => CellRounding::Floor,
        other => {
            return Err(ConfigError::Invalid {
                field: "traffic.rounding".into(),
                message: format!("expected `ceiling` or `floor`, got `{other}`"),
            })
        }
    };

    let c = &file.cost;
    let area = Area::new(c.area_width_m, c.area_height_m).map_err(invalid("cost"))?;
    if c.n_macro == 0 || c.n_small == 0 {
        return Err(ConfigError::Invalid {
            field: "cost.n_macro/n_small".into(),
            message: "cell counts must be positive".into(),
        });
    }
    if !(c.years.is_finite() && c.years >= 0.0) {
        return Err(ConfigError::Invalid {
            field: "cost.years".into(),
            message: format!("{} must be finite and >= 0", c.years),
        });
    }
    let cost = CostParameters {
        rf_nlos: RfNlosParams {
            modules_per_hub: c.rf_nlos.modules_per_hub,
            hub_cost: c.rf_nlos.hub_cost,
            hub_install: c.rf_nlos.hub_install,
            module_cost: c.rf_nlos.module_cost,
            module_install: c.rf_nlos.module_install,
            spectrum_mhz: c.rf_nlos.spectrum_mhz,
            spectrum_price_per_mhz_capita: c.rf_nlos.spectrum_price_per_mhz_capita,
            population: c.rf_nlos.population,
            pole_lease_per_year: c.rf_nlos.pole_lease_per_year,
            power_maintenance_per_year: c.rf_nlos.power_maintenance_per_year,
        },
        fiber: FiberParams {
            cable_per_m: c.fiber.cable_per_m,
            install_per_m: c.fiber.install_per_m,
            opex_per_link_per_year: c.fiber.opex_per_link_per_year,
            routing_factor: c.fiber.routing_factor,
        },
        terrestrial_fso: TerrestrialFsoParams {
            equipment_per_link: c.terrestrial_fso.equipment_per_link,
            install_per_link: c.terrestrial_fso.install_per_link,
            opex_per_link_per_year: c.terrestrial_fso.opex_per_link_per_year,
            nlos_fraction: c.terrestrial_fso.nlos_fraction,
            nlos_hops: c.terrestrial_fso.nlos_hops,
        },
        vertical_fso: VerticalFsoParams {
            platforms: c.vertical_fso.platforms,
            platform_cost: c.vertical_fso.platform_cost,
            cost_per_flight_hour: c.vertical_fso.cost_per_flight_hour,
            flight_hours_per_year: c.vertical_fso.flight_hours_per_year,
        },
    };
    cost.validate().map_err(|e| {
        let field = match &e {
            ModelError::Domain { field, .. } => field.to_string(),
            ModelError::Validation { what, .. } => what.to_string(),
        };
        ConfigError::Invalid {
            field,
            message: e.to_string(),
        }
    })?;

    let output_dir = file
        .output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("vfso-out"));

    Ok(RunConfig {
        seed: file.seed,
        output_dir,
        target_rate_bps: file.target_rate_bps,
        transceiver,
        geometry,
        turbulence,
        scenarios,
        sweeps,
        traffic,
        rounding,
        layout_counts: (c.n_macro, c.n_small),
        area,
        cost,
        years: c.years,
        resolved: file,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = parse_config("", &[]).unwrap();
        let d = crate::scenario::default_parameters();
        assert_eq!(cfg.transceiver, d.transceiver);
        assert_eq!(cfg.geometry, d.geometry);
        assert_eq!(cfg.turbulence, d.turbulence);
        assert_eq!(cfg.target_rate_bps, 3e9);
        assert_eq!(cfg.scenarios.len(), 1);
        assert_eq!(cfg.scenarios[0].scenario.label(), "clear_sky");
        assert_eq!(cfg.cost, CostParameters::default());
        assert_eq!(cfg.layout_counts, (100, 1000));
        assert_eq!(cfg.years, 1.0);
    }

    #[test]
    fn negative_divergence_names_the_field() {
        let err = parse_config("[geometry]\ndivergence_rad = -1.0\n", &[]).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("geometry") && msg.contains("divergence"),
            "{msg}"
        );
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_config("colour = 3\n", &[]).is_err());
        let err = parse_config("[geometry]\nheight = 3.0\n", &[]).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)));
        assert!(err.to_string().contains("height"));
    }

    #[test]
    fn fog_override_reaches_fog_presets() {
        let doc = "[fog]\nvisibility_m = 770.0\n[[scenarios]]\npreset = \"fog_dense\"\n";
        let cfg = parse_config(doc, &[]).unwrap();
        let fog = cfg.scenarios[0].scenario.fog().unwrap();
        assert_relative_eq!(fog.visibility().meters(), 770.0);
    }

    #[test]
    fn set_overrides() {
        let cfg = parse_config(
            "",
            &[
                "fog.visibility_m=770".into(),
                "scenarios.0.preset=cloud_and_fog".into(),
                "scenarios.1.preset=heavy_rain".into(),
                "geometry.nfp_altitude_m=5000".into(),
                "seed=99".into(),
            ],
        )
        .unwrap();
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.geometry.nfp_altitude_m(), 5000.0);
        assert_eq!(cfg.scenarios.len(), 2);
        assert_relative_eq!(
            cfg.scenarios[0]
                .scenario
                .fog()
                .unwrap()
                .visibility()
                .meters(),
            770.0
        );
        assert!(cfg.scenarios[1].scenario.rain().is_some());
        assert!(parse_config("", &["nonsense".into()]).is_err());
        assert!(parse_config("", &["scenarios.5.preset=clear_sky".into()]).is_err());
    }

    #[test]
    fn unknown_preset_rejected() {
        let err = parse_config("[[scenarios]]\npreset = \"hail\"\n", &[]).unwrap_err();
        assert!(err.to_string().contains("scenarios.0.preset"));
    }

    #[test]
    fn duplicate_labels_rejected() {
        let doc = "[[scenarios]]\npreset = \"clear_sky\"\n[[scenarios]]\npreset = \"clear_sky\"\n";
        assert!(parse_config(doc, &[]).is_err());
    }

    #[test]
    fn overlapping_cloud_profile_rejected() {
        let doc = "[[clouds]]\nbase_altitude_m = 1000.0\nthickness_m = 100.0\n\
                   [[clouds]]\nbase_altitude_m = 1050.0\nthickness_m = 100.0\n\
                   [[scenarios]]\npreset = \"cloud_and_fog\"\n";
        assert!(parse_config(doc, &[]).is_err());
    }

    #[test]
    fn resolved_echo_round_trips() {
        let doc = "seed = 5\n[[scenarios]]\npreset = \"cloud_and_fog\"\ndivergence_rad = 1e-5\nlabel = \"x\"\n";
        let first = parse_config(doc, &[]).unwrap();
        let echo = first.resolved.to_toml();
        let second = parse_config(&echo, &[]).unwrap();
        assert_eq!(first, second);
    }
}
