//! Weather scenarios, default link parameters and parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::atmosphere::{
    validate_cloud_profile, CloudLayer, FogDescriptor, RainDescriptor, TurbulenceDescriptor,
    Visibility,
};
use crate::error::{ModelError, Result};
use crate::geometry::LinkGeometry;
use crate::link_budget::{evaluate_link, LinkBudgetResult, TransceiverParams};

/// Default required rate for link-margin reporting, bit/s.
pub const DEFAULT_TARGET_RATE_BPS: f64 = 3e9;

/// Atmospheric state along the link.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherScenario {
    label: String,
    fog: Option<FogDescriptor>,
    rain: Option<RainDescriptor>,
    clouds: Vec<CloudLayer>,
    turbulence: TurbulenceDescriptor,
}

impl WeatherScenario {
    pub fn new(
        label: impl Into<String>,
        fog: Option<FogDescriptor>,
        rain: Option<RainDescriptor>,
        clouds: Vec<CloudLayer>,
        turbulence: TurbulenceDescriptor,
    ) -> Result<Self> {
        let label = label.into();
        if label.trim().is_empty() {
            return Err(ModelError::Validation {
                what: "scenario",
                reason: "label must not be empty".into(),
            });
        }
        validate_cloud_profile(&clouds)?;
        Ok(Self {
            label,
            fog,
            rain,
            clouds,
            turbulence,
        })
    }

    /// Turbulence only, no hydrometeors.
    ///
    /// # Panics
    /// If `label` is blank.
    pub fn clear(label: &str, turbulence: TurbulenceDescriptor) -> Self {
        Self::new(label, None, None, Vec::new(), turbulence).expect("non-empty label")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn fog(&self) -> Option<&FogDescriptor> {
        self.fog.as_ref()
    }

    pub fn rain(&self) -> Option<&RainDescriptor> {
        self.rain.as_ref()
    }

    pub fn clouds(&self) -> &[CloudLayer] {
        &self.clouds
    }

    pub fn turbulence(&self) -> &TurbulenceDescriptor {
        &self.turbulence
    }
}

/// Baseline parameter set used when nothing is overridden.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefaultParameters {
    pub transceiver: TransceiverParams,
    pub geometry: LinkGeometry,
    pub turbulence: TurbulenceDescriptor,
    /// NFP altitude sweep bounds in metres.
    pub altitude_range_m: (f64, f64),
}

/// Per-element efficiency giving 2 dB of combined optical loss.
pub fn default_optical_efficiency() -> f64 {
    10f64.powf(-0.1)
}

pub fn default_parameters() -> DefaultParameters {
    let eta = default_optical_efficiency();
    DefaultParameters {
        transceiver: TransceiverParams::new(0.2, eta, eta, 1550.0, 2.0, 100.0)
            .expect("valid default transceiver"),
        geometry: LinkGeometry::new(20_000.0, 45f64.to_radians(), 1e-3, 0.04)
            .expect("valid default geometry"),
        turbulence: TurbulenceDescriptor::new(21.0, 1.7e-14).expect("valid default turbulence"),
        altitude_range_m: (1_000.0, 20_000.0),
    }
}

pub fn dense_fog() -> FogDescriptor {
    FogDescriptor::new(Visibility::from_meters(50.0).expect("positive"), 50.0).expect("valid fog")
}

pub fn heavy_rain() -> RainDescriptor {
    RainDescriptor::new(50.0, 1000.0).expect("valid rain")
}

/// Single Cumulus layer: base 1000 m, 48 m thick, LWC 1 g/m³, 250 droplets/cm³.
pub fn default_cloud_profile() -> Vec<CloudLayer> {
    vec![CloudLayer::new(1000.0, 48.0, 1.0, 250.0).expect("valid cloud layer")]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    ClearSky,
    FogDense,
    HeavyRain,
    CloudAndFog,
    RainAndCloud,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::ClearSky,
        Preset::FogDense,
        Preset::HeavyRain,
        Preset::CloudAndFog,
        Preset::RainAndCloud,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::ClearSky => "clear_sky",
            Preset::FogDense => "fog_dense",
            Preset::HeavyRain => "heavy_rain",
            Preset::CloudAndFog => "cloud_and_fog",
            Preset::RainAndCloud => "rain_and_cloud",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| ModelError::Validation {
                what: "preset",
                reason: format!(
                    "unknown preset `{s}` (expected one of {})",
                    Preset::ALL.map(Preset::name).join(", ")
                ),
            })
    }
}

pub fn preset(which: Preset, turbulence: &TurbulenceDescriptor) -> WeatherScenario {
    let (fog, rain, clouds) = match which {
        Preset::ClearSky => (None, None, Vec::new()),
        Preset::FogDense => (Some(dense_fog()), None, Vec::new()),
        Preset::HeavyRain => (None, Some(heavy_rain()), Vec::new()),
        Preset::CloudAndFog => (Some(dense_fog()), None, default_cloud_profile()),
        Preset::RainAndCloud => (None, Some(heavy_rain()), default_cloud_profile()),
    };
    WeatherScenario::new(which.name(), fog, rain, clouds, *turbulence).expect("valid preset")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// NFP altitude in metres.
    Altitude,
    /// Full divergence angle in radians.
    Divergence,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Altitude => "altitude",
            SweepVariable::Divergence => "divergence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SweepScale {
    #[default]
    Linear,
    Log,
}

/// An inclusive one-dimensional grid over a link parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    variable: SweepVariable,
    start: f64,
    stop: f64,
    points: usize,
    scale: SweepScale,
}

impl SweepSpec {
    pub fn new(
        variable: SweepVariable,
        start: f64,
        stop: f64,
        points: usize,
        scale: SweepScale,
    ) -> Result<Self> {
        let invalid = |reason: String| ModelError::Validation {
            what: "sweep",
            reason,
        };
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(invalid(format!("need start < stop, got {start}..{stop}")));
        }
        if points < 2 {
            return Err(invalid(format!("need at least 2 points, got {points}")));
        }
        if scale == SweepScale::Log && start <= 0.0 {
            return Err(invalid(format!("log scale needs start > 0, got {start}")));
        }
        Ok(Self {
            variable,
            start,
            stop,
            points,
            scale,
        })
    }

    pub fn variable(&self) -> SweepVariable {
        self.variable
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Grid values in ascending order; both endpoints are hit exactly.
    pub fn grid(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == self.points - 1 {
                    return self.stop;
                }
                let t = i as f64 / last;
                match self.scale {
                    SweepScale::Linear => self.start + (self.stop - self.start) * t,
                    SweepScale::Log => {
                        (self.start.ln() + (self.stop.ln() - self.start.ln()) * t).exp()
                    }
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: std::result::Result<LinkBudgetResult, ModelError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub scenario_label: String,
    pub rows: Vec<SweepRow>,
}

/// Evaluates the link at every grid point with everything else held fixed.
///
/// A failing grid point is recorded in its row; the sweep continues.
pub fn run_sweep(
    spec: &SweepSpec,
    scenario: &WeatherScenario,
    tx: &TransceiverParams,
    geometry: &LinkGeometry,
    target_rate_bps: f64,
) -> SweepResult {
    let rows = spec
        .grid()
        .into_par_iter()
        .map(|value| {
            let point = match spec.variable {
                SweepVariable::Altitude => geometry.with_altitude(value),
                SweepVariable::Divergence => geometry.with_divergence(value),
            };
            let outcome = point.and_then(|g| evaluate_link(tx, &g, scenario, target_rate_bps));
            SweepRow { value, outcome }
        })
        .collect();
    SweepResult {
        variable: spec.variable,
        scenario_label: scenario.label.clone(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn defaults_match_reference_table() {
        let d = default_parameters();
        assert_eq!(d.transceiver.transmit_power_w(), 0.2);
        assert_eq!(d.geometry.receiver_radius_m(), 0.04);
        assert_eq!(d.turbulence.wind_speed_mps(), 21.0);
        assert_eq!(d.turbulence.structure_constant_a(), 1.7e-14);
        assert_eq!(d.transceiver.receiver_sensitivity(), 100.0);
        assert_eq!(d.transceiver.wavelength_nm(), 1550.0);
        assert_eq!(d.transceiver.pointing_loss_db(), 2.0);
        assert_relative_eq!(d.transceiver.optical_loss_db(), 2.0, max_relative = 1e-12);
        assert_eq!(d.geometry.divergence_rad(), 1e-3);
        assert_relative_eq!(d.geometry.elevation_rad(), std::f64::consts::FRAC_PI_4);
        assert_eq!(d.altitude_range_m, (1000.0, 20_000.0));
    }

    #[test]
    fn preset_contents() {
        let turb = default_parameters().turbulence;
        let fog = preset(Preset::FogDense, &turb);
        assert_relative_eq!(fog.fog().unwrap().visibility().meters(), 50.0);
        assert_eq!(fog.fog().unwrap().layer_thickness_m(), 50.0);
        let rain = preset(Preset::HeavyRain, &turb);
        assert_eq!(rain.rain().unwrap().layer_thickness_m(), 1000.0);
        assert_eq!(rain.rain().unwrap().rate_mm_per_h(), 50.0);
        let clear = preset(Preset::ClearSky, &turb);
        assert!(clear.fog().is_none() && clear.rain().is_none() && clear.clouds().is_empty());
        let cf = preset(Preset::CloudAndFog, &turb);
        assert!(cf.fog().is_some() && cf.clouds().len() == 1);
        let rc = preset(Preset::RainAndCloud, &turb);
        assert!(rc.rain().is_some() && rc.clouds().len() == 1);
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("drizzle".parse::<Preset>().is_err());
    }

    #[test]
    fn blank_label_rejected() {
        let turb = default_parameters().turbulence;
        assert!(WeatherScenario::new(" ", None, None, vec![], turb).is_err());
    }

    #[test]
    fn two_point_grid_hits_endpoints() {
        let spec = SweepSpec::new(
            SweepVariable::Altitude,
            1000.0,
            2000.0,
            2,
            SweepScale::Linear,
        )
        .unwrap();
        assert_eq!(spec.grid(), vec![1000.0, 2000.0]);
    }

    #[test]
    fn log_grid_is_geometric() {
        let spec =
            SweepSpec::new(SweepVariable::Divergence, 1e-6, 1e-3, 4, SweepScale::Log).unwrap();
        let g = spec.grid();
        assert_eq!(g[0], 1e-6);
        assert_eq!(g[3], 1e-3);
        assert_relative_eq!(g[1], 1e-5, max_relative = 1e-12);
        assert_relative_eq!(g[2], 1e-4, max_relative = 1e-12);
    }

    #[test]
    fn sweep_spec_validation() {
        use SweepVariable::Altitude;
        assert!(SweepSpec::new(Altitude, 2.0, 1.0, 5, SweepScale::Linear).is_err());
        assert!(SweepSpec::new(Altitude, 1.0, 2.0, 1, SweepScale::Linear).is_err());
        assert!(SweepSpec::new(Altitude, 0.0, 2.0, 5, SweepScale::Log).is_err());
    }

    #[test]
    fn sweep_rows_keep_grid_order_and_mark_errors() {
        let d = default_parameters();
        let clear = preset(Preset::ClearSky, &d.turbulence);
        let spec = SweepSpec::new(
            SweepVariable::Altitude,
            -1000.0,
            20_000.0,
            22,
            SweepScale::Linear,
        )
        .unwrap();
        let result = run_sweep(&spec, &clear, &d.transceiver, &d.geometry, 3e9);
        assert_eq!(result.rows.len(), 22);
        assert!(result.rows[0].outcome.is_err());
        assert!(result.rows[1].outcome.is_err()); // altitude 0
        assert!(result.rows[2..].iter().all(|r| r.outcome.is_ok()));
        assert!(result.rows.windows(2).all(|w| w[0].value < w[1].value));
    }

    #[test]
    fn altitude_sweep_rate_decreases() {
        let d = default_parameters();
        let clear = preset(Preset::ClearSky, &d.turbulence);
        let spec = SweepSpec::new(
            SweepVariable::Altitude,
            1000.0,
            20_000.0,
            40,
            SweepScale::Linear,
        )
        .unwrap();
        let result = run_sweep(&spec, &clear, &d.transceiver, &d.geometry, 3e9);
        let rates: Vec<f64> = result
            .rows
            .iter()
            .map(|r| r.outcome.as_ref().unwrap().data_rate_bps)
            .collect();
        assert!(rates.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn divergence_points_improve_as_beam_narrows() {
        let d = default_parameters();
        let cf = preset(Preset::CloudAndFog, &d.turbulence);
        let rates: Vec<f64> = [1e-3, 1e-5, 1e-6]
            .iter()
            .map(|&theta| {
                let g = d.geometry.with_divergence(theta).unwrap();
                evaluate_link(&d.transceiver, &g, &cf, 3e9)
                    .unwrap()
                    .data_rate_bps
            })
            .collect();
        assert!(rates[0] < rates[1] && rates[1] < rates[2]);
    }

    #[test]
    fn clear_sky_dominates_weathered_presets() {
        let d = default_parameters();
        let clear = preset(Preset::ClearSky, &d.turbulence);
        for h in [1000.0, 5000.0, 12_000.0, 20_000.0] {
            let g = d.geometry.with_altitude(h).unwrap();
            let base = evaluate_link(&d.transceiver, &g, &clear, 3e9)
                .unwrap()
                .data_rate_bps;
            for p in Preset::ALL {
                let r = evaluate_link(&d.transceiver, &g, &preset(p, &d.turbulence), 3e9)
                    .unwrap()
                    .data_rate_bps;
                assert!(r <= base, "{p} at {h} m");
            }
        }
    }
}
