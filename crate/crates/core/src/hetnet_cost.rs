//! HetNet layouts and total cost of ownership for four backhaul technologies.
//!
//! Costs are in USD. `tco(years) = capex + years · opex_per_year`; every total
//! is the sum of its itemised lines.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure_non_negative, ensure_positive, ModelError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Area {
    width_m: f64,
    height_m: f64,
}

impl Area {
    pub fn new(width_m: f64, height_m: f64) -> Result<Self> {
        Ok(Self {
            width_m: ensure_positive("area.width", width_m)?,
            height_m: ensure_positive("area.height", height_m)?,
        })
    }

    pub fn width_m(&self) -> f64 {
        self.width_m
    }

    pub fn height_m(&self) -> f64 {
        self.height_m
    }

    pub fn area_m2(&self) -> f64 {
        self.width_m * self.height_m
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width_m).contains(&p.x) && (0.0..=self.height_m).contains(&p.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Macro and small-cell positions over a rectangular area.
#[derive(Debug, Clone, PartialEq)]
pub struct HetNetLayout {
    pub area: Area,
    pub macro_positions: Vec<Point>,
    pub small_positions: Vec<Point>,
    pub seed: u64,
}

impl HetNetLayout {
    /// Distance from each small cell to its nearest macro cell.
    pub fn nearest_macro_distances(&self) -> Vec<f64> {
        self.small_positions
            .iter()
            .map(|s| {
                self.macro_positions
                    .iter()
                    .map(|m| s.distance(m))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }
}

/// Independent uniform placement of a fixed number of macro and small cells
/// (a Poisson process conditioned on its count). Same seed, same layout.
pub fn generate_layout(
    n_macro: usize,
    n_small: usize,
    area: Area,
    seed: u64,
) -> Result<HetNetLayout> {
    if n_macro == 0 || n_small == 0 {
        return Err(ModelError::Validation {
            what: "layout",
            reason: format!("cell counts must be positive (macro {n_macro}, small {n_small})"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = |n: usize| -> Vec<Point> {
        (0..n)
            .map(|_| Point {
                x: rng.random::<f64>() * area.width_m,
                y: rng.random::<f64>() * area.height_m,
            })
            .collect()
    };
    let macro_positions = sample(n_macro);
    let small_positions = sample(n_small);
    Ok(HetNetLayout {
        area,
        macro_positions,
        small_positions,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Technology {
    RfNlosPtm,
    Fiber,
    TerrestrialFso,
    VerticalFso,
}

impl Technology {
    pub const ALL: [Technology; 4] = [
        Technology::RfNlosPtm,
        Technology::Fiber,
        Technology::TerrestrialFso,
        Technology::VerticalFso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Technology::RfNlosPtm => "rf_nlos_ptm",
            Technology::Fiber => "fiber",
            Technology::TerrestrialFso => "terrestrial_fso",
            Technology::VerticalFso => "vertical_fso",
        }
    }
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Technology {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        Technology::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| ModelError::Validation {
                what: "technology",
                reason: format!("unknown technology `{s}`"),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostKind {
    Capex,
    Opex,
}

impl CostKind {
    pub fn name(self) -> &'static str {
        match self {
            CostKind::Capex => "capex",
            CostKind::Opex => "opex",
        }
    }
}

/// One itemised cost. For OPEX lines `unit_cost` and `total` are per year.
#[derive(Debug, Clone, PartialEq)]
pub struct LineItem {
    pub label: &'static str,
    pub kind: CostKind,
    pub unit_cost: f64,
    pub quantity: f64,
    pub total: f64,
}

impl LineItem {
    fn new(label: &'static str, kind: CostKind, unit_cost: f64, quantity: f64) -> Self {
        Self {
            label,
            kind,
            unit_cost,
            quantity,
            total: unit_cost * quantity,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcoResult {
    pub technology: Technology,
    pub line_items: Vec<LineItem>,
    pub capex: f64,
    pub opex_per_year: f64,
}

impl TcoResult {
    fn from_items(technology: Technology, line_items: Vec<LineItem>) -> Self {
        let sum = |kind| {
            line_items
                .iter()
                .filter(|i| i.kind == kind)
                .map(|i| i.total)
                .sum()
        };
        let capex = sum(CostKind::Capex);
        let opex_per_year = sum(CostKind::Opex);
        Self {
            technology,
            line_items,
            capex,
            opex_per_year,
        }
    }

    pub fn tco(&self, years: f64) -> f64 {
        self.capex + years * self.opex_per_year
    }
}

/// Non-line-of-sight point-to-multipoint radio: hubs at macros serving
/// `modules_per_hub` remote modules each.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RfNlosParams {
    pub modules_per_hub: u32,
    pub hub_cost: f64,
    pub hub_install: f64,
    pub module_cost: f64,
    pub module_install: f64,
    pub spectrum_mhz: f64,
    pub spectrum_price_per_mhz_capita: f64,
    pub population: f64,
    /// Per site and year; applied to hubs and modules alike.
    pub pole_lease_per_year: f64,
    pub power_maintenance_per_year: f64,
}

impl Default for RfNlosParams {
    fn default() -> Self {
        Self {
            modules_per_hub: 4,
            hub_cost: 4000.0,
            hub_install: 270.0,
            module_cost: 2000.0,
            module_install: 140.0,
            spectrum_mhz: 40.0,
            spectrum_price_per_mhz_capita: 0.007,
            population: 250_000.0,
            pole_lease_per_year: 1250.0,
            power_maintenance_per_year: 375.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberParams {
    pub cable_per_m: f64,
    pub install_per_m: f64,
    pub opex_per_link_per_year: f64,
    /// Multiplier from straight-line to trench distance.
    pub routing_factor: f64,
}

impl Default for FiberParams {
    fn default() -> Self {
        Self {
            cable_per_m: 10.0,
            install_per_m: 200.0,
            opex_per_link_per_year: 200.0,
            routing_factor: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerrestrialFsoParams {
    pub equipment_per_link: f64,
    pub install_per_link: f64,
    pub opex_per_link_per_year: f64,
    pub nlos_fraction: f64,
    /// Links needed to reach a cell without line of sight to its hub.
    pub nlos_hops: u32,
}

impl Default for TerrestrialFsoParams {
    fn default() -> Self {
        Self {
            equipment_per_link: 15_000.0,
            install_per_link: 5_000.0,
            opex_per_link_per_year: 8_000.0,
            nlos_fraction: 0.5,
            nlos_hops: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalFsoParams {
    pub platforms: u32,
    pub platform_cost: f64,
    pub cost_per_flight_hour: f64,
    /// Per platform.
    pub flight_hours_per_year: f64,
}

impl Default for VerticalFsoParams {
    fn default() -> Self {
        Self {
            platforms: 20,
            platform_cost: 50_000.0,
            cost_per_flight_hour: 859.0,
            flight_hours_per_year: 6_925.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostParameters {
    pub rf_nlos: RfNlosParams,
    pub fiber: FiberParams,
    pub terrestrial_fso: TerrestrialFsoParams,
    pub vertical_fso: VerticalFsoParams,
}

impl CostParameters {
    pub fn validate(&self) -> Result<()> {
        let rf = &self.rf_nlos;
        if rf.modules_per_hub == 0 {
            return Err(ModelError::Validation {
                what: "cost.rf_nlos",
                reason: "modules_per_hub must be positive".into(),
            });
        }
        for (field, v) in [
            ("cost.rf_nlos.hub_cost", rf.hub_cost),
            ("cost.rf_nlos.hub_install", rf.hub_install),
            ("cost.rf_nlos.module_cost", rf.module_cost),
            ("cost.rf_nlos.module_install", rf.module_install),
            ("cost.rf_nlos.spectrum_mhz", rf.spectrum_mhz),
            (
                "cost.rf_nlos.spectrum_price_per_mhz_capita",
                rf.spectrum_price_per_mhz_capita,
            ),
            ("cost.rf_nlos.population", rf.population),
            ("cost.rf_nlos.pole_lease_per_year", rf.pole_lease_per_year),
            (
                "cost.rf_nlos.power_maintenance_per_year",
                rf.power_maintenance_per_year,
            ),
            ("cost.fiber.cable_per_m", self.fiber.cable_per_m),
            ("cost.fiber.install_per_m", self.fiber.install_per_m),
            (
                "cost.fiber.opex_per_link_per_year",
                self.fiber.opex_per_link_per_year,
            ),
            ("cost.fiber.routing_factor", self.fiber.routing_factor),
            (
                "cost.terrestrial_fso.equipment_per_link",
                self.terrestrial_fso.equipment_per_link,
            ),
            (
                "cost.terrestrial_fso.install_per_link",
                self.terrestrial_fso.install_per_link,
            ),
            (
                "cost.terrestrial_fso.opex_per_link_per_year",
                self.terrestrial_fso.opex_per_link_per_year,
            ),
            (
                "cost.vertical_fso.platform_cost",
                self.vertical_fso.platform_cost,
            ),
            (
                "cost.vertical_fso.cost_per_flight_hour",
                self.vertical_fso.cost_per_flight_hour,
            ),
            (
                "cost.vertical_fso.flight_hours_per_year",
                self.vertical_fso.flight_hours_per_year,
            ),
        ] {
            ensure_non_negative(field, v)?;
        }
        let f = self.terrestrial_fso.nlos_fraction;
        if !(0.0..=1.0).contains(&f) {
            return Err(ModelError::Domain {
                field: "cost.terrestrial_fso.nlos_fraction",
                value: f,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(())
    }
}

pub fn cost_rf_nlos(layout: &HetNetLayout, params: &RfNlosParams) -> TcoResult {
    let modules = layout.small_positions.len() as f64;
    let hubs = layout
        .small_positions
        .len()
        .div_ceil(params.modules_per_hub as usize) as f64;
    let sites = hubs + modules;
    use CostKind::*;
    TcoResult::from_items(
        Technology::RfNlosPtm,
        vec![
            LineItem::new("hub equipment", Capex, params.hub_cost, hubs),
            LineItem::new("hub installation", Capex, params.hub_install, hubs),
            LineItem::new(
                "remote module equipment",
                Capex,
                params.module_cost,
                modules,
            ),
            LineItem::new(
                "remote module installation",
                Capex,
                params.module_install,
                modules,
            ),
            LineItem::new(
                "licensed spectrum (MHz x capita)",
                Capex,
                params.spectrum_price_per_mhz_capita,
                params.spectrum_mhz * params.population,
            ),
            LineItem::new("pole lease", Opex, params.pole_lease_per_year, sites),
            LineItem::new(
                "power and maintenance",
                Opex,
                params.power_maintenance_per_year,
                sites,
            ),
        ],
    )
}

/// Each small cell is trenched to its nearest macro hub.
pub fn cost_fiber(layout: &HetNetLayout, params: &FiberParams) -> TcoResult {
    let trench_m: f64 =
        layout.nearest_macro_distances().iter().sum::<f64>() * params.routing_factor;
    let links = layout.small_positions.len() as f64;
    use CostKind::*;
    TcoResult::from_items(
        Technology::Fiber,
        vec![
            LineItem::new("fiber cable (m)", Capex, params.cable_per_m, trench_m),
            LineItem::new(
                "trenching and installation (m)",
                Capex,
                params.install_per_m,
                trench_m,
            ),
            LineItem::new(
                "power and maintenance",
                Opex,
                params.opex_per_link_per_year,
                links,
            ),
        ],
    )
}

/// Indices of the small cells without line of sight to their hub: a seeded
/// uniform subset of `round(fraction · n)` cells, in ascending order.
pub fn select_nlos_cells(n_cells: usize, fraction: f64, seed: u64) -> Vec<usize> {
    let count = (fraction * n_cells as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6e6c_6f73_6365_6c6c);
    let mut indices: Vec<usize> = (0..n_cells).collect();
    indices.shuffle(&mut rng);
    let mut chosen = indices[..count.min(n_cells)].to_vec();
    chosen.sort_unstable();
    chosen
}

pub fn cost_terrestrial_fso(layout: &HetNetLayout, params: &TerrestrialFsoParams) -> TcoResult {
    let cells = layout.small_positions.len();
    let nlos = select_nlos_cells(cells, params.nlos_fraction, layout.seed).len();
    let links = ((cells - nlos) + nlos * params.nlos_hops as usize) as f64;
    use CostKind::*;
    TcoResult::from_items(
        Technology::TerrestrialFso,
        vec![
            LineItem::new(
                "FSO link equipment",
                Capex,
                params.equipment_per_link,
                links,
            ),
            LineItem::new(
                "planning and installation",
                Capex,
                params.install_per_link,
                links,
            ),
            LineItem::new(
                "power and maintenance",
                Opex,
                params.opex_per_link_per_year,
                links,
            ),
        ],
    )
}

pub fn cost_vertical_fso(params: &VerticalFsoParams) -> TcoResult {
    let platforms = params.platforms as f64;
    use CostKind::*;
    TcoResult::from_items(
        Technology::VerticalFso,
        vec![
            LineItem::new("flying platform", Capex, params.platform_cost, platforms),
            LineItem::new(
                "platform operation (flight hours)",
                Opex,
                params.cost_per_flight_hour,
                platforms * params.flight_hours_per_year,
            ),
        ],
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct TcoComparison {
    pub years: f64,
    /// In [`Technology::ALL`] order.
    pub results: Vec<TcoResult>,
    /// Cheapest first.
    pub ranking: Vec<Technology>,
}

impl TcoComparison {
    pub fn get(&self, technology: Technology) -> &TcoResult {
        self.results
            .iter()
            .find(|r| r.technology == technology)
            .expect("every technology is costed")
    }
}

pub fn compare_tco(
    layout: &HetNetLayout,
    params: &CostParameters,
    years: f64,
) -> Result<TcoComparison> {
    params.validate()?;
    let years = ensure_non_negative("years", years)?;
    let results = vec![
        cost_rf_nlos(layout, &params.rf_nlos),
        cost_fiber(layout, &params.fiber),
        cost_terrestrial_fso(layout, &params.terrestrial_fso),
        cost_vertical_fso(&params.vertical_fso),
    ];
    let mut ranked: Vec<&TcoResult> = results.iter().collect();
    // stable sort keeps Technology::ALL order on ties
    ranked.sort_by(|a, b| a.tco(years).total_cmp(&b.tco(years)));
    let ranking = ranked.iter().map(|r| r.technology).collect();
    Ok(TcoComparison {
        years,
        results,
        ranking,
    })
}
