//! CSV tables and text summaries for the `vfso` subcommands.
//!
//! Every command produces a [`ReportBundle`] in memory; writing it out is a
//! separate, serial step. Numbers are printed with Rust's shortest
//! round-trip formatting, so the CSVs carry full double precision and the
//! same inputs always give byte-identical files.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use crate::aggregation::{aggregated_demand, supported_cells_with, CellRounding};
use crate::config::RunConfig;
use crate::error::Result;
use crate::hetnet_cost::{compare_tco, generate_layout, HetNetLayout, TcoComparison};
use crate::link_budget::{evaluate_link, LinkBudgetResult};
use crate::scenario::{run_sweep, SweepResult};

pub const SWEEP_COLUMNS: [&str; 9] = [
    "variable",
    "data_rate_bps",
    "link_margin_db",
    "l_fog_db",
    "l_rain_db",
    "l_cloud_db",
    "l_sci_db",
    "l_geo_db",
    "error",
];

pub const COST_ITEM_COLUMNS: [&str; 6] = [
    "technology",
    "item",
    "kind",
    "unit_cost",
    "quantity",
    "total",
];

pub const COST_SUMMARY_COLUMNS: [&str; 6] = [
    "rank",
    "technology",
    "capex",
    "opex_per_year",
    "years",
    "tco",
];

pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.toml";
pub const SUMMARY_FILE: &str = "summary.txt";

fn num(v: f64) -> String {
    v.to_string()
}

fn to_csv<R>(header: &[&str], rows: R) -> String
where
    R: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

/// Keeps file names portable: anything outside `[A-Za-z0-9_-]` becomes `_`.
fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let rows = result.rows.iter().map(|row| match &row.outcome {
        Ok(r) => vec![
            num(row.value),
            num(r.data_rate_bps),
            num(r.link_margin_db),
            num(r.losses.fog_db),
            num(r.losses.rain_db),
            num(r.losses.cloud_db),
            num(r.losses.scintillation_db),
            num(r.losses.geometrical_db),
            String::new(),
        ],
        Err(e) => {
            let mut cells = vec![num(row.value)];
            cells.extend(std::iter::repeat_n(String::new(), 7));
            cells.push(e.to_string());
            cells
        }
    });
    to_csv(&SWEEP_COLUMNS, rows)
}

pub fn cost_items_csv(cmp: &TcoComparison) -> String {
    let rows = cmp.results.iter().flat_map(|r| {
        r.line_items.iter().map(move |i| {
            vec![
                r.technology.name().to_owned(),
                i.label.to_owned(),
                i.kind.name().to_owned(),
                num(i.unit_cost),
                num(i.quantity),
                num(i.total),
            ]
        })
    });
    to_csv(&COST_ITEM_COLUMNS, rows)
}

pub fn cost_summary_csv(cmp: &TcoComparison) -> String {
    let rows = cmp.ranking.iter().enumerate().map(|(rank, tech)| {
        let r = cmp.get(*tech);
        vec![
            (rank + 1).to_string(),
            tech.name().to_owned(),
            num(r.capex),
            num(r.opex_per_year),
            num(cmp.years),
            num(r.tco(cmp.years)),
        ]
    });
    to_csv(&COST_SUMMARY_COLUMNS, rows)
}

pub fn layout_csv(layout: &HetNetLayout) -> String {
    let tagged = |kind: &'static str, pts: &[crate::hetnet_cost::Point]| -> Vec<Vec<String>> {
        pts.iter()
            .enumerate()
            .map(|(i, p)| vec![kind.to_owned(), i.to_string(), num(p.x), num(p.y)])
            .collect()
    };
    let rows = tagged("macro", &layout.macro_positions)
        .into_iter()
        .chain(tagged("small", &layout.small_positions));
    to_csv(&["kind", "index", "x_m", "y_m"], rows)
}

/// A set of named text files plus a human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportBundle {
    pub files: Vec<(String, String)>,
    pub summary: String,
    pub resolved_config: String,
}

impl ReportBundle {
    fn new(config: &RunConfig) -> Self {
        Self {
            files: Vec::new(),
            summary: String::new(),
            resolved_config: config.resolved.to_toml(),
        }
    }

    pub fn file(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, body)| body.as_str())
    }

    /// Writes every file, the summary and the resolved configuration into
    /// `dir`, creating it if needed. Returns the written paths.
    pub fn write_to(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(self.files.len() + 2);
        let all = self
            .files
            .iter()
            .map(|(n, b)| (n.as_str(), b.as_str()))
            .chain([
                (SUMMARY_FILE, self.summary.as_str()),
                (RESOLVED_CONFIG_FILE, self.resolved_config.as_str()),
            ]);
        for (name, body) in all {
            let path = dir.join(name);
            std::fs::write(&path, body)?;
            written.push(path);
        }
        Ok(written)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluateReport {
    pub bundle: ReportBundle,
    pub results: Vec<(String, LinkBudgetResult)>,
}

impl EvaluateReport {
    pub fn all_viable(&self) -> bool {
        self.results.iter().all(|(_, r)| r.link_viable)
    }
}

/// One link evaluation per configured scenario.
pub fn evaluate(config: &RunConfig) -> Result<EvaluateReport> {
    let mut bundle = ReportBundle::new(config);
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for run in &config.scenarios {
        let r = evaluate_link(
            &config.transceiver,
            &run.geometry,
            &run.scenario,
            config.target_rate_bps,
        )?;
        let l = &r.losses;
        rows.push(vec![
            run.scenario.label().to_owned(),
            num(run.geometry.nfp_altitude_m()),
            num(run.geometry.divergence_rad()),
            num(r.received_power_w),
            num(r.data_rate_bps),
            num(r.target_rate_bps),
            num(r.link_margin_db),
            r.link_viable.to_string(),
            num(l.fog_db),
            num(l.rain_db),
            num(l.cloud_db),
            num(l.scintillation_db),
            num(l.geometrical_db),
            num(l.pointing_db),
            num(l.optical_db),
        ]);
        let _ = writeln!(
            bundle.summary,
            "{:<16} h={:.0} m  theta={:e} rad  rate={}  margin={:.2} dB  {}\n  \
             losses dB: fog {:.2}, rain {:.2}, cloud {:.2}, scint {:.2}, geo {:.2}, pointing {:.2}, optical {:.2}",
            run.scenario.label(),
            run.geometry.nfp_altitude_m(),
            run.geometry.divergence_rad(),
            human_rate(r.data_rate_bps),
            r.link_margin_db,
            if r.link_viable { "viable" } else { "LINK FAILURE" },
            l.fog_db,
            l.rain_db,
            l.cloud_db,
            l.scintillation_db,
            l.geometrical_db,
            l.pointing_db,
            l.optical_db,
        );
        results.push((run.scenario.label().to_owned(), r));
    }
    bundle.files.push((
        "evaluate.csv".into(),
        to_csv(
            &[
                "scenario",
                "nfp_altitude_m",
                "divergence_rad",
                "received_power_w",
                "data_rate_bps",
                "target_rate_bps",
                "link_margin_db",
                "link_viable",
                "l_fog_db",
                "l_rain_db",
                "l_cloud_db",
                "l_sci_db",
                "l_geo_db",
                "l_poi_db",
                "l_opt_db",
            ],
            rows,
        ),
    ));
    Ok(EvaluateReport { bundle, results })
}

/// Every configured sweep for every configured scenario, one CSV each.
pub fn sweep(config: &RunConfig) -> ReportBundle {
    let mut bundle = ReportBundle::new(config);
    for run in &config.scenarios {
        for (i, spec) in config.sweeps.iter().enumerate() {
            let result = run_sweep(
                spec,
                &run.scenario,
                &config.transceiver,
                &run.geometry,
                config.target_rate_bps,
            );
            let suffix = if config.sweeps.len() > 1 {
                format!("_{i}")
            } else {
                String::new()
            };
            let name = format!(
                "sweep_{}_{}{}.csv",
                file_stem(run.scenario.label()),
                spec.variable().name(),
                suffix
            );
            let failed = result.rows.iter().filter(|r| r.outcome.is_err()).count();
            let _ = writeln!(
                bundle.summary,
                "{name}: {} rows over {}, {} failed",
                result.rows.len(),
                spec.variable().name(),
                failed
            );
            bundle.files.push((name, sweep_csv(&result)));
        }
    }
    bundle
}

pub struct CostReport {
    pub bundle: ReportBundle,
    pub layout: HetNetLayout,
    pub comparison: TcoComparison,
}

/// Seeded layout, then TCO for all four technologies.
pub fn cost(config: &RunConfig) -> Result<CostReport> {
    let mut bundle = ReportBundle::new(config);
    let (n_macro, n_small) = config.layout_counts;
    let layout = generate_layout(n_macro, n_small, config.area, config.seed)?;
    let comparison = compare_tco(&layout, &config.cost, config.years)?;
    let _ = writeln!(
        bundle.summary,
        "{n_macro} macro cells, {n_small} small cells over {} m x {} m (seed {})",
        config.area.width_m(),
        config.area.height_m(),
        config.seed
    );
    let _ = writeln!(
        bundle.summary,
        "TCO over {} year(s), cheapest first:",
        config.years
    );
    for (rank, tech) in comparison.ranking.iter().enumerate() {
        let r = comparison.get(*tech);
        let _ = writeln!(
            bundle.summary,
            "  {}. {:<16} capex ${:>14.0}  opex ${:>14.0}/yr  tco ${:>14.0}",
            rank + 1,
            tech.name(),
            r.capex,
            r.opex_per_year,
            r.tco(config.years)
        );
    }
    bundle
        .files
        .push(("cost_items.csv".into(), cost_items_csv(&comparison)));
    bundle
        .files
        .push(("cost_summary.csv".into(), cost_summary_csv(&comparison)));
    bundle
        .files
        .push(("layout.csv".into(), layout_csv(&layout)));
    Ok(CostReport {
        bundle,
        layout,
        comparison,
    })
}

/// Small cells one link can carry under each configured scenario.
pub fn aggregate(config: &RunConfig) -> Result<ReportBundle> {
    let mut bundle = ReportBundle::new(config);
    let rounding = match config.rounding {
        CellRounding::Ceiling => "ceiling",
        CellRounding::Floor => "floor",
    };
    let mut rows = Vec::new();
    for run in &config.scenarios {
        let r = evaluate_link(
            &config.transceiver,
            &run.geometry,
            &run.scenario,
            config.target_rate_bps,
        )?;
        let capacity = supported_cells_with(r.data_rate_bps, &config.traffic, config.rounding)?;
        let demand = if capacity.cells > 0 {
            aggregated_demand(capacity.cells, &config.traffic)?
        } else {
            0.0
        };
        let _ = writeln!(
            bundle.summary,
            "{:<16} rate={}  supports {} cells ({rounding}){}  aggregated demand {}",
            run.scenario.label(),
            human_rate(r.data_rate_bps),
            capacity.cells,
            if capacity.oversubscribed {
                " [oversubscribed]"
            } else {
                ""
            },
            human_rate(demand)
        );
        rows.push(vec![
            run.scenario.label().to_owned(),
            num(r.data_rate_bps),
            num(config.traffic.busy_rate_bps()),
            num(config.traffic.peak_rate_bps()),
            rounding.to_owned(),
            capacity.cells.to_string(),
            capacity.oversubscribed.to_string(),
            num(demand),
        ]);
    }
    bundle.files.push((
        "aggregate.csv".into(),
        to_csv(
            &[
                "scenario",
                "data_rate_bps",
                "busy_rate_bps",
                "peak_rate_bps",
                "rounding",
                "supported_cells",
                "oversubscribed",
                "aggregated_demand_bps",
            ],
            rows,
        ),
    ));
    Ok(bundle)
}

fn human_rate(bps: f64) -> String {
    const UNITS: [(f64, &str); 4] = [
        (1e9, "Gbit/s"),
        (1e6, "Mbit/s"),
        (1e3, "kbit/s"),
        (1.0, "bit/s"),
    ];
    for (scale, unit) in UNITS {
        if bps >= scale {
            return format!("{:.3} {unit}", bps / scale);
        }
    }
    format!("{bps:.3e} bit/s")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn sweep_csv_two_points() {
        let cfg = parse_config(
            "[[sweeps]]\nvariable = \"altitude\"\nstart = 1000.0\nstop = 2000.0\npoints = 2\n",
            &[],
        )
        .unwrap();
        let bundle = sweep(&cfg);
        let body = bundle.file("sweep_clear_sky_altitude.csv").unwrap();
        let lines: Vec<&str> = body.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], SWEEP_COLUMNS.join(","));
        assert!(lines[1].starts_with("1000,"));
        assert!(lines[2].starts_with("2000,"));
    }

    #[test]
    fn error_rows_are_marked() {
        let cfg = parse_config(
            "[[sweeps]]\nvariable = \"altitude\"\nstart = -10.0\nstop = 10.0\npoints = 3\n",
            &[],
        )
        .unwrap();
        let body = sweep(&cfg).files[0].1.clone();
        let lines: Vec<&str> = body.lines().collect();
        assert!(lines[1].contains("outside the model domain"));
        assert!(lines[2].contains("outside the model domain"));
        assert!(lines[3].starts_with("10,"));
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1 + 0.2, 1e-19, 4.2e10, -41.7] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn file_stems_are_portable() {
        assert_eq!(file_stem("theta 1µrad/x"), "theta_1_rad_x");
    }

    #[test]
    fn human_rates() {
        assert_eq!(human_rate(42.3e9), "42.300 Gbit/s");
        assert_eq!(human_rate(198e3), "198.000 kbit/s");
    }
}
