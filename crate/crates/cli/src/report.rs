//! Experiment records and the rendered report: results, resources,
//! latency and cost tables in CSV plus a human-readable text version.

use std::fmt::Write as _;
use std::path::Path;

use qtsp_core::Money;

use crate::plan::EndpointKind;

#[derive(Debug, Clone, PartialEq)]
pub struct LatencyStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl LatencyStats {
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        Some(Self { mean, min, max })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Route { route: Vec<usize>, distance: Option<f64> },
    Error { code: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub endpoint: EndpointKind,
    pub device: String,
    pub shots: Option<u64>,
    pub repetitions: u32,
    pub successes: u32,
    pub outcome: Outcome,
    /// Defined only when at least two repetitions succeeded: were all
    /// returned routes the same cycle?
    pub consistent: Option<bool>,
    pub latency: Option<LatencyStats>,
    pub total_cost: Money,
}

impl ExperimentRecord {
    pub fn route_label(&self) -> String {
        match &self.outcome {
            Outcome::Route { route, .. } => {
                route.iter().map(usize::to_string).collect::<Vec<_>>().join("-")
            }
            Outcome::Error { .. } => String::new(),
        }
    }

    pub fn error_label(&self) -> String {
        match &self.outcome {
            Outcome::Route { .. } => String::new(),
            Outcome::Error { code } => code.clone(),
        }
    }

    pub fn consistency_label(&self) -> &'static str {
        match self.consistent {
            Some(true) => "consistent",
            Some(false) => "inconsistent",
            None => "",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub results_csv: String,
    pub resources_csv: String,
    pub latency_csv: String,
    pub costs_csv: String,
    pub human: String,
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("csv write");
    for row in rows {
        w.write_record(row).expect("csv write");
    }
    String::from_utf8(w.into_inner().expect("csv flush")).expect("csv is utf-8")
}

fn text_table(out: &mut String, title: &str, header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let _ = writeln!(out, "{title}");
    let line = |out: &mut String, cells: &[String]| {
        let rendered: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<width$}", c, width = widths[i]))
            .collect();
        let _ = writeln!(out, "  {}", rendered.join("  "));
    };
    line(out, &header.iter().map(|s| s.to_string()).collect::<Vec<_>>());
    line(out, &widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>());
    for row in rows {
        line(out, row);
    }
    out.push('\n');
}

fn fmt_secs(v: f64) -> String {
    format!("{v:.3}")
}

/// Renders the four tables. `n_cities` and `phase_bits` size the resource
/// rows for the instance the records were produced from.
pub fn render_report(records: &[ExperimentRecord], n_cities: usize, phase_bits: usize) -> Report {
    let shots_label =
        |r: &ExperimentRecord| r.shots.map(|s| s.to_string()).unwrap_or_else(|| "-".into());

    let results_rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.endpoint.label().to_string(),
                r.device.clone(),
                shots_label(r),
                r.repetitions.to_string(),
                r.successes.to_string(),
                r.route_label(),
                match &r.outcome {
                    Outcome::Route { distance: Some(d), .. } => format!("{d}"),
                    _ => String::new(),
                },
                r.error_label(),
                r.consistency_label().to_string(),
            ]
        })
        .collect();
    let results_header = [
        "endpoint", "device", "shots", "repetitions", "successes", "route", "distance", "error",
        "consistency",
    ];

    let bits = (usize::BITS - (n_cities.max(2) - 1).leading_zeros()) as usize;
    let resource_rows = vec![
        vec![
            "gate".to_string(),
            (n_cities * bits + phase_bits).to_string(),
            phase_bits.to_string(),
        ],
        vec![
            "annealing".to_string(),
            (n_cities * n_cities).to_string(),
            (n_cities * n_cities).to_string(),
        ],
    ];
    let resource_header = ["solver", "qubits_or_variables", "classical_bits"];

    let latency_rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let (mean, min, max) = match &r.latency {
                Some(l) => (fmt_secs(l.mean), fmt_secs(l.min), fmt_secs(l.max)),
                None => (String::new(), String::new(), String::new()),
            };
            vec![r.endpoint.label().to_string(), r.device.clone(), shots_label(r), mean, min, max]
        })
        .collect();
    let latency_header = ["endpoint", "device", "shots", "mean_s", "min_s", "max_s"];

    let cost_rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            vec![
                r.endpoint.label().to_string(),
                r.device.clone(),
                shots_label(r),
                r.total_cost.to_string(),
            ]
        })
        .collect();
    let cost_header = ["endpoint", "device", "shots", "total_cost"];

    let mut human = String::new();
    text_table(&mut human, "Results", &results_header, &results_rows);
    text_table(&mut human, "Resources", &resource_header, &resource_rows);
    text_table(&mut human, "Response times (virtual seconds)", &latency_header, &latency_rows);
    text_table(&mut human, "Costs", &cost_header, &cost_rows);

    Report {
        results_csv: csv_table(&results_header, &results_rows),
        resources_csv: csv_table(&resource_header, &resource_rows),
        latency_csv: csv_table(&latency_header, &latency_rows),
        costs_csv: csv_table(&cost_header, &cost_rows),
        human,
    }
}

impl Report {
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("results.csv"), &self.results_csv)?;
        std::fs::write(dir.join("resources.csv"), &self.resources_csv)?;
        std::fs::write(dir.join("latency.csv"), &self.latency_csv)?;
        std::fs::write(dir.join("costs.csv"), &self.costs_csv)?;
        std::fs::write(dir.join("report.txt"), &self.human)?;
        Ok(())
    }
}
