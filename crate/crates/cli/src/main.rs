use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use qtsp_core::cloud::ScenarioOverrides;
use qtsp_core::graph::parse_matrix;
use qtsp_cli::{render_report, run_plan, spawn_local_service, ExperimentPlan};
use qtsp_service::{AppState, ServiceConfig};

#[derive(Parser)]
#[command(name = "qtsp", about = "TSP solving on virtual quantum devices", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service.
    Serve {
        /// Listen address.
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Scenario override file (JSON); defaults are used when omitted.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the scenario clock scale (0 = virtual delays elapse
        /// instantly, 1 = real time).
        #[arg(long)]
        clock_scale: Option<f64>,
        /// Virtual seconds a request waits on a task before 504.
        #[arg(long, default_value_t = 300.0)]
        poll_timeout: f64,
    },
    /// Execute an experiment plan and write the report tables.
    Run {
        /// Plan file (JSON).
        #[arg(long)]
        plan: PathBuf,
        /// Output directory for the report; falls back to the plan's
        /// `output` field.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the plan seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Target an already-running service instead of self-hosting one.
        #[arg(long)]
        base_url: Option<String>,
    },
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Serve { addr, scenario, seed, clock_scale, poll_timeout } => {
            serve(addr, scenario, seed, clock_scale, poll_timeout)
        }
        Command::Run { plan, out, seed, base_url } => run(plan, out, seed, base_url),
    }
}

fn serve(
    addr: SocketAddr,
    scenario_path: Option<PathBuf>,
    seed: Option<u64>,
    clock_scale: Option<f64>,
    poll_timeout: f64,
) -> anyhow::Result<()> {
    let overrides = match scenario_path {
        Some(path) => {
            let text = std::fs::read_to_string(&path)
                .with_context(|| format!("cannot read scenario {}", path.display()))?;
            ScenarioOverrides::from_json(&text)?
        }
        None => ScenarioOverrides::default(),
    };
    let mut scenario = overrides.resolve()?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    if let Some(scale) = clock_scale {
        scenario.clock_scale = scale;
    }
    let config = ServiceConfig { scenario, poll_timeout_secs: poll_timeout, ..Default::default() };
    let state = Arc::new(AppState::new(config)?);

    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(qtsp_service::serve(addr, state, |bound| {
        println!("listening on http://{bound}");
    }))?;
    Ok(())
}

fn run(
    plan_path: PathBuf,
    out: Option<PathBuf>,
    seed: Option<u64>,
    base_url: Option<String>,
) -> anyhow::Result<()> {
    let mut plan = ExperimentPlan::load(&plan_path)?;
    if let Some(seed) = seed {
        plan.seed = seed;
    }
    let Some(out_dir) = out.or_else(|| plan.output.clone()) else {
        bail!("no output directory: pass --out or set `output` in the plan");
    };

    let base_url = match base_url {
        Some(url) => url,
        None => {
            let mut config = ServiceConfig::default();
            config.scenario.seed = plan.seed;
            let addr = spawn_local_service(config)?;
            println!("self-hosted service on http://{addr}");
            format!("http://{addr}")
        }
    };

    let records = run_plan(&plan, &base_url)?;

    let matrix_text = std::fs::read_to_string(&plan.instance)?;
    let n_cities = parse_matrix(&matrix_text)?.n();
    let report = render_report(&records, n_cities, 6);
    report.write_to(&out_dir)?;
    print!("{}", report.human);
    println!(
        "wrote results.csv, resources.csv, latency.csv, costs.csv, report.txt to {}",
        out_dir.display()
    );
    Ok(())
}
