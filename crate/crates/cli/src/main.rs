//! `lh2sim`: runs the pipeline, distribution, refuelling, sensitivity and
//! demand scenarios from TOML job files and writes CSV artifacts.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toml::Table;

use lh2_core::demand::{DemandConfig, FuelModel, GseTable};
use lh2_core::props::DEFAULT_COEFFICIENTS;
use lh2_core::scenarios::Summary;
use lh2_core::PropertySet;

use commands::{SensitivityArgs, Session};
use error::{CliError, Result};
use output::{sha256_hex, FileEntry, Outputs, RunManifest};

#[derive(Debug, Parser)]
#[command(name = "lh2sim", version, about = "Liquid-hydrogen airport pipeline simulator", arg_required_else_help = true)]
struct Cli {
    /// Job file (TOML); keys not given keep their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: out/<subcommand>].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed of the synthetic schedule or the bootstrap resampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel runs.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Replaces the scenario time step, s.
    #[arg(long, global = true)]
    dt_override: Option<f64>,
    /// Replaces the cell count of the long pipes.
    #[arg(long, global = true)]
    cells_override: Option<usize>,
    /// Property coefficient file instead of the bundled parahydrogen fit.
    #[arg(long, global = true)]
    props: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Saturation and liquid property tables.
    Props,
    /// Steady transport line from liquefier to fuel farm.
    Transport,
    /// Insulation thickness sweep and single-phase thresholds.
    Sweep,
    /// Long-term distribution system with recycling.
    Distribution,
    /// Aircraft refuelling sequence from a long-term snapshot.
    Refuel,
    /// Daily boil-off totals.
    BogReport,
    /// Sobol indices and output histograms of the transport line.
    Sensitivity {
        /// Parameter space file with [[parameters]] name, lower, upper.
        #[arg(long)]
        space: Option<PathBuf>,
        /// Base sample count N.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Hourly hydrogen demand from a flight schedule.
    Demand {
        /// Schedule CSV (time,dest_lat,dest_lon,class[,label]).
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Props => "props",
            Command::Transport => "transport",
            Command::Sweep => "sweep",
            Command::Distribution => "distribution",
            Command::Refuel => "refuel",
            Command::BogReport => "bog-report",
            Command::Sensitivity { .. } => "sensitivity",
            Command::Demand { .. } => "demand",
        }
    }
}

fn coefficient_hashes(props_text: &str) -> Vec<FileEntry> {
    let demand_defaults = format!(
        "{}{}{}",
        toml::to_string(&FuelModel::default()).unwrap_or_default(),
        toml::to_string(&GseTable::default()).unwrap_or_default(),
        toml::to_string(&DemandConfig::default().constants).unwrap_or_default()
    );
    vec![
        FileEntry { name: "properties".into(), sha256: sha256_hex(props_text.as_bytes()) },
        FileEntry { name: "demand_defaults".into(), sha256: sha256_hex(demand_defaults.as_bytes()) },
    ]
}

fn with_status(status: &str, summary: Summary) -> Summary {
    let mut s = Summary::default();
    s.text("status", status);
    s.entries.extend(summary.entries);
    s
}

fn run(cli: Cli) -> Result<()> {
    let name = cli.command.name();
    if cli.workers == Some(0) {
        return Err(CliError::config("--workers", "must be at least 1"));
    }
    let (props, props_text) = match &cli.props {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            (PropertySet::parse(&text)?, text)
        }
        None => (PropertySet::parahydrogen().clone(), DEFAULT_COEFFICIENTS.to_string()),
    };
    let (mut overlay, config_hash) = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            (config::parse_table(&text)?, Some(sha256_hex(text.as_bytes())))
        }
        None => (Table::new(), None),
    };
    let preset = config::take_string(&mut overlay, "preset")?;
    if let Some(n) = cli.workers {
        // Ignored if a pool already exists; the runs are deterministic either way.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut session = Session {
        props,
        overlay,
        preset,
        seed: cli.seed,
        workers: cli.workers,
        dt_override: cli.dt_override,
        cells_override: cli.cells_override,
        resolved: None,
        seed_used: None,
    };
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out").join(name));
    let mut out = Outputs::create(&dir)?;
    let result = match cli.command {
        Command::Props => commands::props(&mut session, &mut out),
        Command::Transport => commands::transport(&mut session, &mut out),
        Command::Sweep => commands::sweep(&mut session, &mut out),
        Command::Distribution => commands::distribution(&mut session, &mut out),
        Command::Refuel => commands::refuel(&mut session, &mut out),
        Command::BogReport => commands::bog(&mut session, &mut out),
        Command::Sensitivity { space, samples } => {
            commands::sensitivity(&mut session, &mut out, &SensitivityArgs { space, samples })
        }
        Command::Demand { schedule } => commands::demand(&mut session, &mut out, schedule),
    };
    let (status, condition, summary, failure) = match result {
        Ok(summary) => ("ok", None, with_status("ok", summary), None),
        Err(e) => {
            out.discard();
            let Some(condition) = e.physics_condition() else {
                return Err(e);
            };
            // Re-open: discarding may have removed a freshly created directory.
            out = Outputs::create(&dir)?;
            let mut s = Summary::default();
            s.text("status", "failed").text("condition", condition).text("error", e.to_string());
            ("failed", Some(condition.to_string()), s, Some(e))
        }
    };
    if let Some(resolved) = &session.resolved {
        out.write("config.resolved.toml", resolved)?;
    }
    out.write("summary.txt", &summary.to_text())?;
    let manifest = RunManifest {
        tool: "lh2sim",
        version: env!("CARGO_PKG_VERSION"),
        subcommand: name.to_string(),
        config: cli.config.as_ref().map(|p| p.display().to_string()),
        config_sha256: config_hash,
        output_dir: dir.display().to_string(),
        seed: session.seed_used,
        workers: cli.workers,
        dt_override: cli.dt_override,
        cells_override: cli.cells_override,
        coefficients: coefficient_hashes(&props_text),
        status: status.to_string(),
        condition,
        files: out.files().iter().map(|(n, h)| FileEntry { name: n.clone(), sha256: h.clone() }).collect(),
    };
    out.write("manifest.json", &manifest.to_json())?;
    match failure {
        Some(e) => Err(e),
        None => {
            print!("{}", summary.to_text().lines().skip(1).map(|l| format!("{l}\n")).collect::<String>());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lh2sim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
