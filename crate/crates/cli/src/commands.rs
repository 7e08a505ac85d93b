use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use toml::Table;

use lh2_core::demand::{self, DemandConfig, Schedule, SyntheticOptions, AMS};
use lh2_core::scenarios::{
    bog_report, insulation_sweep, run_distribution, run_refuel, run_transport, run_transport_uq, BogReportInput,
    DistributionConfig, RefuelCaseConfig, Snapshot, Summary, SweepConfig, TimeSeries, TransportConfig,
    TransportUqConfig, DIAMETER_6IN, DIAMETER_8IN, SCHEMA_VERSION, UQ_OUTPUTS,
};
use lh2_core::sensitivity::{indices_csv, ParameterSpace};
use lh2_core::PropertySet;

use crate::config::{layered, read_table, to_toml};
use crate::error::{CliError, Result};
use crate::output::Outputs;

/// Settings shared by every subcommand.
#[derive(Debug)]
pub struct Session {
    pub props: PropertySet,
    pub overlay: Table,
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub dt_override: Option<f64>,
    pub cells_override: Option<usize>,
    /// Filled in once the job is resolved.
    pub resolved: Option<String>,
    pub seed_used: Option<u64>,
}

impl Session {
    fn resolve<T: Serialize + for<'de> Deserialize<'de>>(&mut self, defaults: &T) -> Result<T> {
        let job = layered(defaults, std::mem::take(&mut self.overlay))?;
        self.resolved = Some(to_toml(&job)?);
        Ok(job)
    }

    fn no_preset(&self, command: &str) -> Result<()> {
        match &self.preset {
            Some(p) => Err(CliError::config("preset", format!("'{p}' is not a preset of {command}"))),
            None => Ok(()),
        }
    }

    fn no_overrides(&self, command: &str) -> Result<()> {
        if self.dt_override.is_some() {
            return Err(CliError::config("--dt-override", format!("{command} has no time step")));
        }
        if self.cells_override.is_some() {
            return Err(CliError::config("--cells-override", format!("{command} has no pipe cells")));
        }
        Ok(())
    }
}

fn positive_dt(dt: f64) -> Result<f64> {
    if dt > 0.0 && dt.is_finite() {
        Ok(dt)
    } else {
        Err(CliError::config("--dt-override", "must be positive"))
    }
}

fn transport_overrides(s: &Session, cfg: &mut TransportConfig) -> Result<()> {
    if let Some(dt) = s.dt_override {
        cfg.dt = positive_dt(dt)?;
    }
    if let Some(n) = s.cells_override {
        cfg.cells = n;
    }
    Ok(())
}

fn airport_cells(s: &Session, airport: &mut lh2_core::scenarios::AirportConfig) {
    if let Some(n) = s.cells_override {
        airport.supply.cells = n;
        airport.recycle.cells = n;
    }
}

fn with_header(table: &str, body: &str) -> String {
    format!("# schema={SCHEMA_VERSION} table={table}\n{body}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropsJob {
    /// Temperature grid of the property table, K.
    pub t_from: f64,
    pub t_to: f64,
    pub step: f64,
    /// Pressures listed in the saturation table, Pa.
    pub pressures: Vec<f64>,
}

impl Default for PropsJob {
    fn default() -> Self {
        PropsJob {
            t_from: 18.0,
            t_to: 30.0,
            step: 0.5,
            pressures: vec![1.0e5, 1.1e5, 1.2e5, 1.3e5, 1.5e5, 1.7e5, 2.0e5],
        }
    }
}

pub fn props(s: &mut Session, out: &mut Outputs) -> Result<Summary> {
    s.no_preset("props")?;
    s.no_overrides("props")?;
    let job: PropsJob = s.resolve(&PropsJob::default())?;
    let p = &s.props;
    out.write("properties.csv", &with_header("properties", &p.table_csv(job.t_from, job.t_to, job.step)?))?;
    let mut sat = TimeSeries::new(["p_Pa", "T_sat_K", "rho_l_kg_m3", "rho_v_kg_m3", "h_fg_J_kg"]);
    let mut summary = Summary::default();
    for &pr in &job.pressures {
        let t = p.saturation_temperature(pr)?;
        sat.push(vec![pr, t, p.saturated_liquid_density(t)?, p.saturated_vapor_density(t)?, p.latent_heat(pr)?]);
        summary.num(&format!("T_sat_K_at_{pr}_Pa"), t);
    }
    out.write("saturation.csv", &sat.to_csv("saturation"))?;
    Ok(summary)
}

fn transport_preset(name: Option<&str>) -> Result<TransportConfig> {
    match name {
        None | Some("4km-8in") => Ok(TransportConfig::four_km(DIAMETER_8IN)),
        Some("4km-6in") => Ok(TransportConfig::four_km(DIAMETER_6IN)),
        Some("25km") => Ok(TransportConfig::twenty_five_km()),
        Some(other) => Err(CliError::config("preset", format!("unknown transport preset '{other}' (4km-6in, 4km-8in, 25km)"))),
    }
}

pub fn transport(s: &mut Session, out: &mut Outputs) -> Result<Summary> {
    let defaults = transport_preset(s.preset.as_deref())?;
    let mut cfg: TransportConfig = s.resolve(&defaults)?;
    transport_overrides(s, &mut cfg)?;
    cfg.validate()?;
    let r = run_transport(&s.props, &cfg)?;
    out.write("history.csv", &r.history.to_csv("transport_history"))?;
    Ok(r.summary())
}

pub fn sweep(s: &mut Session, out: &mut Outputs) -> Result<Summary> {
    s.no_preset("sweep")?;
    let mut cfg: SweepConfig = s.resolve(&SweepConfig::default())?;
    transport_overrides(s, &mut cfg.base)?;
    let r = insulation_sweep(&s.props, &cfg)?;
    out.write("sweep.csv", &r.table().to_csv("insulation_sweep"))?;
    let mut t = TimeSeries::new(["length_m", "threshold_thickness_m"]);
    let mut summary = Summary::default();
    for (l, th) in &r.thresholds {
        t.push(vec![*l, th.unwrap_or(f64::NAN)]);
        match th {
            Some(v) => summary.num(&format!("threshold_m_at_{l}_m"), *v),
            None => summary.text(&format!("threshold_m_at_{l}_m"), "above search range"),
        };
    }
    out.write("thresholds.csv", &t.to_csv("insulation_thresholds"))?;
    Ok(summary)
}

fn snapshot_name(i: usize, snap: &Snapshot) -> String {
    format!("snapshots/{:02}_{}.json", i + 1, snap.label.replace(':', ""))
}

fn snapshot_json(snap: &Snapshot) -> Result<String> {
    serde_json::to_string_pretty(snap).map(|mut s| {
        s.push('\n');
        s
    })
    .map_err(|e| CliError::config("snapshot", e.to_string()))
}

pub fn distribution(s: &mut Session, out: &mut Outputs) -> Result<Summary> {
    s.no_preset("distribution")?;
    let mut cfg: DistributionConfig = s.resolve(&DistributionConfig::default())?;
    if let Some(dt) = s.dt_override {
        cfg.dt = positive_dt(dt)?;
    }
    airport_cells(s, &mut cfg.airport);
    cfg.validate()?;
    let r = run_distribution(&s.props, &cfg)?;
    out.write("series.csv", &r.series.to_csv("distribution"))?;
    for (i, snap) in r.snapshots.iter().enumerate() {
        out.write(&snapshot_name(i, snap), &snapshot_json(snap)?)?;
    }
    Ok(r.summary())
}

/// Refuelling case plus the long-term run that provides its initial state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefuelJob {
    /// Start from a saved snapshot instead of running the long-term model.
    pub snapshot_file: Option<PathBuf>,
    /// Hours into the long-term run at which the case starts.
    pub snapshot_hour: f64,
    /// Long-term model; its airport and recycle settings also apply to the case.
    pub distribution: DistributionConfig,
    pub case: RefuelCaseConfig,
}

impl Default for RefuelJob {
    fn default() -> Self {
        RefuelJob {
            snapshot_file: None,
            snapshot_hour: 24.0,
            distribution: DistributionConfig::default(),
            case: RefuelCaseConfig::default(),
        }
    }
}

pub fn refuel(s: &mut Session, out: &mut Outputs) -> Result<Summary> {
    let case = match s.preset.as_deref() {
        None | Some("large") => RefuelCaseConfig::default(),
        Some("small") => RefuelCaseConfig::small_tanks(),
        Some(other) => return Err(CliError::config("preset", format!("unknown refuel preset '{other}' (large, small)"))),
    };
    if let Some(Some(t)) = s.overlay.get("case").map(|c| c.as_table()) {
        for key in ["airport", "recycle"] {
            if t.contains_key(key) {
                return Err(CliError::config(format!("case.{key}"), format!("set {key} under [distribution]")));
            }
        }
    }
    let mut job: RefuelJob = s.resolve(&RefuelJob { case, ..RefuelJob::default() })?;
    if let Some(dt) = s.dt_override {
        job.case.dt = positive_dt(dt)?;
    }
    airport_cells(s, &mut job.distribution.airport);
    job.case.airport = job.distribution.airport.clone();
    job.case.recycle = job.distribution.recycle.clone();
    job.case.validate()?;
    let snap = match &job.snapshot_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            serde_json::from_str::<Snapshot>(&text).map_err(|e| CliError::config("snapshot_file", e.to_string()))?
        }
        None => {
            if !(job.snapshot_hour > 0.0) {
                return Err(CliError::config("snapshot_hour", "must be positive"));
            }
            let long = DistributionConfig {
                horizon_hours: job.snapshot_hour,
                snapshot_hours: vec![job.snapshot_hour],
                ..job.distribution.clone()
            };
            let d = run_distribution(&s.props, &long)?;
            d.snapshots.into_iter().next().ok_or_else(|| CliError::config("snapshot_hour", "no snapshot taken"))?
        }
    };
    out.write("snapshot.json", &snapshot_json(&snap)?)?;
    let r = run_refuel(&s.props, &job.case, &snap)?;
    out.write("refuel.csv", &r.series.to_csv("refuel"))?;
    let mut summary = r.summary();
    summary.num("total_vented_kg", r.total_vented()).num("peak_pressure_Pa", r.peak_pressure());
    Ok(summary)
}

pub fn bog(s: &mut Session, out: &mut Outputs) -> Result<Summary> {
    s.no_preset("bog-report")?;
    s.no_overrides("bog-report")?;
    let input: BogReportInput = s.resolve(&BogReportInput::default())?;
    let r = bog_report(&input)?;
    out.write("bog_report.csv", &r.to_csv())?;
    let mut summary = Summary::default();
    summary
        .num("low_total_kg", r.low.total)
        .num("high_total_kg", r.high.total)
        .num("low_refuelling_kg", r.low.refuelling)
        .num("high_refuelling_kg", r.high.refuelling)
        .num("discrepancies", r.discrepancies.len() as f64);
    for note in r.notes() {
        summary.text("note", note);
    }
    Ok(summary)
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => v[n / 2],
        _ => 0.5 * (v[n / 2 - 1] + v[n / 2]),
    }
}

#[derive(Debug, Clone, Default)]
pub struct SensitivityArgs {
    pub space: Option<PathBuf>,
    pub samples: Option<usize>,
}

pub fn sensitivity(s: &mut Session, out: &mut Outputs, args: &SensitivityArgs) -> Result<Summary> {
    let d = match s.preset.as_deref() {
        None | Some("4km-8in") => DIAMETER_8IN,
        Some("4km-6in") => DIAMETER_6IN,
        Some(other) => return Err(CliError::config("preset", format!("unknown sensitivity preset '{other}' (4km-6in, 4km-8in)"))),
    };
    if let Some(path) = &args.space {
        let table = read_table(path)?;
        let space: ParameterSpace = layered(&ParameterSpace::default(), table)?;
        s.overlay.insert("space".into(), toml::Value::try_from(&space).map_err(|e| CliError::config("space", e.to_string()))?);
    }
    if let Some(n) = args.samples {
        s.overlay.insert("base_samples".into(), toml::Value::Integer(n as i64));
    }
    if let Some(seed) = s.seed {
        s.overlay.insert("bootstrap_seed".into(), toml::Value::Integer(seed as i64));
    }
    let mut cfg: TransportUqConfig = s.resolve(&TransportUqConfig::four_km(d))?;
    s.seed_used = Some(cfg.bootstrap_seed);
    transport_overrides(s, &mut cfg.base)?;
    let r = run_transport_uq(&s.props, &cfg, s.workers)?;
    out.write("samples.csv", &r.samples_table().to_csv("uq_samples"))?;
    out.write("outputs.csv", &r.outputs_table().to_csv("uq_outputs"))?;
    out.write("indices.csv", &indices_csv(&r.indices))?;
    for h in &r.histograms {
        out.write(&format!("histograms/{}.csv", h.name), &h.to_csv())?;
    }
    let mut summary = Summary::default();
    summary
        .num("runs", r.samples.len() as f64)
        .num("two_phase_runs", r.two_phase.iter().filter(|&&t| t).count() as f64);
    for name in UQ_OUTPUTS {
        summary.num(&format!("median_{name}"), median(&r.output(name)));
    }
    for rep in &r.indices {
        let ranking = rep.ranking();
        summary.text(&format!("total_index_ranking_{}", rep.output), ranking.join(" > "));
    }
    Ok(summary)
}

/// Demand estimate for one schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemandJob {
    pub origin_lat: f64,
    pub origin_lon: f64,
    /// CSV schedule; the synthetic day is used when unset.
    pub schedule_file: Option<PathBuf>,
    pub synthetic: SyntheticOptions,
    pub demand: DemandConfig,
}

impl Default for DemandJob {
    fn default() -> Self {
        DemandJob {
            origin_lat: AMS.0,
            origin_lon: AMS.1,
            schedule_file: None,
            synthetic: SyntheticOptions::default(),
            demand: DemandConfig::default(),
        }
    }
}

pub fn demand(s: &mut Session, out: &mut Outputs, schedule: Option<PathBuf>) -> Result<Summary> {
    s.no_preset("demand")?;
    s.no_overrides("demand")?;
    let mut job: DemandJob = s.resolve(&DemandJob::default())?;
    if let Some(path) = schedule {
        job.schedule_file = Some(path);
    }
    if let Some(seed) = s.seed {
        job.synthetic.seed = seed;
        if let demand::Selection::Random { .. } = job.demand.selection {
            job.demand.selection = demand::Selection::Random { seed };
        }
    }
    s.resolved = Some(to_toml(&job)?);
    let origin = (job.origin_lat, job.origin_lon);
    let sched = match &job.schedule_file {
        Some(path) => {
            let f = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
            Schedule::read_csv(origin, f)?
        }
        None => {
            s.seed_used = Some(job.synthetic.seed);
            demand::synthetic_schedule(origin, &job.synthetic)?
        }
    };
    let r = demand::hourly_series(&sched, &job.demand)?;
    let mut buf = Vec::new();
    sched.write_csv(&mut buf)?;
    out.write("schedule.csv", &String::from_utf8_lossy(&buf))?;
    out.write("hourly.csv", &r.hourly_csv())?;
    out.write("flights.csv", &r.flights_csv())?;
    out.write("shares.csv", &r.shares_csv())?;
    out.write("histograms/distance_km.csv", &r.distance_histogram.to_csv())?;
    out.write("histograms/lh2_per_departure_kg.csv", &r.lh2_histogram.to_csv())?;
    let mut summary = Summary::default();
    summary
        .num("departures", r.flights.len() as f64)
        .num("hydrogen_departures", r.flights.iter().filter(|f| f.hydrogen).count() as f64)
        .num("lh2_total_kg", r.total_lh2())
        .num("gh2_total_kg", r.total_gh2());
    if let Some(p) = r.peak_hour() {
        summary.num("peak_hour", p.hour as f64).num("peak_hour_lh2_kg", p.lh2);
    }
    for (t, share) in &r.shares {
        summary.num(&format!("share_below_{t}_kg"), *share);
    }
    Ok(summary)
}
