use serde::{Deserialize, Serialize};

use super::airport::{clock_label, outlet_subcooling, AirportConfig, PipeProfile, Snapshot};
use super::record::{Summary, TimeSeries};
use crate::control::{recycle_setpoint, FillEntry, FillStart, RecycleSchedule, Sequencer};
use crate::error::{Error, Result};
use crate::flownet::{Branch, BranchControl, ConservationCheck, Controls, Ledger, Network, Pipe, Sink, Suction, Tank};
use crate::props::PropertySet;

/// Long-term (hours to days) model of the airport distribution system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistributionConfig {
    pub airport: AirportConfig,
    pub recycle: RecycleSchedule,
    /// Clock hour at t = 0.
    pub start_hour: f64,
    pub horizon_hours: f64,
    /// s
    pub dt: f64,
    /// Fills per day, spread evenly over the day window with the first at
    /// its start and the last ending at its close.
    pub fills_per_day: usize,
    /// kg per fill and fill rate, kg/s.
    pub fill_mass: f64,
    pub fill_rate: f64,
    /// Aircraft tank pressure seen by the fill valve, Pa.
    pub aircraft_pressure: f64,
    pub farm_initial_pressure: f64,
    pub farm_initial_level: f64,
    /// Initial pipe temperature; saturation at the farm pressure when unset.
    pub initial_pipe_temperature: Option<f64>,
    /// Hours after t = 0 at which handoff snapshots are taken.
    pub snapshot_hours: Vec<f64>,
}

impl Default for DistributionConfig {
    fn default() -> Self {
        DistributionConfig {
            airport: AirportConfig::default(),
            recycle: RecycleSchedule::default(),
            start_hour: 6.0,
            horizon_hours: 40.0,
            dt: 10.0,
            fills_per_day: 58,
            fill_mass: 6200.0,
            fill_rate: 20.0,
            aircraft_pressure: 1.5e5,
            farm_initial_pressure: 1.3e5,
            farm_initial_level: 0.85,
            initial_pipe_temperature: None,
            snapshot_hours: vec![16.0, 24.0],
        }
    }
}

impl DistributionConfig {
    pub fn validate(&self) -> Result<()> {
        self.airport.validate()?;
        self.recycle.validate()?;
        for (k, v) in [
            ("horizon_hours", self.horizon_hours),
            ("dt", self.dt),
            ("fill_rate", self.fill_rate),
            ("aircraft_pressure", self.aircraft_pressure),
            ("farm_initial_pressure", self.farm_initial_pressure),
            ("farm_initial_level", self.farm_initial_level),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(k, "must be positive and finite"));
            }
        }
        if !(0.0..24.0).contains(&self.start_hour) {
            return Err(Error::config("start_hour", "must lie in [0, 24)"));
        }
        if !(self.fill_mass >= 0.0) {
            return Err(Error::config("fill_mass", "must not be negative"));
        }
        let window = (self.recycle.day_end_hour - self.recycle.day_start_hour) * 3600.0;
        if self.fills_per_day as f64 * self.fill_mass / self.fill_rate > window {
            return Err(Error::config("fills_per_day", "fills do not fit in the day window"));
        }
        if self.snapshot_hours.iter().any(|&h| !(0.0..=self.horizon_hours).contains(&h)) {
            return Err(Error::config("snapshot_hours", "must lie within the horizon"));
        }
        Ok(())
    }

    /// Fill plan over the horizon. Start times sit on the step grid so the last
    /// fill of a day ends at the close of the day window.
    pub fn fill_plan(&self) -> Vec<FillEntry> {
        let mut plan = Vec::new();
        if self.fills_per_day == 0 || self.fill_mass <= 0.0 {
            return plan;
        }
        let duration = (self.fill_mass / self.fill_rate / self.dt).ceil() * self.dt;
        let window = (self.recycle.day_end_hour - self.recycle.day_start_hour) * 3600.0;
        let spacing = if self.fills_per_day > 1 {
            (window - duration) / (self.fills_per_day - 1) as f64
        } else {
            0.0
        };
        let horizon = self.horizon_hours * 3600.0;
        let t0_clock = self.start_hour * 3600.0;
        let mut day = 0.0;
        loop {
            // Run time of this day's window opening.
            let open = day * 86_400.0 + self.recycle.day_start_hour * 3600.0 - t0_clock;
            if open >= horizon {
                break;
            }
            for k in 0..self.fills_per_day {
                let start = open + (k as f64 * spacing / self.dt + 1e-9).floor() * self.dt;
                if start >= 0.0 && start + duration <= horizon + 1e-9 {
                    plan.push(FillEntry {
                        aircraft: 0,
                        start: FillStart::At(start),
                        target_mass: self.fill_mass,
                        max_rate: self.fill_rate,
                    });
                }
            }
            day += 1.0;
        }
        plan
    }

    fn pipe(&self, props: &PropertySet, spec: &crate::flownet::PipeSegment, t: f64) -> Result<Pipe> {
        Pipe::new(props, spec.clone(), t, self.farm_initial_pressure + 0.8e5)
    }

    pub fn build(&self, props: &PropertySet) -> Result<Network> {
        self.validate()?;
        let a = &self.airport;
        let farm = Tank::saturated(props, a.farm.clone(), self.farm_initial_pressure, self.farm_initial_level)?;
        let t = self.initial_pipe_temperature.unwrap_or_else(|| farm.temperature());
        Ok(Network {
            suction: Suction::Farm,
            farm_feed: a.farm_feed(props)?,
            farm: Some(farm),
            pump: a.pump,
            ideal_pump: false,
            trunk: vec![self.pipe(props, &a.supply, t)?, self.pipe(props, &a.header, t)?],
            branches: vec![
                Branch {
                    name: "aircraft".into(),
                    upstream: Vec::new(),
                    valve: a.aircraft_valve()?,
                    downstream: Vec::new(),
                    sink: Sink::Boundary { pressure: self.aircraft_pressure },
                },
                Branch {
                    name: "recycle".into(),
                    upstream: vec![self.pipe(props, &a.recycle, t)?],
                    valve: a.recycle_valve()?,
                    downstream: Vec::new(),
                    sink: Sink::FarmReturn,
                },
            ],
            ledger: Ledger::default(),
            time: 0.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionResult {
    pub series: TimeSeries,
    pub snapshots: Vec<Snapshot>,
    /// Vapour appeared somewhere in the recycle line.
    pub recycle_lost_subcooling: bool,
    pub min_recycle_subcooling: f64,
    pub min_supply_subcooling: f64,
    pub farm_pressure_range: (f64, f64),
    pub delivered_mass: f64,
    pub fills_completed: usize,
    pub conservation: ConservationCheck,
}

impl DistributionResult {
    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        s.num("min_supply_outlet_subcooling_K", self.min_supply_subcooling)
            .num("min_recycle_outlet_subcooling_K", self.min_recycle_subcooling)
            .flag("recycle_lost_subcooling", self.recycle_lost_subcooling)
            .num("farm_pressure_min_Pa", self.farm_pressure_range.0)
            .num("farm_pressure_max_Pa", self.farm_pressure_range.1)
            .num("delivered_mass_kg", self.delivered_mass)
            .num("fills_completed", self.fills_completed as f64)
            .num("mass_residual", self.conservation.mass)
            .num("energy_residual", self.conservation.energy);
        for snap in &self.snapshots {
            s.text("snapshot", snap.label.clone());
        }
        s
    }
}

pub const DISTRIBUTION_COLUMNS: [&str; 15] = [
    "time_h",
    "clock_h",
    "aircraft_flow_kg_s",
    "recycle_flow_kg_s",
    "pump_flow_kg_s",
    "header_pressure_Pa",
    "supply_outlet_subcooling_K",
    "recycle_outlet_subcooling_K",
    "recycle_min_subcooling_K",
    "supply_max_quality",
    "farm_pressure_Pa",
    "farm_level",
    "farm_temperature_K",
    "recycle_opening",
    "farm_vented_kg",
];

fn snapshot(net: &Network, clock: f64, recycle_flow: f64, recycle_opening: f64) -> Snapshot {
    let farm = net.farm.as_ref().expect("distribution network has a farm");
    Snapshot {
        label: clock_label(clock),
        clock_seconds: clock.rem_euclid(86_400.0),
        farm_mass: farm.mass(),
        farm_energy: farm.energy(),
        supply: PipeProfile::capture(&net.trunk[0]),
        header: PipeProfile::capture(&net.trunk[1]),
        recycle: PipeProfile::capture(&net.branches[1].upstream[0]),
        recycle_flow,
        recycle_opening,
    }
}

/// Integrates the distribution system over the horizon with ideal flow
/// control on the fill and recycle valves.
pub fn run_distribution(props: &PropertySet, config: &DistributionConfig) -> Result<DistributionResult> {
    let mut net = config.build(props)?;
    let plan = config.fill_plan();
    let n_fills = plan.len();
    let mut seq = Sequencer::new(plan, 1)?;
    let m0 = net.stored_mass();
    let e0 = net.stored_energy();
    let ledger0 = net.ledger.clone();
    let dt = config.dt;
    let steps = (config.horizon_hours * 3600.0 / dt).round() as usize;
    let mut snap_steps: Vec<(usize, bool)> =
        config.snapshot_hours.iter().map(|h| ((h * 3600.0 / dt).round() as usize, false)).collect();

    let mut series = TimeSeries::new(DISTRIBUTION_COLUMNS);
    let mut snapshots = Vec::new();
    let mut recycle_lost = false;
    let mut min_rec = f64::INFINITY;
    let mut min_sup = f64::INFINITY;
    let mut p_range = (f64::INFINITY, f64::NEG_INFINITY);
    let mut delivered = 0.0;
    let mut last_recycle = (0.0, 0.0);

    for k in 0..=steps {
        let t = k as f64 * dt;
        let clock = config.start_hour * 3600.0 + t;
        for (s, done) in snap_steps.iter_mut() {
            if *s == k && !*done {
                snapshots.push(snapshot(&net, clock, last_recycle.0, last_recycle.1));
                *done = true;
            }
        }
        if k == steps {
            break;
        }
        let sp = seq.setpoints(t, dt);
        let active = sp[0] > 0.0;
        let controls = Controls {
            pump_speed: 1.0,
            branches: vec![
                BranchControl::Flow(sp[0]),
                BranchControl::Flow(recycle_setpoint(&config.recycle, clock, active)),
            ],
        };
        let r = net.step(props, &controls, dt)?;
        let h = &r.hydraulics;
        seq.record(&h.branch_flows[..1], t, dt);
        delivered += h.branch_flows[0] * dt;
        last_recycle = (h.branch_flows[1], h.valve_openings[1]);

        let supply = &net.trunk[0];
        let recycle = &net.branches[1].upstream[0];
        let sup_sc = outlet_subcooling(props, supply)?;
        let rec_sc = outlet_subcooling(props, recycle)?;
        let rec_min = recycle.min_subcooling(props)?;
        let rec_q = recycle.max_quality(props)?;
        recycle_lost |= rec_q > 0.0;
        min_rec = min_rec.min(rec_sc);
        min_sup = min_sup.min(sup_sc);
        let farm = net.farm.as_ref().expect("farm");
        p_range = (p_range.0.min(farm.pressure()), p_range.1.max(farm.pressure()));
        series.push(vec![
            net.time / 3600.0,
            (clock + dt).rem_euclid(86_400.0) / 3600.0,
            h.branch_flows[0],
            h.branch_flows[1],
            h.total_flow,
            h.header_pressure,
            sup_sc,
            rec_sc,
            rec_min,
            supply.max_quality(props)?,
            farm.pressure(),
            farm.level(),
            farm.temperature(),
            h.valve_openings[1],
            r.farm_vented,
        ]);
    }
    let fills_completed = (0..n_fills).filter(|&i| seq.finished_at(i).is_some()).count();
    Ok(DistributionResult {
        series,
        snapshots,
        recycle_lost_subcooling: recycle_lost,
        min_recycle_subcooling: min_rec,
        min_supply_subcooling: min_sup,
        farm_pressure_range: p_range,
        delivered_mass: delivered,
        fills_completed,
        conservation: net.conservation(m0, e0, &ledger0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fill_plan_covers_each_day_window() {
        let cfg = DistributionConfig::default();
        let plan = cfg.fill_plan();
        assert_eq!(plan.len(), 116);
        let starts: Vec<f64> = plan
            .iter()
            .map(|e| match e.start {
                FillStart::At(t) => t,
                FillStart::After(_) => unreachable!(),
            })
            .collect();
        assert_eq!(starts[0], 0.0);
        // Last fill of day 1 ends exactly at 22:00.
        assert_eq!(starts[57] + 310.0, 16.0 * 3600.0);
        assert_eq!(starts[58], 24.0 * 3600.0);
        let total: f64 = plan.iter().map(|e| e.target_mass).sum::<f64>() / 2.0;
        assert!((total - 359_600.0).abs() < 1e-6);
    }

    #[test]
    fn short_run_conserves_and_snapshots() {
        let cfg = DistributionConfig {
            horizon_hours: 0.5,
            snapshot_hours: vec![0.25],
            ..DistributionConfig::default()
        };
        let props = PropertySet::parahydrogen();
        let r = run_distribution(props, &cfg).unwrap();
        assert_eq!(r.snapshots.len(), 1);
        assert_eq!(r.snapshots[0].label, "06:15");
        assert!(r.conservation.mass < 1e-8, "{:?}", r.conservation);
        assert!(r.conservation.energy < 1e-6, "{:?}", r.conservation);
        assert!((r.delivered_mass - 2.0 * 6200.0).abs() < 10.0, "{}", r.delivered_mass);
    }
}
