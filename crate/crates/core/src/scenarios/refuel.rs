use serde::{Deserialize, Serialize};

use super::airport::{clock_label, outlet_subcooling, AirportConfig, Snapshot};
use super::record::{Summary, TimeSeries};
use crate::control::{
    pi_step, recycle_setpoint, FillEntry, FillStart, FirstOrderFilter, PiSpec, PiState, RecycleSchedule, Sequencer,
};
use crate::error::{Error, Result};
use crate::flownet::{
    Branch, BranchControl, ConservationCheck, Controls, Ledger, Network, Pipe, Sink, Suction, Tank, TankHeat, TankSpec,
};
use crate::props::PropertySet;

/// Aircraft LH₂ tank and its state when the fill starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AircraftTankConfig {
    /// m³
    pub volume: f64,
    pub ullage: f64,
    pub min_fill: f64,
    /// Pa
    pub mop: f64,
    /// W
    pub heat_watts: f64,
    pub initial_pressure: f64,
    pub initial_level: f64,
}

impl Default for AircraftTankConfig {
    fn default() -> Self {
        AircraftTankConfig {
            volume: 96.0,
            ullage: 0.03,
            min_fill: 0.05,
            mop: 1.7e5,
            heat_watts: 1300.0,
            initial_pressure: 1.2e5,
            initial_level: 0.05,
        }
    }
}

impl AircraftTankConfig {
    /// Regional-aircraft tank, about 600 kg.
    pub fn small() -> Self {
        AircraftTankConfig {
            volume: 9.3,
            heat_watts: 130.0,
            ..Self::default()
        }
    }

    pub fn spec(&self, name: &str) -> TankSpec {
        TankSpec {
            name: name.to_string(),
            volume: self.volume,
            ullage: self.ullage,
            min_fill: self.min_fill,
            mop: self.mop,
            heat: TankHeat::Fixed { watts: self.heat_watts },
            static_head: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.spec("aircraft").validate()?;
        if !(self.initial_pressure > 0.0 && self.initial_pressure <= self.mop) {
            return Err(Error::config("aircraft.initial_pressure", "must be positive and not above mop"));
        }
        if !(self.min_fill..1.0 - self.ullage).contains(&self.initial_level) {
            return Err(Error::config("aircraft.initial_level", "must lie between min_fill and 1 - ullage"));
        }
        Ok(())
    }

    pub fn build(&self, props: &PropertySet, name: &str) -> Result<Tank> {
        Tank::saturated(props, self.spec(name), self.initial_pressure, self.initial_level)
    }
}

/// Short-term model of one refuelling sequence started from a long-term snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefuelCaseConfig {
    pub airport: AirportConfig,
    pub recycle: RecycleSchedule,
    pub aircraft: AircraftTankConfig,
    pub aircraft_count: usize,
    /// kg per aircraft and kg/s per fill.
    pub fill_mass: f64,
    pub fill_rate: f64,
    /// Explicit plan; default is aircraft 0 alone, then all others together.
    pub plan: Option<Vec<FillEntry>>,
    /// s
    pub dt: f64,
    pub fill_pi: PiSpec,
    /// Each fill setpoint ramps linearly from a tenth of the rate to the full
    /// rate over this time, s. The floor keeps the pump off its shut-off point.
    pub fill_ramp_seconds: f64,
    /// Flow transmitter lag, s.
    pub measurement_time_constant: f64,
    /// A fill stops when the level comes within this margin of the ullage limit.
    pub level_trip_margin: f64,
    /// Simulated time after the last fill ends, s.
    pub tail_seconds: f64,
    pub max_duration: f64,
}

impl Default for RefuelCaseConfig {
    fn default() -> Self {
        RefuelCaseConfig {
            airport: AirportConfig::default(),
            recycle: RecycleSchedule::default(),
            aircraft: AircraftTankConfig::default(),
            aircraft_count: 3,
            fill_mass: 6200.0,
            fill_rate: 20.0,
            plan: None,
            dt: 0.1,
            fill_pi: PiSpec::flow_loop(),
            fill_ramp_seconds: 60.0,
            measurement_time_constant: 1.0,
            level_trip_margin: 0.002,
            tail_seconds: 60.0,
            max_duration: 3600.0,
        }
    }
}

impl RefuelCaseConfig {
    /// Same sequence into 600 kg-class tanks.
    pub fn small_tanks() -> Self {
        RefuelCaseConfig {
            aircraft: AircraftTankConfig::small(),
            fill_mass: 600.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.airport.validate()?;
        self.recycle.validate()?;
        self.aircraft.validate()?;
        self.fill_pi.validate("fill_pi")?;
        if self.aircraft_count == 0 {
            return Err(Error::config("aircraft_count", "must be at least 1"));
        }
        for (k, v) in [
            ("fill_rate", self.fill_rate),
            ("dt", self.dt),
            ("max_duration", self.max_duration),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(k, "must be positive and finite"));
            }
        }
        for (k, v) in [
            ("fill_mass", self.fill_mass),
            ("fill_ramp_seconds", self.fill_ramp_seconds),
            ("measurement_time_constant", self.measurement_time_constant),
            ("level_trip_margin", self.level_trip_margin),
            ("tail_seconds", self.tail_seconds),
        ] {
            if !(v >= 0.0) {
                return Err(Error::config(k, "must not be negative"));
            }
        }
        Ok(())
    }

    pub fn fill_plan(&self) -> Vec<FillEntry> {
        if let Some(plan) = &self.plan {
            return plan.clone();
        }
        (0..self.aircraft_count)
            .map(|i| FillEntry {
                aircraft: i,
                start: if i == 0 { FillStart::At(0.0) } else { FillStart::After(0) },
                target_mass: self.fill_mass,
                max_rate: self.fill_rate,
            })
            .collect()
    }

    pub fn build(&self, props: &PropertySet, snap: &Snapshot) -> Result<Network> {
        self.validate()?;
        let a = &self.airport;
        let supply = snap.supply.restore(props, a.supply.clone())?;
        let header = snap.header.restore(props, a.header.clone())?;
        let n = header.cells() - 1;
        let hose_profile = |v: f64| vec![v; a.hose.cells];
        let mut branches = Vec::with_capacity(self.aircraft_count + 1);
        for i in 0..self.aircraft_count {
            let hose = Pipe::from_profiles(
                props,
                a.hose.clone(),
                &hose_profile(header.enthalpy()[n]),
                &hose_profile(header.wall_temperature()[n]),
                &hose_profile(header.pressure()[n]),
            )?;
            branches.push(Branch {
                name: format!("aircraft{}", i + 1),
                upstream: Vec::new(),
                valve: a.aircraft_valve()?,
                downstream: vec![hose],
                sink: Sink::Tank(Box::new(self.aircraft.build(props, &format!("aircraft{}", i + 1))?)),
            });
        }
        branches.push(Branch {
            name: "recycle".into(),
            upstream: vec![snap.recycle.restore(props, a.recycle.clone())?],
            valve: a.recycle_valve()?,
            downstream: Vec::new(),
            sink: Sink::FarmReturn,
        });
        Ok(Network {
            suction: Suction::Farm,
            farm_feed: a.farm_feed(props)?,
            farm: Some(snap.farm(props, a.farm.clone())?),
            pump: a.pump,
            ideal_pump: false,
            trunk: vec![supply, header],
            branches,
            ledger: Ledger::default(),
            time: 0.0,
        })
    }
}

/// Outcome for one aircraft.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AircraftTotals {
    pub vented: f64,
    pub transferred: f64,
    pub peak_pressure: f64,
    pub final_level: f64,
    /// Fill ended on the high-level trip rather than the target mass.
    pub level_tripped: bool,
    pub fill_time: f64,
}

impl AircraftTotals {
    /// Vented mass as a fraction of the transferred mass.
    pub fn relative_vent(&self) -> f64 {
        if self.transferred > 0.0 {
            self.vented / self.transferred
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefuelResult {
    pub label: String,
    pub series: TimeSeries,
    pub aircraft: Vec<AircraftTotals>,
    pub supply_max_quality: f64,
    /// Lowest total aircraft flow while two or more fills ran together at
    /// their full setpoints, kg/s.
    pub min_parallel_flow: Option<f64>,
    /// Vapour in the supply line while parallel fills ran below their rate.
    pub flow_dip: bool,
    /// Every running fill valve was fully open at some point of the parallel phase.
    pub parallel_valves_saturated: bool,
    pub completed: bool,
    pub duration: f64,
    pub conservation: ConservationCheck,
}

impl RefuelResult {
    pub fn total_vented(&self) -> f64 {
        self.aircraft.iter().map(|a| a.vented).sum()
    }

    pub fn peak_pressure(&self) -> f64 {
        self.aircraft.iter().map(|a| a.peak_pressure).fold(0.0, f64::max)
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        s.text("snapshot", self.label.clone());
        for (i, a) in self.aircraft.iter().enumerate() {
            let k = i + 1;
            s.num(&format!("aircraft{k}_vented_kg"), a.vented)
                .num(&format!("aircraft{k}_transferred_kg"), a.transferred)
                .num(&format!("aircraft{k}_relative_vent"), a.relative_vent())
                .num(&format!("aircraft{k}_peak_pressure_Pa"), a.peak_pressure)
                .num(&format!("aircraft{k}_final_level"), a.final_level)
                .num(&format!("aircraft{k}_fill_time_s"), a.fill_time)
                .flag(&format!("aircraft{k}_level_tripped"), a.level_tripped);
        }
        s.num("supply_max_quality", self.supply_max_quality)
            .num("min_parallel_flow_kg_s", self.min_parallel_flow.unwrap_or(f64::NAN))
            .flag("flow_dip", self.flow_dip)
            .flag("parallel_valves_saturated", self.parallel_valves_saturated)
            .flag("completed", self.completed)
            .num("duration_s", self.duration)
            .num("mass_residual", self.conservation.mass)
            .num("energy_residual", self.conservation.energy);
        s
    }
}

pub fn refuel_columns(aircraft: usize) -> Vec<String> {
    let mut c: Vec<String> = [
        "time_s",
        "pump_flow_kg_s",
        "aircraft_flow_kg_s",
        "recycle_flow_kg_s",
        "header_pressure_Pa",
        "supply_outlet_subcooling_K",
        "supply_max_quality",
        "farm_pressure_Pa",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for i in 1..=aircraft {
        for q in ["level", "pressure_Pa", "inflow_kg_s", "vented_kg", "opening"] {
            c.push(format!("aircraft{i}_{q}"));
        }
    }
    c
}

/// Runs the fill sequence from `snap` with PI flow loops on the fill valves and
/// a high-level trip on each aircraft tank.
pub fn run_refuel(props: &PropertySet, config: &RefuelCaseConfig, snap: &Snapshot) -> Result<RefuelResult> {
    let mut net = config.build(props, snap)?;
    let n = config.aircraft_count;
    let plan = config.fill_plan();
    let targets: Vec<f64> = plan.iter().map(|e| e.target_mass).collect();
    let mut seq = Sequencer::new(plan, n)?;
    let m0 = net.stored_mass();
    let e0 = net.stored_energy();
    let ledger0 = net.ledger.clone();
    let dt = config.dt;
    let trip_level = config.aircraft.spec("aircraft").max_level() - config.level_trip_margin;

    let mut pi = vec![PiState::default(); n];
    let mut meas = vec![FirstOrderFilter::new(config.measurement_time_constant, 0.0); n];
    let mut tripped = vec![false; n];
    let mut vented = vec![0.0; n];
    let mut peak = vec![0.0f64; n];
    let mut series = TimeSeries::new(refuel_columns(n));
    let mut supply_q = 0.0f64;
    let mut min_parallel: Option<f64> = None;
    let mut flow_dip = false;
    let mut saturated = false;
    let mut end_time: Option<f64> = None;
    let mut completed = false;

    let tank = |net: &Network, i: usize| -> (f64, f64) {
        match &net.branches[i].sink {
            Sink::Tank(t) => (t.level(), t.pressure()),
            _ => unreachable!("aircraft branches end in tanks"),
        }
    };
    // Level one step ahead at the last measured flow.
    let next_level = |net: &Network, i: usize, flow: f64| -> f64 {
        match &net.branches[i].sink {
            Sink::Tank(t) => t.level() + flow * dt / (t.flash().liquid_density * t.spec.volume),
            _ => unreachable!("aircraft branches end in tanks"),
        }
    };
    let mut last_flow = vec![0.0; n];
    for i in 0..n {
        peak[i] = tank(&net, i).1;
    }

    let steps = (config.max_duration / dt).ceil() as usize;
    for k in 0..steps {
        let t = k as f64 * dt;
        if end_time.is_none() && seq.all_finished() {
            end_time = Some(t + config.tail_seconds);
        }
        if let Some(end) = end_time {
            if t >= end - 1e-9 {
                completed = true;
                break;
            }
        }
        let mut sp = seq.setpoints(t, dt);
        let mut ramping = false;
        for i in 0..n {
            if sp[i] <= 0.0 {
                continue;
            }
            let Some(e) = seq.active_entry(i) else { continue };
            if next_level(&net, i, last_flow[i]) >= trip_level {
                seq.stop(e, t);
                tripped[i] = true;
                sp[i] = 0.0;
            } else if config.fill_ramp_seconds > 0.0 {
                let since = t + dt - seq.started_at(e).unwrap_or(t);
                let f = 0.1 + 0.9 * since / config.fill_ramp_seconds;
                if f < 1.0 {
                    sp[i] *= f;
                    ramping = true;
                }
            }
        }
        let mut commands = Vec::with_capacity(n + 1);
        for i in 0..n {
            if sp[i] > 0.0 {
                let (u, s) = pi_step(&config.fill_pi, &pi[i], sp[i], meas[i].value, dt);
                pi[i] = s;
                commands.push(BranchControl::Opening(u));
            } else {
                pi[i] = PiState::default();
                meas[i].value = 0.0;
                commands.push(BranchControl::Opening(0.0));
            }
        }
        let active = sp.iter().filter(|&&s| s > 0.0).count();
        let clock = snap.clock_seconds + t;
        commands.push(BranchControl::Flow(recycle_setpoint(&config.recycle, clock, active > 0)));

        let r = net.step(props, &Controls { pump_speed: 1.0, branches: commands }, dt)?;
        let h = &r.hydraulics;
        seq.record(&h.branch_flows[..n], t, dt);
        for i in 0..n {
            meas[i].update(h.branch_flows[i], dt);
            last_flow[i] = h.branch_flows[i];
            vented[i] += r.branch_vented[i];
        }

        let supply = &net.trunk[0];
        let q = supply.max_quality(props)?;
        supply_q = supply_q.max(q);
        let aircraft_flow: f64 = h.branch_flows[..n].iter().sum();
        if active >= 2 {
            let short = aircraft_flow < 0.99 * sp.iter().sum::<f64>();
            flow_dip |= short && q > 0.0;
            saturated |= (0..n).filter(|&i| sp[i] > 0.0).all(|i| h.valve_openings[i] >= 1.0);
            if !ramping {
                min_parallel = Some(min_parallel.map_or(aircraft_flow, |m: f64| m.min(aircraft_flow)));
            }
        }

        let farm = net.farm.as_ref().expect("farm");
        let mut row = vec![
            net.time,
            h.total_flow,
            aircraft_flow,
            h.branch_flows[n],
            h.header_pressure,
            outlet_subcooling(props, supply)?,
            q,
            farm.pressure(),
        ];
        for i in 0..n {
            let (level, p) = tank(&net, i);
            peak[i] = peak[i].max(p);
            row.extend([level, p, h.branch_flows[i], vented[i], h.valve_openings[i]]);
        }
        series.push(row);
    }
    if !completed && end_time.is_some_and(|e| e <= config.max_duration + 1e-9) {
        completed = true;
    }

    let aircraft = (0..n)
        .map(|i| {
            let entries: Vec<usize> = (0..targets.len()).filter(|&e| seq.plan()[e].aircraft == i).collect();
            let transferred = entries.iter().map(|&e| seq.transferred(e)).sum();
            let fill_time = entries
                .iter()
                .filter_map(|&e| Some(seq.finished_at(e)? - seq.started_at(e)?))
                .sum();
            AircraftTotals {
                vented: vented[i],
                transferred,
                peak_pressure: peak[i],
                final_level: tank(&net, i).0,
                level_tripped: tripped[i],
                fill_time,
            }
        })
        .collect();
    Ok(RefuelResult {
        label: clock_label(snap.clock_seconds),
        series,
        aircraft,
        supply_max_quality: supply_q,
        min_parallel_flow: min_parallel,
        flow_dip,
        parallel_valves_saturated: saturated,
        completed,
        duration: net.time,
        conservation: net.conservation(m0, e0, &ledger0),
    })
}

/// Vapour vented by a sealed, full aircraft tank held at MOP for `hours`.
pub fn overnight_bog(props: &PropertySet, tank: &AircraftTankConfig, hours: f64, dt: f64) -> Result<f64> {
    if !(hours >= 0.0 && dt > 0.0) {
        return Err(Error::config("overnight", "hours must be >= 0 and dt > 0"));
    }
    let spec = tank.spec("overnight");
    let level = spec.max_level();
    let mut t = Tank::saturated(props, spec, tank.mop, level)?;
    let steps = (hours * 3600.0 / dt).round() as usize;
    let mut vented = 0.0;
    for _ in 0..steps {
        vented += t.step(props, &[], 0.0, dt)?.vented_mass;
    }
    Ok(vented)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_plan_is_one_then_parallel() {
        let plan = RefuelCaseConfig::default().fill_plan();
        assert_eq!(plan.len(), 3);
        assert_eq!(plan[0].start, FillStart::At(0.0));
        assert_eq!(plan[1].start, FillStart::After(0));
        assert_eq!(plan[2].start, FillStart::After(0));
    }

    #[test]
    fn overnight_vent_is_heat_over_latent_heat() {
        let props = PropertySet::parahydrogen();
        let tank = AircraftTankConfig::default();
        let vented = overnight_bog(props, &tank, 8.0, 60.0).unwrap();
        let q = tank.heat_watts * 8.0 * 3600.0;
        let ts = props.saturation_temperature(tank.mop).unwrap();
        let ratio = props.saturated_vapor_density(ts).unwrap() / props.saturated_liquid_density(ts).unwrap();
        // At fixed p and V the evaporated mass is Q/h_fg; part of it stays
        // behind to fill the volume the liquid gave up.
        let oracle = q / props.latent_heat(tank.mop).unwrap() * (1.0 - ratio);
        assert!((vented - oracle).abs() < 0.01 * oracle, "{vented} vs {oracle}");
    }

    #[test]
    fn invalid_tank_rejected() {
        let cfg = RefuelCaseConfig {
            aircraft: AircraftTankConfig { initial_level: 0.99, ..Default::default() },
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
