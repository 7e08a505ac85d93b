use serde::{Deserialize, Serialize};

use super::record::{Summary, TimeSeries};
use crate::control::split_range;
use crate::error::{Error, Result};
use crate::flownet::{
    Branch, BranchControl, ConductivityModel, ConservationCheck, Controls, HeatIngress, Ledger, Network, Pipe,
    PipeSegment, PumpSpec, Sink, Suction, ValveSpec,
};
use crate::props::PropertySet;

/// Tonnes per day to kg/s.
pub fn tpd_to_kg_per_s(tpd: f64) -> f64 {
    tpd * 1000.0 / 86_400.0
}

/// Liquefier-to-fuel-farm pipeline case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransportConfig {
    /// m; zero means pump and valve only.
    pub length: f64,
    /// Inner diameter, m.
    pub diameter: f64,
    /// Insulation thickness, m.
    pub insulation_thickness: f64,
    /// K
    pub ambient_temperature: f64,
    pub conductivity: ConductivityModel,
    /// Replaces the radial insulation model with a fixed W/m.
    pub fixed_heat_ingress: Option<f64>,
    /// kg/m; by default taken from the diameter.
    pub wall_mass_per_meter: Option<f64>,
    pub wall_specific_heat: f64,
    pub pump: PumpSpec,
    /// Pump adds pressure but no energy to the liquid.
    pub ideal_pump: bool,
    /// Liquefier outlet, Pa and K.
    pub source_pressure: f64,
    pub source_temperature: f64,
    /// Fuel-farm tank pressure, Pa.
    pub delivery_pressure: f64,
    /// Liquefier production, tonnes per day.
    pub throughput_tpd: f64,
    /// Throttle valve sizing point: kg/s at a pressure drop in Pa.
    pub valve_rated_flow: f64,
    pub valve_rated_pressure_drop: f64,
    pub cells: usize,
    /// s
    pub dt: f64,
    /// Steady once every fluid and wall temperature moves slower than this, K/s.
    pub steady_tolerance: f64,
    /// Give up after this much simulated time, s.
    pub max_time: f64,
}

impl Default for TransportConfig {
    fn default() -> Self {
        TransportConfig {
            length: 4000.0,
            diameter: 0.22,
            insulation_thickness: 0.05,
            ambient_temperature: 278.0,
            conductivity: ConductivityModel::default(),
            fixed_heat_ingress: None,
            wall_mass_per_meter: None,
            wall_specific_heat: crate::flownet::WALL_SPECIFIC_HEAT,
            pump: PumpSpec::new(0.6e5, 0.09, 0.7).expect("valid default pump"),
            ideal_pump: false,
            source_pressure: 1.1e5,
            source_temperature: 19.5,
            delivery_pressure: 1.1e5,
            throughput_tpd: 330.0,
            valve_rated_flow: 3.82,
            valve_rated_pressure_drop: 0.05e5,
            cells: 50,
            dt: 120.0,
            steady_tolerance: 1e-5,
            max_time: 2.0e6,
        }
    }
}

/// Pipe diameters of the two transport cases, m.
pub const DIAMETER_6IN: f64 = 0.16;
pub const DIAMETER_8IN: f64 = 0.22;

impl TransportConfig {
    /// 4 km line with the pump sized for the given diameter.
    pub fn four_km(diameter: f64) -> Self {
        let dp0 = if diameter < 0.19 { 1.35e5 } else { 0.6e5 };
        TransportConfig {
            diameter,
            pump: PumpSpec::new(dp0, 0.09, 0.7).expect("valid pump"),
            ..Self::default()
        }
    }

    /// 25 km, 8" line.
    pub fn twenty_five_km() -> Self {
        TransportConfig {
            length: 25_000.0,
            diameter: DIAMETER_8IN,
            insulation_thickness: 0.12,
            ambient_temperature: 298.0,
            pump: PumpSpec::new(1.35e5, 0.11, 0.6).expect("valid pump"),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("diameter", self.diameter),
            ("insulation_thickness", self.insulation_thickness),
            ("ambient_temperature", self.ambient_temperature),
            ("wall_specific_heat", self.wall_specific_heat),
            ("source_pressure", self.source_pressure),
            ("source_temperature", self.source_temperature),
            ("delivery_pressure", self.delivery_pressure),
            ("throughput_tpd", self.throughput_tpd),
            ("valve_rated_flow", self.valve_rated_flow),
            ("valve_rated_pressure_drop", self.valve_rated_pressure_drop),
            ("dt", self.dt),
            ("steady_tolerance", self.steady_tolerance),
            ("max_time", self.max_time),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(k, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.length >= 0.0) {
            return Err(Error::config("length", "must not be negative"));
        }
        if self.cells == 0 {
            return Err(Error::config("cells", "must be at least 1"));
        }
        if let Some(w) = self.fixed_heat_ingress {
            if !(w >= 0.0) {
                return Err(Error::config("fixed_heat_ingress", "must not be negative"));
            }
        }
        self.conductivity.validate()?;
        self.pump.validate()?;
        Ok(())
    }

    pub fn mass_flow(&self) -> f64 {
        tpd_to_kg_per_s(self.throughput_tpd)
    }

    fn segment(&self) -> PipeSegment {
        let ingress = match self.fixed_heat_ingress {
            Some(w) => HeatIngress::Fixed { watts_per_meter: w },
            None => HeatIngress::Radial {
                thickness: self.insulation_thickness,
                conductivity: self.conductivity,
                ambient_temperature: self.ambient_temperature,
            },
        };
        let mut seg = PipeSegment::new(self.length, self.diameter, self.cells, ingress);
        if let Some(m) = self.wall_mass_per_meter {
            seg.wall_mass_per_meter = m;
        }
        seg.wall_specific_heat = self.wall_specific_heat;
        seg
    }

    /// Network at its initial state: pipe full of source-temperature liquid.
    pub fn build(&self, props: &PropertySet) -> Result<Network> {
        self.validate()?;
        let h_src = props.liquid_enthalpy(self.source_temperature, self.source_pressure)?;
        let rho = props.liquid_density(self.source_temperature, self.source_pressure)?;
        let upstream = if self.length > 0.0 {
            let seg = self.segment();
            seg.validate("pipe")?;
            vec![Pipe::new(props, seg, self.source_temperature, self.source_pressure)?]
        } else {
            Vec::new()
        };
        Ok(Network {
            suction: Suction::Boundary { pressure: self.source_pressure, enthalpy: h_src },
            farm: None,
            farm_feed: (0.0, 0.0),
            pump: self.pump,
            ideal_pump: self.ideal_pump,
            trunk: Vec::new(),
            branches: vec![Branch {
                name: "transport".into(),
                upstream,
                valve: ValveSpec::rated(self.valve_rated_flow, self.valve_rated_pressure_drop, rho)?,
                downstream: Vec::new(),
                sink: Sink::Boundary { pressure: self.delivery_pressure },
            }],
            ledger: Ledger::default(),
            time: 0.0,
        })
    }
}

/// Steady-state result of a transport run.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult {
    /// T_sat − T at the delivery pressure, K. Inside the dome the deficit is
    /// expressed as the equivalent negative temperature, -x·h_fg/c_p.
    pub subcooling: f64,
    /// Mean heat ingress along the pipe, W/m (zero without a pipe).
    pub heat_ingress_per_meter: f64,
    pub pump_shaft_power: f64,
    pub pump_loss_power: f64,
    pub pump_efficiency: f64,
    pub valve_pressure_drop: f64,
    pub valve_opening: f64,
    pub pipe_pressure_drop: f64,
    pub pump_outlet_pressure: f64,
    /// Delivered mass flow, kg/s.
    pub mass_flow: f64,
    /// Throughput could not be reached with the valve fully open.
    pub flow_limited: bool,
    /// Vapour in any pipe cell or at delivery.
    pub two_phase: bool,
    pub max_quality: f64,
    pub delivery_temperature: f64,
    pub steps: usize,
    pub converged: bool,
    pub simulated_time: f64,
    pub conservation: ConservationCheck,
    /// time, outlet temperature, largest |dT/dt| per step.
    pub history: TimeSeries,
}

impl TransportResult {
    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        s.num("subcooling_K", self.subcooling)
            .num("heat_ingress_W_per_m", self.heat_ingress_per_meter)
            .num("pump_shaft_power_W", self.pump_shaft_power)
            .num("pump_loss_power_W", self.pump_loss_power)
            .num("pump_efficiency", self.pump_efficiency)
            .num("valve_pressure_drop_Pa", self.valve_pressure_drop)
            .num("valve_opening", self.valve_opening)
            .num("pipe_pressure_drop_Pa", self.pipe_pressure_drop)
            .num("pump_outlet_pressure_Pa", self.pump_outlet_pressure)
            .num("mass_flow_kg_per_s", self.mass_flow)
            .flag("flow_limited", self.flow_limited)
            .flag("two_phase", self.two_phase)
            .num("max_quality", self.max_quality)
            .num("delivery_temperature_K", self.delivery_temperature)
            .num("steps", self.steps as f64)
            .flag("converged", self.converged)
            .num("simulated_time_s", self.simulated_time)
            .num("mass_residual", self.conservation.mass)
            .num("energy_residual", self.conservation.energy);
        s
    }
}

/// Subcooling at pressure `p` for enthalpy `h`, continued into the dome as
/// a negative enthalpy-equivalent temperature.
pub fn subcooling_equivalent(props: &PropertySet, p: f64, h: f64) -> Result<f64> {
    let st = props.state_ph(p, h)?;
    if st.quality > 0.0 {
        let hl = props.saturated_liquid_enthalpy(st.saturation_temperature)?;
        let cp = props.liquid_cp(st.saturation_temperature)?;
        Ok(-(h - hl) / cp)
    } else {
        Ok(st.subcooling)
    }
}

fn temperatures(props: &PropertySet, net: &Network) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for pipe in &net.branches[0].upstream {
        for s in pipe.states(props)? {
            out.push(s.temperature);
        }
        out.extend_from_slice(pipe.wall_temperature());
    }
    Ok(out)
}

/// Integrates the transport line from a cold start until temperatures stop
/// changing, then reports the delivered state and the pump/valve duty.
pub fn run_transport(props: &PropertySet, config: &TransportConfig) -> Result<TransportResult> {
    let mut net = config.build(props)?;
    let controls = Controls {
        pump_speed: 1.0,
        branches: vec![BranchControl::Flow(config.mass_flow())],
    };
    let m0 = net.stored_mass();
    let e0 = net.stored_energy();
    let ledger0 = net.ledger.clone();
    let mut history = TimeSeries::new(["time_s", "outlet_temperature_K", "max_rate_K_per_s"]);
    let mut temps = temperatures(props, &net)?;
    let mut steps = 0usize;
    let mut converged = false;
    let mut last = None;
    while net.time < config.max_time {
        let report = net.step(props, &controls, config.dt)?;
        steps += 1;
        let now = temperatures(props, &net)?;
        let rate = now
            .iter()
            .zip(&temps)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / config.dt;
        temps = now;
        let outlet_t = match net.branches[0].upstream.last() {
            Some(p) => p.outlet_state(props)?.temperature,
            None => report.hydraulics.suction.temperature,
        };
        history.push(vec![net.time, outlet_t, rate]);
        last = Some(report);
        // A pump/valve-only line has no storage to settle.
        if rate < config.steady_tolerance || net.branches[0].upstream.is_empty() {
            converged = true;
            break;
        }
    }
    let report = last.ok_or_else(|| Error::Invalid("max_time shorter than one step".into()))?;
    let sol = &report.hydraulics;
    let branch = &net.branches[0];
    let h_out = match branch.upstream.last() {
        Some(p) => p.outlet_enthalpy(),
        None => sol.suction.enthalpy + report.pump.enthalpy_rise,
    };
    let subcooling = subcooling_equivalent(props, config.delivery_pressure, h_out)?;
    let delivered = props.state_ph(config.delivery_pressure, h_out)?;
    let mut max_quality = delivered.quality;
    for pipe in &branch.upstream {
        max_quality = max_quality.max(pipe.max_quality(props)?);
    }
    // The valve discharges straight into the delivery tank.
    let pipe_dp = sol.header_pressure - sol.valve_pressure_drops[0] - config.delivery_pressure;
    let q_ave = if config.length > 0.0 {
        report.pipe_heat / config.dt / config.length
    } else {
        0.0
    };
    Ok(TransportResult {
        subcooling,
        heat_ingress_per_meter: q_ave,
        pump_shaft_power: report.pump.shaft_power,
        pump_loss_power: report.pump.loss_power,
        pump_efficiency: report.pump.efficiency,
        valve_pressure_drop: sol.valve_pressure_drops[0],
        valve_opening: sol.valve_openings[0],
        pipe_pressure_drop: pipe_dp,
        pump_outlet_pressure: sol.pump_outlet_pressure,
        mass_flow: sol.total_flow,
        flow_limited: sol.flow_limited[0],
        two_phase: max_quality > 0.0,
        max_quality,
        delivery_temperature: delivered.temperature,
        steps,
        converged,
        simulated_time: net.time,
        conservation: net.conservation(m0, e0, &ledger0),
        history,
    })
}

/// Inputs varied in the transport uncertainty study, in order.
pub const UQ_PARAMETERS: [&str; 4] = [
    "ambient_temperature",
    "pump_efficiency",
    "pump_design_flow",
    "insulation_thickness",
];

/// Outputs of the uncertainty study, in order.
pub const UQ_OUTPUTS: [&str; 4] = [
    "subcooling_K",
    "heat_ingress_W_per_m",
    "pump_loss_power_W",
    "pump_shaft_power_W",
];

/// Applies one uncertainty sample (ordered as [`UQ_PARAMETERS`]) to a base case.
pub fn apply_uq_sample(base: &TransportConfig, x: &[f64]) -> Result<TransportConfig> {
    if x.len() != UQ_PARAMETERS.len() {
        return Err(Error::Invalid(format!("expected {} parameters, got {}", UQ_PARAMETERS.len(), x.len())));
    }
    let mut cfg = base.clone();
    cfg.ambient_temperature = x[0];
    cfg.pump.eta_max = x[1];
    cfg.pump.v0 = x[2];
    cfg.insulation_thickness = x[3];
    Ok(cfg)
}

/// Runs one uncertainty sample and returns the outputs ordered as [`UQ_OUTPUTS`].
pub fn transport_uq_outputs(props: &PropertySet, base: &TransportConfig, x: &[f64]) -> Result<(Vec<f64>, bool)> {
    let r = run_transport(props, &apply_uq_sample(base, x)?)?;
    Ok((
        vec![r.subcooling, r.heat_ingress_per_meter, r.pump_loss_power, r.pump_shaft_power],
        r.two_phase,
    ))
}

/// Insulation sweep settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub base: TransportConfig,
    /// Line lengths to scan, m.
    pub lengths: Vec<f64>,
    /// Thickness grid reported in the table, m.
    pub thicknesses: Vec<f64>,
    /// Search interval and resolution for the threshold, m.
    pub search_min: f64,
    pub search_max: f64,
    pub resolution: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            base: TransportConfig::twenty_five_km(),
            lengths: vec![4000.0, 25_000.0],
            thicknesses: (1..=20).map(|i| f64::from(i) * 0.01).collect(),
            search_min: 0.002,
            search_max: 0.4,
            resolution: 0.001,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.lengths.is_empty() || self.lengths.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::config("lengths", "need at least one positive length"));
        }
        if self.thicknesses.iter().any(|&t| !(t > 0.0)) {
            return Err(Error::config("thicknesses", "must be positive"));
        }
        if !(0.0 < self.search_min && self.search_min < self.search_max) {
            return Err(Error::config("search_min", "need 0 < search_min < search_max"));
        }
        if !(self.resolution > 0.0) {
            return Err(Error::config("resolution", "must be positive"));
        }
        Ok(())
    }
}

/// One sweep point. `subcooling` is NaN when the run failed on physics
/// (the line is then counted as two-phase).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub length: f64,
    pub thickness: f64,
    pub subcooling: f64,
    pub heat_ingress_per_meter: f64,
    pub two_phase: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    /// Smallest thickness with single-phase delivery per length; `None` when
    /// even the search maximum is two-phase.
    pub thresholds: Vec<(f64, Option<f64>)>,
}

impl SweepResult {
    pub fn table(&self) -> TimeSeries {
        let mut ts = TimeSeries::new(["length_m", "thickness_m", "subcooling_K", "heat_ingress_W_per_m", "two_phase"]);
        for p in &self.points {
            ts.push(vec![
                p.length,
                p.thickness,
                p.subcooling,
                p.heat_ingress_per_meter,
                if p.two_phase { 1.0 } else { 0.0 },
            ]);
        }
        ts
    }

    pub fn threshold(&self, length: f64) -> Option<f64> {
        self.thresholds.iter().find(|(l, _)| *l == length).and_then(|(_, t)| *t)
    }
}

fn sweep_point(props: &PropertySet, base: &TransportConfig, length: f64, thickness: f64) -> Result<SweepPoint> {
    let cfg = TransportConfig {
        length,
        insulation_thickness: thickness,
        ..base.clone()
    };
    match run_transport(props, &cfg) {
        Ok(r) => Ok(SweepPoint {
            length,
            thickness,
            subcooling: r.subcooling,
            heat_ingress_per_meter: r.heat_ingress_per_meter,
            two_phase: r.two_phase,
        }),
        Err(e) if e.is_physics() => Ok(SweepPoint {
            length,
            thickness,
            subcooling: f64::NAN,
            heat_ingress_per_meter: f64::NAN,
            two_phase: true,
        }),
        Err(e) => Err(e),
    }
}

/// Smallest insulation thickness giving single-phase delivery, by bisection.
pub fn threshold_thickness(props: &PropertySet, config: &SweepConfig, length: f64) -> Result<Option<f64>> {
    let ok = |t: f64| sweep_point(props, &config.base, length, t).map(|p| !p.two_phase);
    if !ok(config.search_max)? {
        return Ok(None);
    }
    if ok(config.search_min)? {
        return Ok(Some(config.search_min));
    }
    let (mut lo, mut hi) = (config.search_min, config.search_max);
    while hi - lo > config.resolution {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Scans the thickness grid for every length and locates each single/two-phase
/// boundary. Runs fan out over rayon's pool.
pub fn insulation_sweep(props: &PropertySet, config: &SweepConfig) -> Result<SweepResult> {
    use rayon::prelude::*;
    config.validate()?;
    let jobs: Vec<(f64, f64)> = config
        .lengths
        .iter()
        .flat_map(|&l| config.thicknesses.iter().map(move |&t| (l, t)))
        .collect();
    let points = jobs
        .par_iter()
        .map(|&(l, t)| sweep_point(props, &config.base, l, t))
        .collect::<Result<Vec<_>>>()?;
    let thresholds = config
        .lengths
        .par_iter()
        .map(|&l| threshold_thickness(props, config, l).map(|t| (l, t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { points, thresholds })
}

/// Flow delivered for split-range demands on the transport line: the lower
/// half opens the valve at minimum pump speed, the upper half raises speed.
pub fn split_range_response(
    props: &PropertySet,
    config: &TransportConfig,
    demands: &[f64],
    min_speed: f64,
) -> Result<Vec<f64>> {
    let net = config.build(props)?;
    demands
        .iter()
        .map(|&d| {
            let (u, s) = split_range(d, min_speed);
            let c = Controls { pump_speed: s, branches: vec![BranchControl::Opening(u)] };
            net.solve(props, &c).map(|sol| sol.total_flow)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn props() -> &'static PropertySet {
        PropertySet::parahydrogen()
    }

    #[test]
    fn zero_length_ideal_pump_keeps_source_subcooling() {
        let cfg = TransportConfig {
            length: 0.0,
            ideal_pump: true,
            ..TransportConfig::default()
        };
        let r = run_transport(props(), &cfg).unwrap();
        let expected = props().saturation_temperature(1.1e5).unwrap() - 19.5;
        assert!((r.subcooling - expected).abs() < 1e-6, "{} vs {expected}", r.subcooling);
        assert!((r.subcooling - 1.05).abs() < 0.01);
        assert!(!r.two_phase);
    }

    #[test]
    fn reference_case_is_subcooled_and_steady() {
        let r = run_transport(props(), &TransportConfig::default()).unwrap();
        assert!(r.converged);
        assert!(r.subcooling > 0.0 && !r.two_phase, "{r:?}");
        assert!(!r.flow_limited);
        assert!((r.mass_flow - tpd_to_kg_per_s(330.0)).abs() < 1e-9);
        assert!(r.conservation.mass < 1e-8, "{:?}", r.conservation);
        assert!(r.conservation.energy < 1e-6, "{:?}", r.conservation);
        // Radial model at 5 cm and 278 K: a few W/m.
        assert!(r.heat_ingress_per_meter > 1.0 && r.heat_ingress_per_meter < 5.0);
        assert!((r.pump_shaft_power - r.pump_loss_power) > 0.0);
    }

    #[test]
    fn long_thin_insulation_flags_two_phase() {
        let cfg = TransportConfig {
            insulation_thickness: 0.06,
            ..TransportConfig::twenty_five_km()
        };
        let r = run_transport(props(), &cfg).unwrap();
        assert!(r.two_phase);
        assert!(r.subcooling < 0.0);
    }

    #[test]
    fn split_range_flow_is_continuous_and_monotone() {
        let cfg = TransportConfig::default();
        let demands: Vec<f64> = (1..=40).map(|i| i as f64 / 40.0).collect();
        let flows = split_range_response(props(), &cfg, &demands, 0.3).unwrap();
        for w in flows.windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
            assert!(w[1] - w[0] < 1.0, "jump {w:?}");
        }
    }

    #[test]
    fn uq_sample_mapping() {
        let cfg = apply_uq_sample(&TransportConfig::default(), &[300.0, 0.55, 0.085, 0.03]).unwrap();
        assert_eq!(cfg.ambient_temperature, 300.0);
        assert_eq!(cfg.pump.eta_max, 0.55);
        assert_eq!(cfg.pump.v0, 0.085);
        assert_eq!(cfg.insulation_thickness, 0.03);
        assert!(apply_uq_sample(&TransportConfig::default(), &[1.0]).is_err());
    }
}
