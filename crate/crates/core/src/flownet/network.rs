use super::pipe::Pipe;
use super::pump::{PumpEnergy, PumpSpec};
use super::tank::Tank;
use super::valve::ValveSpec;
use crate::error::{Error, Result};
use crate::numeric::brent;
use crate::props::{FluidState, PropertySet, GRAVITY};

/// Where a branch discharges.
#[derive(Debug, Clone, PartialEq)]
pub enum Sink {
    /// Fixed-pressure boundary; fluid leaves the network.
    Boundary { pressure: f64 },
    /// Back into the fuel-farm tank.
    FarmReturn,
    /// A receiving tank owned by the branch.
    Tank(Box<Tank>),
}

/// Pipes, a control valve and a sink hanging off the pump header.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub name: String,
    /// Pipes between the header and the valve.
    pub upstream: Vec<Pipe>,
    pub valve: ValveSpec,
    /// Pipes between the valve and the sink.
    pub downstream: Vec<Pipe>,
    pub sink: Sink,
}

/// What feeds the pump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Suction {
    /// Fixed state at the suction flange; fluid enters the network.
    Boundary { pressure: f64, enthalpy: f64 },
    /// Bottom outlet of the fuel-farm tank.
    Farm,
}

/// Valve command for one branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchControl {
    Opening(f64),
    /// Ideal flow controller: the valve takes whatever opening delivers the
    /// setpoint, limited to fully open.
    Flow(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Controls {
    pub pump_speed: f64,
    pub branches: Vec<BranchControl>,
}

/// Algebraic flow/pressure solution for one step.
#[derive(Debug, Clone, PartialEq)]
pub struct HydraulicSolution {
    pub total_flow: f64,
    pub suction: FluidState,
    pub pump_volume_flow: f64,
    pub pump_pressure_rise: f64,
    pub pump_outlet_pressure: f64,
    pub header_pressure: f64,
    pub branch_flows: Vec<f64>,
    pub valve_openings: Vec<f64>,
    pub valve_pressure_drops: Vec<f64>,
    /// True where a flow setpoint could not be met with the valve fully open.
    pub flow_limited: Vec<bool>,
}

/// Cumulative boundary exchanges, for conservation checks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Ledger {
    pub mass_in: f64,
    pub mass_out: f64,
    pub mass_vented: f64,
    pub pumped_mass: f64,
    pub heat: f64,
    pub shaft_work: f64,
    /// Work of the liquid column between the farm surface and the pump suction.
    pub gravity_work: f64,
    pub enthalpy_in: f64,
    pub enthalpy_out: f64,
    pub vented_enthalpy: f64,
    /// Σ |mdot·h|·dt through the pump; scale for the energy check.
    pub pumped_enthalpy: f64,
}

/// Relative conservation residuals since a reference point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservationCheck {
    pub mass: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub hydraulics: HydraulicSolution,
    pub pump: PumpEnergy,
    /// Vented mass per branch tank in this step, kg (zero for other sinks).
    pub branch_vented: Vec<f64>,
    pub farm_vented: f64,
    /// Heat leaked into all pipes this step, J.
    pub pipe_heat: f64,
}

/// Pump-fed network: suction, pump, trunk pipes in series to a header, and
/// parallel valve branches.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub suction: Suction,
    pub farm: Option<Tank>,
    /// External feed into the farm tank `(mdot, h)`.
    pub farm_feed: (f64, f64),
    pub pump: PumpSpec,
    /// Pump raises pressure without adding energy to the fluid.
    pub ideal_pump: bool,
    /// Pipes between the pump and the header, in flow order.
    pub trunk: Vec<Pipe>,
    pub branches: Vec<Branch>,
    pub ledger: Ledger,
    pub time: f64,
}

/// Sentinel for infeasible trial flows inside root searches.
const INFEASIBLE: f64 = -1.0e12;

impl Network {
    pub fn stored_mass(&self) -> f64 {
        let mut m = self.farm.as_ref().map_or(0.0, Tank::mass);
        m += self.trunk.iter().map(Pipe::total_mass).sum::<f64>();
        for b in &self.branches {
            m += b.upstream.iter().chain(&b.downstream).map(Pipe::total_mass).sum::<f64>();
            if let Sink::Tank(t) = &b.sink {
                m += t.mass();
            }
        }
        m
    }

    pub fn stored_energy(&self) -> f64 {
        let mut e = self.farm.as_ref().map_or(0.0, Tank::energy);
        e += self.trunk.iter().map(Pipe::stored_energy).sum::<f64>();
        for b in &self.branches {
            e += b.upstream.iter().chain(&b.downstream).map(Pipe::stored_energy).sum::<f64>();
            if let Sink::Tank(t) = &b.sink {
                e += t.energy();
            }
        }
        e
    }

    /// Mass and energy residuals relative to throughput, against stored totals
    /// and a ledger captured earlier.
    pub fn conservation(&self, mass0: f64, energy0: f64, ledger0: &Ledger) -> ConservationCheck {
        let l = &self.ledger;
        let d = |a: f64, b: f64| a - b;
        let m_in = d(l.mass_in, ledger0.mass_in);
        let m_out = d(l.mass_out, ledger0.mass_out) + d(l.mass_vented, ledger0.mass_vented);
        let pumped = d(l.pumped_mass, ledger0.pumped_mass);
        let mass_res = (self.stored_mass() - mass0) - (m_in - m_out);
        let mass_scale = (m_in + m_out + pumped).max(f64::MIN_POSITIVE);

        let sources = d(l.heat, ledger0.heat)
            + d(l.shaft_work, ledger0.shaft_work)
            + d(l.gravity_work, ledger0.gravity_work)
            + d(l.enthalpy_in, ledger0.enthalpy_in)
            - d(l.enthalpy_out, ledger0.enthalpy_out)
            - d(l.vented_enthalpy, ledger0.vented_enthalpy);
        let energy_res = (self.stored_energy() - energy0) - sources;
        let energy_scale = (d(l.pumped_enthalpy, ledger0.pumped_enthalpy)
            + d(l.enthalpy_in, ledger0.enthalpy_in).abs()
            + d(l.enthalpy_out, ledger0.enthalpy_out).abs()
            + d(l.heat, ledger0.heat).abs())
        .max(f64::MIN_POSITIVE);
        ConservationCheck {
            mass: mass_res.abs() / mass_scale,
            energy: energy_res.abs() / energy_scale,
        }
    }

    fn suction_state(&self, props: &PropertySet) -> Result<FluidState> {
        let state = match self.suction {
            Suction::Boundary { pressure, enthalpy } => props.state_ph(pressure, enthalpy)?,
            Suction::Farm => self
                .farm
                .as_ref()
                .ok_or_else(|| Error::Invalid("farm suction without a farm tank".into()))?
                .suction_state(props)?,
        };
        if state.quality > 0.0 {
            return Err(Error::PumpCavitation { quality: state.quality });
        }
        Ok(state)
    }

    fn sink_pressure(&self, sink: &Sink) -> f64 {
        match sink {
            Sink::Boundary { pressure } => *pressure,
            Sink::FarmReturn => self.farm.as_ref().map_or(f64::NAN, Tank::pressure),
            Sink::Tank(t) => t.pressure(),
        }
    }

    /// Pump outlet and header pressure at total flow `m`.
    fn header_pressure(&self, props: &PropertySet, suction: &FluidState, pump: &PumpSpec, m: f64) -> Result<(f64, f64)> {
        let p_out = suction.pressure + pump.pressure_rise(m / suction.density);
        let mut p_h = p_out;
        for t in &self.trunk {
            p_h = t.pressure_profile(props, p_h, m)?.outlet_pressure;
        }
        Ok((p_out, p_h))
    }

    fn header_enthalpy(&self, suction: &FluidState) -> f64 {
        match self.trunk.last() {
            Some(t) => t.outlet_enthalpy(),
            None => suction.enthalpy,
        }
    }

    /// Solves the pump/pipe/valve loop for the given commands.
    pub fn solve(&self, props: &PropertySet, controls: &Controls) -> Result<HydraulicSolution> {
        if controls.branches.len() != self.branches.len() {
            return Err(Error::Invalid(format!(
                "{} branch commands for {} branches",
                controls.branches.len(),
                self.branches.len()
            )));
        }
        let suction = self.suction_state(props)?;
        let pump = self.pump.with_speed(controls.pump_speed);
        let h_header = self.header_enthalpy(&suction);
        let m_max = suction.density * pump.max_flow() * (1.0 - 1e-9);

        let flows_at = |p_h: f64| -> Result<Vec<BranchFlow>> {
            self.branches
                .iter()
                .zip(&controls.branches)
                .map(|(b, c)| branch_flow(props, b, *c, p_h, h_header, self.sink_pressure(&b.sink)))
                .collect()
        };
        let g = |m: f64| match self
            .header_pressure(props, &suction, &pump, m)
            .and_then(|(_, p_h)| flows_at(p_h))
        {
            Ok(f) => f.iter().map(|b| b.flow).sum::<f64>() - m,
            Err(_) => -m - 1.0,
        };
        let g0 = {
            let (_, p_h) = self.header_pressure(props, &suction, &pump, 0.0)?;
            flows_at(p_h)?.iter().map(|b| b.flow).sum::<f64>()
        };
        let m = if g0 <= 0.0 {
            0.0
        } else {
            brent(g, 0.0, m_max, 1e-10, 200).ok_or_else(|| {
                Error::NoFlowSolution(format!(
                    "total flow not bracketed in [0, {m_max:.3}] kg/s (shut-off branch sum {g0:.3} kg/s)"
                ))
            })?
        };
        let (p_out, p_h) = self.header_pressure(props, &suction, &pump, m)?;
        let flows = flows_at(p_h)?;
        let total: f64 = flows.iter().map(|b| b.flow).sum();
        Ok(HydraulicSolution {
            total_flow: total,
            pump_volume_flow: total / suction.density,
            pump_pressure_rise: pump.pressure_rise(total / suction.density),
            pump_outlet_pressure: p_out,
            header_pressure: p_h,
            branch_flows: flows.iter().map(|b| b.flow).collect(),
            valve_openings: flows.iter().map(|b| b.opening).collect(),
            valve_pressure_drops: flows.iter().map(|b| b.valve_dp).collect(),
            flow_limited: flows.iter().map(|b| b.limited).collect(),
            suction,
        })
    }

    /// Solves the flows, then advances every storage state by `dt`.
    pub fn step(&mut self, props: &PropertySet, controls: &Controls, dt: f64) -> Result<StepReport> {
        if !(dt > 0.0) {
            return Err(Error::Invalid(format!("time step must be positive, got {dt}")));
        }
        let sol = self.solve(props, controls)?;
        let pump = self.pump.with_speed(controls.pump_speed);
        let m = sol.total_flow;
        let energy = if self.ideal_pump {
            PumpEnergy { shaft_power: 0.0, loss_power: 0.0, enthalpy_rise: 0.0, efficiency: 1.0 }
        } else {
            pump.energy(sol.pump_volume_flow, sol.pump_pressure_rise, sol.suction.density)?
        };
        let h_pump = sol.suction.enthalpy + energy.enthalpy_rise;
        let mut pipe_heat = 0.0;

        // Pressures seen by the energy update come from this step's solution.
        let mut p = sol.pump_outlet_pressure;
        for trunk in self.trunk.iter_mut() {
            let prof = trunk.pressure_profile(props, p, m)?;
            trunk.set_pressures(&prof.cells);
            p = prof.outlet_pressure;
        }
        let sink_pressures: Vec<f64> = self.branches.iter().map(|b| self.sink_pressure(&b.sink)).collect();
        for (i, b) in self.branches.iter_mut().enumerate() {
            let mb = sol.branch_flows[i];
            let mut p = sol.header_pressure;
            for pipe in b.upstream.iter_mut() {
                let prof = pipe.pressure_profile(props, p, mb)?;
                pipe.set_pressures(&prof.cells);
                p = prof.outlet_pressure;
            }
            if mb > 0.0 {
                let mut p = downstream_inlet_pressure(props, &b.downstream, sink_pressures[i], mb)?;
                for pipe in b.downstream.iter_mut() {
                    let prof = pipe.pressure_profile(props, p, mb)?;
                    pipe.set_pressures(&prof.cells);
                    p = prof.outlet_pressure;
                }
            } else {
                for pipe in b.downstream.iter_mut() {
                    pipe.set_uniform_pressure(sink_pressures[i]);
                }
            }
        }

        let mut h_header = h_pump;
        for trunk in self.trunk.iter_mut() {
            let r = trunk.step(props, dt, m, h_header)?;
            pipe_heat += r.heat_in;
            h_header = r.outlet_enthalpy;
        }

        let mut farm_inflows = vec![self.farm_feed];
        let mut branch_vented = vec![0.0; self.branches.len()];
        let mut vented_mass = 0.0;
        let mut vented_enthalpy = 0.0;
        let mut tank_heat = 0.0;
        let mut mass_out = 0.0;
        let mut enthalpy_out = 0.0;
        for (i, b) in self.branches.iter_mut().enumerate() {
            let mb = sol.branch_flows[i];
            let mut h = h_header;
            for pipe in b.upstream.iter_mut().chain(b.downstream.iter_mut()) {
                let r = pipe.step(props, dt, mb, h)?;
                pipe_heat += r.heat_in;
                h = r.outlet_enthalpy;
            }
            match &mut b.sink {
                Sink::Boundary { .. } => {
                    mass_out += mb * dt;
                    enthalpy_out += mb * dt * h;
                }
                Sink::FarmReturn => farm_inflows.push((mb, h)),
                Sink::Tank(tank) => {
                    let r = tank.step(props, &[(mb, h)], 0.0, dt)?;
                    branch_vented[i] = r.vented_mass;
                    vented_mass += r.vented_mass;
                    vented_enthalpy += r.vented_enthalpy;
                    tank_heat += r.heat_in;
                }
            }
        }

        let mut farm_vented = 0.0;
        let mut mass_in = 0.0;
        let mut enthalpy_in = 0.0;
        let mut gravity = 0.0;
        match self.suction {
            Suction::Farm => {
                let farm = self.farm.as_mut().expect("farm suction checked in solve");
                gravity = m * dt * GRAVITY * farm.spec.static_head;
                let r = farm.step(props, &farm_inflows, m, dt)?;
                farm_vented = r.vented_mass;
                vented_mass += r.vented_mass;
                vented_enthalpy += r.vented_enthalpy;
                tank_heat += r.heat_in;
            }
            Suction::Boundary { .. } => {
                mass_in += m * dt;
                enthalpy_in += m * dt * sol.suction.enthalpy;
                if let Some(farm) = self.farm.as_mut() {
                    let r = farm.step(props, &farm_inflows, 0.0, dt)?;
                    farm_vented = r.vented_mass;
                    vented_mass += r.vented_mass;
                    vented_enthalpy += r.vented_enthalpy;
                    tank_heat += r.heat_in;
                }
            }
        }
        if self.farm.is_some() {
            mass_in += self.farm_feed.0 * dt;
            enthalpy_in += self.farm_feed.0 * dt * self.farm_feed.1;
        }

        let l = &mut self.ledger;
        l.mass_in += mass_in;
        l.mass_out += mass_out;
        l.mass_vented += vented_mass;
        l.pumped_mass += m * dt;
        l.heat += pipe_heat + tank_heat;
        l.shaft_work += energy.shaft_power * dt;
        l.gravity_work += gravity;
        l.enthalpy_in += enthalpy_in;
        l.enthalpy_out += enthalpy_out;
        l.vented_enthalpy += vented_enthalpy;
        l.pumped_enthalpy += (m * dt * h_pump).abs();
        self.time += dt;

        Ok(StepReport {
            hydraulics: sol,
            pump: energy,
            branch_vented,
            farm_vented,
            pipe_heat,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct BranchFlow {
    flow: f64,
    opening: f64,
    valve_dp: f64,
    limited: bool,
}

fn march(props: &PropertySet, pipes: &[Pipe], p_in: f64, m: f64) -> Result<(f64, f64)> {
    let mut p = p_in;
    let mut h = f64::NAN;
    for pipe in pipes {
        p = pipe.pressure_profile(props, p, m)?.outlet_pressure;
        h = pipe.outlet_enthalpy();
    }
    Ok((p, h))
}

/// Inlet pressure of the downstream pipes that lands at `p_sink` for flow `m`.
fn downstream_inlet_pressure(props: &PropertySet, pipes: &[Pipe], p_sink: f64, m: f64) -> Result<f64> {
    if pipes.is_empty() || m <= 0.0 {
        return Ok(p_sink);
    }
    let mut p_in = p_sink;
    for _ in 0..3 {
        let drop = p_in - march(props, pipes, p_in, m)?.0;
        p_in = p_sink + drop;
    }
    Ok(p_in)
}

/// Pressure drop the valve must take at flow `m`, and the fluid density at its inlet.
fn valve_budget(props: &PropertySet, b: &Branch, p_h: f64, h_header: f64, p_sink: f64, m: f64) -> Result<(f64, f64)> {
    let (p_up, h_up) = march(props, &b.upstream, p_h, m)?;
    let h_up = if b.upstream.is_empty() { h_header } else { h_up };
    let rho = props.state_ph(p_up, h_up)?.density;
    let p_dn = downstream_inlet_pressure(props, &b.downstream, p_sink, m)?;
    Ok((p_up - p_dn, rho))
}

fn branch_flow(
    props: &PropertySet,
    b: &Branch,
    control: BranchControl,
    p_h: f64,
    h_header: f64,
    p_sink: f64,
) -> Result<BranchFlow> {
    let closed = BranchFlow { flow: 0.0, opening: 0.0, valve_dp: (p_h - p_sink).max(0.0), limited: false };
    let opening = match control {
        BranchControl::Opening(u) => u.clamp(0.0, 1.0),
        BranchControl::Flow(sp) => {
            if sp <= 0.0 {
                return Ok(closed);
            }
            let (dp, rho) = match valve_budget(props, b, p_h, h_header, p_sink, sp) {
                Ok(v) => v,
                Err(_) => (-1.0, 1.0),
            };
            if dp > 0.0 {
                let u = b.valve.opening_for(sp, dp, rho);
                if u <= 1.0 {
                    return Ok(BranchFlow { flow: sp, opening: u, valve_dp: dp, limited: false });
                }
            }
            1.0
        }
    };
    if opening <= 0.0 || p_h <= p_sink {
        return Ok(BranchFlow { limited: matches!(control, BranchControl::Flow(_)), ..closed });
    }
    let (_, rho0) = valve_budget(props, b, p_h, h_header, p_sink, 0.0)?;
    let m_hi = b.valve.flow(opening, p_h, p_sink, rho0) * 1.5;
    let resid = |m: f64| match valve_budget(props, b, p_h, h_header, p_sink, m) {
        Ok((dp, rho)) => dp - b.valve.pressure_drop(opening, m, rho),
        Err(_) => INFEASIBLE,
    };
    let flow = brent(resid, 0.0, m_hi, 1e-10, 200).ok_or_else(|| {
        Error::NoFlowSolution(format!(
            "branch '{}' at header {p_h:.0} Pa, sink {p_sink:.0} Pa, opening {opening:.3}",
            b.name
        ))
    })?;
    let (dp, _) = valve_budget(props, b, p_h, h_header, p_sink, flow)?;
    Ok(BranchFlow {
        flow,
        opening,
        valve_dp: dp,
        limited: matches!(control, BranchControl::Flow(_)),
    })
}
