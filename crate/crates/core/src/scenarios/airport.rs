use serde::{Deserialize, Serialize};

use super::transport::{subcooling_equivalent, tpd_to_kg_per_s};
use crate::error::{Error, Result};
use crate::flownet::{
    HeatIngress, Pipe, PipeSegment, PumpSpec, Tank, TankHeat, TankSpec, ValveSpec,
};
use crate::props::PropertySet;

/// Airport distribution system shared by the long-term and refuelling models:
/// fuel-farm tank, distribution pump, supply line to the stand header,
/// recycle line back to the farm, and the aircraft hose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AirportConfig {
    pub supply: PipeSegment,
    pub header: PipeSegment,
    pub recycle: PipeSegment,
    pub hose: PipeSegment,
    pub pump: PumpSpec,
    pub farm: TankSpec,
    /// Aircraft flow-control valve sizing, kg/s at Pa.
    pub aircraft_valve_rated_flow: f64,
    pub aircraft_valve_rated_pressure_drop: f64,
    /// Recycle valve at the farm end of the recycle line, kg/s at Pa.
    pub recycle_valve_rated_flow: f64,
    pub recycle_valve_rated_pressure_drop: f64,
    /// Liquefier feed into the farm tank.
    pub liquefier_tpd: f64,
    pub liquefier_temperature: f64,
    pub liquefier_pressure: f64,
}

fn fixed(length: f64, diameter: f64, cells: usize, w: f64) -> PipeSegment {
    PipeSegment::new(length, diameter, cells, HeatIngress::Fixed { watts_per_meter: w })
}

impl Default for AirportConfig {
    fn default() -> Self {
        AirportConfig {
            supply: fixed(2000.0, 0.45, 50, 10.0),
            header: fixed(5.0, 0.2, 1, 4.6),
            recycle: fixed(2000.0, 0.17, 50, 3.6),
            hose: fixed(10.0, 0.2, 2, 5.0),
            pump: PumpSpec::new(0.9e5, 0.8, 0.6).expect("valid pump"),
            farm: TankSpec {
                name: "farm".into(),
                volume: 8000.0,
                ullage: 0.03,
                min_fill: 0.05,
                mop: 2.0e5,
                heat: TankHeat::Ua { u_value: 0.009, ambient_temperature: 308.15 },
                static_head: 10.0,
            },
            aircraft_valve_rated_flow: 20.0,
            aircraft_valve_rated_pressure_drop: 0.3e5,
            recycle_valve_rated_flow: 4.0,
            recycle_valve_rated_pressure_drop: 0.7e5,
            liquefier_tpd: 330.0,
            liquefier_temperature: 19.5,
            liquefier_pressure: 1.1e5,
        }
    }
}

/// Nominal liquid density used to size valves, kg/m³.
const SIZING_DENSITY: f64 = 70.0;

impl AirportConfig {
    pub fn validate(&self) -> Result<()> {
        self.supply.validate("supply")?;
        self.header.validate("header")?;
        self.recycle.validate("recycle")?;
        self.hose.validate("hose")?;
        self.pump.validate()?;
        self.farm.validate()?;
        for (k, v) in [
            ("aircraft_valve_rated_flow", self.aircraft_valve_rated_flow),
            ("aircraft_valve_rated_pressure_drop", self.aircraft_valve_rated_pressure_drop),
            ("recycle_valve_rated_flow", self.recycle_valve_rated_flow),
            ("recycle_valve_rated_pressure_drop", self.recycle_valve_rated_pressure_drop),
            ("liquefier_temperature", self.liquefier_temperature),
            ("liquefier_pressure", self.liquefier_pressure),
        ] {
            if !(v > 0.0) {
                return Err(Error::config(k, "must be positive"));
            }
        }
        if !(self.liquefier_tpd >= 0.0) {
            return Err(Error::config("liquefier_tpd", "must not be negative"));
        }
        Ok(())
    }

    /// Liquefier feed as (kg/s, J/kg).
    pub fn farm_feed(&self, props: &PropertySet) -> Result<(f64, f64)> {
        Ok((
            tpd_to_kg_per_s(self.liquefier_tpd),
            props.liquid_enthalpy(self.liquefier_temperature, self.liquefier_pressure)?,
        ))
    }

    pub fn aircraft_valve(&self) -> Result<ValveSpec> {
        ValveSpec::rated(self.aircraft_valve_rated_flow, self.aircraft_valve_rated_pressure_drop, SIZING_DENSITY)
    }

    pub fn recycle_valve(&self) -> Result<ValveSpec> {
        ValveSpec::rated(self.recycle_valve_rated_flow, self.recycle_valve_rated_pressure_drop, SIZING_DENSITY)
    }
}

/// Saved state of one pipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipeProfile {
    pub enthalpy: Vec<f64>,
    pub wall_temperature: Vec<f64>,
    pub pressure: Vec<f64>,
    pub cell_mass: f64,
}

impl PipeProfile {
    pub fn capture(pipe: &Pipe) -> Self {
        PipeProfile {
            enthalpy: pipe.enthalpy().to_vec(),
            wall_temperature: pipe.wall_temperature().to_vec(),
            pressure: pipe.pressure().to_vec(),
            cell_mass: pipe.cell_mass(),
        }
    }

    /// Pipe on `spec` carrying this profile. The saved inventory is kept when
    /// the cell count is unchanged.
    pub fn restore(&self, props: &PropertySet, spec: PipeSegment) -> Result<Pipe> {
        let same = spec.cells == self.enthalpy.len();
        let pipe = Pipe::from_profiles(props, spec, &self.enthalpy, &self.wall_temperature, &self.pressure)?;
        Ok(if same { pipe.with_cell_mass(self.cell_mass) } else { pipe })
    }
}

/// Distribution-system state handed from the long-term model to the
/// refuelling model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    pub label: String,
    /// Seconds after midnight.
    pub clock_seconds: f64,
    pub farm_mass: f64,
    pub farm_energy: f64,
    pub supply: PipeProfile,
    pub header: PipeProfile,
    pub recycle: PipeProfile,
    /// Recycle flow and valve opening at the snapshot.
    pub recycle_flow: f64,
    pub recycle_opening: f64,
}

impl Snapshot {
    pub fn farm(&self, props: &PropertySet, spec: TankSpec) -> Result<Tank> {
        Tank::new(props, spec, self.farm_mass, self.farm_energy)
    }
}

/// Clock label `hh:mm` for seconds after midnight.
pub fn clock_label(clock_seconds: f64) -> String {
    let minutes = (clock_seconds.rem_euclid(86_400.0) / 60.0).round() as u64 % 1440;
    format!("{:02}:{:02}", minutes / 60, minutes % 60)
}

/// Subcooling at the outlet of a pipe at its local pressure; negative inside the dome.
pub fn outlet_subcooling(props: &PropertySet, pipe: &Pipe) -> Result<f64> {
    let p = *pipe.pressure().last().expect("pipes have cells");
    subcooling_equivalent(props, p, pipe.outlet_enthalpy())
}
