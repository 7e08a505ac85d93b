use serde::{Deserialize, Serialize};

use super::friction::friction_factor;
use super::insulation::{radial_heat_ingress, ConductivityModel};
use crate::error::{Error, Result};
use crate::props::{FluidState, PropertySet};

/// How heat reaches the pipe wall from the surroundings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum HeatIngress {
    /// Constant leak per metre, W/m.
    Fixed { watts_per_meter: f64 },
    /// Conduction through a cylindrical insulation layer.
    Radial {
        thickness: f64,
        #[serde(default)]
        conductivity: ConductivityModel,
        ambient_temperature: f64,
    },
}

/// Geometry and thermal parameters of one pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipeSegment {
    pub length: f64,
    pub diameter: f64,
    pub cells: usize,
    pub ingress: HeatIngress,
    /// Steel-equivalent wall mass, kg/m.
    pub wall_mass_per_meter: f64,
    /// J/(kg·K)
    pub wall_specific_heat: f64,
}

/// Default wall specific heat of stainless steel averaged over the cryogenic range.
pub const WALL_SPECIFIC_HEAT: f64 = 200.0;

/// Floor on the wall-to-fluid Nusselt number (fully developed laminar flow).
const NU_LAMINAR: f64 = 4.36;

/// Default wall mass for a given inner diameter, kg/m.
pub fn default_wall_mass(diameter: f64) -> f64 {
    if diameter >= 0.35 {
        8.0
    } else if diameter >= 0.19 {
        3.0
    } else {
        2.0
    }
}

impl PipeSegment {
    pub fn new(length: f64, diameter: f64, cells: usize, ingress: HeatIngress) -> Self {
        PipeSegment {
            length,
            diameter,
            cells,
            ingress,
            wall_mass_per_meter: default_wall_mass(diameter),
            wall_specific_heat: WALL_SPECIFIC_HEAT,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let bad = |what: &str| Err(Error::config(format!("{name}.{what}"), "must be positive"));
        if !(self.length >= 0.0) {
            return Err(Error::config(format!("{name}.length"), "must not be negative"));
        }
        if !(self.diameter > 0.0) {
            return bad("diameter");
        }
        if self.cells == 0 {
            return Err(Error::config(format!("{name}.cells"), "must be at least 1"));
        }
        if !(self.wall_mass_per_meter >= 0.0 && self.wall_specific_heat >= 0.0) {
            return Err(Error::config(format!("{name}.wall_mass_per_meter"), "must not be negative"));
        }
        match self.ingress {
            HeatIngress::Fixed { watts_per_meter } if watts_per_meter < 0.0 => {
                Err(Error::config(format!("{name}.watts_per_meter"), "must not be negative"))
            }
            HeatIngress::Radial { thickness, conductivity, ambient_temperature } => {
                if !(thickness > 0.0) {
                    return bad("thickness");
                }
                if !(ambient_temperature > 0.0) {
                    return bad("ambient_temperature");
                }
                conductivity.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn area(&self) -> f64 {
        0.25 * std::f64::consts::PI * self.diameter * self.diameter
    }

    pub fn cell_length(&self) -> f64 {
        self.length / self.cells as f64
    }

    /// Heat leak per metre with the fluid at `t_fluid`.
    pub fn ingress_per_meter(&self, t_fluid: f64) -> f64 {
        match self.ingress {
            HeatIngress::Fixed { watts_per_meter } => watts_per_meter,
            HeatIngress::Radial { thickness, conductivity, ambient_temperature } => {
                radial_heat_ingress(0.5 * self.diameter, thickness, &conductivity, t_fluid, ambient_temperature)
                    .max(0.0)
            }
        }
    }

    /// Frictional pressure drop of a uniform pipe carrying fluid in `state`.
    pub fn pressure_drop(&self, props: &PropertySet, mdot: f64, state: &FluidState) -> Result<f64> {
        cell_pressure_drop(props, self.diameter, self.area(), self.length, mdot, state)
    }
}

fn cell_pressure_drop(
    props: &PropertySet,
    diameter: f64,
    area: f64,
    length: f64,
    mdot: f64,
    state: &FluidState,
) -> Result<f64> {
    if mdot <= 0.0 || length == 0.0 {
        return Ok(0.0);
    }
    let g = mdot / area;
    let re = g * diameter / state.viscosity(props);
    let f = friction_factor(re)?;
    Ok(f * length / diameter * g * g / (2.0 * state.density))
}

/// Outcome of a pressure march along a pipe.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureProfile {
    pub outlet_pressure: f64,
    /// Mid-cell pressures.
    pub cells: Vec<f64>,
}

/// Energy exchanged by a pipe during one step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PipeStepReport {
    pub outlet_enthalpy: f64,
    /// Heat leaked from the surroundings into the wall, J.
    pub heat_in: f64,
    /// Heat passed from the wall to the fluid, J.
    pub wall_to_fluid: f64,
}

/// A discretised pipe: fixed fluid mass per cell, with enthalpy and wall
/// temperature states.
#[derive(Debug, Clone, PartialEq)]
pub struct Pipe {
    pub spec: PipeSegment,
    enthalpy: Vec<f64>,
    wall_temperature: Vec<f64>,
    pressure: Vec<f64>,
    cell_mass: f64,
}

impl Pipe {
    /// Pipe filled with liquid at (`t`, `p`), wall in equilibrium with the fluid.
    pub fn new(props: &PropertySet, spec: PipeSegment, t: f64, p: f64) -> Result<Self> {
        spec.validate("pipe")?;
        let state = FluidState::liquid(props, t, p)?;
        let n = spec.cells;
        let cell_mass = state.density * spec.area() * spec.cell_length();
        Ok(Pipe {
            spec,
            enthalpy: vec![state.enthalpy; n],
            wall_temperature: vec![t; n],
            pressure: vec![p; n],
            cell_mass,
        })
    }

    /// Rebuilds a pipe from saved profiles; the profiles are resampled onto
    /// `spec.cells` cells when the counts differ.
    pub fn from_profiles(
        props: &PropertySet,
        spec: PipeSegment,
        enthalpy: &[f64],
        wall_temperature: &[f64],
        pressure: &[f64],
    ) -> Result<Self> {
        spec.validate("pipe")?;
        if enthalpy.is_empty() || enthalpy.len() != wall_temperature.len() || enthalpy.len() != pressure.len() {
            return Err(Error::Invalid("pipe profiles must be non-empty and of equal length".into()));
        }
        let n = spec.cells;
        let h = resample(enthalpy, n);
        let tw = resample(wall_temperature, n);
        let p = resample(pressure, n);
        let mean_density = h
            .iter()
            .zip(&p)
            .map(|(&h, &p)| props.state_ph(p, h).map(|s| s.density))
            .sum::<Result<f64>>()?
            / n as f64;
        Ok(Pipe {
            cell_mass: mean_density * spec.area() * spec.cell_length(),
            spec,
            enthalpy: h,
            wall_temperature: tw,
            pressure: p,
        })
    }

    /// Keeps a saved fluid inventory when restoring a pipe with unchanged cells.
    pub fn with_cell_mass(mut self, cell_mass: f64) -> Self {
        self.cell_mass = cell_mass;
        self
    }

    pub fn cells(&self) -> usize {
        self.enthalpy.len()
    }

    pub fn enthalpy(&self) -> &[f64] {
        &self.enthalpy
    }

    pub fn wall_temperature(&self) -> &[f64] {
        &self.wall_temperature
    }

    pub fn pressure(&self) -> &[f64] {
        &self.pressure
    }

    pub fn cell_mass(&self) -> f64 {
        self.cell_mass
    }

    pub fn total_mass(&self) -> f64 {
        self.cell_mass * self.cells() as f64
    }

    /// Fluid enthalpy plus wall heat content, J.
    pub fn stored_energy(&self) -> f64 {
        let wall_c = self.wall_capacity();
        self.enthalpy.iter().map(|h| self.cell_mass * h).sum::<f64>()
            + self.wall_temperature.iter().map(|t| wall_c * t).sum::<f64>()
    }

    fn wall_capacity(&self) -> f64 {
        self.spec.wall_mass_per_meter * self.spec.wall_specific_heat * self.spec.cell_length()
    }

    pub fn state(&self, props: &PropertySet, cell: usize) -> Result<FluidState> {
        props
            .state_ph(self.pressure[cell], self.enthalpy[cell])
            .map_err(|e| e.in_cell("pipe state", cell))
    }

    pub fn states(&self, props: &PropertySet) -> Result<Vec<FluidState>> {
        (0..self.cells()).map(|i| self.state(props, i)).collect()
    }

    pub fn outlet_state(&self, props: &PropertySet) -> Result<FluidState> {
        self.state(props, self.cells() - 1)
    }

    pub fn outlet_enthalpy(&self) -> f64 {
        self.enthalpy[self.cells() - 1]
    }

    pub fn set_pressures(&mut self, cells: &[f64]) {
        self.pressure.copy_from_slice(cells);
    }

    /// Uniform pressure in every cell (closed, stagnant pipe).
    pub fn set_uniform_pressure(&mut self, p: f64) {
        self.pressure.iter_mut().for_each(|x| *x = p);
    }

    /// Marches the quasi-steady momentum balance from `p_in` using the current
    /// cell enthalpies. Fails when the pressure leaves the property range.
    pub fn pressure_profile(&self, props: &PropertySet, p_in: f64, mdot: f64) -> Result<PressureProfile> {
        let n = self.cells();
        let dx = self.spec.cell_length();
        let area = self.spec.area();
        let mut p = p_in;
        let mut cells = Vec::with_capacity(n);
        for (i, &h) in self.enthalpy.iter().enumerate() {
            let state = props.state_ph(p, h).map_err(|e| e.in_cell("pressure march", i))?;
            let dp = cell_pressure_drop(props, self.spec.diameter, area, dx, mdot, &state)
                .map_err(|e| e.in_cell("pressure march", i))?;
            cells.push(p - 0.5 * dp);
            p -= dp;
        }
        Ok(PressureProfile { outlet_pressure: p, cells })
    }

    /// Advances fluid enthalpy and wall temperature by `dt` with `mdot` entering
    /// at enthalpy `h_in`. Advection is upwind and implicit; the wall-fluid
    /// exchange is implicit in both temperatures.
    pub fn step(&mut self, props: &PropertySet, dt: f64, mdot: f64, h_in: f64) -> Result<PipeStepReport> {
        let dx = self.spec.cell_length();
        let a = self.cell_mass / dt;
        let c = self.wall_capacity() / dt;
        let m = mdot.max(0.0);
        let perimeter = std::f64::consts::PI * self.spec.diameter;
        let mut report = PipeStepReport::default();
        let mut h_up = h_in;
        for i in 0..self.cells() {
            let state = self.state(props, i)?;
            let q = self.spec.ingress_per_meter(state.temperature) * dx;
            let g = self.film_coefficient(props, &state, m).map_err(|e| e.in_cell("film coefficient", i))?
                * perimeter
                * dx;
            let s = state.dtemperature_denthalpy(props);
            let h0 = self.enthalpy[i];
            let dt0 = self.wall_temperature[i] - state.temperature;

            // [a + m + g·s, -g; -g·s, c + g] · [dh, dTw] = [m(h_up - h0) + g·dt0, q - g·dt0]
            let a11 = a + m + g * s;
            let a12 = -g;
            let a21 = -g * s;
            let a22 = c + g;
            let b1 = m * (h_up - h0) + g * dt0;
            let b2 = q - g * dt0;
            let det = a11 * a22 - a12 * a21;
            let dh = (b1 * a22 - a12 * b2) / det;
            let dtw = (a11 * b2 - a21 * b1) / det;

            let exchange = g * (dt0 + dtw - s * dh);
            self.enthalpy[i] = h0 + dh;
            self.wall_temperature[i] += dtw;
            report.heat_in += q * dt;
            report.wall_to_fluid += exchange * dt;
            h_up = self.enthalpy[i];
        }
        report.outlet_enthalpy = h_up;
        Ok(report)
    }

    /// Wall-to-fluid heat transfer coefficient, W/(m²·K), Dittus-Boelter with a
    /// laminar floor.
    fn film_coefficient(&self, props: &PropertySet, state: &FluidState, mdot: f64) -> Result<f64> {
        let t = state.temperature;
        let k = props.liquid_conductivity(t)?;
        let mu = state.viscosity(props);
        let re = mdot / self.spec.area() * self.spec.diameter / mu;
        let pr = mu * props.liquid_cp(t)? / k;
        let nu = (0.023 * re.powf(0.8) * pr.powf(0.4)).max(NU_LAMINAR);
        Ok(nu * k / self.spec.diameter)
    }

    /// Largest vapour quality over the cells.
    pub fn max_quality(&self, props: &PropertySet) -> Result<f64> {
        Ok(self.states(props)?.iter().map(|s| s.quality).fold(0.0, f64::max))
    }

    /// Smallest subcooling over the cells (zero when any cell is two-phase).
    pub fn min_subcooling(&self, props: &PropertySet) -> Result<f64> {
        Ok(self
            .states(props)?
            .iter()
            .map(|s| s.subcooling)
            .fold(f64::INFINITY, f64::min))
    }
}

fn resample(values: &[f64], n: usize) -> Vec<f64> {
    if values.len() == n {
        return values.to_vec();
    }
    let m = values.len();
    (0..n)
        .map(|i| {
            let x = (i as f64 + 0.5) * m as f64 / n as f64 - 0.5;
            let x = x.clamp(0.0, (m - 1) as f64);
            let j = (x.floor() as usize).min(m.saturating_sub(2));
            if m == 1 {
                return values[0];
            }
            let w = x - j as f64;
            values[j] * (1.0 - w) + values[j + 1] * w
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn props() -> &'static PropertySet {
        PropertySet::parahydrogen()
    }

    fn fixed(length: f64, diameter: f64, cells: usize, w: f64) -> PipeSegment {
        PipeSegment::new(length, diameter, cells, HeatIngress::Fixed { watts_per_meter: w })
    }

    #[test]
    fn zero_flow_has_no_pressure_drop() {
        let s = FluidState::liquid(props(), 20.0, 1.5e5).unwrap();
        assert_eq!(fixed(100.0, 0.2, 4, 0.0).pressure_drop(props(), 0.0, &s).unwrap(), 0.0);
    }

    #[test]
    fn pressure_drop_scales_with_flow_squared() {
        let s = FluidState::liquid(props(), 20.0, 1.5e5).unwrap();
        let seg = fixed(2000.0, 0.45, 10, 0.0);
        let ratio = seg.pressure_drop(props(), 40.0, &s).unwrap() / seg.pressure_drop(props(), 20.0, &s).unwrap();
        assert!((3.6..=4.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn smaller_bore_drops_more() {
        let s = FluidState::liquid(props(), 19.6, 1.5e5).unwrap();
        let six = fixed(4000.0, 0.16, 10, 0.0).pressure_drop(props(), 3.82, &s).unwrap();
        let eight = fixed(4000.0, 0.22, 10, 0.0).pressure_drop(props(), 3.82, &s).unwrap();
        assert!(six > eight);
    }

    #[test]
    fn adiabatic_steady_flow_preserves_enthalpy() {
        let mut pipe = Pipe::new(props(), fixed(500.0, 0.2, 20, 0.0), 19.8, 1.5e5).unwrap();
        let h_in = props().liquid_enthalpy(19.8, 1.5e5).unwrap();
        for _ in 0..50 {
            pipe.step(props(), 10.0, 5.0, h_in).unwrap();
        }
        assert_relative_eq!(pipe.outlet_enthalpy(), h_in, max_relative = 1e-6);
    }

    #[test]
    fn supply_pipe_steady_temperature_rise() {
        let spec = fixed(2000.0, 0.45, 50, 10.0);
        let mut pipe = Pipe::new(props(), spec, 20.0, 1.5e5).unwrap();
        let h_in = props().liquid_enthalpy(20.0, 1.5e5).unwrap();
        for _ in 0..400 {
            pipe.step(props(), 60.0, 3.0, h_in).unwrap();
        }
        let rise = pipe.outlet_state(props()).unwrap().temperature - 20.0;
        let cp = props().liquid_cp(20.2).unwrap();
        let oracle = 20_000.0 / (3.0 * cp);
        assert!((rise - oracle).abs() < 0.03 * oracle, "rise {rise} oracle {oracle}");
        assert!((rise - 0.7).abs() < 0.15);
    }

    #[test]
    fn stagnant_fluid_warms_toward_wall() {
        let mut pipe = Pipe::new(props(), fixed(10.0, 0.2, 2, 0.0), 19.5, 1.5e5).unwrap();
        pipe.wall_temperature.iter_mut().for_each(|t| *t = 25.0);
        let mut last = pipe.state(props(), 0).unwrap().temperature;
        for _ in 0..30 {
            pipe.step(props(), 10.0, 0.0, 0.0).unwrap();
            let t = pipe.state(props(), 0).unwrap().temperature;
            assert!(t > last);
            assert!(t < pipe.wall_temperature[0]);
            last = t;
        }
    }

    #[test]
    fn step_energy_balance_is_exact() {
        let spec = fixed(300.0, 0.2, 15, 5.0);
        let mut pipe = Pipe::new(props(), spec, 20.0, 1.6e5).unwrap();
        let h_in = props().liquid_enthalpy(19.7, 1.6e5).unwrap();
        let e0 = pipe.stored_energy();
        let (dt, m) = (1.0, 12.0);
        let mut net = 0.0;
        for _ in 0..40 {
            let r = pipe.step(props(), dt, m, h_in).unwrap();
            net += r.heat_in + m * dt * (h_in - r.outlet_enthalpy);
        }
        let de = pipe.stored_energy() - e0;
        assert!((de - net).abs() <= 1e-9 * (m * 40.0 * h_in), "{de} vs {net}");
    }

    #[test]
    fn pressure_march_reaches_two_phase() {
        let pipe = Pipe::new(props(), fixed(250.0, 0.1, 25, 0.0), 20.9, 1.25e5).unwrap();
        let prof = pipe.pressure_profile(props(), 1.25e5, 3.0).unwrap();
        assert!(prof.cells.windows(2).all(|w| w[1] < w[0]));
        let first = props().state_ph(prof.cells[0], pipe.enthalpy()[0]).unwrap();
        let last = props().state_ph(prof.cells[24], pipe.enthalpy()[24]).unwrap();
        assert_eq!(first.quality, 0.0);
        assert!(last.quality > 0.0);
    }

    #[test]
    fn resampling_preserves_linear_profiles() {
        let v: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let r = resample(&v, 20);
        assert_eq!(r.len(), 20);
        assert!(r.windows(2).all(|w| w[1] >= w[0]));
        assert_eq!(resample(&v, 10), v);
    }
}
