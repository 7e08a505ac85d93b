use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::brent;
use crate::props::{FluidState, PropertySet, TankFlash, GRAVITY};

/// Heat leak into a tank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum TankHeat {
    Fixed { watts: f64 },
    /// Overall coefficient times the outer area of a sphere of the tank volume.
    Ua { u_value: f64, ambient_temperature: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TankSpec {
    pub name: String,
    /// m³
    pub volume: f64,
    /// Vapour space kept free when full, fraction of volume.
    pub ullage: f64,
    /// Lowest level from which liquid may be drawn.
    pub min_fill: f64,
    /// Maximum operating pressure, Pa. Vapour is vented to hold it.
    pub mop: f64,
    pub heat: TankHeat,
    /// Liquid column above the outlet, m.
    #[serde(default)]
    pub static_head: f64,
}

/// Surface area of a sphere of volume `v`.
pub fn sphere_area(v: f64) -> f64 {
    (36.0 * std::f64::consts::PI * v * v).cbrt()
}

impl TankSpec {
    pub fn validate(&self) -> Result<()> {
        let key = |k: &str| format!("{}.{k}", self.name);
        if !(self.volume > 0.0) {
            return Err(Error::config(key("volume"), "must be positive"));
        }
        if !(0.0..1.0).contains(&self.ullage) {
            return Err(Error::config(key("ullage"), "must lie in [0, 1)"));
        }
        if !(0.0..1.0 - self.ullage).contains(&self.min_fill) {
            return Err(Error::config(key("min_fill"), "must lie in [0, 1 - ullage)"));
        }
        if !(self.mop > 0.0) {
            return Err(Error::config(key("mop"), "must be positive"));
        }
        if !(self.static_head >= 0.0) {
            return Err(Error::config(key("static_head"), "must not be negative"));
        }
        match self.heat {
            TankHeat::Fixed { watts } if watts < 0.0 => Err(Error::config(key("heat.watts"), "must not be negative")),
            TankHeat::Ua { u_value, .. } if u_value < 0.0 => {
                Err(Error::config(key("heat.u_value"), "must not be negative"))
            }
            _ => Ok(()),
        }
    }

    /// Heat leak with the contents at `t`, W.
    pub fn heat_rate(&self, t: f64) -> f64 {
        match self.heat {
            TankHeat::Fixed { watts } => watts,
            TankHeat::Ua { u_value, ambient_temperature } => {
                u_value * sphere_area(self.volume) * (ambient_temperature - t)
            }
        }
    }

    pub fn max_level(&self) -> f64 {
        1.0 - self.ullage
    }
}

/// Per-step exchange of a tank with its surroundings.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TankStepReport {
    pub vented_mass: f64,
    /// Enthalpy carried off by vented vapour, J.
    pub vented_enthalpy: f64,
    /// J
    pub heat_in: f64,
}

/// Equilibrium (VLE) tank holding total mass and internal energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Tank {
    pub spec: TankSpec,
    mass: f64,
    energy: f64,
    flash: TankFlash,
}

impl Tank {
    pub fn new(props: &PropertySet, spec: TankSpec, mass: f64, energy: f64) -> Result<Self> {
        spec.validate()?;
        let flash = props.flash_uv(mass, energy, spec.volume)?;
        Ok(Tank { spec, mass, energy, flash })
    }

    /// Saturated contents at `pressure` with liquid filling `level` of the volume.
    pub fn saturated(props: &PropertySet, spec: TankSpec, pressure: f64, level: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&level) {
            return Err(Error::config(format!("{}.level", spec.name), "must lie in [0, 1]"));
        }
        let t = props.saturation_temperature(pressure)?;
        let rho_l = props.saturated_liquid_density(t)?;
        let rho_v = props.saturated_vapor_density(t)?;
        let (ul, uv) = props.u_sat(t);
        let ml = level * spec.volume * rho_l;
        let mv = (1.0 - level) * spec.volume * rho_v;
        Tank::new(props, spec, ml + mv, ml * ul + mv * uv)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn flash(&self) -> &TankFlash {
        &self.flash
    }

    pub fn pressure(&self) -> f64 {
        self.flash.pressure
    }

    pub fn temperature(&self) -> f64 {
        self.flash.temperature
    }

    pub fn level(&self) -> f64 {
        self.flash.level
    }

    /// Specific enthalpy of liquid leaving at the tank pressure, J/kg.
    pub fn outflow_enthalpy(&self) -> f64 {
        self.flash.liquid_internal_energy + self.flash.pressure / self.flash.liquid_density
    }

    /// Pressure at the outlet including the liquid column.
    pub fn bottom_pressure(&self) -> f64 {
        self.flash.pressure + self.flash.liquid_density * GRAVITY * self.spec.static_head
    }

    /// Liquid state at the outlet. The column adds `g·H` of enthalpy on top of
    /// `outflow_enthalpy`, which callers book as gravitational work.
    pub fn suction_state(&self, props: &PropertySet) -> Result<FluidState> {
        props.state_ph(self.bottom_pressure(), self.outflow_enthalpy() + GRAVITY * self.spec.static_head)
    }

    /// Advances the tank by `dt`: applies inflows `(mdot, h)`, a liquid outflow and
    /// the heat leak, re-flashes, and vents saturated vapour if above MOP.
    pub fn step(
        &mut self,
        props: &PropertySet,
        inflows: &[(f64, f64)],
        outflow: f64,
        dt: f64,
    ) -> Result<TankStepReport> {
        let spec = &self.spec;
        if outflow > 0.0 && self.flash.level < spec.min_fill {
            return Err(Error::SupplyExhausted {
                tank: spec.name.clone(),
                level: self.flash.level,
                min: spec.min_fill,
            });
        }
        let heat = spec.heat_rate(self.flash.temperature) * dt;
        let h_out = self.outflow_enthalpy();
        let mut mass = self.mass - outflow * dt;
        let mut energy = self.energy - outflow * dt * h_out + heat;
        let mut filling = false;
        for &(m, h) in inflows {
            mass += m * dt;
            energy += m * dt * h;
            filling |= m > 0.0;
        }
        let mut flash = props.flash_uv(mass, energy, spec.volume)?;
        let mut report = TankStepReport { heat_in: heat, ..Default::default() };

        if flash.pressure > spec.mop {
            let h_v = props.vapor_enthalpy(spec.mop)?;
            let resid = |mv: f64| match props.flash_uv(mass - mv, energy - mv * h_v, spec.volume) {
                Ok(f) => f.pressure - spec.mop,
                Err(_) => -spec.mop,
            };
            let mut hi = flash.vapor_mass.max(1e-6 * mass);
            while resid(hi) > 0.0 {
                hi *= 2.0;
                if hi > mass {
                    return Err(Error::Flash(format!("tank '{}' cannot be vented back to MOP", spec.name)));
                }
            }
            let vented = brent(resid, 0.0, hi, 1e-12 * mass, 200)
                .ok_or_else(|| Error::Flash(format!("vent iteration failed in tank '{}'", spec.name)))?;
            mass -= vented;
            energy -= vented * h_v;
            flash = props.flash_uv(mass, energy, spec.volume)?;
            report.vented_mass = vented;
            report.vented_enthalpy = vented * h_v;
        }

        if filling && flash.level > spec.max_level() + 1e-9 {
            return Err(Error::Overfill {
                tank: spec.name.clone(),
                level: flash.level,
                max: spec.max_level(),
            });
        }
        self.mass = mass;
        self.energy = energy;
        self.flash = flash;
        Ok(report)
    }
}
