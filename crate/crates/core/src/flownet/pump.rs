use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Centrifugal pump described by its zero-flow head, zero-head flow and peak
/// efficiency. Speed scales the curve by the affinity laws.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EfficiencyCurve {
    /// η_max·4r(1 − r) with r the fraction of zero-head flow.
    #[default]
    Parabolic,
    /// η_max at every flow below the zero-head flow.
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSpec {
    /// Pressure rise at zero flow, Pa.
    pub dp0: f64,
    /// Volume flow at zero pressure rise, m³/s.
    pub v0: f64,
    /// Peak efficiency.
    pub eta_max: f64,
    /// Relative speed in (0, 1].
    #[serde(default = "one")]
    pub speed_fraction: f64,
    /// Operating points below this efficiency are rejected.
    #[serde(default = "default_eta_floor")]
    pub eta_floor: f64,
    #[serde(default)]
    pub curve: EfficiencyCurve,
}

fn one() -> f64 {
    1.0
}

fn default_eta_floor() -> f64 {
    0.05
}

/// Power split at a pump operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpEnergy {
    /// W
    pub shaft_power: f64,
    /// Shaft power not converted to hydraulic work, W.
    pub loss_power: f64,
    /// Enthalpy added to the fluid, J/kg. The full shaft power ends up in the fluid.
    pub enthalpy_rise: f64,
    pub efficiency: f64,
}

impl PumpSpec {
    pub fn new(dp0: f64, v0: f64, eta_max: f64) -> Result<Self> {
        let spec = PumpSpec {
            dp0,
            v0,
            eta_max,
            speed_fraction: 1.0,
            eta_floor: default_eta_floor(),
            curve: EfficiencyCurve::Parabolic,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dp0 > 0.0) {
            return Err(Error::config("pump.dp0", "must be positive"));
        }
        if !(self.v0 > 0.0) {
            return Err(Error::config("pump.v0", "must be positive"));
        }
        if !(self.eta_max > 0.0 && self.eta_max < 1.0) {
            return Err(Error::config("pump.eta_max", "must lie in (0, 1)"));
        }
        if !(self.speed_fraction > 0.0 && self.speed_fraction <= 1.0) {
            return Err(Error::config("pump.speed_fraction", "must lie in (0, 1]"));
        }
        if !(self.eta_floor >= 0.0 && self.eta_floor < self.eta_max) {
            return Err(Error::config("pump.eta_floor", "must lie in [0, eta_max)"));
        }
        Ok(())
    }

    pub fn with_speed(mut self, speed_fraction: f64) -> Self {
        self.speed_fraction = speed_fraction;
        self
    }

    /// Zero-head flow at the current speed.
    pub fn max_flow(&self) -> f64 {
        self.speed_fraction * self.v0
    }

    /// Pressure rise at volume flow `v`, clamped at zero beyond the zero-head flow.
    pub fn pressure_rise(&self, v: f64) -> f64 {
        let s = self.speed_fraction;
        let r = v / (s * self.v0);
        (s * s * self.dp0 * (1.0 - r * r)).max(0.0)
    }

    /// Efficiency at volume flow `v`; the parabolic curve peaks at half the
    /// zero-head flow.
    pub fn efficiency(&self, v: f64) -> f64 {
        let r = v / (self.speed_fraction * self.v0);
        match self.curve {
            _ if r >= 1.0 => 0.0,
            EfficiencyCurve::Constant if r >= 0.0 => self.eta_max,
            EfficiencyCurve::Parabolic if r > 0.0 => self.eta_max * 4.0 * r * (1.0 - r),
            _ => 0.0,
        }
    }

    pub fn with_curve(mut self, curve: EfficiencyCurve) -> Self {
        self.curve = curve;
        self
    }

    pub fn energy(&self, v: f64, dp: f64, rho: f64) -> Result<PumpEnergy> {
        let efficiency = self.efficiency(v);
        self.energy_at_efficiency(v, dp, rho, efficiency)
    }

    pub fn energy_at_efficiency(&self, v: f64, dp: f64, rho: f64, efficiency: f64) -> Result<PumpEnergy> {
        if !(efficiency > self.eta_floor) {
            return Err(Error::PumpOperatingPoint {
                efficiency,
                floor: self.eta_floor,
                flow: v,
            });
        }
        let shaft_power = dp * v / efficiency;
        Ok(PumpEnergy {
            shaft_power,
            loss_power: shaft_power * (1.0 - efficiency),
            enthalpy_rise: dp / (rho * efficiency),
            efficiency,
        })
    }
}
