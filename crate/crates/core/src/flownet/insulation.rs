use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::gauss_legendre;

/// Thermal conductivity of pipe insulation as a function of temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConductivityModel {
    Constant { k: f64 },
    /// k(T) = c0 + c1·T
    Linear { c0: f64, c1: f64 },
}

impl Default for ConductivityModel {
    /// Evacuated fibre-glass, calibrated so that 2.5 cm on an 8" line at 308 K
    /// ambient leaks about 4.6 W/m.
    fn default() -> Self {
        ConductivityModel::Linear { c0: 1.0e-4, c1: 2.57e-6 }
    }
}

impl ConductivityModel {
    pub fn conductivity(&self, t: f64) -> f64 {
        match *self {
            ConductivityModel::Constant { k } => k,
            ConductivityModel::Linear { c0, c1 } => c0 + c1 * t,
        }
    }

    /// Mean conductivity over `[t_cold, t_warm]`.
    pub fn mean(&self, t_cold: f64, t_warm: f64) -> f64 {
        if (t_warm - t_cold).abs() < 1e-12 {
            return self.conductivity(t_cold);
        }
        gauss_legendre(|t| self.conductivity(t), t_cold, t_warm) / (t_warm - t_cold)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ConductivityModel::Constant { k } => k > 0.0,
            ConductivityModel::Linear { c0, c1 } => c0 + c1 * 15.0 > 0.0 && c0 + c1 * 350.0 > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config("conductivity", "must be positive between 15 K and 350 K"))
        }
    }
}

/// Heat ingress per metre through a cylindrical insulation layer.
pub fn radial_heat_ingress(
    inner_radius: f64,
    thickness: f64,
    model: &ConductivityModel,
    t_fluid: f64,
    t_ambient: f64,
) -> f64 {
    let k = model.mean(t_fluid, t_ambient);
    2.0 * std::f64::consts::PI * k * (t_ambient - t_fluid) / ((inner_radius + thickness) / inner_radius).ln()
}
