use crate::error::{Error, Result};

use super::PropertySet;

/// Thermodynamic state of parahydrogen at a point, from (p, h).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidState {
    /// Pa
    pub pressure: f64,
    /// J/kg
    pub enthalpy: f64,
    /// K
    pub temperature: f64,
    /// Vapour mass fraction.
    pub quality: f64,
    /// T_sat(p) - T, K; zero on or inside the two-phase dome.
    pub subcooling: f64,
    /// Homogeneous mixture density, kg/m³.
    pub density: f64,
    /// Saturation temperature at `pressure`.
    pub saturation_temperature: f64,
}

impl FluidState {
    pub(super) fn from_ph(props: &PropertySet, p: f64, h: f64) -> Result<Self> {
        let tsat = props.saturation_temperature(p)?;
        let hl = props.h_l(tsat);
        if h >= hl {
            let hfg = props.hfg(tsat);
            let x = (h - hl) / hfg;
            if x > 1.0 {
                return Err(Error::NotLiquid(format!(
                    "superheated vapour (quality {x:.3}) at {p:.0} Pa"
                )));
            }
            let vl = 1.0 / props.rho_l(tsat);
            let vv = 1.0 / props.rho_v(tsat);
            return Ok(FluidState {
                pressure: p,
                enthalpy: h,
                temperature: tsat,
                quality: x,
                subcooling: 0.0,
                density: 1.0 / (vl + x * (vv - vl)),
                saturation_temperature: tsat,
            });
        }

        let (t_min, _) = props.temperature_range();
        let mut t = tsat - (hl - h) / props.dh_sub_dt(tsat, p);
        t = t.clamp(t_min, tsat);
        for _ in 0..50 {
            let f = props.h_sub(t, p) - h;
            let step = f / props.dh_sub_dt(t, p);
            let next = (t - step).clamp(t_min, tsat);
            let done = (next - t).abs() < 1e-11;
            t = next;
            if done {
                break;
            }
        }
        if (props.h_sub(t, p) - h).abs() > 1e-6 * h.abs().max(1.0) {
            return Err(Error::Domain {
                quantity: "liquid temperature (K)",
                value: t,
                min: t_min,
                max: tsat,
            });
        }
        let rho = props.rho_l(t) * (1.0 + props.liquid_compressibility() * (p - props.psat(t)));
        Ok(FluidState {
            pressure: p,
            enthalpy: h,
            temperature: t,
            quality: 0.0,
            subcooling: tsat - t,
            density: rho,
            saturation_temperature: tsat,
        })
    }

    /// Subcooled liquid state from (T, p).
    pub fn liquid(props: &PropertySet, t: f64, p: f64) -> Result<Self> {
        let h = props.liquid_enthalpy(t, p)?;
        Self::from_ph(props, p, h)
    }

    pub fn is_two_phase(&self) -> bool {
        self.quality > 0.0
    }

    /// Liquid viscosity blended with vapour viscosity by quality (McAdams).
    pub fn viscosity(&self, props: &PropertySet) -> f64 {
        let mu_l = props.ln_mu_l.eval(props.tau(self.temperature)).exp();
        if self.quality <= 0.0 {
            return mu_l;
        }
        let mu_v = props.mu_v.eval(props.tau(self.temperature));
        1.0 / (self.quality / mu_v + (1.0 - self.quality) / mu_l)
    }

    /// dT/dh at fixed pressure; zero inside the dome.
    pub fn dtemperature_denthalpy(&self, props: &PropertySet) -> f64 {
        if self.quality > 0.0 {
            0.0
        } else {
            1.0 / props.dh_sub_dt(self.temperature, self.pressure)
        }
    }
}
