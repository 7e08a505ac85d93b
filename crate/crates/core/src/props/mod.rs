//! Parahydrogen thermophysical properties.
//!
//! Saturation-line correlations are polynomials in a scaled temperature,
//! fitted to reference-equation-of-state tables (see `data/CALIBRATION.md`).
//! Subcooled liquid is handled with an incompressible enthalpy correction,
//! and sealed all-liquid volumes with a small liquid compressibility.

mod flash;
mod state;

use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub use flash::TankFlash;
pub use state::FluidState;

/// Coefficient file shipped with the crate.
pub const DEFAULT_COEFFICIENTS: &str = include_str!("../../data/parahydrogen.coef");

/// Standard gravity, m/s².
pub const GRAVITY: f64 = 9.80665;

#[derive(Debug, Clone, PartialEq)]
struct Poly(Vec<f64>);

impl Poly {
    #[inline]
    fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    #[inline]
    fn deriv(&self, x: f64) -> f64 {
        self.0
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (i, c)| acc * x + i as f64 * c)
    }
}

/// A calibrated set of saturation correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertySet {
    t_ref: f64,
    t_scale: f64,
    t_min: f64,
    t_max: f64,
    p_min: f64,
    p_max: f64,
    enthalpy_offset: f64,
    compressibility: f64,
    ln_p_sat: Poly,
    rho_l_sat: Poly,
    h_l_sat: Poly,
    h_fg: Poly,
    ln_rho_v_sat: Poly,
    ln_mu_l: Poly,
    mu_v: Poly,
    k_l: Poly,
}

impl PropertySet {
    /// The committed parahydrogen fit, parsed once.
    pub fn parahydrogen() -> &'static PropertySet {
        static DEFAULT: OnceLock<PropertySet> = OnceLock::new();
        DEFAULT.get_or_init(|| {
            PropertySet::parse(DEFAULT_COEFFICIENTS).expect("bundled coefficient file is valid")
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::parse(&text)
    }

    /// Parses the `key = values...` coefficient format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = std::collections::HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}", lineno + 1), "expected `key = values`")
            })?;
            let values = rest
                .split_whitespace()
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::config(key.trim(), e.to_string()))?;
            if values.is_empty() {
                return Err(Error::config(key.trim(), "no values"));
            }
            entries.insert(key.trim().to_string(), values);
        }
        let mut take = |key: &str| {
            entries
                .remove(key)
                .ok_or_else(|| Error::config(key, "missing from coefficient file"))
        };
        let scalar = |v: Vec<f64>, key: &str| {
            if v.len() == 1 {
                Ok(v[0])
            } else {
                Err(Error::config(key, "expected a single value"))
            }
        };
        let set = PropertySet {
            t_ref: scalar(take("t_ref")?, "t_ref")?,
            t_scale: scalar(take("t_scale")?, "t_scale")?,
            t_min: scalar(take("t_min")?, "t_min")?,
            t_max: scalar(take("t_max")?, "t_max")?,
            p_min: scalar(take("p_min")?, "p_min")?,
            p_max: scalar(take("p_max")?, "p_max")?,
            enthalpy_offset: scalar(take("enthalpy_offset")?, "enthalpy_offset")?,
            compressibility: scalar(take("liquid_compressibility")?, "liquid_compressibility")?,
            ln_p_sat: Poly(take("ln_p_sat")?),
            rho_l_sat: Poly(take("rho_l_sat")?),
            h_l_sat: Poly(take("h_l_sat")?),
            h_fg: Poly(take("h_fg")?),
            ln_rho_v_sat: Poly(take("ln_rho_v_sat")?),
            ln_mu_l: Poly(take("ln_mu_l")?),
            mu_v: Poly(take("mu_v")?),
            k_l: Poly(take("k_l")?),
        };
        if let Some(key) = entries.keys().next() {
            return Err(Error::config(key.clone(), "unknown coefficient"));
        }
        if !(set.t_scale > 0.0 && set.t_min < set.t_max && set.p_min < set.p_max) {
            return Err(Error::config("t_scale/t_min/t_max/p_min/p_max", "inconsistent ranges"));
        }
        Ok(set)
    }

    #[inline]
    fn tau(&self, t: f64) -> f64 {
        (t - self.t_ref) / self.t_scale
    }

    pub fn temperature_range(&self) -> (f64, f64) {
        (self.t_min, self.t_max)
    }

    pub fn pressure_range(&self) -> (f64, f64) {
        (self.p_min, self.p_max)
    }

    /// Offset added to reference-table enthalpies by this fit, J/kg.
    pub fn enthalpy_offset(&self) -> f64 {
        self.enthalpy_offset
    }

    pub fn liquid_compressibility(&self) -> f64 {
        self.compressibility
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if t.is_finite() && t >= self.t_min && t <= self.t_max {
            Ok(())
        } else {
            Err(Error::Domain {
                quantity: "temperature (K)",
                value: t,
                min: self.t_min,
                max: self.t_max,
            })
        }
    }

    fn check_p(&self, p: f64) -> Result<()> {
        if p.is_finite() && p >= self.p_min && p <= self.p_max {
            Ok(())
        } else {
            Err(Error::Domain {
                quantity: "pressure (Pa)",
                value: p,
                min: self.p_min,
                max: self.p_max,
            })
        }
    }

    // Unchecked saturation-line evaluations, valid for t in [t_min, t_max].

    #[inline]
    pub(crate) fn psat(&self, t: f64) -> f64 {
        self.ln_p_sat.eval(self.tau(t)).exp()
    }

    #[inline]
    pub(crate) fn dpsat_dt_raw(&self, t: f64) -> f64 {
        self.psat(t) * self.ln_p_sat.deriv(self.tau(t)) / self.t_scale
    }

    #[inline]
    pub(crate) fn rho_l(&self, t: f64) -> f64 {
        self.rho_l_sat.eval(self.tau(t))
    }

    #[inline]
    pub(crate) fn rho_v(&self, t: f64) -> f64 {
        self.ln_rho_v_sat.eval(self.tau(t)).exp()
    }

    #[inline]
    pub(crate) fn h_l(&self, t: f64) -> f64 {
        self.h_l_sat.eval(self.tau(t))
    }

    #[inline]
    pub(crate) fn hfg(&self, t: f64) -> f64 {
        self.h_fg.eval(self.tau(t))
    }

    /// Subcooled liquid enthalpy without range checks.
    #[inline]
    pub(crate) fn h_sub(&self, t: f64, p: f64) -> f64 {
        self.h_l(t) + (p - self.psat(t)) / self.rho_l(t)
    }

    #[inline]
    pub(crate) fn dh_sub_dt(&self, t: f64, p: f64) -> f64 {
        let tau = self.tau(t);
        let rho = self.rho_l(t);
        let drho = self.rho_l_sat.deriv(tau) / self.t_scale;
        let dh = self.h_l_sat.deriv(tau) / self.t_scale;
        dh - self.dpsat_dt_raw(t) / rho - (p - self.psat(t)) * drho / (rho * rho)
    }

    /// Saturation temperature without the pressure-range check; `p` must map
    /// into the correlation's temperature range.
    pub(crate) fn tsat_raw(&self, p: f64) -> f64 {
        let target = p.ln();
        // Clausius-Clapeyron starting guess around the normal boiling point.
        let mut t = 1.0 / (1.0 / 20.27 - (target - 101_325f64.ln()) / 118.0);
        t = t.clamp(self.t_min, self.t_max);
        for _ in 0..50 {
            let tau = self.tau(t);
            let f = self.ln_p_sat.eval(tau) - target;
            let d = self.ln_p_sat.deriv(tau) / self.t_scale;
            let step = f / d;
            t = (t - step).clamp(self.t_min, self.t_max);
            if step.abs() < 1e-12 {
                break;
            }
        }
        t
    }

    /// Saturation pressure (Pa) at temperature `t` (K).
    pub fn saturation_pressure(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.psat(t))
    }

    /// Saturation temperature (K) at pressure `p` (Pa).
    pub fn saturation_temperature(&self, p: f64) -> Result<f64> {
        self.check_p(p)?;
        Ok(self.tsat_raw(p))
    }

    /// Slope of the saturation curve, Pa/K.
    pub fn saturation_slope(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.dpsat_dt_raw(t))
    }

    pub fn saturated_liquid_density(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.rho_l(t))
    }

    pub fn saturated_vapor_density(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.rho_v(t))
    }

    /// Liquid density at (t, p); the state must be subcooled or saturated.
    pub fn liquid_density(&self, t: f64, p: f64) -> Result<f64> {
        self.check_t(t)?;
        let psat = self.psat(t);
        if p < psat * (1.0 - 1e-9) {
            return Err(Error::NotLiquid(format!(
                "{p:.1} Pa is below the saturation pressure {psat:.1} Pa at {t:.3} K"
            )));
        }
        Ok(self.rho_l(t) * (1.0 + self.compressibility * (p - psat)))
    }

    pub fn saturated_liquid_enthalpy(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.h_l(t))
    }

    /// Subcooled or saturated liquid enthalpy, J/kg.
    pub fn liquid_enthalpy(&self, t: f64, p: f64) -> Result<f64> {
        self.check_t(t)?;
        let psat = self.psat(t);
        if p < psat * (1.0 - 1e-9) {
            return Err(Error::NotLiquid(format!(
                "{p:.1} Pa is below the saturation pressure {psat:.1} Pa at {t:.3} K"
            )));
        }
        Ok(self.h_sub(t, p))
    }

    /// Saturated vapour enthalpy at pressure `p`.
    pub fn vapor_enthalpy(&self, p: f64) -> Result<f64> {
        let t = self.saturation_temperature(p)?;
        Ok(self.h_l(t) + self.hfg(t))
    }

    /// Latent heat of vaporisation at pressure `p`, J/kg.
    pub fn latent_heat(&self, p: f64) -> Result<f64> {
        let t = self.saturation_temperature(p)?;
        Ok(self.hfg(t))
    }

    pub fn latent_heat_at_temperature(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.hfg(t))
    }

    /// Isobaric liquid heat capacity at saturation, J/(kg K).
    pub fn liquid_cp(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.dh_sub_dt(t, self.psat(t)))
    }

    pub fn liquid_viscosity(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.ln_mu_l.eval(self.tau(t)).exp())
    }

    pub fn vapor_viscosity(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.mu_v.eval(self.tau(t)))
    }

    pub fn liquid_conductivity(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        Ok(self.k_l.eval(self.tau(t)))
    }

    /// Saturated liquid and vapour specific internal energies at `t`.
    #[inline]
    pub(crate) fn u_sat(&self, t: f64) -> (f64, f64) {
        let p = self.psat(t);
        let hl = self.h_l(t);
        (hl - p / self.rho_l(t), hl + self.hfg(t) - p / self.rho_v(t))
    }

    /// Fluid state from pressure and specific enthalpy.
    pub fn state_ph(&self, p: f64, h: f64) -> Result<FluidState> {
        FluidState::from_ph(self, p, h)
    }

    /// Vapour-liquid equilibrium state of a closed volume.
    pub fn flash_uv(&self, mass: f64, internal_energy: f64, volume: f64) -> Result<TankFlash> {
        flash::flash_uv(self, mass, internal_energy, volume)
    }

    /// Writes a property table as CSV text for auditing.
    pub fn table_csv(&self, t_from: f64, t_to: f64, step: f64) -> Result<String> {
        use std::fmt::Write;
        if !(step > 0.0) {
            return Err(Error::config("step", "must be positive"));
        }
        self.check_t(t_from)?;
        self.check_t(t_to)?;
        let mut out = String::from(
            "T_K,p_sat_Pa,rho_l_kg_m3,h_l_J_kg,h_v_J_kg,h_fg_J_kg,mu_l_Pa_s,cp_l_J_kgK\n",
        );
        let n = ((t_to - t_from) / step + 1e-9).floor() as usize;
        for i in 0..=n {
            let t = t_from + i as f64 * step;
            let _ = writeln!(
                out,
                "{:.3},{:.3},{:.4},{:.2},{:.2},{:.2},{:.6e},{:.2}",
                t,
                self.psat(t),
                self.rho_l(t),
                self.h_l(t),
                self.h_l(t) + self.hfg(t),
                self.hfg(t),
                self.liquid_viscosity(t)?,
                self.liquid_cp(t)?
            );
        }
        Ok(out)
    }
}
