use crate::error::{Error, Result};
use crate::numeric::brent;

use super::PropertySet;

/// Equilibrium state of a closed volume holding liquid and/or vapour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TankFlash {
    pub pressure: f64,
    pub temperature: f64,
    pub quality: f64,
    /// Liquid volume / total volume.
    pub level: f64,
    pub liquid_density: f64,
    pub vapor_density: f64,
    pub liquid_mass: f64,
    pub vapor_mass: f64,
    /// Specific internal energies of the two phases, J/kg.
    pub liquid_internal_energy: f64,
    pub vapor_internal_energy: f64,
}

impl TankFlash {
    /// Recomputes total mass from the phase split.
    pub fn total_mass(&self) -> f64 {
        self.liquid_mass + self.vapor_mass
    }

    pub fn total_internal_energy(&self) -> f64 {
        self.liquid_mass * self.liquid_internal_energy + self.vapor_mass * self.vapor_internal_energy
    }

    pub fn total_volume(&self) -> f64 {
        self.liquid_mass / self.liquid_density + self.vapor_mass / self.vapor_density
    }
}

pub(super) fn flash_uv(props: &PropertySet, mass: f64, energy: f64, volume: f64) -> Result<TankFlash> {
    if !(mass > 0.0 && volume > 0.0) || !energy.is_finite() {
        return Err(Error::Flash(format!(
            "mass {mass} kg and volume {volume} m3 must be positive"
        )));
    }
    let v = volume / mass;
    let u = energy / mass;
    let (t_min, t_max) = props.temperature_range();

    // Saturated liquid with the same specific internal energy decides the phase;
    // energies above the whole liquid line can only be two-phase.
    let (ul_min, _) = props.u_sat(t_min);
    let (ul_max, _) = props.u_sat(t_max);
    if u < ul_min {
        return Err(Error::Flash(format!(
            "specific internal energy {u:.1} J/kg below the liquid range of the property fit"
        )));
    }
    let flash = if u >= ul_max {
        two_phase(props, mass, v, u)?
    } else {
        let t_liq = brent(|t| props.u_sat(t).0 - u, t_min, t_max, 1e-12, 200)
            .ok_or_else(|| Error::Flash(format!("no liquid temperature for u = {u:.1} J/kg")))?;
        if v <= 1.0 / props.rho_l(t_liq) {
            compressed_liquid(props, v, u, t_liq)?
        } else {
            two_phase(props, mass, v, u)?
        }
    };
    let (p_min, p_max) = props.pressure_range();
    if !(flash.pressure >= p_min && flash.pressure <= p_max) {
        return Err(Error::Domain {
            quantity: "tank pressure (Pa)",
            value: flash.pressure,
            min: p_min,
            max: p_max,
        });
    }
    Ok(TankFlash {
        liquid_mass: (1.0 - flash.quality) * mass,
        vapor_mass: flash.quality * mass,
        ..flash
    })
}

fn compressed_liquid(props: &PropertySet, v: f64, u: f64, t_guess: f64) -> Result<TankFlash> {
    let rho = 1.0 / v;
    let kappa = props.liquid_compressibility();
    let pressure = |t: f64| props.psat(t) + (rho / props.rho_l(t) - 1.0) / kappa;
    let resid = |t: f64| {
        let p = pressure(t);
        props.h_sub(t, p) - p * v - u
    };
    let (t_min, t_max) = props.temperature_range();
    let lo = (t_guess - 2.0).max(t_min);
    let hi = (t_guess + 0.5).min(t_max);
    let t = brent(resid, lo, hi, 1e-12, 200)
        .ok_or_else(|| Error::Flash("no compressed-liquid solution".into()))?;
    let p = pressure(t);
    Ok(TankFlash {
        pressure: p,
        temperature: t,
        quality: 0.0,
        level: 1.0,
        liquid_density: rho,
        vapor_density: props.rho_v(t),
        liquid_mass: 0.0,
        vapor_mass: 0.0,
        liquid_internal_energy: u,
        vapor_internal_energy: props.u_sat(t).1,
    })
}

fn two_phase(props: &PropertySet, mass: f64, v: f64, u: f64) -> Result<TankFlash> {
    let (t_min, t_max) = props.temperature_range();
    let quality = |t: f64| {
        let vl = 1.0 / props.rho_l(t);
        let vv = 1.0 / props.rho_v(t);
        (v - vl) / (vv - vl)
    };
    let resid = |t: f64| {
        let (ul, uv) = props.u_sat(t);
        ul + quality(t) * (uv - ul) - u
    };
    let t = brent(resid, t_min, t_max, 1e-13, 200).ok_or_else(|| {
        Error::Flash(format!(
            "no two-phase solution for v = {v:.5} m3/kg, u = {u:.1} J/kg"
        ))
    })?;
    let x = quality(t);
    if x > 1.0 {
        return Err(Error::Flash(format!("contents fully vapour (quality {x:.3})")));
    }
    let x = x.max(0.0);
    let rho_l = props.rho_l(t);
    let (ul, uv) = props.u_sat(t);
    let liquid_mass = (1.0 - x) * mass;
    Ok(TankFlash {
        pressure: props.psat(t),
        temperature: t,
        quality: x,
        level: (liquid_mass / rho_l) / (mass * v),
        liquid_density: rho_l,
        vapor_density: props.rho_v(t),
        liquid_mass,
        vapor_mass: x * mass,
        liquid_internal_energy: ul,
        vapor_internal_energy: uv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn props() -> &'static PropertySet {
        PropertySet::parahydrogen()
    }

    #[test]
    fn forward_construct_then_invert() {
        let p_star = 1.45e5;
        let t = props().saturation_temperature(p_star).unwrap();
        let (ul, uv) = props().u_sat(t);
        let (ml, mv) = (3000.0, 40.0);
        let volume = ml / props().rho_l(t) + mv / props().rho_v(t);
        let f = props().flash_uv(ml + mv, ml * ul + mv * uv, volume).unwrap();
        assert_relative_eq!(f.pressure, p_star, max_relative = 0.005);
        assert_relative_eq!(f.quality, mv / (ml + mv), max_relative = 1e-6);
    }

    #[test]
    fn all_liquid_limit() {
        let t = 20.0;
        let p = 1.5e5;
        let rho = props().liquid_density(t, p).unwrap();
        let h = props().liquid_enthalpy(t, p).unwrap();
        let m = 1000.0;
        let volume = m / rho;
        let f = props().flash_uv(m, m * (h - p / rho), volume).unwrap();
        assert_eq!(f.quality, 0.0);
        assert_relative_eq!(f.level, m / (f.liquid_density * volume), max_relative = 1e-12);
        assert_relative_eq!(f.pressure, p, max_relative = 0.02);
    }

    #[test]
    fn conservation() {
        let t = 21.3;
        let (ul, uv) = props().u_sat(t);
        let (m, volume) = (500.0, 9.0);
        let energy = m * (ul + 0.03 * (uv - ul));
        let f = props().flash_uv(m, energy, volume).unwrap();
        assert_relative_eq!(f.total_mass(), m, max_relative = 1e-12);
        assert_relative_eq!(f.total_internal_energy(), energy, max_relative = 1e-9);
        assert_relative_eq!(f.total_volume(), volume, max_relative = 1e-9);
    }

    #[test]
    fn heating_sealed_tank_raises_pressure() {
        let t = 20.9;
        let (ul, _) = props().u_sat(t);
        let (m, volume) = (6000.0, 96.0);
        let e0 = m * ul + 2.0e5;
        let p0 = props().flash_uv(m, e0, volume).unwrap().pressure;
        let p1 = props().flash_uv(m, e0 + 1300.0 * 600.0, volume).unwrap().pressure;
        assert!(p1 > p0);
    }

    #[test]
    fn vapour_only_is_an_error() {
        let t = 21.0;
        let (_, uv) = props().u_sat(t);
        let m = 1.0;
        assert!(props().flash_uv(m, m * uv, 10.0).is_err());
        assert!(props().flash_uv(0.0, 0.0, 1.0).is_err());
    }
}
