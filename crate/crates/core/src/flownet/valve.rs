use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Control valve with `mdot = opening · C · sqrt(rho · dp)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValveSpec {
    /// Flow coefficient, m² (kg/s per sqrt(kg/m³ · Pa)).
    pub coefficient: f64,
}

impl ValveSpec {
    /// Sizes the valve so that `rated_flow` passes fully open at `rated_dp`.
    pub fn rated(rated_flow: f64, rated_dp: f64, rho: f64) -> Result<Self> {
        if !(rated_flow > 0.0 && rated_dp > 0.0 && rho > 0.0) {
            return Err(Error::config("valve", "rated flow, pressure drop and density must be positive"));
        }
        Ok(ValveSpec {
            coefficient: rated_flow / (rho * rated_dp).sqrt(),
        })
    }

    /// Mass flow; zero when closed or for reverse pressure difference.
    pub fn flow(&self, opening: f64, p_up: f64, p_down: f64, rho: f64) -> f64 {
        let dp = p_up - p_down;
        if opening <= 0.0 || dp <= 0.0 {
            0.0
        } else {
            opening.min(1.0) * self.coefficient * (rho * dp).sqrt()
        }
    }

    /// Pressure drop needed to pass `mdot` at `opening`.
    pub fn pressure_drop(&self, opening: f64, mdot: f64, rho: f64) -> f64 {
        if mdot <= 0.0 {
            return 0.0;
        }
        if opening <= 0.0 {
            return f64::INFINITY;
        }
        let k = opening.min(1.0) * self.coefficient;
        (mdot / k).powi(2) / rho
    }

    /// Opening that passes `mdot` at pressure drop `dp`.
    pub fn opening_for(&self, mdot: f64, dp: f64, rho: f64) -> f64 {
        if mdot <= 0.0 {
            0.0
        } else if dp <= 0.0 {
            f64::INFINITY
        } else {
            mdot / (self.coefficient * (rho * dp).sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sizing_identity() {
        let v = ValveSpec::rated(20.0, 0.3e5, 70.0).unwrap();
        assert_eq!(v.flow(0.0, 2e5, 1e5, 70.0), 0.0);
        assert_relative_eq!(v.flow(1.0, 1.3e5, 1.0e5, 70.0), 20.0, max_relative = 1e-12);
        assert_relative_eq!(
            v.flow(1.0, 1.15e5, 1.0e5, 70.0),
            20.0 * 0.5f64.sqrt(),
            max_relative = 1e-12
        );
        assert_eq!(v.flow(1.0, 1.0e5, 1.2e5, 70.0), 0.0);
    }

    #[test]
    fn inverse_relations() {
        let v = ValveSpec::rated(3.82, 0.05e5, 71.0).unwrap();
        let dp = v.pressure_drop(0.6, 2.5, 71.0);
        assert_relative_eq!(v.flow(0.6, 1e5 + dp, 1e5, 71.0), 2.5, max_relative = 1e-12);
        assert_relative_eq!(v.opening_for(2.5, dp, 71.0), 0.6, max_relative = 1e-12);
    }

    #[test]
    fn monotone_in_opening() {
        let v = ValveSpec::rated(20.0, 0.3e5, 70.0).unwrap();
        let mut last = 0.0;
        for i in 1..=10 {
            let m = v.flow(i as f64 / 10.0, 1.5e5, 1.2e5, 70.0);
            assert!(m > last);
            last = m;
        }
    }
}
