use crate::error::{Error, Result};

/// Lower Reynolds bound of the smooth-tube turbulent correlation.
pub const TURBULENT_RE: f64 = 4000.0;

/// Darcy friction factor for a smooth tube.
///
/// Above `TURBULENT_RE` the Konakov correlation `(1.8 log10 Re - 1.5)^-2`
/// applies. Below it the larger of the laminar value and the correlation is
/// used, which keeps the factor continuous through transition.
pub fn friction_factor(re: f64) -> Result<f64> {
    if !(re > 0.0) || !re.is_finite() {
        return Err(Error::Domain {
            quantity: "Reynolds number",
            value: re,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    let laminar = 64.0 / re;
    if re > TURBULENT_RE {
        Ok(konakov(re))
    } else if re < 100.0 {
        Ok(laminar)
    } else {
        Ok(laminar.max(konakov(re)))
    }
}

#[inline]
fn konakov(re: f64) -> f64 {
    (1.8 * re.log10() - 1.5).powi(-2)
}
