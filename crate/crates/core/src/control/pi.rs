use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// PI tuning with output limits. Output = bias + gain·e + integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiSpec {
    pub gain: f64,
    /// Integral time, s.
    pub integral_time: f64,
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub bias: f64,
}

impl PiSpec {
    /// Flow loop driving a valve opening from a kg/s error.
    pub fn flow_loop() -> Self {
        PiSpec {
            gain: 0.05,
            integral_time: 2.0,
            lo: 0.0,
            hi: 1.0,
            bias: 0.0,
        }
    }

    pub fn validate(&self, key: &str) -> Result<()> {
        if !(self.integral_time > 0.0) {
            return Err(Error::config(format!("{key}.integral_time"), "must be positive"));
        }
        if !(self.lo < self.hi) {
            return Err(Error::config(format!("{key}.lo"), "must be below hi"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PiState {
    pub integral: f64,
    pub output: f64,
}

impl PiState {
    /// State that outputs `output` at zero error (bumpless start).
    pub fn holding(spec: &PiSpec, output: f64) -> Self {
        PiState {
            integral: output - spec.bias,
            output,
        }
    }
}

/// One PI update. The integral is frozen while the output is pinned at a
/// limit and the error pushes further into it.
pub fn pi_step(spec: &PiSpec, state: &PiState, setpoint: f64, measurement: f64, dt: f64) -> (f64, PiState) {
    let e = setpoint - measurement;
    let candidate = state.integral + spec.gain * dt / spec.integral_time * e;
    let raw = spec.bias + spec.gain * e + candidate;
    let integral = if (raw > spec.hi && e > 0.0) || (raw < spec.lo && e < 0.0) {
        state.integral
    } else {
        candidate
    };
    let output = (spec.bias + spec.gain * e + integral).clamp(spec.lo, spec.hi);
    (output, PiState { integral, output })
}

/// First-order lag, used for flow transmitters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstOrderFilter {
    pub time_constant: f64,
    pub value: f64,
}

impl FirstOrderFilter {
    pub fn new(time_constant: f64, value: f64) -> Self {
        FirstOrderFilter { time_constant, value }
    }

    pub fn update(&mut self, input: f64, dt: f64) -> f64 {
        if self.time_constant <= 0.0 {
            self.value = input;
        } else {
            self.value += (input - self.value) * (1.0 - (-dt / self.time_constant).exp());
        }
        self.value
    }
}
