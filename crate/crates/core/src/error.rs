use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("{quantity} = {value} outside valid range [{min}, {max}]")]
    Domain {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("state is not liquid: {0}")]
    NotLiquid(String),

    #[error("flash failed: {0}")]
    Flash(String),

    #[error("pump operating point rejected: efficiency {efficiency:.4} below floor {floor} at {flow:.5} m3/s")]
    PumpOperatingPoint {
        efficiency: f64,
        floor: f64,
        flow: f64,
    },

    #[error("vapour at pump suction (quality {quality:.4})")]
    PumpCavitation { quality: f64 },

    #[error("no flow solution: {0}")]
    NoFlowSolution(String),

    #[error("{what} in cell {cell}: {source}")]
    Cell {
        what: &'static str,
        cell: usize,
        source: Box<Error>,
    },

    #[error("tank '{tank}' supply exhausted: level {level:.4} below minimum fill {min:.4}")]
    SupplyExhausted { tank: String, level: f64, min: f64 },

    #[error("tank '{tank}' overfilled: level {level:.4} above {max:.4}")]
    Overfill { tank: String, level: f64, max: f64 },

    #[error("invalid parameter '{key}': {reason}")]
    Config { key: String, reason: String },

    #[error("output variance is zero; sensitivity indices are undefined")]
    ZeroVariance,

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn in_cell(self, what: &'static str, cell: usize) -> Self {
        Error::Cell {
            what,
            cell,
            source: Box::new(self),
        }
    }

    /// Short machine-readable tag for the failed condition.
    pub fn condition(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "property_range",
            Error::NotLiquid(_) => "not_liquid",
            Error::Flash(_) => "flash_failed",
            Error::PumpOperatingPoint { .. } => "pump_operating_point",
            Error::PumpCavitation { .. } => "pump_suction_two_phase",
            Error::NoFlowSolution(_) => "no_flow_solution",
            Error::Cell { source, .. } => source.condition(),
            Error::SupplyExhausted { .. } => "supply_exhausted",
            Error::Overfill { .. } => "overfill",
            Error::Config { .. } => "config",
            Error::ZeroVariance => "zero_variance",
            Error::Invalid(_) => "invalid_input",
        }
    }

    /// True for failures of the physical scenario (as opposed to bad input).
    pub fn is_physics(&self) -> bool {
        match self {
            Error::Config { .. } | Error::Invalid(_) | Error::ZeroVariance => false,
            Error::Cell { source, .. } => source.is_physics(),
            _ => true,
        }
    }
}
