//! Component models and the pumped-network integrator.

pub mod friction;
pub mod insulation;
pub mod network;
pub mod pipe;
pub mod pump;
pub mod tank;
pub mod valve;

pub use friction::friction_factor;
pub use insulation::{radial_heat_ingress, ConductivityModel};
pub use network::{
    Branch, BranchControl, ConservationCheck, Controls, HydraulicSolution, Ledger, Network, Sink, StepReport,
    Suction,
};
pub use pipe::{HeatIngress, Pipe, PipeSegment, PipeStepReport, PressureProfile, WALL_SPECIFIC_HEAT};
pub use pump::{EfficiencyCurve, PumpEnergy, PumpSpec};
pub use tank::{sphere_area, Tank, TankHeat, TankSpec, TankStepReport};
pub use valve::ValveSpec;
