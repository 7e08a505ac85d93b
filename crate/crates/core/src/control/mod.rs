//! Discrete-time controllers and operating schedules.

mod pi;
mod schedule;
mod sequencer;

pub use pi::{pi_step, FirstOrderFilter, PiSpec, PiState};
pub use schedule::{recycle_setpoint, split_range, RecycleSchedule, DEFAULT_MIN_SPEED};
pub use sequencer::{FillEntry, FillStart, Sequencer};
