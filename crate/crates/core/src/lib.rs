//! Dynamic simulation of liquid-hydrogen transport, distribution and
//! aircraft refuelling at airports.
//!
//! The crate is organised bottom-up:
//!
//! - [`props`]: parahydrogen saturation correlations, (p, h) states and the
//!   closed-volume equilibrium flash.
//! - [`flownet`]: pump, pipe, valve and tank components plus the three
//!   network topologies and their fixed-step integrator.
//! - [`control`]: PI loops, split-range, recycle scheduling and fill sequencing.
//! - [`scenarios`]: the transport, distribution and refuelling experiments and
//!   the boil-off report.
//! - [`sensitivity`]: Saltelli sampling and Sobol indices.
//! - [`demand`]: flight-schedule driven hydrogen demand.

pub mod control;
pub mod demand;
pub mod error;
pub mod flownet;
pub mod numeric;
pub mod props;
pub mod scenarios;
pub mod sensitivity;

pub use error::{Error, Result};
pub use props::{FluidState, PropertySet, TankFlash};
