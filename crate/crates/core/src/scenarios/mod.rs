//! The experiments: transport line, 40 h distribution, refuelling and the
//! daily boil-off report.

pub mod airport;
pub mod bog;
pub mod distribution;
pub mod record;
pub mod refuel;
pub mod transport;
pub mod uq;

pub use bog::{bog_report, BogColumn, BogReport, BogReportInput, Discrepancy};
pub use record::{Summary, TimeSeries, SCHEMA_VERSION};
pub use transport::{
    apply_uq_sample, insulation_sweep, run_transport, split_range_response, subcooling_equivalent,
    threshold_thickness, tpd_to_kg_per_s, transport_uq_outputs, SweepConfig, SweepPoint, SweepResult,
    TransportConfig, TransportResult, DIAMETER_6IN, DIAMETER_8IN, UQ_OUTPUTS, UQ_PARAMETERS,
};
pub use airport::{clock_label, outlet_subcooling, AirportConfig, PipeProfile, Snapshot};
pub use distribution::{run_distribution, DistributionConfig, DistributionResult, DISTRIBUTION_COLUMNS};
pub use refuel::{
    overnight_bog, refuel_columns, run_refuel, AircraftTankConfig, AircraftTotals, RefuelCaseConfig, RefuelResult,
};
pub use uq::{four_km_space, run_transport_uq, TransportUqConfig, TransportUqResult};
