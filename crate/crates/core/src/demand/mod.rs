//! Hourly LH₂ and ground-support GH₂ demand from a departure schedule.
//!
//! Each departure is converted to a jet-fuel burn over its routed
//! great-circle distance, the burn is converted to LH₂ by heating value with
//! an energy penalty, and eligible flights are bucketed by departure hour.

pub mod geo;
pub mod schedule;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use geo::{destination_point, great_circle_km, EARTH_RADIUS_KM, KM_PER_NM};
pub use schedule::{parse_clock, synthetic_schedule, AircraftClass, Flight, Schedule, SyntheticOptions, AMS};

use crate::error::{Error, Result};
use crate::sensitivity::{histogram, Histogram};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConversionConstants {
    /// Lower heating values, MJ/kg.
    pub lhv_jet: f64,
    pub lhv_lh2: f64,
    /// Multiplier from great-circle to flown distance.
    pub routing_factor: f64,
    /// Extra energy use of a hydrogen aircraft, fraction.
    pub energy_penalty: f64,
    /// Longest great-circle distance served by hydrogen aircraft, nm.
    pub eligibility_cutoff_nm: f64,
    pub regional_share: f64,
    pub single_aisle_share: f64,
}

impl Default for ConversionConstants {
    fn default() -> Self {
        ConversionConstants {
            lhv_jet: 42.80,
            lhv_lh2: 119.93,
            routing_factor: 1.12,
            energy_penalty: 0.10,
            eligibility_cutoff_nm: 2000.0,
            regional_share: 0.6,
            single_aisle_share: 0.5,
        }
    }
}

impl ConversionConstants {
    pub fn validate(&self) -> Result<()> {
        for (k, v) in [
            ("lhv_jet", self.lhv_jet),
            ("lhv_lh2", self.lhv_lh2),
            ("routing_factor", self.routing_factor),
            ("eligibility_cutoff_nm", self.eligibility_cutoff_nm),
        ] {
            if !(v > 0.0) {
                return Err(Error::config(k, "must be positive"));
            }
        }
        if !(self.energy_penalty >= 0.0) {
            return Err(Error::config("energy_penalty", "must not be negative"));
        }
        for (k, v) in [("regional_share", self.regional_share), ("single_aisle_share", self.single_aisle_share)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(k, "must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// LH₂ mass carrying the same energy as `jet_kg` of jet fuel, plus the penalty.
    pub fn lh2_mass(&self, jet_kg: f64) -> f64 {
        jet_kg * self.lhv_jet / self.lhv_lh2 * (1.0 + self.energy_penalty)
    }

    pub fn cutoff_km(&self) -> f64 {
        self.eligibility_cutoff_nm * KM_PER_NM
    }

    /// Market share of hydrogen aircraft in a class; zero for classes not converted.
    pub fn share(&self, class: AircraftClass) -> f64 {
        match class {
            AircraftClass::Regional => self.regional_share,
            AircraftClass::SingleAisle => self.single_aisle_share,
            AircraftClass::Medium | AircraftClass::Long => 0.0,
        }
    }
}

/// LH₂ equivalent of `jet_kg` with the default constants.
pub fn lh2_mass(jet_kg: f64) -> f64 {
    ConversionConstants::default().lh2_mass(jet_kg)
}

/// Trip burn `reserve + linear·d + quadratic·d²`, kg, with d in km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BurnCoefficients {
    pub reserve: f64,
    pub linear: f64,
    pub quadratic: f64,
}

/// Parametric jet-fuel burn per aircraft class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuelModel {
    pub regional: BurnCoefficients,
    pub single_aisle: BurnCoefficients,
    pub medium: BurnCoefficients,
    pub long: BurnCoefficients,
}

impl Default for FuelModel {
    fn default() -> Self {
        let c = |reserve, linear, quadratic| BurnCoefficients { reserve, linear, quadratic };
        FuelModel {
            regional: c(300.0, 2.0, 2.0e-4),
            single_aisle: c(700.0, 3.0, 1.5e-4),
            medium: c(1500.0, 6.0, 2.0e-4),
            long: c(2500.0, 7.5, 1.5e-4),
        }
    }
}

impl FuelModel {
    pub fn coefficients(&self, class: AircraftClass) -> BurnCoefficients {
        match class {
            AircraftClass::Regional => self.regional,
            AircraftClass::SingleAisle => self.single_aisle,
            AircraftClass::Medium => self.medium,
            AircraftClass::Long => self.long,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for class in AircraftClass::ALL {
            let c = self.coefficients(class);
            if !(c.reserve >= 0.0 && c.linear >= 0.0 && c.quadratic >= 0.0) {
                return Err(Error::config(format!("fuel_model.{}", class.as_str().replace('-', "_")), "coefficients must not be negative"));
            }
        }
        Ok(())
    }

    /// Jet fuel for a flown distance, kg.
    pub fn jet_fuel_burn(&self, distance_km: f64, class: AircraftClass) -> Result<f64> {
        if !(distance_km >= 0.0) {
            return Err(Error::Invalid(format!("distance {distance_km} km")));
        }
        let c = self.coefficients(class);
        Ok(c.reserve + c.linear * distance_km + c.quadratic * distance_km * distance_km)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GseScenario {
    Low,
    Medium,
    High,
}

/// GH₂ used by ground handling per departure, kg, as `[low, medium, high]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GseTable {
    pub regional: [f64; 3],
    pub single_aisle: [f64; 3],
    pub medium: [f64; 3],
    pub long: [f64; 3],
}

impl Default for GseTable {
    /// Medium covers pushback, towing and ground power; high covers every
    /// ground operation.
    fn default() -> Self {
        GseTable {
            regional: [0.4, 1.6, 7.5],
            single_aisle: [0.7, 2.6, 13.0],
            medium: [1.4, 4.8, 27.0],
            long: [2.0, 7.0, 40.0],
        }
    }
}

impl GseTable {
    pub fn per_flight(&self, class: AircraftClass, scenario: GseScenario) -> f64 {
        let row = match class {
            AircraftClass::Regional => &self.regional,
            AircraftClass::SingleAisle => &self.single_aisle,
            AircraftClass::Medium => &self.medium,
            AircraftClass::Long => &self.long,
        };
        row[scenario as usize]
    }

    pub fn validate(&self) -> Result<()> {
        for class in AircraftClass::ALL {
            let [l, m, h] = [GseScenario::Low, GseScenario::Medium, GseScenario::High].map(|s| self.per_flight(class, s));
            if !(l >= 0.0 && l <= m && m <= h) {
                return Err(Error::config(
                    format!("gse.{}", class.as_str().replace('-', "_")),
                    "needs 0 <= low <= medium <= high",
                ));
            }
        }
        Ok(())
    }
}

/// How the market share picks hydrogen flights among candidates of a class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum Selection {
    /// Every candidate whose running count crosses a multiple of 1/share.
    Stride,
    Random { seed: u64 },
}

impl Default for Selection {
    fn default() -> Self {
        Selection::Stride
    }
}

/// Picks hydrogen flights class by class in schedule order.
#[derive(Debug, Clone)]
pub struct Selector {
    rule: Selection,
    seen: [u64; 4],
    rng: ChaCha8Rng,
}

impl Selector {
    pub fn new(rule: Selection) -> Self {
        let seed = match rule {
            Selection::Random { seed } => seed,
            Selection::Stride => 0,
        };
        Selector { rule, seen: [0; 4], rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn select(&mut self, class: AircraftClass, share: f64) -> bool {
        match self.rule {
            Selection::Stride => {
                let k = &mut self.seen[class as usize];
                let before = (*k as f64 * share).floor();
                *k += 1;
                (*k as f64 * share).floor() > before
            }
            Selection::Random { .. } => self.rng.gen_bool(share.clamp(0.0, 1.0)),
        }
    }
}

/// Whether a flight may be flown by a hydrogen aircraft before the market
/// share is applied.
pub fn is_candidate(distance_km: f64, class: AircraftClass, constants: &ConversionConstants) -> bool {
    distance_km <= constants.cutoff_km() && constants.share(class) > 0.0
}

/// Candidate test followed by the market-share draw.
pub fn eligibility(distance_km: f64, class: AircraftClass, constants: &ConversionConstants, selector: &mut Selector) -> bool {
    is_candidate(distance_km, class, constants) && selector.select(class, constants.share(class))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemandConfig {
    pub constants: ConversionConstants,
    pub fuel_model: FuelModel,
    pub gse: GseTable,
    pub gse_scenario: GseScenario,
    pub selection: Selection,
    /// Upper LH₂ thresholds reported as cumulative shares, kg.
    pub share_thresholds: Vec<f64>,
    pub distance_bin_km: f64,
    pub lh2_bin_kg: f64,
}

impl Default for DemandConfig {
    fn default() -> Self {
        DemandConfig {
            constants: ConversionConstants::default(),
            fuel_model: FuelModel::default(),
            gse: GseTable::default(),
            gse_scenario: GseScenario::Medium,
            selection: Selection::Stride,
            share_thresholds: vec![600.0, 2000.0, 5000.0],
            distance_bin_km: 250.0,
            lh2_bin_kg: 250.0,
        }
    }
}

impl DemandConfig {
    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        self.fuel_model.validate()?;
        self.gse.validate()?;
        if self.share_thresholds.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::config("share_thresholds", "must be positive"));
        }
        if !(self.distance_bin_km > 0.0) || !(self.lh2_bin_kg > 0.0) {
            return Err(Error::config("distance_bin_km", "bin widths must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlightDemand {
    pub label: String,
    pub departure: f64,
    pub class: AircraftClass,
    pub distance_km: f64,
    pub routed_km: f64,
    pub hydrogen: bool,
    /// Jet fuel the conventional aircraft would burn, kg.
    pub jet_fuel: f64,
    /// Zero unless the flight is flown on hydrogen.
    pub lh2: f64,
    pub gh2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HourlyDemand {
    pub hour: usize,
    pub departures: usize,
    pub hydrogen_departures: usize,
    pub lh2: f64,
    pub gh2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandResult {
    pub flights: Vec<FlightDemand>,
    /// 24 buckets by departure hour; empty for an empty schedule.
    pub hourly: Vec<HourlyDemand>,
    pub distance_histogram: Histogram,
    pub lh2_histogram: Histogram,
    /// `(threshold kg, fraction of hydrogen departures needing less)`.
    pub shares: Vec<(f64, f64)>,
}

impl DemandResult {
    pub fn total_lh2(&self) -> f64 {
        self.flights.iter().map(|f| f.lh2).sum()
    }

    pub fn total_gh2(&self) -> f64 {
        self.flights.iter().map(|f| f.gh2).sum()
    }

    pub fn peak_hour(&self) -> Option<HourlyDemand> {
        self.hourly.iter().copied().max_by(|a, b| a.lh2.total_cmp(&b.lh2))
    }

    pub fn hourly_csv(&self) -> String {
        let mut out = format!("# schema={} table=demand_hourly\n", crate::scenarios::SCHEMA_VERSION);
        out.push_str("hour,departures,lh2_departures,lh2_kg,gh2_kg\n");
        for h in &self.hourly {
            out.push_str(&format!("{},{},{},{},{}\n", h.hour, h.departures, h.hydrogen_departures, h.lh2, h.gh2));
        }
        out
    }

    pub fn flights_csv(&self) -> String {
        let mut out = format!("# schema={} table=demand_flights\n", crate::scenarios::SCHEMA_VERSION);
        out.push_str("label,departure_s,class,distance_km,routed_km,hydrogen,jet_fuel_kg,lh2_kg,gh2_kg\n");
        for f in &self.flights {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                f.label, f.departure, f.class, f.distance_km, f.routed_km, f.hydrogen as u8, f.jet_fuel, f.lh2, f.gh2
            ));
        }
        out
    }

    pub fn shares_csv(&self) -> String {
        let mut out = format!("# schema={} table=demand_shares\n", crate::scenarios::SCHEMA_VERSION);
        out.push_str("threshold_kg,share_below\n");
        for (t, s) in &self.shares {
            out.push_str(&format!("{t},{s}\n"));
        }
        out
    }
}

fn binned(name: &str, values: &[f64], width: f64) -> Result<Histogram> {
    let top = values.iter().copied().fold(0.0, f64::max);
    let bins = ((top / width).floor() as usize + 1).max(1);
    histogram(name, values, bins, Some((0.0, bins as f64 * width)))
}

/// Per-flight and hourly demand for a schedule.
pub fn hourly_series(schedule: &Schedule, config: &DemandConfig) -> Result<DemandResult> {
    config.validate()?;
    schedule.validate()?;
    let c = &config.constants;
    let mut selector = Selector::new(config.selection);
    let mut flights = Vec::with_capacity(schedule.flights.len());
    for f in &schedule.flights {
        let distance = great_circle_km(schedule.origin_lat, schedule.origin_lon, f.destination_lat, f.destination_lon);
        let routed = distance * c.routing_factor;
        let jet = config.fuel_model.jet_fuel_burn(routed, f.class)?;
        let hydrogen = eligibility(distance, f.class, c, &mut selector);
        flights.push(FlightDemand {
            label: f.label.clone(),
            departure: f.departure,
            class: f.class,
            distance_km: distance,
            routed_km: routed,
            hydrogen,
            jet_fuel: jet,
            lh2: if hydrogen { c.lh2_mass(jet) } else { 0.0 },
            gh2: config.gse.per_flight(f.class, config.gse_scenario),
        });
    }
    let mut hourly = Vec::new();
    if !flights.is_empty() {
        hourly = (0..24).map(|hour| HourlyDemand { hour, ..Default::default() }).collect();
        for (f, src) in flights.iter().zip(&schedule.flights) {
            let h = &mut hourly[src.hour()];
            h.departures += 1;
            h.hydrogen_departures += usize::from(f.hydrogen);
            h.lh2 += f.lh2;
            h.gh2 += f.gh2;
        }
    }
    let distances: Vec<f64> = flights.iter().map(|f| f.distance_km).collect();
    let per_departure: Vec<f64> = flights.iter().filter(|f| f.hydrogen).map(|f| f.lh2).collect();
    let n = per_departure.len();
    let shares = config
        .share_thresholds
        .iter()
        .map(|&t| {
            let below = per_departure.iter().filter(|&&m| m < t).count();
            (t, if n == 0 { 0.0 } else { below as f64 / n as f64 })
        })
        .collect();
    Ok(DemandResult {
        distance_histogram: binned("distance_km", &distances, config.distance_bin_km)?,
        lh2_histogram: binned("lh2_per_departure_kg", &per_departure, config.lh2_bin_kg)?,
        flights,
        hourly,
        shares,
    })
}
