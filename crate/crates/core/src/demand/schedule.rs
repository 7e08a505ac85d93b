use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geo::{destination_point, KM_PER_NM};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AircraftClass {
    Regional,
    SingleAisle,
    Medium,
    Long,
}

impl AircraftClass {
    pub const ALL: [AircraftClass; 4] = [
        AircraftClass::Regional,
        AircraftClass::SingleAisle,
        AircraftClass::Medium,
        AircraftClass::Long,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AircraftClass::Regional => "regional",
            AircraftClass::SingleAisle => "single-aisle",
            AircraftClass::Medium => "medium",
            AircraftClass::Long => "long",
        }
    }
}

impl fmt::Display for AircraftClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AircraftClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AircraftClass::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Invalid(format!("unknown aircraft class '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flight {
    /// Seconds after midnight.
    pub departure: f64,
    pub destination_lat: f64,
    pub destination_lon: f64,
    pub class: AircraftClass,
    /// Free-form tag (flight number, airline).
    pub label: String,
}

impl Flight {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..86_400.0).contains(&self.departure) {
            return Err(Error::Invalid(format!("departure {} s outside the day", self.departure)));
        }
        if !(self.destination_lat.abs() <= 90.0) || !(self.destination_lon.abs() <= 180.0) {
            return Err(Error::Invalid(format!(
                "destination ({}, {}) is not a valid coordinate",
                self.destination_lat, self.destination_lon
            )));
        }
        Ok(())
    }

    pub fn hour(&self) -> usize {
        (self.departure / 3600.0) as usize
    }
}

/// Departures from one airport on one day.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub origin_lat: f64,
    pub origin_lon: f64,
    pub flights: Vec<Flight>,
}

/// Amsterdam Schiphol reference point.
pub const AMS: (f64, f64) = (52.3086, 4.7639);

/// Parses `hh:mm`, `hh:mm:ss` or plain seconds.
pub fn parse_clock(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("bad departure time '{s}'"));
    if !s.contains(':') {
        return s.parse().map_err(|_| bad());
    }
    let parts: Vec<f64> = s.split(':').map(|p| p.parse::<u32>().map(f64::from)).collect::<Result<_, _>>().map_err(|_| bad())?;
    match parts[..] {
        [h, m] if m < 60.0 => Ok(h * 3600.0 + m * 60.0),
        [h, m, sec] if m < 60.0 && sec < 60.0 => Ok(h * 3600.0 + m * 60.0 + sec),
        _ => Err(bad()),
    }
}

fn format_clock(seconds: f64) -> String {
    let s = seconds.round() as u64;
    format!("{:02}:{:02}:{:02}", s / 3600, s / 60 % 60, s % 60)
}

#[derive(Debug, Deserialize, Serialize)]
struct Row {
    time: String,
    dest_lat: f64,
    dest_lon: f64,
    class: String,
    #[serde(default)]
    label: String,
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.origin_lat.abs() <= 90.0) || !(self.origin_lon.abs() <= 180.0) {
            return Err(Error::config("origin", "not a valid coordinate"));
        }
        self.flights.iter().try_for_each(Flight::validate)
    }

    /// Reads a schedule with columns `time,dest_lat,dest_lon,class[,label]`.
    /// `time` is `hh:mm[:ss]` or seconds after midnight.
    pub fn read_csv<R: Read>(origin: (f64, f64), reader: R) -> Result<Schedule> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
        let mut flights = Vec::new();
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| Error::Invalid(format!("schedule row {line}: {e}")))?;
            let flight = Flight {
                departure: parse_clock(&row.time)?,
                destination_lat: row.dest_lat,
                destination_lon: row.dest_lon,
                class: row.class.parse()?,
                label: row.label,
            };
            flight.validate().map_err(|e| Error::Invalid(format!("schedule row {line}: {e}")))?;
            flights.push(flight);
        }
        Ok(Schedule { origin_lat: origin.0, origin_lon: origin.1, flights })
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let io = |e: csv::Error| Error::Invalid(format!("writing schedule: {e}"));
        let mut w = csv::Writer::from_writer(writer);
        for f in &self.flights {
            w.serialize(Row {
                time: format_clock(f.departure),
                dest_lat: f.destination_lat,
                dest_lon: f.destination_lon,
                class: f.class.to_string(),
                label: f.label.clone(),
            })
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::Invalid(format!("writing schedule: {e}")))
    }
}

/// Shape of the generated day: departures per hour and the split of
/// destinations into short (below 500 nm), medium and long haul (above 2000 nm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticOptions {
    pub seed: u64,
    pub departures_per_hour: Vec<u32>,
    pub short_fraction: f64,
    pub long_fraction: f64,
    /// Shortest and longest generated distances, km.
    pub min_distance: f64,
    pub max_distance: f64,
    /// Regional fraction of short-haul flights.
    pub regional_fraction: f64,
    /// Single-aisle fraction of medium-haul flights; the rest are medium.
    pub single_aisle_fraction: f64,
    /// Long-class fraction of long-haul flights; the rest are medium.
    pub long_class_fraction: f64,
}

impl Default for SyntheticOptions {
    fn default() -> Self {
        SyntheticOptions {
            seed: 22,
            departures_per_hour: vec![
                2, 1, 0, 0, 1, 4, 26, 46, 32, 32, 30, 32, 30, 28, 30, 28, 32, 30, 30, 28, 24, 16, 8, 4,
            ],
            short_fraction: 0.42,
            long_fraction: 0.22,
            min_distance: 150.0,
            max_distance: 11_000.0,
            regional_fraction: 0.45,
            single_aisle_fraction: 0.95,
            long_class_fraction: 0.6,
        }
    }
}

impl SyntheticOptions {
    pub fn validate(&self) -> Result<()> {
        if self.departures_per_hour.len() != 24 {
            return Err(Error::config("departures_per_hour", "needs 24 entries"));
        }
        for (k, v) in [
            ("short_fraction", self.short_fraction),
            ("long_fraction", self.long_fraction),
            ("regional_fraction", self.regional_fraction),
            ("single_aisle_fraction", self.single_aisle_fraction),
            ("long_class_fraction", self.long_class_fraction),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::config(k, "must lie in [0, 1]"));
            }
        }
        if self.short_fraction + self.long_fraction > 1.0 {
            return Err(Error::config("long_fraction", "short and long fractions exceed 1"));
        }
        let (short, long) = (500.0 * KM_PER_NM, 2000.0 * KM_PER_NM);
        if !(self.min_distance > 0.0 && self.min_distance < short && self.max_distance > long) {
            return Err(Error::config("min_distance", format!("distance range must straddle {short} and {long} km")));
        }
        Ok(())
    }
}

/// Seeded synthetic day of departures with a hub-airport shape: a quiet
/// night, a morning bank at 07:00 and a steady day. Sorted by departure.
pub fn synthetic_schedule(origin: (f64, f64), opts: &SyntheticOptions) -> Result<Schedule> {
    opts.validate()?;
    let (short, long) = (500.0 * KM_PER_NM, 2000.0 * KM_PER_NM);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut flights = Vec::new();
    for (hour, &n) in opts.departures_per_hour.iter().enumerate() {
        let mut times: Vec<f64> = (0..n).map(|_| hour as f64 * 3600.0 + rng.gen_range(0.0..3600.0_f64).floor()).collect();
        times.sort_by(f64::total_cmp);
        for t in times {
            let band: f64 = rng.gen();
            let u: f64 = rng.gen();
            let c: f64 = rng.gen();
            let (distance, class) = if band < opts.short_fraction {
                let d = opts.min_distance + (short - opts.min_distance) * u;
                (d, if c < opts.regional_fraction { AircraftClass::Regional } else { AircraftClass::SingleAisle })
            } else if band < 1.0 - opts.long_fraction {
                // Medium haul thins out towards the range limit.
                let d = short + (long - short) * u * u;
                (d, if c < opts.single_aisle_fraction { AircraftClass::SingleAisle } else { AircraftClass::Medium })
            } else {
                let d = long + (opts.max_distance - long) * u;
                (d, if c < opts.long_class_fraction { AircraftClass::Long } else { AircraftClass::Medium })
            };
            let bearing = rng.gen_range(0.0..360.0);
            let (lat, lon) = destination_point(origin.0, origin.1, bearing, distance);
            flights.push(Flight {
                departure: t,
                destination_lat: lat,
                destination_lon: lon,
                class,
                label: format!("SYN{:04}", flights.len() + 1),
            });
        }
    }
    Ok(Schedule { origin_lat: origin.0, origin_lon: origin.1, flights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demand::geo::great_circle_km;

    #[test]
    fn clock_parsing() {
        assert_eq!(parse_clock("07:10").unwrap(), 25_800.0);
        assert_eq!(parse_clock("07:10:30").unwrap(), 25_830.0);
        assert_eq!(parse_clock("600").unwrap(), 600.0);
        assert!(parse_clock("7:75").is_err());
        assert!(parse_clock("noon").is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let s = synthetic_schedule(AMS, &SyntheticOptions::default()).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = Schedule::read_csv(AMS, buf.as_slice()).unwrap();
        assert_eq!(back.flights.len(), s.flights.len());
        for (a, b) in back.flights.iter().zip(&s.flights) {
            assert_eq!(a.class, b.class);
            assert_eq!(a.departure, b.departure);
            assert_eq!(a.destination_lat, b.destination_lat);
        }
    }

    #[test]
    fn bad_rows_rejected() {
        let text = "time,dest_lat,dest_lon,class\n07:00,95,0,regional\n";
        assert!(Schedule::read_csv(AMS, text.as_bytes()).is_err());
        let text = "time,dest_lat,dest_lon,class\n07:00,50,0,turboprop\n";
        assert!(Schedule::read_csv(AMS, text.as_bytes()).is_err());
        let text = "time,dest_lat,dest_lon,class\n24:00,50,0,regional\n";
        assert!(Schedule::read_csv(AMS, text.as_bytes()).is_err());
    }

    #[test]
    fn synthetic_is_seeded_and_shaped() {
        let opts = SyntheticOptions::default();
        let a = synthetic_schedule(AMS, &opts).unwrap();
        let b = synthetic_schedule(AMS, &opts).unwrap();
        assert_eq!(a, b);
        let total: u32 = opts.departures_per_hour.iter().sum();
        assert_eq!(a.flights.len(), total as usize);
        assert!(a.flights.windows(2).all(|w| w[0].departure <= w[1].departure));
        let n = a.flights.len() as f64;
        let dist: Vec<f64> = a
            .flights
            .iter()
            .map(|f| great_circle_km(AMS.0, AMS.1, f.destination_lat, f.destination_lon))
            .collect();
        let short = dist.iter().filter(|&&d| d < 926.0).count() as f64 / n;
        let long = dist.iter().filter(|&&d| d > 3704.0).count() as f64 / n;
        assert!((short - 0.42).abs() < 0.06, "{short}");
        assert!((long - 0.22).abs() < 0.06, "{long}");
    }
}
