use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs of the daily boil-off estimate. Masses in kg.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BogReportInput {
    pub first_fill_low: f64,
    pub subsequent_fill_low: f64,
    pub fills_low: u32,
    pub first_fill_high: f64,
    pub subsequent_fill_high: f64,
    pub fills_high: u32,
    /// kg/day from the fuel-farm tank.
    pub storage_bog: f64,
    pub overnight_per_aircraft: f64,
    pub overnight_aircraft_low: u32,
    pub overnight_aircraft_high: u32,
    /// Published totals to compare against, if any.
    pub printed_refuelling_low: Option<f64>,
    pub printed_refuelling_high: Option<f64>,
    pub printed_total_low: Option<f64>,
    pub printed_total_high: Option<f64>,
    /// Differences above this are flagged, kg.
    pub tolerance: f64,
}

impl Default for BogReportInput {
    fn default() -> Self {
        BogReportInput {
            first_fill_low: 71.0,
            subsequent_fill_low: 53.0,
            fills_low: 3,
            first_fill_high: 92.0,
            subsequent_fill_high: 73.0,
            fills_high: 58,
            storage_bog: 356.0,
            overnight_per_aircraft: 77.0,
            overnight_aircraft_low: 0,
            overnight_aircraft_high: 10,
            printed_refuelling_low: Some(176.0),
            printed_refuelling_high: Some(4243.0),
            printed_total_low: Some(532.0),
            printed_total_high: Some(5369.0),
            tolerance: 0.5,
        }
    }
}

impl BogReportInput {
    pub fn zero() -> Self {
        BogReportInput {
            first_fill_low: 0.0,
            subsequent_fill_low: 0.0,
            first_fill_high: 0.0,
            subsequent_fill_high: 0.0,
            storage_bog: 0.0,
            overnight_per_aircraft: 0.0,
            printed_refuelling_low: None,
            printed_refuelling_high: None,
            printed_total_low: None,
            printed_total_high: None,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let values = [
            ("first_fill_low", self.first_fill_low),
            ("subsequent_fill_low", self.subsequent_fill_low),
            ("first_fill_high", self.first_fill_high),
            ("subsequent_fill_high", self.subsequent_fill_high),
            ("storage_bog", self.storage_bog),
            ("overnight_per_aircraft", self.overnight_per_aircraft),
            ("tolerance", self.tolerance),
        ];
        for (k, v) in values {
            if !(v >= 0.0) {
                return Err(Error::config(k, "must not be negative"));
            }
        }
        Ok(())
    }
}

/// One scenario column of the report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogColumn {
    pub refuelling: f64,
    pub storage: f64,
    pub overnight: f64,
    pub total: f64,
}

/// Computed value that disagrees with a printed one.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    pub row: &'static str,
    pub scenario: &'static str,
    pub computed: f64,
    pub printed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BogReport {
    pub low: BogColumn,
    pub high: BogColumn,
    pub discrepancies: Vec<Discrepancy>,
}

fn column(first: f64, subsequent: f64, fills: u32, input: &BogReportInput, overnight_aircraft: u32) -> BogColumn {
    let refuelling = if fills == 0 {
        0.0
    } else {
        first + f64::from(fills - 1) * subsequent
    };
    let overnight = input.overnight_per_aircraft * f64::from(overnight_aircraft);
    BogColumn {
        refuelling,
        storage: input.storage_bog,
        overnight,
        total: refuelling + input.storage_bog + overnight,
    }
}

/// Daily boil-off totals for the low and high scenarios, with any
/// disagreement against published figures listed.
pub fn bog_report(input: &BogReportInput) -> Result<BogReport> {
    input.validate()?;
    let low = column(
        input.first_fill_low,
        input.subsequent_fill_low,
        input.fills_low,
        input,
        input.overnight_aircraft_low,
    );
    let high = column(
        input.first_fill_high,
        input.subsequent_fill_high,
        input.fills_high,
        input,
        input.overnight_aircraft_high,
    );
    let mut discrepancies = Vec::new();
    let checks = [
        ("refuelling", "low", low.refuelling, input.printed_refuelling_low),
        ("refuelling", "high", high.refuelling, input.printed_refuelling_high),
        ("total", "low", low.total, input.printed_total_low),
        ("total", "high", high.total, input.printed_total_high),
    ];
    for (row, scenario, computed, printed) in checks {
        if let Some(printed) = printed {
            if (computed - printed).abs() > input.tolerance {
                discrepancies.push(Discrepancy { row, scenario, computed, printed });
            }
        }
    }
    Ok(BogReport { low, high, discrepancies })
}

impl BogReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema={} table=bog_report\n", super::record::SCHEMA_VERSION);
        out.push_str("row,low_kg,high_kg\n");
        for (name, l, h) in [
            ("refuelling", self.low.refuelling, self.high.refuelling),
            ("stationary_storage", self.low.storage, self.high.storage),
            ("aircraft_overnight", self.low.overnight, self.high.overnight),
            ("total", self.low.total, self.high.total),
        ] {
            out.push_str(&format!("{name},{l},{h}\n"));
        }
        out
    }

    /// Human-readable notes on disagreements with the printed figures.
    pub fn notes(&self) -> Vec<String> {
        self.discrepancies
            .iter()
            .map(|d| {
                format!(
                    "{} ({}) computed {} kg differs from printed {} kg by {:+} kg",
                    d.row,
                    d.scenario,
                    d.computed,
                    d.printed,
                    d.computed - d.printed
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_inputs_and_flags() {
        let r = bog_report(&BogReportInput::default()).unwrap();
        assert_eq!(r.low.refuelling, 177.0);
        assert_eq!(r.high.refuelling, 4253.0);
        assert_eq!(r.low.total, 533.0);
        assert_eq!(r.high.total, 5379.0);
        assert_eq!(r.high.overnight, 770.0);
        assert_eq!(r.discrepancies.len(), 4);
        assert!(r.notes()[3].contains("+10"));
    }

    #[test]
    fn zeros() {
        let r = bog_report(&BogReportInput::zero()).unwrap();
        assert_eq!(r.low.total, 0.0);
        assert_eq!(r.high.total, 0.0);
        assert!(r.discrepancies.is_empty());
    }

    #[test]
    fn single_fill() {
        let input = BogReportInput {
            first_fill_low: 42.0,
            fills_low: 1,
            ..BogReportInput::zero()
        };
        assert_eq!(bog_report(&input).unwrap().low.total, 42.0);
    }

    #[test]
    fn negative_input_rejected() {
        let input = BogReportInput { storage_bog: -1.0, ..BogReportInput::zero() };
        assert!(bog_report(&input).is_err());
    }
}
