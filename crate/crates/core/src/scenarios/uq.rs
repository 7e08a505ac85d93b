use serde::{Deserialize, Serialize};

use super::record::TimeSeries;
use super::transport::{transport_uq_outputs, TransportConfig, DIAMETER_8IN, UQ_OUTPUTS, UQ_PARAMETERS};
use crate::error::{Error, Result};
use crate::props::PropertySet;
use crate::sensitivity::{
    evaluate, saltelli_sample, sobol_indices, uq_histograms, Histogram, IndexOptions, IndexReport, ParameterSpace,
    SampleOptions,
};

/// Uncertain inputs of the 4 km line, ordered as [`UQ_PARAMETERS`].
pub fn four_km_space() -> ParameterSpace {
    ParameterSpace::new(vec![
        (UQ_PARAMETERS[0], 278.0, 308.0),
        (UQ_PARAMETERS[1], 0.5, 0.7),
        (UQ_PARAMETERS[2], 0.08, 0.10),
        (UQ_PARAMETERS[3], 0.025, 0.05),
    ])
    .expect("valid space")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransportUqConfig {
    pub base: TransportConfig,
    pub space: ParameterSpace,
    /// Base sample count N; the design has N·(2d + 2) runs.
    pub base_samples: usize,
    /// Leading sequence points skipped; N when unset.
    pub skip: Option<u64>,
    /// Random shift of the sequence; unscrambled when unset.
    pub shift_seed: Option<u64>,
    pub bootstrap_resamples: usize,
    pub bootstrap_seed: u64,
    pub histogram_bins: usize,
}

impl Default for TransportUqConfig {
    fn default() -> Self {
        Self::four_km(DIAMETER_8IN)
    }
}

impl TransportUqConfig {
    pub fn four_km(diameter: f64) -> Self {
        TransportUqConfig {
            base: TransportConfig::four_km(diameter),
            space: four_km_space(),
            base_samples: 128,
            skip: None,
            shift_seed: None,
            bootstrap_resamples: 200,
            bootstrap_seed: 0,
            histogram_bins: 20,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.space.validate()?;
        if self.space.names() != UQ_PARAMETERS.to_vec() {
            return Err(Error::config("space", format!("parameters must be {UQ_PARAMETERS:?} in this order")));
        }
        if self.base_samples == 0 {
            return Err(Error::config("base_samples", "must be positive"));
        }
        if self.histogram_bins == 0 {
            return Err(Error::config("histogram_bins", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportUqResult {
    pub samples: Vec<Vec<f64>>,
    /// One row per sample, columns as [`UQ_OUTPUTS`].
    pub outputs: Vec<Vec<f64>>,
    pub two_phase: Vec<bool>,
    pub indices: Vec<IndexReport>,
    pub histograms: Vec<Histogram>,
}

impl TransportUqResult {
    pub fn output(&self, name: &str) -> Vec<f64> {
        let j = UQ_OUTPUTS.iter().position(|&o| o == name).unwrap_or_else(|| panic!("no output '{name}'"));
        self.outputs.iter().map(|r| r[j]).collect()
    }

    pub fn report(&self, name: &str) -> Option<&IndexReport> {
        self.indices.iter().find(|r| r.output == name)
    }

    pub fn samples_table(&self) -> TimeSeries {
        let mut t = TimeSeries::new(UQ_PARAMETERS);
        for s in &self.samples {
            t.push(s.clone());
        }
        t
    }

    pub fn outputs_table(&self) -> TimeSeries {
        let mut cols: Vec<&str> = UQ_OUTPUTS.to_vec();
        cols.push("two_phase");
        let mut t = TimeSeries::new(cols);
        for (o, &tp) in self.outputs.iter().zip(&self.two_phase) {
            let mut row = o.clone();
            row.push(if tp { 1.0 } else { 0.0 });
            t.push(row);
        }
        t
    }
}

/// Runs the Saltelli design through the transport model and estimates the
/// indices and histograms of every output.
pub fn run_transport_uq(props: &PropertySet, config: &TransportUqConfig, workers: Option<usize>) -> Result<TransportUqResult> {
    config.validate()?;
    let samples = saltelli_sample(
        &config.space,
        config.base_samples,
        SampleOptions { skip: config.skip, shift_seed: config.shift_seed },
    )?;
    let runs = evaluate(&samples, workers, |x| transport_uq_outputs(props, &config.base, x))?;
    let (outputs, two_phase): (Vec<Vec<f64>>, Vec<bool>) = runs.into_iter().unzip();
    let opts = IndexOptions {
        bootstrap_resamples: config.bootstrap_resamples,
        seed: config.bootstrap_seed,
        ..IndexOptions::default()
    };
    let indices = UQ_OUTPUTS
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let y: Vec<f64> = outputs.iter().map(|r| r[j]).collect();
            sobol_indices(&config.space, name, &y, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let histograms = uq_histograms(&outputs, &UQ_OUTPUTS, config.histogram_bins)?;
    Ok(TransportUqResult { samples, outputs, two_phase, indices, histograms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_design_runs() {
        let cfg = TransportUqConfig { base_samples: 2, bootstrap_resamples: 10, ..TransportUqConfig::default() };
        let r = run_transport_uq(PropertySet::parahydrogen(), &cfg, Some(2)).unwrap();
        assert_eq!(r.samples.len(), 20);
        assert_eq!(r.outputs.len(), 20);
        assert_eq!(r.indices.len(), 4);
        assert!(r.two_phase.iter().all(|&t| !t));
        assert_eq!(r.histograms[0].total(), 20);
    }

    #[test]
    fn reordered_space_rejected() {
        let mut cfg = TransportUqConfig::default();
        cfg.space.parameters.swap(0, 1);
        assert!(cfg.validate().is_err());
    }
}
