use crate::error::{Error, Result};

/// Equal-width histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub name: String,
    /// `bins + 1` edges.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# schema={} table=histogram variable={}\n",
            crate::scenarios::SCHEMA_VERSION,
            self.name
        );
        out.push_str("lower,upper,count,fraction\n");
        let n = self.total().max(1) as f64;
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", self.edges[i], self.edges[i + 1], c, *c as f64 / n));
        }
        out
    }
}

/// Bins `values` over `[lo, hi]`; the range defaults to the data range.
pub fn histogram(name: &str, values: &[f64], bins: usize, range: Option<(f64, f64)>) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::Invalid("histogram needs at least one bin".into()));
    }
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let (mut lo, mut hi) = range.unwrap_or_else(|| {
        finite
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
    });
    if finite.is_empty() && range.is_none() {
        lo = 0.0;
        hi = 1.0;
    }
    if !(hi > lo) {
        // Degenerate data: centre a narrow window on the value.
        let half = (lo.abs() * 1e-6).max(1e-12);
        lo -= half;
        hi += half;
    }
    let w = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * w).collect();
    let mut counts = vec![0; bins];
    for v in finite {
        if v < lo || v > hi {
            continue;
        }
        let k = (((v - lo) / w) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(Histogram { name: name.to_string(), edges, counts })
}

/// One histogram per output column; `outputs[i][j]` is run i, variable j.
pub fn uq_histograms(outputs: &[Vec<f64>], names: &[&str], bins: usize) -> Result<Vec<Histogram>> {
    names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let col: Vec<f64> = outputs.iter().map(|r| r[j]).collect();
            histogram(name, &col, bins, None)
        })
        .collect()
}
