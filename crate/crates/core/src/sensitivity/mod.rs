//! Variance-based global sensitivity analysis: Saltelli cross-sampling over a
//! Sobol' sequence, first-order and total indices with bootstrap intervals,
//! and histograms of model outputs.

mod histogram;
mod sobol_seq;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub use histogram::{histogram, uq_histograms, Histogram};
pub use sobol_seq::{SobolSequence, MAX_DIMENSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameter {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// Independent uniform parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ParameterSpace {
    pub parameters: Vec<Parameter>,
}

impl ParameterSpace {
    pub fn new(parameters: Vec<(&str, f64, f64)>) -> Result<Self> {
        let space = ParameterSpace {
            parameters: parameters
                .into_iter()
                .map(|(n, l, u)| Parameter { name: n.to_string(), lower: l, upper: u })
                .collect(),
        };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, p) in self.parameters.iter().enumerate() {
            if !(p.lower.is_finite() && p.upper.is_finite() && p.lower < p.upper) {
                return Err(Error::config(format!("parameters.{}", p.name), "lower must be below upper"));
            }
            if self.parameters[..i].iter().any(|q| q.name == p.name) {
                return Err(Error::config(format!("parameters.{}", p.name), "duplicate name"));
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.parameters.len()
    }

    pub fn names(&self) -> Vec<&str> {
        self.parameters.iter().map(|p| p.name.as_str()).collect()
    }

    fn scale(&self, unit: &[f64]) -> Vec<f64> {
        self.parameters
            .iter()
            .zip(unit)
            .map(|(p, &u)| p.lower + u * (p.upper - p.lower))
            .collect()
    }
}

/// Options for [`saltelli_sample`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SampleOptions {
    /// Leading sequence points to drop; `None` skips `n`.
    pub skip: Option<u64>,
    /// Random digital shift of the sequence; `None` keeps it unscrambled.
    pub shift_seed: Option<u64>,
}

/// Saltelli design of `n·(2d + 2)` rows. Rows come in blocks of `2d + 2` per
/// base point: `A`, the `d` matrices `AB_j` (A with column j from B), the `d`
/// matrices `BA_j`, then `B`.
pub fn saltelli_sample(space: &ParameterSpace, n: usize, opts: SampleOptions) -> Result<Vec<Vec<f64>>> {
    space.validate()?;
    let d = space.dimension();
    if d == 0 {
        return Err(Error::Invalid("parameter space is empty".into()));
    }
    if n == 0 {
        return Err(Error::Invalid("base sample count must be positive".into()));
    }
    let seq = SobolSequence::new(2 * d)?;
    let skip = opts.skip.unwrap_or(n as u64);
    let shift: Option<Vec<f64>> = opts.shift_seed.map(|s| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        (0..2 * d).map(|_| rng.gen::<f64>()).collect()
    });
    let mut rows = Vec::with_capacity(n * (2 * d + 2));
    for i in 0..n as u64 {
        let mut x = seq.point(skip + i);
        if let Some(shift) = &shift {
            for (xj, sj) in x.iter_mut().zip(shift) {
                *xj = (*xj + sj).fract();
            }
        }
        let (a, b) = x.split_at(d);
        rows.push(space.scale(a));
        for j in 0..d {
            let mut ab = a.to_vec();
            ab[j] = b[j];
            rows.push(space.scale(&ab));
        }
        for j in 0..d {
            let mut ba = b.to_vec();
            ba[j] = a[j];
            rows.push(space.scale(&ba));
        }
        rows.push(space.scale(b));
    }
    Ok(rows)
}

/// Evaluates `model` on every row, in parallel when `workers` allows.
pub fn evaluate<F, T>(rows: &[Vec<f64>], workers: Option<usize>, model: F) -> Result<Vec<T>>
where
    F: Fn(&[f64]) -> Result<T> + Sync,
    T: Send,
{
    let run = || rows.par_iter().map(|r| model(r)).collect::<Result<Vec<T>>>();
    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Invalid(format!("worker pool: {e}")))?
            .install(run),
        None => run(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterIndices {
    pub name: String,
    pub first: f64,
    pub first_ci: f64,
    pub total: f64,
    pub total_ci: f64,
}

/// Sobol indices of one output.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexReport {
    pub output: String,
    pub base_samples: usize,
    pub parameters: Vec<ParameterIndices>,
}

impl IndexReport {
    pub fn get(&self, name: &str) -> Option<&ParameterIndices> {
        self.parameters.iter().find(|p| p.name == name)
    }

    /// Parameter names ordered by decreasing total index.
    pub fn ranking(&self) -> Vec<&str> {
        let mut v: Vec<&ParameterIndices> = self.parameters.iter().collect();
        v.sort_by(|a, b| b.total.total_cmp(&a.total));
        v.iter().map(|p| p.name.as_str()).collect()
    }
}

/// Index estimation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexOptions {
    pub bootstrap_resamples: usize,
    /// Two-sided confidence level of the reported half-widths.
    pub confidence: f64,
    pub seed: u64,
}

impl Default for IndexOptions {
    fn default() -> Self {
        IndexOptions { bootstrap_resamples: 200, confidence: 0.95, seed: 0 }
    }
}

struct Blocks {
    a: Vec<f64>,
    b: Vec<f64>,
    ab: Vec<Vec<f64>>,
}

fn split_blocks(y: &[f64], d: usize) -> Result<Blocks> {
    let stride = 2 * d + 2;
    if d == 0 || y.is_empty() || y.len() % stride != 0 {
        return Err(Error::Invalid(format!(
            "{} outputs do not form blocks of {stride} rows",
            y.len()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("model outputs must be finite".into()));
    }
    let n = y.len() / stride;
    // Centring on the overall mean keeps the first-order estimator from
    // picking up the output offset.
    let centre = y.iter().sum::<f64>() / y.len() as f64;
    let y: Vec<f64> = y.iter().map(|v| v - centre).collect();
    let mut blocks = Blocks { a: Vec::with_capacity(n), b: Vec::with_capacity(n), ab: vec![Vec::with_capacity(n); d] };
    for chunk in y.chunks(stride) {
        blocks.a.push(chunk[0]);
        for j in 0..d {
            blocks.ab[j].push(chunk[1 + j]);
        }
        blocks.b.push(chunk[stride - 1]);
    }
    Ok(blocks)
}

/// First-order (Saltelli 2010) and total (Jansen) estimates over the rows in `idx`.
fn estimate(bl: &Blocks, j: usize, idx: &[usize]) -> (f64, f64) {
    let n = idx.len() as f64;
    let mean = idx.iter().map(|&i| bl.a[i] + bl.b[i]).sum::<f64>() / (2.0 * n);
    let var = idx
        .iter()
        .map(|&i| (bl.a[i] - mean).powi(2) + (bl.b[i] - mean).powi(2))
        .sum::<f64>()
        / (2.0 * n);
    let (mut s1, mut st) = (0.0, 0.0);
    for &i in idx {
        let (a, b, ab) = (bl.a[i], bl.b[i], bl.ab[j][i]);
        s1 += b * (ab - a);
        st += (a - ab).powi(2);
    }
    (s1 / n / var, 0.5 * st / n / var)
}

/// Two-sided standard-normal quantile for `confidence`.
fn normal_quantile(confidence: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("unit normal").inverse_cdf(0.5 + confidence / 2.0)
}

fn std_dev(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    if v.len() < 2 {
        return 0.0;
    }
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Sobol indices for one output column laid out as [`saltelli_sample`] rows.
pub fn sobol_indices(space: &ParameterSpace, output: &str, y: &[f64], opts: IndexOptions) -> Result<IndexReport> {
    let d = space.dimension();
    let bl = split_blocks(y, d)?;
    let n = bl.a.len();
    let all: Vec<usize> = (0..n).collect();
    let mean = (bl.a.iter().sum::<f64>() + bl.b.iter().sum::<f64>()) / (2.0 * n as f64);
    let var = bl.a.iter().chain(&bl.b).map(|v| (v - mean).powi(2)).sum::<f64>() / (2.0 * n as f64);
    if !(var > 1e-300 * mean.abs().max(1.0)) {
        return Err(Error::ZeroVariance);
    }
    let z = normal_quantile(opts.confidence);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let resamples: Vec<Vec<usize>> = (0..opts.bootstrap_resamples)
        .map(|_| (0..n).map(|_| rng.gen_range(0..n)).collect())
        .collect();
    let parameters = (0..d)
        .map(|j| {
            let (first, total) = estimate(&bl, j, &all);
            let (bs1, bst): (Vec<f64>, Vec<f64>) = resamples
                .iter()
                .map(|r| estimate(&bl, j, r))
                .filter(|(a, b)| a.is_finite() && b.is_finite())
                .unzip();
            ParameterIndices {
                name: space.parameters[j].name.clone(),
                first,
                first_ci: z * std_dev(&bs1),
                total,
                total_ci: z * std_dev(&bst),
            }
        })
        .collect();
    Ok(IndexReport { output: output.to_string(), base_samples: n, parameters })
}

/// Indices table as CSV.
pub fn indices_csv(reports: &[IndexReport]) -> String {
    let mut out = format!("# schema={} table=sobol_indices\n", crate::scenarios::SCHEMA_VERSION);
    out.push_str("output,parameter,S1,S1_conf,ST,ST_conf,N\n");
    for r in reports {
        for p in &r.parameters {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.output, p.name, p.first, p.first_ci, p.total, p.total_ci, r.base_samples
            ));
        }
    }
    out
}

/// The Ishigami test function.
pub fn ishigami(x: &[f64], a: f64, b: f64) -> f64 {
    x[0].sin() + a * x[1].sin().powi(2) + b * x[2].powi(4) * x[0].sin()
}

/// Analytic (S1, S2, S3, ST1, ST2, ST3) of the Ishigami function.
pub fn ishigami_indices(a: f64, b: f64) -> [f64; 6] {
    use std::f64::consts::PI;
    let v1 = 0.5 * (1.0 + b * PI.powi(4) / 5.0).powi(2);
    let v2 = a * a / 8.0;
    let v13 = b * b * PI.powi(8) * (1.0 / 18.0 - 1.0 / 50.0);
    let v = v1 + v2 + v13;
    [v1 / v, v2 / v, 0.0, (v1 + v13) / v, v2 / v, v13 / v]
}
