use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A fill counts as complete within this fraction of its target.
pub const FINISH_TOLERANCE: f64 = 1e-3;

/// When a fill may begin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillStart {
    /// Seconds after the start of the run.
    At(f64),
    /// As soon as the entry with this index has finished.
    After(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FillEntry {
    pub aircraft: usize,
    pub start: FillStart,
    /// kg to transfer.
    pub target_mass: f64,
    /// kg/s
    pub max_rate: f64,
}

/// Turns a fill plan into per-aircraft flow setpoints and tracks the mass
/// transferred from measured flows.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequencer {
    plan: Vec<FillEntry>,
    aircraft: usize,
    transferred: Vec<f64>,
    started: Vec<Option<f64>>,
    finished: Vec<Option<f64>>,
}

impl Sequencer {
    pub fn new(plan: Vec<FillEntry>, aircraft: usize) -> Result<Self> {
        for (i, e) in plan.iter().enumerate() {
            if e.aircraft >= aircraft {
                return Err(Error::config(format!("fill_plan[{i}].aircraft"), "no such aircraft"));
            }
            if !(e.target_mass >= 0.0 && e.max_rate > 0.0) {
                return Err(Error::config(format!("fill_plan[{i}]"), "target must be >= 0 and rate > 0"));
            }
            if let FillStart::After(j) = e.start {
                if j >= i {
                    return Err(Error::config(format!("fill_plan[{i}].start"), "may only follow an earlier entry"));
                }
            }
        }
        let n = plan.len();
        Ok(Sequencer {
            plan,
            aircraft,
            transferred: vec![0.0; n],
            started: vec![None; n],
            finished: vec![None; n],
        })
    }

    pub fn plan(&self) -> &[FillEntry] {
        &self.plan
    }

    fn is_due(&self, i: usize, time: f64) -> bool {
        match self.plan[i].start {
            FillStart::At(t) => time >= t,
            FillStart::After(j) => self.finished[j].is_some(),
        }
    }

    /// Per-aircraft setpoints for the step `[time, time + dt)`. The last step
    /// of a fill asks only for the remaining mass.
    pub fn setpoints(&mut self, time: f64, dt: f64) -> Vec<f64> {
        let mut sp = vec![0.0; self.aircraft];
        for i in 0..self.plan.len() {
            if self.finished[i].is_some() || !self.is_due(i, time) {
                continue;
            }
            if self.started[i].is_none() {
                self.started[i] = Some(time);
            }
            let e = &self.plan[i];
            let remaining = e.target_mass - self.transferred[i];
            if remaining <= 0.0 {
                self.finished[i] = Some(time);
                continue;
            }
            sp[e.aircraft] += e.max_rate.min(remaining / dt);
        }
        sp
    }

    /// Books measured per-aircraft flows over `dt` against the running fills.
    pub fn record(&mut self, flows: &[f64], time: f64, dt: f64) {
        for i in 0..self.plan.len() {
            if self.started[i].is_some() && self.finished[i].is_none() {
                self.transferred[i] += flows[self.plan[i].aircraft] * dt;
                if self.transferred[i] >= self.plan[i].target_mass * (1.0 - FINISH_TOLERANCE) {
                    self.finished[i] = Some(time + dt);
                }
            }
        }
    }

    /// Ends a running fill early, e.g. on a high-level trip.
    pub fn stop(&mut self, entry: usize, time: f64) {
        if self.finished[entry].is_none() {
            self.finished[entry] = Some(time);
            self.started[entry].get_or_insert(time);
        }
    }

    /// Index of the running entry for an aircraft.
    pub fn active_entry(&self, aircraft: usize) -> Option<usize> {
        (0..self.plan.len())
            .find(|&i| self.plan[i].aircraft == aircraft && self.started[i].is_some() && self.finished[i].is_none())
    }

    pub fn any_active(&self) -> bool {
        (0..self.plan.len()).any(|i| self.started[i].is_some() && self.finished[i].is_none())
    }

    pub fn all_finished(&self) -> bool {
        self.finished.iter().all(Option::is_some)
    }

    pub fn transferred(&self, entry: usize) -> f64 {
        self.transferred[entry]
    }

    pub fn started_at(&self, entry: usize) -> Option<f64> {
        self.started[entry]
    }

    pub fn finished_at(&self, entry: usize) -> Option<f64> {
        self.finished[entry]
    }
}
