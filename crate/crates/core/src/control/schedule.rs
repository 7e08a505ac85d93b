use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lowest pump speed fraction of the variable-speed drive.
pub const DEFAULT_MIN_SPEED: f64 = 0.3;

/// Maps one controller output onto (valve opening, pump speed fraction).
/// The lower half of the demand range strokes the valve at minimum speed,
/// the upper half raises the speed with the valve fully open.
pub fn split_range(demand: f64, min_speed: f64) -> (f64, f64) {
    let d = demand.clamp(0.0, 1.0);
    if d <= 0.5 {
        (2.0 * d, min_speed)
    } else {
        (1.0, min_speed + (1.0 - min_speed) * (2.0 * d - 1.0))
    }
}

/// Recycle-flow setpoints over the day.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecycleSchedule {
    /// kg/s while any aircraft is being filled.
    pub refuelling: f64,
    /// kg/s during the day with no filling.
    pub idle: f64,
    /// kg/s outside the day window.
    pub night: f64,
    /// Day window as hours of the clock.
    pub day_start_hour: f64,
    pub day_end_hour: f64,
}

impl Default for RecycleSchedule {
    fn default() -> Self {
        RecycleSchedule {
            refuelling: 0.2,
            idle: 3.0,
            night: 2.8,
            day_start_hour: 6.0,
            day_end_hour: 22.0,
        }
    }
}

impl RecycleSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.refuelling < 0.0 || self.idle < 0.0 || self.night < 0.0 {
            return Err(Error::config("recycle", "setpoints must not be negative"));
        }
        if !(0.0 <= self.day_start_hour && self.day_start_hour < self.day_end_hour && self.day_end_hour <= 24.0) {
            return Err(Error::config("recycle.day_start_hour", "day window must satisfy 0 <= start < end <= 24"));
        }
        Ok(())
    }

    pub fn is_day(&self, clock_seconds: f64) -> bool {
        let h = clock_seconds.rem_euclid(86_400.0) / 3600.0;
        h >= self.day_start_hour && h < self.day_end_hour
    }
}

/// Recycle setpoint at a clock time (seconds after midnight). Active filling
/// takes the refuelling setpoint whatever the hour.
pub fn recycle_setpoint(schedule: &RecycleSchedule, clock_seconds: f64, refuelling_active: bool) -> f64 {
    if refuelling_active {
        schedule.refuelling
    } else if schedule.is_day(clock_seconds) {
        schedule.idle
    } else {
        schedule.night
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_range_end_points() {
        assert_eq!(split_range(0.0, 0.3), (0.0, 0.3));
        assert_eq!(split_range(0.5, 0.3), (1.0, 0.3));
        assert_eq!(split_range(1.0, 0.3), (1.0, 1.0));
        assert_eq!(split_range(0.25, 0.3), (0.5, 0.3));
    }

    #[test]
    fn split_range_is_continuous() {
        let (a, sa) = split_range(0.5 - 1e-9, 0.3);
        let (b, sb) = split_range(0.5 + 1e-9, 0.3);
        assert!((a - b).abs() < 1e-8 && (sa - sb).abs() < 1e-8);
    }

    #[test]
    fn recycle_schedule() {
        let s = RecycleSchedule::default();
        assert_eq!(recycle_setpoint(&s, 10.0 * 3600.0, true), 0.2);
        assert_eq!(recycle_setpoint(&s, 10.0 * 3600.0, false), 3.0);
        assert_eq!(recycle_setpoint(&s, 2.0 * 3600.0, false), 2.8);
        let high = RecycleSchedule { night: 3.8, ..s };
        assert_eq!(recycle_setpoint(&high, 2.0 * 3600.0, false), 3.8);
        assert_eq!(recycle_setpoint(&s, 22.0 * 3600.0, false), 2.8);
        assert_eq!(recycle_setpoint(&s, 26.0 * 3600.0, false), 2.8);
    }
}
