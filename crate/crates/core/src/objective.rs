//! Weighted objective over makespan (`j1`), average finishing time (`j2`) and
//! average driven distance (`j3`).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AugmentedPlan, Instance, MissionPlan};
use crate::schedule::{simulate, Schedule};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveWeights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

impl Default for ObjectiveWeights {
    /// Makespan dominates; finishing time and distance act as tie breakers.
    fn default() -> Self {
        ObjectiveWeights {
            w1: 1.0,
            w2: 0.2,
            w3: 0.1,
        }
    }
}

impl ObjectiveWeights {
    pub fn new(w1: f64, w2: f64, w3: f64) -> Result<Self> {
        let w = ObjectiveWeights { w1, w2, w3 };
        w.validate()?;
        Ok(w)
    }

    pub fn makespan_only() -> Self {
        ObjectiveWeights {
            w1: 1.0,
            w2: 0.0,
            w3: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ws = [self.w1, self.w2, self.w3];
        if ws.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidInput(format!(
                "weights must be finite and nonnegative, found ({}, {}, {})",
                self.w1, self.w2, self.w3
            )));
        }
        if ws.iter().all(|&w| w == 0.0) {
            return Err(Error::InvalidInput("at least one weight must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    /// Latest finishing time over all robots, s.
    pub j1: f64,
    /// Mean finishing time, s.
    pub j2: f64,
    /// Mean driven distance, m.
    pub j3: f64,
    pub total: f64,
}

impl ObjectiveBreakdown {
    pub fn from_schedule(schedule: &Schedule, weights: ObjectiveWeights) -> Self {
        let m = schedule.timelines.len();
        if m == 0 {
            return ObjectiveBreakdown {
                j1: 0.0,
                j2: 0.0,
                j3: 0.0,
                total: 0.0,
            };
        }
        let j1 = schedule
            .timelines
            .iter()
            .map(|t| t.finishing_time)
            .fold(0.0, f64::max);
        let j2 = schedule.timelines.iter().map(|t| t.finishing_time).sum::<f64>() / m as f64;
        let j3 = schedule.timelines.iter().map(|t| t.total_distance).sum::<f64>() / m as f64;
        ObjectiveBreakdown {
            j1,
            j2,
            j3,
            total: weights.w1 * j1 + weights.w2 * j2 + weights.w3 * j3,
        }
    }
}

/// Simulates the plan and aggregates with the instance weights. Partial plans
/// are evaluated on their assigned content only.
pub fn evaluate(plan: &AugmentedPlan<'_>, instance: &Instance) -> Result<ObjectiveBreakdown> {
    let schedule = simulate(plan, instance)?;
    Ok(ObjectiveBreakdown::from_schedule(&schedule, instance.weights()))
}

/// [`evaluate`] with the instance's full precedence relation.
pub fn evaluate_plan(plan: &MissionPlan, instance: &Instance) -> Result<ObjectiveBreakdown> {
    evaluate(&plan.augment(instance.precedence()), instance)
}
