//! Greedy construction: repeatedly append the cheapest executable
//! (task, alliance) pair as a new leaf of every member's route.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{AllianceId, Instance, MissionPlan, PrecedenceSet, TaskId};
use crate::objective::{evaluate, evaluate_plan, ObjectiveBreakdown};

/// Unassigned tasks split into executable (`Λ`, every predecessor assigned)
/// and blocked (`Λ̄`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TaskPools {
    pub executable: BTreeSet<TaskId>,
    pub blocked: BTreeSet<TaskId>,
}

pub fn init_pools(tasks: impl IntoIterator<Item = TaskId>, precedence: &PrecedenceSet) -> TaskPools {
    let mut pools = TaskPools::default();
    for t in tasks {
        if precedence.predecessors(t).next().is_none() {
            pools.executable.insert(t);
        } else {
            pools.blocked.insert(t);
        }
    }
    pools
}

impl TaskPools {
    pub fn is_empty(&self) -> bool {
        self.executable.is_empty() && self.blocked.is_empty()
    }

    /// Removes `task` from the executable set and releases blocked tasks whose
    /// predecessors are now all assigned.
    pub fn commit(&mut self, task: TaskId, precedence: &PrecedenceSet) {
        self.executable.remove(&task);
        let pending = |t: TaskId| self.executable.contains(&t) || self.blocked.contains(&t);
        let released: Vec<TaskId> = self
            .blocked
            .iter()
            .copied()
            .filter(|&b| !precedence.predecessors(b).any(pending))
            .collect();
        for t in released {
            self.blocked.remove(&t);
            self.executable.insert(t);
        }
    }
}

/// One greedy step: the committed pair and the objective increment it caused.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Commit {
    pub task: TaskId,
    pub alliance: AllianceId,
    pub increment: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Construction {
    pub plan: MissionPlan,
    pub objective: ObjectiveBreakdown,
    pub commits: Vec<Commit>,
}

/// Builds a complete, feasible plan. Among candidates with equal increment the
/// last one in (task ascending, alliance declared) order wins. Partial plans
/// carry no end vertices, so intermediate objectives include no terminal travel.
pub fn construct(instance: &Instance) -> Result<Construction> {
    let precedence = instance.precedence();
    let mut pools = init_pools(instance.task_ids(), precedence);
    let mut plan = MissionPlan::empty(instance.robots().len());
    let mut current = evaluate_plan(&plan, instance)?.total;
    let mut commits = Vec::with_capacity(instance.tasks().len());

    while !pools.executable.is_empty() {
        let pairs: Vec<(TaskId, AllianceId)> = pools
            .executable
            .iter()
            .flat_map(|&t| {
                instance
                    .alliances()
                    .iter()
                    .filter(move |a| instance.cost(t, a.id).is_finite())
                    .map(move |a| (t, a.id))
            })
            .collect();
        let scored: Vec<(TaskId, AllianceId, MissionPlan, f64)> = pairs
            .into_par_iter()
            .map(|(t, a)| {
                let alliance = instance.alliance(a).ok_or(Error::UnknownAlliance(a))?;
                let candidate = plan.append_task(t, alliance)?;
                let j = evaluate(&candidate.augment(precedence), instance)?.total;
                Ok((t, a, candidate, j - current))
            })
            .collect::<Result<_>>()?;

        let mut best: Option<(TaskId, AllianceId, MissionPlan, f64)> = None;
        for entry in scored {
            if best.as_ref().is_none_or(|b| entry.3 <= b.3) {
                best = Some(entry);
            }
        }
        let Some((task, alliance, next, increment)) = best else {
            let stuck = *pools.executable.first().expect("loop runs on a nonempty pool");
            return Err(Error::NoCapableAlliance(stuck));
        };
        plan = next;
        current += increment;
        pools.commit(task, precedence);
        commits.push(Commit {
            task,
            alliance,
            increment,
        });
    }
    if let Some(&t) = pools.blocked.first() {
        return Err(Error::Infeasible(format!("task {t} never became executable; precedence is cyclic")));
    }

    let plan = plan.close();
    let objective = evaluate_plan(&plan, instance)?;
    Ok(Construction {
        plan,
        objective,
        commits,
    })
}
