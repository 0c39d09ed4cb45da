//! Steepest descent over the relocate neighborhood: move one task to any
//! insertion positions in the routes of any capable alliance.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{check_feasibility, is_acyclic, CheckMode};
use crate::model::{AllianceId, Instance, MissionPlan, RobotId, TaskId};
use crate::objective::{evaluate, evaluate_plan, ObjectiveBreakdown};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// `None` runs until no improving move exists.
    pub max_sweeps: Option<usize>,
    /// A move is accepted only if it lowers the objective by more than this.
    pub min_improvement: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_sweeps: None,
            min_improvement: 0.0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_improvement.is_finite() && self.min_improvement >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "min_improvement must be finite and >= 0, found {}",
                self.min_improvement
            )));
        }
        if self.max_sweeps == Some(0) {
            return Err(Error::InvalidInput("max_sweeps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Sweeps started, including the final one that found no improving move.
    pub sweeps: usize,
    /// Acyclic candidates that were simulated.
    pub candidates_evaluated: usize,
    /// Candidates discarded because their augmented plan has a cycle.
    pub candidates_infeasible: usize,
    pub j_initial: f64,
    pub j_final: f64,
    pub improvement_percent: f64,
}

/// Move `task` to `alliance`, inserting it at `positions[k]` in the route of
/// the k-th member. Indices refer to the routes after removal of the task.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relocation {
    pub task: TaskId,
    pub alliance: AllianceId,
    pub positions: Vec<usize>,
}

impl Relocation {
    pub fn apply(&self, plan: &MissionPlan, instance: &Instance) -> Result<MissionPlan> {
        let alliance = instance
            .alliance(self.alliance)
            .ok_or(Error::UnknownAlliance(self.alliance))?;
        let insert_at: BTreeMap<RobotId, usize> = alliance
            .members()
            .iter()
            .copied()
            .zip(self.positions.iter().copied())
            .collect();
        plan.relocate(self.task, alliance, &insert_at)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub relocation: Relocation,
    pub plan: MissionPlan,
}

/// All relocations of `task`: every capable alliance, every combination of
/// insertion indices over its members' routes, minus the unchanged plan.
/// Candidates are not checked for acyclicity.
pub fn enumerate_relocations(plan: &MissionPlan, task: TaskId, instance: &Instance) -> Result<Vec<Candidate>> {
    let reduced = plan.without_task(task)?;
    let mut out = Vec::new();
    for alliance in instance.alliances() {
        if !instance.cost(task, alliance.id).is_finite() {
            continue;
        }
        let slots = alliance
            .members()
            .iter()
            .map(|m| {
                let route = reduced.route(*m).ok_or(Error::UnknownRobot(*m))?;
                Ok(1..=MissionPlan::max_insert_index(route))
            })
            .collect::<Result<Vec<_>>>()?;
        for positions in slots.into_iter().multi_cartesian_product() {
            let mut candidate = reduced.clone();
            candidate.insert_task(task, alliance, &positions)?;
            if candidate == *plan {
                continue;
            }
            out.push(Candidate {
                relocation: Relocation {
                    task,
                    alliance: alliance.id,
                    positions,
                },
                plan: candidate,
            });
        }
    }
    Ok(out)
}

/// Whole neighborhood in enumeration order: task ascending, alliance
/// declared, index tuples lexicographic.
pub fn neighborhood(plan: &MissionPlan, instance: &Instance) -> Result<Vec<Candidate>> {
    let mut all = Vec::new();
    for &task in plan.assignment().keys() {
        all.extend(enumerate_relocations(plan, task, instance)?);
    }
    Ok(all)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Improvement {
    pub plan: MissionPlan,
    pub objective: ObjectiveBreakdown,
    pub stats: SearchStats,
    /// Accepted moves in order.
    pub moves: Vec<Relocation>,
}

/// Each sweep evaluates the full neighborhood of the sweep-start incumbent and
/// moves to the best acyclic candidate (first in enumeration order on ties)
/// if it improves by more than `min_improvement`.
pub fn improve(plan: &MissionPlan, instance: &Instance, config: &SearchConfig) -> Result<Improvement> {
    config.validate()?;
    let verdict = check_feasibility(plan, instance, CheckMode::Complete)?;
    if !verdict.feasible() {
        return Err(Error::Infeasible(format!("input plan is infeasible: {}", verdict.summary())));
    }
    let precedence = instance.precedence();
    let mut incumbent = plan.clone();
    let mut objective = evaluate_plan(&incumbent, instance)?;
    let mut stats = SearchStats {
        j_initial: objective.total,
        ..SearchStats::default()
    };
    let mut moves = Vec::new();

    while config.max_sweeps.is_none_or(|max| stats.sweeps < max) {
        stats.sweeps += 1;
        let candidates = neighborhood(&incumbent, instance)?;
        let scored: Vec<Option<ObjectiveBreakdown>> = candidates
            .par_iter()
            .map(|c| {
                let aug = c.plan.augment(precedence);
                if !is_acyclic(&aug.as_digraph()).acyclic {
                    return Ok(None);
                }
                evaluate(&aug, instance).map(Some)
            })
            .collect::<Result<_>>()?;

        let mut best: Option<(usize, ObjectiveBreakdown)> = None;
        for (k, score) in scored.iter().enumerate() {
            match score {
                None => stats.candidates_infeasible += 1,
                Some(j) => {
                    stats.candidates_evaluated += 1;
                    if best.is_none_or(|(_, b)| j.total < b.total) {
                        best = Some((k, *j));
                    }
                }
            }
        }
        match best {
            Some((k, j)) if objective.total - j.total > config.min_improvement => {
                let chosen = candidates.into_iter().nth(k).expect("index from the same list");
                incumbent = chosen.plan;
                objective = j;
                moves.push(chosen.relocation);
            }
            _ => break,
        }
    }

    stats.j_final = objective.total;
    stats.improvement_percent = if stats.j_initial > 0.0 {
        100.0 * (stats.j_initial - stats.j_final) / stats.j_initial
    } else {
        0.0
    };
    Ok(Improvement {
        plan: incumbent,
        objective,
        stats,
        moves,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::constructive::construct;
    use crate::generator::{benchmark_alliances, benchmark_robots, TaskType};
    use crate::model::{Alliance, Cost, Point, PrecedenceSet, Robot, StaticCostTable, Task, Vertex};
    use crate::objective::ObjectiveWeights;
    use crate::oracle::solve_exact;
    use crate::test_support::{chain_plan, random_instance};

    fn solo_instance(n: usize) -> Instance {
        let robot = Robot {
            id: RobotId(1),
            start_position: Point::ORIGIN,
            end_position: None,
            speed: 1.0,
        };
        let tasks = (0..n)
            .map(|k| Task {
                id: TaskId::from_index(k),
                type_label: "A".into(),
                position: Point::new(10.0 * (k + 1) as f64, 0.0),
            })
            .collect();
        Instance::new(
            vec![robot],
            tasks,
            vec![Alliance::new(AllianceId(1), [RobotId(1)])],
            StaticCostTable::from_rows(vec![vec![Cost::Finite(5.0)]; n]),
            PrecedenceSet::empty(),
            ObjectiveWeights::default(),
        )
        .unwrap()
    }

    #[test]
    fn single_robot_two_tasks() {
        let instance = solo_instance(2);
        let plan = chain_plan(&[1, 2]);
        let candidates = enumerate_relocations(&plan, TaskId(1), &instance).unwrap();
        assert_eq!(candidates.len(), 1);
        assert_eq!(candidates[0].plan, chain_plan(&[2, 1]));
        assert_eq!(candidates[0].relocation.positions, vec![2]);
    }

    #[test]
    fn lone_task_has_no_neighbors() {
        let instance = solo_instance(1);
        assert!(enumerate_relocations(&chain_plan(&[1]), TaskId(1), &instance).unwrap().is_empty());
        assert!(enumerate_relocations(&chain_plan(&[1]), TaskId(2), &instance).is_err());
    }

    #[test]
    fn coalition_slots_multiply() {
        // Benchmark fleet, type B tasks: t1 may go to {r1,r2} or {r1,r3}.
        let types = [TaskType::B, TaskType::A, TaskType::A, TaskType::A];
        let tasks = (0..4)
            .map(|k| Task {
                id: TaskId::from_index(k),
                type_label: types[k].label().into(),
                position: Point::new(k as f64, 1.0),
            })
            .collect();
        let instance = Instance::new(
            benchmark_robots(),
            tasks,
            benchmark_alliances(),
            TaskType::cost_table(&types),
            PrecedenceSet::empty(),
            ObjectiveWeights::default(),
        )
        .unwrap();
        let t = |i| Vertex::Task(TaskId(i));
        let (r1, r2, r3) = (RobotId(1), RobotId(2), RobotId(3));
        let routes = vec![
            vec![Vertex::Start(r1), t(1), t(2), Vertex::End(r1)],
            vec![Vertex::Start(r2), t(3), t(1), Vertex::End(r2)],
            vec![Vertex::Start(r3), t(4), Vertex::End(r3)],
        ];
        let assignment = BTreeMap::from([
            (TaskId(1), AllianceId(4)),
            (TaskId(2), AllianceId(1)),
            (TaskId(3), AllianceId(2)),
            (TaskId(4), AllianceId(3)),
        ]);
        let plan = MissionPlan::from_parts(routes, assignment).unwrap();
        let candidates = enumerate_relocations(&plan, TaskId(1), &instance).unwrap();
        // {r1,r2}: (1+1)(1+1) minus identity; {r1,r3}: (1+1)(1+1).
        let to = |a| candidates.iter().filter(|c| c.relocation.alliance == AllianceId(a)).count();
        assert_eq!((to(4), to(5)), (3, 4));
        assert_eq!(candidates.len(), 7);
    }

    #[test]
    fn local_optimum_is_a_fixpoint() {
        let instance = solo_instance(3);
        let plan = chain_plan(&[1, 2, 3]);
        let result = improve(&plan, &instance, &SearchConfig::default()).unwrap();
        assert_eq!(result.plan, plan);
        assert_eq!(result.stats.sweeps, 1);
        assert_eq!(result.stats.improvement_percent, 0.0);
        assert!(result.moves.is_empty());
    }

    #[test]
    fn one_move_reaches_the_optimum() {
        let instance = solo_instance(2);
        let result = improve(&chain_plan(&[2, 1]), &instance, &SearchConfig::default()).unwrap();
        assert_eq!(result.plan, chain_plan(&[1, 2]));
        assert_eq!(result.stats.sweeps, 2);
        let exact = solve_exact(&instance).unwrap();
        assert_eq!(result.objective.total, exact.best_objective.total);
    }

    #[test]
    fn max_sweeps_caps_the_search() {
        let instance = solo_instance(4);
        let config = SearchConfig {
            max_sweeps: Some(1),
            min_improvement: 0.0,
        };
        let result = improve(&chain_plan(&[4, 3, 2, 1]), &instance, &config).unwrap();
        assert_eq!(result.stats.sweeps, 1);
        assert_eq!(result.moves.len(), 1);
    }

    #[test]
    fn config_and_input_errors() {
        let instance = solo_instance(1);
        let plan = chain_plan(&[1]);
        let bad = SearchConfig {
            max_sweeps: None,
            min_improvement: -1.0,
        };
        assert!(improve(&plan, &instance, &bad).is_err());
        let open = MissionPlan::empty(1);
        assert!(improve(&open, &instance, &SearchConfig::default()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn descent_invariants(seed in any::<u64>(), n in 0usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let instance = random_instance(&mut rng, n);
            let start = construct(&instance).unwrap();
            let result = improve(&start.plan, &instance, &SearchConfig::default()).unwrap();
            prop_assert!(result.stats.j_final <= result.stats.j_initial);
            prop_assert_eq!(result.stats.j_initial, start.objective.total);

            // Replay: every accepted move is one relocation, feasible, strictly better.
            let mut plan = start.plan.clone();
            let mut j = start.objective.total;
            for mv in &result.moves {
                let next = mv.apply(&plan, &instance).unwrap();
                prop_assert_eq!(next.without_task(mv.task).unwrap(), plan.without_task(mv.task).unwrap());
                prop_assert!(check_feasibility(&next, &instance, CheckMode::Complete).unwrap().feasible());
                let jn = evaluate_plan(&next, &instance).unwrap().total;
                prop_assert!(jn < j);
                plan = next;
                j = jn;
            }
            prop_assert_eq!(&plan, &result.plan);

            // No strictly improving feasible neighbor remains.
            for c in neighborhood(&result.plan, &instance).unwrap() {
                if check_feasibility(&c.plan, &instance, CheckMode::Complete).unwrap().feasible() {
                    prop_assert!(evaluate_plan(&c.plan, &instance).unwrap().total >= result.objective.total);
                }
            }
        }
    }
}
