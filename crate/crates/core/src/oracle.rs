//! Exhaustive solver for tiny instances, used as ground truth in tests.
//!
//! Every capable assignment is combined with every global task order; a
//! robot's route is the order restricted to the tasks of its alliances.
//! Feasibility is decided here by an explicit search for a topological order,
//! independently of the peeling in [`crate::feasibility`].

use std::collections::{BTreeMap, HashSet};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::model::{AllianceId, Instance, MissionPlan, TaskId, Vertex};
use crate::objective::{evaluate_plan, ObjectiveBreakdown};

/// Largest task count accepted by [`solve_exact`].
pub const MAX_EXACT_TASKS: usize = 7;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub best_plan: MissionPlan,
    pub best_objective: ObjectiveBreakdown,
    pub plans_enumerated: usize,
    pub plans_feasible: usize,
}

/// Routes obtained by restricting `order` to the tasks of each robot.
///
/// # Panics
/// If `assignment` names an alliance unknown to the instance.
pub fn plan_from_order(instance: &Instance, assignment: &BTreeMap<TaskId, AllianceId>, order: &[TaskId]) -> MissionPlan {
    let routes = instance
        .robots()
        .iter()
        .map(|robot| {
            let mut route = vec![Vertex::Start(robot.id)];
            for t in order {
                let alliance = instance
                    .alliance(assignment[t])
                    .expect("assignment refers to a known alliance");
                if alliance.contains(robot.id) {
                    route.push(Vertex::Task(*t));
                }
            }
            route.push(Vertex::End(robot.id));
            route
        })
        .collect();
    MissionPlan::from_parts(routes, assignment.clone()).expect("routes built from a permutation are well formed")
}

/// Depth-first search over sets of placed vertices for an order in which
/// every edge points forward. Failing sets are memoized, so the cost is
/// bounded by `2^n` states. At most 64 vertices.
pub fn exhaustive_topological_order(n: usize, edges: &[(usize, usize)]) -> Option<Vec<usize>> {
    assert!(n <= 64, "exhaustive search supports at most 64 vertices");
    let mut required = vec![0u64; n];
    for &(u, v) in edges {
        required[v] |= 1 << u;
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut dead = HashSet::new();
    let mut order = Vec::with_capacity(n);
    search(0, full, &required, &mut dead, &mut order).then_some(order)
}

fn search(placed: u64, full: u64, required: &[u64], dead: &mut HashSet<u64>, order: &mut Vec<usize>) -> bool {
    if placed == full {
        return true;
    }
    if dead.contains(&placed) {
        return false;
    }
    for v in 0..required.len() {
        let bit = 1u64 << v;
        if placed & bit == 0 && required[v] & !placed == 0 {
            order.push(v);
            if search(placed | bit, full, required, dead, order) {
                return true;
            }
            order.pop();
        }
    }
    dead.insert(placed);
    false
}

/// Capability of every assignment plus existence of a topological order of
/// the plan's vertices under route and precedence edges.
pub fn plan_admits_topological_order(plan: &MissionPlan, instance: &Instance) -> bool {
    if plan
        .assignment()
        .iter()
        .any(|(&t, &a)| !instance.cost(t, a).is_finite())
    {
        return false;
    }
    let mut vertices: Vec<Vertex> = plan.routes().iter().flatten().copied().collect();
    vertices.sort();
    vertices.dedup();
    let id = |v: Vertex| vertices.binary_search(&v).ok();
    let mut edges = Vec::new();
    for route in plan.routes() {
        for w in route.windows(2) {
            edges.push((id(w[0]).unwrap(), id(w[1]).unwrap()));
        }
    }
    for &(a, b) in instance.precedence().pairs() {
        if let (Some(u), Some(v)) = (id(Vertex::Task(a)), id(Vertex::Task(b))) {
            edges.push((u, v));
        }
    }
    exhaustive_topological_order(vertices.len(), &edges).is_some()
}

pub fn solve_exact(instance: &Instance) -> Result<OracleResult> {
    solve_exact_with(instance, |_, _| {})
}

/// [`solve_exact`] that also reports every enumerated plan together with the
/// oracle's feasibility verdict.
pub fn solve_exact_with(instance: &Instance, mut visit: impl FnMut(&MissionPlan, bool)) -> Result<OracleResult> {
    let n = instance.tasks().len();
    if n > MAX_EXACT_TASKS {
        return Err(Error::TooLarge {
            tasks: n,
            limit: MAX_EXACT_TASKS,
        });
    }
    let tasks: Vec<TaskId> = instance.task_ids().collect();
    let capable: Vec<Vec<AllianceId>> = tasks
        .iter()
        .map(|&t| {
            instance
                .alliances()
                .iter()
                .map(|a| a.id)
                .filter(|&a| instance.cost(t, a).is_finite())
                .collect()
        })
        .collect();
    let assignments: Vec<Vec<AllianceId>> = if n == 0 {
        vec![Vec::new()]
    } else {
        capable.into_iter().multi_cartesian_product().collect()
    };

    let mut best: Option<(MissionPlan, ObjectiveBreakdown)> = None;
    let mut enumerated = 0;
    let mut feasible = 0;
    for choice in &assignments {
        let assignment: BTreeMap<TaskId, AllianceId> = tasks.iter().copied().zip(choice.iter().copied()).collect();
        for order in tasks.iter().copied().permutations(n) {
            let plan = plan_from_order(instance, &assignment, &order);
            enumerated += 1;
            let ok = plan_admits_topological_order(&plan, instance);
            visit(&plan, ok);
            if !ok {
                continue;
            }
            feasible += 1;
            let j = evaluate_plan(&plan, instance)?;
            if best.as_ref().is_none_or(|(_, b)| j.total < b.total) {
                best = Some((plan, j));
            }
        }
    }
    let (best_plan, best_objective) =
        best.ok_or_else(|| Error::Internal("no feasible plan found by exhaustive enumeration".into()))?;
    Ok(OracleResult {
        best_plan,
        best_objective,
        plans_enumerated: enumerated,
        plans_feasible: feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{check_feasibility, CheckMode};
    use crate::generator::{benchmark_alliances, benchmark_robots, TaskType};
    use crate::model::{Point, PrecedenceSet, Task};
    use crate::objective::ObjectiveWeights;
    use crate::test_support::{shared_task_instance, shared_task_plan, random_instance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn single_task(ty: TaskType, at: Point, weights: ObjectiveWeights) -> Instance {
        Instance::new(
            benchmark_robots(),
            vec![Task {
                id: TaskId(1),
                type_label: ty.label().into(),
                position: at,
            }],
            benchmark_alliances(),
            TaskType::cost_table(&[ty]),
            PrecedenceSet::empty(),
            weights,
        )
        .unwrap()
    }

    #[test]
    fn single_type_a_task() {
        let instance = single_task(TaskType::A, Point::new(2.0, 0.0), ObjectiveWeights::makespan_only());
        let result = solve_exact(&instance).unwrap();
        assert_eq!(result.best_objective.total, 101.0);
        assert_eq!(result.plans_enumerated, 3);
        assert_eq!(result.plans_feasible, 3);
        let a = result.best_plan.alliance_of(TaskId(1)).unwrap();
        assert!(a == AllianceId(1) || a == AllianceId(2));
    }

    #[test]
    fn no_tasks() {
        let instance = Instance::new(
            benchmark_robots(),
            vec![],
            benchmark_alliances(),
            TaskType::cost_table(&[]),
            PrecedenceSet::empty(),
            ObjectiveWeights::default(),
        )
        .unwrap();
        let result = solve_exact(&instance).unwrap();
        assert_eq!(result.best_objective.total, 0.0);
        assert_eq!(result.best_plan, MissionPlan::empty(3).close());
    }

    #[test]
    fn refuses_large_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let instance = random_instance(&mut rng, MAX_EXACT_TASKS + 1);
        assert!(matches!(solve_exact(&instance), Err(Error::TooLarge { tasks: 8, limit: 7 })));
    }

    #[test]
    fn topological_search_examples() {
        assert_eq!(exhaustive_topological_order(0, &[]), Some(vec![]));
        assert_eq!(exhaustive_topological_order(3, &[(2, 1), (1, 0)]), Some(vec![2, 1, 0]));
        assert_eq!(exhaustive_topological_order(3, &[(0, 1), (1, 2), (2, 1)]), None);
        assert_eq!(exhaustive_topological_order(1, &[(0, 0)]), None);
    }

    #[test]
    fn shared_task_plan_admits_an_order() {
        assert!(plan_admits_topological_order(&shared_task_plan(), &shared_task_instance()));
    }

    #[test]
    fn verdicts_agree_with_peeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 0..=4 {
            let instance = random_instance(&mut rng, n);
            let mut compared = 0;
            solve_exact_with(&instance, |plan, ok| {
                let verdict = check_feasibility(plan, &instance, CheckMode::Complete).unwrap();
                assert_eq!(verdict.feasible(), ok, "{plan:?}");
                compared += 1;
            })
            .unwrap();
            assert!(compared > 0);
        }
    }

    #[test]
    fn optimum_is_invariant_under_renaming() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let instance = random_instance(&mut rng, 4);
            let n = instance.tasks().len();
            // Reverse the ids: task i becomes n + 1 - i.
            let rename = |t: TaskId| TaskId((n + 1 - t.index() - 1) as u32);
            let mut tasks: Vec<Task> = instance
                .tasks()
                .iter()
                .map(|t| Task {
                    id: rename(t.id),
                    ..t.clone()
                })
                .collect();
            tasks.sort_by_key(|t| t.id);
            let rows = (0..n)
                .rev()
                .map(|k| instance.static_costs().rows()[k].clone())
                .collect();
            let precedence =
                PrecedenceSet::new(instance.precedence().pairs().iter().map(|&(a, b)| (rename(a), rename(b)))).unwrap();
            let renamed = Instance::new(
                instance.robots().to_vec(),
                tasks,
                instance.alliances().to_vec(),
                crate::model::StaticCostTable::from_rows(rows),
                precedence,
                instance.weights(),
            )
            .unwrap();
            let a = solve_exact(&instance).unwrap().best_objective.total;
            let b = solve_exact(&renamed).unwrap().best_objective.total;
            assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{a} vs {b}");
        }
    }
}
