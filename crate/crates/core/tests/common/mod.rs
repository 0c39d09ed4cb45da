//! Fixtures for integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mrta::generator::{benchmark_alliances, benchmark_robots, TaskType};
use mrta::oracle::plan_from_order;
use mrta::{AllianceId, Instance, MissionPlan, ObjectiveWeights, Point, PrecedenceSet, Task, TaskId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Benchmark fleet and alliances, `n` tasks of random type placed in a
/// 120 m square, forward precedence arcs with probability `arc_p`.
pub fn random_instance(rng: &mut impl Rng, n: usize, arc_p: f64) -> Instance {
    let types: Vec<TaskType> = (0..n).map(|_| TaskType::ALL[rng.random_range(0..4)]).collect();
    let tasks = types
        .iter()
        .enumerate()
        .map(|(k, ty)| Task {
            id: TaskId::from_index(k),
            type_label: ty.label().into(),
            position: Point::new(rng.random_range(-60.0..60.0), rng.random_range(-60.0..60.0)),
        })
        .collect();
    let mut arcs = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(arc_p) {
                arcs.push((TaskId::from_index(a), TaskId::from_index(b)));
            }
        }
    }
    Instance::new(
        benchmark_robots(),
        tasks,
        benchmark_alliances(),
        TaskType::cost_table(&types),
        PrecedenceSet::new(arcs).unwrap(),
        ObjectiveWeights::default(),
    )
    .unwrap()
}

/// Random capable assignment.
pub fn random_assignment(rng: &mut impl Rng, instance: &Instance) -> BTreeMap<TaskId, AllianceId> {
    instance
        .task_ids()
        .map(|t| {
            let capable: Vec<AllianceId> = instance
                .alliances()
                .iter()
                .map(|a| a.id)
                .filter(|&a| instance.cost(t, a).is_finite())
                .collect();
            (t, capable[rng.random_range(0..capable.len())])
        })
        .collect()
}

/// Uniformly shuffled tasks, repaired into a linear extension of the
/// precedence relation by repeatedly taking the first available task.
pub fn random_linear_extension(rng: &mut impl Rng, instance: &Instance) -> Vec<TaskId> {
    let mut pending: Vec<TaskId> = instance.task_ids().collect();
    pending.shuffle(rng);
    let mut order = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let k = pending
            .iter()
            .position(|&t| {
                instance
                    .precedence()
                    .predecessors(t)
                    .all(|p| order.contains(&p))
            })
            .expect("precedence is acyclic");
        order.push(pending.remove(k));
    }
    order
}

/// A feasible complete plan: routes follow one global order that respects
/// the precedence relation.
pub fn random_feasible_plan(rng: &mut impl Rng, instance: &Instance) -> MissionPlan {
    let assignment = random_assignment(rng, instance);
    let order = random_linear_extension(rng, instance);
    plan_from_order(instance, &assignment, &order)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
