//! Fixtures shared by unit tests.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::generator::{benchmark_alliances, benchmark_robots, TaskType};
use crate::model::*;
use crate::objective::ObjectiveWeights;
use crate::oracle::plan_from_order;

/// Two robots, four tasks, `t2` shared by both, precedence `(t1, t3)`.
pub fn shared_task_instance() -> Instance {
    let robots = (1..=2)
        .map(|l| Robot {
            id: RobotId(l),
            start_position: Point::ORIGIN,
            end_position: None,
            speed: 1.0,
        })
        .collect();
    let positions = [(10.0, 0.0), (20.0, 0.0), (30.0, 0.0), (0.0, 10.0)];
    let tasks = positions
        .iter()
        .enumerate()
        .map(|(n, &(x, y))| Task {
            id: TaskId::from_index(n),
            type_label: "A".into(),
            position: Point::new(x, y),
        })
        .collect();
    let alliances = vec![
        Alliance::new(AllianceId(1), [RobotId(1)]),
        Alliance::new(AllianceId(2), [RobotId(2)]),
        Alliance::new(AllianceId(3), [RobotId(1), RobotId(2)]),
    ];
    let costs = StaticCostTable::from_rows(vec![vec![Cost::Finite(10.0); 3]; 4]);
    let precedence = PrecedenceSet::new([(TaskId(1), TaskId(3))]).unwrap();
    Instance::new(robots, tasks, alliances, costs, precedence, ObjectiveWeights::default()).unwrap()
}

pub fn shared_task_plan() -> MissionPlan {
    let (r1, r2) = (RobotId(1), RobotId(2));
    let t = |i| Vertex::Task(TaskId(i));
    let routes = vec![
        vec![Vertex::Start(r1), t(1), t(2), t(3), Vertex::End(r1)],
        vec![Vertex::Start(r2), t(4), t(2), Vertex::End(r2)],
    ];
    let assignment = BTreeMap::from([
        (TaskId(1), AllianceId(1)),
        (TaskId(2), AllianceId(3)),
        (TaskId(3), AllianceId(1)),
        (TaskId(4), AllianceId(2)),
    ]);
    MissionPlan::from_parts(routes, assignment).unwrap()
}

/// Single robot visiting `tasks` in order, closed with its end vertex.
pub fn chain_plan(tasks: &[u32]) -> MissionPlan {
    let r1 = RobotId(1);
    let mut route = vec![Vertex::Start(r1)];
    route.extend(tasks.iter().map(|&i| Vertex::Task(TaskId(i))));
    route.push(Vertex::End(r1));
    let assignment = tasks.iter().map(|&i| (TaskId(i), AllianceId(1))).collect();
    MissionPlan::from_parts(vec![route], assignment).unwrap()
}

/// Random three-robot instance with the benchmark capabilities and acyclic
/// random precedence, plus a random complete plan for it (not necessarily
/// feasible with respect to precedence).
pub fn random_complete_plan(seed: u64, n: usize) -> (Instance, MissionPlan) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let instance = random_instance(&mut rng, n);
    let plan = random_plan(&mut rng, &instance);
    (instance, plan)
}

pub fn random_instance(rng: &mut impl Rng, n: usize) -> Instance {
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
            if rng.random_bool(0.15) {
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

pub fn random_plan(rng: &mut impl Rng, instance: &Instance) -> MissionPlan {
    let assignment: BTreeMap<TaskId, AllianceId> = instance
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
        .collect();
    let mut order: Vec<TaskId> = instance.task_ids().collect();
    order.shuffle(rng);
    plan_from_order(instance, &assignment, &order)
}
