//! Seeded generator for the benchmark problem classes: three robots at the
//! origin, six alliances, four task types placed around a 50 m circle.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{
    Alliance, AllianceId, Cost, Instance, InstanceMeta, Point, PrecedenceSet, Robot, RobotId, StaticCostTable,
    Task, TaskId,
};
use crate::objective::ObjectiveWeights;

/// Radius of the circle the tasks are spread on, m.
pub const CIRCLE_RADIUS: f64 = 50.0;
/// Maximum random offset from the circle point, m.
pub const MAX_OFFSET: f64 = 10.0;
/// Name of the generator recorded in instance files.
pub const RNG_NAME: &str = "chacha8";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TaskType {
    A,
    B,
    C,
    D,
}

const INF: Cost = Cost::Incapable;
const fn c(v: f64) -> Cost {
    Cost::Finite(v)
}

/// Task duration in seconds per alliance (rows, [`benchmark_alliances`] order)
/// and task type (columns A, B, C, D).
const DURATIONS: [[Cost; 4]; 6] = [
    [c(100.0), INF, INF, INF],
    [c(100.0), INF, INF, INF],
    [c(100.0), INF, INF, c(200.0)],
    [INF, c(110.0), INF, INF],
    [INF, c(100.0), c(100.0), INF],
    [INF, INF, INF, c(100.0)],
];

impl TaskType {
    pub const ALL: [TaskType; 4] = [TaskType::A, TaskType::B, TaskType::C, TaskType::D];

    pub fn label(self) -> &'static str {
        match self {
            TaskType::A => "A",
            TaskType::B => "B",
            TaskType::C => "C",
            TaskType::D => "D",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        TaskType::ALL.into_iter().find(|t| t.label() == label)
    }

    /// Duration for the alliance at `alliance_index` of [`benchmark_alliances`].
    pub fn duration(self, alliance_index: usize) -> Cost {
        DURATIONS
            .get(alliance_index)
            .map_or(Cost::Incapable, |row| row[self as usize])
    }

    /// Static cost table for tasks of the given types against [`benchmark_alliances`].
    pub fn cost_table(types: &[TaskType]) -> StaticCostTable {
        StaticCostTable::from_rows(
            types
                .iter()
                .map(|ty| (0..DURATIONS.len()).map(|a| ty.duration(a)).collect())
                .collect(),
        )
    }
}

/// `r1`, `r2` at 2 m/s and `r3` at 1 m/s, all starting at the origin with an
/// arbitrary end position.
pub fn benchmark_robots() -> Vec<Robot> {
    [2.0, 2.0, 1.0]
        .into_iter()
        .enumerate()
        .map(|(l, speed)| Robot {
            id: RobotId::from_index(l),
            start_position: Point::ORIGIN,
            end_position: None,
            speed,
        })
        .collect()
}

/// `{r1}, {r2}, {r3}, {r1,r2}, {r1,r3}, {r2,r3}`.
pub fn benchmark_alliances() -> Vec<Alliance> {
    let sets: [&[u32]; 6] = [&[1], &[2], &[3], &[1, 2], &[1, 3], &[2, 3]];
    sets.iter()
        .enumerate()
        .map(|(j, members)| Alliance::new(AllianceId::from_index(j), members.iter().map(|&l| RobotId(l))))
        .collect()
}

/// Problem class `<a>A<b>BCD`: `a` tasks of type A and `b` tasks of each of
/// the types B, C and D.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProblemClass {
    count_a: usize,
    count_each_bcd: usize,
}

impl ProblemClass {
    pub const BENCHMARK: [ProblemClass; 6] = [
        ProblemClass { count_a: 3, count_each_bcd: 1 },
        ProblemClass { count_a: 3, count_each_bcd: 2 },
        ProblemClass { count_a: 3, count_each_bcd: 3 },
        ProblemClass { count_a: 6, count_each_bcd: 1 },
        ProblemClass { count_a: 6, count_each_bcd: 2 },
        ProblemClass { count_a: 6, count_each_bcd: 3 },
    ];

    /// The precedence templates reference the third type A task, so at least
    /// three are required.
    pub fn new(count_a: usize, count_each_bcd: usize) -> Result<Self> {
        if count_a < 3 {
            return Err(Error::InvalidInput(format!(
                "class needs at least 3 type A tasks, found {count_a}"
            )));
        }
        if count_each_bcd < 1 {
            return Err(Error::InvalidInput("class needs at least 1 task of each type B, C, D".into()));
        }
        Ok(ProblemClass { count_a, count_each_bcd })
    }

    pub fn count_a(self) -> usize {
        self.count_a
    }

    pub fn count_each_bcd(self) -> usize {
        self.count_each_bcd
    }

    pub fn task_count(self) -> usize {
        self.count_a + 3 * self.count_each_bcd
    }
}

impl fmt::Display for ProblemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}A{}BCD", self.count_a, self.count_each_bcd)
    }
}

impl FromStr for ProblemClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("invalid problem class \"{s}\", expected e.g. 3A2BCD"));
        let (a, rest) = s.split_once('A').ok_or_else(bad)?;
        let b = rest.strip_suffix("BCD").ok_or_else(bad)?;
        let count_a = a.parse().map_err(|_| bad())?;
        let count_each_bcd = b.parse().map_err(|_| bad())?;
        ProblemClass::new(count_a, count_each_bcd)
    }
}

/// Task types in id order (A, then B, C, D) and the three precedence templates.
pub fn class_tasks_and_precedence(class: ProblemClass) -> Result<(Vec<(TaskId, TaskType)>, PrecedenceSet)> {
    let class = ProblemClass::new(class.count_a, class.count_each_bcd)?;
    let (a, b) = (class.count_a, class.count_each_bcd);
    let mut tasks = Vec::with_capacity(class.task_count());
    for (ty, count) in [(TaskType::A, a), (TaskType::B, b), (TaskType::C, b), (TaskType::D, b)] {
        for _ in 0..count {
            tasks.push((TaskId::from_index(tasks.len()), ty));
        }
    }
    let id = |i: usize| TaskId(i as u32);
    let precedence = PrecedenceSet::new([
        (id(1), id(2)),
        (id(3), id(a + 1)),
        (id(a + b + 1), id(a + 2 * b + 1)),
    ])?;
    Ok((tasks, precedence))
}

/// Position of task `i` out of `total`: a point on the 50 m circle at angle
/// `2πi/|T| + π/|T|`, shifted by `offset` meters in direction `angle`.
pub fn task_position(i: usize, total: usize, offset: f64, angle: f64) -> Result<Point> {
    if i < 1 || i > total {
        return Err(Error::InvalidInput(format!("task index {i} outside 1..={total}")));
    }
    if !(0.0..=MAX_OFFSET).contains(&offset) {
        return Err(Error::InvalidInput(format!("offset {offset} outside [0, {MAX_OFFSET}]")));
    }
    if !(0.0..TAU).contains(&angle) {
        return Err(Error::InvalidInput(format!("angle {angle} outside [0, 2π)")));
    }
    let base = TAU * i as f64 / total as f64 + PI / total as f64;
    Ok(Point::new(
        CIRCLE_RADIUS * base.cos() + offset * angle.cos(),
        CIRCLE_RADIUS * base.sin() + offset * angle.sin(),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub class: ProblemClass,
    pub seed: u64,
}

impl GeneratorConfig {
    pub fn new(class: ProblemClass, seed: u64) -> Self {
        GeneratorConfig { class, seed }
    }
}

/// Draws one instance. Offsets and angles are i.i.d. uniform per task, offset
/// first, from a ChaCha8 stream seeded with `config.seed`.
pub fn generate(config: &GeneratorConfig) -> Result<Instance> {
    let (typed, precedence) = class_tasks_and_precedence(config.class)?;
    let total = typed.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tasks = Vec::with_capacity(total);
    for &(id, ty) in &typed {
        let offset = rng.random_range(0.0..=MAX_OFFSET);
        let angle = rng.random_range(0.0..TAU);
        tasks.push(Task {
            id,
            type_label: ty.label().into(),
            position: task_position(id.0 as usize, total, offset, angle)?,
        });
    }
    let types: Vec<TaskType> = typed.iter().map(|t| t.1).collect();
    let instance = Instance::new(
        benchmark_robots(),
        tasks,
        benchmark_alliances(),
        TaskType::cost_table(&types),
        precedence,
        ObjectiveWeights::default(),
    )?;
    Ok(instance.with_meta(InstanceMeta {
        seed: Some(config.seed),
        class: Some(config.class.to_string()),
        rng: Some(RNG_NAME.into()),
    }))
}
