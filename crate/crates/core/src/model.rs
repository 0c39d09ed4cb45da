//! Domain types: tasks, robots, alliances, instances, mission plans and the
//! precedence-augmented plan.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, IssueKind, Result, ValidationReport};
use crate::feasibility;
use crate::objective::ObjectiveWeights;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident, $prefix:literal) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub u32);

        impl $name {
            /// Zero-based position of this id in its (contiguous, 1-based) list.
            pub fn index(self) -> usize {
                (self.0 as usize).wrapping_sub(1)
            }

            pub fn from_index(index: usize) -> Self {
                $name(index as u32 + 1)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }
    };
}

id_type!(
    /// 1-based task index `i` of `t_i`.
    TaskId,
    "t"
);
id_type!(
    /// 1-based robot index `l` of `r_l`.
    RobotId,
    "r"
);
id_type!(
    /// 1-based alliance index `j` of `a_j`, in declaration order.
    AllianceId,
    "a"
);

/// Position in the plane, meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (other.x - self.x).hypot(other.y - self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Task {
    pub id: TaskId,
    /// Free-form category tag such as `"A"`.
    pub type_label: String,
    pub position: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Robot {
    pub id: RobotId,
    pub start_position: Point,
    /// `None` means the end position is arbitrary: no terminal travel.
    pub end_position: Option<Point>,
    /// Meters per second.
    pub speed: f64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alliance {
    pub id: AllianceId,
    members: Vec<RobotId>,
}

impl Alliance {
    /// Members are stored sorted and deduplicated.
    pub fn new(id: AllianceId, members: impl IntoIterator<Item = RobotId>) -> Self {
        let members: BTreeSet<RobotId> = members.into_iter().collect();
        Alliance {
            id,
            members: members.into_iter().collect(),
        }
    }

    pub fn members(&self) -> &[RobotId] {
        &self.members
    }

    pub fn contains(&self, robot: RobotId) -> bool {
        self.members.binary_search(&robot).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Static execution cost of a task-alliance pair. Incapability is an explicit
/// marker so that the capability test never depends on a sentinel number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cost {
    Finite(f64),
    Incapable,
}

impl Cost {
    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    pub fn value(self) -> Option<f64> {
        match self {
            Cost::Finite(v) => Some(v),
            Cost::Incapable => None,
        }
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cost::Finite(v) => serializer.serialize_f64(*v),
            Cost::Incapable => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Token(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(v) => Ok(Cost::Finite(v)),
            Raw::Token(t) if t == "inf" => Ok(Cost::Incapable),
            Raw::Token(t) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", found \"{t}\""
            ))),
        }
    }
}

/// `c_stat(t_i, a_j)` for every task and alliance. Missing entries are incapable.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StaticCostTable {
    rows: Vec<Vec<Cost>>,
}

impl StaticCostTable {
    /// One row per task (ascending id), one column per alliance (declaration order).
    pub fn from_rows(rows: Vec<Vec<Cost>>) -> Self {
        StaticCostTable { rows }
    }

    pub fn from_entries(entries: impl IntoIterator<Item = ((TaskId, AllianceId), Cost)>) -> Self {
        let mut rows: Vec<Vec<Cost>> = Vec::new();
        for ((task, alliance), cost) in entries {
            let (t, a) = (task.index(), alliance.index());
            if rows.len() <= t {
                rows.resize(t + 1, Vec::new());
            }
            if rows[t].len() <= a {
                rows[t].resize(a + 1, Cost::Incapable);
            }
            rows[t][a] = cost;
        }
        StaticCostTable { rows }
    }

    pub fn get(&self, task: TaskId, alliance: AllianceId) -> Cost {
        self.rows
            .get(task.index())
            .and_then(|row| row.get(alliance.index()))
            .copied()
            .unwrap_or(Cost::Incapable)
    }

    pub fn rows(&self) -> &[Vec<Cost>] {
        &self.rows
    }
}

/// Precedence relation `C`: `(i, j)` means `t_i` must finish before `t_j` starts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrecedenceSet {
    pairs: Vec<(TaskId, TaskId)>,
}

impl PrecedenceSet {
    pub fn new(pairs: impl IntoIterator<Item = (TaskId, TaskId)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (a, b) in pairs {
            if a == b {
                return Err(Error::InvalidInput(format!("self precedence ({a}, {b})")));
            }
            if !seen.insert((a, b)) {
                return Err(Error::InvalidInput(format!("duplicate precedence ({a}, {b})")));
            }
            out.push((a, b));
        }
        out.sort();
        Ok(PrecedenceSet { pairs: out })
    }

    pub fn empty() -> Self {
        PrecedenceSet::default()
    }

    pub fn pairs(&self) -> &[(TaskId, TaskId)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, before: TaskId, after: TaskId) -> bool {
        self.pairs.binary_search(&(before, after)).is_ok()
    }

    pub fn predecessors(&self, task: TaskId) -> impl Iterator<Item = TaskId> + '_ {
        self.pairs.iter().filter(move |p| p.1 == task).map(|p| p.0)
    }

    pub fn successors(&self, task: TaskId) -> impl Iterator<Item = TaskId> + '_ {
        self.pairs.iter().filter(move |p| p.0 == task).map(|p| p.1)
    }
}

/// Provenance carried through instance files.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstanceMeta {
    pub seed: Option<u64>,
    pub class: Option<String>,
    /// Name of the pseudo-random generator used to draw the instance.
    pub rng: Option<String>,
}

/// Complete problem input. Construction validates every invariant, including
/// that each task has a capable alliance and that the precedence relation is
/// acyclic.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    robots: Vec<Robot>,
    tasks: Vec<Task>,
    alliances: Vec<Alliance>,
    static_costs: StaticCostTable,
    precedence: PrecedenceSet,
    weights: ObjectiveWeights,
    meta: InstanceMeta,
}

impl Instance {
    pub fn new(
        robots: Vec<Robot>,
        tasks: Vec<Task>,
        alliances: Vec<Alliance>,
        static_costs: StaticCostTable,
        precedence: PrecedenceSet,
        weights: ObjectiveWeights,
    ) -> Result<Self> {
        let instance = Instance {
            robots,
            tasks,
            alliances,
            static_costs,
            precedence,
            weights,
            meta: InstanceMeta::default(),
        };
        instance.validate().into_result()?;
        Ok(instance)
    }

    /// Skips validation. Callers must run [`Instance::validate`] themselves.
    pub(crate) fn new_unchecked(
        robots: Vec<Robot>,
        tasks: Vec<Task>,
        alliances: Vec<Alliance>,
        static_costs: StaticCostTable,
        precedence: PrecedenceSet,
        weights: ObjectiveWeights,
    ) -> Self {
        Instance {
            robots,
            tasks,
            alliances,
            static_costs,
            precedence,
            weights,
            meta: InstanceMeta::default(),
        }
    }

    pub fn with_meta(mut self, meta: InstanceMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_weights(mut self, weights: ObjectiveWeights) -> Result<Self> {
        weights.validate()?;
        self.weights = weights;
        Ok(self)
    }

    /// Collects every invariant violation instead of stopping at the first.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();

        if self.robots.is_empty() {
            report.push("robots", IssueKind::Malformed, "at least one robot is required");
        }
        for (n, robot) in self.robots.iter().enumerate() {
            let section = format!("robots[{n}]");
            if robot.id != RobotId::from_index(n) {
                report.push(
                    format!("{section}.id"),
                    IssueKind::DuplicateId,
                    format!("expected id {} (ids must be 1..m in order), found {}", n + 1, robot.id.0),
                );
            }
            if !(robot.speed.is_finite() && robot.speed > 0.0) {
                report.push(
                    format!("{section}.speed"),
                    IssueKind::InvalidSpeed,
                    format!("speed must be finite and > 0, found {}", robot.speed),
                );
            }
            if !robot.start_position.is_finite() {
                report.push(format!("{section}.start"), IssueKind::NonFinite, "start position must be finite");
            }
            if robot.end_position.is_some_and(|p| !p.is_finite()) {
                report.push(format!("{section}.end"), IssueKind::NonFinite, "end position must be finite");
            }
        }

        for (n, task) in self.tasks.iter().enumerate() {
            let section = format!("tasks[{n}]");
            if task.id != TaskId::from_index(n) {
                report.push(
                    format!("{section}.id"),
                    IssueKind::DuplicateId,
                    format!("expected id {} (ids must be 1..n in order), found {}", n + 1, task.id.0),
                );
            }
            if !task.position.is_finite() {
                report.push(format!("{section}.position"), IssueKind::NonFinite, "position must be finite");
            }
        }

        let mut member_sets = BTreeMap::new();
        for (n, alliance) in self.alliances.iter().enumerate() {
            let section = format!("alliances[{n}]");
            if alliance.id != AllianceId::from_index(n) {
                report.push(
                    format!("{section}.id"),
                    IssueKind::DuplicateId,
                    format!("expected id {} (ids must be 1..k in order), found {}", n + 1, alliance.id.0),
                );
            }
            if alliance.is_empty() {
                report.push(format!("{section}.members"), IssueKind::InvalidAlliance, "alliance has no members");
            }
            for &member in alliance.members() {
                if self.robot(member).is_none() {
                    report.push(
                        format!("{section}.members"),
                        IssueKind::UnknownId,
                        format!("unknown robot {member}"),
                    );
                }
            }
            if let Some(first) = member_sets.insert(alliance.members().to_vec(), n) {
                report.push(
                    format!("{section}.members"),
                    IssueKind::InvalidAlliance,
                    format!("same members as alliances[{first}]"),
                );
            }
        }

        let rows = self.static_costs.rows();
        if rows.len() > self.tasks.len() {
            report.push(
                "static_costs",
                IssueKind::UnknownId,
                format!("{} rows for {} tasks", rows.len(), self.tasks.len()),
            );
        }
        for (t, row) in rows.iter().enumerate() {
            if row.len() > self.alliances.len() {
                report.push(
                    format!("static_costs[{t}]"),
                    IssueKind::UnknownId,
                    format!("{} entries for {} alliances", row.len(), self.alliances.len()),
                );
            }
            for (a, cost) in row.iter().enumerate() {
                if let Cost::Finite(v) = *cost {
                    if !v.is_finite() {
                        report.push(
                            format!("static_costs[{t}][{a}]"),
                            IssueKind::NonFinite,
                            "use the \"inf\" token for incapable alliances",
                        );
                    } else if v < 0.0 {
                        report.push(
                            format!("static_costs[{t}][{a}]"),
                            IssueKind::NegativeCost,
                            format!("cost {v} is negative"),
                        );
                    }
                }
            }
        }

        for task in &self.tasks {
            let capable = self
                .alliances
                .iter()
                .any(|a| self.static_costs.get(task.id, a.id).is_finite());
            if !capable {
                report.push(
                    format!("static_costs[{}]", task.id.index()),
                    IssueKind::NoCapableAlliance,
                    format!("task {} has no alliance with finite cost", task.id),
                );
            }
        }

        let mut known_arcs = true;
        for (n, &(a, b)) in self.precedence.pairs().iter().enumerate() {
            for t in [a, b] {
                if self.task(t).is_none() {
                    known_arcs = false;
                    report.push(
                        format!("precedence[{n}]"),
                        IssueKind::UnknownId,
                        format!("unknown task {t}"),
                    );
                }
            }
        }
        if known_arcs {
            let mut successors = vec![Vec::new(); self.tasks.len()];
            for &(a, b) in self.precedence.pairs() {
                successors[a.index()].push(b.index());
            }
            let peel = feasibility::peel(&successors);
            if !peel.is_acyclic() {
                let ids: Vec<String> = peel
                    .residue
                    .iter()
                    .map(|&i| TaskId::from_index(i).to_string())
                    .collect();
                report.push(
                    "precedence",
                    IssueKind::CyclicPrecedence,
                    format!("precedence relation has a cycle among {{{}}}", ids.join(", ")),
                );
            }
        }

        if let Err(e) = self.weights.validate() {
            report.push("weights", IssueKind::InvalidWeights, e.to_string());
        }

        report
    }

    pub fn robots(&self) -> &[Robot] {
        &self.robots
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn alliances(&self) -> &[Alliance] {
        &self.alliances
    }

    pub fn static_costs(&self) -> &StaticCostTable {
        &self.static_costs
    }

    pub fn precedence(&self) -> &PrecedenceSet {
        &self.precedence
    }

    pub fn weights(&self) -> ObjectiveWeights {
        self.weights
    }

    pub fn meta(&self) -> &InstanceMeta {
        &self.meta
    }

    pub fn robot(&self, id: RobotId) -> Option<&Robot> {
        self.robots.get(id.index()).filter(|r| r.id == id)
    }

    pub fn task(&self, id: TaskId) -> Option<&Task> {
        self.tasks.get(id.index()).filter(|t| t.id == id)
    }

    pub fn alliance(&self, id: AllianceId) -> Option<&Alliance> {
        self.alliances.get(id.index()).filter(|a| a.id == id)
    }

    pub fn task_ids(&self) -> impl Iterator<Item = TaskId> + '_ {
        self.tasks.iter().map(|t| t.id)
    }

    pub fn cost(&self, task: TaskId, alliance: AllianceId) -> Cost {
        self.static_costs.get(task, alliance)
    }

    /// Position of a vertex. `None` for the end vertex of a robot whose end
    /// position is arbitrary.
    pub fn vertex_position(&self, vertex: Vertex) -> Result<Option<Point>> {
        match vertex {
            Vertex::Start(r) => Ok(Some(self.robot(r).ok_or(Error::UnknownRobot(r))?.start_position)),
            Vertex::Task(t) => Ok(Some(self.task(t).ok_or(Error::UnknownTask(t))?.position)),
            Vertex::End(r) => Ok(self.robot(r).ok_or(Error::UnknownRobot(r))?.end_position),
        }
    }
}

/// A node of a mission plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Start(RobotId),
    Task(TaskId),
    End(RobotId),
}

impl Vertex {
    pub fn task(self) -> Option<TaskId> {
        match self {
            Vertex::Task(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Start(r) => write!(f, "s{}", r.0),
            Vertex::Task(t) => write!(f, "t{}", t.0),
            Vertex::End(r) => write!(f, "e{}", r.0),
        }
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("invalid vertex \"{s}\", expected s<l>, t<i> or e<l>"));
        let mut chars = s.chars();
        let kind = chars.next().ok_or_else(bad)?;
        let id: u32 = chars.as_str().parse().map_err(|_| bad())?;
        if id == 0 {
            return Err(bad());
        }
        match kind {
            's' => Ok(Vertex::Start(RobotId(id))),
            't' => Ok(Vertex::Task(TaskId(id))),
            'e' => Ok(Vertex::End(RobotId(id))),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Vertex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Vertex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Union of the robots' path graphs. Each route is the ordered vertex
/// sequence of one robot; its edges are the consecutive pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MissionPlan {
    routes: Vec<Vec<Vertex>>,
    assignment: BTreeMap<TaskId, AllianceId>,
}

impl MissionPlan {
    /// Every robot at its start vertex, nothing assigned.
    pub fn empty(robot_count: usize) -> Self {
        MissionPlan {
            routes: (0..robot_count)
                .map(|l| vec![Vertex::Start(RobotId::from_index(l))])
                .collect(),
            assignment: BTreeMap::new(),
        }
    }

    /// Structural checks only: route `l` belongs to robot `l`, starts with its
    /// start vertex, holds its end vertex at most once and only last, and every
    /// task appears at most once per route and is assigned. Use
    /// [`MissionPlan::validate_against`] for alliance membership.
    pub fn from_parts(routes: Vec<Vec<Vertex>>, assignment: BTreeMap<TaskId, AllianceId>) -> Result<Self> {
        for (l, route) in routes.iter().enumerate() {
            let robot = RobotId::from_index(l);
            if route.first() != Some(&Vertex::Start(robot)) {
                return Err(Error::MalformedPlan(format!("route of {robot} must begin with its start vertex")));
            }
            let mut seen = BTreeSet::new();
            for (p, &v) in route.iter().enumerate().skip(1) {
                match v {
                    Vertex::Start(_) => {
                        return Err(Error::MalformedPlan(format!("route of {robot} repeats a start vertex")))
                    }
                    Vertex::End(r) if r != robot || p + 1 != route.len() => {
                        return Err(Error::MalformedPlan(format!(
                            "route of {robot} may only end with its own end vertex"
                        )))
                    }
                    Vertex::End(_) => {}
                    Vertex::Task(t) => {
                        if !seen.insert(t) {
                            return Err(Error::MalformedPlan(format!("task {t} appears twice in route of {robot}")));
                        }
                        if !assignment.contains_key(&t) {
                            return Err(Error::MalformedPlan(format!("task {t} is routed but not assigned")));
                        }
                    }
                }
            }
        }
        Ok(MissionPlan { routes, assignment })
    }

    pub fn routes(&self) -> &[Vec<Vertex>] {
        &self.routes
    }

    pub fn route(&self, robot: RobotId) -> Option<&[Vertex]> {
        self.routes.get(robot.index()).map(Vec::as_slice)
    }

    pub fn robot_count(&self) -> usize {
        self.routes.len()
    }

    pub fn assignment(&self) -> &BTreeMap<TaskId, AllianceId> {
        &self.assignment
    }

    pub fn alliance_of(&self, task: TaskId) -> Option<AllianceId> {
        self.assignment.get(&task).copied()
    }

    pub fn task_count(&self) -> usize {
        self.assignment.len()
    }

    /// True when every route is terminated by its end vertex.
    pub fn is_complete(&self) -> bool {
        self.routes
            .iter()
            .all(|r| matches!(r.last(), Some(Vertex::End(_))))
    }

    pub fn position_of(&self, robot: RobotId, task: TaskId) -> Option<usize> {
        self.route(robot)?.iter().position(|&v| v == Vertex::Task(task))
    }

    /// Robots whose route contains `task`, ascending.
    pub fn holders(&self, task: TaskId) -> Vec<RobotId> {
        (0..self.routes.len())
            .map(RobotId::from_index)
            .filter(|&r| self.position_of(r, task).is_some())
            .collect()
    }

    /// Checks the plan against an instance: ids are known, every assigned task
    /// appears exactly once in each member route of its alliance and nowhere else.
    pub fn validate_against(&self, instance: &Instance) -> Result<()> {
        if self.routes.len() != instance.robots().len() {
            return Err(Error::MalformedPlan(format!(
                "plan has {} routes but the instance has {} robots",
                self.routes.len(),
                instance.robots().len()
            )));
        }
        for (&task, &alliance) in &self.assignment {
            instance.task(task).ok_or(Error::UnknownTask(task))?;
            let alliance = instance.alliance(alliance).ok_or(Error::UnknownAlliance(alliance))?;
            let holders = self.holders(task);
            if holders != alliance.members() {
                return Err(Error::MalformedPlan(format!(
                    "task {task} is assigned to {} but appears in the routes of {:?}",
                    alliance.id,
                    holders.iter().map(ToString::to_string).collect::<Vec<_>>()
                )));
            }
        }
        Ok(())
    }

    /// Appends `task` as the new leaf of every member route (construction step).
    pub fn append_task(&self, task: TaskId, alliance: &Alliance) -> Result<MissionPlan> {
        if self.assignment.contains_key(&task) {
            return Err(Error::InvalidInput(format!("task {task} is already assigned")));
        }
        let mut next = self.clone();
        for &member in alliance.members() {
            let route = next
                .routes
                .get_mut(member.index())
                .ok_or(Error::UnknownRobot(member))?;
            if matches!(route.last(), Some(Vertex::End(_))) {
                return Err(Error::MalformedPlan(format!("route of {member} is already closed")));
            }
            route.push(Vertex::Task(task));
        }
        next.assignment.insert(task, alliance.id);
        Ok(next)
    }

    /// Terminates every open route with its end vertex.
    pub fn close(&self) -> MissionPlan {
        let mut next = self.clone();
        for (l, route) in next.routes.iter_mut().enumerate() {
            if !matches!(route.last(), Some(Vertex::End(_))) {
                route.push(Vertex::End(RobotId::from_index(l)));
            }
        }
        next
    }

    /// Copy of the plan with `task` removed from every route and from the
    /// assignment.
    pub fn without_task(&self, task: TaskId) -> Result<MissionPlan> {
        if !self.assignment.contains_key(&task) {
            return Err(Error::UnknownTask(task));
        }
        let mut next = self.clone();
        for route in &mut next.routes {
            route.retain(|&v| v != Vertex::Task(task));
        }
        next.assignment.remove(&task);
        Ok(next)
    }

    /// Largest valid insertion index in a route: after the last task, before
    /// the end vertex if present.
    pub(crate) fn max_insert_index(route: &[Vertex]) -> usize {
        match route.last() {
            Some(Vertex::End(_)) => route.len() - 1,
            _ => route.len(),
        }
    }

    /// Removes `task` from its current holders and inserts it at
    /// `insert_at[member]` in the route of every member of `target`. Indices
    /// refer to the routes after removal and must lie in `1..=len` (before the
    /// end vertex when the route is closed).
    pub fn relocate(
        &self,
        task: TaskId,
        target: &Alliance,
        insert_at: &BTreeMap<RobotId, usize>,
    ) -> Result<MissionPlan> {
        let positions: Vec<usize> = target
            .members()
            .iter()
            .map(|m| {
                insert_at
                    .get(m)
                    .copied()
                    .ok_or_else(|| Error::InvalidInput(format!("no insertion index given for {m}")))
            })
            .collect::<Result<_>>()?;
        if insert_at.len() != target.len() {
            return Err(Error::InvalidInput(format!(
                "insertion indices given for robots outside {}",
                target.id
            )));
        }
        let mut next = self.without_task(task)?;
        next.insert_task(task, target, &positions)?;
        Ok(next)
    }

    /// Inserts an unassigned task; `positions[k]` is the index for the k-th member.
    pub(crate) fn insert_task(&mut self, task: TaskId, target: &Alliance, positions: &[usize]) -> Result<()> {
        debug_assert_eq!(positions.len(), target.len());
        for (&member, &index) in target.members().iter().zip(positions) {
            let route = self
                .routes
                .get(member.index())
                .ok_or(Error::UnknownRobot(member))?;
            let max = Self::max_insert_index(route);
            if index < 1 || index > max {
                return Err(Error::IndexOutOfRange {
                    robot: member,
                    index,
                    max,
                });
            }
        }
        for (&member, &index) in target.members().iter().zip(positions) {
            self.routes[member.index()].insert(index, Vertex::Task(task));
        }
        self.assignment.insert(task, target.id);
        Ok(())
    }

    /// The plan extended by the precedence arcs whose endpoints are both assigned.
    pub fn augment(&self, precedence: &PrecedenceSet) -> AugmentedPlan<'_> {
        let precedence_arcs = precedence
            .pairs()
            .iter()
            .copied()
            .filter(|(a, b)| self.assignment.contains_key(a) && self.assignment.contains_key(b))
            .collect();
        AugmentedPlan {
            base: self,
            precedence_arcs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    /// Edge of the path graph of one robot.
    Path(RobotId),
    Precedence,
}

/// Mission plan plus precedence arcs: `E+ = E ∪ E_C`.
#[derive(Clone, Debug)]
pub struct AugmentedPlan<'a> {
    base: &'a MissionPlan,
    precedence_arcs: Vec<(TaskId, TaskId)>,
}

impl<'a> AugmentedPlan<'a> {
    pub fn base(&self) -> &'a MissionPlan {
        self.base
    }

    pub fn precedence_arcs(&self) -> &[(TaskId, TaskId)] {
        &self.precedence_arcs
    }

    pub fn contains(&self, v: Vertex) -> bool {
        match v {
            Vertex::Start(r) | Vertex::End(r) => r.index() < self.base.robot_count(),
            Vertex::Task(t) => self.base.assignment.contains_key(&t),
        }
    }

    /// Predecessors of `v` along path edges, plus precedence predecessors when
    /// `include_precedence` is set.
    pub fn incoming_edges(&self, v: Vertex, include_precedence: bool) -> Result<Vec<(Vertex, EdgeKind)>> {
        if !self.contains(v) {
            return Err(Error::UnknownVertex(v));
        }
        let mut incoming = Vec::new();
        for (l, route) in self.base.routes.iter().enumerate() {
            if let Some(p) = route.iter().position(|&w| w == v) {
                if p > 0 {
                    incoming.push((route[p - 1], EdgeKind::Path(RobotId::from_index(l))));
                }
            }
        }
        if include_precedence {
            if let Vertex::Task(t) = v {
                incoming.extend(
                    self.precedence_arcs
                        .iter()
                        .filter(|arc| arc.1 == t)
                        .map(|arc| (Vertex::Task(arc.0), EdgeKind::Precedence)),
                );
            }
        }
        Ok(incoming)
    }

    /// Materializes `M+`: every start vertex, every assigned task and every end
    /// vertex, in that order and by ascending id, with all path and precedence edges.
    pub fn as_digraph(&self) -> Digraph {
        let m = self.base.robot_count();
        let mut vertices = Vec::with_capacity(2 * m + self.base.assignment.len());
        vertices.extend((0..m).map(|l| Vertex::Start(RobotId::from_index(l))));
        vertices.extend(self.base.assignment.keys().map(|&t| Vertex::Task(t)));
        vertices.extend((0..m).map(|l| Vertex::End(RobotId::from_index(l))));

        let mut graph = Digraph::with_vertices(vertices);
        for (l, route) in self.base.routes.iter().enumerate() {
            for pair in route.windows(2) {
                graph.add_edge(pair[0], pair[1], EdgeKind::Path(RobotId::from_index(l)));
            }
        }
        for &(a, b) in &self.precedence_arcs {
            graph.add_edge(Vertex::Task(a), Vertex::Task(b), EdgeKind::Precedence);
        }
        graph
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
}

/// Adjacency structure over plan vertices. Vertices are kept sorted, so
/// lookups are a binary search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    vertices: Vec<Vertex>,
    successors: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl Digraph {
    fn with_vertices(vertices: Vec<Vertex>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        let n = vertices.len();
        Digraph {
            vertices,
            successors: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    fn add_edge(&mut self, from: Vertex, to: Vertex, kind: EdgeKind) {
        let (Some(from), Some(to)) = (self.index_of(from), self.index_of(to)) else {
            debug_assert!(false, "edge endpoint outside the vertex set");
            return;
        };
        self.successors[from].push(to);
        self.edges.push(Edge { from, to, kind });
    }

    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Out-neighbours by vertex index.
    pub fn successors(&self) -> &[Vec<usize>] {
        &self.successors
    }
}


#[cfg(test)]
mod proptests {
    use proptest::prelude::*;

    use super::*;
    use crate::test_support::random_complete_plan;

    proptest! {
        #[test]
        fn coalition_tasks_appear_once_per_member(seed in any::<u64>(), n in 0usize..9) {
            let (instance, plan) = random_complete_plan(seed, n);
            for (&task, &alliance) in plan.assignment() {
                let members = instance.alliance(alliance).unwrap().members();
                let count = plan.routes().iter()
                    .map(|route| route.iter().filter(|&&v| v == Vertex::Task(task)).count())
                    .sum::<usize>();
                prop_assert_eq!(count, members.len());
            }
            prop_assert!(plan.validate_against(&instance).is_ok());
        }

        #[test]
        fn relocate_round_trip(seed in any::<u64>(), n in 1usize..9, pick in any::<prop::sample::Index>(), choice in any::<u64>()) {
            let (instance, plan) = random_complete_plan(seed, n);
            let task = TaskId::from_index(pick.index(n));
            let original = instance.alliance(plan.alliance_of(task).unwrap()).unwrap();
            let original_pos: BTreeMap<_, _> = original
                .members()
                .iter()
                .map(|&m| (m, plan.position_of(m, task).unwrap()))
                .collect();

            let capable: Vec<&Alliance> = instance.alliances().iter()
                .filter(|a| instance.cost(task, a.id).is_finite())
                .collect();
            let target = capable[(choice % capable.len() as u64) as usize];
            let removed = plan.without_task(task).unwrap();
            let insert_at: BTreeMap<_, _> = target.members().iter().enumerate().map(|(k, &m)| {
                let max = MissionPlan::max_insert_index(removed.route(m).unwrap());
                (m, 1 + ((choice >> (8 * k)) as usize % max))
            }).collect();

            let moved = plan.relocate(task, target, &insert_at).unwrap();
            prop_assert!(moved.validate_against(&instance).is_ok());
            let back = moved.relocate(task, original, &original_pos).unwrap();
            prop_assert_eq!(back, plan);
        }

        #[test]
        fn digraph_edge_count(seed in any::<u64>(), n in 0usize..9) {
            let (instance, plan) = random_complete_plan(seed, n);
            let aug = plan.augment(instance.precedence());
            let g = aug.as_digraph();
            let path_edges: usize = plan.routes().iter().map(|r| r.len() - 1).sum();
            prop_assert_eq!(g.edge_count(), path_edges + aug.precedence_arcs().len());
            prop_assert_eq!(g.vertex_count(), 2 * plan.robot_count() + plan.task_count());
        }
    }
}
