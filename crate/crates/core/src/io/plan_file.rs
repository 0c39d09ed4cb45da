//! Plan files: routes, assignment, the simulated schedule and the objective,
//! tied to an instance by checksum so they can be re-verified later.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{check_feasibility, CheckMode};
use crate::io::instance_file::instance_checksum;
use crate::model::{AllianceId, Instance, MissionPlan, PrecedenceSet, RobotId, TaskId, Vertex};
use crate::objective::{ObjectiveBreakdown, ObjectiveWeights};
use crate::schedule::{simulate, Schedule};

pub const PLAN_FORMAT_VERSION: u32 = 1;

/// Relative tolerance for comparing stored and re-simulated quantities.
pub const REPLAY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub format_version: u32,
    pub instance: InstanceRef,
    pub routes: Vec<RouteEntry>,
    pub assignment: Vec<AssignmentEntry>,
    pub precedence_arcs: Vec<(TaskId, TaskId)>,
    pub task_types: Vec<TaskTypeEntry>,
    pub schedule: Schedule,
    pub objective: ObjectiveBreakdown,
    pub weights: ObjectiveWeights,
    pub solver: SolverInfo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceRef {
    pub path: Option<String>,
    /// `sha256:<hex>` of the canonical instance file.
    pub checksum: String,
}

impl InstanceRef {
    pub fn of(instance: &Instance, path: Option<&str>) -> Self {
        InstanceRef {
            path: path.map(str::to_owned),
            checksum: instance_checksum(instance),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteEntry {
    pub robot: RobotId,
    pub vertices: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentEntry {
    pub task: TaskId,
    pub alliance: AllianceId,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskTypeEntry {
    pub task: TaskId,
    #[serde(rename = "type")]
    pub type_label: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverInfo {
    pub algorithm: String,
    pub seed: Option<u64>,
    pub sweeps: Option<usize>,
    pub max_sweeps: Option<usize>,
    pub min_improvement: Option<f64>,
    pub j_initial: Option<f64>,
}

impl PlanFile {
    /// Simulates `plan` and records everything needed to check it later. The
    /// instance reference should name the file the plan was solved from; the
    /// weights stored are those of `instance`, which may be overridden.
    pub fn build(plan: &MissionPlan, instance: &Instance, source: InstanceRef, solver: SolverInfo) -> Result<Self> {
        let aug = plan.augment(instance.precedence());
        let schedule = simulate(&aug, instance)?;
        let objective = ObjectiveBreakdown::from_schedule(&schedule, instance.weights());
        Ok(PlanFile {
            format_version: PLAN_FORMAT_VERSION,
            instance: source,
            routes: plan
                .routes()
                .iter()
                .enumerate()
                .map(|(l, r)| RouteEntry {
                    robot: RobotId::from_index(l),
                    vertices: r.clone(),
                })
                .collect(),
            assignment: plan
                .assignment()
                .iter()
                .map(|(&task, &alliance)| AssignmentEntry { task, alliance })
                .collect(),
            precedence_arcs: aug.precedence_arcs().to_vec(),
            task_types: plan
                .assignment()
                .keys()
                .map(|&t| {
                    Ok(TaskTypeEntry {
                        task: t,
                        type_label: instance.task(t).ok_or(Error::UnknownTask(t))?.type_label.clone(),
                    })
                })
                .collect::<Result<_>>()?,
            schedule,
            objective,
            weights: instance.weights(),
            solver,
        })
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("plan files always serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PlanFile = serde_json::from_str(text)?;
        if file.format_version != PLAN_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported plan format version {}, expected {PLAN_FORMAT_VERSION}",
                file.format_version
            )));
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn mission_plan(&self) -> Result<MissionPlan> {
        for (l, entry) in self.routes.iter().enumerate() {
            if entry.robot != RobotId::from_index(l) {
                return Err(Error::MalformedPlan(format!(
                    "routes must be listed by robot id, expected {} found {}",
                    RobotId::from_index(l),
                    entry.robot
                )));
            }
        }
        let mut assignment = BTreeMap::new();
        for entry in &self.assignment {
            if assignment.insert(entry.task, entry.alliance).is_some() {
                return Err(Error::MalformedPlan(format!("task {} is assigned twice", entry.task)));
            }
        }
        MissionPlan::from_parts(self.routes.iter().map(|r| r.vertices.clone()).collect(), assignment)
    }

    /// The stored precedence arcs as a set, for rendering without the instance.
    pub fn precedence(&self) -> Result<PrecedenceSet> {
        PrecedenceSet::new(self.precedence_arcs.iter().copied())
    }

    pub fn task_types(&self) -> BTreeMap<TaskId, String> {
        self.task_types
            .iter()
            .map(|e| (e.task, e.type_label.clone()))
            .collect()
    }

    /// Checks the file against the instance it was solved from: checksum,
    /// feasibility, and that re-simulation reproduces every stored time and,
    /// under the stored weights, the objective. Structural errors are `Err`;
    /// everything else lands in the report.
    pub fn verify(&self, instance: &Instance) -> Result<Verification> {
        let plan = self.mission_plan()?;
        let mut problems = Vec::new();
        let checksum = instance_checksum(instance);
        if checksum != self.instance.checksum {
            problems.push(format!(
                "instance checksum {} does not match the plan's {}",
                checksum, self.instance.checksum
            ));
        }
        let verdict = check_feasibility(&plan, instance, CheckMode::Complete)?;
        if !verdict.feasible() {
            problems.push(format!("infeasible: {}", verdict.summary()));
            return Ok(Verification {
                feasible: false,
                problems,
                objective: None,
            });
        }
        let aug = plan.augment(instance.precedence());
        if aug.precedence_arcs() != self.precedence_arcs.as_slice() {
            problems.push("stored precedence arcs differ from the instance".to_string());
        }
        let schedule = simulate(&aug, instance)?;
        compare_schedules(&self.schedule, &schedule, &mut problems);
        self.weights.validate()?;
        let objective = ObjectiveBreakdown::from_schedule(&schedule, self.weights);
        for (name, stored, fresh) in [
            ("j1", self.objective.j1, objective.j1),
            ("j2", self.objective.j2, objective.j2),
            ("j3", self.objective.j3, objective.j3),
            ("total", self.objective.total, objective.total),
        ] {
            if !close(stored, fresh) {
                problems.push(format!("objective {name}: stored {stored}, re-simulated {fresh}"));
            }
        }
        Ok(Verification {
            feasible: true,
            problems,
            objective: Some(objective),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub feasible: bool,
    pub problems: Vec<String>,
    /// Re-simulated objective, when the plan is feasible.
    pub objective: Option<ObjectiveBreakdown>,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.feasible && self.problems.is_empty()
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REPLAY_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

fn compare_schedules(stored: &Schedule, fresh: &Schedule, problems: &mut Vec<String>) {
    if stored.timelines.len() != fresh.timelines.len() {
        problems.push("schedule has the wrong number of robots".to_string());
        return;
    }
    for (s, f) in stored.timelines.iter().zip(&fresh.timelines) {
        if s.robot != f.robot || s.visits.len() != f.visits.len() {
            problems.push(format!("schedule of {} does not match its route", f.robot));
            continue;
        }
        for (vs, vf) in s.visits.iter().zip(&f.visits) {
            let fields = [
                ("arrival", vs.arrival, vf.arrival),
                ("start", vs.start, vf.start),
                ("finish", vs.finish, vf.finish),
                ("wait", vs.wait, vf.wait),
                ("travel_time", vs.travel_time, vf.travel_time),
                ("travel_distance", vs.travel_distance, vf.travel_distance),
            ];
            if vs.vertex != vf.vertex {
                problems.push(format!("schedule of {} lists {} where the route has {}", f.robot, vs.vertex, vf.vertex));
            }
            for (name, a, b) in fields {
                if !close(a, b) {
                    problems.push(format!("{} at {}: stored {name} {a}, re-simulated {b}", f.robot, vf.vertex));
                }
            }
        }
        if !close(s.finishing_time, f.finishing_time) || !close(s.total_distance, f.total_distance) {
            problems.push(format!("totals of {} differ from re-simulation", f.robot));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructive::construct;
    use crate::generator::{generate, GeneratorConfig, ProblemClass};
    use crate::io::instance_file::{parse_instance, serialize_instance};

    fn solved() -> (Instance, PlanFile) {
        let instance = generate(&GeneratorConfig::new(ProblemClass::new(3, 2).unwrap(), 8)).unwrap();
        let plan = construct(&instance).unwrap().plan;
        let info = SolverInfo {
            algorithm: "construct".into(),
            ..SolverInfo::default()
        };
        let file = PlanFile::build(&plan, &instance, InstanceRef::of(&instance, Some("inst.json")), info).unwrap();
        (instance, file)
    }

    #[test]
    fn round_trip_and_verify() {
        let (instance, file) = solved();
        let text = file.to_json();
        let back = PlanFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_json(), text);
        let report = back.verify(&instance).unwrap();
        assert!(report.ok(), "{:?}", report.problems);
        assert!(text.contains("\"t1\"") && text.contains("\"s1\""));
    }

    #[test]
    fn overridden_weights_verify_against_the_source() {
        let (instance, _) = solved();
        let plan = construct(&instance).unwrap().plan;
        let heavy = instance.clone().with_weights(ObjectiveWeights::makespan_only()).unwrap();
        let file = PlanFile::build(&plan, &heavy, InstanceRef::of(&instance, None), SolverInfo::default()).unwrap();
        assert_eq!(file.objective.total, file.objective.j1);
        assert!(file.verify(&instance).unwrap().ok());
    }

    #[test]
    fn tampered_times_are_reported() {
        let (instance, mut file) = solved();
        file.schedule.timelines[0].visits[1].finish += 1e-3;
        file.objective.total *= 1.0 + 1e-6;
        let report = file.verify(&instance).unwrap();
        assert!(!report.ok());
        assert_eq!(report.problems.len(), 2, "{:?}", report.problems);
    }

    #[test]
    fn other_instance_is_reported() {
        let (instance, file) = solved();
        let mut text = serialize_instance(&instance);
        text = text.replacen("\"speed\": 2.0", "\"speed\": 2.5", 1);
        let changed = parse_instance(&text).unwrap();
        let report = file.verify(&changed).unwrap();
        assert!(report.problems.iter().any(|p| p.contains("checksum")));
    }

    #[test]
    fn infeasible_plan_is_reported() {
        let (instance, mut file) = solved();
        // Reverse r1's tasks; with the class templates this breaks either a
        // coalition order or a precedence pair for this seed.
        let route = &mut file.routes[0].vertices;
        let n = route.len();
        route[1..n - 1].reverse();
        let report = file.verify(&instance).unwrap();
        let plan = file.mission_plan().unwrap();
        let feasible = check_feasibility(&plan, &instance, CheckMode::Complete).unwrap().feasible();
        assert_eq!(report.feasible, feasible);
        if !feasible {
            assert!(report.problems[report.problems.len() - 1].starts_with("infeasible"));
        } else {
            assert!(!report.ok());
        }
    }

    #[test]
    fn malformed_files() {
        let (_, mut file) = solved();
        file.routes.swap(0, 1);
        assert!(file.mission_plan().is_err());
        assert!(PlanFile::from_json("{}").is_err());
        let (_, mut file) = solved();
        file.format_version = 9;
        assert!(PlanFile::from_json(&file.to_json()).is_err());
    }
}
