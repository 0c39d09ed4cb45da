//! Instance files: pretty-printed JSON with a trailing newline. Incapable
//! alliances are written as the string `"inf"`.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, IssueKind, Result, ValidationReport};
use crate::model::{
    Alliance, AllianceId, Cost, Instance, InstanceMeta, Point, PrecedenceSet, Robot, RobotId, StaticCostTable, Task,
    TaskId,
};
use crate::objective::ObjectiveWeights;

pub const INSTANCE_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    meta: MetaDoc,
    robots: Vec<RobotDoc>,
    tasks: Vec<TaskDoc>,
    alliances: Vec<AllianceDoc>,
    static_costs: Vec<CostRowDoc>,
    precedence: Vec<[u32; 2]>,
    weights: ObjectiveWeights,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetaDoc {
    format_version: u32,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    class: Option<String>,
    #[serde(default)]
    rng: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RobotDoc {
    id: u32,
    start: Point,
    end: Option<Point>,
    speed: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaskDoc {
    id: u32,
    #[serde(rename = "type")]
    type_label: String,
    position: Point,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AllianceDoc {
    id: u32,
    members: Vec<u32>,
}

/// Costs of one task against every alliance in declaration order.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CostRowDoc {
    task: u32,
    costs: Vec<Cost>,
}

pub fn serialize_instance(instance: &Instance) -> String {
    let meta = instance.meta();
    let doc = InstanceDoc {
        meta: MetaDoc {
            format_version: INSTANCE_FORMAT_VERSION,
            seed: meta.seed,
            class: meta.class.clone(),
            rng: meta.rng.clone(),
        },
        robots: instance
            .robots()
            .iter()
            .map(|r| RobotDoc {
                id: r.id.0,
                start: r.start_position,
                end: r.end_position,
                speed: r.speed,
            })
            .collect(),
        tasks: instance
            .tasks()
            .iter()
            .map(|t| TaskDoc {
                id: t.id.0,
                type_label: t.type_label.clone(),
                position: t.position,
            })
            .collect(),
        alliances: instance
            .alliances()
            .iter()
            .map(|a| AllianceDoc {
                id: a.id.0,
                members: a.members().iter().map(|r| r.0).collect(),
            })
            .collect(),
        static_costs: instance
            .task_ids()
            .map(|t| CostRowDoc {
                task: t.0,
                costs: instance.alliances().iter().map(|a| instance.cost(t, a.id)).collect(),
            })
            .collect(),
        precedence: instance.precedence().pairs().iter().map(|&(a, b)| [a.0, b.0]).collect(),
        weights: instance.weights(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("instance documents always serialize");
    text.push('\n');
    text
}

/// Parses and validates. Structural problems (bad JSON, wrong field types)
/// are [`Error::Format`] with line and column; invariant violations are
/// collected into one [`Error::Validation`] report.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let mut report = ValidationReport::default();
    if doc.meta.format_version != INSTANCE_FORMAT_VERSION {
        report.push(
            "meta.format_version",
            IssueKind::Malformed,
            format!(
                "unsupported format version {}, expected {INSTANCE_FORMAT_VERSION}",
                doc.meta.format_version
            ),
        );
    }

    let robots = doc
        .robots
        .iter()
        .map(|r| Robot {
            id: RobotId(r.id),
            start_position: r.start,
            end_position: r.end,
            speed: r.speed,
        })
        .collect();
    let tasks = doc
        .tasks
        .iter()
        .map(|t| Task {
            id: TaskId(t.id),
            type_label: t.type_label.clone(),
            position: t.position,
        })
        .collect();
    let mut alliances = Vec::with_capacity(doc.alliances.len());
    for (n, a) in doc.alliances.iter().enumerate() {
        let distinct: BTreeSet<u32> = a.members.iter().copied().collect();
        if distinct.len() != a.members.len() {
            report.push(
                format!("alliances[{n}].members"),
                IssueKind::InvalidAlliance,
                format!("alliance {} lists a robot more than once", a.id),
            );
        }
        alliances.push(Alliance::new(AllianceId(a.id), a.members.iter().map(|&r| RobotId(r))));
    }
    let mut rows = Vec::with_capacity(doc.static_costs.len());
    for (n, row) in doc.static_costs.iter().enumerate() {
        if row.task as usize != n + 1 {
            report.push(
                format!("static_costs[{n}].task"),
                IssueKind::Malformed,
                format!("cost rows must follow task order, expected task {} found {}", n + 1, row.task),
            );
        }
        rows.push(row.costs.clone());
    }

    let mut pairs = Vec::new();
    let mut seen = BTreeSet::new();
    for (n, &[a, b]) in doc.precedence.iter().enumerate() {
        if a == b {
            report.push(
                format!("precedence[{n}]"),
                IssueKind::CyclicPrecedence,
                format!("task {a} cannot precede itself; the precedence relation must be acyclic"),
            );
        } else if !seen.insert((a, b)) {
            report.push(
                format!("precedence[{n}]"),
                IssueKind::Malformed,
                format!("duplicate precedence pair ({a}, {b})"),
            );
        } else {
            pairs.push((TaskId(a), TaskId(b)));
        }
    }
    let precedence = PrecedenceSet::new(pairs)?;

    let instance = Instance::new_unchecked(
        robots,
        tasks,
        alliances,
        StaticCostTable::from_rows(rows),
        precedence,
        doc.weights,
    )
    .with_meta(InstanceMeta {
        seed: doc.meta.seed,
        class: doc.meta.class,
        rng: doc.meta.rng,
    });
    for issue in instance.validate().issues {
        report.issues.push(issue);
    }
    report.into_result()?;
    Ok(instance)
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text).map_err(|e| match e {
        Error::Format(msg) => Error::Format(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_instance(instance: &Instance, path: &Path) -> Result<()> {
    std::fs::write(path, serialize_instance(instance))?;
    Ok(())
}

/// `sha256:<hex>` of the canonical serialization.
pub fn instance_checksum(instance: &Instance) -> String {
    let digest = Sha256::digest(serialize_instance(instance).as_bytes());
    format!("sha256:{}", hex::encode(digest))
}
