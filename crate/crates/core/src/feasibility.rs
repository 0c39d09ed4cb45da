//! Plan feasibility: every assigned alliance is capable of its task and the
//! augmented plan is acyclic.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::model::{AllianceId, Digraph, Instance, MissionPlan, TaskId, Vertex};

/// Outcome of in-degree peeling over an adjacency list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peel {
    /// Vertices in the order they were removed as sources. A topological
    /// order of the whole graph when `residue` is empty.
    pub order: Vec<usize>,
    /// Vertices that survive removal of sources and then of sinks, ascending.
    /// Every directed cycle lies inside this set.
    pub residue: Vec<usize>,
}

impl Peel {
    pub fn is_acyclic(&self) -> bool {
        self.residue.is_empty()
    }
}

/// Kahn-style peeling in `O(|V| + |E|)`. Repeatedly removes vertices without
/// incoming edges; whatever remains is then trimmed of vertices without
/// outgoing edges so the residue only holds cycles and the paths between them.
/// Parallel edges are counted with multiplicity.
pub fn peel(successors: &[Vec<usize>]) -> Peel {
    let n = successors.len();
    let mut in_degree = vec![0usize; n];
    for succ in successors {
        for &w in succ {
            in_degree[w] += 1;
        }
    }

    let mut queue: VecDeque<usize> = (0..n).filter(|&v| in_degree[v] == 0).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while let Some(v) = queue.pop_front() {
        removed[v] = true;
        order.push(v);
        for &w in &successors[v] {
            in_degree[w] -= 1;
            if in_degree[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    if order.len() == n {
        return Peel {
            order,
            residue: Vec::new(),
        };
    }

    // Trim sinks inside the remaining subgraph.
    let mut out_degree = vec![0usize; n];
    let mut predecessors = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| !removed[v]) {
        for &w in successors[v].iter().filter(|&&w| !removed[w]) {
            out_degree[v] += 1;
            predecessors[w].push(v);
        }
    }
    let mut trimmed = removed;
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| !trimmed[v] && out_degree[v] == 0).collect();
    while let Some(v) = queue.pop_front() {
        trimmed[v] = true;
        for &u in &predecessors[v] {
            out_degree[u] -= 1;
            if out_degree[u] == 0 {
                queue.push_back(u);
            }
        }
    }
    Peel {
        order,
        residue: (0..n).filter(|&v| !trimmed[v]).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcyclicityCheck {
    pub acyclic: bool,
    /// Peeling residue when cyclic, empty otherwise.
    pub witness: Vec<Vertex>,
}

pub fn is_acyclic(graph: &Digraph) -> AcyclicityCheck {
    let peel = peel(graph.successors());
    AcyclicityCheck {
        acyclic: peel.is_acyclic(),
        witness: peel.residue.iter().map(|&i| graph.vertices()[i]).collect(),
    }
}

/// Topological order of a plan graph as vertex indices, or the peeling residue.
pub fn topological_order(graph: &Digraph) -> std::result::Result<Vec<usize>, Vec<Vertex>> {
    let peel = peel(graph.successors());
    if peel.is_acyclic() {
        Ok(peel.order)
    } else {
        Err(peel.residue.iter().map(|&i| graph.vertices()[i]).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// The plan must assign every task of the instance and close every route.
    Complete,
    /// Only assigned tasks and the arcs between them are checked.
    Partial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    IncapableAssignment { task: TaskId, alliance: AllianceId },
    Cycle { witness: Vec<Vertex> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeasibilityVerdict {
    pub violations: Vec<Violation>,
}

impl FeasibilityVerdict {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.feasible() {
            return "feasible".into();
        }
        self.violations
            .iter()
            .map(|v| match v {
                Violation::IncapableAssignment { task, alliance } => {
                    format!("{alliance} is incapable of {task}")
                }
                Violation::Cycle { witness } => format!(
                    "augmented plan has a cycle within {{{}}}",
                    witness.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
                ),
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Feasibility verdict: all static costs of the assigned alliances are finite
/// and the augmented plan is acyclic. A plan that does not fit the instance
/// (unknown ids, membership mismatch, missing tasks in complete mode) is an
/// error rather than an infeasible verdict.
pub fn check_feasibility(plan: &MissionPlan, instance: &Instance, mode: CheckMode) -> Result<FeasibilityVerdict> {
    plan.validate_against(instance)?;
    if mode == CheckMode::Complete {
        if plan.task_count() != instance.tasks().len() {
            let missing: Vec<String> = instance
                .task_ids()
                .filter(|t| plan.alliance_of(*t).is_none())
                .map(|t| t.to_string())
                .collect();
            return Err(Error::MalformedPlan(format!("tasks not assigned: {}", missing.join(", "))));
        }
        if !plan.is_complete() {
            return Err(Error::MalformedPlan("every route must end with its end vertex".into()));
        }
    }

    let mut verdict = FeasibilityVerdict::default();
    for (&task, &alliance) in plan.assignment() {
        if !instance.cost(task, alliance).is_finite() {
            verdict
                .violations
                .push(Violation::IncapableAssignment { task, alliance });
        }
    }
    let check = is_acyclic(&plan.augment(instance.precedence()).as_digraph());
    if !check.acyclic {
        verdict.violations.push(Violation::Cycle {
            witness: check.witness,
        });
    }
    Ok(verdict)
}
