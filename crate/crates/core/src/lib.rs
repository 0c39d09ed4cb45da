//! Time-extended multi-robot task allocation and scheduling with cooperative
//! tasks and precedence constraints.
//!
//! A mission plan is the union of one directed path graph per robot. Tasks
//! executed by a coalition appear in the path of every member. Adding the
//! precedence arcs yields the augmented plan, and a plan is feasible exactly
//! when every assigned alliance is capable and the augmented plan is acyclic.
//!
//! The crate provides:
//! - [`model`]: tasks, robots, alliances, instances, plans and graph plumbing,
//! - [`feasibility`]: in-degree peeling and the plan feasibility verdict,
//! - [`schedule`]: forward simulation of travel, waiting and task times,
//! - [`objective`]: makespan, average finishing time and average distance,
//! - [`constructive`]: greedy leaf-append construction,
//! - [`local_search`]: steepest descent over the relocate neighborhood,
//! - [`generator`]: the seeded benchmark problem classes,
//! - [`oracle`]: exhaustive solver for tiny instances,
//! - [`io`]: instance/plan files, DOT and Gantt exports, benchmark harness.

pub mod constructive;
pub mod error;
pub mod feasibility;
pub mod generator;
pub mod io;
pub mod local_search;
pub mod model;
pub mod objective;
pub mod oracle;
pub mod schedule;

pub use error::{Error, IssueKind, Result, ValidationIssue, ValidationReport};
pub use model::{
    Alliance, AllianceId, AugmentedPlan, Cost, Digraph, EdgeKind, Instance, InstanceMeta,
    MissionPlan, Point, PrecedenceSet, Robot, RobotId, StaticCostTable, Task, TaskId, Vertex,
};
pub use objective::{ObjectiveBreakdown, ObjectiveWeights};

#[cfg(test)]
mod test_support;
