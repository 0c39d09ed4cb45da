//! Graphviz rendering of a mission graph and Gantt segments of a schedule.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AugmentedPlan, EdgeKind, TaskId, Vertex};
use crate::schedule::Schedule;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT digraph: one colored path per robot, precedence arcs dashed black.
/// Task nodes are labeled `t<i>^<type>`.
pub fn export_dot(plan: &AugmentedPlan<'_>, task_types: &BTreeMap<TaskId, String>) -> String {
    let graph = plan.as_digraph();
    let mut out = String::new();
    out.push_str("digraph mission {\n  rankdir=LR;\n  node [fontname=\"Helvetica\"];\n");
    for &v in graph.vertices() {
        let (label, shape) = match v {
            Vertex::Task(t) => match task_types.get(&t) {
                Some(ty) => (format!("{v}^{ty}"), "circle"),
                None => (v.to_string(), "circle"),
            },
            _ => (v.to_string(), "box"),
        };
        let _ = writeln!(out, "  {v} [label={}, shape={shape}];", quote(&label));
    }
    for e in graph.edges() {
        let (from, to) = (graph.vertices()[e.from], graph.vertices()[e.to]);
        let style = match e.kind {
            EdgeKind::Path(r) => format!("color={}, label={}", quote(PALETTE[r.index() % PALETTE.len()]), quote(&r.to_string())),
            EdgeKind::Precedence => "color=\"black\", style=dashed".to_string(),
        };
        let _ = writeln!(out, "  {from} -> {to} [{style}];");
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Travel,
    Wait,
    Task,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GanttSegment {
    pub robot: String,
    pub segment: SegmentKind,
    /// The task being worked on, driven to or waited for; empty on the leg to
    /// the end vertex.
    pub task: String,
    pub t_start: f64,
    pub t_end: f64,
}

/// Per robot, contiguous segments covering `[0, finishing_time]`. Travel and
/// wait segments of zero length are dropped; task segments are kept.
pub fn gantt_segments(schedule: &Schedule) -> Vec<GanttSegment> {
    let mut out = Vec::new();
    for timeline in &schedule.timelines {
        let robot = timeline.robot.to_string();
        let mut clock = 0.0;
        for visit in &timeline.visits {
            let task = visit.vertex.task().map(|t| t.to_string()).unwrap_or_default();
            let mut push = |segment, t_start: f64, t_end: f64| {
                out.push(GanttSegment {
                    robot: robot.clone(),
                    segment,
                    task: task.clone(),
                    t_start,
                    t_end,
                })
            };
            if let Vertex::Start(_) = visit.vertex {
                continue;
            }
            if visit.arrival > clock {
                push(SegmentKind::Travel, clock, visit.arrival);
            }
            if visit.start > visit.arrival {
                push(SegmentKind::Wait, visit.arrival, visit.start);
            }
            if visit.vertex.task().is_some() {
                push(SegmentKind::Task, visit.start, visit.finish);
            }
            clock = visit.finish;
        }
    }
    out
}

/// CSV with header `robot,segment,task,t_start,t_end`.
pub fn export_gantt(schedule: &Schedule) -> Result<String> {
    let segments = gantt_segments(schedule);
    let mut writer = csv::Writer::from_writer(Vec::new());
    if segments.is_empty() {
        writer.write_record(["robot", "segment", "task", "t_start", "t_end"])?;
    }
    for segment in segments {
        writer.serialize(segment)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
