//! Forward simulation of an augmented plan: travel, waiting and task times
//! per robot and vertex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility;
use crate::model::{AugmentedPlan, Instance, Point, RobotId, TaskId, Vertex};

/// Distance (m) and duration (s) of a straight drive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Leg {
    pub distance: f64,
    pub time: f64,
}

pub fn travel(from: Point, to: Point, speed: f64) -> Result<Leg> {
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(Error::InvalidInput(format!("speed must be finite and > 0, found {speed}")));
    }
    let distance = from.distance(to);
    Ok(Leg {
        distance,
        time: distance / speed,
    })
}

/// Timing of one robot at one vertex of its route. Start and end vertices
/// have zero duration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Visit {
    pub vertex: Vertex,
    pub arrival: f64,
    pub start: f64,
    pub finish: f64,
    pub wait: f64,
    pub travel_time: f64,
    pub travel_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotTimeline {
    pub robot: RobotId,
    pub visits: Vec<Visit>,
    /// Finish of the last vertex of the route.
    pub finishing_time: f64,
    pub total_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub timelines: Vec<RobotTimeline>,
}

impl Schedule {
    pub fn timeline(&self, robot: RobotId) -> Option<&RobotTimeline> {
        self.timelines.get(robot.index())
    }

    /// `(start, finish)` of a task, identical for every member of its alliance.
    pub fn task_window(&self, task: TaskId) -> Option<(f64, f64)> {
        self.timelines
            .iter()
            .flat_map(|t| &t.visits)
            .find(|v| v.vertex == Vertex::Task(task))
            .map(|v| (v.start, v.finish))
    }

    pub fn visit(&self, robot: RobotId, vertex: Vertex) -> Option<&Visit> {
        self.timeline(robot)?.visits.iter().find(|v| v.vertex == vertex)
    }
}

/// Simulates the plan in a topological order of the augmented graph. A task
/// starts once every alliance member has arrived and every precedence
/// predecessor has finished; members that arrive early wait at the task.
pub fn simulate(plan: &AugmentedPlan<'_>, instance: &Instance) -> Result<Schedule> {
    let graph = plan.as_digraph();
    let order = feasibility::topological_order(&graph).map_err(|witness| {
        Error::Infeasible(format!(
            "augmented plan has a cycle within {{{}}}",
            witness.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        ))
    })?;
    let order: Vec<Vertex> = order.into_iter().map(|i| graph.vertices()[i]).collect();
    simulate_in_order(plan, instance, &order)
}

/// Same as [`simulate`] with a caller-supplied topological order.
pub(crate) fn simulate_in_order(plan: &AugmentedPlan<'_>, instance: &Instance, order: &[Vertex]) -> Result<Schedule> {
    let base = plan.base();
    base.validate_against(instance)?;

    let n = instance.tasks().len();
    let mut durations = vec![0.0; n];
    let mut holders: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (&task, &alliance) in base.assignment() {
        durations[task.index()] = instance.cost(task, alliance).value().ok_or_else(|| {
            Error::Infeasible(format!("{alliance} is incapable of {task}"))
        })?;
    }
    for (l, route) in base.routes().iter().enumerate() {
        for (p, v) in route.iter().enumerate() {
            if let Vertex::Task(t) = v {
                holders[t.index()].push((l, p));
            }
        }
    }

    let robots = instance.robots();
    let mut windows: Vec<Option<(f64, f64)>> = vec![None; n];
    let finish_of = |windows: &[Option<(f64, f64)>], v: Vertex| -> Result<f64> {
        match v {
            Vertex::Start(_) => Ok(0.0),
            Vertex::Task(u) => windows[u.index()]
                .map(|w| w.1)
                .ok_or_else(|| Error::Internal(format!("{u} processed out of topological order"))),
            Vertex::End(_) => Err(Error::Internal("end vertex has a successor".into())),
        }
    };

    for &v in order {
        let Vertex::Task(t) = v else { continue };
        let position = instance.task(t).ok_or(Error::UnknownTask(t))?.position;
        let mut ready = 0.0f64;
        for &(l, p) in &holders[t.index()] {
            let prev = base.routes()[l][p - 1];
            let prev_finish = finish_of(&windows, prev)?;
            let prev_position = instance.vertex_position(prev)?.unwrap_or(position);
            let leg = travel(prev_position, position, robots[l].speed)?;
            ready = ready.max(prev_finish + leg.time);
        }
        for &(a, _) in plan.precedence_arcs().iter().filter(|arc| arc.1 == t) {
            ready = ready.max(finish_of(&windows, Vertex::Task(a))?);
        }
        windows[t.index()] = Some((ready, ready + durations[t.index()]));
    }

    let mut timelines = Vec::with_capacity(robots.len());
    for (l, route) in base.routes().iter().enumerate() {
        let robot = &robots[l];
        let mut visits: Vec<Visit> = Vec::with_capacity(route.len());
        let mut prev: Option<(f64, Point)> = None;
        for &v in route {
            let visit = match (v, prev) {
                (Vertex::Start(_), _) => Visit {
                    vertex: v,
                    arrival: 0.0,
                    start: 0.0,
                    finish: 0.0,
                    wait: 0.0,
                    travel_time: 0.0,
                    travel_distance: 0.0,
                },
                (Vertex::Task(t), Some((prev_finish, from))) => {
                    let to = instance.task(t).ok_or(Error::UnknownTask(t))?.position;
                    let leg = travel(from, to, robot.speed)?;
                    let arrival = prev_finish + leg.time;
                    let (start, finish) = windows[t.index()]
                        .ok_or_else(|| Error::Internal(format!("{t} missing from the processing order")))?;
                    Visit {
                        vertex: v,
                        arrival,
                        start,
                        finish,
                        wait: start - arrival,
                        travel_time: leg.time,
                        travel_distance: leg.distance,
                    }
                }
                (Vertex::End(_), Some((prev_finish, from))) => {
                    let leg = match robot.end_position {
                        Some(to) => travel(from, to, robot.speed)?,
                        None => Leg {
                            distance: 0.0,
                            time: 0.0,
                        },
                    };
                    let arrival = prev_finish + leg.time;
                    Visit {
                        vertex: v,
                        arrival,
                        start: arrival,
                        finish: arrival,
                        wait: 0.0,
                        travel_time: leg.time,
                        travel_distance: leg.distance,
                    }
                }
                (_, None) => return Err(Error::MalformedPlan(format!("route of {} lacks a start", robot.id))),
            };
            let here = instance.vertex_position(v)?.unwrap_or(prev.map_or(robot.start_position, |p| p.1));
            prev = Some((visit.finish, here));
            visits.push(visit);
        }
        timelines.push(RobotTimeline {
            robot: robot.id,
            finishing_time: visits.last().map_or(0.0, |v| v.finish),
            total_distance: visits.iter().map(|v| v.travel_distance).sum(),
            visits,
        });
    }
    Ok(Schedule { timelines })
}
