use std::fmt;

use thiserror::Error;

use crate::model::{AllianceId, RobotId, TaskId, Vertex};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown task {0}")]
    UnknownTask(TaskId),
    #[error("unknown robot {0}")]
    UnknownRobot(RobotId),
    #[error("unknown alliance {0}")]
    UnknownAlliance(AllianceId),
    #[error("vertex {0} is not part of the plan")]
    UnknownVertex(Vertex),
    #[error("insertion index {index} for robot {robot} is outside 1..={max}")]
    IndexOutOfRange {
        robot: RobotId,
        index: usize,
        max: usize,
    },
    #[error("malformed plan: {0}")]
    MalformedPlan(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("instance validation failed\n{0}")]
    Validation(ValidationReport),
    #[error("plan is infeasible: {0}")]
    Infeasible(String),
    #[error("no capable alliance can take task {0}")]
    NoCapableAlliance(TaskId),
    #[error("instance has {tasks} tasks but the exact solver is limited to {limit}")]
    TooLarge { tasks: usize, limit: usize },
    #[error("malformed document: {0}")]
    Format(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Format(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Format(err.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IssueKind {
    Malformed,
    DuplicateId,
    UnknownId,
    NonFinite,
    NegativeCost,
    InvalidSpeed,
    InvalidAlliance,
    InvalidWeights,
    /// The precedence digraph must be acyclic.
    CyclicPrecedence,
    /// Every task needs at least one capable alliance.
    NoCapableAlliance,
}

impl IssueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            IssueKind::Malformed => "malformed",
            IssueKind::DuplicateId => "duplicate id",
            IssueKind::UnknownId => "unknown id",
            IssueKind::NonFinite => "non-finite value",
            IssueKind::NegativeCost => "negative cost",
            IssueKind::InvalidSpeed => "invalid speed",
            IssueKind::InvalidAlliance => "invalid alliance",
            IssueKind::InvalidWeights => "invalid weights",
            IssueKind::CyclicPrecedence => "cyclic precedence",
            IssueKind::NoCapableAlliance => "no capable alliance",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationIssue {
    /// Location inside the instance document, e.g. `tasks[3].position`.
    pub section: String,
    pub kind: IssueKind,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn push(&mut self, section: impl Into<String>, kind: IssueKind, message: impl Into<String>) {
        self.issues.push(ValidationIssue {
            section: section.into(),
            kind,
            message: message.into(),
        });
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has(&self, kind: IssueKind) -> bool {
        self.issues.iter().any(|i| i.kind == kind)
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, issue) in self.issues.iter().enumerate() {
            if n > 0 {
                writeln!(f)?;
            }
            write!(f, "  {}: {}: {}", issue.section, issue.kind.as_str(), issue.message)?;
        }
        Ok(())
    }
}
