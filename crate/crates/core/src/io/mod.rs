//! File formats, exports and the benchmark harness.

pub mod benchmark;
pub mod export;
pub mod instance_file;
pub mod plan_file;

pub use benchmark::{run_benchmark, BenchmarkConfig, BenchmarkReport};
pub use export::{export_dot, export_gantt, gantt_segments};
pub use instance_file::{instance_checksum, parse_instance, read_instance, serialize_instance, write_instance};
pub use plan_file::{InstanceRef, PlanFile, SolverInfo, Verification};
