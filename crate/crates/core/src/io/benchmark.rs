//! Benchmark harness: generate, construct, improve and verify many instances
//! per class, then report one CSV row per instance plus one summary per class.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::constructive::construct;
use crate::error::{Error, Result};
use crate::feasibility::{check_feasibility, CheckMode};
use crate::generator::{generate, GeneratorConfig, ProblemClass};
use crate::io::instance_file::write_instance;
use crate::local_search::{improve, SearchConfig};
use crate::model::{Instance, MissionPlan};
use crate::oracle::plan_admits_topological_order;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkConfig {
    pub classes: Vec<ProblemClass>,
    pub count: usize,
    /// Instance `i` (0-based) of every class uses seed `seed + i`.
    pub seed: u64,
    pub search: SearchConfig,
    /// Where to write the instance and plan of an infeasible result.
    pub repro_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceResult {
    pub class: ProblemClass,
    pub seed: u64,
    pub j_init: f64,
    pub j_final: f64,
    pub improvement_percent: f64,
    pub construct_ms: f64,
    pub improve_ms: f64,
    pub sweeps: usize,
    pub feasible_init: bool,
    pub feasible_final: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassSummary {
    pub class: ProblemClass,
    pub count: usize,
    pub improvement_mean: f64,
    pub improvement_min: f64,
    pub improvement_max: f64,
    pub all_feasible: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchmarkReport {
    /// Ordered by class (as configured), then seed.
    pub rows: Vec<InstanceResult>,
    pub summaries: Vec<ClassSummary>,
}

/// Both the peeling verdict and an exhaustive topological-order search.
pub fn plan_is_feasible(plan: &MissionPlan, instance: &Instance) -> Result<bool> {
    let verdict = check_feasibility(plan, instance, CheckMode::Complete)?;
    Ok(verdict.feasible() && plan_admits_topological_order(plan, instance))
}

pub fn run_instance(class: ProblemClass, seed: u64, search: &SearchConfig, repro_dir: Option<&PathBuf>) -> Result<InstanceResult> {
    let instance = generate(&GeneratorConfig::new(class, seed))?;
    let t0 = Instant::now();
    let built = construct(&instance)?;
    let construct_ms = t0.elapsed().as_secs_f64() * 1e3;
    let feasible_init = plan_is_feasible(&built.plan, &instance)?;
    if !feasible_init {
        return Err(report_infeasible(&instance, &built.plan, "construct", repro_dir));
    }
    let t1 = Instant::now();
    let improved = improve(&built.plan, &instance, search)?;
    let improve_ms = t1.elapsed().as_secs_f64() * 1e3;
    let feasible_final = plan_is_feasible(&improved.plan, &instance)?;
    if !feasible_final {
        return Err(report_infeasible(&instance, &improved.plan, "improve", repro_dir));
    }
    Ok(InstanceResult {
        class,
        seed,
        j_init: improved.stats.j_initial,
        j_final: improved.stats.j_final,
        improvement_percent: improved.stats.improvement_percent,
        construct_ms,
        improve_ms,
        sweeps: improved.stats.sweeps,
        feasible_init,
        feasible_final,
    })
}

fn report_infeasible(instance: &Instance, plan: &MissionPlan, stage: &str, repro_dir: Option<&PathBuf>) -> Error {
    let name = format!(
        "{}-seed{}-{stage}",
        instance.meta().class.as_deref().unwrap_or("instance"),
        instance.meta().seed.unwrap_or(0)
    );
    let mut msg = format!("{stage} produced an infeasible plan for {name}");
    if let Some(dir) = repro_dir {
        let written = (|| -> Result<(PathBuf, PathBuf)> {
            std::fs::create_dir_all(dir)?;
            let instance_path = dir.join(format!("{name}.instance.json"));
            let plan_path = dir.join(format!("{name}.plan.json"));
            write_instance(instance, &instance_path)?;
            // An infeasible plan cannot be simulated, so only its structure is stored.
            let raw = serde_json::json!({
                "stage": stage,
                "routes": plan.routes(),
                "assignment": plan.assignment(),
            });
            std::fs::write(&plan_path, serde_json::to_string_pretty(&raw)? + "\n")?;
            Ok((instance_path, plan_path))
        })();
        match written {
            Ok((i, p)) => msg.push_str(&format!("; reproduction bundle: {} and {}", i.display(), p.display())),
            Err(e) => msg.push_str(&format!("; writing the reproduction bundle failed: {e}")),
        }
    }
    Error::Infeasible(msg)
}

pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkReport> {
    config.search.validate()?;
    let jobs: Vec<(ProblemClass, u64)> = config
        .classes
        .iter()
        .flat_map(|&c| (0..config.count as u64).map(move |i| (c, config.seed.wrapping_add(i))))
        .collect();
    let rows: Vec<InstanceResult> = jobs
        .into_par_iter()
        .map(|(class, seed)| run_instance(class, seed, &config.search, config.repro_dir.as_ref()))
        .collect::<Result<_>>()?;
    let summaries = config
        .classes
        .iter()
        .map(|&class| summarize(class, rows.iter().filter(|r| r.class == class)))
        .collect();
    Ok(BenchmarkReport { rows, summaries })
}

fn summarize<'a>(class: ProblemClass, rows: impl Iterator<Item = &'a InstanceResult>) -> ClassSummary {
    let mut summary = ClassSummary {
        class,
        count: 0,
        improvement_mean: 0.0,
        improvement_min: f64::INFINITY,
        improvement_max: f64::NEG_INFINITY,
        all_feasible: true,
    };
    let mut sum = 0.0;
    for r in rows {
        summary.count += 1;
        sum += r.improvement_percent;
        summary.improvement_min = summary.improvement_min.min(r.improvement_percent);
        summary.improvement_max = summary.improvement_max.max(r.improvement_percent);
        summary.all_feasible &= r.feasible_init && r.feasible_final;
    }
    if summary.count == 0 {
        summary.improvement_min = 0.0;
        summary.improvement_max = 0.0;
    } else {
        summary.improvement_mean = sum / summary.count as f64;
    }
    summary
}

#[derive(Serialize)]
struct CsvRow {
    kind: &'static str,
    class: String,
    seed: Option<u64>,
    j_init: Option<f64>,
    j_final: Option<f64>,
    improvement_percent: f64,
    construct_ms: Option<f64>,
    improve_ms: Option<f64>,
    sweeps: Option<usize>,
    feasible_init: bool,
    feasible_final: bool,
    improvement_min: Option<f64>,
    improvement_max: Option<f64>,
}

impl BenchmarkReport {
    /// Instance rows of a class followed by its summary row, whose
    /// `improvement_percent` is the class mean. Timing columns are left empty
    /// when `timings` is false, which makes the output reproducible.
    pub fn to_csv(&self, timings: bool) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for summary in &self.summaries {
            for r in self.rows.iter().filter(|r| r.class == summary.class) {
                writer.serialize(CsvRow {
                    kind: "instance",
                    class: r.class.to_string(),
                    seed: Some(r.seed),
                    j_init: Some(r.j_init),
                    j_final: Some(r.j_final),
                    improvement_percent: r.improvement_percent,
                    construct_ms: timings.then_some(r.construct_ms),
                    improve_ms: timings.then_some(r.improve_ms),
                    sweeps: Some(r.sweeps),
                    feasible_init: r.feasible_init,
                    feasible_final: r.feasible_final,
                    improvement_min: None,
                    improvement_max: None,
                })?;
            }
            writer.serialize(CsvRow {
                kind: "summary",
                class: summary.class.to_string(),
                seed: None,
                j_init: None,
                j_final: None,
                improvement_percent: summary.improvement_mean,
                construct_ms: None,
                improve_ms: None,
                sweeps: None,
                feasible_init: summary.all_feasible,
                feasible_final: summary.all_feasible,
                improvement_min: Some(summary.improvement_min),
                improvement_max: Some(summary.improvement_max),
            })?;
        }
        let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchmarkConfig {
        BenchmarkConfig {
            classes: vec![ProblemClass::new(3, 1).unwrap(), ProblemClass::new(3, 2).unwrap()],
            count: 4,
            seed: 40,
            search: SearchConfig::default(),
            repro_dir: None,
        }
    }

    #[test]
    fn rows_and_summaries() {
        let report = run_benchmark(&small()).unwrap();
        assert_eq!(report.rows.len(), 8);
        let seeds: Vec<u64> = report.rows.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![40, 41, 42, 43, 40, 41, 42, 43]);
        assert!(report.rows.iter().all(|r| r.feasible_init && r.feasible_final && r.improvement_percent >= 0.0));
        assert_eq!(report.summaries.len(), 2);
        let csv = report.to_csv(false).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 8 + 2);
        assert!(lines[0].starts_with("kind,class,seed,j_init,j_final,improvement_percent,construct_ms"));
        assert!(lines[5].starts_with("summary,3A1BCD,,"));
        assert_eq!(csv, run_benchmark(&small()).unwrap().to_csv(false).unwrap());
    }

    #[test]
    fn infeasible_result_leaves_a_bundle() {
        let dir = tempfile::tempdir().unwrap();
        let instance = generate(&GeneratorConfig::new(ProblemClass::new(3, 1).unwrap(), 2)).unwrap();
        let mut plan = construct(&instance).unwrap().plan;
        // Swap the alliance of the type B task to an incapable one by rebuilding.
        let mut assignment = plan.assignment().clone();
        assignment.insert(crate::model::TaskId(4), crate::model::AllianceId(4));
        plan = MissionPlan::from_parts(plan.routes().to_vec(), assignment).unwrap();
        let err = report_infeasible(&instance, &plan, "improve", Some(&dir.path().to_path_buf()));
        let msg = err.to_string();
        assert!(msg.contains("3A1BCD-seed2-improve"), "{msg}");
        assert!(dir.path().join("3A1BCD-seed2-improve.instance.json").exists());
        let raw = std::fs::read_to_string(dir.path().join("3A1BCD-seed2-improve.plan.json")).unwrap();
        assert!(raw.contains("\"routes\""));
    }

    #[test]
    fn summary_statistics() {
        let report = run_benchmark(&small()).unwrap();
        let first: Vec<f64> = report.rows[..4].iter().map(|r| r.improvement_percent).collect();
        let s = &report.summaries[0];
        assert_eq!(s.count, 4);
        assert!((s.improvement_mean - first.iter().sum::<f64>() / 4.0).abs() < 1e-12);
        assert_eq!(s.improvement_max, first.iter().cloned().fold(f64::MIN, f64::max));
    }
}
