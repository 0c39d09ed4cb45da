//! Command-line front end: generate instances, solve, verify, export and
//! benchmark.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mrta::constructive::construct;
use mrta::generator::{generate, GeneratorConfig, ProblemClass};
use mrta::io::{
    export_dot, export_gantt, read_instance, run_benchmark, write_instance, BenchmarkConfig, InstanceRef, PlanFile,
    SolverInfo,
};
use mrta::local_search::{improve, SearchConfig};
use mrta::oracle::solve_exact;
use mrta::{Error, ObjectiveWeights, Result};

#[derive(Parser)]
#[command(name = "mrta", version, about = "Multi-robot task allocation and scheduling with cooperative tasks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write COUNT instances of a class, seeds SEED..SEED+COUNT-1.
    Generate {
        #[arg(long)]
        class: ProblemClass,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Construct a plan and improve it by local search.
    Solve {
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Stop after construction.
        #[arg(long)]
        no_improve: bool,
        /// Override the instance weights, as w1,w2,w3.
        #[arg(long, value_parser = parse_weights)]
        weights: Option<ObjectiveWeights>,
        #[arg(long)]
        max_sweeps: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        min_improvement: f64,
    },
    /// Check a plan file against its instance.
    Verify {
        plan: PathBuf,
        #[arg(long)]
        instance: PathBuf,
    },
    /// Render a plan file.
    Export {
        plan: PathBuf,
        #[arg(long, value_enum)]
        format: ExportFormat,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive optimum of a tiny instance.
    Exact {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate, solve and verify many instances; write a CSV report.
    Benchmark {
        /// Comma-separated class codes.
        #[arg(long, value_delimiter = ',', default_value = "3A1BCD,3A2BCD,3A3BCD,6A1BCD,6A2BCD,6A3BCD")]
        classes: Vec<ProblemClass>,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Leave the timing columns empty so the report is reproducible.
        #[arg(long)]
        omit_timings: bool,
        /// Directory for reproduction bundles of infeasible results.
        #[arg(long)]
        repro_dir: Option<PathBuf>,
        #[arg(long)]
        max_sweeps: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        min_improvement: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
    Gantt,
}

fn parse_weights(s: &str) -> std::result::Result<ObjectiveWeights, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("invalid weight \"{p}\": {e}")))
        .collect::<std::result::Result<_, _>>()?;
    let [w1, w2, w3] = parts[..] else {
        return Err(format!("expected three weights w1,w2,w3, found {}", parts.len()));
    };
    ObjectiveWeights::new(w1, w2, w3).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn path_str(p: &Path) -> Option<&str> {
    p.to_str()
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Generate {
            class,
            count,
            seed,
            out,
        } => {
            std::fs::create_dir_all(&out)?;
            for i in 0..count as u64 {
                let s = seed.wrapping_add(i);
                let instance = generate(&GeneratorConfig::new(class, s))?;
                let path = out.join(format!("{class}-{s}.json"));
                write_instance(&instance, &path)?;
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Solve {
            instance: path,
            out,
            no_improve,
            weights,
            max_sweeps,
            min_improvement,
        } => {
            let source = read_instance(&path)?;
            let source_ref = InstanceRef::of(&source, path_str(&path));
            let seed = source.meta().seed;
            let instance = match weights {
                Some(w) => source.with_weights(w)?,
                None => source,
            };
            let built = construct(&instance)?;
            let (plan, info) = if no_improve {
                let info = SolverInfo {
                    algorithm: "construct".into(),
                    seed,
                    ..SolverInfo::default()
                };
                (built.plan, info)
            } else {
                let config = SearchConfig {
                    max_sweeps,
                    min_improvement,
                };
                let improved = improve(&built.plan, &instance, &config)?;
                let info = SolverInfo {
                    algorithm: "construct+relocate".into(),
                    seed,
                    sweeps: Some(improved.stats.sweeps),
                    max_sweeps,
                    min_improvement: Some(min_improvement),
                    j_initial: Some(improved.stats.j_initial),
                };
                (improved.plan, info)
            };
            let file = PlanFile::build(&plan, &instance, source_ref, info)?;
            file.write(&out)?;
            let j = file.objective;
            println!(
                "J = {:.6} (makespan {:.6}, mean finish {:.6}, mean distance {:.6})",
                j.total, j.j1, j.j2, j.j3
            );
            Ok(())
        }
        Command::Verify { plan, instance } => {
            let file = PlanFile::read(&plan)?;
            let instance = read_instance(&instance)?;
            let report = file.verify(&instance)?;
            if report.ok() {
                let j = report.objective.expect("feasible plans carry an objective");
                println!("ok: feasible, J = {:.6}", j.total);
                Ok(())
            } else {
                Err(Error::Infeasible(format!(
                    "verification failed:\n  {}",
                    report.problems.join("\n  ")
                )))
            }
        }
        Command::Export { plan, format, out } => {
            let file = PlanFile::read(&plan)?;
            let text = match format {
                ExportFormat::Dot => {
                    let plan = file.mission_plan()?;
                    let precedence = file.precedence()?;
                    export_dot(&plan.augment(&precedence), &file.task_types())
                }
                ExportFormat::Gantt => export_gantt(&file.schedule)?,
            };
            match out {
                Some(path) => std::fs::write(path, text)?,
                None => print!("{text}"),
            }
            Ok(())
        }
        Command::Exact { instance: path, out } => {
            let instance = read_instance(&path)?;
            let result = solve_exact(&instance)?;
            let j = result.best_objective;
            println!(
                "optimum J = {:.6} (makespan {:.6}, mean finish {:.6}, mean distance {:.6}); {} plans, {} feasible",
                j.total, j.j1, j.j2, j.j3, result.plans_enumerated, result.plans_feasible
            );
            if let Some(out) = out {
                let info = SolverInfo {
                    algorithm: "exhaustive".into(),
                    seed: instance.meta().seed,
                    ..SolverInfo::default()
                };
                PlanFile::build(&result.best_plan, &instance, InstanceRef::of(&instance, path_str(&path)), info)?
                    .write(&out)?;
            }
            Ok(())
        }
        Command::Benchmark {
            classes,
            count,
            seed,
            out,
            omit_timings,
            repro_dir,
            max_sweeps,
            min_improvement,
        } => {
            let config = BenchmarkConfig {
                classes,
                count,
                seed,
                search: SearchConfig {
                    max_sweeps,
                    min_improvement,
                },
                repro_dir,
            };
            let report = run_benchmark(&config)?;
            std::fs::write(&out, report.to_csv(!omit_timings)?)?;
            for s in &report.summaries {
                println!(
                    "{}: {} instances, improvement mean {:.3}% min {:.3}% max {:.3}%, all feasible: {}",
                    s.class, s.count, s.improvement_mean, s.improvement_min, s.improvement_max, s.all_feasible
                );
            }
            Ok(())
        }
    }
}
