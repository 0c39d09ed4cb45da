//! C ABI over the `mrta` solver.
//!
//! Instances and plans are opaque handles created by this library and
//! released with their `_free` function. Every fallible call returns an
//! [`MrtaStatus`]; on failure [`mrta_last_error`] describes the problem.
//! Strings returned through `char **` outputs are owned by the caller and
//! released with [`mrta_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mrta::constructive::construct;
use mrta::feasibility::{check_feasibility, CheckMode};
use mrta::generator::{generate, GeneratorConfig, ProblemClass};
use mrta::io::{export_dot, export_gantt, parse_instance, serialize_instance, InstanceRef, PlanFile, SolverInfo};
use mrta::local_search::{improve, SearchConfig};
use mrta::{Error, Instance, MissionPlan};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MrtaStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed document, failed validation or bad parameter.
    InvalidInput = 3,
    Infeasible = 4,
    NoCapableAlliance = 5,
    /// The instance exceeds a size limit.
    TooLarge = 6,
    Io = 7,
    /// Internal error, including a caught panic.
    Internal = 8,
}

/// Opaque problem instance.
pub struct MrtaInstance {
    inner: Instance,
}

/// Opaque solved plan with its schedule and objective.
pub struct MrtaPlan {
    plan: MissionPlan,
    file: PlanFile,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MrtaSolveOptions {
    /// Run local search after construction.
    pub improve: bool,
    /// Sweep limit of the local search; 0 means unlimited.
    pub max_sweeps: u64,
    /// Smallest accepted objective decrease.
    pub min_improvement: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MrtaObjective {
    pub total: f64,
    pub makespan: f64,
    pub mean_finish: f64,
    pub mean_distance: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(MrtaStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Infeasible(_) => MrtaStatus::Infeasible,
            Error::NoCapableAlliance(_) => MrtaStatus::NoCapableAlliance,
            Error::TooLarge { .. } => MrtaStatus::TooLarge,
            Error::Io(_) => MrtaStatus::Io,
            Error::Internal(_) => MrtaStatus::Internal,
            _ => MrtaStatus::InvalidInput,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MrtaStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MrtaStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            MrtaStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(MrtaStatus::NullArgument, format!("{what} is NULL"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(MrtaStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|e| Failure(MrtaStatus::Internal, e.to_string()))?;
    put(out, c.into_raw(), "out")
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Message of the last failed call on this thread, or NULL after a
/// successful call. Valid until the next call into this library.
#[no_mangle]
pub extern "C" fn mrta_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static, NUL-terminated name of a status code.
#[no_mangle]
pub extern "C" fn mrta_status_name(status: MrtaStatus) -> *const c_char {
    let s: &'static CStr = match status {
        MrtaStatus::Ok => c"ok",
        MrtaStatus::NullArgument => c"null argument",
        MrtaStatus::InvalidUtf8 => c"invalid utf-8",
        MrtaStatus::InvalidInput => c"invalid input",
        MrtaStatus::Infeasible => c"infeasible",
        MrtaStatus::NoCapableAlliance => c"no capable alliance",
        MrtaStatus::TooLarge => c"too large",
        MrtaStatus::Io => c"i/o error",
        MrtaStatus::Internal => c"internal error",
    };
    s.as_ptr()
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mrta_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse and validate an instance document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mrta_instance_from_json(json: *const c_char, out: *mut *mut MrtaInstance) -> MrtaStatus {
    guard(|| {
        let instance = parse_instance(text(json, "json")?)?;
        put(out, boxed(MrtaInstance { inner: instance }), "out")
    })
}

/// Generate a benchmark instance, e.g. class `"3A2BCD"`.
///
/// # Safety
/// `class_code` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mrta_instance_generate(
    class_code: *const c_char,
    seed: u64,
    out: *mut *mut MrtaInstance,
) -> MrtaStatus {
    guard(|| {
        let class: ProblemClass = text(class_code, "class_code")?.parse()?;
        let instance = generate(&GeneratorConfig::new(class, seed))?;
        put(out, boxed(MrtaInstance { inner: instance }), "out")
    })
}

/// # Safety
/// `instance` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mrta_instance_to_json(instance: *const MrtaInstance, out: *mut *mut c_char) -> MrtaStatus {
    guard(|| {
        let instance = borrow(instance, "instance")?;
        put_string(out, serialize_instance(&instance.inner))
    })
}

/// Number of tasks, or 0 for NULL.
///
/// # Safety
/// `instance` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrta_instance_task_count(instance: *const MrtaInstance) -> usize {
    instance.as_ref().map_or(0, |i| i.inner.tasks().len())
}

/// # Safety
/// `instance` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrta_instance_free(instance: *mut MrtaInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

#[no_mangle]
pub extern "C" fn mrta_solve_options_default() -> MrtaSolveOptions {
    let search = SearchConfig::default();
    MrtaSolveOptions {
        improve: true,
        max_sweeps: search.max_sweeps.map_or(0, |s| s as u64),
        min_improvement: search.min_improvement,
    }
}

/// Construct a plan and, unless disabled, improve it. `options` may be NULL
/// for the defaults.
///
/// # Safety
/// `instance` must be a live handle, `options` NULL or readable, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mrta_solve(
    instance: *const MrtaInstance,
    options: *const MrtaSolveOptions,
    out: *mut *mut MrtaPlan,
) -> MrtaStatus {
    guard(|| {
        let instance = &borrow(instance, "instance")?.inner;
        let options = options.as_ref().copied().unwrap_or_else(|| mrta_solve_options_default());
        let built = construct(instance)?;
        let seed = instance.meta().seed;
        let (plan, info) = if options.improve {
            let max_sweeps = (options.max_sweeps > 0).then_some(options.max_sweeps as usize);
            let config = SearchConfig {
                max_sweeps,
                min_improvement: options.min_improvement,
            };
            let improved = improve(&built.plan, instance, &config)?;
            let info = SolverInfo {
                algorithm: "construct+relocate".into(),
                seed,
                sweeps: Some(improved.stats.sweeps),
                max_sweeps,
                min_improvement: Some(options.min_improvement),
                j_initial: Some(improved.stats.j_initial),
            };
            (improved.plan, info)
        } else {
            let info = SolverInfo {
                algorithm: "construct".into(),
                seed,
                ..SolverInfo::default()
            };
            (built.plan, info)
        };
        let file = PlanFile::build(&plan, instance, InstanceRef::of(instance, None), info)?;
        put(out, boxed(MrtaPlan { plan, file }), "out")
    })
}

/// Read a plan document as written by [`mrta_plan_to_json`].
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mrta_plan_from_json(json: *const c_char, out: *mut *mut MrtaPlan) -> MrtaStatus {
    guard(|| {
        let file = PlanFile::from_json(text(json, "json")?)?;
        let plan = file.mission_plan()?;
        put(out, boxed(MrtaPlan { plan, file }), "out")
    })
}

/// # Safety
/// `plan` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mrta_plan_objective(plan: *const MrtaPlan, out: *mut MrtaObjective) -> MrtaStatus {
    guard(|| {
        let j = borrow(plan, "plan")?.file.objective;
        put(
            out,
            MrtaObjective {
                total: j.total,
                makespan: j.j1,
                mean_finish: j.j2,
                mean_distance: j.j3,
            },
            "out",
        )
    })
}

/// Capability and acyclicity verdict of `plan` on `instance`.
///
/// # Safety
/// `plan` and `instance` must be live handles; `feasible` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mrta_check_feasibility(
    plan: *const MrtaPlan,
    instance: *const MrtaInstance,
    feasible: *mut bool,
) -> MrtaStatus {
    guard(|| {
        let plan = borrow(plan, "plan")?;
        let instance = borrow(instance, "instance")?;
        let verdict = check_feasibility(&plan.plan, &instance.inner, CheckMode::Complete)?;
        put(feasible, verdict.feasible(), "feasible")
    })
}

/// Full verification of a plan document against `instance`: checksum,
/// feasibility, schedule replay and objective. A failed verification
/// returns `Infeasible` with the problems in [`mrta_last_error`].
///
/// # Safety
/// `plan` and `instance` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn mrta_plan_verify(plan: *const MrtaPlan, instance: *const MrtaInstance) -> MrtaStatus {
    guard(|| {
        let plan = borrow(plan, "plan")?;
        let instance = borrow(instance, "instance")?;
        let report = plan.file.verify(&instance.inner)?;
        if report.ok() {
            Ok(())
        } else {
            Err(Failure(MrtaStatus::Infeasible, report.problems.join("\n")))
        }
    })
}

/// # Safety
/// `plan` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mrta_plan_to_json(plan: *const MrtaPlan, out: *mut *mut c_char) -> MrtaStatus {
    guard(|| put_string(out, borrow(plan, "plan")?.file.to_json()))
}

/// Graphviz rendering of the augmented plan.
///
/// # Safety
/// `plan` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mrta_plan_export_dot(plan: *const MrtaPlan, out: *mut *mut c_char) -> MrtaStatus {
    guard(|| {
        let plan = borrow(plan, "plan")?;
        let precedence = plan.file.precedence()?;
        put_string(out, export_dot(&plan.plan.augment(&precedence), &plan.file.task_types()))
    })
}

/// Gantt segments as CSV.
///
/// # Safety
/// `plan` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mrta_plan_export_gantt(plan: *const MrtaPlan, out: *mut *mut c_char) -> MrtaStatus {
    guard(|| put_string(out, export_gantt(&borrow(plan, "plan")?.file.schedule)?))
}

/// # Safety
/// `plan` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrta_plan_free(plan: *mut MrtaPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}
