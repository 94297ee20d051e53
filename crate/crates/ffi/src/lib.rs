//! C interface to the capsched toolkit.
//!
//! Instances and schedules are opaque handles owned by the caller and
//! released with their `_free` function. Every call returns a
//! [`CapschedStatus`]; on failure [`capsched_last_error`] describes the
//! error for the calling thread. Strings returned through `char **`
//! parameters are released with [`capsched_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;
use std::time::Duration;

use capsched::bounds::bound_report;
use capsched::harness::{run_algorithm, verify_schedule};
use capsched::io::{inline_instance, parse_instance, to_json, ScheduleDoc};
use capsched::oracle::{optimal_schedule, OracleLimits};
use capsched::single_machine::DEFAULT_EPSILON;
use capsched::{check_feasibility, evaluate_cost, Algorithm, Error, Instance, Schedule};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapschedStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    /// A job or instance parameter is out of range.
    Domain = 4,
    InvalidArgument = 5,
    /// The instance is too large for the exact oracle.
    TooLarge = 6,
    InvalidSchedule = 7,
    Internal = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CapschedAlgorithm {
    Wsvf = 0,
    Wspt = 1,
    Hybrid = 2,
    /// Single machine only.
    Pack = 3,
}

pub struct CapschedInstance {
    inner: Arc<Instance>,
}

pub struct CapschedSchedule {
    inner: Schedule,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CapschedStatus {
    match e {
        Error::Json(_) => CapschedStatus::Parse,
        Error::Domain { .. } => CapschedStatus::Domain,
        Error::Config(_)
        | Error::InsufficientMachines(_)
        | Error::NotSingleMachine(_)
        | Error::MachineOutOfRange { .. }
        | Error::PackPrecondition { .. } => CapschedStatus::InvalidArgument,
        Error::TooLarge { .. } => CapschedStatus::TooLarge,
        Error::MissingAssignment(_)
        | Error::DuplicateAssignment { .. }
        | Error::UnknownJob(_)
        | Error::NotWsvfSchedule => CapschedStatus::InvalidSchedule,
        _ => CapschedStatus::Internal,
    }
}

struct Fail(CapschedStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CapschedStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            CapschedStatus::Ok
        }
        Ok(Err(Fail(status, message))) => {
            set_error(&message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CapschedStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(CapschedStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

fn to_c_string(s: String) -> Result<*mut c_char, Fail> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Fail(CapschedStatus::Internal, "string contains a NUL byte".into()))
}

/// Message for the last failed call on this thread, or an empty string.
/// Valid until the next capsched call on the same thread.
#[no_mangle]
pub extern "C" fn capsched_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Static version string.
#[no_mangle]
pub extern "C" fn capsched_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses an instance from NUL-terminated JSON.
///
/// # Safety
/// `json` must be a valid C string and `out_instance` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn capsched_instance_from_json(
    json: *const c_char,
    out_instance: *mut *mut CapschedInstance,
) -> CapschedStatus {
    guard(|| {
        let slot = out(out_instance, "out_instance")?;
        *slot = ptr::null_mut();
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|_| Fail(CapschedStatus::InvalidUtf8, "json is not valid UTF-8".into()))?;
        let inst = parse_instance(text)?;
        *slot = Box::into_raw(Box::new(CapschedInstance { inner: Arc::new(inst) }));
        Ok(())
    })
}

/// # Safety
/// `instance` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn capsched_instance_free(instance: *mut CapschedInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn capsched_instance_job_count(
    instance: *const CapschedInstance,
    out_count: *mut usize,
) -> CapschedStatus {
    guard(|| {
        *out(out_count, "out_count")? = deref(instance, "instance")?.inner.len();
        Ok(())
    })
}

/// Schedules `instance`. `machines == 0` keeps the instance's machine count
/// (one for `CAPSCHED_ALGORITHM_PACK`); `epsilon <= 0` uses the default.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn capsched_schedule_run(
    instance: *const CapschedInstance,
    algorithm: CapschedAlgorithm,
    machines: usize,
    epsilon: f64,
    out_schedule: *mut *mut CapschedSchedule,
) -> CapschedStatus {
    guard(|| {
        let slot = out(out_schedule, "out_schedule")?;
        *slot = ptr::null_mut();
        let base = &deref(instance, "instance")?.inner;
        let alg = match algorithm {
            CapschedAlgorithm::Wsvf => Algorithm::Wsvf,
            CapschedAlgorithm::Wspt => Algorithm::Wspt,
            CapschedAlgorithm::Hybrid => Algorithm::Hybrid,
            CapschedAlgorithm::Pack => Algorithm::Pack,
        };
        let machines = match (machines, alg) {
            (0, Algorithm::Pack) => 1,
            (0, _) => base.machines(),
            (m, _) => m,
        };
        let inst = if machines == base.machines() { Arc::clone(base) } else { Arc::new(base.with_machines(machines)?) };
        let eps = if epsilon > 0.0 { epsilon } else { DEFAULT_EPSILON };
        let schedule = run_algorithm(&inst, alg, machines, eps, false)?;
        *slot = Box::into_raw(Box::new(CapschedSchedule { inner: schedule }));
        Ok(())
    })
}

/// Exact optimum. `max_jobs == 0` and `timeout_seconds <= 0` select the
/// defaults. `out_optimal` (may be null) is false when the time limit cut
/// the search short.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn capsched_oracle_run(
    instance: *const CapschedInstance,
    machines: usize,
    max_jobs: usize,
    timeout_seconds: f64,
    out_schedule: *mut *mut CapschedSchedule,
    out_optimal: *mut bool,
) -> CapschedStatus {
    guard(|| {
        let slot = out(out_schedule, "out_schedule")?;
        *slot = ptr::null_mut();
        let inst = &deref(instance, "instance")?.inner;
        let defaults = OracleLimits::default();
        let limits = OracleLimits {
            max_jobs: if max_jobs == 0 { defaults.max_jobs } else { max_jobs },
            max_time: if timeout_seconds > 0.0 {
                Duration::try_from_secs_f64(timeout_seconds)
                    .map_err(|e| Fail(CapschedStatus::InvalidArgument, e.to_string()))?
            } else {
                defaults.max_time
            },
            ..defaults
        };
        let m = if machines == 0 { inst.machines() } else { machines };
        let outcome = optimal_schedule(inst, m, &limits)?;
        if let Some(o) = out_optimal.as_mut() {
            *o = outcome.optimal;
        }
        *slot = Box::into_raw(Box::new(CapschedSchedule { inner: outcome.schedule }));
        Ok(())
    })
}

/// # Safety
/// `schedule` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn capsched_schedule_free(schedule: *mut CapschedSchedule) {
    if !schedule.is_null() {
        drop(Box::from_raw(schedule));
    }
}

/// Total weighted completion time.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn capsched_schedule_cost(schedule: *const CapschedSchedule, out_cost: *mut f64) -> CapschedStatus {
    guard(|| {
        *out(out_cost, "out_cost")? = evaluate_cost(&deref(schedule, "schedule")?.inner)?;
        Ok(())
    })
}

/// Machine and start time of the job at input position `job`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn capsched_schedule_start(
    schedule: *const CapschedSchedule,
    job: usize,
    out_machine: *mut usize,
    out_start: *mut f64,
) -> CapschedStatus {
    guard(|| {
        let s = &deref(schedule, "schedule")?.inner;
        if job >= s.instance().len() {
            return Err(Fail(CapschedStatus::InvalidArgument, format!("job index {job} out of range")));
        }
        let a = s.assignment(job).ok_or_else(|| Error::MissingAssignment(s.instance().job(job).id.clone()))?;
        *out(out_machine, "out_machine")? = a.machine;
        *out(out_start, "out_start")? = a.start;
        Ok(())
    })
}

/// Sets `out_feasible` to whether every machine stays within capacity.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn capsched_schedule_check_feasibility(
    schedule: *const CapschedSchedule,
    out_feasible: *mut bool,
) -> CapschedStatus {
    guard(|| {
        *out(out_feasible, "out_feasible")? = check_feasibility(&deref(schedule, "schedule")?.inner)?.is_feasible();
        Ok(())
    })
}

/// Schedule JSON with the instance embedded.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn capsched_schedule_to_json(
    schedule: *const CapschedSchedule,
    out_json: *mut *mut c_char,
) -> CapschedStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = ptr::null_mut();
        let s = &deref(schedule, "schedule")?.inner;
        let doc = ScheduleDoc::from_schedule(s, inline_instance(s.instance())?)?;
        *slot = to_c_string(to_json(&doc)?)?;
        Ok(())
    })
}

/// Feasibility, invariant and ratio report as JSON, against the combined
/// lower bound.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn capsched_schedule_verify_json(
    schedule: *const CapschedSchedule,
    out_json: *mut *mut c_char,
) -> CapschedStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = ptr::null_mut();
        let report = verify_schedule(&deref(schedule, "schedule")?.inner, None, None)?;
        *slot = to_c_string(to_json(&report)?)?;
        Ok(())
    })
}

/// Lower bounds and guarantees as JSON. `machines == 0` keeps the
/// instance's machine count.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn capsched_bounds_json(
    instance: *const CapschedInstance,
    machines: usize,
    out_json: *mut *mut c_char,
) -> CapschedStatus {
    guard(|| {
        let slot = out(out_json, "out_json")?;
        *slot = ptr::null_mut();
        let inst = &deref(instance, "instance")?.inner;
        let m = if machines == 0 { inst.machines() } else { machines };
        *slot = to_c_string(to_json(&bound_report(inst, m))?)?;
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn capsched_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
