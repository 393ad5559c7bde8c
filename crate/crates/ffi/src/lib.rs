//! C interface to the gauge toolkit: parse a scenario once, run the
//! map/evolve/circuit/verify commands against it, and collect the JSON
//! report. Every entry point is `extern "C"`, never unwinds across the
//! boundary, and reports failure through a status code plus a thread-local
//! message readable with [`gn_last_error`].
//!
//! Ownership rules:
//! * `gn_scenario_parse` / `gn_scenario_load` hand out an opaque handle that
//!   must be released with [`gn_scenario_free`].
//! * Report strings written through the `report_json` out-parameter must be
//!   released with [`gn_string_free`].
//! * Pointers returned by [`gn_last_error`] and [`gn_version`] are borrowed;
//!   never free them. The error pointer is invalidated by the next failing
//!   call on the same thread.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use gaugenet::commands::{cmd_circuit, cmd_evolve, cmd_map, cmd_verify, RunOptions};
use gaugenet::report::Report;
use gaugenet::scenario::Scenario;

/// Every gated check passed (reports with failed checks return
/// `GN_TOLERANCE` instead).
pub const GN_OK: i32 = 0;
/// The run completed but at least one gated check exceeded its tolerance;
/// the report JSON is still produced.
pub const GN_TOLERANCE: i32 = 1;
/// Configuration rejected: malformed JSON, schema violations, missing
/// scenario members, unusable option values.
pub const GN_CONFIG: i32 = 2;
/// Numeric failure: singular frames, failed frequency assignment,
/// non-finite trajectories.
pub const GN_NUMERIC: i32 = 3;
/// A required pointer argument was null.
pub const GN_NULL_ARGUMENT: i32 = 4;
/// A string argument was not valid UTF-8.
pub const GN_INVALID_UTF8: i32 = 5;
/// An internal panic was caught at the boundary; state is unchanged but the
/// run produced nothing.
pub const GN_PANIC: i32 = 6;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: &str) {
    let sanitized: String = message.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = Some(CString::new(sanitized).unwrap_or_default());
    });
}

fn clear_error() {
    LAST_ERROR.with(|slot| slot.borrow_mut().take());
}

fn status_of(err: &gaugenet::Error) -> i32 {
    match err.exit_code() {
        2 => GN_CONFIG,
        _ => GN_NUMERIC,
    }
}

/// Opaque, immutable parsed scenario. Thread-safe to share for reads; free
/// exactly once with [`gn_scenario_free`].
pub struct GnScenario {
    inner: Scenario,
}

unsafe fn str_arg<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, i32> {
    if ptr.is_null() {
        set_error(&format!("{what} must not be null"));
        return Err(GN_NULL_ARGUMENT);
    }
    match unsafe { CStr::from_ptr(ptr) }.to_str() {
        Ok(s) => Ok(s),
        Err(_) => {
            set_error(&format!("{what} must be valid UTF-8"));
            Err(GN_INVALID_UTF8)
        }
    }
}

fn guarded<F: FnOnce() -> i32>(f: F) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with non-string payload".into());
            set_error(&format!("internal panic: {message}"));
            GN_PANIC
        }
    }
}

/// Returns the library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Returns the message describing this thread's most recent failure, or
/// null when the last call succeeded. The pointer stays valid until the
/// next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn gn_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow().as_ref().map_or(std::ptr::null(), |message| message.as_ptr())
    })
}

unsafe fn parse_into(
    text: &str,
    out_scenario: *mut *mut GnScenario,
) -> i32 {
    if out_scenario.is_null() {
        set_error("out_scenario must not be null");
        return GN_NULL_ARGUMENT;
    }
    match Scenario::from_json(text) {
        Ok(inner) => {
            clear_error();
            unsafe { *out_scenario = Box::into_raw(Box::new(GnScenario { inner })) };
            GN_OK
        }
        Err(err) => {
            set_error(&err.to_string());
            status_of(&err)
        }
    }
}

/// Parses a scenario from a JSON document.
///
/// On success writes a handle to `out_scenario` and returns `GN_OK`; the
/// handle must be released with [`gn_scenario_free`].
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out_scenario` to
/// writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn gn_scenario_parse(
    json: *const c_char,
    out_scenario: *mut *mut GnScenario,
) -> i32 {
    guarded(|| {
        let text = match unsafe { str_arg(json, "json") } {
            Ok(s) => s,
            Err(status) => return status,
        };
        unsafe { parse_into(text, out_scenario) }
    })
}

/// Reads and parses a scenario file (JSON).
///
/// # Safety
/// `path` must point to a NUL-terminated string and `out_scenario` to
/// writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn gn_scenario_load(
    path: *const c_char,
    out_scenario: *mut *mut GnScenario,
) -> i32 {
    guarded(|| {
        let path = match unsafe { str_arg(path, "path") } {
            Ok(s) => s,
            Err(status) => return status,
        };
        match std::fs::read_to_string(Path::new(path)) {
            Ok(text) => unsafe { parse_into(&text, out_scenario) },
            Err(err) => {
                set_error(&format!("cannot read {path}: {err}"));
                GN_CONFIG
            }
        }
    })
}

/// Releases a scenario handle. Passing null is a no-op.
///
/// # Safety
/// `scenario` must be a handle produced by this library that has not been
/// freed already.
#[no_mangle]
pub unsafe extern "C" fn gn_scenario_free(scenario: *mut GnScenario) {
    if !scenario.is_null() {
        drop(unsafe { Box::from_raw(scenario) });
    }
}

/// Releases a string written through a `report_json` out-parameter.
/// Passing null is a no-op.
///
/// # Safety
/// `s` must be a string produced by this library that has not been freed
/// already.
#[no_mangle]
pub unsafe extern "C" fn gn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Seed value meaning "no override": fall back to the scenario's seed, then
/// the built-in default.
pub const GN_SEED_UNSET: u64 = u64::MAX;
/// Step-count value meaning "no override": use the scenario's grid.
pub const GN_STEPS_UNSET: usize = 0;

type Runner = fn(&Scenario, &RunOptions) -> gaugenet::Result<Report>;

unsafe fn run_command(
    scenario: *const GnScenario,
    out_dir: *const c_char,
    seed: u64,
    steps: usize,
    report_json: *mut *mut c_char,
    runner: Runner,
) -> i32 {
    if scenario.is_null() {
        set_error("scenario must not be null");
        return GN_NULL_ARGUMENT;
    }
    let scenario = unsafe { &(*scenario).inner };
    let out_dir_path = if out_dir.is_null() {
        None
    } else {
        match unsafe { str_arg(out_dir, "out_dir") } {
            Ok(s) => Some(PathBuf::from(s)),
            Err(status) => return status,
        }
    };
    let opts = RunOptions {
        out_dir: out_dir_path,
        seed: (seed != GN_SEED_UNSET).then_some(seed),
        steps: (steps != GN_STEPS_UNSET).then_some(steps),
    };
    match runner(scenario, &opts) {
        Ok(report) => {
            if !report_json.is_null() {
                let text = report.to_json();
                let sanitized: String =
                    text.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
                let cstring = CString::new(sanitized).unwrap_or_default();
                unsafe { *report_json = cstring.into_raw() };
            }
            if report.overall_pass {
                clear_error();
                GN_OK
            } else {
                set_error("one or more gated checks exceeded their tolerances");
                GN_TOLERANCE
            }
        }
        Err(err) => {
            set_error(&err.to_string());
            status_of(&err)
        }
    }
}

/// Solves the connector frame for the scenario's source/target pair and
/// writes `omega.csv`, `hprime.csv` and `report.json` to the output
/// directory.
///
/// `out_dir` overrides the scenario's output directory (null keeps it).
/// `seed` overrides the scenario seed unless it is `GN_SEED_UNSET`; `steps`
/// overrides the grid unless it is `GN_STEPS_UNSET`. When `report_json` is
/// non-null and the run completes, a NUL-terminated JSON report is written
/// through it; release it with [`gn_string_free`]. Returns `GN_OK` when all
/// gated checks pass, `GN_TOLERANCE` when the run completed with a failed
/// check (the report is still written), and an error status otherwise.
///
/// # Safety
/// `scenario` must be a live handle from this library; `out_dir`, if
/// non-null, must be NUL-terminated; `report_json`, if non-null, must point
/// to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn gn_run_map(
    scenario: *const GnScenario,
    out_dir: *const c_char,
    seed: u64,
    steps: usize,
    report_json: *mut *mut c_char,
) -> i32 {
    guarded(|| unsafe { run_command(scenario, out_dir, seed, steps, report_json, cmd_map) })
}

/// Integrates the source generator from the scenario's initial state and
/// writes `psi.csv` and `report.json`.
///
/// Arguments, ownership and status codes as for [`gn_run_map`].
///
/// # Safety
/// As for [`gn_run_map`].
#[no_mangle]
pub unsafe extern "C" fn gn_run_evolve(
    scenario: *const GnScenario,
    out_dir: *const c_char,
    seed: u64,
    steps: usize,
    report_json: *mut *mut c_char,
) -> i32 {
    guarded(|| unsafe { run_command(scenario, out_dir, seed, steps, report_json, cmd_evolve) })
}

/// Runs the quantum-to-circuit pipeline and writes `network.json`,
/// `netlist.cir`, `voltages.csv` and `report.json`.
///
/// Arguments, ownership and status codes as for [`gn_run_map`].
///
/// # Safety
/// As for [`gn_run_map`].
#[no_mangle]
pub unsafe extern "C" fn gn_run_circuit(
    scenario: *const GnScenario,
    out_dir: *const c_char,
    seed: u64,
    steps: usize,
    report_json: *mut *mut c_char,
) -> i32 {
    guarded(|| unsafe { run_command(scenario, out_dir, seed, steps, report_json, cmd_circuit) })
}

/// Runs the full invariant suite and writes `omega.csv` and `report.json`.
///
/// Arguments, ownership and status codes as for [`gn_run_map`].
///
/// # Safety
/// As for [`gn_run_map`].
#[no_mangle]
pub unsafe extern "C" fn gn_run_verify(
    scenario: *const GnScenario,
    out_dir: *const c_char,
    seed: u64,
    steps: usize,
    report_json: *mut *mut c_char,
) -> i32 {
    guarded(|| unsafe { run_command(scenario, out_dir, seed, steps, report_json, cmd_verify) })
}
