//! C ABI for the decimaxsum solvers.
//!
//! Problems and solutions are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns a [`DmsStatus`];
//! on failure, [`dms_last_error_message`] describes the error for the calling
//! thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use decimaxsum::dcop::{brute_force_optimum, Dcop};
use decimaxsum::engine::{EngineConfig, Normalization, DEFAULT_EPS, DEFAULT_LIMIT};
use decimaxsum::io::{parse_dcop, serialize_dcop};
use decimaxsum::ising::{generate_ising, IsingParams};
use decimaxsum::{Algorithm, Error, RunOutcome};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DmsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidProblem = 4,
    InvalidArgument = 5,
    SolveError = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Opaque problem handle.
pub struct DmsProblem {
    dcop: Dcop,
}

/// Opaque solution handle.
pub struct DmsSolution {
    outcome: RunOutcome,
}

/// Engine settings for [`dms_solve`]. Start from [`dms_solve_options_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DmsSolveOptions {
    pub eps: f64,
    pub limit: u64,
    pub suppression: bool,
    /// 0 mean, 1 max, 2 none.
    pub normalization: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> DmsStatus {
    match e {
        Error::Parse(_) => DmsStatus::ParseError,
        Error::Invalid(_) => DmsStatus::InvalidProblem,
        Error::Policy(_) | Error::Selector(_) | Error::Parameter(_) | Error::Format(_) => {
            DmsStatus::InvalidArgument
        }
        _ => DmsStatus::SolveError,
    }
}

/// Runs `f`, recording any error or panic for [`dms_last_error_message`].
fn guard(f: impl FnOnce() -> Result<(), (DmsStatus, String)>) -> DmsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DmsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DmsStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (DmsStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (DmsStatus, String) {
    (DmsStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (DmsStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (DmsStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dms_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null if none.
/// Valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dms_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a JSON problem document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dms_problem_from_json(
    json: *const c_char,
    out: *mut *mut DmsProblem,
) -> DmsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(json, "json")?;
        let dcop = parse_dcop(text.as_bytes()).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DmsProblem { dcop }));
        Ok(())
    })
}

/// Generates a toroidal Ising instance.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dms_problem_generate_ising(
    side: usize,
    beta: f64,
    unary_bound: f64,
    seed: u64,
    out: *mut *mut DmsProblem,
) -> DmsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let dcop = generate_ising(&IsingParams {
            side,
            beta,
            unary_bound,
            seed,
        })
        .map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DmsProblem { dcop }));
        Ok(())
    })
}

/// Serializes a problem to JSON. Release the string with [`dms_string_free`].
///
/// # Safety
/// `problem` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dms_problem_to_json(
    problem: *const DmsProblem,
    out: *mut *mut c_char,
) -> DmsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        let mut bytes = serialize_dcop(&p.dcop);
        if bytes.last() == Some(&b'\n') {
            bytes.pop();
        }
        let s = CString::new(bytes).map_err(|e| (DmsStatus::SolveError, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn dms_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `problem` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dms_problem_free(problem: *mut DmsProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Number of variables, 0 for a null handle.
///
/// # Safety
/// `problem` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dms_problem_num_variables(problem: *const DmsProblem) -> usize {
    problem.as_ref().map_or(0, |p| p.dcop.num_variables())
}

#[no_mangle]
pub extern "C" fn dms_solve_options_default() -> DmsSolveOptions {
    DmsSolveOptions {
        eps: DEFAULT_EPS,
        limit: DEFAULT_LIMIT,
        suppression: true,
        normalization: 0,
    }
}

fn engine_config(o: &DmsSolveOptions) -> Result<EngineConfig, (DmsStatus, String)> {
    let normalization = match o.normalization {
        0 => Normalization::Mean,
        1 => Normalization::Max,
        2 => Normalization::None,
        n => {
            return Err((
                DmsStatus::InvalidArgument,
                format!("unknown normalization code {n}"),
            ))
        }
    };
    Ok(EngineConfig {
        eps: o.eps,
        limit: o.limit,
        normalization,
        suppression: o.suppression,
        trace: false,
    })
}

/// Runs the algorithm named by `algo` (same selectors as the CLI, e.g.
/// `"maxsum_ad_vp"` or `"decimaxsum:trigger=freq:rate:2;..."`).
/// `options` may be null for defaults.
///
/// # Safety
/// `problem` must be a live handle, `algo` a NUL-terminated string, `options`
/// null or valid, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dms_solve(
    problem: *const DmsProblem,
    algo: *const c_char,
    seed: u64,
    options: *const DmsSolveOptions,
    out: *mut *mut DmsSolution,
) -> DmsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        let algorithm: Algorithm = str_arg(algo, "algo")?.parse().map_err(lib_err)?;
        let opts = options
            .as_ref()
            .copied()
            .unwrap_or_else(|| dms_solve_options_default());
        let cfg = engine_config(&opts)?;
        let outcome = algorithm.run(&p.dcop, &cfg, seed).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(DmsSolution { outcome }));
        Ok(())
    })
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dms_solution_cost(solution: *const DmsSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.outcome.cost())
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dms_solution_utility(solution: *const DmsSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.outcome.utility)
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dms_solution_msgs_sent(solution: *const DmsSolution) -> u64 {
    solution.as_ref().map_or(0, |s| s.outcome.msgs_sent)
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dms_solution_iterations(solution: *const DmsSolution) -> u64 {
    solution.as_ref().map_or(0, |s| s.outcome.iterations)
}

/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dms_solution_decimations(solution: *const DmsSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.outcome.decimations)
}

unsafe fn write_values(
    values: &[usize],
    buf: *mut usize,
    len: usize,
) -> Result<(), (DmsStatus, String)> {
    if len < values.len() {
        return Err((
            DmsStatus::BufferTooSmall,
            format!("buffer holds {len} values, need {}", values.len()),
        ));
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    Ok(())
}

/// Copies the value index of every variable into `buf`, which must hold at
/// least as many entries as the problem has variables.
///
/// # Safety
/// `solution` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn dms_solution_values(
    solution: *const DmsSolution,
    buf: *mut usize,
    len: usize,
) -> DmsStatus {
    guard(|| {
        let s = solution.as_ref().ok_or_else(|| null("solution"))?;
        let values: Vec<usize> = s
            .outcome
            .assignment
            .values
            .iter()
            .map(|v| v.unwrap_or(0))
            .collect();
        write_values(&values, buf, len)
    })
}

/// # Safety
/// `solution` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dms_solution_free(solution: *mut DmsSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Exhaustive optimum. Fails with `SolveError` above 2^24 assignments.
///
/// # Safety
/// `problem` must be a live handle, `utility` a valid pointer, and `buf`
/// valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn dms_brute_force_optimum(
    problem: *const DmsProblem,
    utility: *mut f64,
    buf: *mut usize,
    len: usize,
) -> DmsStatus {
    guard(|| {
        let p = problem.as_ref().ok_or_else(|| null("problem"))?;
        if utility.is_null() {
            return Err(null("utility"));
        }
        let (a, u) = brute_force_optimum(&p.dcop).map_err(lib_err)?;
        write_values(&a.to_values().unwrap_or_default(), buf, len)?;
        *utility = u;
        Ok(())
    })
}
