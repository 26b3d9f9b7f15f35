//! C interface to `machine_space`.
//!
//! Machines are opaque `MsMachine` handles created by [`ms_parse`] or
//! [`ms_normalize`] and released with [`ms_machine_free`]. Every fallible
//! call returns an [`MsStatus`]; on failure [`ms_last_error`] describes the
//! most recent error on the calling thread. Strings returned by the library
//! are released with [`ms_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use machine_space::cli::{run_quantifier, run_search, CommandError, RunConfig};
use machine_space::dsl::parse_machine;
use machine_space::presentation::Presentation;
use machine_space::quantifier::{Caps, Schedule, SearchResult, DEFAULT_FUEL};
use machine_space::runtime::Outcome;
use machine_space::spaces::{covers, SpaceKind};
use machine_space::syntax::{normalize, FormalMachine};

/// Result codes. The nonzero codes below 5 match the command-line exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsStatus {
    Ok = 0,
    Mismatch = 2,
    Syntax = 3,
    Limit = 4,
    NullArgument = 5,
    InvalidUtf8 = 6,
    InvalidArgument = 7,
    Internal = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsSpace {
    CantorDigits = 0,
    CantorPrefix = 1,
    Interval = 2,
}

impl From<MsSpace> for SpaceKind {
    fn from(s: MsSpace) -> Self {
        match s {
            MsSpace::CantorDigits => SpaceKind::CantorDigits,
            MsSpace::CantorPrefix => SpaceKind::CantorPrefix,
            MsSpace::Interval => SpaceKind::UnitInterval,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsSearchStatus {
    Found = 0,
    NoWitness = 1,
    Undecided = 2,
}

/// Settings for the quantifiers.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MsRunOptions {
    pub fuel: u64,
    pub max_generator_index: u64,
    pub max_family_size: usize,
    /// Selects the basic schedule instead of the exhaustive one.
    pub basic_schedule: bool,
}

/// Result of a quantifier run. `halted` is false when the fuel ran out,
/// which is not a negative answer.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct MsRunResult {
    pub halted: bool,
    pub fuel_used: u64,
    /// The enumeration ran out within the caps, so no later halt is possible.
    pub exhausted: bool,
}

/// A parsed machine.
pub struct MsMachine(FormalMachine);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: MsStatus, msg: &str) -> MsStatus {
    set_error(msg);
    status
}

fn from_command(e: CommandError) -> MsStatus {
    let status = match e {
        CommandError::Syntax(_) => MsStatus::Syntax,
        CommandError::Mismatch(_) => MsStatus::Mismatch,
        CommandError::Limit(_) => MsStatus::Limit,
    };
    fail(status, e.message())
}

fn guard(f: impl FnOnce() -> MsStatus) -> MsStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(MsStatus::Internal, "internal error"))
}

unsafe fn machine<'a>(m: *const MsMachine) -> Result<&'a FormalMachine, MsStatus> {
    m.as_ref()
        .map(|m| &m.0)
        .ok_or_else(|| fail(MsStatus::NullArgument, "null machine handle"))
}

fn new_string(s: &str) -> *mut c_char {
    CString::new(s).expect("machine text has no nul").into_raw()
}

fn config(space: MsSpace, opts: &MsRunOptions) -> Result<RunConfig, MsStatus> {
    if opts.fuel == 0 {
        return Err(fail(MsStatus::InvalidArgument, "fuel must be at least 1"));
    }
    Ok(RunConfig {
        fuel: opts.fuel,
        caps: Caps {
            max_generator_index: opts.max_generator_index,
            max_family_size: opts.max_family_size,
        },
        schedule: if opts.basic_schedule {
            Schedule::Basic
        } else {
            Schedule::Exhaustive
        },
        ..RunConfig::new(space.into())
    })
}

/// The message of the last failed call on this thread, or "" if none.
/// Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ms_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn ms_default_options() -> MsRunOptions {
    let caps = Caps::default();
    MsRunOptions {
        fuel: DEFAULT_FUEL,
        max_generator_index: caps.max_generator_index,
        max_family_size: caps.max_family_size,
        basic_schedule: false,
    }
}

/// Parses a nul-terminated expression into `*out`.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ms_parse(text: *const c_char, out: *mut *mut MsMachine) -> MsStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return fail(MsStatus::NullArgument, "null argument");
        }
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            return fail(MsStatus::InvalidUtf8, "expression is not valid UTF-8");
        };
        match parse_machine(s) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(MsMachine(m)));
                MsStatus::Ok
            }
            Err(e) => from_command(e.into()),
        }
    })
}

/// # Safety
/// `m` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ms_machine_free(m: *mut MsMachine) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Writes the expression syntax of `m` to `*out`; free it with [`ms_string_free`].
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ms_machine_to_string(
    m: *const MsMachine,
    out: *mut *mut c_char,
) -> MsStatus {
    guard(|| {
        let m = match machine(m) {
            Ok(m) => m,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(MsStatus::NullArgument, "null argument");
        }
        *out = new_string(&m.to_string());
        MsStatus::Ok
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ms_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of branches of `m`, or 0 for a null handle.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ms_machine_branch_count(m: *const MsMachine) -> usize {
    m.as_ref().map_or(0, |m| m.0.branches().len())
}

/// Writes the normal form of `m` to `*out` as a new handle.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ms_normalize(m: *const MsMachine, out: *mut *mut MsMachine) -> MsStatus {
    guard(|| {
        let m = match machine(m) {
            Ok(m) => m,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(MsStatus::NullArgument, "null argument");
        }
        *out = Box::into_raw(Box::new(MsMachine(normalize(m))));
        MsStatus::Ok
    })
}

/// Decides whether `m` covers the space.
///
/// # Safety
/// `m` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ms_covers(
    space: MsSpace,
    m: *const MsMachine,
    out: *mut bool,
) -> MsStatus {
    guard(|| {
        let m = match machine(m) {
            Ok(m) => m,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(MsStatus::NullArgument, "null argument");
        }
        match covers(space.into(), m) {
            Ok(b) => {
                *out = b;
                MsStatus::Ok
            }
            Err(e) => from_command(e.into()),
        }
    })
}

unsafe fn quantify(
    forall: bool,
    space: MsSpace,
    m: *const MsMachine,
    opts: *const MsRunOptions,
    out: *mut MsRunResult,
) -> MsStatus {
    guard(|| {
        let m = match machine(m) {
            Ok(m) => m,
            Err(s) => return s,
        };
        if out.is_null() {
            return fail(MsStatus::NullArgument, "null argument");
        }
        let opts = opts
            .as_ref()
            .copied()
            .unwrap_or_else(|| ms_default_options());
        let cfg = match config(space, &opts) {
            Ok(c) => c,
            Err(s) => return s,
        };
        match run_quantifier(forall, &cfg, m) {
            Ok((outcome, exhausted)) => {
                *out = MsRunResult {
                    halted: matches!(outcome, Outcome::Halted { .. }),
                    fuel_used: outcome.fuel_used(),
                    exhausted,
                };
                MsStatus::Ok
            }
            Err(e) => from_command(e),
        }
    })
}

/// Runs the universal quantifier on `m`. `opts` may be null for defaults.
///
/// # Safety
/// `m` must be a live handle, `opts` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ms_forall(
    space: MsSpace,
    m: *const MsMachine,
    opts: *const MsRunOptions,
    out: *mut MsRunResult,
) -> MsStatus {
    quantify(true, space, m, opts, out)
}

/// Runs the existential quantifier on `m`. `opts` may be null for defaults.
///
/// # Safety
/// `m` must be a live handle, `opts` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ms_exists(
    space: MsSpace,
    m: *const MsMachine,
    opts: *const MsRunOptions,
    out: *mut MsRunResult,
) -> MsStatus {
    quantify(false, space, m, opts, out)
}

/// Searches the words of length `depth`, each followed by zeros, for one
/// that `m` accepts. A negative `depth` means the deepest digit `m` reads.
/// On `MS_SEARCH_STATUS_FOUND` the word is written to `*word` as a string of
/// '0' and '1'; otherwise `*word` is set to null.
///
/// # Safety
/// `m` must be a live handle; `status` and `word` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ms_search(
    space: MsSpace,
    m: *const MsMachine,
    depth: i64,
    fuel: u64,
    status: *mut MsSearchStatus,
    word: *mut *mut c_char,
) -> MsStatus {
    guard(|| {
        let m = match machine(m) {
            Ok(m) => m,
            Err(s) => return s,
        };
        if status.is_null() || word.is_null() {
            return fail(MsStatus::NullArgument, "null argument");
        }
        if fuel == 0 {
            return fail(MsStatus::InvalidArgument, "fuel must be at least 1");
        }
        let cfg = RunConfig {
            fuel,
            depth: usize::try_from(depth).ok(),
            ..RunConfig::new(space.into())
        };
        match run_search(&cfg, m) {
            Ok(report) => {
                *word = ptr::null_mut();
                *status = match report.result {
                    SearchResult::Found(w) => {
                        *word = new_string(&w.to_string());
                        MsSearchStatus::Found
                    }
                    SearchResult::NoWitness => MsSearchStatus::NoWitness,
                    SearchResult::Undecided => MsSearchStatus::Undecided,
                };
                MsStatus::Ok
            }
            Err(e) => from_command(e),
        }
    })
}

/// Space of the generators of `m`: 0, 1 or 2 as in [`MsSpace`], or -1 when
/// `m` has no generators or is null.
///
/// # Safety
/// `m` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ms_machine_space(m: *const MsMachine) -> i32 {
    let Some(m) = m.as_ref() else { return -1 };
    SpaceKind::ALL
        .iter()
        .position(|s| m.0.space_tag() == Some(s.tag()))
        .map_or(-1, |i| i as i32)
}
