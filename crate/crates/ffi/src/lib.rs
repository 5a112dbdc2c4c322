//! C ABI for the incremental UTVPI solver.
//!
//! A `UtvpiSolver` is an opaque handle created with `utvpi_solver_new` and
//! released with `utvpi_solver_free`. Every fallible call returns a
//! `UtvpiResult`; on failure `utvpi_solver_last_error` describes what went
//! wrong. Constraints are passed either as text (`"+x -y <= 3"`) or as
//! coefficient/variable pairs. Variables are named and interned per handle.
//!
//! Handles are not thread-safe; callers must serialize access to each one.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use utvpi::model::Sign;
use utvpi::scst::SolverError;
use utvpi::{parse_constraint, AddOutcome, SignedVertex, SolverState, UtvpiConstraint, Var, VarTable, WatchStatus};

/// Status code of every fallible call.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum UtvpiResult {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    BoundOutOfRange = 4,
    UnknownVariable = 5,
    InvalidCoefficient = 6,
    BufferTooSmall = 7,
}

/// Outcome of asserting a constraint. Rejected constraints leave the solver
/// unchanged.
#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum UtvpiVerdict {
    Sat = 0,
    UnsatRational = 10,
    UnsatInteger = 11,
}

pub struct UtvpiSolver {
    vars: VarTable,
    state: SolverState<u64>,
    fired: Vec<u64>,
    last_error: CString,
}

impl UtvpiSolver {
    fn new() -> Self {
        UtvpiSolver {
            vars: VarTable::new(),
            state: SolverState::new(0),
            fired: Vec::new(),
            last_error: CString::default(),
        }
    }

    fn fail(&mut self, code: UtvpiResult, msg: impl ToString) -> UtvpiResult {
        let msg = msg.to_string().replace('\0', " ");
        self.last_error = CString::new(msg).unwrap_or_default();
        code
    }

    fn parse(&mut self, text: *const c_char) -> Result<UtvpiConstraint, UtvpiResult> {
        let text = match read_str(text) {
            Ok(s) => s,
            Err(code) => return Err(self.fail(code, "constraint text is null or not UTF-8")),
        };
        match parse_constraint(text, &mut self.vars) {
            Ok(Some(c)) => {
                self.state.ensure_vars(self.vars.len());
                Ok(c)
            }
            Ok(None) => Err(self.fail(UtvpiResult::Parse, "empty constraint")),
            Err(e) => Err(self.fail(UtvpiResult::Parse, e)),
        }
    }

    fn add(&mut self, c: &UtvpiConstraint) -> Result<UtvpiVerdict, UtvpiResult> {
        match self.state.add_constraint(c) {
            Ok(AddOutcome::Sat(tags)) => {
                self.fired.extend(tags);
                Ok(UtvpiVerdict::Sat)
            }
            Ok(AddOutcome::UnsatQ(_)) => Ok(UtvpiVerdict::UnsatRational),
            Ok(AddOutcome::UnsatZ(_)) => Ok(UtvpiVerdict::UnsatInteger),
            Err(e @ SolverError::BoundOutOfRange(_)) => Err(self.fail(UtvpiResult::BoundOutOfRange, e)),
        }
    }

    fn literal(&mut self, coef: i32, var: u32) -> Result<Option<SignedVertex>, UtvpiResult> {
        let sign = match coef {
            0 => return Ok(None),
            1 => Sign::Plus,
            -1 => Sign::Minus,
            _ => return Err(self.fail(UtvpiResult::InvalidCoefficient, format!("coefficient {coef} not in {{-1, 0, 1}}"))),
        };
        if var as usize >= self.vars.len() {
            return Err(self.fail(UtvpiResult::UnknownVariable, format!("no variable with index {var}")));
        }
        Ok(Some(SignedVertex::new(Var(var), sign)))
    }
}

fn read_str<'a>(s: *const c_char) -> Result<&'a str, UtvpiResult> {
    if s.is_null() {
        return Err(UtvpiResult::NullPointer);
    }
    unsafe { CStr::from_ptr(s) }.to_str().map_err(|_| UtvpiResult::InvalidUtf8)
}

macro_rules! solver {
    ($p:expr) => {
        match unsafe { $p.as_mut() } {
            Some(s) => s,
            None => return UtvpiResult::NullPointer,
        }
    };
}

macro_rules! try_ffi {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(code) => return code,
        }
    };
}

fn write<T>(out: *mut T, value: T) {
    if !out.is_null() {
        unsafe { out.write(value) };
    }
}

/// Creates an empty solver. Release it with `utvpi_solver_free`.
#[no_mangle]
pub extern "C" fn utvpi_solver_new() -> *mut UtvpiSolver {
    Box::into_raw(Box::new(UtvpiSolver::new()))
}

/// Releases a solver. Passing null is a no-op.
///
/// # Safety
/// `solver` must come from `utvpi_solver_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn utvpi_solver_free(solver: *mut UtvpiSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Message for the most recent failed call on this handle, or an empty
/// string. Valid until the next call on the same handle.
///
/// # Safety
/// `solver` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn utvpi_solver_last_error(solver: *const UtvpiSolver) -> *const c_char {
    match solver.as_ref() {
        Some(s) => s.last_error.as_ptr(),
        None => ptr::null(),
    }
}

/// Interns `name` and writes its index to `out_var`.
///
/// # Safety
/// `solver` must be a live handle, `name` a NUL-terminated string, and
/// `out_var` null or writable.
#[no_mangle]
pub unsafe extern "C" fn utvpi_solver_var(solver: *mut UtvpiSolver, name: *const c_char, out_var: *mut u32) -> UtvpiResult {
    let s = solver!(solver);
    let name = match read_str(name) {
        Ok(n) if !n.is_empty() => n,
        Ok(_) => return s.fail(UtvpiResult::Parse, "empty variable name"),
        Err(code) => return s.fail(code, "variable name is null or not UTF-8"),
    };
    let v = s.vars.intern(name);
    s.state.ensure_vars(s.vars.len());
    write(out_var, v.0);
    UtvpiResult::Ok
}

/// Number of variables known to the solver.
///
/// # Safety
/// `solver` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn utvpi_solver_num_vars(solver: *const UtvpiSolver) -> u32 {
    solver.as_ref().map_or(0, |s| s.vars.len() as u32)
}

/// Asserts a constraint given as text, such as `"+x -y <= 3"`. Unknown
/// variable names are interned.
///
/// # Safety
/// `solver` must be a live handle, `text` a NUL-terminated string, and
/// `out_verdict` null or writable.
#[no_mangle]
pub unsafe extern "C" fn utvpi_solver_add(
    solver: *mut UtvpiSolver,
    text: *const c_char,
    out_verdict: *mut UtvpiVerdict,
) -> UtvpiResult {
    let s = solver!(solver);
    let c = try_ffi!(s.parse(text));
    write(out_verdict, try_ffi!(s.add(&c)));
    UtvpiResult::Ok
}

/// Asserts `a*x + b*y <= d` with `a, b` in `{-1, 0, 1}`. Variable indices
/// come from `utvpi_solver_var`; an index is ignored when its coefficient
/// is zero.
///
/// # Safety
/// `solver` must be a live handle and `out_verdict` null or writable.
#[no_mangle]
pub unsafe extern "C" fn utvpi_solver_add_terms(
    solver: *mut UtvpiSolver,
    a: i32,
    x: u32,
    b: i32,
    y: u32,
    d: i64,
    out_verdict: *mut UtvpiVerdict,
) -> UtvpiResult {
    let s = solver!(solver);
    let first = try_ffi!(s.literal(a, x));
    let second = try_ffi!(s.literal(b, y));
    let c = UtvpiConstraint::new(first, second, d);
    write(out_verdict, try_ffi!(s.add(&c)));
    UtvpiResult::Ok
}

/// Writes whether the asserted constraints imply the given one.
///
/// # Safety
/// `solver` must be a live handle, `text` a NUL-terminated string, and
/// `out_implied` null or writable.
#[no_mangle]
pub unsafe extern "C" fn utvpi_solver_implied(
    solver: *mut UtvpiSolver,
    text: *const c_char,
    out_implied: *mut bool,
) -> UtvpiResult {
    let s = solver!(solver);
    let c = try_ffi!(s.parse(text));
    write(out_implied, s.state.check_implied(&c));
    UtvpiResult::Ok
}

/// Watches a constraint. If it is already implied, `out_already` is set and
/// nothing is stored. Otherwise `tag` is reported by
/// `utvpi_solver_take_fired` once an assertion makes the constraint implied.
///
/// # Safety
/// `solver` must be a live handle, `text` a NUL-terminated string, and
/// `out_already` null or writable.
#[no_mangle]
pub unsafe extern "C" fn utvpi_solver_watch(
    solver: *mut UtvpiSolver,
    text: *const c_char,
    tag: u64,
    out_already: *mut bool,
) -> UtvpiResult {
    let s = solver!(solver);
    let c = try_ffi!(s.parse(text));
    let status = s.state.register_watch(&c, tag);
    write(out_already, status == WatchStatus::AlreadyImplied);
    UtvpiResult::Ok
}

/// Moves the tags of watches that fired since the last call into `buf`, in
/// firing order. `out_len` receives the number of pending tags. If `cap` is
/// too small, nothing is copied and `BufferTooSmall` is returned.
///
/// # Safety
/// `solver` must be a live handle, `buf` null or valid for `cap` writes,
/// and `out_len` null or writable.
#[no_mangle]
pub unsafe extern "C" fn utvpi_solver_take_fired(
    solver: *mut UtvpiSolver,
    buf: *mut u64,
    cap: usize,
    out_len: *mut usize,
) -> UtvpiResult {
    let s = solver!(solver);
    let n = s.fired.len();
    write(out_len, n);
    if n == 0 {
        return UtvpiResult::Ok;
    }
    if buf.is_null() || cap < n {
        return s.fail(UtvpiResult::BufferTooSmall, format!("{n} tags pending, buffer holds {cap}"));
    }
    ptr::copy_nonoverlapping(s.fired.as_ptr(), buf, n);
    s.fired.clear();
    UtvpiResult::Ok
}

/// Tightest implied bounds `lo <= x <= hi`. The `has_*` flags are false
/// where the variable is unbounded in that direction.
///
/// # Safety
/// `solver` must be a live handle; the out pointers null or writable.
#[no_mangle]
pub unsafe extern "C" fn utvpi_solver_bounds(
    solver: *mut UtvpiSolver,
    var: u32,
    has_lower: *mut bool,
    lower: *mut i64,
    has_upper: *mut bool,
    upper: *mut i64,
) -> UtvpiResult {
    let s = solver!(solver);
    if var as usize >= s.vars.len() {
        return s.fail(UtvpiResult::UnknownVariable, format!("no variable with index {var}"));
    }
    let lo = s.state.lower_bound(Var(var));
    let hi = s.state.upper_bound(Var(var));
    write(has_lower, lo.is_some());
    write(lower, lo.unwrap_or(0));
    write(has_upper, hi.is_some());
    write(upper, hi.unwrap_or(0));
    UtvpiResult::Ok
}

/// Writes an integer solution of the asserted constraints, one value per
/// variable index. Fails with `BufferTooSmall` when `cap` is below
/// `utvpi_solver_num_vars`.
///
/// # Safety
/// `solver` must be a live handle and `buf` valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn utvpi_solver_model(solver: *mut UtvpiSolver, buf: *mut i64, cap: usize) -> UtvpiResult {
    let s = solver!(solver);
    let n = s.vars.len();
    if n == 0 {
        return UtvpiResult::Ok;
    }
    if buf.is_null() || cap < n {
        return s.fail(UtvpiResult::BufferTooSmall, format!("{n} variables, buffer holds {cap}"));
    }
    let m = s.state.model();
    ptr::copy_nonoverlapping(m.as_ptr(), buf, n);
    UtvpiResult::Ok
}
