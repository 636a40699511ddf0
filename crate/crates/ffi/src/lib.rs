//! C ABI for the `hadof` crate.
//!
//! Problems and results cross the boundary as opaque handles that the
//! caller owns and must release with the matching `*_free` function. Every
//! fallible call returns a [`HadofStatus`]; on failure a description is
//! available from [`hadof_last_error_message`] on the same thread. Panics
//! never unwind into C: they are caught and reported as
//! `HADOF_STATUS_PANIC`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hadof::{
    brute_force, generate_random_qubo, parse_qubo, run_hadof, serialize_qubo, Assignment,
    HadofConfig, QuboMatrix, SubSolver, UpdateMode,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HadofStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    CapExceeded = 4,
    IoError = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HadofSolver {
    Qaoa = 0,
    Sa = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HadofUpdateMode {
    InSweep = 0,
    Snapshot = 1,
}

/// Plain-data mirror of the engine configuration.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HadofRunConfig {
    pub k: usize,
    pub p: usize,
    /// 0 selects exact marginals (QAOA only).
    pub marginal_shots: usize,
    pub final_shots: usize,
    pub solver: HadofSolver,
    pub update_mode: HadofUpdateMode,
    pub seed: u64,
    pub sa_sweeps_per_stage: usize,
    pub sa_beta_hot: f64,
    pub sa_beta_cold: f64,
}

impl From<&HadofConfig> for HadofRunConfig {
    fn from(c: &HadofConfig) -> Self {
        Self {
            k: c.k,
            p: c.p,
            marginal_shots: c.marginal_shots,
            final_shots: c.final_shots,
            solver: match c.solver {
                SubSolver::Qaoa => HadofSolver::Qaoa,
                SubSolver::Sa => HadofSolver::Sa,
            },
            update_mode: match c.update_mode {
                UpdateMode::InSweep => HadofUpdateMode::InSweep,
                UpdateMode::Snapshot => HadofUpdateMode::Snapshot,
            },
            seed: c.seed,
            sa_sweeps_per_stage: c.sa_sweeps_per_stage,
            sa_beta_hot: c.sa_beta_hot,
            sa_beta_cold: c.sa_beta_cold,
        }
    }
}

impl From<&HadofRunConfig> for HadofConfig {
    fn from(c: &HadofRunConfig) -> Self {
        Self {
            k: c.k,
            p: c.p,
            marginal_shots: c.marginal_shots,
            final_shots: c.final_shots,
            solver: match c.solver {
                HadofSolver::Qaoa => SubSolver::Qaoa,
                HadofSolver::Sa => SubSolver::Sa,
            },
            update_mode: match c.update_mode {
                HadofUpdateMode::InSweep => UpdateMode::InSweep,
                HadofUpdateMode::Snapshot => UpdateMode::Snapshot,
            },
            seed: c.seed,
            sa_sweeps_per_stage: c.sa_sweeps_per_stage,
            sa_beta_hot: c.sa_beta_hot,
            sa_beta_cold: c.sa_beta_cold,
        }
    }
}

/// Opaque QUBO problem.
pub struct HadofQubo(QuboMatrix);

/// Opaque result of one decomposition run.
pub struct HadofRun(hadof::HadofResult);

// ----------------------------------------------------------------------------
// Error plumbing

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: impl Into<Vec<u8>>) {
    let mut bytes: Vec<u8> = msg.into();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &hadof::Error) -> HadofStatus {
    use hadof::Error as E;
    match e {
        E::Parse { .. } => HadofStatus::ParseError,
        E::CapExceeded { .. } => HadofStatus::CapExceeded,
        E::Io(_) => HadofStatus::IoError,
        _ => HadofStatus::InvalidArgument,
    }
}

fn guard<F>(f: F) -> HadofStatus
where
    F: FnOnce() -> Result<(), HadofStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            HadofStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("panic inside hadof");
            HadofStatus::Panic
        }
    }
}

fn fail(e: hadof::Error) -> HadofStatus {
    set_last_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> HadofStatus {
    set_last_error(format!("{what} is NULL"));
    HadofStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, HadofStatus> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), HadofStatus> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn copy_bits(a: &Assignment, buf: *mut u8, len: usize) -> Result<(), HadofStatus> {
    if buf.is_null() {
        return Err(null("buffer"));
    }
    if len < a.len() {
        set_last_error(format!("buffer holds {len} bytes, need {}", a.len()));
        return Err(HadofStatus::BufferTooSmall);
    }
    ptr::copy_nonoverlapping(a.bits().as_ptr(), buf, a.len());
    Ok(())
}

unsafe fn read_bits(bits: *const u8, len: usize) -> Result<Assignment, HadofStatus> {
    if bits.is_null() {
        return Err(null("bits"));
    }
    let v = std::slice::from_raw_parts(bits, len).to_vec();
    Assignment::from_bits(v).map_err(fail)
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

// ----------------------------------------------------------------------------
// Misc

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next hadof call on the same thread.
#[no_mangle]
pub extern "C" fn hadof_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn hadof_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ----------------------------------------------------------------------------
// QUBO handles

#[no_mangle]
pub unsafe extern "C" fn hadof_qubo_new(n: usize, out: *mut *mut HadofQubo) -> HadofStatus {
    guard(|| {
        let q = QuboMatrix::new(n).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(HadofQubo(q))), "out")
    })
}

/// Random instance with entries uniform on `[lo, hi)`; identical to the
/// `hadof gen` output for the same seed.
#[no_mangle]
pub unsafe extern "C" fn hadof_qubo_random(
    n: usize,
    seed: u64,
    lo: f64,
    hi: f64,
    out: *mut *mut HadofQubo,
) -> HadofStatus {
    guard(|| {
        let q = generate_random_qubo(n, seed, lo, hi).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(HadofQubo(q))), "out")
    })
}

/// Parses the `qubo <n>` text format from a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn hadof_qubo_parse(
    text: *const c_char,
    out: *mut *mut HadofQubo,
) -> HadofStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text).to_str().map_err(|e| {
            set_last_error(format!("text is not UTF-8: {e}"));
            HadofStatus::ParseError
        })?;
        let q = parse_qubo(text).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(HadofQubo(q))), "out")
    })
}

/// Writes the text format into a new string; release it with
/// [`hadof_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hadof_qubo_serialize(
    q: *const HadofQubo,
    out: *mut *mut c_char,
) -> HadofStatus {
    guard(|| {
        let q = deref(q, "qubo")?;
        write_out(out, into_c_string(serialize_qubo(&q.0)), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn hadof_qubo_free(q: *mut HadofQubo) {
    if !q.is_null() {
        drop(Box::from_raw(q));
    }
}

/// Variable count, or 0 for a NULL handle.
#[no_mangle]
pub unsafe extern "C" fn hadof_qubo_n(q: *const HadofQubo) -> usize {
    q.as_ref().map_or(0, |q| q.0.n())
}

#[no_mangle]
pub unsafe extern "C" fn hadof_qubo_set(
    q: *mut HadofQubo,
    i: usize,
    j: usize,
    value: f64,
) -> HadofStatus {
    guard(|| {
        let q = q.as_mut().ok_or_else(|| null("qubo"))?;
        q.0.set(i, j, value).map_err(fail)
    })
}

/// `Q_ij` for `i <= j`, 0 below the diagonal.
#[no_mangle]
pub unsafe extern "C" fn hadof_qubo_get(
    q: *const HadofQubo,
    i: usize,
    j: usize,
    out: *mut f64,
) -> HadofStatus {
    guard(|| {
        let q = deref(q, "qubo")?;
        let n = q.0.n();
        if i >= n || j >= n {
            return Err(fail(hadof::Error::IndexOutOfRange { index: i.max(j), n }));
        }
        write_out(out, q.0.get(i, j), "out")
    })
}

/// Objective of a 0/1 byte array of length `len`.
#[no_mangle]
pub unsafe extern "C" fn hadof_qubo_evaluate(
    q: *const HadofQubo,
    bits: *const u8,
    len: usize,
    out: *mut f64,
) -> HadofStatus {
    guard(|| {
        let q = deref(q, "qubo")?;
        let x = read_bits(bits, len)?;
        let v = q.0.evaluate(&x).map_err(fail)?;
        write_out(out, v, "out")
    })
}

/// Exhaustive minimum (n <= 24). The minimiser is written to `bits`.
#[no_mangle]
pub unsafe extern "C" fn hadof_brute_force(
    q: *const HadofQubo,
    bits: *mut u8,
    len: usize,
    objective: *mut f64,
) -> HadofStatus {
    guard(|| {
        let q = deref(q, "qubo")?;
        let (a, v) = brute_force(&q.0).map_err(fail)?;
        copy_bits(&a, bits, len)?;
        write_out(objective, v, "objective")
    })
}

// ----------------------------------------------------------------------------
// Runs

/// Default configuration: k = 5, p = 10, 500 marginal shots, 5000 final
/// shots, QAOA sub-solver, in-sweep updates, seed 0.
#[no_mangle]
pub extern "C" fn hadof_config_default() -> HadofRunConfig {
    (&HadofConfig::default()).into()
}

#[no_mangle]
pub unsafe extern "C" fn hadof_run(
    q: *const HadofQubo,
    config: *const HadofRunConfig,
    out: *mut *mut HadofRun,
) -> HadofStatus {
    guard(|| {
        let q = deref(q, "qubo")?;
        let cfg: HadofConfig = deref(config, "config")?.into();
        let r = run_hadof(&q.0, &cfg).map_err(fail)?;
        write_out(out, Box::into_raw(Box::new(HadofRun(r))), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn hadof_run_free(r: *mut HadofRun) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of global samples, or 0 for a NULL handle.
#[no_mangle]
pub unsafe extern "C" fn hadof_run_num_samples(r: *const HadofRun) -> usize {
    r.as_ref().map_or(0, |r| r.0.global_samples.len())
}

/// Variable count of the solved problem, or 0 for a NULL handle.
#[no_mangle]
pub unsafe extern "C" fn hadof_run_n(r: *const HadofRun) -> usize {
    r.as_ref().map_or(0, |r| r.0.plan.n())
}

#[no_mangle]
pub unsafe extern "C" fn hadof_run_best(
    r: *const HadofRun,
    bits: *mut u8,
    len: usize,
    objective: *mut f64,
) -> HadofStatus {
    guard(|| {
        let r = deref(r, "run")?;
        copy_bits(&r.0.best.assignment, bits, len)?;
        write_out(objective, r.0.best.objective, "objective")
    })
}

#[no_mangle]
pub unsafe extern "C" fn hadof_run_most_probable(
    r: *const HadofRun,
    bits: *mut u8,
    len: usize,
    objective: *mut f64,
) -> HadofStatus {
    guard(|| {
        let r = deref(r, "run")?;
        copy_bits(&r.0.most_probable.assignment, bits, len)?;
        write_out(objective, r.0.most_probable.objective, "objective")
    })
}

#[no_mangle]
pub unsafe extern "C" fn hadof_run_average_objective(
    r: *const HadofRun,
    out: *mut f64,
) -> HadofStatus {
    guard(|| {
        let r = deref(r, "run")?;
        write_out(out, r.0.average_objective, "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn hadof_run_wall_time(r: *const HadofRun, out: *mut f64) -> HadofStatus {
    guard(|| {
        let r = deref(r, "run")?;
        write_out(out, r.0.wall_time_s, "out")
    })
}

/// Global sample `index` in sampling order.
#[no_mangle]
pub unsafe extern "C" fn hadof_run_sample(
    r: *const HadofRun,
    index: usize,
    bits: *mut u8,
    len: usize,
    objective: *mut f64,
) -> HadofStatus {
    guard(|| {
        let r = deref(r, "run")?;
        let s = r.0.global_samples.get(index).ok_or_else(|| {
            fail(hadof::Error::IndexOutOfRange {
                index,
                n: r.0.global_samples.len(),
            })
        })?;
        copy_bits(&s.assignment, bits, len)?;
        write_out(objective, s.objective, "objective")
    })
}

/// Marginals after the last sweep, `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn hadof_run_marginals(
    r: *const HadofRun,
    out: *mut f64,
    len: usize,
) -> HadofStatus {
    guard(|| {
        let r = deref(r, "run")?;
        let last = r.0.marginal_trajectory.last().expect("p >= 1");
        if out.is_null() {
            return Err(null("out"));
        }
        if len < last.len() {
            set_last_error(format!("buffer holds {len} values, need {}", last.len()));
            return Err(HadofStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(last.as_slice().as_ptr(), out, last.len());
        Ok(())
    })
}

/// Summary JSON (statistics, configuration, trajectory); release with
/// [`hadof_string_free`].
#[no_mangle]
pub unsafe extern "C" fn hadof_run_to_json(
    r: *const HadofRun,
    out: *mut *mut c_char,
) -> HadofStatus {
    guard(|| {
        let r = deref(r, "run")?;
        let summary = hadof::bench::RunSummary {
            solver: match r.0.config.solver {
                SubSolver::Qaoa => hadof::bench::SolverSpec::HadofQaoa,
                SubSolver::Sa => hadof::bench::SolverSpec::HadofSa,
            },
            best: r.0.best.clone(),
            most_probable: r.0.most_probable.clone(),
            average: r.0.average_objective,
            wall_time_s: r.0.wall_time_s,
            hadof: Some(r.0.clone()),
        };
        let report = hadof::report::SolveReport::new(r.0.plan.n(), &summary, None, None);
        write_out(out, into_c_string(report.to_json()), "out")
    })
}
