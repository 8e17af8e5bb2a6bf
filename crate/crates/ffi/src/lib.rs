//! C ABI for lbm-core.
//!
//! Every fallible call returns an [`LbmStatus`]; on failure a message is
//! available from [`lbm_last_error`] on the same thread. Handles are opaque
//! and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lbm_core::formula::{parse_kb, VarTable};
use lbm_core::infer::{rank_exact, search, Evidence, SamplerConfig};
use lbm_core::normalize::{kb_clauses, MergeOptions};
use lbm_core::rbm::{compile_weighted, ModelFile, RbmModel};
use lbm_core::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LbmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    DimensionMismatch = 5,
    /// An enumeration or clause-count guard refused the request.
    Guard = 6,
    /// The knowledge base has no satisfying assignment.
    Unsatisfiable = 7,
    Io = 8,
    OutOfRange = 9,
    Panic = 10,
}

/// A compiled model together with its variable names.
pub struct LbmModel {
    model: RbmModel,
    file: ModelFile,
    vars: VarTable,
}

struct Row {
    bits: Vec<u8>,
    free_energy: f64,
    probability: f64,
}

/// Assignments returned by [`lbm_solve`] or [`lbm_rank`].
pub struct LbmSolutions {
    n_visible: usize,
    samples_drawn: u64,
    rows: Vec<Row>,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct LbmSolveOptions {
    pub seed: u64,
    pub max_samples: u64,
    pub burn_in: u64,
    pub chains: usize,
    pub temperature: f64,
    pub confidence: f64,
    /// Stop once this many distinct assignments are accepted; 0 for no target.
    pub target: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LbmStatus {
    match e.root() {
        Error::Syntax(_) | Error::EmptyInput | Error::UnbalancedParens(_) | Error::NoRules => LbmStatus::Parse,
        Error::UnknownVariable(_) | Error::InvalidArgument(_) | Error::EpsilonOutOfRange(_) => {
            LbmStatus::InvalidArgument
        }
        Error::VariableOutOfRange { .. } => LbmStatus::OutOfRange,
        Error::DimensionMismatch { .. } => LbmStatus::DimensionMismatch,
        Error::EnumerationGuard { .. } | Error::ClauseBlowUp { .. } => LbmStatus::Guard,
        Error::EmptyClauseSet => LbmStatus::Unsatisfiable,
        Error::Io(_) | Error::Json(_) | Error::Csv(_) => LbmStatus::Io,
        Error::AtLine { .. } => LbmStatus::Parse,
    }
}

enum Fail {
    Status(LbmStatus, String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn fail(status: LbmStatus, msg: &str) -> Fail {
    Fail::Status(status, msg.to_string())
}

/// Runs `f`, converting errors and panics into a status code.
fn guarded<F: FnOnce() -> Result<(), Fail>>(f: F) -> LbmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LbmStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            LbmStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(fail(LbmStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(LbmStatus::InvalidUtf8, "string is not UTF-8"))
}

unsafe fn model_ref<'a>(m: *const LbmModel) -> Result<&'a LbmModel, Fail> {
    m.as_ref().ok_or_else(|| fail(LbmStatus::NullPointer, "null model"))
}

unsafe fn bits<'a>(x: *const u8, len: usize) -> Result<&'a [u8], Fail> {
    if x.is_null() {
        return Err(fail(LbmStatus::NullPointer, "null assignment"));
    }
    Ok(std::slice::from_raw_parts(x, len))
}

unsafe fn out_ptr<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut()
        .ok_or_else(|| fail(LbmStatus::NullPointer, "null output pointer"))
}

/// `clamp[i]` is 0 or 1 to fix variable `i`, any negative value to leave it
/// free. A null `clamp` means no evidence.
unsafe fn evidence(n: usize, clamp: *const i8, len: usize) -> Result<Evidence, Fail> {
    if clamp.is_null() {
        return Ok(Evidence::none(n));
    }
    let values = std::slice::from_raw_parts(clamp, len);
    if len != n {
        return Err(Error::DimensionMismatch { expected: n, got: len }.into());
    }
    let mut fixed = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match v {
            0 | 1 => fixed.push((i, v == 1)),
            v if v < 0 => {}
            v => return Err(fail(LbmStatus::InvalidArgument, &format!("clamp value {v} at {i}"))),
        }
    }
    Ok(Evidence::new(n, fixed)?)
}

fn boxed(file: ModelFile) -> Result<*mut LbmModel, Fail> {
    let model = file.model()?;
    let vars = file.vars()?;
    Ok(Box::into_raw(Box::new(LbmModel { model, file, vars })))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lbm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Compiles knowledge-base text (`[weight :] formula` per line) with
/// unit default weight.
///
/// # Safety
/// `kb` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_compile(kb: *const c_char, epsilon: f64, out: *mut *mut LbmModel) -> LbmStatus {
    guarded(|| {
        let out = out_ptr(out)?;
        let kb = parse_kb(text(kb)?)?;
        let ws = kb_clauses(&kb, 1.0, MergeOptions::default())?;
        let compiled = compile_weighted(&ws, epsilon)?;
        *out = boxed(ModelFile::from_compiled(&compiled, &kb.vars))?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_load(path: *const c_char, out: *mut *mut LbmModel) -> LbmStatus {
    guarded(|| {
        let out = out_ptr(out)?;
        *out = boxed(ModelFile::load(text(path)?)?)?;
        Ok(())
    })
}

/// # Safety
/// `model` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_save(model: *const LbmModel, path: *const c_char) -> LbmStatus {
    guarded(|| {
        let m = model_ref(model)?;
        m.file.save(text(path)?)?;
        Ok(())
    })
}

/// # Safety
/// `model` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_free(model: *mut LbmModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_n_visible(model: *const LbmModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.n_visible)
}

/// # Safety
/// `model` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_n_hidden(model: *const LbmModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.n_hidden)
}

/// Index of the variable called `name`.
///
/// # Safety
/// `model` must come from this library, `name` must be NUL-terminated and
/// `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_var_index(
    model: *const LbmModel,
    name: *const c_char,
    out: *mut usize,
) -> LbmStatus {
    guarded(|| {
        let m = model_ref(model)?;
        let out = out_ptr(out)?;
        *out = m.vars.lookup(text(name)?)?;
        Ok(())
    })
}

/// Minimum of the energy over hidden states for the assignment `x`.
///
/// # Safety
/// `x` must point to `len` readable bytes; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_min_energy(
    model: *const LbmModel,
    x: *const u8,
    len: usize,
    out: *mut f64,
) -> LbmStatus {
    guarded(|| {
        let m = model_ref(model)?;
        let out = out_ptr(out)?;
        *out = m.model.min_energy(bits(x, len)?)?.0;
        Ok(())
    })
}

/// Free energy of `x` at confidence `c`.
///
/// # Safety
/// `x` must point to `len` readable bytes; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lbm_model_free_energy(
    model: *const LbmModel,
    x: *const u8,
    len: usize,
    c: f64,
    out: *mut f64,
) -> LbmStatus {
    guarded(|| {
        let m = model_ref(model)?;
        let out = out_ptr(out)?;
        *out = m.model.free_energy(bits(x, len)?, c)?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn lbm_solve_options_default() -> LbmSolveOptions {
    let d = SamplerConfig::default();
    LbmSolveOptions {
        seed: d.seed,
        max_samples: d.max_samples,
        burn_in: d.burn_in,
        chains: d.chains,
        temperature: d.temperature,
        confidence: d.confidence,
        target: 0,
    }
}

/// Gibbs search for assignments whose free energy passes the acceptance
/// threshold. Results are in assignment order.
///
/// # Safety
/// `clamp` is null or points to `clamp_len` bytes; `opts` is null (defaults)
/// or valid; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lbm_solve(
    model: *const LbmModel,
    clamp: *const i8,
    clamp_len: usize,
    opts: *const LbmSolveOptions,
    out: *mut *mut LbmSolutions,
) -> LbmStatus {
    guarded(|| {
        let m = model_ref(model)?;
        let out = out_ptr(out)?;
        let o = opts.as_ref().copied().unwrap_or_else(|| lbm_solve_options_default());
        let ev = evidence(m.model.n_visible, clamp, clamp_len)?;
        let cfg = SamplerConfig {
            seed: o.seed,
            max_samples: o.max_samples,
            burn_in: o.burn_in,
            chains: o.chains,
            temperature: o.temperature,
            confidence: o.confidence,
            epsilon: m.model.epsilon,
            target: (o.target > 0).then_some(o.target),
            ..SamplerConfig::default()
        };
        let log = search(&m.model, &ev, &cfg)?;
        let mut rows = Vec::with_capacity(log.accepted.len());
        for a in log.accepted.keys() {
            rows.push(Row {
                free_energy: m.model.free_energy(a.bits(), cfg.confidence)?,
                bits: a.bits().to_vec(),
                probability: f64::NAN,
            });
        }
        *out = Box::into_raw(Box::new(LbmSolutions {
            n_visible: m.model.n_visible,
            samples_drawn: log.samples_drawn,
            rows,
        }));
        Ok(())
    })
}

/// Every completion of the evidence, ordered by free energy at confidence
/// `c`, with its posterior probability.
///
/// # Safety
/// As for [`lbm_solve`].
#[no_mangle]
pub unsafe extern "C" fn lbm_rank(
    model: *const LbmModel,
    clamp: *const i8,
    clamp_len: usize,
    c: f64,
    out: *mut *mut LbmSolutions,
) -> LbmStatus {
    guarded(|| {
        let m = model_ref(model)?;
        let out = out_ptr(out)?;
        let ev = evidence(m.model.n_visible, clamp, clamp_len)?;
        let rows = rank_exact(&m.model, &ev, c)?
            .into_iter()
            .map(|r| Row {
                bits: r.assignment.into_bits(),
                free_energy: r.free_energy,
                probability: r.probability,
            })
            .collect();
        *out = Box::into_raw(Box::new(LbmSolutions {
            n_visible: m.model.n_visible,
            samples_drawn: 0,
            rows,
        }));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn lbm_solutions_len(s: *const LbmSolutions) -> usize {
    s.as_ref().map_or(0, |s| s.rows.len())
}

/// Samples drawn by the search that produced `s`; 0 for ranked results.
///
/// # Safety
/// `s` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn lbm_solutions_samples_drawn(s: *const LbmSolutions) -> u64 {
    s.as_ref().map_or(0, |s| s.samples_drawn)
}

/// Copies row `k` into `bits_out` (exactly `n_visible` bytes). Either of
/// `free_energy` and `probability` may be null; probability is NaN for
/// search results.
///
/// # Safety
/// `bits_out` must point to `bits_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn lbm_solutions_get(
    s: *const LbmSolutions,
    k: usize,
    bits_out: *mut u8,
    bits_len: usize,
    free_energy: *mut f64,
    probability: *mut f64,
) -> LbmStatus {
    guarded(|| {
        let s = s
            .as_ref()
            .ok_or_else(|| fail(LbmStatus::NullPointer, "null solutions"))?;
        let row = s
            .rows
            .get(k)
            .ok_or_else(|| fail(LbmStatus::OutOfRange, &format!("row {k} of {}", s.rows.len())))?;
        if bits_len != s.n_visible {
            return Err(Error::DimensionMismatch {
                expected: s.n_visible,
                got: bits_len,
            }
            .into());
        }
        if bits_out.is_null() {
            return Err(fail(LbmStatus::NullPointer, "null bits buffer"));
        }
        std::slice::from_raw_parts_mut(bits_out, bits_len).copy_from_slice(&row.bits);
        if let Some(f) = free_energy.as_mut() {
            *f = row.free_energy;
        }
        if let Some(p) = probability.as_mut() {
            *p = row.probability;
        }
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn lbm_solutions_free(s: *mut LbmSolutions) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
