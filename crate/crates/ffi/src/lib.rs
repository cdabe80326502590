//! C interface to `abelrd`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns an
//! [`AbelrdStatus`]; on failure [`abelrd_last_error`] describes the problem.
//! Strings returned through out-parameters are owned by the caller and are
//! released with [`abelrd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use abelrd::cli::{run_check, solve, Check, RegionMode, SpecFile};
use abelrd::group::AbelianGroup;
use abelrd::prob::JointPmf;
use abelrd::rate::{channel_code_rate, source_code_rate};
use abelrd::sim::SimConfig;
use abelrd::Error;

/// Result of a call. The non-zero values match the exit codes of the
/// command line tool where both exist.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbelrdStatus {
    Ok = 0,
    /// A simulation check disagreed with its prediction. Output is still written.
    VerificationFailed = 1,
    InvalidArgument = 2,
    ResourceGuard = 3,
    NullPointer = 4,
    /// A bug inside the library; the message carries the panic text.
    Internal = 5,
}

/// Which regions [`abelrd_region_json`] computes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbelrdRegionMode {
    Theorem1 = 0,
    BergerTung = 1,
    Both = 2,
}

/// A finite abelian group.
pub struct AbelrdGroup(AbelianGroup);

/// A joint probability mass function.
pub struct AbelrdPmf(JointPmf);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(AbelrdStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::ResourceGuard(_) => AbelrdStatus::ResourceGuard,
            _ => AbelrdStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(AbelrdStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(AbelrdStatus::InvalidArgument, msg.into())
}

/// Runs `f`, recording failures and panics.
fn guard(f: impl FnOnce() -> Result<AbelrdStatus, Failure>) -> AbelrdStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            AbelrdStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| invalid(format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(|_| invalid("output contains a nul byte"))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn abelrd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn abelrd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn abelrd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a group name such as `Z4+Z2`, `Z2^3` or `Z12`.
///
/// # Safety
/// `name` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn abelrd_group_parse(name: *const c_char, out: *mut *mut AbelrdGroup) -> AbelrdStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let g = AbelianGroup::parse(str_arg(name, "name")?)?;
        *out = Box::into_raw(Box::new(AbelrdGroup(g)));
        Ok(AbelrdStatus::Ok)
    })
}

/// `Z_n` in its primary decomposition.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn abelrd_group_cyclic(n: u64, out: *mut *mut AbelrdGroup) -> AbelrdStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(AbelrdGroup(AbelianGroup::cyclic(n)?)));
        Ok(AbelrdStatus::Ok)
    })
}

/// # Safety
/// `g` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn abelrd_group_free(g: *mut AbelrdGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn abelrd_group_order(g: *const AbelrdGroup, out: *mut u64) -> AbelrdStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(g, "group")?.0.order();
        Ok(AbelrdStatus::Ok)
    })
}

/// Number of primary cyclic factors.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn abelrd_group_rank(g: *const AbelrdGroup, out: *mut usize) -> AbelrdStatus {
    guard(|| {
        *out_arg(out, "out")? = handle(g, "group")?.0.rank();
        Ok(AbelrdStatus::Ok)
    })
}

/// Canonical name of the group.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn abelrd_group_name(g: *const AbelrdGroup, out: *mut *mut c_char) -> AbelrdStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = c_string(handle(g, "group")?.0.name())?;
        Ok(AbelrdStatus::Ok)
    })
}

/// Sum of two elements given by their mixed-radix indices.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn abelrd_group_add(g: *const AbelrdGroup, a: usize, b: usize, out: *mut usize) -> AbelrdStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let g = &handle(g, "group")?.0;
        let n = g.order();
        if a as u64 >= n || b as u64 >= n {
            return Err(invalid(format!("element index out of range for order {n}")));
        }
        let sum = g.add(&g.element_at(a), &g.element_at(b))?;
        *out = g.index_of(&sum);
        Ok(AbelrdStatus::Ok)
    })
}

/// A pmf over a product of alphabets with sizes `shape[0..rank]`, given
/// row-major (last axis fastest). The masses must sum to one.
///
/// # Safety
/// `values` must hold `len` doubles, `shape` `rank` sizes, and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn abelrd_pmf_new(
    values: *const f64,
    len: usize,
    shape: *const usize,
    rank: usize,
    out: *mut *mut AbelrdPmf,
) -> AbelrdStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let values = slice_arg(values, len, "values")?;
        let shape = slice_arg(shape, rank, "shape")?;
        let pmf = JointPmf::from_shape(shape, values.to_vec())?;
        *out = Box::into_raw(Box::new(AbelrdPmf(pmf)));
        Ok(AbelrdStatus::Ok)
    })
}

/// # Safety
/// `p` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn abelrd_pmf_free(p: *mut AbelrdPmf) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Attaches a group to an axis whose size equals the group order. Symbol `i`
/// of the axis becomes the element with mixed-radix index `i`.
///
/// # Safety
/// `p` and `g` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn abelrd_pmf_attach_group(p: *mut AbelrdPmf, axis: usize, g: *const AbelrdGroup) -> AbelrdStatus {
    guard(|| {
        let g = handle(g, "group")?.0.clone();
        let p = p.as_mut().ok_or_else(|| null("pmf"))?;
        p.0 = p.0.clone().attach_group(axis, g)?;
        Ok(AbelrdStatus::Ok)
    })
}

/// Joint entropy in bits of the listed axes.
///
/// # Safety
/// `p` must be a live handle, `axes` hold `n_axes` indices and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn abelrd_pmf_entropy(
    p: *const AbelrdPmf,
    axes: *const usize,
    n_axes: usize,
    out: *mut f64,
) -> AbelrdStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = handle(p, "pmf")?.0.entropy(slice_arg(axes, n_axes, "axes")?)?;
        Ok(AbelrdStatus::Ok)
    })
}

/// `H(target | given)` in bits.
///
/// # Safety
/// `p` must be a live handle, the index arrays hold their stated lengths and
/// `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn abelrd_pmf_conditional_entropy(
    p: *const AbelrdPmf,
    target: *const usize,
    n_target: usize,
    given: *const usize,
    n_given: usize,
    out: *mut f64,
) -> AbelrdStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let target = slice_arg(target, n_target, "target")?;
        let given = slice_arg(given, n_given, "given")?;
        *out = handle(p, "pmf")?.0.conditional_entropy(target, given)?;
        Ok(AbelrdStatus::Ok)
    })
}

/// Rate of a good channel code over `Z_{p^r}` for the axis `z` (which must
/// carry a primary cyclic group) with the `side` axes at the decoder.
///
/// # Safety
/// `p` must be a live handle, `side` hold `n_side` indices and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn abelrd_channel_code_rate(
    p: *const AbelrdPmf,
    z: usize,
    side: *const usize,
    n_side: usize,
    out: *mut f64,
) -> AbelrdStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = channel_code_rate(&handle(p, "pmf")?.0, z, slice_arg(side, n_side, "side")?)?;
        Ok(AbelrdStatus::Ok)
    })
}

/// Rate of a good source code over `Z_{p^r}` for the axis `u` given the `x` axes.
///
/// # Safety
/// `p` must be a live handle, `x` hold `n_x` indices and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn abelrd_source_code_rate(
    p: *const AbelrdPmf,
    u: usize,
    x: *const usize,
    n_x: usize,
    out: *mut f64,
) -> AbelrdStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = source_code_rate(&handle(p, "pmf")?.0, u, slice_arg(x, n_x, "x")?)?;
        Ok(AbelrdStatus::Ok)
    })
}

/// Solves a problem specification (the JSON accepted by `abelrd region`)
/// and writes the result bundle as JSON.
///
/// # Safety
/// `spec_json` must be a nul-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn abelrd_region_json(
    spec_json: *const c_char,
    mode: AbelrdRegionMode,
    out: *mut *mut c_char,
) -> AbelrdStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let spec = SpecFile::parse(str_arg(spec_json, "spec_json")?)?;
        let mode = match mode {
            AbelrdRegionMode::Theorem1 => RegionMode::Theorem1,
            AbelrdRegionMode::BergerTung => RegionMode::BergerTung,
            AbelrdRegionMode::Both => RegionMode::Both,
        };
        let bundle = solve(&spec, mode)?;
        *out = c_string(serde_json::to_string(&bundle).map_err(Error::from)?)?;
        Ok(AbelrdStatus::Ok)
    })
}

fn parse_check(s: &str) -> Result<Check, Failure> {
    Ok(match s {
        "lemma4" => Check::Lemma4,
        "lemma6" => Check::Lemma6,
        "lemma7" => Check::Lemma7,
        "lemma8" => Check::Lemma8,
        "km" => Check::Km,
        "cover" => Check::Cover,
        "nested" => Check::Nested,
        _ => return Err(invalid(format!("unknown check `{s}`"))),
    })
}

/// Runs a simulation check (`lemma4`, `lemma6`, `lemma7`, `lemma8`, `km`,
/// `cover` or `nested`) with a JSON simulation config and writes the report
/// as JSON. `pmf` may be null, in which case `km` and `cover` use a
/// symmetric source with crossover 0.05. Returns
/// [`AbelrdStatus::VerificationFailed`] when an exhaustive check deviates.
///
/// # Safety
/// The strings must be nul-terminated, `pmf` null or a live handle, and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn abelrd_simulate_json(
    check: *const c_char,
    config_json: *const c_char,
    pmf: *const AbelrdPmf,
    out: *mut *mut c_char,
) -> AbelrdStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let check = parse_check(str_arg(check, "check")?)?;
        let cfg: SimConfig = serde_json::from_str(str_arg(config_json, "config_json")?).map_err(Error::from)?;
        cfg.validate()?;
        let pmf = pmf.as_ref().map(|p| &p.0);
        let report = run_check(check, &cfg, pmf, 0.05, None)?;
        *out = c_string(serde_json::to_string(&report).map_err(Error::from)?)?;
        Ok(if report.exhaustive_failure() { AbelrdStatus::VerificationFailed } else { AbelrdStatus::Ok })
    })
}
