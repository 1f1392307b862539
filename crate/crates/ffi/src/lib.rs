//! C ABI for `lotteryforge`.
//!
//! Set systems cross the boundary as opaque `LfSystem` handles owned by the
//! caller and released with [`lf_system_free`]. Every fallible call returns
//! an [`LfStatus`]; on failure [`lf_last_error`] describes what went wrong on
//! the calling thread. Strings returned through `char**` are released with
//! [`lf_string_free`].
//!
//! The header `include/lotteryforge.h` is generated by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lotteryforge::construct::{compose, gdd, greedy_covering, patches};
use lotteryforge::format::{emit_text, parse_text, SystemFile};
use lotteryforge::modular::m_lcm;
use lotteryforge::solve::{exact_min_lottery_with, Budget, SolveOptions};
use lotteryforge::verify::{verify_covering, verify_lottery, Verdict};
use lotteryforge::{Error, Params, SetSystem};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LfStatus {
    Ok = 0,
    NullPointer = 1,
    Parameter = 2,
    Capacity = 3,
    NonUnit = 4,
    Precondition = 5,
    Structural = 6,
    Parse = 7,
    Defect = 8,
    Io = 9,
    BufferTooSmall = 10,
    Utf8 = 11,
    Panic = 12,
}

/// Opaque handle to a canonical set system.
pub struct LfSystem(SetSystem);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LfParams {
    pub n: u32,
    pub k: u32,
    pub r: u32,
    pub p: u32,
}

/// Verdict of a check. On failure the witness is written to the caller's
/// buffer and `witness_len` holds its size.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LfVerdict {
    pub ok: bool,
    pub witness_len: usize,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LfCompositionReport {
    pub size_a: u64,
    pub size_b: u64,
    pub overlap: u64,
    pub total: u64,
    /// Density `total / C(mN, r)` in lowest terms; `0/0` if either part
    /// exceeds 64 bits.
    pub density_num: u64,
    pub density_den: u64,
    pub verified: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LfBound {
    pub lower: u64,
    /// `u64::MAX` when no upper bound is known.
    pub upper: u64,
    pub complete: bool,
    pub nodes: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn status_of(err: &Error) -> LfStatus {
    match err {
        Error::Parameter(_) => LfStatus::Parameter,
        Error::Capacity(_) => LfStatus::Capacity,
        Error::NonUnit { .. } => LfStatus::NonUnit,
        Error::Precondition(_) => LfStatus::Precondition,
        Error::Structural(_) => LfStatus::Structural,
        Error::Parse { .. } | Error::Json(_) => LfStatus::Parse,
        Error::Defect(_) => LfStatus::Defect,
        Error::Io(_) => LfStatus::Io,
    }
}

struct Failure(LfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(LfStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> LfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => LfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside lotteryforge");
            LfStatus::Panic
        }
    }
}

fn params_of(p: LfParams) -> Result<Params, Failure> {
    Ok(Params::new(p.n, p.k, p.r, p.p)?)
}

unsafe fn system_ref<'a>(sys: *const LfSystem) -> Result<&'a SetSystem, Failure> {
    sys.as_ref().map(|s| &s.0).ok_or_else(|| null("system"))
}

unsafe fn put_system(out: *mut *mut LfSystem, sys: SetSystem) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(LfSystem(sys)));
    Ok(())
}

unsafe fn write_verdict(
    v: &Verdict,
    witness: *mut u32,
    capacity: usize,
    out: *mut LfVerdict,
) -> Result<(), Failure> {
    let out = out.as_mut().ok_or_else(|| null("verdict"))?;
    let w = v.witness.as_deref().unwrap_or(&[]);
    *out = LfVerdict {
        ok: v.ok,
        witness_len: w.len(),
    };
    if w.is_empty() {
        return Ok(());
    }
    if witness.is_null() || capacity < w.len() {
        return Err(Failure(
            LfStatus::BufferTooSmall,
            format!("witness needs {} slots", w.len()),
        ));
    }
    ptr::copy_nonoverlapping(w.as_ptr(), witness, w.len());
    Ok(())
}

/// Message describing the last failure on this thread. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a system from `block_count` blocks of `k` vertices each, stored
/// contiguously in `vertices`.
///
/// # Safety
/// `vertices` must point to `block_count * k` readable `uint32_t` values
/// (it may be null when `block_count * k == 0`); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_system_new(
    n: u32,
    k: u32,
    vertices: *const u32,
    block_count: usize,
    out: *mut *mut LfSystem,
) -> LfStatus {
    guard(|| {
        let len = block_count
            .checked_mul(k as usize)
            .ok_or_else(|| Failure(LfStatus::Capacity, "block data size overflows".into()))?;
        let data: &[u32] = if len == 0 {
            &[]
        } else if vertices.is_null() {
            return Err(null("vertices"));
        } else {
            std::slice::from_raw_parts(vertices, len)
        };
        let blocks = if k == 0 {
            vec![Vec::new(); block_count]
        } else {
            data.chunks(k as usize).map(<[u32]>::to_vec).collect()
        };
        put_system(out, SetSystem::new(n, k, blocks)?)
    })
}

/// # Safety
/// `sys` must be null or a handle returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_system_free(sys: *mut LfSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// # Safety
/// `sys` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lf_system_n(sys: *const LfSystem) -> u32 {
    sys.as_ref().map_or(0, |s| s.0.n())
}

/// # Safety
/// `sys` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lf_system_k(sys: *const LfSystem) -> u32 {
    sys.as_ref().map_or(0, |s| s.0.k())
}

/// Number of blocks.
///
/// # Safety
/// `sys` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn lf_system_len(sys: *const LfSystem) -> usize {
    sys.as_ref().map_or(0, |s| s.0.len())
}

/// Copies block `index` (ascending vertices) into `out`, which holds
/// `capacity` values.
///
/// # Safety
/// `sys` must be a live handle and `out` writable for `capacity` values.
#[no_mangle]
pub unsafe extern "C" fn lf_system_block(
    sys: *const LfSystem,
    index: usize,
    out: *mut u32,
    capacity: usize,
) -> LfStatus {
    guard(|| {
        let sys = system_ref(sys)?;
        let block = sys.blocks().get(index).ok_or_else(|| {
            Failure(
                LfStatus::Parameter,
                format!("block {index} of {}", sys.len()),
            )
        })?;
        if out.is_null() && !block.is_empty() {
            return Err(null("out"));
        }
        if capacity < block.len() {
            return Err(Failure(LfStatus::BufferTooSmall, format!("block needs {} slots", block.len())));
        }
        ptr::copy_nonoverlapping(block.as_ptr(), out, block.len());
        Ok(())
    })
}

/// Parses the text system format.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_system_parse(text: *const c_char, out: *mut *mut LfSystem) -> LfStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure(LfStatus::Utf8, e.to_string()))?;
        let file = parse_text(text)?;
        put_system(out, file.system)
    })
}

/// Renders a system in the text format. Free the result with
/// [`lf_string_free`].
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_system_to_text(sys: *const LfSystem, out: *mut *mut c_char) -> LfStatus {
    guard(|| {
        let sys = system_ref(sys)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let text = emit_text(&SystemFile::new(sys.clone()));
        *out = CString::new(text).expect("no NUL in rendered text").into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Lottery check. A failing verdict writes the lexicographically least
/// failing `p`-set to `witness`.
///
/// # Safety
/// `sys` must be a live handle, `witness` writable for `capacity` values
/// (or null with `capacity == 0`), and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lf_verify_lottery(
    sys: *const LfSystem,
    params: LfParams,
    witness: *mut u32,
    capacity: usize,
    out: *mut LfVerdict,
) -> LfStatus {
    guard(|| {
        let v = verify_lottery(system_ref(sys)?, &params_of(params)?)?;
        write_verdict(&v, witness, capacity, out)
    })
}

/// Covering check: every `r`-subset lies inside a block.
///
/// # Safety
/// As [`lf_verify_lottery`].
#[no_mangle]
pub unsafe extern "C" fn lf_verify_covering(
    sys: *const LfSystem,
    r: u32,
    witness: *mut u32,
    capacity: usize,
    out: *mut LfVerdict,
) -> LfStatus {
    guard(|| {
        let v = verify_covering(system_ref(sys)?, r)?;
        write_verdict(&v, witness, capacity, out)
    })
}

/// Transversal design with parts of size `part_size`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_gdd(part_size: u32, k: u32, r: u32, out: *mut *mut LfSystem) -> LfStatus {
    guard(|| put_system(out, gdd(part_size, k, r)?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_greedy_covering(n: u32, k: u32, r: u32, out: *mut *mut LfSystem) -> LfStatus {
    guard(|| put_system(out, greedy_covering(n, k, r)?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_patches(
    m: u32,
    part_size: u32,
    k: u32,
    r: u32,
    out: *mut *mut LfSystem,
) -> LfStatus {
    guard(|| put_system(out, patches(m, part_size, k, r)?))
}

/// Composes `base`, an `params`-lottery system, into one on
/// `params.n * part_size` vertices.
///
/// # Safety
/// `base` must be a live handle; `out` and `report` writable (`report` may
/// be null).
#[no_mangle]
pub unsafe extern "C" fn lf_compose(
    base: *const LfSystem,
    params: LfParams,
    part_size: u32,
    out: *mut *mut LfSystem,
    report: *mut LfCompositionReport,
) -> LfStatus {
    guard(|| {
        let (sys, rep) = compose(system_ref(base)?, &params_of(params)?, part_size)?;
        if let Some(slot) = report.as_mut() {
            let (num, den) = match (
                u64::try_from(rep.density.numer()),
                u64::try_from(rep.density.denom()),
            ) {
                (Ok(a), Ok(b)) => (a, b),
                _ => (0, 0),
            };
            *slot = LfCompositionReport {
                size_a: rep.size_a as u64,
                size_b: rep.size_b as u64,
                overlap: rep.overlap as u64,
                total: rep.total as u64,
                density_num: num,
                density_den: den,
                verified: rep.verified,
            };
        }
        put_system(out, sys)
    })
}

/// Exact `L(n, k, r, p)` within `max_nodes` search nodes (`0` for no
/// limit). The best certificate is returned through `certificate` when it
/// is non-null.
///
/// # Safety
/// `out` must be writable; `certificate` null or writable.
#[no_mangle]
pub unsafe extern "C" fn lf_exact_min_lottery(
    params: LfParams,
    max_nodes: u64,
    symmetry_break: bool,
    out: *mut LfBound,
    certificate: *mut *mut LfSystem,
) -> LfStatus {
    guard(|| {
        let slot = out.as_mut().ok_or_else(|| null("out"))?;
        let opts = SolveOptions {
            budget: Budget {
                max_nodes: (max_nodes > 0).then_some(max_nodes),
                max_seconds: None,
            },
            symmetry_break,
        };
        let bp = exact_min_lottery_with(&params_of(params)?, &opts)?;
        *slot = LfBound {
            lower: bp.lower,
            upper: bp.upper.unwrap_or(u64::MAX),
            complete: bp.complete,
            nodes: bp.nodes,
        };
        if !certificate.is_null() {
            *certificate = match bp.certificate {
                Some(c) => Box::into_raw(Box::new(LfSystem(c))),
                None => ptr::null_mut(),
            };
        }
        Ok(())
    })
}

/// `M_{k,n}` as a decimal string. Free it with [`lf_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lf_m_lcm(k: u32, n: u32, out: *mut *mut c_char) -> LfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let value = m_lcm(k, n)?.to_string();
        *out = CString::new(value).expect("digits only").into_raw();
        Ok(())
    })
}
