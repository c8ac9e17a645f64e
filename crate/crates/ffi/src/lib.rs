//! C ABI over `liouskin`.
//!
//! Objects cross the boundary as opaque heap handles created by `*_new` and
//! released by the matching `*_free`. Every fallible call returns a
//! `LiouskinStatus`; on failure the message is kept per thread and read with
//! `liouskin_last_error_message`. Array getters copy into caller buffers and
//! report `LIOUSKIN_STATUS_BUFFER_TOO_SMALL` when `cap` is short; the `*_len`
//! style getters give the size to allocate.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use liouskin::bethe::{scan_roots, BetheRoots, RootOptions};
use liouskin::liouvillian::build_effective_liouvillian;
use liouskin::observables::{density_profile, imbalance, Weighting};
use liouskin::spectra::{dense_spectrum, steady_state};
use liouskin::{build_sector, Boundary, Error, ModelParams, SectorBasis, SparseOperator, C64};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiouskinStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Capacity = 3,
    Domain = 4,
    Unsupported = 5,
    Numeric = 6,
    Convergence = 7,
    RejectedRoot = 8,
    BufferTooSmall = 9,
    Panic = 10,
    Other = 11,
}

/// Values accepted by the `bc` argument of `liouskin_model_new`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LiouskinBoundary {
    Periodic = 0,
    Open = 1,
    Generalized = 2,
}

/// Chain parameters.
pub struct LiouskinModel {
    params: ModelParams,
}

/// Effective operator on the `M`-particle sector, with its basis.
pub struct LiouskinOperator {
    op: SparseOperator,
    basis: SectorBasis,
}

/// Dense spectrum, ascending by real part then imaginary part.
pub struct LiouskinSpectrum {
    values: Vec<C64>,
}

pub struct LiouskinSteady {
    configs: Vec<u32>,
    probabilities: Vec<f64>,
    profile: Vec<f64>,
    imbalance: f64,
    residual: f64,
}

/// Bethe root sets found by the continuation scan.
pub struct LiouskinRoots {
    roots: Vec<BetheRoots>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(LiouskinStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.kind() {
            "invalid_argument" | "config" => LiouskinStatus::InvalidArgument,
            "capacity" => LiouskinStatus::Capacity,
            "domain" => LiouskinStatus::Domain,
            "unsupported" => LiouskinStatus::Unsupported,
            "numeric" => LiouskinStatus::Numeric,
            "convergence" => LiouskinStatus::Convergence,
            "rejected_root" => LiouskinStatus::RejectedRoot,
            _ => LiouskinStatus::Other,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LiouskinStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LiouskinStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("panic: {msg}"));
            LiouskinStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(LiouskinStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn copy_out<T: Copy>(src: &[T], dst: *mut T, cap: usize, what: &str) -> Result<(), Failure> {
    if cap < src.len() {
        return Err(Failure(
            LiouskinStatus::BufferTooSmall,
            format!("{what} needs {} entries, got {cap}", src.len()),
        ));
    }
    if src.is_empty() {
        return Ok(());
    }
    if dst.is_null() {
        return Err(null(what));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

unsafe fn copy_complex(src: &[C64], re: *mut f64, im: *mut f64, cap: usize) -> Result<(), Failure> {
    let r: Vec<f64> = src.iter().map(|z| z.re).collect();
    let i: Vec<f64> = src.iter().map(|z| z.im).collect();
    copy_out(&r, re, cap, "re")?;
    copy_out(&i, im, cap, "im")
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Message of the last failed call on this thread. Valid until the next
/// failure on the same thread; empty if nothing has failed yet.
#[no_mangle]
pub extern "C" fn liouskin_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn liouskin_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// `bc` is a `LiouskinBoundary` value. `delta_l` and `delta_r` are ignored
/// unless it is generalized.
///
/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn liouskin_model_new(
    bc: i32,
    l: usize,
    m: usize,
    j: f64,
    phi: f64,
    delta_l: f64,
    delta_r: f64,
    out: *mut *mut LiouskinModel,
) -> LiouskinStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let boundary = match bc {
            x if x == LiouskinBoundary::Periodic as i32 => Boundary::Periodic,
            x if x == LiouskinBoundary::Open as i32 => Boundary::Open,
            x if x == LiouskinBoundary::Generalized as i32 => Boundary::Generalized,
            _ => {
                return Err(Failure(
                    LiouskinStatus::InvalidArgument,
                    format!("unknown boundary code {bc}"),
                ))
            }
        };
        let mut params = ModelParams::new(l, m, boundary).with_j(j).with_phi(phi);
        if boundary == Boundary::Generalized {
            params = params.with_deltas(delta_l, delta_r);
        }
        params.validate()?;
        put(out, boxed(LiouskinModel { params }), "out")
    })
}

/// # Safety
/// `model` must come from `liouskin_model_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn liouskin_model_free(model: *mut LiouskinModel) {
    free(model)
}

/// # Safety
/// `model` must be a live handle; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn liouskin_operator_new(
    model: *const LiouskinModel,
    out: *mut *mut LiouskinOperator,
) -> LiouskinStatus {
    guard(|| {
        let p = &deref(model, "model")?.params;
        if out.is_null() {
            return Err(null("out"));
        }
        let basis = build_sector(p.l, p.m)?;
        let op = build_effective_liouvillian(p, &basis)?;
        put(out, boxed(LiouskinOperator { op, basis }), "out")
    })
}

/// # Safety
/// `op` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn liouskin_operator_free(op: *mut LiouskinOperator) {
    free(op)
}

/// Sector dimension; 0 for a null handle.
///
/// # Safety
/// `op` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn liouskin_operator_dim(op: *const LiouskinOperator) -> usize {
    op.as_ref().map_or(0, |o| o.op.dim())
}

/// Stored nonzeros; 0 for a null handle.
///
/// # Safety
/// `op` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn liouskin_operator_nnz(op: *const LiouskinOperator) -> usize {
    op.as_ref().map_or(0, |o| o.op.nnz())
}

/// Basis configurations in index order; bit `j - 1` is site `j`.
///
/// # Safety
/// `configs` must hold `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn liouskin_operator_configs(
    op: *const LiouskinOperator,
    configs: *mut u32,
    cap: usize,
) -> LiouskinStatus {
    guard(|| copy_out(deref(op, "op")?.basis.configs(), configs, cap, "configs"))
}

/// Row-major triplets of the operator. All four buffers hold `cap` entries.
///
/// # Safety
/// Buffers must be valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn liouskin_operator_triplets(
    op: *const LiouskinOperator,
    rows: *mut usize,
    cols: *mut usize,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
) -> LiouskinStatus {
    guard(|| {
        let o = deref(op, "op")?;
        let (mut r, mut c, mut v) = (Vec::new(), Vec::new(), Vec::new());
        for (i, j, z) in o.op.entries() {
            r.push(i);
            c.push(j);
            v.push(z);
        }
        copy_out(&r, rows, cap, "rows")?;
        copy_out(&c, cols, cap, "cols")?;
        copy_complex(&v, re, im, cap)
    })
}

/// Dense eigenvalues of the operator.
///
/// # Safety
/// `op` must be a live handle; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn liouskin_spectrum_new(
    op: *const LiouskinOperator,
    out: *mut *mut LiouskinSpectrum,
) -> LiouskinStatus {
    guard(|| {
        let o = deref(op, "op")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let values = dense_spectrum(&o.op, false)?.sorted_eigenvalues();
        put(out, boxed(LiouskinSpectrum { values }), "out")
    })
}

/// # Safety
/// `spec` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn liouskin_spectrum_free(spec: *mut LiouskinSpectrum) {
    free(spec)
}

/// # Safety
/// `spec` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn liouskin_spectrum_len(spec: *const LiouskinSpectrum) -> usize {
    spec.as_ref().map_or(0, |s| s.values.len())
}

/// # Safety
/// `re` and `im` must hold `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn liouskin_spectrum_values(
    spec: *const LiouskinSpectrum,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
) -> LiouskinStatus {
    guard(|| copy_complex(&deref(spec, "spec")?.values, re, im, cap))
}

/// Steady state of the sector, with its site profile and imbalance.
///
/// # Safety
/// `model` must be a live handle; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn liouskin_steady_new(
    model: *const LiouskinModel,
    out: *mut *mut LiouskinSteady,
) -> LiouskinStatus {
    guard(|| {
        let p = &deref(model, "model")?.params;
        if out.is_null() {
            return Err(null("out"));
        }
        let basis = build_sector(p.l, p.m)?;
        let state = steady_state(&build_effective_liouvillian(p, &basis)?, &basis)?;
        let profile = density_profile(&state.probabilities, &basis, Weighting::Probability)?;
        let steady = LiouskinSteady {
            configs: basis.configs().to_vec(),
            imbalance: imbalance(&profile)?,
            profile,
            residual: state.residual,
            probabilities: state.probabilities,
        };
        put(out, boxed(steady), "out")
    })
}

/// # Safety
/// `st` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn liouskin_steady_free(st: *mut LiouskinSteady) {
    free(st)
}

/// Number of configurations; 0 for a null handle.
///
/// # Safety
/// `st` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn liouskin_steady_dim(st: *const LiouskinSteady) -> usize {
    st.as_ref().map_or(0, |s| s.probabilities.len())
}

/// Chain length; 0 for a null handle.
///
/// # Safety
/// `st` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn liouskin_steady_sites(st: *const LiouskinSteady) -> usize {
    st.as_ref().map_or(0, |s| s.profile.len())
}

/// Probabilities and their configurations, both `cap` long.
///
/// # Safety
/// Buffers must be valid for `cap` writes.
#[no_mangle]
pub unsafe extern "C" fn liouskin_steady_probabilities(
    st: *const LiouskinSteady,
    configs: *mut u32,
    probabilities: *mut f64,
    cap: usize,
) -> LiouskinStatus {
    guard(|| {
        let s = deref(st, "st")?;
        copy_out(&s.configs, configs, cap, "configs")?;
        copy_out(&s.probabilities, probabilities, cap, "probabilities")
    })
}

/// Mean occupation of each site.
///
/// # Safety
/// `profile` must hold `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn liouskin_steady_profile(
    st: *const LiouskinSteady,
    profile: *mut f64,
    cap: usize,
) -> LiouskinStatus {
    guard(|| copy_out(&deref(st, "st")?.profile, profile, cap, "profile"))
}

/// Right-minus-left imbalance and the solver's residual.
///
/// # Safety
/// Out pointers may be null to skip a value.
#[no_mangle]
pub unsafe extern "C" fn liouskin_steady_summary(
    st: *const LiouskinSteady,
    imbalance: *mut f64,
    residual: *mut f64,
) -> LiouskinStatus {
    guard(|| {
        let s = deref(st, "st")?;
        if !imbalance.is_null() {
            imbalance.write(s.imbalance);
        }
        if !residual.is_null() {
            residual.write(s.residual);
        }
        Ok(())
    })
}

/// Bethe roots for `M` = 1 or 2.
///
/// # Safety
/// `model` must be a live handle; `out` a valid handle slot.
#[no_mangle]
pub unsafe extern "C" fn liouskin_roots_new(
    model: *const LiouskinModel,
    out: *mut *mut LiouskinRoots,
) -> LiouskinStatus {
    guard(|| {
        let p = &deref(model, "model")?.params;
        if out.is_null() {
            return Err(null("out"));
        }
        let roots = scan_roots(p, &RootOptions::default())?;
        put(out, boxed(LiouskinRoots { roots }), "out")
    })
}

/// # Safety
/// `roots` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn liouskin_roots_free(roots: *mut LiouskinRoots) {
    free(roots)
}

/// # Safety
/// `roots` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn liouskin_roots_count(roots: *const LiouskinRoots) -> usize {
    roots.as_ref().map_or(0, |r| r.roots.len())
}

fn root_at(roots: &LiouskinRoots, index: usize) -> Result<&BetheRoots, Failure> {
    roots.roots.get(index).ok_or_else(|| {
        Failure(
            LiouskinStatus::InvalidArgument,
            format!(
                "root index {index} out of range ({} sets)",
                roots.roots.len()
            ),
        )
    })
}

/// Energy and relative residual of one root set.
///
/// # Safety
/// Out pointers may be null to skip a value.
#[no_mangle]
pub unsafe extern "C" fn liouskin_roots_energy(
    roots: *const LiouskinRoots,
    index: usize,
    re: *mut f64,
    im: *mut f64,
    residual: *mut f64,
) -> LiouskinStatus {
    guard(|| {
        let r = root_at(deref(roots, "roots")?, index)?;
        for (p, v) in [(re, r.energy.re), (im, r.energy.im), (residual, r.residual)] {
            if !p.is_null() {
                p.write(v);
            }
        }
        Ok(())
    })
}

/// Quasimomenta of one root set; `M` entries.
///
/// # Safety
/// `re` and `im` must hold `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn liouskin_roots_momenta(
    roots: *const LiouskinRoots,
    index: usize,
    re: *mut f64,
    im: *mut f64,
    cap: usize,
) -> LiouskinStatus {
    guard(|| {
        copy_complex(
            &root_at(deref(roots, "roots")?, index)?.momenta,
            re,
            im,
            cap,
        )
    })
}
