//! C interface to `structured-rmt`.
//!
//! Batches are opaque handles created by `srmt_batch_simulate` or
//! `srmt_batch_read` and released with `srmt_batch_free`. Every fallible
//! call returns an `SrmtStatus`; on failure `srmt_last_error` returns a
//! message for the calling thread, valid until that thread's next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use structured_rmt::ensembles::EnsembleKind;
use structured_rmt::fitting::fit_gamma;
use structured_rmt::io::{read_batch, write_batch, RunManifest};
use structured_rmt::pipeline::simulate_spectra;
use structured_rmt::stats::{
    empirical_form_factor, estimate_compressibility, select_window, spacings, unfold, uniform_grid, FormFactorOptions,
    SpectraBatch, CUTOFF_FACTOR,
};
use structured_rmt::theory::{count_zero_modes, theoretical_form_factor, ExponentLaw, GammaSurmise};
use structured_rmt::Error;

/// Result codes. The non-zero values match the exit codes of `srmt`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SrmtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    Io = 3,
    Numerical = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SrmtEnsemble {
    ToeplitzReal = 0,
    ToeplitzComplex = 1,
    Hankel = 2,
    ThSpecialPlus = 3,
    ThSpecialMinus = 4,
    ThIndependentReal = 5,
    ThIndependentComplex = 6,
    Goe = 7,
    Gue = 8,
}

impl From<SrmtEnsemble> for EnsembleKind {
    fn from(e: SrmtEnsemble) -> Self {
        match e {
            SrmtEnsemble::ToeplitzReal => EnsembleKind::ToeplitzReal,
            SrmtEnsemble::ToeplitzComplex => EnsembleKind::ToeplitzComplex,
            SrmtEnsemble::Hankel => EnsembleKind::Hankel,
            SrmtEnsemble::ThSpecialPlus => EnsembleKind::ThSpecialPlus,
            SrmtEnsemble::ThSpecialMinus => EnsembleKind::ThSpecialMinus,
            SrmtEnsemble::ThIndependentReal => EnsembleKind::ThIndependentReal,
            SrmtEnsemble::ThIndependentComplex => EnsembleKind::ThIndependentComplex,
            SrmtEnsemble::Goe => EnsembleKind::Goe,
            SrmtEnsemble::Gue => EnsembleKind::Gue,
        }
    }
}

/// Opaque batch of sorted spectra.
pub struct SrmtBatch {
    inner: SpectraBatch,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SrmtStatus {
    match e.exit_code() {
        2 => SrmtStatus::InvalidInput,
        3 => SrmtStatus::Io,
        _ => SrmtStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), SrmtStatus>) -> SrmtStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SrmtStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside srmt".into());
            SrmtStatus::Panic
        }
    }
}

fn check<T>(r: structured_rmt::Result<T>) -> Result<T, SrmtStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn null(what: &str) -> SrmtStatus {
    set_error(format!("{what} is NULL"));
    SrmtStatus::NullPointer
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, SrmtStatus> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("path is not valid UTF-8".into());
        SrmtStatus::InvalidInput
    })?;
    Ok(Path::new(s))
}

unsafe fn batch_ref<'a>(b: *const SrmtBatch) -> Result<&'a SrmtBatch, SrmtStatus> {
    b.as_ref().ok_or_else(|| null("batch"))
}

/// Message describing the last failure on this thread, or NULL.
#[no_mangle]
pub extern "C" fn srmt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn srmt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Samples `count` matrices of size `dim` and stores their spectra.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn srmt_batch_simulate(
    ensemble: SrmtEnsemble,
    dim: usize,
    count: usize,
    seed: u64,
    out: *mut *mut SrmtBatch,
) -> SrmtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = check(simulate_spectra(ensemble.into(), dim, count, seed))?;
        *out = Box::into_raw(Box::new(SrmtBatch { inner }));
        Ok(())
    })
}

/// Reads a batch directory written by `srmt gen` or `srmt_batch_write`.
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn srmt_batch_read(dir: *const c_char, out: *mut *mut SrmtBatch) -> SrmtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let (inner, _) = check(read_batch(path_arg(dir)?))?;
        *out = Box::into_raw(Box::new(SrmtBatch { inner }));
        Ok(())
    })
}

/// Writes the batch in the on-disk batch format.
///
/// # Safety
/// `batch` must be a live handle and `dir` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn srmt_batch_write(batch: *const SrmtBatch, dir: *const c_char) -> SrmtStatus {
    guard(|| {
        let b = batch_ref(batch)?;
        let info = b.inner.info();
        let mut manifest = RunManifest::new("ffi");
        if let Some(kind) = info.kind {
            manifest = manifest.with_ensemble(kind, info.dim, info.count, info.seed);
        }
        check(write_batch(path_arg(dir)?, &b.inner, &manifest, false))?;
        Ok(())
    })
}

/// # Safety
/// `batch` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn srmt_batch_dim(batch: *const SrmtBatch) -> usize {
    batch.as_ref().map_or(0, |b| b.inner.dim())
}

/// # Safety
/// `batch` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn srmt_batch_count(batch: *const SrmtBatch) -> usize {
    batch.as_ref().map_or(0, |b| b.inner.count())
}

/// Copies all eigenvalues, row by row, into `buf` of length `len`
/// (at least `dim * count`).
///
/// # Safety
/// `batch` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn srmt_batch_copy_values(batch: *const SrmtBatch, buf: *mut f64, len: usize) -> SrmtStatus {
    guard(|| {
        let b = batch_ref(batch)?;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let values = b.inner.values();
        if len < values.len() {
            set_error(format!("buffer holds {len} values, batch has {}", values.len()));
            return Err(SrmtStatus::InvalidInput);
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `batch` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn srmt_batch_free(batch: *mut SrmtBatch) {
    if !batch.is_null() {
        drop(Box::from_raw(batch));
    }
}

/// Maximum-likelihood `gamma_n` from the unfolded, windowed batch.
///
/// # Safety
/// `batch` must be a live handle; `gamma` and `stderr` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn srmt_fit_gamma(batch: *const SrmtBatch, n: usize, gamma: *mut f64, stderr: *mut f64) -> SrmtStatus {
    guard(|| {
        let b = batch_ref(batch)?;
        if gamma.is_null() || stderr.is_null() {
            return Err(null("output pointer"));
        }
        let u = check(unfold(&b.inner).and_then(|u| select_window(&u, b.inner.info().kind)))?;
        let fit = check(fit_gamma(&spacings(&u, n), n, None))?;
        *gamma = fit.gamma_hat;
        *stderr = fit.stderr;
        Ok(())
    })
}

/// Compressibility from the tapered form factor.
///
/// # Safety
/// `batch` must be a live handle; `chi` and `stderr` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn srmt_compressibility(batch: *const SrmtBatch, chi: *mut f64, stderr: *mut f64) -> SrmtStatus {
    guard(|| {
        let b = batch_ref(batch)?;
        if chi.is_null() || stderr.is_null() {
            return Err(null("output pointer"));
        }
        let u = check(unfold(&b.inner).and_then(|u| select_window(&u, b.inner.info().kind)))?;
        let grid = check(uniform_grid(0.002, 0.5, 0.002))?;
        let curve = check(empirical_form_factor(&u, &grid, FormFactorOptions::TAPERED))?;
        let est = check(estimate_compressibility(&curve, CUTOFF_FACTOR))?;
        *chi = est.chi;
        *stderr = est.stderr;
        Ok(())
    })
}

/// Gamma surmise density with mean `n + 1`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn srmt_gamma_pdf(n: usize, gamma_n: f64, s: f64, out: *mut f64) -> SrmtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = check(GammaSurmise::new(n, gamma_n))?.pdf(s);
        Ok(())
    })
}

/// Form factor of the law `gamma_n = p n + k` at `tau > 0`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn srmt_form_factor(p: f64, k: f64, tau: f64, out: *mut f64) -> SrmtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = check(theoretical_form_factor(ExponentLaw::new(p, k), tau))?;
        Ok(())
    })
}

/// Zero modes of the order-`n` degeneracy conditions.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn srmt_zero_modes(ensemble: SrmtEnsemble, n: usize, out: *mut usize) -> SrmtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = check(count_zero_modes(ensemble.into(), n))?;
        Ok(())
    })
}
