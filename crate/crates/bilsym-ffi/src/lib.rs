//! C ABI for `bilsym`.
//!
//! Grids, fields and symbols cross the boundary as opaque handles created by
//! `bs_*_new`/`bs_*_from_*`/`bs_symbol_builtin` and released by the matching
//! `*_free`. Every fallible call returns a [`BsStatus`]; on failure the
//! message is kept per thread and read with [`bs_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bilsym::grid::{lp_norm, ComplexField, Grid, Representation};
use bilsym::operator::apply_fft_diag;
use bilsym::probes::critical_order;
use bilsym::symbol::{builtin, Builtin, Symbol};
use bilsym::{Complex64, Error};

/// Periodic lattice.
pub struct BsGrid(Grid);

/// Complex samples on a grid, in physical space.
pub struct BsField(ComplexField);

/// Bilinear symbol.
pub struct BsSymbol(Symbol);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGrid = 3,
    GridMismatch = 4,
    XDependent = 5,
    UnknownSymbol = 6,
    NonFinite = 7,
    Precondition = 8,
    /// Buffer passed in is too small.
    BufferTooSmall = 9,
    Internal = 10,
    /// A panic was caught at the boundary.
    Panic = 11,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: BsStatus, msg: impl Into<String>) -> BsStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> BsStatus {
    let status = match &e {
        Error::InvalidGrid(_) => BsStatus::InvalidGrid,
        Error::GridMismatch => BsStatus::GridMismatch,
        Error::XDependent => BsStatus::XDependent,
        Error::UnknownSymbol(_) => BsStatus::UnknownSymbol,
        Error::NonFinite(_) => BsStatus::NonFinite,
        Error::Precondition(_) | Error::CostGuard(_) | Error::Representation { .. } => BsStatus::Precondition,
        Error::Config(_) | Error::Format(_) => BsStatus::InvalidArgument,
        Error::Divergence(_) | Error::Io(_) => BsStatus::Internal,
    };
    fail(status, e.to_string())
}

/// Handles are only read inside `body`, so a panic leaves them intact.
fn guard(body: impl FnOnce() -> Result<(), BsStatus>) -> BsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => BsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(BsStatus::Panic, "panic inside bilsym"),
    }
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, BsStatus> {
    p.as_ref().ok_or_else(|| fail(BsStatus::NullPointer, format!("{what} is null")))
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<(), BsStatus> {
    if p.is_null() {
        Err(fail(BsStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

/// Copies the last error message of this thread into `buf` as a
/// NUL-terminated string, truncating to `len − 1` bytes. Returns the full
/// message length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bs_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Creates a `dim`-dimensional grid with `points` nodes per axis and period `period`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bs_grid_new(dim: usize, points: usize, period: f64, out: *mut *mut BsGrid) -> BsStatus {
    guard(|| {
        out_ptr(out, "out")?;
        let g = Grid::new(dim, points, period).map_err(from_error)?;
        *out = boxed(BsGrid(g));
        Ok(())
    })
}

/// Total number of nodes, `points^dim`; 0 for a null handle.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bs_grid_len(grid: *const BsGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.0.len())
}

/// # Safety
/// `grid` must be null or a handle from `bs_grid_new`, not freed before.
#[no_mangle]
pub unsafe extern "C" fn bs_grid_free(grid: *mut BsGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Builds a field from `len` samples in row-major order. `im` may be null
/// for real data.
///
/// # Safety
/// `grid` must be a live handle, `re` (and `im` unless null) must point to
/// `len` readable doubles, and `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bs_field_from_samples(
    grid: *const BsGrid,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut BsField,
) -> BsStatus {
    guard(|| {
        let g = deref(grid, "grid")?;
        out_ptr(out, "out")?;
        if re.is_null() {
            return Err(fail(BsStatus::NullPointer, "re is null"));
        }
        if len != g.0.len() {
            return Err(fail(BsStatus::InvalidArgument, format!("expected {} samples, got {len}", g.0.len())));
        }
        let re = std::slice::from_raw_parts(re, len);
        let values: Vec<Complex64> = if im.is_null() {
            re.iter().map(|&a| Complex64::new(a, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect()
        };
        let f = ComplexField::new(g.0.clone(), values, Representation::Spatial).map_err(from_error)?;
        *out = boxed(BsField(f));
        Ok(())
    })
}

/// Number of samples of a field; 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bs_field_len(field: *const BsField) -> usize {
    field.as_ref().map_or(0, |f| f.0.values().len())
}

/// Copies the samples into `re` and `im` (either may be null).
///
/// # Safety
/// `field` must be a live handle; non-null `re`/`im` must point to `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bs_field_values(field: *const BsField, re: *mut f64, im: *mut f64, len: usize) -> BsStatus {
    guard(|| {
        let f = deref(field, "field")?;
        let values = f.0.values();
        if len < values.len() {
            return Err(fail(BsStatus::BufferTooSmall, format!("need {} slots, got {len}", values.len())));
        }
        for (i, v) in values.iter().enumerate() {
            if !re.is_null() {
                *re.add(i) = v.re;
            }
            if !im.is_null() {
                *im.add(i) = v.im;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `field` must be null or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn bs_field_free(field: *mut BsField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// `(hⁿ Σ|f|^p)^{1/p}`; `p = INFINITY` gives the sup norm.
///
/// # Safety
/// `field` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bs_lp_norm(field: *const BsField, p: f64, out: *mut f64) -> BsStatus {
    guard(|| {
        let f = deref(field, "field")?;
        out_ptr(out, "out")?;
        *out = lp_norm(&f.0, p).map_err(from_error)?;
        Ok(())
    })
}

/// Catalogue symbol from its compact label, e.g. `"bracket(-1)"`.
///
/// # Safety
/// `label` must be a NUL-terminated string and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bs_symbol_builtin(label: *const c_char, dim: usize, out: *mut *mut BsSymbol) -> BsStatus {
    guard(|| {
        if label.is_null() {
            return Err(fail(BsStatus::NullPointer, "label is null"));
        }
        out_ptr(out, "out")?;
        let text = CStr::from_ptr(label)
            .to_str()
            .map_err(|_| fail(BsStatus::InvalidArgument, "label is not UTF-8"))?;
        let spec = Builtin::parse(text).map_err(from_error)?;
        let sym = builtin(&spec, dim).map_err(from_error)?;
        *out = boxed(BsSymbol(sym));
        Ok(())
    })
}

/// # Safety
/// `symbol` must be null or a handle from this library, not freed before.
#[no_mangle]
pub unsafe extern "C" fn bs_symbol_free(symbol: *mut BsSymbol) {
    if !symbol.is_null() {
        drop(Box::from_raw(symbol));
    }
}

/// `T_σ(f, g)` for an x-independent symbol; the result is a new field.
///
/// # Safety
/// All handles must be live and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn bs_apply_fft_diag(
    symbol: *const BsSymbol,
    f: *const BsField,
    g: *const BsField,
    out: *mut *mut BsField,
) -> BsStatus {
    guard(|| {
        let (s, f, g) = (deref(symbol, "symbol")?, deref(f, "f")?, deref(g, "g")?);
        out_ptr(out, "out")?;
        let r = apply_fft_diag(&s.0, &f.0, &g.0).map_err(from_error)?;
        *out = boxed(BsField(r.field));
        Ok(())
    })
}

/// Critical order `m(p₁, p₂)` for `S^m_{ρ,δ}` on `n`-dimensional space.
/// Exponents are in `[1, ∞]`; pass `INFINITY` for `∞`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn bs_critical_order(p1: f64, p2: f64, rho: f64, n: usize, out: *mut f64) -> BsStatus {
    guard(|| {
        out_ptr(out, "out")?;
        if !(0.0..=1.0).contains(&rho) {
            return Err(fail(BsStatus::InvalidArgument, format!("ρ must lie in [0, 1], got {rho}")));
        }
        *out = critical_order(p1, p2, rho, n).map_err(from_error)?;
        Ok(())
    })
}
