//! C ABI over `groupcount`.
//!
//! Every function returns a [`GcStatus`]; results come back through out
//! pointers. On failure a message is stored per thread and can be copied out
//! with [`gc_last_error`]. Strings returned by the library are owned by the
//! caller and must be released with [`gc_string_free`]; handles with their
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use groupcount::arithmetic::{self, NumberClass, SpfTable};
use groupcount::asymptotics::{self, EstimateParams, Which};
use groupcount::census::{self, CensusConfig, Execution};
use groupcount::constants::NumericContext;
use groupcount::quadrature;
use groupcount::series::{Family, FormalSeries};
use groupcount::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Resource = 3,
    Config = 4,
    Precondition = 5,
    Overflow = 6,
    Numeric = 7,
    Data = 8,
    Io = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcNumberClass {
    Cyclic = 0,
    StrictlyAbelian = 1,
    StrictlyNilpotent = 2,
    NotNilpotent = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcFamily {
    /// Γ(1+w) coefficients.
    UpperC = 0,
    /// Γ(2+w) coefficients.
    UpperD = 1,
    LowerC = 2,
    LowerB = 3,
    LowerD = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GcEstimate {
    Cyclic = 0,
    StrictlyAbelian = 1,
    StrictlyNilpotent = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GcClassCounts {
    pub cyclic: u64,
    pub strictly_abelian: u64,
    pub strictly_nilpotent: u64,
    pub not_nilpotent: u64,
    pub total: u64,
}

/// Opaque smallest-prime-factor table.
pub struct GcSpfTable(SpfTable);

/// Opaque coefficient series.
pub struct GcSeries(FormalSeries);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> GcStatus {
    match e {
        Error::Domain(_) => GcStatus::Domain,
        Error::Resource(_) => GcStatus::Resource,
        Error::Config(_) => GcStatus::Config,
        Error::Precondition(_) => GcStatus::Precondition,
        Error::Overflow(_) => GcStatus::Overflow,
        Error::Numeric(_) => GcStatus::Numeric,
        Error::Data(_) => GcStatus::Data,
        Error::Io(_) | Error::Csv(_) => GcStatus::Io,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), GcStatusError>) -> GcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GcStatus::Ok,
        Ok(Err(GcStatusError::Null(what))) => {
            set_error(format!("null pointer passed as {what}"));
            GcStatus::NullPointer
        }
        Ok(Err(GcStatusError::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            GcStatus::Panic
        }
    }
}

enum GcStatusError {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for GcStatusError {
    fn from(e: Error) -> Self {
        GcStatusError::Lib(e)
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, GcStatusError> {
    // SAFETY: caller guarantees p is null or valid for writes.
    unsafe { p.as_mut() }.ok_or(GcStatusError::Null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, GcStatusError> {
    // SAFETY: caller guarantees p is null or a live handle.
    unsafe { p.as_ref() }.ok_or(GcStatusError::Null(what))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).expect("library strings contain no NUL").into_raw()
}

fn class_to_c(c: NumberClass) -> GcNumberClass {
    match c {
        NumberClass::Cyclic => GcNumberClass::Cyclic,
        NumberClass::StrictlyAbelian => GcNumberClass::StrictlyAbelian,
        NumberClass::StrictlyNilpotent => GcNumberClass::StrictlyNilpotent,
        NumberClass::NotNilpotent => GcNumberClass::NotNilpotent,
    }
}

fn family_from_c(f: GcFamily) -> Family {
    match f {
        GcFamily::UpperC => Family::UpperC,
        GcFamily::UpperD => Family::UpperD,
        GcFamily::LowerC => Family::LowerC,
        GcFamily::LowerB => Family::LowerB,
        GcFamily::LowerD => Family::LowerD,
    }
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes of writes.
#[no_mangle]
pub unsafe extern "C" fn gc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            // SAFETY: buf has room for len bytes and n < len.
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn gc_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: s was produced by CString::into_raw.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Classifies n ≥ 1.
///
/// # Safety
/// `class_out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_classify(n: u64, class_out: *mut GcNumberClass) -> GcStatus {
    guard(|| {
        let o = unsafe { out(class_out, "class_out") }?;
        *o = class_to_c(arithmetic::classify(&arithmetic::factorize_u64(n)?));
        Ok(())
    })
}

/// φ(n) for n ≥ 1.
///
/// # Safety
/// `phi_out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_euler_phi(n: u64, phi_out: *mut u64) -> GcStatus {
    guard(|| {
        let o = unsafe { out(phi_out, "phi_out") }?;
        *o = arithmetic::euler_phi(&arithmetic::factorize_u64(n)?);
        Ok(())
    })
}

/// ψ(n) as a decimal string; free it with [`gc_string_free`].
///
/// # Safety
/// `psi_out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_psi_string(n: u64, psi_out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        let o = unsafe { out(psi_out, "psi_out") }?;
        *o = into_c_string(arithmetic::psi_exact(&arithmetic::factorize_u64(n)?).to_string());
        Ok(())
    })
}

/// Builds a smallest-prime-factor table for 2..=limit.
///
/// # Safety
/// `table_out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_spf_new(limit: u64, table_out: *mut *mut GcSpfTable) -> GcStatus {
    guard(|| {
        let o = unsafe { out(table_out, "table_out") }?;
        *o = Box::into_raw(Box::new(GcSpfTable(arithmetic::build_spf(limit)?)));
        Ok(())
    })
}

/// # Safety
/// `table` must be a live handle and `spf_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_spf_smallest_factor(
    table: *const GcSpfTable,
    n: u64,
    spf_out: *mut u64,
) -> GcStatus {
    guard(|| {
        let t = unsafe { handle(table, "table") }?;
        let o = unsafe { out(spf_out, "spf_out") }?;
        *o = t.0.smallest_factor(n).ok_or_else(|| {
            Error::Domain(format!("n = {n} outside [2, {}]", t.0.limit()))
        })?;
        Ok(())
    })
}

/// Classifies n ≤ the table limit using the table for factorization.
///
/// # Safety
/// `table` must be a live handle and `class_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_spf_classify(
    table: *const GcSpfTable,
    n: u64,
    class_out: *mut GcNumberClass,
) -> GcStatus {
    guard(|| {
        let t = unsafe { handle(table, "table") }?;
        let o = unsafe { out(class_out, "class_out") }?;
        *o = class_to_c(arithmetic::classify(&arithmetic::factorize(n, &t.0)?));
        Ok(())
    })
}

/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gc_spf_free(table: *mut GcSpfTable) {
    if !table.is_null() {
        // SAFETY: table came from Box::into_raw in gc_spf_new.
        drop(unsafe { Box::from_raw(table) });
    }
}

/// Class counts over [1, limit]. `threads` = 0 uses every processor;
/// the result does not depend on it.
///
/// # Safety
/// `counts_out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_count(limit: u64, threads: u32, counts_out: *mut GcClassCounts) -> GcStatus {
    guard(|| {
        let o = unsafe { out(counts_out, "counts_out") }?;
        let config = CensusConfig {
            execution: Execution::Parallel { threads: (threads > 0).then_some(threads as usize) },
            ..CensusConfig::default()
        };
        let rows = census::census_collect(limit, &[limit], None, &config)?;
        let c = rows.last().expect("limit is always a checkpoint").counts;
        *o = GcClassCounts {
            cyclic: c.cyclic,
            strictly_abelian: c.strictly_abelian,
            strictly_nilpotent: c.strictly_nilpotent,
            not_nilpotent: c.not_nilpotent,
            total: c.total,
        };
        Ok(())
    })
}

/// Computes one coefficient family to `order`.
///
/// # Safety
/// `series_out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_series_new(family: GcFamily, order: u32, series_out: *mut *mut GcSeries) -> GcStatus {
    guard(|| {
        let o = unsafe { out(series_out, "series_out") }?;
        let s = family_from_c(family).coefficients(order as usize)?;
        *o = Box::into_raw(Box::new(GcSeries(s)));
        Ok(())
    })
}

/// # Safety
/// `series` must be a live handle and `order_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_series_order(series: *const GcSeries, order_out: *mut u32) -> GcStatus {
    guard(|| {
        let s = unsafe { handle(series, "series") }?;
        *unsafe { out(order_out, "order_out") }? = s.0.order() as u32;
        Ok(())
    })
}

fn coeff_index(s: &GcSeries, k: u32) -> Result<usize, GcStatusError> {
    let k = k as usize;
    if k > s.0.order() {
        return Err(Error::Domain(format!("index {k} beyond order {}", s.0.order())).into());
    }
    Ok(k)
}

/// Coefficient k in canonical symbolic form; free with [`gc_string_free`].
///
/// # Safety
/// `series` must be a live handle and `text_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_series_symbolic(series: *const GcSeries, k: u32, text_out: *mut *mut c_char) -> GcStatus {
    guard(|| {
        let s = unsafe { handle(series, "series") }?;
        let o = unsafe { out(text_out, "text_out") }?;
        *o = into_c_string(s.0.coeff(coeff_index(s, k)?).to_string());
        Ok(())
    })
}

/// Coefficient k to `digits` significant digits (at most 50).
///
/// # Safety
/// `series` must be a live handle and `text_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_series_numeric(
    series: *const GcSeries,
    k: u32,
    digits: u32,
    text_out: *mut *mut c_char,
) -> GcStatus {
    guard(|| {
        let s = unsafe { handle(series, "series") }?;
        let o = unsafe { out(text_out, "text_out") }?;
        let idx = coeff_index(s, k)?;
        let ctx = NumericContext::new(digits)?;
        *o = into_c_string(ctx.eval(s.0.coeff(idx))?.to_string_sig(digits as usize));
        Ok(())
    })
}

/// # Safety
/// `series` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gc_series_free(series: *mut GcSeries) {
    if !series.is_null() {
        // SAFETY: series came from Box::into_raw in gc_series_new.
        drop(unsafe { Box::from_raw(series) });
    }
}

/// Truncated expansion at x. Pass NaN for `synthetic_l` to use log log log x.
///
/// # Safety
/// `value_out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_estimate(
    which: GcEstimate,
    x: f64,
    order: u32,
    synthetic_l: f64,
    value_out: *mut f64,
) -> GcStatus {
    guard(|| {
        let o = unsafe { out(value_out, "value_out") }?;
        let which = match which {
            GcEstimate::Cyclic => Which::Cyclic,
            GcEstimate::StrictlyAbelian => Which::StrictlyAbelian,
            GcEstimate::StrictlyNilpotent => Which::StrictlyNilpotent,
        };
        let mut p = EstimateParams::new(x, order as usize);
        if !synthetic_l.is_nan() {
            p = p.with_synthetic_l(synthetic_l);
        }
        *o = asymptotics::estimate(which, &p)?;
        Ok(())
    })
}

/// Γ^{(k)}(s) for k ≤ 12 and s ∈ {1, 2}, by quadrature.
///
/// # Safety
/// `value_out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gc_gamma_derivative(k: u32, s: u32, value_out: *mut f64) -> GcStatus {
    guard(|| {
        let o = unsafe { out(value_out, "value_out") }?;
        if !(1..=2).contains(&s) {
            return Err(Error::Domain(format!("s = {s}; only 1 and 2 are supported")).into());
        }
        *o = quadrature::gamma_derivative_quadrature(k as usize, s)?;
        Ok(())
    })
}
