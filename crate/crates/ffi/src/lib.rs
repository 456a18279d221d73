//! C ABI over `adamsext`.
//!
//! Handles are opaque pointers owned by the caller and released with the
//! matching `*_free`. Every fallible call returns an [`AdxStatus`]; on
//! failure `adx_last_error` describes what went wrong on this thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use adamsext::charts::{build_chart, ChartError, ExtChart, Format};
use adamsext::fixtures::Fixture;
use adamsext::modules::{parse_module, FdModule};
use adamsext::resolution::{resolve, Resolution, ResolutionError};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    /// The module violates the Adem relations.
    InvalidModule = 4,
    Io = 5,
    /// The two Ext computations disagreed.
    CrossCheck = 6,
    InvalidArgument = 7,
    Panic = 8,
}

/// Chart output formats for [`adx_chart_render`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdxFormat {
    Ascii = 0,
    Json = 1,
    Svg = 2,
}

impl From<AdxFormat> for Format {
    fn from(f: AdxFormat) -> Self {
        match f {
            AdxFormat::Ascii => Format::Ascii,
            AdxFormat::Json => Format::Json,
            AdxFormat::Svg => Format::Svg,
        }
    }
}

/// A finite module over the Steenrod algebra.
pub struct AdxModule(FdModule);

/// A minimal resolution of a module.
pub struct AdxResolution(Resolution);

/// An Adams E2 chart.
pub struct AdxChart(ExtChart);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn fail(status: AdxStatus, message: impl Into<String>) -> AdxStatus {
    set_error(message);
    status
}

fn guard(body: impl FnOnce() -> AdxStatus) -> AdxStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(AdxStatus::Panic, "internal panic"),
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, AdxStatus> {
    if p.is_null() {
        return Err(fail(AdxStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(AdxStatus::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, AdxStatus> {
    p.as_ref().ok_or_else(|| fail(AdxStatus::NullPointer, "null handle"))
}

fn resolution_status(e: &ResolutionError) -> AdxStatus {
    match e {
        ResolutionError::Io { .. } => AdxStatus::Io,
        _ => AdxStatus::Parse,
    }
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message for the last failed call on this thread, or NULL. Valid until
/// the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn adx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses module DSL text into `*out`.
///
/// # Safety
/// `src` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adx_module_parse(src: *const c_char, out: *mut *mut AdxModule) -> AdxStatus {
    guard(|| {
        if out.is_null() {
            return fail(AdxStatus::NullPointer, "null output pointer");
        }
        let src = tri!(text(src));
        match parse_module(src) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(AdxModule(m)));
                AdxStatus::Ok
            }
            Err(e) => fail(AdxStatus::Parse, e.to_string()),
        }
    })
}

/// Reads and parses a module file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adx_module_load(path: *const c_char, out: *mut *mut AdxModule) -> AdxStatus {
    guard(|| {
        if out.is_null() {
            return fail(AdxStatus::NullPointer, "null output pointer");
        }
        let path = tri!(text(path));
        let src = match std::fs::read_to_string(path) {
            Ok(s) => s,
            Err(e) => return fail(AdxStatus::Io, format!("{path}: {e}")),
        };
        match parse_module(&src) {
            Ok(m) => {
                *out = Box::into_raw(Box::new(AdxModule(m)));
                AdxStatus::Ok
            }
            Err(e) => fail(AdxStatus::Parse, format!("{path}: {e}")),
        }
    })
}

/// The cohomology of the sphere: one cell in degree 0.
#[no_mangle]
pub extern "C" fn adx_module_sphere() -> *mut AdxModule {
    Box::into_raw(Box::new(AdxModule(Fixture::Sphere.module())))
}

/// Number of Adem-relation violations.
///
/// # Safety
/// `m` must be a live module handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adx_module_violations(m: *const AdxModule, out: *mut usize) -> AdxStatus {
    guard(|| {
        let m = tri!(handle(m));
        if out.is_null() {
            return fail(AdxStatus::NullPointer, "null output pointer");
        }
        let violations = m.0.validate();
        if let Some(v) = violations.first() {
            set_error(v.to_string());
        }
        *out = violations.len();
        AdxStatus::Ok
    })
}

/// Total dimension over F2, or 0 for a null handle.
///
/// # Safety
/// `m` must be a live module handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn adx_module_dimension(m: *const AdxModule) -> usize {
    m.as_ref().map_or(0, |m| m.0.dimension())
}

/// # Safety
/// `m` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn adx_module_free(m: *mut AdxModule) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

fn valid(m: &AdxModule) -> Result<&FdModule, AdxStatus> {
    match m.0.validate().first() {
        None => Ok(&m.0),
        Some(v) => Err(fail(AdxStatus::InvalidModule, v.to_string())),
    }
}

/// Minimal resolution of `m` through homological degree `max_s` and
/// internal degree `max_t`.
///
/// # Safety
/// `m` must be a live module handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adx_resolve(
    m: *const AdxModule,
    max_s: u32,
    max_t: i32,
    out: *mut *mut AdxResolution,
) -> AdxStatus {
    guard(|| {
        let m = tri!(handle(m));
        if out.is_null() {
            return fail(AdxStatus::NullPointer, "null output pointer");
        }
        let m = tri!(valid(m));
        *out = Box::into_raw(Box::new(AdxResolution(resolve(m, max_s, max_t))));
        AdxStatus::Ok
    })
}

/// Dimension of Ext^{s,t}(M, F2).
///
/// # Safety
/// `r` must be a live resolution handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adx_resolution_ext_dim(r: *const AdxResolution, s: u32, t: i32, out: *mut usize) -> AdxStatus {
    guard(|| {
        let r = tri!(handle(r));
        if out.is_null() {
            return fail(AdxStatus::NullPointer, "null output pointer");
        }
        if s > r.0.max_s() || t > r.0.max_t() {
            return fail(AdxStatus::InvalidArgument, format!("({s}, {t}) is outside the computed range"));
        }
        *out = r.0.generators_in(s, t).len();
        AdxStatus::Ok
    })
}

/// Writes the resolution to `path`.
///
/// # Safety
/// `r` must be a live resolution handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn adx_resolution_save(r: *const AdxResolution, path: *const c_char) -> AdxStatus {
    guard(|| {
        let r = tri!(handle(r));
        let path = tri!(text(path));
        match r.0.save(Path::new(path)) {
            Ok(()) => AdxStatus::Ok,
            Err(e) => fail(resolution_status(&e), e.to_string()),
        }
    })
}

/// Reads a resolution written by [`adx_resolution_save`], checking its
/// checksum.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adx_resolution_load(path: *const c_char, out: *mut *mut AdxResolution) -> AdxStatus {
    guard(|| {
        if out.is_null() {
            return fail(AdxStatus::NullPointer, "null output pointer");
        }
        let path = tri!(text(path));
        match Resolution::load(Path::new(path)) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(AdxResolution(r)));
                AdxStatus::Ok
            }
            Err(e) => fail(resolution_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `r` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn adx_resolution_free(r: *mut AdxResolution) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Chart of Ext(M ⊗ DN, F2) for `s <= max_s` and normalized stems up to
/// `max_stem`. A NULL `n` means the sphere.
///
/// # Safety
/// `m` must be a live module handle, `n` a live handle or NULL, and `out`
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adx_chart_build(
    m: *const AdxModule,
    n: *const AdxModule,
    max_s: u32,
    max_stem: i32,
    out: *mut *mut AdxChart,
) -> AdxStatus {
    guard(|| {
        let m = tri!(valid(tri!(handle(m))));
        let sphere;
        let n = match n.as_ref() {
            Some(n) => tri!(valid(n)),
            None => {
                sphere = Fixture::Sphere.module();
                &sphere
            }
        };
        if out.is_null() {
            return fail(AdxStatus::NullPointer, "null output pointer");
        }
        if max_stem < 0 {
            return fail(AdxStatus::InvalidArgument, "max_stem must be non-negative");
        }
        match build_chart(m, n, max_s, max_stem) {
            Ok(chart) => {
                *out = Box::into_raw(Box::new(AdxChart(chart)));
                AdxStatus::Ok
            }
            Err(e @ ChartError::OracleDisagreement { .. }) => fail(AdxStatus::CrossCheck, e.to_string()),
            Err(e) => fail(AdxStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Offset from normalized stems to the stems of maps between the spaces.
///
/// # Safety
/// `c` must be a live chart handle or NULL (which gives 0).
#[no_mangle]
pub unsafe extern "C" fn adx_chart_shift(c: *const AdxChart) -> i32 {
    c.as_ref().map_or(0, |c| c.0.shift)
}

/// Number of classes at normalized `stem` and filtration `s`.
///
/// # Safety
/// `c` must be a live chart handle or NULL (which gives 0).
#[no_mangle]
pub unsafe extern "C" fn adx_chart_class_count(c: *const AdxChart, stem: i32, s: u32) -> usize {
    c.as_ref().map_or(0, |c| c.0.count(stem, s))
}

/// Number of classes in the whole chart.
///
/// # Safety
/// `c` must be a live chart handle or NULL (which gives 0).
#[no_mangle]
pub unsafe extern "C" fn adx_chart_total_classes(c: *const AdxChart) -> usize {
    c.as_ref().map_or(0, |c| c.0.classes.len())
}

/// Renders the chart into a newly allocated string, released with
/// [`adx_string_free`].
///
/// # Safety
/// `c` must be a live chart handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn adx_chart_render(c: *const AdxChart, format: AdxFormat, out: *mut *mut c_char) -> AdxStatus {
    guard(|| {
        let c = tri!(handle(c));
        if out.is_null() {
            return fail(AdxStatus::NullPointer, "null output pointer");
        }
        match CString::new(c.0.render(format.into())) {
            Ok(s) => {
                *out = s.into_raw();
                AdxStatus::Ok
            }
            Err(e) => fail(AdxStatus::InvalidUtf8, e.to_string()),
        }
    })
}

/// # Safety
/// `c` must come from this library and not be used afterwards. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn adx_chart_free(c: *mut AdxChart) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `s` must come from [`adx_chart_render`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn adx_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
