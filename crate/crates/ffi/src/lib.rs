//! C ABI for entropy-forge.
//!
//! Objects cross the boundary as opaque handles created by `ef_*_new` style
//! constructors and released with the matching `ef_*_free`. Every fallible
//! function returns an [`EfStatus`]; on failure a message describing the
//! error is available from [`ef_last_error_message`] on the same thread.
//! Structured results (reports) are returned as JSON strings owned by the
//! library and released with [`ef_string_free`].
//!
//! Configuration arguments are JSON objects with the same fields as the
//! corresponding Rust structs; a null pointer selects the defaults.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use entropy_forge::apps::{draw_bernoulli, draw_uniform, RandomSource};
use entropy_forge::device::DeviceParams;
use entropy_forge::extraction::{ExtractionParams, SymbolStream};
use entropy_forge::formats::{read_stream, write_stream};
use entropy_forge::pipeline::simulate_symbols;
use entropy_forge::sp90b::{assess, min_entropy, AssessmentConfig, Dataset, HealthMonitor};
use entropy_forge::stats::{shannon_entropy, SymbolHistogram};
use entropy_forge::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parameter = 3,
    InsufficientData = 4,
    Overflow = 5,
    Estimation = 6,
    Exhausted = 7,
    Validation = 8,
    Unsupported = 9,
    NonConvergence = 10,
    Integration = 11,
    Format = 12,
    Io = 13,
    Json = 14,
    Panic = 15,
}

impl From<&Error> for EfStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Parameter(_) => EfStatus::Parameter,
            Error::InsufficientData { .. } => EfStatus::InsufficientData,
            Error::Overflow(_) => EfStatus::Overflow,
            Error::Estimation(_) => EfStatus::Estimation,
            Error::Exhausted { .. } => EfStatus::Exhausted,
            Error::Validation(_) => EfStatus::Validation,
            Error::Unsupported(_) => EfStatus::Unsupported,
            Error::NonConvergence { .. } => EfStatus::NonConvergence,
            Error::Integration { .. } => EfStatus::Integration,
            Error::Format { .. } => EfStatus::Format,
            Error::Io { .. } => EfStatus::Io,
            Error::Json(_) => EfStatus::Json,
        }
    }
}

/// Symbol stream handle.
pub struct EfStream(SymbolStream);

/// Random bit source handle.
pub struct EfRandomSource(RandomSource);

/// Continuous health monitor handle.
pub struct EfHealthMonitor(HealthMonitor);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(EfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(EfStatus::from(&e), e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure(EfStatus::Json, e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> EfStatus {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => EfStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            EfStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(EfStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(EfStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn json_arg<T: serde::de::DeserializeOwned + Default>(
    p: *const c_char,
    what: &str,
) -> FfiResult<T> {
    if p.is_null() {
        return Ok(T::default());
    }
    Ok(serde_json::from_str(str_arg(p, what)?)?)
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> FfiResult<()> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_json<T: serde::Serialize>(out: *mut *mut c_char, value: &T) -> FfiResult<()> {
    let s = serde_json::to_string(value)?;
    let c = CString::new(s).map_err(|e| Failure(EfStatus::Json, e.to_string()))?;
    put(out, c.into_raw(), "out")
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn ef_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ef_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn ef_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a stream from `len` symbols of width `n` bits.
///
/// # Safety
/// `symbols` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ef_stream_from_symbols(
    n: u8,
    symbols: *const u16,
    len: usize,
    out: *mut *mut EfStream,
) -> EfStatus {
    guard(|| {
        if symbols.is_null() && len > 0 {
            return Err(null("symbols"));
        }
        let data = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(symbols, len).to_vec()
        };
        let stream = SymbolStream::new(n, data)?;
        put(out, Box::into_raw(Box::new(EfStream(stream))), "out")
    })
}

/// Simulates the device and extracts exactly `count` symbols.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ef_stream_simulate(
    device_json: *const c_char,
    extraction_json: *const c_char,
    count: usize,
    out: *mut *mut EfStream,
) -> EfStatus {
    guard(|| {
        let device: DeviceParams = json_arg(device_json, "device_json")?;
        let extraction: ExtractionParams = json_arg(extraction_json, "extraction_json")?;
        let (stream, _) = simulate_symbols(&device, &extraction, count)?;
        put(out, Box::into_raw(Box::new(EfStream(stream))), "out")
    })
}

/// Reads a packed stream file and its sidecar.
///
/// # Safety
/// `path` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ef_stream_read(path: *const c_char, out: *mut *mut EfStream) -> EfStatus {
    guard(|| {
        let stream = read_stream(std::path::Path::new(str_arg(path, "path")?))?;
        put(out, Box::into_raw(Box::new(EfStream(stream))), "out")
    })
}

/// Writes a stream as a packed file plus sidecar.
///
/// # Safety
/// `stream` must be a live handle; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ef_stream_write(stream: *const EfStream, path: *const c_char) -> EfStatus {
    guard(|| {
        let s = handle(stream, "stream")?;
        write_stream(std::path::Path::new(str_arg(path, "path")?), &s.0)?;
        Ok(())
    })
}

/// Number of symbols in the stream; 0 for null.
///
/// # Safety
/// `stream` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ef_stream_len(stream: *const EfStream) -> usize {
    stream.as_ref().map_or(0, |s| s.0.len())
}

/// Symbol width in bits; 0 for null.
///
/// # Safety
/// `stream` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ef_stream_bits(stream: *const EfStream) -> u8 {
    stream.as_ref().map_or(0, |s| s.0.n)
}

/// Copies up to `cap` symbols into `buf` and stores the number copied.
///
/// # Safety
/// `buf` must have room for `cap` values; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ef_stream_copy_symbols(
    stream: *const EfStream,
    buf: *mut u16,
    cap: usize,
    written: *mut usize,
) -> EfStatus {
    guard(|| {
        let s = handle(stream, "stream")?;
        let k = s.0.len().min(cap);
        if k > 0 {
            if buf.is_null() {
                return Err(null("buf"));
            }
            ptr::copy_nonoverlapping(s.0.symbols.as_ptr(), buf, k);
        }
        put(written, k, "written")
    })
}

/// # Safety
/// `stream` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ef_stream_free(stream: *mut EfStream) {
    if !stream.is_null() {
        drop(Box::from_raw(stream));
    }
}

/// Shannon entropy of the symbol histogram, bits per symbol.
///
/// # Safety
/// `stream` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ef_shannon_entropy(stream: *const EfStream, out: *mut f64) -> EfStatus {
    guard(|| {
        let s = handle(stream, "stream")?;
        let report = shannon_entropy(&SymbolHistogram::from_stream(&s.0))?;
        put(out, report.shannon_bits_per_symbol, "out")
    })
}

/// Most-common-value min-entropy, bits per symbol.
///
/// # Safety
/// `stream` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ef_min_entropy(stream: *const EfStream, out: *mut f64) -> EfStatus {
    guard(|| {
        let s = handle(stream, "stream")?;
        let estimate = min_entropy(&Dataset::from_stream(&s.0))?;
        put(out, estimate.min_entropy, "out")
    })
}

/// Runs the IID assessment and returns the report as JSON.
///
/// # Safety
/// `stream` must be a live handle; `config_json` null or NUL-terminated;
/// `report_json` writable. Free the report with [`ef_string_free`].
#[no_mangle]
pub unsafe extern "C" fn ef_assess(
    stream: *const EfStream,
    config_json: *const c_char,
    report_json: *mut *mut c_char,
) -> EfStatus {
    guard(|| {
        let s = handle(stream, "stream")?;
        let config: AssessmentConfig = json_arg(config_json, "config_json")?;
        let report = assess(&Dataset::from_stream(&s.0), None, &config)?;
        put_json(report_json, &report)
    })
}

/// Monitor for a source claiming `h_min` bits per symbol.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ef_health_new(
    h_min: f64,
    window: usize,
    alpha: f64,
    out: *mut *mut EfHealthMonitor,
) -> EfStatus {
    guard(|| {
        let m = HealthMonitor::new(h_min, window, alpha)?;
        put(out, Box::into_raw(Box::new(EfHealthMonitor(m))), "out")
    })
}

/// Feeds `len` symbols and stores the number of new alarms from both tests.
///
/// # Safety
/// `monitor` must be a live handle; `symbols` must hold `len` values;
/// `alarms` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ef_health_feed(
    monitor: *mut EfHealthMonitor,
    symbols: *const u16,
    len: usize,
    alarms: *mut u64,
) -> EfStatus {
    guard(|| {
        let m = handle_mut(monitor, "monitor")?;
        if symbols.is_null() && len > 0 {
            return Err(null("symbols"));
        }
        let before = m.0.report();
        let before = before.repetition_alarms.len() + before.proportion_alarms.len();
        if len > 0 {
            m.0.feed_all(std::slice::from_raw_parts(symbols, len));
        }
        let after = m.0.report();
        let after = after.repetition_alarms.len() + after.proportion_alarms.len();
        if !alarms.is_null() {
            alarms.write((after - before) as u64);
        }
        Ok(())
    })
}

/// Cutoffs and alarm positions so far, as JSON.
///
/// # Safety
/// `monitor` must be a live handle; `report_json` writable.
#[no_mangle]
pub unsafe extern "C" fn ef_health_report(
    monitor: *const EfHealthMonitor,
    report_json: *mut *mut c_char,
) -> EfStatus {
    guard(|| {
        let m = handle(monitor, "monitor")?;
        put_json(report_json, &m.0.report())
    })
}

/// # Safety
/// `monitor` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ef_health_free(monitor: *mut EfHealthMonitor) {
    if !monitor.is_null() {
        drop(Box::from_raw(monitor));
    }
}

/// Source that replays the packed bits of a stream.
///
/// # Safety
/// `stream` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ef_source_from_stream(
    stream: *const EfStream,
    out: *mut *mut EfRandomSource,
) -> EfStatus {
    guard(|| {
        let s = handle(stream, "stream")?;
        put(
            out,
            Box::into_raw(Box::new(EfRandomSource(RandomSource::from_stream(&s.0)))),
            "out",
        )
    })
}

/// Source over `len` raw bytes, most significant bit first.
///
/// # Safety
/// `bytes` must hold `len` values; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ef_source_from_bytes(
    bytes: *const u8,
    len: usize,
    out: *mut *mut EfRandomSource,
) -> EfStatus {
    guard(|| {
        if bytes.is_null() && len > 0 {
            return Err(null("bytes"));
        }
        let data = if len == 0 {
            Vec::new()
        } else {
            std::slice::from_raw_parts(bytes, len).to_vec()
        };
        put(
            out,
            Box::into_raw(Box::new(EfRandomSource(RandomSource::from_bytes(data)))),
            "out",
        )
    })
}

/// Uniform integer in `[0, m)`.
///
/// # Safety
/// `source` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ef_draw_uniform(
    source: *mut EfRandomSource,
    m: u64,
    out: *mut u64,
) -> EfStatus {
    guard(|| {
        let src = handle_mut(source, "source")?;
        let v = draw_uniform(&mut src.0, m)?;
        put(out, v, "out")
    })
}

/// Bernoulli draw with success probability `p`; stores 1 or 0.
///
/// # Safety
/// `source` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ef_draw_bernoulli(
    source: *mut EfRandomSource,
    p: f64,
    out: *mut u8,
) -> EfStatus {
    guard(|| {
        let src = handle_mut(source, "source")?;
        let v = draw_bernoulli(&mut src.0, p)?;
        put(out, u8::from(v), "out")
    })
}

/// Bits consumed so far; 0 for null.
///
/// # Safety
/// `source` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ef_source_consumed(source: *const EfRandomSource) -> u64 {
    source.as_ref().map_or(0, |s| s.0.consumed())
}

/// # Safety
/// `source` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ef_source_free(source: *mut EfRandomSource) {
    if !source.is_null() {
        drop(Box::from_raw(source));
    }
}
