//! C interface to paretoprobe.
//!
//! Every function returns a [`PpStatus`]. On failure a description is
//! available from [`pp_last_error`] on the same thread. Handles are opaque
//! and owned by the caller, who releases them with the matching `_free`
//! function. Strings returned through `char **` out-parameters are released
//! with [`pp_string_free`].
//!
//! Points cross the boundary as JSON arrays, e.g. `[3.14, 0.5]` or
//! `["red", 4, 0.25]`.

mod error;
mod executor;
mod explore;
mod schema;

pub use error::{pp_last_error, PpStatus};
pub use executor::{
    pp_executor_bridge, pp_executor_callback, pp_executor_classify, pp_executor_executions, pp_executor_free,
    pp_executor_subject, PpClassifyFn, PpExecutor, PP_LABEL_CAPACITY,
};
pub use explore::{
    pp_explore, pp_explore_options_default, PpExploreOptions, PpExploreResult, PP_STRATEGY_DIRECTED_WALK,
    PP_STRATEGY_RANDOM_TARGET, PP_STRATEGY_RANDOM_WALK,
};
pub use schema::{pp_distance, pp_plan_path, pp_schema_free, pp_schema_from_json, pp_schema_len, pp_subject_schema, PpSchema};

use std::ffi::{c_char, CStr, CString};

use error::Failure;

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pp_string_free(s: *mut c_char) {
    let _ = std::panic::catch_unwind(|| {
        if !s.is_null() {
            // SAFETY: the caller passes a pointer produced by `CString::into_raw`.
            drop(unsafe { CString::from_raw(s) });
        }
    });
}

/// Borrows a NUL-terminated UTF-8 argument.
///
/// # Safety
/// `p` must be null or point to a NUL-terminated string that outlives `'a`.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    // SAFETY: non-null and NUL-terminated per the caller's contract.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure::invalid(format!("{what} is not valid UTF-8")))
}

/// Hands ownership of `s` to the caller.
fn out_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::invalid("result contains a NUL byte"))
}

/// Boxes `value` into a handle and writes it through `out`. Nothing is
/// allocated when `out` is null.
///
/// # Safety
/// `out` must be null or valid for writes of a pointer.
unsafe fn write_handle<T>(out: *mut *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null(what));
    }
    // SAFETY: non-null and writable per the caller's contract.
    unsafe { out.write(Box::into_raw(Box::new(value))) };
    Ok(())
}

/// Writes through an out-pointer after checking it.
///
/// # Safety
/// `out` must be null or valid for writes of `T`.
unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null(what));
    }
    // SAFETY: non-null and writable per the caller's contract.
    unsafe { out.write(value) };
    Ok(())
}
