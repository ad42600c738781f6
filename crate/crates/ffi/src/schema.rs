use std::ffi::c_char;

use paretoprobe::classifiers::subject_schema;
use paretoprobe::morphisms::{apply_composition, plan_path, MorphError};
use paretoprobe::space::{distance, Point, SpaceError, SpaceSchema};

use crate::error::{guard, Failure, PpStatus};
use crate::{out_string, str_arg, write_handle, write_out};

/// Input space: an ordered list of typed features.
pub struct PpSchema {
    pub(crate) inner: SpaceSchema,
}

impl From<SpaceError> for Failure {
    fn from(e: SpaceError) -> Self {
        let status = match e {
            SpaceError::InvalidPoint(_) => PpStatus::InvalidPoint,
            SpaceError::Io(_) => PpStatus::Io,
            _ => PpStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<MorphError> for Failure {
    fn from(e: MorphError) -> Self {
        let status = match e {
            MorphError::InvalidPoint(_) => PpStatus::InvalidPoint,
            _ => PpStatus::InvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

/// # Safety
/// `schema` must be null or a live handle from this library.
pub(crate) unsafe fn schema_ref<'a>(schema: *const PpSchema) -> Result<&'a SpaceSchema, Failure> {
    // SAFETY: live handle per the caller's contract.
    unsafe { schema.as_ref() }.map(|s| &s.inner).ok_or_else(|| Failure::null("schema"))
}

/// # Safety
/// `p` must be null or a NUL-terminated string.
pub(crate) unsafe fn point_arg(schema: &SpaceSchema, p: *const c_char, what: &str) -> Result<Point, Failure> {
    // SAFETY: forwarded caller contract.
    let text = unsafe { str_arg(p, what) }?;
    Point::parse_json(schema, text).map_err(|e| Failure::new(PpStatus::InvalidPoint, format!("{what}: {e}")))
}

/// Parses a schema document such as
/// `{"features":[{"name":"x","kind":"real","lo":0,"hi":1,"step":0.1}]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_schema_from_json(json: *const c_char, out: *mut *mut PpSchema) -> PpStatus {
    guard(|| {
        // SAFETY: caller contract.
        let text = unsafe { str_arg(json, "json") }?;
        let inner = SpaceSchema::from_json(text)?;
        // SAFETY: caller contract.
        unsafe { write_handle(out, PpSchema { inner }, "out") }
    })
}

/// The two-feature space shared by the built-in subjects.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_subject_schema(out: *mut *mut PpSchema) -> PpStatus {
    guard(|| {
        let inner = subject_schema();
        // SAFETY: caller contract.
        unsafe { write_handle(out, PpSchema { inner }, "out") }
    })
}

/// Releases a schema. Null is ignored.
///
/// # Safety
/// `schema` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pp_schema_free(schema: *mut PpSchema) {
    let _ = std::panic::catch_unwind(|| {
        if !schema.is_null() {
            // SAFETY: created by `Box::into_raw` in this library.
            drop(unsafe { Box::from_raw(schema) });
        }
    });
}

/// Number of features.
///
/// # Safety
/// `schema` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_schema_len(schema: *const PpSchema, out: *mut usize) -> PpStatus {
    guard(|| {
        // SAFETY: caller contract.
        let s = unsafe { schema_ref(schema) }?;
        // SAFETY: caller contract.
        unsafe { write_out(out, s.len(), "out") }
    })
}

/// Distance between two points of `schema`.
///
/// # Safety
/// `schema` must be a live handle; `x` and `y` NUL-terminated strings;
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_distance(schema: *const PpSchema, x: *const c_char, y: *const c_char, out: *mut f64) -> PpStatus {
    guard(|| {
        // SAFETY: caller contract.
        let s = unsafe { schema_ref(schema) }?;
        // SAFETY: caller contract.
        let (x, y) = unsafe { (point_arg(s, x, "x")?, point_arg(s, y, "y")?) };
        let d = distance(s, &x, &y)?;
        // SAFETY: caller contract.
        unsafe { write_out(out, d, "out") }
    })
}

/// Plans a composition of traversals and midpoints from `a` to within
/// `delta` of `b`. Writes its text form (e.g. `U0 U0 M M`) to `out_text`
/// and the remaining distance to `out_residual`.
///
/// # Safety
/// `schema` must be a live handle; `a` and `b` NUL-terminated strings;
/// `out_text` and `out_residual` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_plan_path(
    schema: *const PpSchema,
    a: *const c_char,
    b: *const c_char,
    delta: f64,
    out_text: *mut *mut c_char,
    out_residual: *mut f64,
) -> PpStatus {
    guard(|| {
        if out_text.is_null() || out_residual.is_null() {
            return Err(Failure::null("out_text or out_residual"));
        }
        // SAFETY: caller contract.
        let s = unsafe { schema_ref(schema) }?;
        // SAFETY: caller contract.
        let (a, b) = unsafe { (point_arg(s, a, "a")?, point_arg(s, b, "b")?) };
        let c = plan_path(s, &a, &b, delta)?;
        let end = apply_composition(s, &c, &a)?;
        let residual = distance(s, &end, &b)?;
        let text = out_string(c.to_string())?;
        // SAFETY: both checked non-null above; writable per caller contract.
        unsafe {
            out_text.write(text);
            out_residual.write(residual);
        }
        Ok(())
    })
}
