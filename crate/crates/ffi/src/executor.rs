use std::ffi::{c_char, c_void, CStr, CString};

use paretoprobe::bridge::{self, BridgeConfig, BridgeError};
use paretoprobe::classifiers::{make_subject, Classifier, ExecError, Executor, Label, ThreadSafety};
use paretoprobe::space::{Point, SpaceSchema};

use crate::error::{guard, Failure, PpStatus};
use crate::schema::{point_arg, schema_ref, PpSchema};
use crate::{out_string, str_arg, write_handle, write_out};

/// Size of the label buffer handed to a [`PpClassifyFn`], including the
/// terminating NUL.
pub const PP_LABEL_CAPACITY: usize = 256;

/// Classifier callback. Receives the point as a JSON array and writes a
/// NUL-terminated label of at most `label_capacity` bytes into `label`.
/// Returns 0 on success; any other value is reported as a failed call.
/// Calls never overlap, but may come from different threads.
pub type PpClassifyFn = Option<
    unsafe extern "C" fn(user_data: *mut c_void, point_json: *const c_char, label: *mut c_char, label_capacity: usize) -> i32,
>;

/// A classifier together with its execution counter.
pub struct PpExecutor {
    pub(crate) inner: Executor,
}

impl From<ExecError> for Failure {
    fn from(e: ExecError) -> Self {
        let status = match e {
            ExecError::InvalidPoint(_) => PpStatus::InvalidPoint,
            _ => PpStatus::ExecutionFailed,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<BridgeError> for Failure {
    fn from(e: BridgeError) -> Self {
        let status = match e {
            BridgeError::BadConfig(_) => PpStatus::InvalidArgument,
            BridgeError::Io(_) => PpStatus::Io,
            _ => PpStatus::ExecutionFailed,
        };
        Failure::new(status, e.to_string())
    }
}

struct CallbackClassifier {
    schema: SpaceSchema,
    f: unsafe extern "C" fn(*mut c_void, *const c_char, *mut c_char, usize) -> i32,
    user_data: *mut c_void,
}

// SAFETY: the executor is `Serial`, so calls are serialized; the caller
// promises `user_data` may be used from any thread under that condition.
unsafe impl Send for CallbackClassifier {}
// SAFETY: as above.
unsafe impl Sync for CallbackClassifier {}

impl Classifier for CallbackClassifier {
    fn schema(&self) -> &SpaceSchema {
        &self.schema
    }

    fn classify(&self, p: &Point) -> Result<Label, ExecError> {
        let json = CString::new(p.to_json().to_string()).expect("JSON has no NUL bytes");
        let mut buf = vec![0u8; PP_LABEL_CAPACITY];
        // SAFETY: `json` and `buf` outlive the call; the callback contract
        // limits writes to `PP_LABEL_CAPACITY` bytes.
        let rc = unsafe { (self.f)(self.user_data, json.as_ptr(), buf.as_mut_ptr().cast(), buf.len()) };
        if rc != 0 {
            return Err(ExecError::Callback(format!("callback returned {rc}")));
        }
        let label = CStr::from_bytes_until_nul(&buf)
            .map_err(|_| ExecError::Callback("label is not NUL-terminated".into()))?
            .to_str()
            .map_err(|_| ExecError::Callback("label is not valid UTF-8".into()))?;
        Ok(Label::new(label))
    }

    fn thread_safety(&self) -> ThreadSafety {
        ThreadSafety::Serial
    }

    fn name(&self) -> &str {
        "callback"
    }
}

/// # Safety
/// `exec` must be null or a live handle.
pub(crate) unsafe fn executor_ref<'a>(exec: *const PpExecutor) -> Result<&'a Executor, Failure> {
    // SAFETY: caller contract.
    unsafe { exec.as_ref() }.map(|e| &e.inner).ok_or_else(|| Failure::null("executor"))
}

/// Built-in subject by name, e.g. `"sin2"`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_executor_subject(name: *const c_char, out: *mut *mut PpExecutor) -> PpStatus {
    guard(|| {
        // SAFETY: caller contract.
        let name = unsafe { str_arg(name, "name") }?;
        let e = make_subject(name, &[]).map_err(|e| Failure::invalid(e.to_string()))?;
        // SAFETY: caller contract.
        unsafe { write_handle(out, PpExecutor { inner: e }, "out") }
    })
}

/// Executor over a C callback. The schema is copied.
///
/// # Safety
/// `schema` must be a live handle; `out` writable. `callback` and
/// `user_data` must stay valid until the executor is freed.
#[no_mangle]
pub unsafe extern "C" fn pp_executor_callback(
    schema: *const PpSchema,
    callback: PpClassifyFn,
    user_data: *mut c_void,
    out: *mut *mut PpExecutor,
) -> PpStatus {
    guard(|| {
        // SAFETY: caller contract.
        let s = unsafe { schema_ref(schema) }?;
        let f = callback.ok_or_else(|| Failure::null("callback"))?;
        let c = CallbackClassifier { schema: s.clone(), f, user_data };
        // SAFETY: caller contract.
        unsafe { write_handle(out, PpExecutor { inner: Executor::new(Box::new(c)) }, "out") }
    })
}

/// Classifier in a child process started from `command` (split on
/// whitespace) that speaks the line protocol.
///
/// # Safety
/// `command` must be a NUL-terminated string; `schema` a live handle; `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pp_executor_bridge(
    command: *const c_char,
    schema: *const PpSchema,
    out: *mut *mut PpExecutor,
) -> PpStatus {
    guard(|| {
        // SAFETY: caller contract.
        let command = unsafe { str_arg(command, "command") }?;
        // SAFETY: caller contract.
        let s = unsafe { schema_ref(schema) }?;
        let e = bridge::spawn(&BridgeConfig::from_command_line(command)?, s.clone())?;
        // SAFETY: caller contract.
        unsafe { write_handle(out, PpExecutor { inner: e }, "out") }
    })
}

/// Releases an executor, stopping any child process. Null is ignored.
///
/// # Safety
/// `exec` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pp_executor_free(exec: *mut PpExecutor) {
    let _ = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
        if !exec.is_null() {
            // SAFETY: created by `Box::into_raw` in this library.
            let e = unsafe { Box::from_raw(exec) };
            e.inner.shutdown();
        }
    }));
}

/// Classifies one point and writes its label.
///
/// # Safety
/// `exec` must be a live handle; `x` a NUL-terminated string; `out_label`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn pp_executor_classify(
    exec: *const PpExecutor,
    x: *const c_char,
    out_label: *mut *mut c_char,
) -> PpStatus {
    guard(|| {
        if out_label.is_null() {
            return Err(Failure::null("out_label"));
        }
        // SAFETY: caller contract.
        let e = unsafe { executor_ref(exec) }?;
        // SAFETY: caller contract.
        let p = unsafe { point_arg(e.schema(), x, "x") }?;
        let label = e.classify(&p)?;
        let s = out_string(label.as_str().to_string())?;
        // SAFETY: checked non-null above.
        unsafe { out_label.write(s) };
        Ok(())
    })
}

/// Number of classifier executions so far.
///
/// # Safety
/// `exec` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_executor_executions(exec: *const PpExecutor, out: *mut u64) -> PpStatus {
    guard(|| {
        // SAFETY: caller contract.
        let e = unsafe { executor_ref(exec) }?;
        // SAFETY: caller contract.
        unsafe { write_out(out, e.executions(), "out") }
    })
}
