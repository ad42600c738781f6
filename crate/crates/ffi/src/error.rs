use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PpStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Malformed JSON, schema, traversal or option value.
    InvalidArgument = 2,
    /// A point does not belong to the schema.
    InvalidPoint = 3,
    /// The classifier failed, crashed or timed out.
    ExecutionFailed = 4,
    Io = 5,
    /// A panic was caught at the boundary. The library state is intact but
    /// the call had no effect.
    Panic = 6,
}

pub(crate) struct Failure {
    pub status: PpStatus,
    pub message: String,
}

impl Failure {
    pub fn new(status: PpStatus, message: impl Into<String>) -> Self {
        Failure { status, message: message.into() }
    }

    pub fn null(what: &str) -> Self {
        Failure::new(PpStatus::NullArgument, format!("{what} is null"))
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Failure::new(PpStatus::InvalidArgument, message)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

/// Runs `f`, converting failures and panics into a status code and the
/// thread's last error.
pub(crate) fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PpStatus::Ok,
        Ok(Err(failure)) => {
            set_last_error(&failure.message);
            failure.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| payload.downcast_ref::<&str>().copied())
                .unwrap_or("unknown panic");
            set_last_error(&format!("panic: {msg}"));
            PpStatus::Panic
        }
    }
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
