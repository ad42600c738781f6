//! Executors: classifiers wrapped with validation and execution counting.

mod subjects;

pub use subjects::{class_mass, make_subject, subject_schema, Subject, SubjectError, SubjectId};

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use serde::{Serialize, Serializer};

use crate::space::{validate_point, Point, SpaceSchema, Verdict};

/// Opaque class label, compared by equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Arc<str>);

impl Label {
    pub fn new(s: &str) -> Self {
        Label(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::new(s)
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s.into())
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

/// Whether `classify` may be called from several threads at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreadSafety {
    Serial,
    Concurrent,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExecError {
    #[error("invalid point: {0}")]
    InvalidPoint(Verdict),
    /// The classifier ran and reported a failure for this input.
    #[error("classifier error: {0}")]
    Remote(String),
    #[error("classifier process exited: {0}")]
    Crashed(String),
    #[error("classifier did not answer within {ms} ms")]
    Timeout { ms: u64 },
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("executor is closed")]
    Closed,
    #[error("io: {0}")]
    Io(String),
    #[error("callback failed: {0}")]
    Callback(String),
}

impl ExecError {
    /// Whether the classifier actually processed the input.
    fn counts_as_execution(&self) -> bool {
        matches!(self, ExecError::Remote(_))
    }
}

/// A classifier under test. Implementations must be deterministic and must
/// not cache: every call is one execution.
pub trait Classifier: Send + Sync {
    fn schema(&self) -> &SpaceSchema;

    /// Classifies a point already validated against `schema()`.
    fn classify(&self, p: &Point) -> Result<Label, ExecError>;

    fn thread_safety(&self) -> ThreadSafety {
        ThreadSafety::Concurrent
    }

    /// Every label the classifier can return, when known up front.
    fn labels(&self) -> Option<Vec<Label>> {
        None
    }

    /// Releases external resources. Must be idempotent.
    fn shutdown(&self) {}

    fn name(&self) -> &str;
}

/// Counts executions of a [`Classifier`] and serializes calls to `Serial`
/// ones.
pub struct Executor {
    inner: Box<dyn Classifier>,
    executions: AtomicU64,
    turn: Option<Mutex<()>>,
}

impl Executor {
    pub fn new(inner: Box<dyn Classifier>) -> Self {
        let turn = (inner.thread_safety() == ThreadSafety::Serial).then(|| Mutex::new(()));
        Executor {
            inner,
            executions: AtomicU64::new(0),
            turn,
        }
    }

    /// Executor over a plain function.
    pub fn from_fn<F>(name: &str, schema: SpaceSchema, safety: ThreadSafety, f: F) -> Self
    where
        F: Fn(&Point) -> Result<Label, ExecError> + Send + Sync + 'static,
    {
        Executor::new(Box::new(FnClassifier {
            name: name.to_string(),
            schema,
            safety,
            f,
        }))
    }

    /// Classifier that labels every point `label`.
    pub fn constant(schema: SpaceSchema, label: &str) -> Self {
        let label = Label::new(label);
        Executor::from_fn("constant", schema, ThreadSafety::Concurrent, move |_| Ok(label.clone()))
    }

    /// Validates `p`, runs the classifier and counts the execution. Invalid
    /// points are rejected without counting.
    pub fn classify(&self, p: &Point) -> Result<Label, ExecError> {
        let verdict = validate_point(self.inner.schema(), p);
        if !verdict.is_ok() {
            return Err(ExecError::InvalidPoint(verdict));
        }
        let result = {
            let _turn = self.turn.as_ref().map(|m| m.lock().unwrap_or_else(|e| e.into_inner()));
            self.inner.classify(p)
        };
        match &result {
            Ok(_) => {
                self.executions.fetch_add(1, Ordering::Relaxed);
            }
            Err(e) if e.counts_as_execution() => {
                self.executions.fetch_add(1, Ordering::Relaxed);
            }
            Err(_) => {}
        }
        result
    }

    pub fn executions(&self) -> u64 {
        self.executions.load(Ordering::Relaxed)
    }

    pub fn schema(&self) -> &SpaceSchema {
        self.inner.schema()
    }

    pub fn thread_safety(&self) -> ThreadSafety {
        self.inner.thread_safety()
    }

    pub fn name(&self) -> &str {
        self.inner.name()
    }

    pub fn labels(&self) -> Option<Vec<Label>> {
        self.inner.labels()
    }

    pub fn classifier(&self) -> &dyn Classifier {
        self.inner.as_ref()
    }

    pub fn shutdown(&self) {
        self.inner.shutdown();
    }
}

impl fmt::Debug for Executor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Executor")
            .field("name", &self.name())
            .field("executions", &self.executions())
            .field("thread_safety", &self.thread_safety())
            .finish()
    }
}

struct FnClassifier<F> {
    name: String,
    schema: SpaceSchema,
    safety: ThreadSafety,
    f: F,
}

impl<F> Classifier for FnClassifier<F>
where
    F: Fn(&Point) -> Result<Label, ExecError> + Send + Sync,
{
    fn schema(&self) -> &SpaceSchema {
        &self.schema
    }

    fn classify(&self, p: &Point) -> Result<Label, ExecError> {
        (self.f)(p)
    }

    fn thread_safety(&self) -> ThreadSafety {
        self.safety
    }

    fn name(&self) -> &str {
        &self.name
    }
}
