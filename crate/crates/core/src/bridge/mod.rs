//! Out-of-process classifiers over a newline-delimited JSON protocol.
//!
//! The client spawns a child process, reads its `hello`, checks it against
//! the expected schema and then sends one request per classification. See
//! [`wire`] for the line formats.

mod client;
mod server;
mod transcript;
pub mod wire;

pub use client::BridgeClassifier;
pub use server::{serve, ServeEnd, ServeOptions};
pub use transcript::{parse_transcript, replay, Direction, ReplayStats, Transcript};

use std::path::PathBuf;

use crate::classifiers::Executor;
use crate::space::SpaceSchema;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RestartPolicy {
    #[default]
    Never,
    /// Restart a crashed child and retry the request, at most
    /// `max_restarts` times over the executor's life.
    OnCrash { max_restarts: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeConfig {
    pub program: String,
    pub args: Vec<String>,
    pub env: Vec<(String, String)>,
    pub handshake_timeout_ms: u64,
    pub request_timeout_ms: u64,
    pub restart: RestartPolicy,
    /// Log every protocol line here.
    pub transcript: Option<PathBuf>,
}

impl BridgeConfig {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        BridgeConfig {
            program: program.into(),
            args,
            env: Vec::new(),
            handshake_timeout_ms: 5_000,
            request_timeout_ms: 10_000,
            restart: RestartPolicy::Never,
            transcript: None,
        }
    }

    /// Splits `command` on whitespace. No quoting is supported.
    pub fn from_command_line(command: &str) -> Result<Self, BridgeError> {
        let mut words = command.split_whitespace().map(str::to_string);
        let program = words.next().ok_or_else(|| BridgeError::BadConfig("empty bridge command".into()))?;
        Ok(BridgeConfig::new(program, words.collect()))
    }

    fn check(&self) -> Result<(), BridgeError> {
        if self.program.is_empty() {
            return Err(BridgeError::BadConfig("empty program".into()));
        }
        if self.handshake_timeout_ms == 0 || self.request_timeout_ms == 0 {
            return Err(BridgeError::BadConfig("timeouts must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BridgeError {
    #[error("cannot start classifier: {0}")]
    Spawn(String),
    #[error("no hello within {ms} ms")]
    HandshakeTimeout { ms: u64 },
    #[error("handshake failed: {0}")]
    Handshake(String),
    #[error("classifier declares {declared} features, schema has {expected}")]
    SchemaMismatch { expected: usize, declared: usize },
    #[error("feature {feature}: classifier declares {declared}, schema has {expected}")]
    KindMismatch { feature: usize, expected: String, declared: String },
    #[error("classifier exited before the handshake ({0})")]
    ChildExited(String),
    #[error("io: {0}")]
    Io(String),
    #[error("replay mismatch: {0}")]
    Replay(String),
    #[error("bad bridge configuration: {0}")]
    BadConfig(String),
}

/// Starts a bridged classifier and wraps it in an [`Executor`].
pub fn spawn(cfg: &BridgeConfig, schema: SpaceSchema) -> Result<Executor, BridgeError> {
    Ok(Executor::new(Box::new(BridgeClassifier::spawn(cfg, schema)?)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn command_line_split() {
        let c = BridgeConfig::from_command_line("python3 -m zoo  sin2").unwrap();
        assert_eq!(c.program, "python3");
        assert_eq!(c.args, vec!["-m", "zoo", "sin2"]);
        assert!(BridgeConfig::from_command_line("  ").is_err());
    }

    #[test]
    fn missing_program_is_a_spawn_error() {
        let cfg = BridgeConfig::new("/nonexistent/classifier", vec![]);
        let r = spawn(&cfg, crate::classifiers::subject_schema());
        assert!(matches!(r, Err(BridgeError::Spawn(_))));
    }

    #[test]
    fn zero_timeout_rejected() {
        let mut cfg = BridgeConfig::new("true", vec![]);
        cfg.request_timeout_ms = 0;
        assert!(matches!(spawn(&cfg, crate::classifiers::subject_schema()), Err(BridgeError::BadConfig(_))));
    }

    #[test]
    fn early_exit_is_reported() {
        let cfg = BridgeConfig::new("true", vec![]);
        assert!(matches!(spawn(&cfg, crate::classifiers::subject_schema()), Err(BridgeError::ChildExited(_))));
    }
}
