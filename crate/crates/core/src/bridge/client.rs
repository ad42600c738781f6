use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::atomic::{AtomicBool, AtomicU32, AtomicU64, Ordering};
use std::sync::mpsc;
use std::sync::{Arc, Mutex, MutexGuard};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use crate::classifiers::{Classifier, ExecError, Label, ThreadSafety};
use crate::space::{Point, SpaceSchema};

use super::transcript::{Direction, Transcript};
use super::wire::{self, Hello};
use super::{BridgeConfig, BridgeError, RestartPolicy};

/// How long `shutdown` waits for the child to exit after `bye`.
const EXIT_GRACE: Duration = Duration::from_secs(2);
/// How long a terminated session waits for its reader thread.
const READER_GRACE: Duration = Duration::from_millis(200);

type Reply = Result<Result<Label, String>, ExecError>;

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

#[derive(Default)]
struct Pending {
    waiting: HashMap<u64, mpsc::Sender<Reply>>,
    /// Set once the session can no longer answer.
    failure: Option<ExecError>,
}

impl Pending {
    fn fail(&mut self, e: ExecError) {
        if self.failure.is_none() {
            self.failure = Some(e.clone());
        }
        for (_, tx) in self.waiting.drain() {
            let _ = tx.send(Err(e.clone()));
        }
    }
}

/// One running child process.
struct Session {
    child: Mutex<Child>,
    stdin: Mutex<Option<ChildStdin>>,
    pending: Arc<Mutex<Pending>>,
    reader: Mutex<Option<JoinHandle<()>>>,
    hello: Hello,
    transcript: Option<Arc<Transcript>>,
}

impl Session {
    fn start(cfg: &BridgeConfig, schema: &SpaceSchema, transcript: Option<Arc<Transcript>>) -> Result<Self, BridgeError> {
        let mut child = Command::new(&cfg.program)
            .args(&cfg.args)
            .envs(cfg.env.iter().map(|(k, v)| (k, v)))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| BridgeError::Spawn(format!("{}: {e}", cfg.program)))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let pending = Arc::new(Mutex::new(Pending::default()));
        let (hello_tx, hello_rx) = mpsc::channel::<String>();
        let reader = {
            let pending = Arc::clone(&pending);
            let transcript = transcript.clone();
            std::thread::spawn(move || read_loop(BufReader::new(stdout), hello_tx, &pending, transcript.as_deref()))
        };
        let mut session = Session {
            child: Mutex::new(child),
            stdin: Mutex::new(Some(stdin)),
            pending,
            reader: Mutex::new(Some(reader)),
            hello: Hello { features: 0, kinds: vec![], labels: None, concurrent: false },
            transcript,
        };
        let line = match hello_rx.recv_timeout(Duration::from_millis(cfg.handshake_timeout_ms)) {
            Ok(line) => line,
            Err(mpsc::RecvTimeoutError::Timeout) => {
                session.kill();
                return Err(BridgeError::HandshakeTimeout { ms: cfg.handshake_timeout_ms });
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => {
                let status = session.kill();
                return Err(BridgeError::ChildExited(status));
            }
        };
        let checked = wire::decode_hello(&line)
            .map_err(BridgeError::Handshake)
            .and_then(|h| check_hello(&h, schema).map(|_| h));
        match checked {
            Ok(h) => {
                session.hello = h;
                Ok(session)
            }
            Err(e) => {
                session.kill();
                Err(e)
            }
        }
    }

    fn request(&self, id: u64, x: &Point, timeout: Duration) -> Reply {
        let (tx, rx) = mpsc::channel();
        {
            let mut p = lock(&self.pending);
            if let Some(e) = &p.failure {
                return Err(e.clone());
            }
            p.waiting.insert(id, tx);
        }
        let line = wire::encode_request(id, x);
        {
            let mut stdin = lock(&self.stdin);
            let Some(w) = stdin.as_mut() else {
                lock(&self.pending).waiting.remove(&id);
                return Err(ExecError::Closed);
            };
            if let Some(t) = &self.transcript {
                t.record(Direction::ToServer, &line);
            }
            if let Err(e) = writeln!(w, "{line}").and_then(|_| w.flush()) {
                let err = ExecError::Crashed(format!("write failed: {e}"));
                lock(&self.pending).fail(err.clone());
                return Err(err);
            }
        }
        match rx.recv_timeout(timeout) {
            Ok(reply) => reply,
            Err(_) => {
                let err = ExecError::Timeout { ms: timeout.as_millis() as u64 };
                lock(&self.pending).fail(err.clone());
                Err(err)
            }
        }
    }

    /// Sends `bye`, waits briefly for a clean exit, then kills.
    fn close(&self) {
        if let Some(mut w) = lock(&self.stdin).take() {
            if let Some(t) = &self.transcript {
                t.record(Direction::ToServer, wire::BYE);
            }
            let _ = writeln!(w, "{}", wire::BYE).and_then(|_| w.flush());
        }
        let deadline = Instant::now() + EXIT_GRACE;
        loop {
            match lock(&self.child).try_wait() {
                Ok(Some(_)) | Err(_) => break,
                Ok(None) if Instant::now() >= deadline => {
                    self.kill();
                    return;
                }
                Ok(None) => std::thread::sleep(Duration::from_millis(5)),
            }
        }
        self.join_reader();
    }

    /// Terminates the child. Returns a description of its exit status.
    fn kill(&self) -> String {
        lock(&self.stdin).take();
        let status = {
            let mut child = lock(&self.child);
            let _ = child.kill();
            child.wait().map(|s| s.to_string()).unwrap_or_else(|e| e.to_string())
        };
        self.join_reader();
        lock(&self.pending).fail(ExecError::Crashed(format!("child terminated ({status})")));
        status
    }

    /// Waits briefly for the reader to see end of input. A grandchild
    /// holding the pipe open can delay that indefinitely, in which case the
    /// thread is left to finish on its own.
    fn join_reader(&self) {
        let Some(h) = lock(&self.reader).take() else { return };
        let deadline = Instant::now() + READER_GRACE;
        while !h.is_finished() {
            if Instant::now() >= deadline {
                return;
            }
            std::thread::sleep(Duration::from_millis(2));
        }
        let _ = h.join();
    }
}

fn read_loop<R: BufRead>(input: R, hello: mpsc::Sender<String>, pending: &Mutex<Pending>, transcript: Option<&Transcript>) {
    let mut lines = input.lines();
    let mut hello = Some(hello);
    loop {
        let line = match lines.next() {
            Some(Ok(line)) => line,
            Some(Err(e)) => {
                lock(pending).fail(ExecError::Crashed(format!("read failed: {e}")));
                return;
            }
            None => {
                lock(pending).fail(ExecError::Crashed("child closed its output".into()));
                return;
            }
        };
        if let Some(t) = transcript {
            t.record(Direction::FromServer, &line);
        }
        if let Some(tx) = hello.take() {
            let _ = tx.send(line);
            continue;
        }
        let mut p = lock(pending);
        match wire::decode_response(&line) {
            Ok((id, result)) => match p.waiting.remove(&id) {
                Some(tx) => {
                    let _ = tx.send(Ok(result.map(Label::from)));
                }
                None => p.fail(ExecError::Protocol(format!("response for unknown id {id}"))),
            },
            Err(msg) => p.fail(ExecError::Protocol(msg)),
        }
    }
}

fn check_hello(h: &Hello, schema: &SpaceSchema) -> Result<(), BridgeError> {
    if h.features != schema.len() {
        return Err(BridgeError::SchemaMismatch { expected: schema.len(), declared: h.features });
    }
    if h.kinds.len() != schema.len() {
        return Err(BridgeError::Handshake(format!(
            "hello lists {} kinds for {} features",
            h.kinds.len(),
            h.features
        )));
    }
    for (i, (declared, f)) in h.kinds.iter().zip(schema.features()).enumerate() {
        if declared != f.kind.tag() {
            return Err(BridgeError::KindMismatch {
                feature: i,
                expected: f.kind.tag().to_string(),
                declared: declared.clone(),
            });
        }
    }
    Ok(())
}

enum Slot {
    Live(Arc<Session>),
    Dead(String),
}

/// Classifier hosted in a child process speaking the line protocol.
pub struct BridgeClassifier {
    cfg: BridgeConfig,
    schema: SpaceSchema,
    name: String,
    slot: Mutex<Slot>,
    restarts_used: AtomicU32,
    next_id: AtomicU64,
    closed: AtomicBool,
    concurrent: bool,
    labels: Option<Vec<Label>>,
    transcript: Option<Arc<Transcript>>,
}

impl BridgeClassifier {
    /// Starts the child and completes the handshake.
    pub fn spawn(cfg: &BridgeConfig, schema: SpaceSchema) -> Result<Self, BridgeError> {
        cfg.check()?;
        let transcript = cfg.transcript.as_deref().map(Transcript::create).transpose()?.map(Arc::new);
        let session = Session::start(cfg, &schema, transcript.clone())?;
        let hello = session.hello.clone();
        Ok(BridgeClassifier {
            cfg: cfg.clone(),
            schema,
            name: std::iter::once(cfg.program.as_str())
                .chain(cfg.args.iter().map(String::as_str))
                .collect::<Vec<_>>()
                .join(" "),
            slot: Mutex::new(Slot::Live(Arc::new(session))),
            restarts_used: AtomicU32::new(0),
            next_id: AtomicU64::new(1),
            closed: AtomicBool::new(false),
            concurrent: hello.concurrent,
            labels: hello.labels.map(|ls| ls.into_iter().map(Label::from).collect()),
            transcript,
        })
    }

    /// Number of restarts performed so far.
    pub fn restarts(&self) -> u32 {
        self.restarts_used.load(Ordering::Relaxed)
    }

    fn session(&self) -> Result<Arc<Session>, ExecError> {
        let mut slot = lock(&self.slot);
        if self.closed.load(Ordering::SeqCst) {
            return Err(ExecError::Closed);
        }
        let reason = match &*slot {
            Slot::Live(s) => return Ok(Arc::clone(s)),
            Slot::Dead(reason) => reason.clone(),
        };
        let allowed = match self.cfg.restart {
            RestartPolicy::Never => 0,
            RestartPolicy::OnCrash { max_restarts } => max_restarts,
        };
        if self.restarts_used.load(Ordering::Relaxed) >= allowed {
            return Err(ExecError::Crashed(reason));
        }
        self.restarts_used.fetch_add(1, Ordering::Relaxed);
        let s = Session::start(&self.cfg, &self.schema, self.transcript.clone())
            .map_err(|e| ExecError::Crashed(format!("restart failed: {e}")))?;
        let s = Arc::new(s);
        *slot = Slot::Live(Arc::clone(&s));
        Ok(s)
    }

    fn retire(&self, session: &Arc<Session>, reason: String) {
        let mut slot = lock(&self.slot);
        if matches!(&*slot, Slot::Live(s) if Arc::ptr_eq(s, session)) {
            *slot = Slot::Dead(reason);
            drop(slot);
            session.kill();
        }
    }
}

impl Classifier for BridgeClassifier {
    fn schema(&self) -> &SpaceSchema {
        &self.schema
    }

    fn classify(&self, p: &Point) -> Result<Label, ExecError> {
        let timeout = Duration::from_millis(self.cfg.request_timeout_ms);
        loop {
            let session = self.session()?;
            let id = self.next_id.fetch_add(1, Ordering::Relaxed);
            match session.request(id, p, timeout) {
                Ok(Ok(label)) => return Ok(label),
                Ok(Err(msg)) => return Err(ExecError::Remote(msg)),
                Err(ExecError::Closed) if self.closed.load(Ordering::SeqCst) => return Err(ExecError::Closed),
                Err(e @ ExecError::Crashed(_)) => {
                    // The next `session()` restarts if the policy allows it,
                    // otherwise reports the crash.
                    self.retire(&session, e.to_string());
                }
                Err(e) => {
                    self.retire(&session, e.to_string());
                    return Err(e);
                }
            }
        }
    }

    fn thread_safety(&self) -> ThreadSafety {
        if self.concurrent {
            ThreadSafety::Concurrent
        } else {
            ThreadSafety::Serial
        }
    }

    fn labels(&self) -> Option<Vec<Label>> {
        self.labels.clone()
    }

    fn shutdown(&self) {
        if self.closed.swap(true, Ordering::SeqCst) {
            return;
        }
        let old = std::mem::replace(&mut *lock(&self.slot), Slot::Dead("shut down".into()));
        if let Slot::Live(s) = old {
            s.close();
        }
    }

    fn name(&self) -> &str {
        &self.name
    }
}

impl Drop for BridgeClassifier {
    fn drop(&mut self) {
        self.shutdown();
    }
}
