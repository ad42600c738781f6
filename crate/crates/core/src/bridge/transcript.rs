//! Session logs and byte-exact replay.
//!
//! A transcript holds one protocol line per row, prefixed `> ` for lines
//! sent to the server and `< ` for lines received from it.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::sync::Mutex;
use std::time::Duration;

use super::{BridgeConfig, BridgeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    ToServer,
    FromServer,
}

impl Direction {
    fn prefix(self) -> &'static str {
        match self {
            Direction::ToServer => "> ",
            Direction::FromServer => "< ",
        }
    }
}

/// Append-only session log shared by the writer and reader sides.
#[derive(Debug)]
pub struct Transcript {
    out: Mutex<BufWriter<File>>,
}

impl Transcript {
    pub fn create(path: &Path) -> Result<Self, BridgeError> {
        let file = File::create(path).map_err(|e| BridgeError::Io(format!("{}: {e}", path.display())))?;
        Ok(Transcript {
            out: Mutex::new(BufWriter::new(file)),
        })
    }

    pub fn record(&self, dir: Direction, line: &str) {
        let mut out = self.out.lock().unwrap_or_else(|e| e.into_inner());
        // Logging is best-effort; a full disk must not fail classification.
        let _ = writeln!(out, "{}{line}", dir.prefix());
        let _ = out.flush();
    }
}

pub fn parse_transcript(text: &str) -> Result<Vec<(Direction, &str)>, BridgeError> {
    text.lines()
        .enumerate()
        .map(|(n, l)| {
            if let Some(rest) = l.strip_prefix("> ") {
                Ok((Direction::ToServer, rest))
            } else if let Some(rest) = l.strip_prefix("< ") {
                Ok((Direction::FromServer, rest))
            } else {
                Err(BridgeError::Replay(format!("transcript line {} has no direction prefix", n + 1)))
            }
        })
        .collect()
}

/// Lines compared during a replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReplayStats {
    pub sent: usize,
    pub matched: usize,
}

/// Starts the server in `cfg`, sends the transcript's client lines verbatim
/// and checks every server line byte for byte.
pub fn replay(cfg: &BridgeConfig, transcript: &str) -> Result<ReplayStats, BridgeError> {
    let lines = parse_transcript(transcript)?;
    let mut child = Command::new(&cfg.program)
        .args(&cfg.args)
        .envs(cfg.env.iter().map(|(k, v)| (k, v)))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::inherit())
        .spawn()
        .map_err(|e| BridgeError::Spawn(format!("{}: {e}", cfg.program)))?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let stdout = child.stdout.take().expect("piped stdout");
    let (tx, rx) = mpsc::channel();
    let reader = std::thread::spawn(move || {
        for line in BufReader::new(stdout).lines() {
            let Ok(line) = line else { break };
            if tx.send(line).is_err() {
                break;
            }
        }
    });
    let timeout = Duration::from_millis(cfg.handshake_timeout_ms.max(cfg.request_timeout_ms));
    let mut stats = ReplayStats::default();
    let result = (|| {
        for (n, (dir, expected)) in lines.iter().enumerate() {
            match dir {
                Direction::ToServer => {
                    writeln!(stdin, "{expected}")
                        .and_then(|_| stdin.flush())
                        .map_err(|e| BridgeError::Replay(format!("line {}: write failed: {e}", n + 1)))?;
                    stats.sent += 1;
                }
                Direction::FromServer => {
                    let got = rx
                        .recv_timeout(timeout)
                        .map_err(|_| BridgeError::Replay(format!("line {}: no response", n + 1)))?;
                    if got != *expected {
                        return Err(BridgeError::Replay(format!(
                            "line {}: expected {expected:?}, got {got:?}",
                            n + 1
                        )));
                    }
                    stats.matched += 1;
                }
            }
        }
        Ok(stats)
    })();
    drop(stdin);
    if result.is_err() {
        let _ = child.kill();
    }
    let _ = child.wait();
    let _ = reader.join();
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_prefixes() {
        let t = "< {\"hello\":1}\n> {\"id\":1}\n";
        let lines = parse_transcript(t).unwrap();
        assert_eq!(lines, vec![(Direction::FromServer, "{\"hello\":1}"), (Direction::ToServer, "{\"id\":1}")]);
        assert!(parse_transcript("oops\n").is_err());
    }

    #[test]
    fn records_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.log");
        let t = Transcript::create(&path).unwrap();
        t.record(Direction::FromServer, "a");
        t.record(Direction::ToServer, "b");
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "< a\n> b\n");
    }
}
