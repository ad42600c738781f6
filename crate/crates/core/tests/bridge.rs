//! Bridged classifiers against the `serve` subcommand and small shell
//! servers that misbehave on purpose.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use paretoprobe::bridge::{self, parse_transcript, replay, BridgeClassifier, BridgeConfig, BridgeError, RestartPolicy};
use paretoprobe::classifiers::{make_subject, subject_schema, Classifier, ExecError, ThreadSafety};
use paretoprobe::space::{random_pool, FeatureDescriptor, FeatureKind, Point, SpaceSchema};
use paretoprobe::strategies::{explore, Strategy, StrategyConfig};
use paretoprobe::morphisms::Traversal;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_paretoprobe");

fn serve_cfg(extra: &[&str]) -> BridgeConfig {
    let mut args = vec!["serve".to_string()];
    args.extend(extra.iter().map(|s| s.to_string()));
    BridgeConfig::new(BIN, args)
}

fn sh(script: &str) -> BridgeConfig {
    BridgeConfig::new("sh", vec!["-c".into(), script.into()])
}

fn points(n: usize, seed: u64) -> Vec<Point> {
    random_pool(&subject_schema(), n, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[test]
fn bridged_labels_match_in_process_subject() {
    let local = make_subject("sin2", &[]).unwrap();
    let remote = bridge::spawn(&serve_cfg(&["--subject", "sin2"]), subject_schema()).unwrap();
    assert_eq!(remote.labels(), local.labels());
    assert_eq!(remote.thread_safety(), ThreadSafety::Serial);
    for p in points(300, 1) {
        assert_eq!(remote.classify(&p).unwrap(), local.classify(&p).unwrap(), "{p:?}");
    }
    assert_eq!(remote.executions(), 300);
}

#[test]
fn exploration_over_the_wire_matches_in_process() {
    let local = make_subject("circle2", &[]).unwrap();
    let remote = bridge::spawn(&serve_cfg(&["--subject", "circle2"]), subject_schema()).unwrap();
    let cfg = StrategyConfig { steps: 12, walk_distance: 10, pool: points(50, 2), seed: 3 };
    let s = Strategy::RandomWalk(Traversal::all(&subject_schema()));
    let a = explore(&s, &cfg, 60, &local, None).unwrap();
    let b = explore(&s, &cfg, 60, &remote, None).unwrap();
    assert_eq!(a, b);
    assert_eq!(local.executions(), remote.executions());
}

#[test]
fn concurrent_server_drives_parallel_exploration() {
    let local = make_subject("sin2", &[]).unwrap();
    let remote = bridge::spawn(&serve_cfg(&["--subject", "sin2", "--concurrent"]), subject_schema()).unwrap();
    assert_eq!(remote.thread_safety(), ThreadSafety::Concurrent);
    let cfg = StrategyConfig { steps: 10, walk_distance: 8, pool: points(40, 4), seed: 5 };
    let s = Strategy::RandomTarget;
    let a = explore(&s, &cfg, 200, &local, Some(1)).unwrap();
    let b = explore(&s, &cfg, 200, &remote, Some(8)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn crash_without_restart_is_reported() {
    let e = bridge::spawn(&serve_cfg(&["--subject", "box1", "--crash-after", "3"]), subject_schema()).unwrap();
    let ps = points(5, 6);
    for p in &ps[..3] {
        e.classify(p).unwrap();
    }
    assert!(matches!(e.classify(&ps[3]), Err(ExecError::Crashed(_))));
    assert!(matches!(e.classify(&ps[4]), Err(ExecError::Crashed(_))));
    assert_eq!(e.executions(), 3);
}

#[test]
fn crash_with_restart_retries_then_gives_up() {
    let mut cfg = serve_cfg(&["--subject", "box1", "--crash-after", "3"]);
    cfg.restart = RestartPolicy::OnCrash { max_restarts: 1 };
    let c = BridgeClassifier::spawn(&cfg, subject_schema()).unwrap();
    let ps = points(8, 7);
    // First child answers 3, the restarted one answers 3 more.
    for p in &ps[..6] {
        c.classify(p).unwrap();
    }
    assert_eq!(c.restarts(), 1);
    assert!(matches!(c.classify(&ps[6]), Err(ExecError::Crashed(_))));
    assert_eq!(c.restarts(), 1);
}

#[test]
fn slow_answers_time_out() {
    let mut cfg = serve_cfg(&["--subject", "box1", "--delay-ms", "2000"]);
    cfg.request_timeout_ms = 150;
    let e = bridge::spawn(&cfg, subject_schema()).unwrap();
    let start = Instant::now();
    let r = e.classify(&points(1, 8)[0]);
    assert_eq!(r, Err(ExecError::Timeout { ms: 150 }));
    assert!(start.elapsed() < Duration::from_millis(1500));
    assert_eq!(e.executions(), 0);
}

#[test]
fn silent_child_fails_the_handshake() {
    let mut cfg = BridgeConfig::new("sleep", vec!["30".into()]);
    cfg.handshake_timeout_ms = 200;
    let start = Instant::now();
    let r = bridge::spawn(&cfg, subject_schema());
    assert!(matches!(r, Err(BridgeError::HandshakeTimeout { ms: 200 })), "{r:?}");
    assert!(start.elapsed() < Duration::from_secs(5));
}

#[test]
fn unknown_response_id_is_a_protocol_error() {
    let script = r#"echo '{"hello":{"features":2,"kinds":["real","real"]}}'; read l; echo '{"id":999,"label":"x"}'; sleep 30"#;
    let e = bridge::spawn(&sh(script), subject_schema()).unwrap();
    let start = Instant::now();
    assert!(matches!(e.classify(&points(1, 9)[0]), Err(ExecError::Protocol(_))));
    assert!(start.elapsed() < Duration::from_secs(5));
    assert_eq!(e.executions(), 0);
}

#[test]
fn garbage_response_is_a_protocol_error() {
    let script = r#"echo '{"hello":{"features":2,"kinds":["real","real"]}}'; read l; echo 'not json'; sleep 30"#;
    let e = bridge::spawn(&sh(script), subject_schema()).unwrap();
    assert!(matches!(e.classify(&points(1, 9)[0]), Err(ExecError::Protocol(_))));
}

#[test]
fn remote_error_counts_as_an_execution() {
    let script = r#"echo '{"hello":{"features":2,"kinds":["real","real"]}}'; read l; echo '{"id":1,"error":"model refused"}'; read l"#;
    let e = bridge::spawn(&sh(script), subject_schema()).unwrap();
    assert_eq!(e.classify(&points(1, 10)[0]), Err(ExecError::Remote("model refused".into())));
    assert_eq!(e.executions(), 1);
}

#[test]
fn feature_count_mismatch_is_rejected() {
    let r = bridge::spawn(&serve_cfg(&["--subject", "sin1", "--declare-features", "3"]), subject_schema());
    assert_eq!(r.unwrap_err(), BridgeError::SchemaMismatch { expected: 2, declared: 3 });
}

#[test]
fn feature_kind_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let schema = SpaceSchema::new(vec![
        FeatureDescriptor::new("c", FeatureKind::categorical(["a", "b"])),
        FeatureDescriptor::new("y", FeatureKind::real(-1.0, 1.0, 0.2)),
    ])
    .unwrap();
    let path = dir.path().join("schema.json");
    std::fs::write(&path, schema.to_json()).unwrap();
    let cfg = serve_cfg(&["--constant", "k", "--schema", path.to_str().unwrap()]);
    let r = bridge::spawn(&cfg, subject_schema());
    assert!(matches!(r, Err(BridgeError::KindMismatch { feature: 0, .. })), "{r:?}");
    // The same server accepts its own schema.
    let e = bridge::spawn(&cfg, schema.clone()).unwrap();
    let p = Point::new(vec![paretoprobe::space::Value::symbol("b"), paretoprobe::space::Value::real(0.4).unwrap()]);
    assert_eq!(e.classify(&p).unwrap().as_str(), "k");
}

#[test]
fn shutdown_sends_bye_and_closes() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("t.log");
    let mut cfg = serve_cfg(&["--subject", "line1"]);
    cfg.transcript = Some(log.clone());
    let e = bridge::spawn(&cfg, subject_schema()).unwrap();
    let p = &points(1, 11)[0];
    e.classify(p).unwrap();
    e.shutdown();
    e.shutdown();
    assert_eq!(e.classify(p), Err(ExecError::Closed));
    let text = std::fs::read_to_string(&log).unwrap();
    let lines = parse_transcript(&text).unwrap();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines.last().unwrap().1, r#"{"bye":true}"#);
}

fn golden_points() -> Vec<Point> {
    let mut ps: Vec<Point> = [(0.0, 0.0), (1.6, 0.8), (3.2, -0.4), (4.6, -0.9), (6.2, 0.2), (1.0, 0.84)]
        .iter()
        .map(|&(x, y)| Point::reals(&[x, y]).unwrap())
        .collect();
    ps.extend(points(6, 12));
    ps
}

/// Records a client session; with `PARETOPROBE_BLESS=1` it rewrites the
/// fixture instead of comparing.
#[test]
fn client_session_matches_golden_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("session.txt");
    let mut cfg = serve_cfg(&["--subject", "sin2"]);
    cfg.transcript = Some(log.clone());
    let e = bridge::spawn(&cfg, subject_schema()).unwrap();
    for p in golden_points() {
        e.classify(&p).unwrap();
    }
    e.shutdown();
    let got = std::fs::read_to_string(&log).unwrap();
    let golden = fixture("sin2_session.txt");
    if std::env::var_os("PARETOPROBE_BLESS").is_some() {
        std::fs::write(&golden, &got).unwrap();
    }
    assert_eq!(got, std::fs::read_to_string(&golden).unwrap());
}

#[test]
fn golden_transcript_replays_byte_for_byte() {
    let text = std::fs::read_to_string(fixture("sin2_session.txt")).unwrap();
    let stats = replay(&serve_cfg(&["--subject", "sin2"]), &text).unwrap();
    assert_eq!(stats.sent, 13);
    assert_eq!(stats.matched, 13);
}

#[test]
fn replay_detects_a_changed_server() {
    let text = std::fs::read_to_string(fixture("sin2_session.txt")).unwrap();
    let r = replay(&serve_cfg(&["--subject", "sin2", "--param", "band=0.5"]), &text);
    assert!(matches!(r, Err(BridgeError::Replay(_))), "{r:?}");
}
