use std::io::{self, BufRead, Write};
use std::sync::Mutex;
use std::time::Duration;

use crate::classifiers::Classifier;
use crate::space::{validate_point, Point};

use super::wire::{self, ClientLine, Hello};

/// Server behaviour knobs. The defaults give a well-behaved server; the
/// others exist to exercise client failure handling.
#[derive(Debug, Clone, Default)]
pub struct ServeOptions {
    /// Stop without answering once this many requests have been answered.
    pub crash_after: Option<u64>,
    /// Sleep before each answer.
    pub delay: Duration,
    /// Announce this feature count instead of the real one.
    pub declare_features: Option<usize>,
    /// Answer requests on separate threads, possibly out of order.
    pub concurrent: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServeEnd {
    Bye,
    Eof,
    /// Stopped by `crash_after`.
    Crash,
}

fn answer(c: &dyn Classifier, id: u64, x: &serde_json::Value, delay: Duration) -> String {
    let point = match Point::from_json(c.schema(), x) {
        Ok(p) => p,
        Err(e) => return wire::encode_error(Some(id), &e.to_string()),
    };
    let verdict = validate_point(c.schema(), &point);
    if !verdict.is_ok() {
        return wire::encode_error(Some(id), &format!("invalid point: {verdict}"));
    }
    if !delay.is_zero() {
        std::thread::sleep(delay);
    }
    match c.classify(&point) {
        Ok(label) => wire::encode_label(id, label.as_str()),
        Err(e) => wire::encode_error(Some(id), &e.to_string()),
    }
}

fn emit<W: Write>(out: &Mutex<W>, line: &str) -> io::Result<()> {
    let mut w = out.lock().unwrap_or_else(|e| e.into_inner());
    writeln!(w, "{line}")?;
    w.flush()
}

/// Serves `c` over the line protocol until `bye`, end of input or a
/// simulated crash.
pub fn serve<R, W>(c: &dyn Classifier, opts: &ServeOptions, input: R, output: W) -> io::Result<ServeEnd>
where
    R: BufRead,
    W: Write + Send,
{
    let schema = c.schema();
    let hello = Hello {
        features: opts.declare_features.unwrap_or(schema.len()),
        kinds: schema.features().iter().map(|f| f.kind.tag().to_string()).collect(),
        labels: c.labels().map(|ls| ls.iter().map(|l| l.as_str().to_string()).collect()),
        concurrent: opts.concurrent,
    };
    let out = Mutex::new(output);
    emit(&out, &wire::encode_hello(&hello))?;
    let mut received = 0u64;
    std::thread::scope(|scope| {
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (id, x) = match wire::decode_client_line(&line) {
                Ok(ClientLine::Bye) => return Ok(ServeEnd::Bye),
                Ok(ClientLine::Request { id, x }) => (id, x),
                Err((id, msg)) => {
                    emit(&out, &wire::encode_error(id, &msg))?;
                    continue;
                }
            };
            if opts.crash_after.is_some_and(|n| received >= n) {
                return Ok(ServeEnd::Crash);
            }
            received += 1;
            if opts.concurrent {
                let out = &out;
                scope.spawn(move || {
                    let _ = emit(out, &answer(c, id, &x, opts.delay));
                });
            } else {
                emit(&out, &answer(c, id, &x, opts.delay))?;
            }
        }
        Ok(ServeEnd::Eof)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{make_subject, subject_schema, Executor};

    fn run(c: &dyn Classifier, opts: &ServeOptions, input: &str) -> (ServeEnd, Vec<String>) {
        let mut out = Vec::new();
        let end = serve(c, opts, input.as_bytes(), &mut out).unwrap();
        (end, String::from_utf8(out).unwrap().lines().map(str::to_string).collect())
    }

    #[test]
    fn answers_in_order_until_bye() {
        let e = make_subject("box1", &[]).unwrap();
        let input = "{\"id\":1,\"x\":[3.0,0.0]}\n{\"id\":2,\"x\":[0.2,0.8]}\n{\"bye\":true}\n{\"id\":3,\"x\":[1,1]}\n";
        let (end, lines) = run(e.classifier(), &ServeOptions::default(), input);
        assert_eq!(end, ServeEnd::Bye);
        assert_eq!(
            lines,
            vec![
                r#"{"hello":{"features":2,"kinds":["real","real"],"labels":["inside","outside"],"concurrent":false}}"#,
                r#"{"id":1,"label":"inside"}"#,
                r#"{"id":2,"label":"outside"}"#,
            ]
        );
    }

    #[test]
    fn malformed_and_invalid_requests_get_errors() {
        let e = Executor::constant(subject_schema(), "k");
        let input = "not json\n{\"x\":[1,1]}\n{\"id\":5,\"x\":[99.0,0.0]}\n{\"id\":6,\"x\":[\"a\",0.0]}\n";
        let (end, lines) = run(e.classifier(), &ServeOptions::default(), input);
        assert_eq!(end, ServeEnd::Eof);
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with(r#"{"id":null,"error":"#));
        assert!(lines[2].starts_with(r#"{"id":null,"error":"#));
        assert!(lines[3].starts_with(r#"{"id":5,"error":"#));
        assert!(lines[4].starts_with(r#"{"id":6,"error":"#));
    }

    #[test]
    fn crash_after_stops_silently() {
        let e = Executor::constant(subject_schema(), "k");
        let opts = ServeOptions { crash_after: Some(1), ..Default::default() };
        let input = "{\"id\":1,\"x\":[1.0,0.0]}\n{\"id\":2,\"x\":[1.0,0.0]}\n";
        let (end, lines) = run(e.classifier(), &opts, input);
        assert_eq!(end, ServeEnd::Crash);
        assert_eq!(lines.len(), 2);
    }

    #[test]
    fn declared_features_override() {
        let e = Executor::constant(subject_schema(), "k");
        let opts = ServeOptions { declare_features: Some(3), concurrent: true, ..Default::default() };
        let (_, lines) = run(e.classifier(), &opts, "");
        let h = wire::decode_hello(&lines[0]).unwrap();
        assert_eq!(h.features, 3);
        assert!(h.concurrent);
    }

    #[test]
    fn concurrent_mode_answers_everything() {
        let e = make_subject("sin2", &[]).unwrap();
        let opts = ServeOptions { concurrent: true, ..Default::default() };
        let input: String = (1..=50).map(|i| format!("{{\"id\":{i},\"x\":[{}.0,0.0]}}\n", i % 6)).collect();
        let (_, lines) = run(e.classifier(), &opts, &input);
        let mut ids: Vec<u64> = lines[1..].iter().map(|l| wire::decode_response(l).unwrap().0).collect();
        ids.sort_unstable();
        assert_eq!(ids, (1..=50).collect::<Vec<_>>());
    }
}
