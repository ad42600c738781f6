//! Line protocol: one UTF-8 JSON object per line.
//!
//! ```text
//! server: {"hello":{"features":2,"kinds":["real","real"],"labels":["a","b"],"concurrent":false}}
//! client: {"id":1,"x":[3.14,0.5]}
//! server: {"id":1,"label":"a"}        or {"id":1,"error":"..."}
//! client: {"bye":true}
//! ```
//!
//! Reals are written in shortest round-trip decimal form. Keys appear in the
//! order shown.

use serde::{Deserialize, Serialize};

use crate::space::Point;

pub const BYE: &str = r#"{"bye":true}"#;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hello {
    pub features: usize,
    pub kinds: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default)]
    pub concurrent: bool,
}

#[derive(Serialize, Deserialize)]
struct HelloLine {
    hello: Hello,
}

#[derive(Serialize)]
struct RequestLine<'a> {
    id: u64,
    x: &'a Point,
}

#[derive(Serialize)]
struct LabelLine<'a> {
    id: u64,
    label: &'a str,
}

#[derive(Serialize)]
struct ErrorLine<'a> {
    id: Option<u64>,
    error: &'a str,
}

#[derive(Deserialize)]
struct ResponseLine {
    id: Option<u64>,
    label: Option<String>,
    error: Option<String>,
}

fn to_line<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("wire types always serialize")
}

pub fn encode_hello(h: &Hello) -> String {
    to_line(&HelloLine { hello: h.clone() })
}

pub fn decode_hello(line: &str) -> Result<Hello, String> {
    serde_json::from_str::<HelloLine>(line)
        .map(|l| l.hello)
        .map_err(|e| format!("bad hello {line:?}: {e}"))
}

pub fn encode_request(id: u64, x: &Point) -> String {
    to_line(&RequestLine { id, x })
}

pub fn encode_label(id: u64, label: &str) -> String {
    to_line(&LabelLine { id, label })
}

/// Error response; `id` is `None` when the request carried no usable id.
pub fn encode_error(id: Option<u64>, error: &str) -> String {
    to_line(&ErrorLine { id, error })
}

/// `(id, Ok(label) | Err(message))`.
pub fn decode_response(line: &str) -> Result<(u64, Result<String, String>), String> {
    let r: ResponseLine = serde_json::from_str(line).map_err(|e| format!("bad response {line:?}: {e}"))?;
    let id = r.id.ok_or_else(|| format!("response without id: {line:?}"))?;
    match (r.label, r.error) {
        (Some(label), None) => Ok((id, Ok(label))),
        (None, Some(error)) => Ok((id, Err(error))),
        _ => Err(format!("response needs exactly one of label/error: {line:?}")),
    }
}

/// Incoming client line as seen by a server.
#[derive(Debug, Clone, PartialEq)]
pub enum ClientLine {
    Request { id: u64, x: serde_json::Value },
    Bye,
}

pub fn decode_client_line(line: &str) -> Result<ClientLine, (Option<u64>, String)> {
    let v: serde_json::Value = serde_json::from_str(line).map_err(|e| (None, format!("malformed JSON: {e}")))?;
    if v.get("bye") == Some(&serde_json::Value::Bool(true)) {
        return Ok(ClientLine::Bye);
    }
    let id = v
        .get("id")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| (None, "request needs a non-negative integer id".to_string()))?;
    let x = v.get("x").cloned().ok_or_else(|| (Some(id), "request needs x".to_string()))?;
    Ok(ClientLine::Request { id, x })
}
