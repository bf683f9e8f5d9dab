//! Backend served by an external process over JSON lines on stdin/stdout.
//!
//! This is how published transformer checkpoints are scored: the bundled
//! `scripts/hf_mlm_backend.py` loads a Hugging Face masked LM and answers
//! the requests below. Any program speaking the same protocol works.
//!
//! Requests and responses, one JSON object per line:
//!
//! | request                                              | response                          |
//! |------------------------------------------------------|-----------------------------------|
//! | `{"op":"info"}`                                      | `{"model_id":s,"hidden_size":n}`  |
//! | `{"op":"tokenize","text":s}`                         | `{"tokens":[s]}`                  |
//! | `{"op":"masked_log_prob","tokens":[s],"position":i}` | `{"log_prob":x}`                  |
//! | `{"op":"encode","tokens":[s],"mask":i\|null}`        | `{"hidden":[[x]]}`                |
//! | `{"op":"head_log_prob","hidden":[x],"target":s}`     | `{"log_prob":x}`                  |
//!
//! Any response may instead be `{"error":s}`. `hidden_size` of zero means the
//! server does not expose hidden states.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use serde_json::{json, Value};

use super::backend::{BackendError, HiddenStates, MaskedLm};

struct Channel {
    stdin: ChildStdin,
    stdout: BufReader<ChildStdout>,
}

pub struct ProcessBackend {
    child: Mutex<Child>,
    channel: Mutex<Channel>,
    model_id: String,
    hidden_size: usize,
}

impl ProcessBackend {
    /// Starts `program args...` and performs the `info` handshake.
    pub fn spawn(program: &str, args: &[String]) -> Result<ProcessBackend, BackendError> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| BackendError::Process(format!("failed to start {program}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        let mut backend = ProcessBackend {
            child: Mutex::new(child),
            channel: Mutex::new(Channel { stdin, stdout }),
            model_id: String::new(),
            hidden_size: 0,
        };
        let info = backend.request(json!({"op": "info"}))?;
        backend.model_id = info
            .get("model_id")
            .and_then(Value::as_str)
            .ok_or_else(|| BackendError::Process("info response lacks model_id".into()))?
            .to_string();
        backend.hidden_size = info.get("hidden_size").and_then(Value::as_u64).unwrap_or(0) as usize;
        Ok(backend)
    }

    fn request(&self, message: Value) -> Result<Value, BackendError> {
        let mut channel = self.channel.lock().expect("backend channel poisoned");
        let mut line = message.to_string();
        line.push('\n');
        channel
            .stdin
            .write_all(line.as_bytes())
            .and_then(|_| channel.stdin.flush())
            .map_err(|e| BackendError::Process(format!("write failed: {e}")))?;
        let mut reply = String::new();
        let n = channel
            .stdout
            .read_line(&mut reply)
            .map_err(|e| BackendError::Process(format!("read failed: {e}")))?;
        if n == 0 {
            return Err(BackendError::Process("backend process closed its output".into()));
        }
        let value: Value = serde_json::from_str(&reply)
            .map_err(|e| BackendError::Process(format!("malformed response {reply:?}: {e}")))?;
        if let Some(err) = value.get("error") {
            return Err(BackendError::Process(
                err.as_str().unwrap_or("unknown error").to_string(),
            ));
        }
        Ok(value)
    }

    fn log_prob_field(value: &Value, position: usize) -> Result<f64, BackendError> {
        let lp = value
            .get("log_prob")
            .and_then(Value::as_f64)
            .ok_or_else(|| BackendError::Process("response lacks log_prob".into()))?;
        if !(lp.is_finite() && lp <= 0.0) {
            return Err(BackendError::InvalidLogProb { value: lp, position });
        }
        Ok(lp)
    }
}

impl Drop for ProcessBackend {
    fn drop(&mut self) {
        if let Ok(mut child) = self.child.lock() {
            let _ = child.kill();
            let _ = child.wait();
        }
    }
}

impl MaskedLm for ProcessBackend {
    fn model_id(&self) -> String {
        self.model_id.clone()
    }

    fn tokenize(&self, text: &str) -> Result<Vec<String>, BackendError> {
        let reply = self.request(json!({"op": "tokenize", "text": text}))?;
        serde_json::from_value(reply.get("tokens").cloned().unwrap_or(Value::Null))
            .map_err(|e| BackendError::Process(format!("bad tokens field: {e}")))
    }

    fn masked_log_prob(&self, tokens: &[String], position: usize) -> Result<f64, BackendError> {
        if position >= tokens.len() {
            return Err(BackendError::Position {
                position,
                len: tokens.len(),
            });
        }
        let reply = self.request(json!({"op": "masked_log_prob", "tokens": tokens, "position": position}))?;
        Self::log_prob_field(&reply, position)
    }

    fn hidden_states(&self) -> Option<&dyn HiddenStates> {
        (self.hidden_size > 0).then_some(self as &dyn HiddenStates)
    }
}

impl HiddenStates for ProcessBackend {
    fn hidden_size(&self) -> usize {
        self.hidden_size
    }

    fn encode(&self, tokens: &[String], mask: Option<usize>) -> Result<Vec<Vec<f64>>, BackendError> {
        let reply = self.request(json!({"op": "encode", "tokens": tokens, "mask": mask}))?;
        let hidden: Vec<Vec<f64>> = serde_json::from_value(reply.get("hidden").cloned().unwrap_or(Value::Null))
            .map_err(|e| BackendError::Process(format!("bad hidden field: {e}")))?;
        if hidden.len() != tokens.len() {
            return Err(BackendError::Process(format!(
                "encode returned {} rows for {} tokens",
                hidden.len(),
                tokens.len()
            )));
        }
        if let Some(row) = hidden.iter().find(|r| r.len() != self.hidden_size) {
            return Err(BackendError::Dimension {
                expected: self.hidden_size,
                found: row.len(),
            });
        }
        Ok(hidden)
    }

    fn head_log_prob(&self, hidden: &[f64], target: &str) -> Result<f64, BackendError> {
        let reply = self.request(json!({"op": "head_log_prob", "hidden": hidden, "target": target}))?;
        Self::log_prob_field(&reply, 0)
    }
}
