use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &str, bytes: &[u8]) -> Self {
        InputDigest { path: path.to_string(), sha256: format!("{:x}", Sha256::digest(bytes)) }
    }
}

/// Everything a command prints. `results` is the comparable payload; the
/// command echo and digests are metadata.
#[derive(Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub results: Value,
    pub status: i32,
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport { command, inputs: Vec::new(), results: Value::Null, status: 0, lines: Vec::new() }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn fail(&mut self) {
        self.status = 1;
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut s = serde_json::to_string_pretty(self).expect("plain data");
            s.push('\n');
            s
        } else {
            let mut s = self.lines.join("\n");
            s.push('\n');
            s
        }
    }
}
