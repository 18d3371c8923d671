use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use slv_core::SlvError;

/// Files of one run, written into a dedicated directory.
pub struct RunDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl RunDir {
    pub fn create(root: &Path, name: &str) -> Result<Self, SlvError> {
        let dir = root.join(sanitize(name));
        fs::create_dir_all(&dir).map_err(|e| SlvError::Io(format!("{}: {e}", dir.display())))?;
        Ok(RunDir {
            dir,
            written: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn file(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), SlvError> {
        let path = self.file(name);
        fs::write(&path, body).map_err(|e| SlvError::Io(format!("{}: {e}", path.display())))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), SlvError> {
        let body = serde_json::to_string_pretty(value)
            .map_err(|e| SlvError::Format(format!("{name}: {e}")))?;
        self.text(name, &(body + "\n"))
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}

/// Keeps names usable as directory names.
pub fn sanitize(name: &str) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "-_.".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    if cleaned.is_empty() || cleaned.chars().all(|c| c == '.') {
        "run".into()
    } else {
        cleaned
    }
}

pub fn error_record(err: &SlvError) -> serde_json::Value {
    json!({
        "error": err.kind(),
        "message": err.to_string(),
    })
}

/// Writes `error.json` for a failed run, best effort, and reports on stderr.
pub fn report_error(root: &Path, name: &str, err: &SlvError) {
    eprintln!("slv: {name}: {}: {err}", err.kind());
    if let Ok(mut dir) = RunDir::create(root, name) {
        if let Err(e) = dir.json("error.json", &error_record(err)) {
            eprintln!("slv: could not write error record: {e}");
        }
    }
}

/// Prints a line on stdout, ignoring a closed pipe.
pub fn emit(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}
