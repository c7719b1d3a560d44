use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_PARTIAL: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] lindblad_core::Error),

    #[error("{0}")]
    Input(String),

    #[error("writing output: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = Result<T, CliError>;

/// Rendered command output plus the exit code it implies.
pub struct Report {
    pub text: String,
    pub code: u8,
}

impl Report {
    pub fn json(value: &Value, code: u8) -> Self {
        let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
        text.push('\n');
        Self { text, code }
    }

    pub fn write(&self, path: Option<&Path>) -> CliResult<u8> {
        match path {
            Some(p) => fs::write(p, &self.text)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(self.text.as_bytes())?;
                out.flush()?;
            }
        }
        Ok(self.code)
    }
}

/// Builds CSV text: comment header, column header, rows.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(comment: &str, columns: &str) -> Self {
        Self {
            text: format!("# {comment}\n{columns}\n"),
        }
    }

    pub fn row(&mut self, line: impl AsRef<str>) {
        self.text.push_str(line.as_ref());
        self.text.push('\n');
    }

    pub fn comment(&mut self, line: impl AsRef<str>) {
        self.text.push_str("# ");
        self.row(line);
    }

    pub fn finish(self, code: u8) -> Report {
        Report {
            text: self.text,
            code,
        }
    }
}
