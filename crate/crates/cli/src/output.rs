//! Report files, stdout and the JSON error mirror.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use resolab::json::{self, Versioned};
use resolab::Error;
use serde::Serialize;

use crate::args::Format;

/// Raised for flag combinations clap cannot express.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Usage(pub String);

pub struct Sink {
    out: Option<PathBuf>,
    format: Format,
}

#[derive(Serialize)]
struct ErrorBody {
    kind: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<String>,
    exit_code: u8,
}

#[derive(Serialize)]
struct ErrorDoc {
    error: ErrorBody,
}

/// 2 for bad input (flags, model files, violated hypotheses), 1 for numerical failures.
pub fn failure_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(
            Error::Schema { .. }
            | Error::UnknownModel(_)
            | Error::NonIntegrable(_)
            | Error::Invariant { .. }
            | Error::InvalidArgument(_)
            | Error::Hypothesis(_)
            | Error::Shape(_)
            | Error::Io(_),
        ) => 2,
        Some(_) => 1,
        None => 2,
    }
}

fn kind(err: &anyhow::Error) -> &'static str {
    if err.downcast_ref::<Usage>().is_some() {
        return "usage";
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Schema { .. }) => "schema",
        Some(Error::UnknownModel(_)) => "unknown-model",
        Some(Error::NonIntegrable(_)) => "non-integrable",
        Some(Error::Invariant { .. }) => "invariant",
        Some(Error::InvalidArgument(_)) => "invalid-argument",
        Some(Error::Hypothesis(_)) => "hypothesis",
        Some(Error::Io(_)) => "io",
        Some(_) => "numerical",
        None => "io",
    }
}

/// A closed pipe (`| head`) ends the output quietly.
fn stdout(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Error::from(e).into()),
        _ => Ok(()),
    }
}

impl Sink {
    pub fn new(out: Option<PathBuf>, format: Format) -> Self {
        Sink { out, format }
    }

    /// Writes `<name>.json` (and `<name>.csv` when a table exists) to the
    /// output directory, or prints the requested format to stdout.
    pub fn emit<T: Serialize>(&self, name: &str, report: &T, csv: Option<String>) -> Result<()> {
        if self.format == Format::Csv && csv.is_none() {
            return Err(Usage(format!("`{name}` has no CSV form, use --format json")).into());
        }
        let doc = json::to_string(&Versioned::new(report));
        let Some(dir) = &self.out else {
            match (self.format, csv) {
                (Format::Csv, Some(table)) => stdout(&table)?,
                _ => stdout(&format!("{doc}\n"))?,
            }
            return Ok(());
        };
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("{name}.json"));
        fs::write(&path, format!("{doc}\n")).with_context(|| format!("writing {}", path.display()))?;
        stdout(&format!("{}\n", path.display()))?;
        if let Some(table) = csv {
            let path = dir.join(format!("{name}.csv"));
            fs::write(&path, table).with_context(|| format!("writing {}", path.display()))?;
            stdout(&format!("{}\n", path.display()))?;
        }
        Ok(())
    }

    /// Raw document (a model file) under `file`, or to stdout.
    pub fn emit_raw(&self, file: &str, text: &str) -> Result<()> {
        if self.format == Format::Csv {
            return Err(Usage("model files are JSON only".into()).into());
        }
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                let path = dir.join(file);
                fs::write(&path, format!("{text}\n")).with_context(|| format!("writing {}", path.display()))?;
                stdout(&format!("{}\n", path.display()))?;
            }
            None => stdout(&format!("{text}\n"))?,
        }
        Ok(())
    }

    /// Machine-readable mirror of a failure: `error.json` in the output
    /// directory, or one JSON line on stderr.
    pub fn error(&self, err: &anyhow::Error, code: u8) -> Result<()> {
        let path = match err.downcast_ref::<Error>() {
            Some(Error::Schema { path, .. }) => Some(path.clone()),
            _ => None,
        };
        let doc = ErrorDoc { error: ErrorBody { kind: kind(err), message: format!("{err:#}"), path, exit_code: code } };
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                fs::write(dir.join("error.json"), format!("{}\n", json::to_string(&Versioned::new(&doc))))?;
            }
            None => eprintln!("{}", serde_json::to_string(&Versioned::new(&doc))?),
        }
        Ok(())
    }
}
