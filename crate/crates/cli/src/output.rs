use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Identifies the producing tool and invocation in every report.
#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
}

impl ToolInfo {
    pub fn current() -> Self {
        Self {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: std::env::args().collect(),
        }
    }
}

/// Report wrapper: tool info, resolved configuration, then the payload.
#[derive(Debug, Serialize)]
pub struct Report<C: Serialize, B: Serialize> {
    pub tool: ToolInfo,
    pub config: C,
    #[serde(flatten)]
    pub body: B,
}

impl<C: Serialize, B: Serialize> Report<C, B> {
    pub fn new(config: C, body: B) -> Self {
        Self {
            tool: ToolInfo::current(),
            config,
            body,
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path, what: &str) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {what} file {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {what} file {}", path.display()))
}

/// Writes through a sibling temporary file renamed into place, so readers
/// never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Sends `contents` to `out` when given, otherwise to stdout. The summary
/// goes to stdout alongside a file, or to stderr when stdout carries data.
pub fn emit(out: Option<&Path>, contents: &str, summary: &str) -> Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, contents)?;
            println!("{summary}");
            println!("wrote {}", path.display());
        }
        None => {
            eprintln!("{summary}");
            print_stdout(contents)?;
        }
    }
    Ok(())
}

/// Prints to stdout, treating a closed pipe as a normal end of output.
pub fn print_stdout(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}
