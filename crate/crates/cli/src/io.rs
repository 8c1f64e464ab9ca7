//! Input parsing with JSON-pointer diagnostics, run configuration and
//! atomic artifact output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_path_to_error::Segment;

/// Malformed input; reported on stderr with exit code 2.
#[derive(Debug)]
pub struct InputError(pub Vec<String>);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join("\n"))
    }
}

impl std::error::Error for InputError {}

fn escape(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        let token = match seg {
            Segment::Seq { index } => index.to_string(),
            Segment::Map { key } => escape(key),
            Segment::Enum { variant } => escape(variant),
            Segment::Unknown => continue,
        };
        out.push('/');
        out.push_str(&token);
    }
    out
}

/// Conversion errors from the core types start with a relative pointer
/// such as `edges/3: ...`; fold it into the absolute one.
fn split_relative(message: &str) -> Option<(&str, &str)> {
    let (head, rest) = message.split_once(": ")?;
    let plain = !head.is_empty() && head.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '/');
    (plain && head.contains('/')).then_some((head, rest))
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| InputError(vec![format!("{}: {e}", path.display())]))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let mut ptr = pointer(e.path());
        let message = e.into_inner().to_string();
        let message = match split_relative(&message) {
            Some((rel, rest)) => {
                ptr = format!("{ptr}/{rel}");
                rest.to_string()
            }
            None => message,
        };
        let ptr = if ptr.is_empty() { "/".to_string() } else { ptr };
        InputError(vec![format!("{}: {ptr}: {message}", path.display())]).into()
    })
}

/// Everything a run depends on. Embedded in every artifact, so a run can be
/// reproduced from any of its outputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunConfig {
    pub command: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub td: Option<PathBuf>,
    pub radius: Vec<usize>,
    pub k: usize,
    pub seed: u64,
    pub cap: usize,
    pub depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dot: Option<PathBuf>,
    pub json: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Artifact<T> {
    pub run_config: RunConfig,
    pub result: T,
}

/// Collects output files and writes each one atomically: the bytes go to a
/// temporary sibling which is then renamed into place.
pub struct Sink<'a> {
    config: &'a RunConfig,
    pub stdout_json: Option<String>,
}

impl<'a> Sink<'a> {
    pub fn new(config: &'a RunConfig) -> Self {
        Sink { config, stdout_json: None }
    }

    fn json_dir(&self) -> Option<&Path> {
        self.config.out.as_deref().or(self.config.dot.as_deref())
    }

    /// Writes `name` to the JSON output directory, if any. The first
    /// artifact of a run is also what `--json` prints.
    pub fn json<T: Serialize>(&mut self, name: &str, result: &T) -> Result<()> {
        let artifact = Artifact {
            run_config: self.config.clone(),
            result,
        };
        let text = serde_json::to_string_pretty(&artifact)? + "\n";
        if let Some(dir) = self.json_dir() {
            write_atomic(&dir.join(name), &text)?;
        }
        if self.stdout_json.is_none() {
            self.stdout_json = Some(text);
        }
        Ok(())
    }

    pub fn dot(&self, name: &str, body: &str) -> Result<()> {
        if let Some(dir) = &self.config.dot {
            let header = format!("// run: {}\n", serde_json::to_string(self.config)?);
            write_atomic(&dir.join(name), &(header + body))?;
        }
        Ok(())
    }
}

pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_pointer_prefix() {
        assert_eq!(split_relative("edges/3: self-loop at 2"), Some(("edges/3", "self-loop at 2")));
        assert_eq!(split_relative("invalid type: string, expected u64"), None);
    }

    #[test]
    fn pointer_tokens_are_escaped() {
        assert_eq!(escape("a/b~c"), "a~1b~0c");
    }
}
