//! Problem files.

use std::fmt;

use projkit::{Combination, SampleConfig};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Decide,
    Certify,
    OracleCompare,
    Reproduce,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Decide => "decide",
            Task::Certify => "certify",
            Task::OracleCompare => "oracle-compare",
            Task::Reproduce => "reproduce",
        })
    }
}

/// A JSON problem file. `combination` may be omitted only for the
/// `reproduce` task, which names a `fixture` instead.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub combination: Option<Combination>,
    #[serde(default)]
    pub config: SampleConfig,
    pub task: Task,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| format!("invalid problem file: {e}"))?;
        file.check()?;
        Ok(file)
    }

    fn check(&self) -> Result<(), String> {
        if self.dimension == 0 {
            return Err("dimension must be a positive integer".into());
        }
        match (&self.combination, self.task) {
            (None, Task::Reproduce) => {}
            (None, task) => return Err(format!("task {task} needs a combination")),
            (Some(c), _) if c.dim() != self.dimension => {
                return Err(format!(
                    "dimension is {} but the combination lives in R^{}",
                    self.dimension,
                    c.dim()
                ))
            }
            _ => {}
        }
        if self.task == Task::Reproduce && self.fixture.is_none() {
            return Err("task reproduce needs a fixture name".into());
        }
        self.config.validate().map_err(|e| format!("invalid config: {e}"))
    }
}
