use serde::{Deserialize, Serialize};

/// Everything needed to repeat a run, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub config: Option<String>,
    pub preset: Option<String>,
    pub parameter: Option<String>,
    pub grid: Option<String>,
    pub target: Option<String>,
    pub discretization: String,
    pub output_dir: String,
    pub seed: u64,
}

impl RunManifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
