use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wsi_core::dive::DiveTrainConfig;
use wsi_core::senses::InduceConfig;
use wsi_core::sgns::SgnsConfig;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusParams {
    /// Raw text, one document per line.
    pub path: Option<PathBuf>,
    pub window: usize,
    pub min_count: u64,
    /// `english`, `none`, or a file with one stop word per line.
    pub stopwords: String,
    pub shards: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            path: None,
            window: 10,
            min_count: 5,
            stopwords: "english".into(),
            shards: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RefineParams {
    pub sentence_len: usize,
    pub iterations: usize,
    pub warm_start: bool,
}

impl Default for RefineParams {
    fn default() -> Self {
        RefineParams {
            sentence_len: 20,
            iterations: 3,
            warm_start: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalParams {
    pub queries: Option<PathBuf>,
}

#[allow(clippy::derivable_impls)]
impl Default for EvalParams {
    fn default() -> Self {
        EvalParams { queries: None }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub corpus: CorpusParams,
    pub dive: DiveTrainConfig,
    pub sgns: SgnsConfig,
    pub induce: InduceConfig,
    pub refine: RefineParams,
    pub eval: EvalParams,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }
}
