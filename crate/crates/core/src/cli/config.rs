use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::backend::BackendConfig;
use crate::evaluation::{ClassifierBackendConfig, Level};
use crate::som::GuidanceConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Paths {
    pub corpus: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    /// Directory that receives one JSONL report per `eval` command.
    pub reports: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricOptions {
    pub bleu_smoothing: bool,
    pub rouge_beta: f64,
    pub alpha_level: Level,
}

impl Default for MetricOptions {
    fn default() -> Self {
        MetricOptions {
            bleu_smoothing: false,
            rouge_beta: 1.0,
            alpha_level: Level::Ordinal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitOptions {
    pub stride_pairs: usize,
    pub min_turns: usize,
}

impl Default for SplitOptions {
    fn default() -> Self {
        SplitOptions {
            stride_pairs: 2,
            min_turns: 4,
        }
    }
}

/// Flat JSON configuration. Every field is optional; secrets are only ever
/// named by environment variable.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub seed: u64,
    pub annotator: BackendConfig,
    pub planner: BackendConfig,
    pub responder: BackendConfig,
    pub classifier: ClassifierBackendConfig,
    pub guidance: GuidanceConfig,
    pub paths: Paths,
    pub metrics: MetricOptions,
    pub split: SplitOptions,
    /// Extra template sets layered over the built-in registry.
    pub template_files: Vec<PathBuf>,
    /// Replaces the built-in taxonomy when set.
    pub taxonomy_file: Option<PathBuf>,
}

impl AppConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config_fills_defaults() {
        let cfg: AppConfig =
            serde_json::from_str(r#"{"seed": 9, "annotator": {"model_name": "m"}, "metrics": {"alpha_level": "nominal"}}"#)
                .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.annotator.model_name, "m");
        assert_eq!(cfg.annotator.api_key_env, "THANOS_API_KEY");
        assert_eq!(cfg.metrics.alpha_level, Level::Nominal);
        assert_eq!(cfg.split.stride_pairs, 2);
        assert!(serde_json::from_str::<AppConfig>(r#"{"api_key": "x"}"#).is_err());
    }
}
