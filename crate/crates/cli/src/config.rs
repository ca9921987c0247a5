//! Pipeline configuration file and flag overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use request_core::{FeatureConfig, InferenceConfig, PairGenConfig, SynthConfig, TrainConfig};
use serde::{Deserialize, Serialize};

/// Everything a pipeline run can be configured with. Each section mirrors
/// the config type of the stage that consumes it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub features: FeatureConfig,
    pub pairs: PairGenConfig,
    pub train: TrainConfig,
    pub inference: InferenceConfig,
    pub synth: SynthConfig,
    pub paths: Paths,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Brown cluster file; no cluster features without it.
    pub brown: Option<PathBuf>,
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Fails if an output file would overwrite one of the inputs.
pub fn ensure_distinct(inputs: &[&Path], outputs: &[PathBuf]) -> Result<()> {
    let canon = |p: &Path| -> PathBuf {
        match (p.parent(), p.file_name()) {
            (Some(dir), Some(name)) => {
                let dir = if dir.as_os_str().is_empty() {
                    Path::new(".")
                } else {
                    dir
                };
                dir.canonicalize()
                    .map(|d| d.join(name))
                    .unwrap_or_else(|_| p.to_path_buf())
            }
            _ => p.to_path_buf(),
        }
    };
    for out in outputs {
        let o = canon(out);
        if let Some(i) = inputs.iter().find(|i| canon(i) == o) {
            bail!(
                "output {} would overwrite input {}",
                out.display(),
                i.display()
            );
        }
    }
    Ok(())
}
