//! Config files: one TOML document with shared settings and one optional
//! section per command.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use mnlab_core::experiments::{
    ArcBoundConfig, CarlesonConfig, HlCheckConfig, LittlewoodPaleyConfig, MultiplierConfig, ParaproductConfig,
    SharpnessConfig, WeightAuditConfig,
};
use mnlab_core::Resolution;

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// If present it must name the command being run.
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub resolution: Resolution,
    pub hl_check: Option<HlCheckConfig>,
    pub arc_bound: Option<ArcBoundConfig>,
    pub sharpness: Option<SharpnessConfig>,
    pub weight_audit: Option<WeightAuditConfig>,
    pub littlewood_paley: Option<LittlewoodPaleyConfig>,
    pub multiplier: Option<MultiplierConfig>,
    pub paraproduct: Option<ParaproductConfig>,
    pub carleson: Option<CarlesonConfig>,
}

pub fn load(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// Everything a run depends on, echoed into its output.
#[derive(Clone, Debug, Serialize)]
pub struct Resolved<C: Serialize> {
    pub command: String,
    pub seed: u64,
    pub refine: bool,
    pub resolution: Resolution,
    pub settings: C,
}
