use std::fs;
use std::path::Path;

use anyhow::Context;
use dotstitch_core::RunConfig;

use crate::GlobalArgs;

pub fn load(path: Option<&Path>) -> anyhow::Result<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

pub fn apply_overrides(cfg: &mut RunConfig, g: &GlobalArgs) {
    if let Some(out) = &g.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    if let Some(theta) = g.theta {
        cfg.theta = theta;
    }
    if let Some(w) = g.w_gc {
        cfg.w_gc = w;
    }
    if let Some(w) = g.w_au {
        cfg.w_au = w;
    }
    if let Some(w) = g.w_gu {
        cfg.w_gu = w;
    }
}
