//! Optional TOML file overriding training parameters:
//!
//! ```toml
//! [train]
//! max_iters = 20
//! mu0 = 0.005
//! ```
use std::path::Path;

use serde::Deserialize;
use sbadpcm::mlp::TrainConfig;

use crate::error::{CliError, CliResult};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub train: TrainSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub max_iters: Option<usize>,
    pub mu0: Option<f64>,
    pub mu_up: Option<f64>,
    pub mu_down: Option<f64>,
    pub mu_max: Option<f64>,
    pub alpha0: Option<f64>,
    pub beta0: Option<f64>,
    pub scale: Option<f64>,
}

impl TrainSection {
    pub fn apply(&self, cfg: &mut TrainConfig<f64>) {
        let set = |dst: &mut f64, src: Option<f64>| {
            if let Some(v) = src {
                *dst = v;
            }
        };
        if let Some(n) = self.max_iters {
            cfg.max_iters = n;
        }
        set(&mut cfg.mu0, self.mu0);
        set(&mut cfg.mu_up, self.mu_up);
        set(&mut cfg.mu_down, self.mu_down);
        set(&mut cfg.mu_max, self.mu_max);
        set(&mut cfg.alpha0, self.alpha0);
        set(&mut cfg.beta0, self.beta0);
        set(&mut cfg.scale, self.scale);
    }
}

pub fn load(path: &Path) -> CliResult<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}
