//! Service configuration: a small `key = value` file in TOML syntax.
//!
//! ```text
//! store_path = "/var/lib/sciarchive"
//! listen_addr = "127.0.0.1:8080"
//! moving_wall_default = 3
//! fuzzy_threshold = 0.75
//! ```

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use sciarchive::citegraph::DEFAULT_FUZZY_THRESHOLD;

use crate::error::ApiError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub store_path: PathBuf,
    #[serde(default = "default_listen")]
    pub listen_addr: SocketAddr,
    #[serde(default = "default_wall")]
    pub moving_wall_default: u32,
    #[serde(default = "default_threshold")]
    pub fuzzy_threshold: f64,
}

fn default_listen() -> SocketAddr {
    SocketAddr::from(([127, 0, 0, 1], 8080))
}

fn default_wall() -> u32 {
    3
}

fn default_threshold() -> f64 {
    DEFAULT_FUZZY_THRESHOLD
}

impl Config {
    pub fn new(store_path: impl Into<PathBuf>) -> Self {
        Self {
            store_path: store_path.into(),
            listen_addr: default_listen(),
            moving_wall_default: default_wall(),
            fuzzy_threshold: default_threshold(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, ApiError> {
        let config: Self = toml::from_str(text).map_err(|e| ApiError::new(400, "invalid_config", e.to_string()))?;
        if !(config.fuzzy_threshold > 0.0 && config.fuzzy_threshold <= 1.0) {
            return Err(ApiError::new(400, "invalid_config", "fuzzy_threshold must lie in (0, 1]"));
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ApiError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ApiError::new(400, "invalid_config", format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}
