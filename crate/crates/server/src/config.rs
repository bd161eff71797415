use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use scholarscope::corpus::current_year;
use scholarscope::{AnalyticsConfig, Bm25Params, ResolverConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Environment variable that replaces the config file path given on the
/// command line. It never overrides individual settings.
pub const CONFIG_ENV: &str = "SCHOLARSCOPE_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("invalid config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Service configuration, read from TOML.
///
/// ```toml
/// listen = "127.0.0.1:8080"
/// corpus_dir = "corpus"
/// snapshot_path = "corpus.snapshot"
/// page_size = 20
///
/// [bm25]
/// k1 = 1.2
/// b = 0.75
///
/// [analytics]
/// recent_years = 5
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApiConfig {
    pub listen: String,
    pub corpus_dir: PathBuf,
    /// Loaded at startup when present, rewritten after every build.
    pub snapshot_path: Option<PathBuf>,
    pub taxonomy_path: Option<PathBuf>,
    pub suffixes_path: Option<PathBuf>,
    pub category_rules_path: Option<PathBuf>,
    pub venue_aliases_path: Option<PathBuf>,
    pub bm25: Bm25Params,
    pub resolver: ResolverConfig,
    pub analytics: AnalyticsConfig,
    pub page_size: usize,
    pub max_page_size: usize,
    /// Reference year for recency windows; the current year when unset.
    pub now_year: Option<i32>,
    /// Re-ingest automatically at this period when set.
    pub reingest_interval_secs: Option<u64>,
}

impl Default for ApiConfig {
    fn default() -> Self {
        Self {
            listen: "127.0.0.1:8080".into(),
            corpus_dir: PathBuf::from("corpus"),
            snapshot_path: None,
            taxonomy_path: None,
            suffixes_path: None,
            category_rules_path: None,
            venue_aliases_path: None,
            bm25: Bm25Params::default(),
            resolver: ResolverConfig::default(),
            analytics: AnalyticsConfig::default(),
            page_size: 20,
            max_page_size: 200,
            now_year: None,
            reingest_interval_secs: None,
        }
    }
}

impl ApiConfig {
    /// Reads and validates a TOML file. Relative paths inside it are taken
    /// relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let mut cfg = Self::from_toml(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e,
        })?;
        if let Some(base) = path.parent() {
            cfg.rebase(base);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    fn rebase(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.corpus_dir);
        for p in [
            &mut self.snapshot_path,
            &mut self.taxonomy_path,
            &mut self.suffixes_path,
            &mut self.category_rules_path,
            &mut self.venue_aliases_path,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        self.listen_addr()?;
        if self.page_size == 0 || self.max_page_size < self.page_size {
            return invalid(format!(
                "page_size must be positive and at most max_page_size ({} / {})",
                self.page_size, self.max_page_size
            ));
        }
        self.bm25.validate().or_else(|m| invalid(format!("bm25: {m}")))?;
        self.resolver.validate().or_else(|m| invalid(format!("resolver: {m}")))?;
        self.analytics.validate().or_else(|m| invalid(format!("analytics: {m}")))?;
        if self.reingest_interval_secs == Some(0) {
            return invalid("reingest_interval_secs must be positive".into());
        }
        if !self.corpus_dir.is_dir() {
            return invalid(format!("corpus_dir {} is not a directory", self.corpus_dir.display()));
        }
        for p in [
            &self.taxonomy_path,
            &self.suffixes_path,
            &self.category_rules_path,
            &self.venue_aliases_path,
        ]
        .into_iter()
        .flatten()
        {
            if !p.is_file() {
                return invalid(format!("{} does not exist", p.display()));
            }
        }
        Ok(())
    }

    pub fn listen_addr(&self) -> Result<SocketAddr, ConfigError> {
        self.listen
            .parse()
            .map_err(|e| ConfigError::Invalid(format!("listen {:?}: {e}", self.listen)))
    }

    pub fn now_year(&self) -> i32 {
        self.now_year.unwrap_or_else(current_year)
    }
}

/// The config path to use: the environment variable wins over `cli_path`.
pub fn config_path(cli_path: Option<PathBuf>) -> Option<PathBuf> {
    std::env::var_os(CONFIG_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .or(cli_path)
}
