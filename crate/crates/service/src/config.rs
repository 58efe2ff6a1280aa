//! `service.toml` loading. Relative paths are resolved against the directory
//! holding the config file.

use std::net::IpAddr;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use upsell_core::domain::AccommodationId;
use upsell_core::recommend::RecommenderConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Mock,
    Live,
}

/// Text-generation backend. The live kind speaks an OpenAI-style chat
/// completions API; its key is read from the environment variable named by
/// `api_key_env`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub api_key_env: String,
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub max_in_flight: usize,
    pub per_minute: u32,
    pub timeout_seconds: u64,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            kind: BackendKind::Mock,
            api_key_env: crate::live::API_KEY_ENV.into(),
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-3.5-turbo".into(),
            temperature: 0.8,
            max_in_flight: 4,
            per_minute: 60,
            timeout_seconds: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccommodationConfig {
    pub id: AccommodationId,
    /// JSON array of catalog items.
    pub catalog: PathBuf,
    /// JSON array of ratings.
    pub ratings: Option<PathBuf>,
    /// JSON array of past orders.
    pub purchases: Option<PathBuf>,
    /// JSON array of wine-profile documents.
    pub profiles: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceConfig {
    pub bind: IpAddr,
    pub port: u16,
    /// Campaign store and ingested feedback live here.
    pub data_dir: PathBuf,
    /// Seed handed to the mock backend.
    pub seed: u64,
    #[serde(rename = "accommodation")]
    pub accommodations: Vec<AccommodationConfig>,
    pub quiz: Option<PathBuf>,
    /// Built-in taxonomy preset, `wheel` or `spa_corpus`.
    pub taxonomy: String,
    /// Taxonomy document overriding the preset.
    pub taxonomy_file: Option<PathBuf>,
    /// Keyword grid overriding the built-in one.
    pub grid_file: Option<PathBuf>,
    pub price_buckets: Vec<String>,
    /// Default list length for recommendation endpoints.
    pub top_n: usize,
    pub recommender: RecommenderConfig,
    pub backend: BackendConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind: IpAddr::from([127, 0, 0, 1]),
            port: 8080,
            data_dir: PathBuf::from("data"),
            seed: 7,
            accommodations: Vec::new(),
            quiz: None,
            taxonomy: "wheel".into(),
            taxonomy_file: None,
            grid_file: None,
            price_buckets: vec!["less_60".into(), "60_120".into(), "over_120".into()],
            top_n: 5,
            recommender: RecommenderConfig::default(),
            backend: BackendConfig::default(),
        }
    }
}

impl ServiceConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let mut config: Self =
            toml::from_str(&text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base);
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.data_dir);
        for p in [&mut self.quiz, &mut self.taxonomy_file, &mut self.grid_file]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
        for acm in &mut self.accommodations {
            fix(&mut acm.catalog);
            for p in [&mut acm.ratings, &mut acm.purchases, &mut acm.profiles]
                .into_iter()
                .flatten()
            {
                fix(p);
            }
        }
    }

    /// Every referenced input file must exist; accommodation ids must be unique.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut files: Vec<&PathBuf> = Vec::new();
        files.extend(&self.quiz);
        files.extend(&self.taxonomy_file);
        files.extend(&self.grid_file);
        for acm in &self.accommodations {
            files.push(&acm.catalog);
            files.extend(&acm.ratings);
            files.extend(&acm.purchases);
            files.extend(&acm.profiles);
        }
        if let Some(missing) = files.into_iter().find(|p| !p.is_file()) {
            return Err(ConfigError::Invalid(format!(
                "referenced file {} does not exist",
                missing.display()
            )));
        }
        let mut ids: Vec<&AccommodationId> = self.accommodations.iter().map(|a| &a.id).collect();
        ids.sort();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(ConfigError::Invalid(format!("accommodation {} listed twice", w[0])));
        }
        if self.top_n == 0 {
            return Err(ConfigError::Invalid("top_n must be positive".into()));
        }
        Ok(())
    }
}
