//! Harness configuration: a TOML file selecting corpus source, engine
//! endpoints and limits, judging thresholds, and parallelism.
//!
//! Resolution order for the file: an explicit `--config` path, then the
//! `RISEVAL_CONFIG` environment variable, then `riseval.toml` in the
//! working directory, then built-in defaults. Unknown keys are rejected
//! so typos fail loudly instead of silently using a default.

use riseval_hash::DistanceThreshold;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::corpus::Category;
use crate::engines::EngineId;
use crate::judge::Method;
use crate::store::sha256_bytes;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    pub paths: PathsConfig,
    pub acquire: AcquireConfig,
    pub engines: EnginesConfig,
    pub judge: JudgeConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    pub corpus_dir: PathBuf,
    pub runs_dir: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            corpus_dir: PathBuf::from("corpus"),
            runs_dir: PathBuf::from("runs"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcquireConfig {
    /// Base URL of the media repository (`<base>/w/api.php` must exist).
    pub api_base: String,
    /// Categories to acquire; each category name doubles as its search
    /// term.
    pub terms: Vec<String>,
    /// Images to fetch per category.
    pub per_term: usize,
    /// Width of the scaled rendition to download.
    pub width: u32,
    pub parallelism: usize,
    pub timeout_secs: u64,
    pub retries: u32,
}

impl Default for AcquireConfig {
    fn default() -> Self {
        Self {
            api_base: "https://commons.wikimedia.org".to_string(),
            terms: Category::ALL.iter().map(|c| c.as_str().to_string()).collect(),
            per_term: 100,
            width: 640,
            parallelism: 4,
            timeout_secs: 30,
            retries: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnginesConfig {
    /// Engines that participate in the run. The `fixture` engine is
    /// test-only and joins a run only when listed here explicitly.
    pub enabled: Vec<String>,
    /// Delay between consecutive requests to the same engine.
    pub politeness_delay_ms: u64,
    /// Random extra delay added on top, uniform in [0, jitter_ms].
    pub jitter_ms: u64,
    pub max_retries: u32,
    pub timeout_secs: u64,
    pub baidu: EngineEntry,
    pub bing: EngineEntry,
    pub google: EngineEntry,
    pub yandex: EngineEntry,
    pub fixture: FixtureEntry,
}

impl Default for EnginesConfig {
    fn default() -> Self {
        Self {
            enabled: EngineId::LIVE.iter().map(|e| e.as_str().to_string()).collect(),
            politeness_delay_ms: 5000,
            jitter_ms: 1000,
            max_retries: 3,
            timeout_secs: 30,
            baidu: EngineEntry::new("https://graph.baidu.com/upload"),
            bing: EngineEntry::new("https://www.bing.com/images/detail/search"),
            google: EngineEntry::new("https://www.google.com/searchbyimage/upload"),
            yandex: EngineEntry::new("https://yandex.com/images/search"),
            fixture: FixtureEntry::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineEntry {
    pub endpoint: String,
    pub upload_limit_bytes: u64,
}

impl EngineEntry {
    fn new(endpoint: &str) -> Self {
        Self {
            endpoint: endpoint.to_string(),
            upload_limit_bytes: 8 * 1024 * 1024,
        }
    }
}

impl Default for EngineEntry {
    fn default() -> Self {
        Self::new("")
    }
}

/// The test-only engine: results come from planted bundle files instead
/// of the network.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixtureEntry {
    pub bundle_dir: Option<PathBuf>,
    pub upload_limit_bytes: u64,
}

impl Default for FixtureEntry {
    fn default() -> Self {
        Self {
            bundle_dir: None,
            upload_limit_bytes: 8 * 1024 * 1024,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JudgeConfig {
    pub methods: Vec<String>,
    /// Maximum Hamming distance for a pHash identity match.
    pub phash_bits: u32,
    /// Maximum normalized L2 distance for a VisHash identity match.
    pub vishash_distance: f64,
    /// Concurrent thumbnail downloads.
    pub parallelism: usize,
    pub timeout_secs: u64,
    pub retries: u32,
}

impl Default for JudgeConfig {
    fn default() -> Self {
        Self {
            methods: vec!["phash".to_string(), "vishash".to_string()],
            phash_bits: 5,
            vishash_distance: 0.3,
            parallelism: 8,
            timeout_secs: 30,
            retries: 2,
        }
    }
}

impl HarnessConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let config: Self = toml::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Resolves the config: explicit path, `RISEVAL_CONFIG`, `riseval.toml`
    /// in the working directory, or defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self, ConfigError> {
        if let Some(path) = explicit {
            return Self::from_file(path);
        }
        if let Ok(path) = std::env::var("RISEVAL_CONFIG") {
            if !path.is_empty() {
                return Self::from_file(Path::new(&path));
            }
        }
        let local = Path::new("riseval.toml");
        if local.exists() {
            return Self::from_file(local);
        }
        let config = Self::default();
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.acquire.terms.is_empty() {
            return Err(ConfigError::Invalid("acquire.terms is empty".into()));
        }
        for term in &self.acquire.terms {
            if Category::parse(term).is_none() {
                return Err(ConfigError::Invalid(format!(
                    "unknown category {term:?} in acquire.terms"
                )));
            }
        }
        if self.acquire.per_term == 0 {
            return Err(ConfigError::Invalid("acquire.per_term must be positive".into()));
        }
        if self.acquire.width == 0 {
            return Err(ConfigError::Invalid("acquire.width must be positive".into()));
        }
        if self.acquire.parallelism == 0 || self.judge.parallelism == 0 {
            return Err(ConfigError::Invalid("parallelism must be positive".into()));
        }
        if self.engines.enabled.is_empty() {
            return Err(ConfigError::Invalid("engines.enabled is empty".into()));
        }
        for name in &self.engines.enabled {
            let id = EngineId::parse(name).ok_or_else(|| {
                ConfigError::Invalid(format!("unknown engine {name:?} in engines.enabled"))
            })?;
            match id {
                EngineId::Fixture => {
                    if self.engines.fixture.bundle_dir.is_none() {
                        return Err(ConfigError::Invalid(
                            "fixture engine enabled without engines.fixture.bundle_dir".into(),
                        ));
                    }
                }
                live => {
                    if self.engine(live).endpoint.is_empty() {
                        return Err(ConfigError::Invalid(format!(
                            "engine {name} has no endpoint"
                        )));
                    }
                }
            }
            if self.upload_limit(id) == 0 {
                return Err(ConfigError::Invalid(format!(
                    "engine {name} has a zero upload limit"
                )));
            }
        }
        if self.judge.methods.is_empty() {
            return Err(ConfigError::Invalid("judge.methods is empty".into()));
        }
        for method in &self.judge.methods {
            if Method::parse(method).is_none() {
                return Err(ConfigError::Invalid(format!(
                    "unknown judge method {method:?}"
                )));
            }
        }
        self.thresholds()?;
        Ok(())
    }

    pub fn categories(&self) -> Vec<Category> {
        let mut cats: Vec<Category> = self
            .acquire
            .terms
            .iter()
            .filter_map(|t| Category::parse(t))
            .collect();
        cats.sort();
        cats.dedup();
        cats
    }

    /// Endpoint and limit for a live engine. The fixture engine has no
    /// endpoint; callers dispatch on the id first.
    pub fn engine(&self, id: EngineId) -> &EngineEntry {
        match id {
            EngineId::Baidu => &self.engines.baidu,
            EngineId::Bing => &self.engines.bing,
            EngineId::Google => &self.engines.google,
            EngineId::Yandex => &self.engines.yandex,
            EngineId::Fixture => panic!("fixture engine has no endpoint entry"),
        }
    }

    pub fn engine_mut(&mut self, id: EngineId) -> &mut EngineEntry {
        match id {
            EngineId::Baidu => &mut self.engines.baidu,
            EngineId::Bing => &mut self.engines.bing,
            EngineId::Google => &mut self.engines.google,
            EngineId::Yandex => &mut self.engines.yandex,
            EngineId::Fixture => panic!("fixture engine has no endpoint entry"),
        }
    }

    pub fn upload_limit(&self, id: EngineId) -> u64 {
        match id {
            EngineId::Fixture => self.engines.fixture.upload_limit_bytes,
            live => self.engine(live).upload_limit_bytes,
        }
    }

    pub fn enabled_engines(&self) -> Vec<EngineId> {
        let mut ids: Vec<EngineId> = self
            .engines
            .enabled
            .iter()
            .filter_map(|n| EngineId::parse(n))
            .collect();
        ids.sort();
        ids.dedup();
        ids
    }

    pub fn methods(&self) -> Vec<Method> {
        let mut methods: Vec<Method> = self
            .judge
            .methods
            .iter()
            .filter_map(|m| Method::parse(m))
            .collect();
        methods.sort();
        methods.dedup();
        methods
    }

    pub fn thresholds(&self) -> Result<DistanceThreshold, ConfigError> {
        DistanceThreshold::new(self.judge.phash_bits, self.judge.vishash_distance)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Digest over the engine section, recorded in the run manifest so a
    /// changed endpoint or limit invalidates downstream stages.
    pub fn engine_config_digest(&self) -> String {
        let canon = serde_json::to_vec(&self.engines).expect("engine config serializes");
        sha256_bytes(&canon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let config = HarnessConfig::default();
        config.validate().unwrap();
        assert_eq!(config.acquire.per_term, 100);
        assert_eq!(config.acquire.width, 640);
        assert_eq!(config.engines.politeness_delay_ms, 5000);
        assert_eq!(config.enabled_engines().len(), 4);
        assert!(!config.enabled_engines().contains(&EngineId::Fixture));
        assert_eq!(config.methods(), vec![Method::PHash, Method::VisHash]);
        let t = config.thresholds().unwrap();
        assert_eq!(t.phash_bits, 5);
        assert_eq!(t.vishash_distance, 0.3);
    }

    #[test]
    fn file_overrides_and_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("riseval.toml");
        std::fs::write(
            &path,
            r#"
[acquire]
terms = ["diagram", "photo"]
per_term = 5
width = 320

[engines]
enabled = ["fixture"]

[engines.fixture]
bundle_dir = "/tmp/bundles"

[judge]
phash_bits = 3
"#,
        )
        .unwrap();
        let config = HarnessConfig::from_file(&path).unwrap();
        assert_eq!(config.acquire.per_term, 5);
        assert_eq!(config.acquire.width, 320);
        assert_eq!(config.categories(), vec![Category::Diagram, Category::Photo]);
        assert_eq!(config.enabled_engines(), vec![EngineId::Fixture]);
        assert_eq!(config.thresholds().unwrap().phash_bits, 3);
        // Untouched sections keep defaults.
        assert_eq!(config.judge.vishash_distance, 0.3);

        std::fs::write(&path, "[acquire]\nper_trem = 5\n").unwrap();
        assert!(matches!(
            HarnessConfig::from_file(&path),
            Err(ConfigError::Parse { .. })
        ));
    }

    #[test]
    fn invalid_settings_rejected() {
        let mut config = HarnessConfig::default();
        config.engines.enabled = vec!["altavista".into()];
        assert!(config.validate().is_err());

        let mut config = HarnessConfig::default();
        config.judge.vishash_distance = 1.5;
        assert!(config.validate().is_err());

        let mut config = HarnessConfig::default();
        config.engines.enabled = vec!["fixture".into()];
        assert!(config.validate().is_err());
        config.engines.fixture.bundle_dir = Some(PathBuf::from("/tmp/b"));
        assert!(config.validate().is_ok());

        let mut config = HarnessConfig::default();
        config.judge.methods = vec!["md5".into()];
        assert!(config.validate().is_err());

        let mut config = HarnessConfig::default();
        config.acquire.terms = vec!["landscape".into()];
        assert!(config.validate().is_err());
    }

    #[test]
    fn engine_digest_tracks_engine_settings_only() {
        let base = HarnessConfig::default();
        let mut tweaked = base.clone();
        tweaked.acquire.per_term = 7;
        assert_eq!(base.engine_config_digest(), tweaked.engine_config_digest());
        tweaked.engines.bing.upload_limit_bytes = 1024;
        assert_ne!(base.engine_config_digest(), tweaked.engine_config_digest());
    }

    #[test]
    fn explicit_path_wins() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("alt.toml");
        std::fs::write(&path, "[acquire]\nper_term = 9\n").unwrap();
        let config = HarnessConfig::load(Some(&path)).unwrap();
        assert_eq!(config.acquire.per_term, 9);
    }
}
