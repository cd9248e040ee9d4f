//! Run-scoped persistence: append-only record logs, the run manifest with
//! stage gating, and the single-writer run lock.
//!
//! Logs are line-delimited JSON, one record per line. Appends are atomic
//! per line for a single writer; a partial trailing line left by a crash
//! is moved to a `.quarantine` file the next time the log is opened for
//! writing, so prior records stay intact.

use chrono::{DateTime, Utc};
use riseval_hash::DistanceThreshold;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, ErrorKind, Read, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::time;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("another writer holds the lock {0}")]
    LockHeld(PathBuf),
    #[error("checksum mismatch for {path}: manifest records {expected}, file has {actual}")]
    ChecksumMismatch {
        path: String,
        expected: String,
        actual: String,
    },
    #[error("corrupt record in {path} at line {line}: {reason}")]
    Corrupt {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("stage {0} has not completed")]
    StageIncomplete(String),
    #[error("run {0} already exists")]
    RunExists(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Appends records to a line-delimited log, repairing a partial trailing
/// line on open.
pub struct LogWriter {
    file: File,
}

impl LogWriter {
    pub fn open(path: &Path) -> Result<Self, StoreError> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        quarantine_partial_tail(path)?;
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self { file })
    }

    pub fn append<T: Serialize>(&mut self, record: &T) -> Result<(), StoreError> {
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }
}

/// Moves a trailing line that never received its newline (a crash
/// artifact) into `<path>.quarantine`.
fn quarantine_partial_tail(path: &Path) -> Result<(), StoreError> {
    let mut bytes = Vec::new();
    match File::open(path) {
        Ok(mut f) => f.read_to_end(&mut bytes)?,
        Err(e) if e.kind() == ErrorKind::NotFound => return Ok(()),
        Err(e) => return Err(e.into()),
    };
    if bytes.is_empty() || bytes.ends_with(b"\n") {
        return Ok(());
    }
    let keep = bytes.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
    let mut quarantine = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path.with_extension("quarantine"))?;
    quarantine.write_all(&bytes[keep..])?;
    quarantine.write_all(b"\n")?;
    let file = OpenOptions::new().write(true).open(path)?;
    file.set_len(keep as u64)?;
    Ok(())
}

/// Reads every record of a log. A missing file is an empty log. A
/// trailing line without a newline is ignored (it is quarantined on the
/// next write); any other malformed line is an error.
pub fn read_log<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, StoreError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut bytes = Vec::new();
    BufReader::new(file).read_to_end(&mut bytes)?;
    let complete = match bytes.iter().rposition(|b| *b == b'\n') {
        Some(i) => &bytes[..=i],
        None => return Ok(Vec::new()),
    };
    let mut records = Vec::new();
    for (idx, line) in complete.split(|b| *b == b'\n').enumerate() {
        if line.is_empty() {
            continue;
        }
        let record = serde_json::from_slice(line).map_err(|e| StoreError::Corrupt {
            path: path.display().to_string(),
            line: idx + 1,
            reason: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

/// Writes a whole file atomically (temp file + rename in the same
/// directory).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let parent = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(parent)?;
    let tmp = parent.join(format!(
        ".{}.tmp",
        path.file_name().map(|n| n.to_string_lossy()).unwrap_or_default()
    ));
    {
        let mut f = File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_data()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String, StoreError> {
    let mut file = File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Advisory single-writer lock: a lock file created with `create_new`.
/// Dropped (removed) when the holder goes away cleanly; a crash leaves it
/// behind, and the error message names the path to remove.
pub struct RunLock {
    path: PathBuf,
}

impl RunLock {
    pub fn acquire(dir: &Path) -> Result<Self, StoreError> {
        fs::create_dir_all(dir)?;
        let path = dir.join(".lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "pid {} at {}", std::process::id(), time::format(&time::now()));
                Ok(Self { path })
            }
            Err(e) if e.kind() == ErrorKind::AlreadyExists => Err(StoreError::LockHeld(path)),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for RunLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// Pipeline stages gated by the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Acquire,
    Submit,
    Judge,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Acquire, Stage::Submit, Stage::Judge, Stage::Report];

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Acquire => "acquire",
            Stage::Submit => "submit",
            Stage::Judge => "judge",
            Stage::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Pending,
    Complete,
    Failed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageRecord {
    pub status: StageStatus,
    /// Output files declared by the stage: path relative to the run root
    /// (or absolute, for the corpus snapshot) → SHA-256.
    #[serde(default)]
    pub outputs: BTreeMap<String, String>,
}

impl Default for StageRecord {
    fn default() -> Self {
        Self {
            status: StageStatus::Pending,
            outputs: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    #[serde(with = "time::ts")]
    pub created_at: DateTime<Utc>,
    pub corpus_digest: Option<String>,
    pub engine_config_digest: Option<String>,
    pub thresholds: DistanceThreshold,
    #[serde(default)]
    pub methods: Vec<String>,
    pub stages: BTreeMap<String, StageRecord>,
}

impl RunManifest {
    fn new(run_id: &str, thresholds: DistanceThreshold) -> Self {
        let stages = Stage::ALL
            .iter()
            .map(|s| (s.as_str().to_string(), StageRecord::default()))
            .collect();
        Self {
            run_id: run_id.to_string(),
            created_at: time::now(),
            corpus_digest: None,
            engine_config_digest: None,
            thresholds,
            methods: Vec::new(),
            stages,
        }
    }

    pub fn stage(&self, stage: Stage) -> StageRecord {
        self.stages.get(stage.as_str()).cloned().unwrap_or_default()
    }
}

/// An open run directory with the manifest loaded and the writer lock
/// held.
pub struct Run {
    root: PathBuf,
    pub manifest: RunManifest,
    _lock: RunLock,
}

impl Run {
    /// Opens an existing run or creates a fresh one.
    pub fn open_or_create(
        runs_dir: &Path,
        run_id: &str,
        thresholds: DistanceThreshold,
    ) -> Result<Self, StoreError> {
        let root = runs_dir.join(run_id);
        let lock = RunLock::acquire(&root)?;
        let manifest_path = root.join("manifest.json");
        let manifest = if manifest_path.exists() {
            serde_json::from_slice(&fs::read(&manifest_path)?)?
        } else {
            let manifest = RunManifest::new(run_id, thresholds);
            write_atomic(&manifest_path, &serde_json::to_vec_pretty(&manifest)?)?;
            manifest
        };
        Ok(Self {
            root,
            manifest,
            _lock: lock,
        })
    }

    /// Opens an existing run; fails if it has no manifest yet.
    pub fn open(runs_dir: &Path, run_id: &str) -> Result<Self, StoreError> {
        let root = runs_dir.join(run_id);
        let manifest_path = root.join("manifest.json");
        if !manifest_path.exists() {
            return Err(StoreError::Io(std::io::Error::new(
                ErrorKind::NotFound,
                format!("run {run_id} has no manifest at {}", manifest_path.display()),
            )));
        }
        let lock = RunLock::acquire(&root)?;
        let manifest = serde_json::from_slice(&fs::read(&manifest_path)?)?;
        Ok(Self {
            root,
            manifest,
            _lock: lock,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn sers_log(&self) -> PathBuf {
        self.root.join("sers.log")
    }

    pub fn judgments_log(&self) -> PathBuf {
        self.root.join("judgments.log")
    }

    pub fn failures_log(&self) -> PathBuf {
        self.root.join("failures.log")
    }

    pub fn raw_dir(&self) -> PathBuf {
        self.root.join("raw")
    }

    pub fn thumbs_dir(&self) -> PathBuf {
        self.root.join("thumbs")
    }

    pub fn report_dir(&self) -> PathBuf {
        self.root.join("report")
    }

    pub fn save_manifest(&self) -> Result<(), StoreError> {
        write_atomic(
            &self.root.join("manifest.json"),
            &serde_json::to_vec_pretty(&self.manifest)?,
        )
    }

    fn manifest_path_for(&self, path: &Path) -> String {
        path.strip_prefix(&self.root)
            .map(|rel| rel.to_string_lossy().into_owned())
            .unwrap_or_else(|_| path.to_string_lossy().into_owned())
    }

    fn resolve_manifest_path(&self, key: &str) -> PathBuf {
        let path = Path::new(key);
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.root.join(path)
        }
    }

    /// Marks a stage complete, recording the digest of each declared
    /// output file.
    pub fn mark_complete(&mut self, stage: Stage, outputs: &[PathBuf]) -> Result<(), StoreError> {
        let mut digests = BTreeMap::new();
        for path in outputs {
            digests.insert(self.manifest_path_for(path), sha256_file(path)?);
        }
        self.manifest.stages.insert(
            stage.as_str().to_string(),
            StageRecord {
                status: StageStatus::Complete,
                outputs: digests,
            },
        );
        self.save_manifest()
    }

    pub fn mark_failed(&mut self, stage: Stage) -> Result<(), StoreError> {
        let mut record = self.manifest.stage(stage);
        record.status = StageStatus::Failed;
        self.manifest.stages.insert(stage.as_str().to_string(), record);
        self.save_manifest()
    }

    /// Resets a stage and everything after it to pending.
    pub fn invalidate_from(&mut self, stage: Stage) -> Result<(), StoreError> {
        for s in Stage::ALL.iter().filter(|s| **s >= stage) {
            self.manifest
                .stages
                .insert(s.as_str().to_string(), StageRecord::default());
        }
        self.save_manifest()
    }

    /// True when the stage is complete and all its declared outputs still
    /// exist with the recorded digests.
    pub fn stage_verified(&self, stage: Stage) -> Result<bool, StoreError> {
        let record = self.manifest.stage(stage);
        if record.status != StageStatus::Complete {
            return Ok(false);
        }
        for (key, expected) in &record.outputs {
            let path = self.resolve_manifest_path(key);
            if !path.exists() {
                return Ok(false);
            }
            let actual = sha256_file(&path)?;
            if &actual != expected {
                return Err(StoreError::ChecksumMismatch {
                    path: key.clone(),
                    expected: expected.clone(),
                    actual,
                });
            }
        }
        Ok(true)
    }

    /// Like [`Run::stage_verified`] but demands completion.
    pub fn require_stage(&self, stage: Stage) -> Result<(), StoreError> {
        if self.stage_verified(stage)? {
            Ok(())
        } else {
            Err(StoreError::StageIncomplete(stage.as_str().to_string()))
        }
    }
}
