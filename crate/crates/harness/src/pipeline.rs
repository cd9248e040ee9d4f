//! Stage orchestration: acquire, submit, judge, report, with resume.
//!
//! Each stage records its outputs (with digests) in the run manifest
//! when it completes. The pipeline reruns a stage when its inputs
//! changed: a different corpus or engine configuration invalidates
//! submit and everything after it, different thresholds or methods
//! invalidate judge and report. Individual CLI subcommands call the
//! same stage helpers without the skip logic, so `judge` and `report`
//! always recompute when invoked directly.

use std::collections::HashSet;
use std::path::PathBuf;

use crate::config::HarnessConfig;
use crate::corpus::{self, CorpusSnapshot};
use crate::engines::{self, SubmitOutcome};
use crate::error::HarnessError;
use crate::judge::{self, JudgeSummary};
use crate::report::{self, ReportOutcome};
use crate::store::{Run, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StageAction {
    Ran,
    Skipped,
}

pub struct PipelineOutcome {
    pub stages: Vec<(Stage, StageAction)>,
    /// True when engine failures excluded queries from the report.
    pub partial: bool,
    pub report_dir: PathBuf,
    pub notices: Vec<String>,
}

/// Makes sure the corpus snapshot exists, acquiring it if not, and
/// returns it with its digest.
async fn ensure_corpus(
    config: &HarnessConfig,
) -> Result<(CorpusSnapshot, String, StageAction), HarnessError> {
    let action = if corpus::snapshot_path(&config.paths.corpus_dir).exists() {
        StageAction::Skipped
    } else {
        corpus::acquire_corpus(config).await?;
        StageAction::Ran
    };
    let (snapshot, digest) = corpus::load_snapshot(&config.paths.corpus_dir)?;
    Ok((snapshot, digest, action))
}

/// Removes raw bundles for queries no longer in the corpus so a
/// reparse cannot resurrect records for images that were dropped.
fn prune_stale_bundles(run: &Run, snapshot: &CorpusSnapshot) -> Result<(), HarnessError> {
    let ids: HashSet<&str> = snapshot.images.iter().map(|i| i.id.as_str()).collect();
    let raw = run.raw_dir();
    if !raw.exists() {
        return Ok(());
    }
    for engine_entry in std::fs::read_dir(&raw).map_err(crate::store::StoreError::from)? {
        let engine_dir = engine_entry.map_err(crate::store::StoreError::from)?.path();
        if !engine_dir.is_dir() {
            continue;
        }
        for query_entry in std::fs::read_dir(&engine_dir).map_err(crate::store::StoreError::from)? {
            let query_dir = query_entry.map_err(crate::store::StoreError::from)?.path();
            let known = query_dir
                .file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| ids.contains(n));
            if query_dir.is_dir() && !known {
                std::fs::remove_dir_all(&query_dir).map_err(crate::store::StoreError::from)?;
            }
        }
    }
    Ok(())
}

/// Submits the corpus to every enabled engine and parses the archived
/// bodies into the SER log.
pub async fn submit_stage(
    config: &HarnessConfig,
    run: &mut Run,
) -> Result<SubmitOutcome, HarnessError> {
    let (snapshot, corpus_digest) = corpus::load_snapshot(&config.paths.corpus_dir)?;
    run.manifest.corpus_digest = Some(corpus_digest);
    run.manifest.engine_config_digest = Some(config.engine_config_digest());
    run.save_manifest()?;
    prune_stale_bundles(run, &snapshot)?;
    match engines::submit_run(config, run, &snapshot.images).await {
        Ok(outcome) => {
            let outputs = [run.sers_log(), run.root().join("parse_failures.json")];
            run.mark_complete(Stage::Submit, &outputs)?;
            Ok(outcome)
        }
        Err(e) => {
            run.mark_failed(Stage::Submit)?;
            Err(e.into())
        }
    }
}

/// Judges every archived SER against its query image.
pub async fn judge_stage(
    config: &HarnessConfig,
    run: &mut Run,
) -> Result<JudgeSummary, HarnessError> {
    run.require_stage(Stage::Submit)?;
    let (snapshot, _) = corpus::load_snapshot(&config.paths.corpus_dir)?;
    run.manifest.thresholds = config.thresholds()?;
    run.manifest.methods = config.methods().iter().map(|m| m.as_str().to_string()).collect();
    run.save_manifest()?;
    match judge::judge_run(config, run, &snapshot.images).await {
        Ok(summary) => {
            let outputs = [run.judgments_log(), run.root().join("judge_summary.json")];
            run.mark_complete(Stage::Judge, &outputs)?;
            Ok(summary)
        }
        Err(e) => {
            run.mark_failed(Stage::Judge)?;
            Err(e.into())
        }
    }
}

/// Renders the report from the judgment log.
pub fn report_stage(
    config: &HarnessConfig,
    run: &mut Run,
) -> Result<ReportOutcome, HarnessError> {
    run.require_stage(Stage::Judge)?;
    match report::render_report(config, run) {
        Ok(outcome) => {
            run.mark_complete(Stage::Report, &outcome.outputs)?;
            Ok(outcome)
        }
        Err(e) => {
            run.mark_failed(Stage::Report)?;
            Err(e.into())
        }
    }
}

pub async fn run_pipeline(
    config: &HarnessConfig,
    run_id: &str,
) -> Result<PipelineOutcome, HarnessError> {
    let (_, corpus_digest, acquire_action) = ensure_corpus(config).await?;
    let mut stages = vec![(Stage::Acquire, acquire_action)];

    let mut run = Run::open_or_create(&config.paths.runs_dir, run_id, config.thresholds()?)?;
    run.mark_complete(Stage::Acquire, &[corpus::snapshot_path(&config.paths.corpus_dir)])?;

    let engine_digest = config.engine_config_digest();
    let method_names: Vec<String> =
        config.methods().iter().map(|m| m.as_str().to_string()).collect();

    let submit_fresh = run.stage_verified(Stage::Submit)?
        && run.manifest.corpus_digest.as_deref() == Some(corpus_digest.as_str())
        && run.manifest.engine_config_digest.as_deref() == Some(engine_digest.as_str());
    if submit_fresh {
        stages.push((Stage::Submit, StageAction::Skipped));
    } else {
        run.invalidate_from(Stage::Submit)?;
        submit_stage(config, &mut run).await?;
        stages.push((Stage::Submit, StageAction::Ran));
    }

    let judge_fresh = submit_fresh
        && run.stage_verified(Stage::Judge)?
        && run.manifest.thresholds == config.thresholds()?
        && run.manifest.methods == method_names;
    if judge_fresh {
        stages.push((Stage::Judge, StageAction::Skipped));
    } else {
        run.invalidate_from(Stage::Judge)?;
        judge_stage(config, &mut run).await?;
        stages.push((Stage::Judge, StageAction::Ran));
    }

    let report_fresh = judge_fresh && run.stage_verified(Stage::Report)?;
    let (partial, report_dir, notices) = if report_fresh {
        stages.push((Stage::Report, StageAction::Skipped));
        (report::run_is_partial(&run)?, run.report_dir(), Vec::new())
    } else {
        let outcome = report_stage(config, &mut run)?;
        stages.push((Stage::Report, StageAction::Ran));
        (outcome.partial, outcome.report_dir, outcome.notices)
    };

    Ok(PipelineOutcome {
        stages,
        partial,
        report_dir,
        notices,
    })
}
