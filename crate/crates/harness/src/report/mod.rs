//! Report rendering: coverage tables, metric curves, gap statistics,
//! and vector figures, all derived from a run's archived logs.
//!
//! Rendering is a pure function of (corpus snapshot, SER log, judgment
//! log, failure records, config): identical inputs produce byte-identical
//! CSVs and figures. Every number plotted in a figure also appears in a
//! CSV row.
//!
//! Metric denominators: a query counts toward an (engine, kind) series
//! when it was successfully submitted and parsed there; harness
//! failures (upload or parse) exclude the query rather than scoring it
//! zero, and the notices file reports how many were excluded. A query
//! the engine answered with zero results stays in the denominators of
//! retrievability and MRR (scoring 0) but has no precision samples.

pub mod svg;

use riseval_metrics::{
    aggregate_series, mean_with_standard_error, reciprocal_rank, JudgedRanking, MetricSeries,
    SeriesKey,
};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::config::HarnessConfig;
use crate::corpus::{self, Category, CorpusImage, CorpusSnapshot};
use crate::engines::{EngineId, FailStage, FailedQuery, ResultKind, SearchResultRecord};
use crate::judge::{Judgment, Method};
use crate::store::{self, Run, StoreError};
use crate::time;
use svg::{Bar, LineSeries};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("corpus: {0}")]
    Corpus(String),
    #[error("metrics: {0}")]
    Metrics(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Everything the renderer reads from disk.
pub struct ReportInputs {
    pub snapshot: CorpusSnapshot,
    pub corpus_digest: String,
    pub records: Vec<SearchResultRecord>,
    pub judgments: Vec<Judgment>,
    pub upload_failures: Vec<FailedQuery>,
    pub parse_failures: Vec<FailedQuery>,
    pub acquire_failures: usize,
}

pub struct ReportOutcome {
    pub report_dir: PathBuf,
    /// Files written, for the stage checksum record.
    pub outputs: Vec<PathBuf>,
    pub notices: Vec<String>,
    /// True when some engine interactions failed (exit code 2).
    pub partial: bool,
}

/// Report row groupings: the four categories, then the two class
/// rollups. A class aggregates the concatenation of its member
/// categories' query collections (weighting by query count), so every
/// rolled-up mean lies between the min and max of its constituents.
struct Grouping {
    label: &'static str,
    members: &'static [Category],
}

const GROUPINGS: [Grouping; 6] = [
    Grouping { label: "diagram", members: &[Category::Diagram] },
    Grouping { label: "schematic", members: &[Category::Schematic] },
    Grouping { label: "photo", members: &[Category::Photo] },
    Grouping { label: "photograph", members: &[Category::Photograph] },
    Grouping { label: "abstract", members: &[Category::Diagram, Category::Schematic] },
    Grouping { label: "natural", members: &[Category::Photo, Category::Photograph] },
];

/// Blues for abstract imagery, greens for natural.
fn category_color(category: Category) -> &'static str {
    match category {
        Category::Diagram => "#1565c0",
        Category::Schematic => "#42a5f5",
        Category::Photo => "#2e7d32",
        Category::Photograph => "#66bb6a",
    }
}

pub fn gather_inputs(config: &HarnessConfig, run: &Run) -> Result<ReportInputs, ReportError> {
    let (snapshot, corpus_digest) = corpus::load_snapshot(&config.paths.corpus_dir)
        .map_err(|e| ReportError::Corpus(e.to_string()))?;
    let records = store::read_log(&run.sers_log())?;
    let judgments = store::read_log(&run.judgments_log())?;
    let upload_failures = store::read_log(&run.failures_log())?;
    let parse_failures = match std::fs::read(run.root().join("parse_failures.json")) {
        Ok(bytes) => serde_json::from_slice(&bytes)?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    let acquire_failures =
        store::read_log::<serde_json::Value>(&corpus::failures_log_path(&config.paths.corpus_dir))?
            .len();
    Ok(ReportInputs {
        snapshot,
        corpus_digest,
        records,
        judgments,
        upload_failures,
        parse_failures,
        acquire_failures,
    })
}

/// Whether engine failures excluded any queries from the run's
/// metrics, using the same rule as [`render_report`]. Lets a resumed
/// pipeline pick the exit code without re-rendering.
pub fn run_is_partial(run: &Run) -> Result<bool, ReportError> {
    let records: Vec<SearchResultRecord> = store::read_log(&run.sers_log())?;
    let upload_failures: Vec<FailedQuery> = store::read_log(&run.failures_log())?;
    let parse_failures: Vec<FailedQuery> =
        match std::fs::read(run.root().join("parse_failures.json")) {
            Ok(bytes) => serde_json::from_slice(&bytes)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e.into()),
        };
    let has_records: HashSet<(EngineId, &str)> = records
        .iter()
        .map(|r| (r.engine, r.query_id.as_str()))
        .collect();
    let upload_excluded = upload_failures
        .iter()
        .filter(|f| f.stage == FailStage::Upload)
        .any(|f| !has_records.contains(&(f.engine, f.query_id.as_str())));
    Ok(upload_excluded || !parse_failures.is_empty())
}

/// One aggregated series plus the bits the CSVs need beyond
/// [`MetricSeries`] itself.
struct Rendered {
    engine: EngineId,
    kind: ResultKind,
    label: &'static str,
    series: MetricSeries,
    mrr_se: f64,
}

pub fn render_report(config: &HarnessConfig, run: &Run) -> Result<ReportOutcome, ReportError> {
    let inputs = gather_inputs(config, run)?;
    let report_dir = run.report_dir();
    std::fs::create_dir_all(&report_dir)?;
    let mut outputs = Vec::new();
    let mut notices = Vec::new();

    let engines = engines_in(&inputs);

    // Coverage tables, per result kind.
    for kind in ResultKind::ALL {
        let path = report_dir.join(format!("coverage_{}.csv", kind.as_str()));
        write_csv(&path, &coverage_rows(kind, &engines, &inputs.snapshot, &inputs.records))?;
        outputs.push(path);
    }

    // Harness-failure exclusions (distinguished from "engine gave no
    // results", which stays in the denominators).
    let has_records: HashSet<(EngineId, &str)> = inputs
        .records
        .iter()
        .map(|r| (r.engine, r.query_id.as_str()))
        .collect();
    let upload_excluded: HashSet<(EngineId, &str)> = inputs
        .upload_failures
        .iter()
        .filter(|f| f.stage == FailStage::Upload)
        .map(|f| (f.engine, f.query_id.as_str()))
        .filter(|key| !has_records.contains(key))
        .collect();
    let parse_excluded: HashSet<(EngineId, &str, ResultKind)> = inputs
        .parse_failures
        .iter()
        .filter_map(|f| f.kind.map(|k| (f.engine, f.query_id.as_str(), k)))
        .collect();

    let judged = build_judged(&inputs.judgments);
    let methods_present: BTreeSet<Method> =
        inputs.judgments.iter().map(|j| j.method).collect();
    for method in config.methods() {
        if !methods_present.contains(&method) && !inputs.judgments.is_empty() {
            notices.push(format!(
                "method {} requested but absent from the judgment log; its series are omitted",
                method.as_str()
            ));
        }
    }

    for method in methods_present.iter().copied() {
        let mut rendered = Vec::new();
        for engine in &engines {
            for kind in ResultKind::ALL {
                // Per-category judged rankings in corpus order; class
                // groupings concatenate these.
                let mut per_cat: BTreeMap<Category, Vec<JudgedRanking>> = BTreeMap::new();
                for image in &inputs.snapshot.images {
                    let id = image.id.as_str();
                    if upload_excluded.contains(&(*engine, id))
                        || parse_excluded.contains(&(*engine, id, kind))
                    {
                        continue;
                    }
                    let ranking = judged
                        .get(&(*engine, kind, method))
                        .and_then(|m| m.get(id))
                        .cloned()
                        .unwrap_or_else(JudgedRanking::empty);
                    for category in &image.categories {
                        per_cat.entry(*category).or_default().push(ranking.clone());
                    }
                }
                for grouping in &GROUPINGS {
                    let rankings: Vec<JudgedRanking> = grouping
                        .members
                        .iter()
                        .flat_map(|c| per_cat.get(c).cloned().unwrap_or_default())
                        .collect();
                    if rankings.is_empty() {
                        continue;
                    }
                    let key = SeriesKey {
                        engine: engine.as_str().to_string(),
                        result_kind: kind.as_str().to_string(),
                        category: grouping.label.to_string(),
                        hash_method: method.as_str().to_string(),
                    };
                    let series = aggregate_series(key, &rankings)
                        .map_err(|e| ReportError::Metrics(e.to_string()))?;
                    let rr: Vec<f64> = rankings.iter().map(reciprocal_rank).collect();
                    let (_, mrr_se) = mean_with_standard_error(&rr)
                        .map_err(|e| ReportError::Metrics(e.to_string()))?;
                    rendered.push(Rendered {
                        engine: *engine,
                        kind,
                        label: grouping.label,
                        series,
                        mrr_se,
                    });
                }
            }
        }
        outputs.extend(write_method_outputs(&report_dir, method, &rendered)?);
    }

    // Notices: anything a reader should know before trusting the tables.
    for shortfall in &inputs.snapshot.shortfalls {
        notices.push(format!(
            "acquire: category {} returned {} of {} requested references",
            shortfall.category.as_str(),
            shortfall.found,
            shortfall.requested
        ));
    }
    if inputs.acquire_failures > 0 {
        notices.push(format!(
            "acquire: {} download(s) failed; see the corpus failures log",
            inputs.acquire_failures
        ));
    }
    let mut upload_counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (engine, _) in &upload_excluded {
        *upload_counts.entry(engine.as_str()).or_insert(0) += 1;
    }
    for (engine, count) in upload_counts {
        notices.push(format!(
            "submit: {count} quer{} failed on {engine} and are excluded from its metrics",
            if count == 1 { "y" } else { "ies" }
        ));
    }
    let mut parse_counts: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for (engine, _, kind) in &parse_excluded {
        *parse_counts.entry((engine.as_str(), kind.as_str())).or_insert(0) += 1;
    }
    for ((engine, kind), count) in parse_counts {
        notices.push(format!(
            "parse: {count} bundle(s) unparsed for {engine} {kind}; those queries are excluded from that series"
        ));
    }
    notices.sort();
    let notices_path = report_dir.join("notices.txt");
    let notices_body = if notices.is_empty() {
        "none\n".to_string()
    } else {
        notices.join("\n") + "\n"
    };
    store::write_atomic(&notices_path, notices_body.as_bytes())?;
    outputs.push(notices_path);

    let provenance_path = report_dir.join("provenance.json");
    let rendered_methods: Vec<&str> = methods_present.iter().map(|m| m.as_str()).collect();
    let provenance = Provenance {
        run_id: &run.manifest.run_id,
        created_at: time::format(&run.manifest.created_at),
        corpus_digest: run.manifest.corpus_digest.as_deref(),
        engine_config_digest: run.manifest.engine_config_digest.as_deref(),
        thresholds: run.manifest.thresholds,
        methods: rendered_methods,
        corpus_images: inputs.snapshot.images.len(),
        records: inputs.records.len(),
        judgments: inputs.judgments.len(),
    };
    store::write_atomic(&provenance_path, &serde_json::to_vec_pretty(&provenance)?)?;
    outputs.push(provenance_path);

    let partial = !upload_excluded.is_empty() || !parse_excluded.is_empty();
    Ok(ReportOutcome {
        report_dir,
        outputs,
        notices,
        partial,
    })
}

#[derive(Serialize)]
struct Provenance<'a> {
    run_id: &'a str,
    created_at: String,
    corpus_digest: Option<&'a str>,
    engine_config_digest: Option<&'a str>,
    thresholds: riseval_hash::DistanceThreshold,
    methods: Vec<&'a str>,
    corpus_images: usize,
    records: usize,
    judgments: usize,
}

/// Engines appearing anywhere in the run's artifacts, in sorted order.
fn engines_in(inputs: &ReportInputs) -> Vec<EngineId> {
    let mut set: BTreeSet<EngineId> = inputs.records.iter().map(|r| r.engine).collect();
    set.extend(inputs.upload_failures.iter().map(|f| f.engine));
    set.extend(inputs.parse_failures.iter().map(|f| f.engine));
    set.into_iter().collect()
}

/// Judged rankings keyed by (engine, kind, method) then query id, with
/// relevance ordered by result position.
fn build_judged(
    judgments: &[Judgment],
) -> HashMap<(EngineId, ResultKind, Method), HashMap<&str, JudgedRanking>> {
    let mut grouped: HashMap<(EngineId, ResultKind, Method), HashMap<&str, Vec<(u32, bool)>>> =
        HashMap::new();
    for j in judgments {
        grouped
            .entry((j.engine, j.kind, j.method))
            .or_default()
            .entry(j.query_id.as_str())
            .or_default()
            .push((j.position, j.relevant));
    }
    grouped
        .into_iter()
        .map(|(key, queries)| {
            let rankings = queries
                .into_iter()
                .map(|(id, mut positions)| {
                    positions.sort_by_key(|(p, _)| *p);
                    (id, JudgedRanking::new(positions.into_iter().map(|(_, r)| r).collect()))
                })
                .collect();
            (key, rankings)
        })
        .collect()
}

/// Coverage counts: queries with at least one parsed SER of this kind,
/// per engine and category, with a unique-image total per engine and a
/// final row giving corpus sizes.
fn coverage_rows(
    kind: ResultKind,
    engines: &[EngineId],
    snapshot: &CorpusSnapshot,
    records: &[SearchResultRecord],
) -> Vec<Vec<String>> {
    let by_id: HashMap<&str, &CorpusImage> = snapshot
        .images
        .iter()
        .map(|img| (img.id.as_str(), img))
        .collect();
    let mut covered: HashMap<EngineId, HashSet<&str>> = HashMap::new();
    for record in records.iter().filter(|r| r.kind == kind) {
        covered
            .entry(record.engine)
            .or_default()
            .insert(record.query_id.as_str());
    }

    let mut rows = Vec::new();
    let mut header = vec!["engine".to_string()];
    header.extend(Category::ALL.iter().map(|c| c.as_str().to_string()));
    header.push("total_unique".to_string());
    rows.push(header);

    for engine in engines {
        let queries = covered.get(engine);
        let mut row = vec![engine.as_str().to_string()];
        for category in Category::ALL {
            let count = queries.map_or(0, |q| {
                q.iter()
                    .filter(|id| {
                        by_id
                            .get(*id)
                            .is_some_and(|img| img.categories.contains(&category))
                    })
                    .count()
            });
            row.push(count.to_string());
        }
        row.push(queries.map_or(0, |q| q.len()).to_string());
        rows.push(row);
    }

    let counts = snapshot.category_counts();
    let mut corpus_row = vec!["corpus".to_string()];
    for category in Category::ALL {
        corpus_row.push(counts.get(&category).copied().unwrap_or(0).to_string());
    }
    corpus_row.push(snapshot.images.len().to_string());
    rows.push(corpus_row);
    rows
}

/// Shortest round-trip decimal form, the same notation the JSON logs
/// use.
fn num(v: f64) -> String {
    format!("{v}")
}

fn write_csv(path: &Path, rows: &[Vec<String>]) -> Result<(), ReportError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.write_record(row).map_err(|e| ReportError::Csv(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| ReportError::Csv(e.to_string()))?;
    store::write_atomic(path, &bytes)?;
    Ok(())
}

fn write_method_outputs(
    report_dir: &Path,
    method: Method,
    rendered: &[Rendered],
) -> Result<Vec<PathBuf>, ReportError> {
    let mut outputs = Vec::new();

    let mut precision_rows = vec![vec![
        "engine".to_string(),
        "kind".to_string(),
        "category".to_string(),
        "k".to_string(),
        "mean".to_string(),
        "standard_error".to_string(),
        "n".to_string(),
    ]];
    let mut retrievability_rows = vec![vec![
        "engine".to_string(),
        "kind".to_string(),
        "category".to_string(),
        "c".to_string(),
        "mean".to_string(),
        "standard_error".to_string(),
        "n".to_string(),
    ]];
    let mut mrr_rows = vec![vec![
        "engine".to_string(),
        "kind".to_string(),
        "category".to_string(),
        "mrr".to_string(),
        "standard_error".to_string(),
        "queries".to_string(),
    ]];
    for r in rendered {
        let base = [
            r.engine.as_str().to_string(),
            r.kind.as_str().to_string(),
            r.label.to_string(),
        ];
        for point in &r.series.precision_at_k {
            let mut row = base.to_vec();
            row.extend([
                point.cutoff.to_string(),
                num(point.mean),
                num(point.standard_error),
                point.n.to_string(),
            ]);
            precision_rows.push(row);
        }
        for point in &r.series.retrievability_at_c {
            let mut row = base.to_vec();
            row.extend([
                point.cutoff.to_string(),
                num(point.mean),
                num(point.standard_error),
                point.n.to_string(),
            ]);
            retrievability_rows.push(row);
        }
        let mut row = base.to_vec();
        row.extend([
            num(r.series.mrr),
            num(r.mrr_se),
            r.series.queries_total.to_string(),
        ]);
        mrr_rows.push(row);
    }

    // Retrievability gap between the two class rollups, per engine and
    // kind: the largest class-mean difference across cutoffs.
    let mut gap_rows = vec![vec![
        "engine".to_string(),
        "kind".to_string(),
        "max_gap".to_string(),
        "at_cutoff".to_string(),
    ]];
    let mut by_engine_kind: BTreeMap<(EngineId, ResultKind), [Option<&Rendered>; 2]> =
        BTreeMap::new();
    for r in rendered {
        let slot = match r.label {
            "abstract" => 0,
            "natural" => 1,
            _ => continue,
        };
        by_engine_kind.entry((r.engine, r.kind)).or_default()[slot] = Some(r);
    }
    for ((engine, kind), classes) in by_engine_kind {
        let [Some(abstract_r), Some(natural_r)] = classes else {
            continue;
        };
        let mut max_gap = 0.0f64;
        let mut at_cutoff = 0u32;
        for (a, n) in abstract_r
            .series
            .retrievability_at_c
            .iter()
            .zip(&natural_r.series.retrievability_at_c)
        {
            let gap = (n.mean - a.mean).abs();
            if gap > max_gap {
                max_gap = gap;
                at_cutoff = a.cutoff;
            }
        }
        gap_rows.push(vec![
            engine.as_str().to_string(),
            kind.as_str().to_string(),
            num(max_gap),
            at_cutoff.to_string(),
        ]);
    }

    let method_name = method.as_str();
    for (name, rows) in [
        (format!("precision_{method_name}.csv"), &precision_rows),
        (format!("retrievability_{method_name}.csv"), &retrievability_rows),
        (format!("mrr_{method_name}.csv"), &mrr_rows),
        (format!("gaps_{method_name}.csv"), &gap_rows),
    ] {
        let path = report_dir.join(name);
        write_csv(&path, rows)?;
        outputs.push(path);
    }

    // Figures: one per (engine, kind), categories as colored lines/bars.
    let mut figure_groups: BTreeMap<(EngineId, ResultKind), Vec<&Rendered>> = BTreeMap::new();
    for r in rendered {
        if r.label != "abstract" && r.label != "natural" {
            figure_groups.entry((r.engine, r.kind)).or_default().push(r);
        }
    }
    for ((engine, kind), group) in figure_groups {
        let stem = format!("{method_name}_{}_{}", engine.as_str(), kind.as_str());
        let color_of = |label: &str| {
            Category::parse(label).map_or("#555555", category_color)
        };

        let precision_series: Vec<LineSeries> = group
            .iter()
            .filter(|r| !r.series.precision_at_k.is_empty())
            .map(|r| LineSeries {
                label: r.label.to_string(),
                color: color_of(r.label),
                points: r
                    .series
                    .precision_at_k
                    .iter()
                    .map(|p| (p.cutoff, p.mean, p.standard_error))
                    .collect(),
            })
            .collect();
        if !precision_series.is_empty() {
            let path = report_dir.join(format!("precision_{stem}.svg"));
            let title = format!(
                "precision@k, {} {} ({method_name})",
                engine.as_str(),
                kind.as_str()
            );
            store::write_atomic(
                &path,
                svg::line_chart(&title, "k", "precision@k", &precision_series).as_bytes(),
            )?;
            outputs.push(path);
        }

        let retrievability_series: Vec<LineSeries> = group
            .iter()
            .map(|r| LineSeries {
                label: r.label.to_string(),
                color: color_of(r.label),
                points: r
                    .series
                    .retrievability_at_c
                    .iter()
                    .map(|p| (p.cutoff, p.mean, p.standard_error))
                    .collect(),
            })
            .collect();
        if !retrievability_series.is_empty() {
            let path = report_dir.join(format!("retrievability_{stem}.svg"));
            let title = format!(
                "retrievability@c, {} {} ({method_name})",
                engine.as_str(),
                kind.as_str()
            );
            store::write_atomic(
                &path,
                svg::line_chart(&title, "c", "retrievability@c", &retrievability_series)
                    .as_bytes(),
            )?;
            outputs.push(path);
        }

        let bars: Vec<Bar> = group
            .iter()
            .map(|r| Bar {
                label: r.label.to_string(),
                color: color_of(r.label),
                value: r.series.mrr,
                error: r.mrr_se,
            })
            .collect();
        if !bars.is_empty() {
            let path = report_dir.join(format!("mrr_{stem}.svg"));
            let title = format!("MRR, {} {} ({method_name})", engine.as_str(), kind.as_str());
            store::write_atomic(&path, svg::bar_chart(&title, "MRR", &bars).as_bytes())?;
            outputs.push(path);
        }
    }

    Ok(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn image(id: &str, categories: Vec<Category>) -> CorpusImage {
        CorpusImage {
            id: id.to_string(),
            categories,
            source_page_url: String::new(),
            file_url: format!("http://m/{id}"),
            local_path: format!("files/{id}.png"),
            width: 640,
            height: 480,
            content_digest: id.to_string(),
            fetched_at: time::now(),
        }
    }

    fn record(engine: EngineId, kind: ResultKind, query: &str, position: u32) -> SearchResultRecord {
        SearchResultRecord {
            query_id: query.to_string(),
            engine,
            kind,
            position,
            ser_url: "s".into(),
            page_url: "p".into(),
            image_url: "i".into(),
            thumbnail_url: "t".into(),
            missing_fields: vec![],
            captured_at: time::now(),
        }
    }

    #[test]
    fn coverage_counts_queries_with_results() {
        let snapshot = CorpusSnapshot {
            images: vec![
                image("q1", vec![Category::Diagram]),
                image("q2", vec![Category::Diagram, Category::Schematic]),
                image("q3", vec![Category::Photo]),
                image("q4", vec![Category::Photo]),
            ],
            shortfalls: vec![],
        };
        let records = vec![
            record(EngineId::Bing, ResultKind::SimilarTo, "q1", 1),
            record(EngineId::Bing, ResultKind::SimilarTo, "q1", 2),
            record(EngineId::Bing, ResultKind::SimilarTo, "q2", 1),
            record(EngineId::Bing, ResultKind::PagesWith, "q3", 1),
        ];
        let rows = coverage_rows(
            ResultKind::SimilarTo,
            &[EngineId::Bing],
            &snapshot,
            &records,
        );
        assert_eq!(
            rows[0],
            vec!["engine", "diagram", "schematic", "photo", "photograph", "total_unique"]
        );
        // q1 and q2 have similar_to results; q2 counts in both of its
        // categories but once in the unique total.
        assert_eq!(rows[1], vec!["bing", "2", "1", "0", "0", "2"]);
        assert_eq!(rows[2], vec!["corpus", "2", "1", "2", "0", "4"]);
    }

    #[test]
    fn zero_result_engine_is_all_zero() {
        let snapshot = CorpusSnapshot {
            images: vec![image("q1", vec![Category::Photo])],
            shortfalls: vec![],
        };
        let rows = coverage_rows(ResultKind::PagesWith, &[EngineId::Google], &snapshot, &[]);
        assert_eq!(rows[1], vec!["google", "0", "0", "0", "0", "0"]);
    }

    #[test]
    fn judged_rankings_are_position_ordered() {
        let mk = |position, relevant| Judgment {
            query_id: "q1".into(),
            engine: EngineId::Bing,
            kind: ResultKind::SimilarTo,
            position,
            method: Method::PHash,
            distance: None,
            relevant,
            failure: crate::judge::JudgeFailure::None,
        };
        // Supplied out of order; ranking must follow positions.
        let judgments = [mk(3, true), mk(1, false), mk(2, false)];
        let judged = build_judged(&judgments);
        let ranking = &judged[&(EngineId::Bing, ResultKind::SimilarTo, Method::PHash)]["q1"];
        assert_eq!(ranking.first_relevant_rank(), Some(3));
        assert_eq!(ranking.retrieved_count(), 3);
    }

    #[test]
    fn class_rollup_lies_between_constituents() {
        // diagram: 2 queries found at rank 1 (retrievability@1 = 1.0)
        // schematic: 1 query absent (retrievability@1 = 0.0)
        let mk = |query: &str, relevant_first| Judgment {
            query_id: query.to_string(),
            engine: EngineId::Bing,
            kind: ResultKind::SimilarTo,
            position: 1,
            method: Method::PHash,
            distance: None,
            relevant: relevant_first,
            failure: crate::judge::JudgeFailure::None,
        };
        let judgments: Vec<Judgment> = vec![mk("d1", true), mk("d2", true)];
        let judged = build_judged(&judgments);
        let lookup = &judged[&(EngineId::Bing, ResultKind::SimilarTo, Method::PHash)];

        let images = vec![
            image("d1", vec![Category::Diagram]),
            image("d2", vec![Category::Diagram]),
            image("s1", vec![Category::Schematic]),
        ];
        let rankings_for = |members: &[Category]| -> Vec<JudgedRanking> {
            let mut out = Vec::new();
            for member in members {
                for img in images.iter().filter(|i| i.categories.contains(member)) {
                    out.push(
                        lookup
                            .get(img.id.as_str())
                            .cloned()
                            .unwrap_or_else(JudgedRanking::empty),
                    );
                }
            }
            out
        };
        let key = |category: &str| SeriesKey {
            engine: "bing".into(),
            result_kind: "similar_to".into(),
            category: category.into(),
            hash_method: "phash".into(),
        };
        let diagram =
            aggregate_series(key("diagram"), &rankings_for(&[Category::Diagram])).unwrap();
        let schematic =
            aggregate_series(key("schematic"), &rankings_for(&[Category::Schematic])).unwrap();
        let rollup = aggregate_series(
            key("abstract"),
            &rankings_for(&[Category::Diagram, Category::Schematic]),
        )
        .unwrap();
        let at1 = |s: &MetricSeries| s.retrievability_at_c[0].mean;
        assert_eq!(at1(&diagram), 1.0);
        assert_eq!(at1(&schematic), 0.0);
        // Weighted by query count: (2·1 + 1·0) / 3.
        assert!((at1(&rollup) - 2.0 / 3.0).abs() < 1e-12);
        assert!(at1(&rollup) >= at1(&schematic) && at1(&rollup) <= at1(&diagram));
    }

    #[test]
    fn number_formatting_is_shortest_round_trip() {
        assert_eq!(num(0.6), "0.6");
        assert_eq!(num(2.0 / 3.0), "0.6666666666666666");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.0), "0");
    }
}
