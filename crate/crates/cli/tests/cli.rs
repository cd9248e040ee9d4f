//! Exit-code contract: 0 on success, 2 when engine failures left the
//! run partial, 3 for configuration and usage errors.

use std::path::Path;

fn run_cli(args: &[&str]) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_riseval"))
        .args(args)
        .output()
        .expect("harness binary runs")
}

fn code(out: &std::process::Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn help_and_version_succeed() {
    let help = run_cli(&["--help"]);
    assert_eq!(code(&help), 0);
    assert!(String::from_utf8_lossy(&help.stdout).contains("acquire"));
    assert_eq!(code(&run_cli(&["--version"])), 0);
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(code(&run_cli(&["no-such-command"])), 3);
    assert_eq!(code(&run_cli(&["--no-such-flag", "report"])), 3);
}

#[test]
fn missing_config_file_exits_3() {
    let out = run_cli(&["--config", "/nonexistent/riseval.toml", "report"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn invalid_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("riseval.toml");
    std::fs::write(&path, "[acquire]\nper_term = 0\n").unwrap();
    let out = run_cli(&["--config", path.to_str().unwrap(), "report"]);
    assert_eq!(code(&out), 3, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn submit_with_unreachable_engine_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_dir = dir.path().join("corpus");
    write_one_image_corpus(&corpus_dir);
    let config_path = dir.path().join("riseval.toml");
    std::fs::write(
        &config_path,
        format!(
            r#"[paths]
corpus_dir = "{}"
runs_dir = "{}"

[engines]
enabled = ["baidu"]
politeness_delay_ms = 0
jitter_ms = 0
max_retries = 0
timeout_secs = 5

[engines.baidu]
endpoint = "http://127.0.0.1:1/upload"
"#,
            corpus_dir.display(),
            dir.path().join("runs").display(),
        ),
    )
    .unwrap();

    let out = run_cli(&["--config", config_path.to_str().unwrap(), "--run", "r", "submit"]);
    assert_eq!(code(&out), 2, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn write_one_image_corpus(corpus_dir: &Path) {
    use riseval_harness::corpus::{image_id, Category, CorpusImage, CorpusSnapshot};

    let files = corpus_dir.join("files");
    std::fs::create_dir_all(&files).unwrap();
    let bytes = riseval_fixtures::png_bytes(&riseval_fixtures::synth_rgb(7, 64, 48));
    let digest = riseval_harness::store::sha256_bytes(&bytes);
    let local_path = format!("files/{digest}.png");
    std::fs::write(corpus_dir.join(&local_path), &bytes).unwrap();
    let snapshot = CorpusSnapshot {
        images: vec![CorpusImage {
            id: image_id(&digest),
            categories: vec![Category::Diagram],
            source_page_url: "http://media.test/wiki/File:seed_7".to_string(),
            file_url: "http://media.test/thumb/seed_7?w=64".to_string(),
            local_path,
            width: 64,
            height: 48,
            content_digest: digest,
            fetched_at: riseval_harness::time::now(),
        }],
        shortfalls: Vec::new(),
    };
    std::fs::write(
        corpus_dir.join("corpus.json"),
        serde_json::to_vec_pretty(&snapshot).unwrap(),
    )
    .unwrap();
}
