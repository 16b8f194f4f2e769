use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(rel: &str) -> String {
    fixtures().join(rel).to_string_lossy().into_owned()
}

fn itinguard(args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_itinguard"));
    for (key, _) in std::env::vars() {
        if key.starts_with("ITINGUARD_") || key == "AERODATABOX_API_KEY" {
            cmd.env_remove(key);
        }
    }
    cmd.args(args).output().expect("binary runs")
}

fn with_sample_durations<'a>(args: &[&'a str], durations: &'a str) -> Vec<&'a str> {
    let mut v = vec!["--provider", "fixture", "--fixture-file", durations];
    v.extend_from_slice(args);
    v
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const CITIES: &str = "Sydney (SYD),Frankfurt (FRA),Cairo (CAI),Casablanca (CMN)";

#[test]
fn validate_sample_lists_three_issues() {
    let d = fixture("sample_durations.txt");
    let input = fixture("sample.json");
    let out = itinguard(&with_sample_durations(&["validate", &input], &d));
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("3 issues"));
    assert!(text.contains("stay_too_short  stop 0 Sydney (SYD)  observed 20h 0m, required 48h 0m"));
    assert!(text.contains("transit_too_short  segment 0 SYD -> FRA  observed 12h 0m, required 21h 0m"));
    assert!(text.contains("transit_too_long  segment 1 FRA -> CAI"));
}

#[test]
fn validate_corrected_fixture_is_clean() {
    let d = fixture("sample_durations.txt");
    let input = fixture("sample_corrected.json");
    let out = itinguard(&with_sample_durations(&["validate", &input], &d));
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn validate_missing_file_exits_2() {
    let out = itinguard(&["validate", "/nonexistent/itinerary.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_malformed_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, r#"[{"place": "Oslo (OSL)", "arrival_time": "2025-6-1 9:00", "departure_time": "2025-06-05 10:00"}]"#)
        .unwrap();
    let out = itinguard(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("invalid time format for Oslo (OSL)"));
}

#[test]
fn validate_json_output() {
    let d = fixture("sample_durations.txt");
    let input = fixture("sample.json");
    let out = itinguard(&with_sample_durations(&["--format", "json", "validate", &input], &d));
    assert_eq!(out.status.code(), Some(1));
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value[0]["report"]["issues"].as_array().unwrap().len(), 3);
    assert_eq!(value[0]["report"]["verdict"], "invalid");
}

#[test]
fn correct_sample_matches_corrected_fixture_bytes() {
    let d = fixture("sample_durations.txt");
    let input = fixture("sample.json");
    let out = itinguard(&with_sample_durations(&["correct", "--trace", &input], &d));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let expected = fs::read_to_string(fixtures().join("sample_corrected.json")).unwrap();
    assert_eq!(stdout(&out), expected);
    let trace = stderr(&out);
    assert!(trace.contains("4 adjustments in 1 pass(es)"));
    assert!(trace.contains("2025-06-08 06:00 -> 2025-06-09 10:00 (+28h 0m, stay_too_short)"));
}

#[test]
fn correct_output_revalidates_clean() {
    let d = fixture("sample_durations.txt");
    let input = fixture("sample.json");
    let dir = tempfile::tempdir().unwrap();
    let fixed = dir.path().join("fixed.json");
    let fixed_str = fixed.to_str().unwrap();
    let out = itinguard(&with_sample_durations(&["correct", &input, "-o", fixed_str], &d));
    assert_eq!(out.status.code(), Some(0));
    let out = itinguard(&with_sample_durations(&["validate", fixed_str], &d));
    assert_eq!(out.status.code(), Some(0));
    // already-valid input is unchanged
    let again = itinguard(&with_sample_durations(&["correct", fixed_str], &d));
    assert_eq!(stdout(&again), fs::read_to_string(&fixed).unwrap());
}

#[test]
fn correct_strict_unknown_route_exits_2() {
    let d = fixture("sample_durations.txt");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("unknown.json");
    fs::write(
        &path,
        r#"[{"place": "Oslo (OSL)", "arrival_time": "2025-06-01 10:00", "departure_time": "2025-06-05 10:00"},
            {"place": "Lima (LIM)", "arrival_time": "2025-06-06 10:00", "departure_time": "2025-06-09 10:00"}]"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let strict = itinguard(&with_sample_durations(&["--strict", "correct", p], &d));
    assert_eq!(strict.status.code(), Some(2));
    // lenient mode skips the segment
    let lenient = itinguard(&with_sample_durations(&["validate", p], &d));
    assert_eq!(lenient.status.code(), Some(0));
    assert!(stdout(&lenient).contains("unverifiable  segment 0 OSL -> LIM"));
}

#[test]
fn generate_replayed_sample_is_corrected() {
    let d = fixture("sample_durations.txt");
    let replay = fixture("replay");
    let out = itinguard(&with_sample_durations(
        &["generate", "--cities", CITIES, "--replay-dir", &replay, "--model-tag", "sample"],
        &d,
    ));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let expected = fs::read_to_string(fixtures().join("sample_corrected.json")).unwrap();
    assert_eq!(stdout(&out), expected);
    assert!(stderr(&out).contains("3 issues found"));
}

#[test]
fn generate_valid_recording_reports_zero_issues() {
    let d = fixture("sample_durations.txt");
    let replay = fixture("replay");
    let out = itinguard(&with_sample_durations(
        &["generate", "--cities", CITIES, "--replay-dir", &replay, "--model-tag", "valid"],
        &d,
    ));
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("0 issues found"));
}

#[test]
fn generate_broken_recordings_exit_4() {
    let replay = fixture("replay");
    let out = itinguard(&["generate", "--cities", CITIES, "--replay-dir", &replay, "--model-tag", "broken"]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(stderr(&out).contains("after 4 attempts"));
}

#[test]
fn bench_reproduces_corpus_rows() {
    let d = fixture("corpus/durations.txt");
    let manifest = fixture("corpus/manifest.json");
    let out = itinguard(&["--provider", "fixture", "--fixture-file", &d, "--workers", "4", "bench", &manifest]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let expected = "\
Model        Cities  Invalid Itin.  Invalid Seg.  Avg Issues/Itn.
gemini-2.0   4       48%            21.00%        0.63
gpt-4o-mini  4       97%            78.00%        2.34
";
    assert_eq!(stdout(&out), expected);

    let csv = itinguard(&["--provider", "fixture", "--fixture-file", &d, "--format", "csv", "bench", &manifest]);
    assert_eq!(
        stdout(&csv),
        "Model,Cities,Invalid Itin.,Invalid Seg.,Avg Issues/Itn.\ngemini-2.0,4,48.00,21.00,0.63\ngpt-4o-mini,4,97.00,78.00,2.34\n"
    );
}

#[test]
fn bench_empty_corpus_prints_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.json");
    fs::write(&manifest, "[]").unwrap();
    let out = itinguard(&["bench", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "Model  Cities  Invalid Itin.  Invalid Seg.  Avg Issues/Itn.\n");
}

#[test]
fn bench_skips_corrupt_file_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let good = fs::read_to_string(fixtures().join("sample.json")).unwrap();
    fs::write(dir.path().join("a.json"), &good).unwrap();
    fs::write(dir.path().join("b.json"), "{not json").unwrap();
    fs::write(dir.path().join("durations.txt"), "SYD FRA 1020\nFRA CAI 60\nCAI CMN 270\n").unwrap();
    let manifest = dir.path().join("manifest.json");
    fs::write(
        &manifest,
        r#"[{"file": "a.json", "model_tag": "m", "num_cities": 4},
            {"file": "b.json", "model_tag": "m", "num_cities": 4}]"#,
    )
    .unwrap();
    let d = dir.path().join("durations.txt");
    let out = itinguard(&[
        "--provider",
        "fixture",
        "--fixture-file",
        d.to_str().unwrap(),
        "bench",
        manifest.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("warning: skipping b.json"));
    // one itinerary, 2 of 3 segments bad, 3 issues
    assert!(stdout(&out).contains("m      4       100%           66.67%        3.00"), "{}", stdout(&out));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    let d = fixture("sample_durations.txt");
    fs::write(&cfg, format!(r#"{{"provider": "fixture", "fixture_file": {d:?}, "min_stay_hours": 12}}"#)).unwrap();
    let input = fixture("sample.json");
    let c = cfg.to_str().unwrap();
    // a 12h minimum stay accepts Sydney's 20h
    let out = itinguard(&["--config", c, "validate", &input]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("2 issues"), "{}", stdout(&out));
    // the flag wins over the file
    let out = itinguard(&["--config", c, "--min-stay-hours", "48", "validate", &input]);
    assert!(stdout(&out).contains("3 issues"));
}

#[test]
fn environment_is_lowest_precedence() {
    let input = fixture("sample.json");
    let d = fixture("sample_durations.txt");
    let out = Command::new(env!("CARGO_BIN_EXE_itinguard"))
        .env("ITINGUARD_PROVIDER", "fixture")
        .env("ITINGUARD_FIXTURE_FILE", &d)
        .env("ITINGUARD_MIN_STAY_HOURS", "12")
        .args(["validate", &input])
        .output()
        .unwrap();
    assert!(stdout(&out).contains("2 issues"), "{}", stderr(&out));
    let out = Command::new(env!("CARGO_BIN_EXE_itinguard"))
        .env("ITINGUARD_PROVIDER", "fixture")
        .env("ITINGUARD_FIXTURE_FILE", &d)
        .env("ITINGUARD_MIN_STAY_HOURS", "12")
        .args(["--min-stay-hours", "48", "validate", &input])
        .output()
        .unwrap();
    assert!(stdout(&out).contains("3 issues"));
}

#[test]
fn live_provider_without_key_exits_2() {
    let input = fixture("sample.json");
    let out = itinguard(&["--provider", "live", "validate", &input]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("AERODATABOX_API_KEY"));
}

#[test]
fn great_circle_default_runs_without_configuration() {
    let input = fixture("sample.json");
    let out = itinguard(&["validate", &input]);
    assert_eq!(out.status.code(), Some(1));
}
