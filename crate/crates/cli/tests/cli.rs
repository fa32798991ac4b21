use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_qaforge");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("QAFORGE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn answers(path: &Path) -> Vec<(String, String, usize)> {
    let v: Value = serde_json::from_slice(&fs::read(path).unwrap()).unwrap();
    let mut out = Vec::new();
    for article in v["data"].as_array().unwrap() {
        for para in article["paragraphs"].as_array().unwrap() {
            for qa in para["qas"].as_array().unwrap() {
                for a in qa["answers"].as_array().unwrap() {
                    out.push((
                        qa["id"].as_str().unwrap().to_string(),
                        a["text"].as_str().unwrap().to_string(),
                        a["answer_start"].as_u64().unwrap() as usize,
                    ));
                }
            }
        }
    }
    out
}

#[test]
fn identity_synthesis_keeps_every_answer() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sr.json");
    let summary = ok(&[
        "synthesize",
        "--input",
        s(&fixture("squad_100.json")),
        "--output",
        s(&out),
        "--provider",
        "identity",
    ]);
    let summary: Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(summary["inputs"], 100);
    assert_eq!(summary["outputs"], 100);
    assert_eq!(summary["drops"], 0);
    assert_eq!(answers(&out), answers(&fixture("squad_100.json")));
    assert!(fs::read(dir.path().join("sr.json.drops.jsonl"))
        .unwrap()
        .is_empty());
    assert!(dir.path().join("sr.json.manifest.json").exists());
}

#[test]
fn chained_stages_match_synthesize() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n);
    let input = fixture("squad_100.json");
    let train = [
        "--aligner",
        "em",
        "--iterations",
        "4",
        "--seed",
        "7",
        "--jobs",
        "1",
    ];

    let mut args = vec!["synthesize", "--input", s(&input), "--output"];
    let one_shot = p("one.json");
    args.push(s(&one_shot));
    args.extend(["--translit", "latin"]);
    args.extend(train);
    ok(&args);

    let (split, tr, tl, aligned, chain) = (
        p("split.json"),
        p("tr.json"),
        p("tl.json"),
        p("al.txt"),
        p("chain.json"),
    );
    ok(&["split", "--input", s(&input), "--output", s(&split)]);
    ok(&[
        "translate",
        "--input",
        s(&split),
        "--output",
        s(&tr),
        "--provider",
        "identity",
    ]);
    ok(&[
        "transliterate",
        "--input",
        s(&tr),
        "--output",
        s(&tl),
        "--translit",
        "latin",
    ]);
    let mut args = vec!["align", "--input", s(&tl), "--output", s(&aligned)];
    args.extend(train);
    ok(&args);
    ok(&[
        "retrieve",
        "--input",
        s(&tl),
        "--alignments",
        s(&aligned),
        "--output",
        s(&chain),
    ]);

    assert_eq!(
        fs::read(&one_shot).unwrap(),
        fs::read(p("chain.json")).unwrap()
    );
    assert_eq!(
        fs::read(p("one.json.drops.jsonl")).unwrap(),
        fs::read(p("chain.json.drops.jsonl")).unwrap()
    );
}

#[test]
fn completed_stage_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let (input, out) = (fixture("squad_100.json"), dir.path().join("split.json"));
    let args = ["split", "--input", s(&input), "--output", s(&out)];
    ok(&args);
    let first = run(&args);
    let notice: Value = serde_json::from_slice(&first.stderr).unwrap();
    assert_eq!(notice["status"], "up_to_date");

    // a changed output invalidates the manifest
    fs::write(&out, "{}").unwrap();
    let again = run(&args);
    assert!(again.status.success());
    assert!(again.stderr.is_empty());
    assert_ne!(fs::read(&out).unwrap(), b"{}");

    let mut forced = args.to_vec();
    forced.push("--force");
    assert!(run(&forced).stderr.is_empty());
}

#[test]
fn pharaoh_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    let output = dir.path().join("out.txt");
    let text = "0-0 1-2 2-1\n\n0-1 3-3\n";
    fs::write(&input, text).unwrap();
    ok(&[
        "align",
        "--format",
        "pharaoh",
        "--input",
        s(&input),
        "--output",
        s(&output),
    ]);
    assert_eq!(fs::read_to_string(&output).unwrap(), text);
}

#[test]
fn aligns_parallel_text() {
    let dir = tempfile::tempdir().unwrap();
    let (src, tgt, out) = (
        dir.path().join("s.txt"),
        dir.path().join("t.txt"),
        dir.path().join("a.txt"),
    );
    fs::write(&src, "a b\nb c\n").unwrap();
    fs::write(&tgt, "x y\ny z\n").unwrap();
    ok(&[
        "align",
        "--format",
        "text",
        "--input",
        s(&src),
        "--target",
        s(&tgt),
        "--output",
        s(&out),
        "--aligner",
        "diagonal",
    ]);
    assert_eq!(fs::read_to_string(&out).unwrap(), "0-0 1-1\n0-0 1-1\n");
}

#[test]
fn perfect_predictions_score_full_marks() {
    let dir = tempfile::tempdir().unwrap();
    let preds = dir.path().join("preds.json");
    let map: serde_json::Map<String, Value> = answers(&fixture("squad_100.json"))
        .into_iter()
        .map(|(id, text, _)| (id, Value::String(text)))
        .collect();
    fs::write(&preds, serde_json::to_vec(&map).unwrap()).unwrap();
    let report = dir.path().join("report.json");
    let summary = ok(&[
        "evaluate",
        "--input",
        s(&fixture("squad_100.json")),
        "--predictions",
        s(&preds),
        "--output",
        s(&report),
    ]);
    let summary: Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(summary["exact_match"], 100.0);
    assert_eq!(summary["f1"], 100.0);
    let full: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(full["count"], 100);

    let table = ok(&[
        "analyze",
        "--input",
        s(&fixture("squad_100.json")),
        "--predictions",
        s(&preds),
    ]);
    assert!(table.contains("100.00"));
}

fn error_of(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stderr).expect("error JSON on stderr");
    assert_eq!(
        v["error"]["exit_code"].as_i64(),
        out.status.code().map(i64::from)
    );
    v["error"].clone()
}

#[test]
fn errors_are_json_with_stage_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");

    let e = run(&["synthesize", "--output", s(&out)]);
    assert_eq!(e.status.code(), Some(2));
    assert_eq!(error_of(&e)["kind"], "usage");

    let e = run(&[
        "synthesize",
        "--input",
        "/no/such/file.json",
        "--output",
        s(&out),
    ]);
    assert_eq!(e.status.code(), Some(3));
    assert_eq!(error_of(&e)["kind"], "io");

    let e = run(&[
        "synthesize",
        "--input",
        s(&fixture("squad_100.json")),
        "--output",
        s(&out),
        "--provider",
        "ftp:x",
    ]);
    assert_eq!(e.status.code(), Some(2));

    let e = run(&[
        "synthesize",
        "--input",
        s(&fixture("squad_100.json")),
        "--output",
        s(&out),
        "--provider",
        "http://127.0.0.1:9/translate",
    ]);
    assert_eq!(e.status.code(), Some(4));
    error_of(&e);

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0-0\n").unwrap();
    let e = run(&[
        "synthesize",
        "--input",
        s(&fixture("squad_100.json")),
        "--output",
        s(&out),
        "--alignments",
        s(&bad),
    ]);
    assert_eq!(e.status.code(), Some(5));
    assert_eq!(error_of(&e)["kind"], "alignment");

    let preds = dir.path().join("p.json");
    fs::write(&preds, "{}").unwrap();
    let e = run(&[
        "evaluate",
        "--input",
        s(&fixture("squad_100.json")),
        "--predictions",
        s(&preds),
    ]);
    assert_eq!(e.status.code(), Some(6));
    assert_eq!(error_of(&e)["kind"], "evaluation");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    let from_file = dir.path().join("from_file.json");
    let from_flag = dir.path().join("from_flag.json");
    fs::write(
        &config,
        format!(
            "input = {:?}\noutput = {:?}\nprovider = \"identity\"\naligner = \"diagonal\"\n",
            s(&fixture("squad_100.json")),
            s(&from_file)
        ),
    )
    .unwrap();
    ok(&["synthesize", "--config", s(&config)]);
    assert!(from_file.exists());
    ok(&[
        "synthesize",
        "--config",
        s(&config),
        "--output",
        s(&from_flag),
    ]);
    assert_eq!(fs::read(&from_file).unwrap(), fs::read(&from_flag).unwrap());

    fs::write(&config, "iteratons = 3\n").unwrap();
    let e = run(&["synthesize", "--config", s(&config)]);
    assert_eq!(e.status.code(), Some(2));
    assert_eq!(error_of(&e)["kind"], "config");
}
