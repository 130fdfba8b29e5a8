use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const FIXTURE: &str = "\
# hand-counted fixture
PersonX eats bread\txWant\tto sleep\ttrain\tw1
PersonX eats bread\txWant\tto sleep\ttrain\tw2
PersonX eats bread\txReact\tfull\ttrain\tw1
PersonX eats bread\txAttr\thungry\ttrain\tw1
PersonX runs\txAttr\tnone\tdev\tw1
PersonX runs\toReact\ttired\tdev\tw2
";

fn ifthen(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifthen")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn workspace() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_path_buf();
    fs::write(path.join("atlas.tsv"), FIXTURE).unwrap();
    (dir, path)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn stats_prints_hand_counts() {
    let (_d, dir) = workspace();
    let o = ifthen(&dir, &["stats", "--atlas", "atlas.tsv", "--out", "stats.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let row = |label: &str| -> Vec<String> {
        let line = text.lines().find(|l| l.starts_with(label)).unwrap_or_else(|| panic!("no {label} row in\n{text}"));
        line[label.len()..].split_whitespace().map(str::to_string).collect()
    };
    // distinct non-empty triples: (eats, xWant), (eats, xReact), (eats, xAttr), (runs, oReact)
    assert_eq!(row("total")[..2], ["4", "6"]);
    assert_eq!(row("MentalState")[..2], ["2", "2"]);
    assert_eq!(row("Event")[..2], ["1", "1"]);
    assert_eq!(row("Persona")[..2], ["1", "1"]);
    assert_eq!(row("base events")[0], "2");
    assert_eq!(row("nodes in 2+ triples")[0], "1");
    assert_eq!(row("empty annotations")[0], "1");

    let report = json(&dir.join("stats.json"));
    assert_eq!(report["triples_total"], 4);
    assert_eq!(report["nodes_total"], 6);
    let resolved = json(&dir.join("stats.json.config.json"));
    assert_eq!(resolved["command"], "stats");
    assert_eq!(resolved["settings"]["atlas"], "atlas.tsv");
}

const TRAIN: &[&str] =
    &["train", "--atlas", "atlas.tsv", "--variant", "event-invol", "--epochs", "1", "--seed", "7", "--embed-dim", "8"];

#[test]
fn training_twice_gives_identical_checkpoints() {
    let (_d, dir) = workspace();
    for out in ["a.ckpt", "b.ckpt"] {
        let o = ifthen(&dir, &[TRAIN, &["--enc-hidden", "8", "--dec-hidden", "8", "--out", out]].concat());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = fs::read(dir.join("a.ckpt")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, fs::read(dir.join("b.ckpt")).unwrap());
    let trace = json(&dir.join("a.ckpt.trace.json"));
    assert_eq!(trace["epoch_loss"].as_array().unwrap().len(), 1);
}

#[test]
fn config_file_fills_in_and_flags_win() {
    let (_d, dir) = workspace();
    fs::write(dir.join("run.toml"), "epochs = 3\nenc-hidden = 6\ndec_hidden = 6\nlearning_rate = 0.01\n").unwrap();
    let o = ifthen(&dir, &[&["--config", "run.toml"], TRAIN, &["--out", "m.ckpt"]].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let s = &json(&dir.join("m.ckpt.config.json"))["settings"];
    assert_eq!(s["epochs"], 1, "flag beats config");
    assert_eq!(s["enc_hidden"], 6);
    assert_eq!(s["dec_hidden"], 6);
    assert_eq!(s["learning_rate"], 0.01);
    assert_eq!(s["batch_size"], 32, "untouched default");

    fs::write(dir.join("bad.toml"), "epochs = 3\nepoch = 4\n").unwrap();
    let o = ifthen(&dir, &[&["--config", "bad.toml"], TRAIN, &["--out", "m.ckpt"]].concat());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("epoch"), "{}", stderr(&o));
}

#[test]
fn generation_and_scoring_pipeline() {
    let (_d, dir) = workspace();
    let train = [TRAIN, &["--enc-hidden", "8", "--dec-hidden", "8", "--out", "m.ckpt"]].concat();
    assert!(ifthen(&dir, &train).status.success());
    for threads in ["1", "3"] {
        let out = format!("gen{threads}.jsonl");
        let o = ifthen(
            &dir,
            &["generate", "--checkpoint", "m.ckpt", "--atlas", "atlas.tsv", "--split", "train", "--beam-width", "4"]
                .into_iter()
                .chain(["--threads", threads, "--out", &out])
                .collect::<Vec<_>>(),
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let one = fs::read_to_string(dir.join("gen1.jsonl")).unwrap();
    assert_eq!(one, fs::read_to_string(dir.join("gen3.jsonl")).unwrap());
    assert_eq!(one.lines().count(), 9, "one train event times nine dimensions");

    let o = ifthen(&dir, &["eval-bleu", "--gen", "gen1.jsonl", "--atlas", "atlas.tsv", "--split", "train"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = ifthen(&dir, &["generate", "--variant", "nearest-neighbor", "--checkpoint", "m.ckpt", "--atlas", "atlas.tsv"]);
    assert_eq!(o.status.code(), Some(1), "missing --out");
}

#[test]
fn eval_bleu_matches_hand_computation() {
    let (_d, dir) = workspace();
    let gen = [
        r#"{"event":"PersonX eats bread","dimension":"xWant","beam_width":10,"entries":[{"text":"to sleep","score":-1.0},{"text":"to rest","score":-2.0}]}"#,
        r#"{"event":"PersonX runs","dimension":"oReact","beam_width":10,"entries":[{"text":"tired","score":-0.5}]}"#,
        r#"{"event":"PersonX runs","dimension":"xAttr","beam_width":10,"entries":[{"text":"lazy","score":-0.5}]}"#,
        r#"{"event":"PersonX flies","dimension":"xAttr","beam_width":10,"entries":[{"text":"free","score":-0.5}]}"#,
    ]
    .join("\n");
    fs::write(dir.join("gen.jsonl"), gen + "\n").unwrap();
    let o = ifthen(&dir, &["eval-bleu", "--gen", "gen.jsonl", "--atlas", "atlas.tsv", "--k", "10", "--out", "r.json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&dir.join("r.json"));
    // "to rest" against "to sleep": unigram precision 1/2, bigram 0 smoothed to 0.1/1
    let want = 100.0 * (1.0 + (0.5f64 * 0.1).sqrt()) / 2.0;
    assert!((r["xWant"]["bleu"].as_f64().unwrap() - want).abs() < 1e-9, "{r}");
    // a one-word candidate has no bigrams: p2 = 0 / max(1, 0), smoothed to 0.1
    assert!((r["oReact"]["bleu"].as_f64().unwrap() - 100.0 * 0.1f64.sqrt()).abs() < 1e-9, "{r}");
    assert_eq!(r["xAttr"]["omitted"], 1, "only annotation is `none`");
    assert_eq!(r["meta"]["skipped_no_gold"], 1);
    assert_eq!(r["meta"]["k"], 10);
    assert_eq!(r["meta"]["smoothing"], "all-orders");

    let o = ifthen(&dir, &["eval-bleu", "--gen", "gen.jsonl", "--atlas", "atlas.tsv", "--k", "1", "--out", "r1.json"]);
    assert!(o.status.success());
    assert_eq!(json(&dir.join("r1.json"))["xWant"]["bleu"], 100.0);
}

#[test]
fn exit_codes() {
    let (_d, dir) = workspace();
    assert_eq!(ifthen(&dir, &["--help"]).status.code(), Some(0));
    assert_eq!(ifthen(&dir, &["frobnicate"]).status.code(), Some(1));
    assert_eq!(ifthen(&dir, &["stats"]).status.code(), Some(1));
    assert_eq!(ifthen(&dir, &["train", "--atlas", "atlas.tsv", "--variant", "nearest-neighbor", "--out", "x"]).status.code(), Some(1));

    fs::write(dir.join("bad.tsv"), "PersonX eats\txWant\tto sleep\ttrain\tw1\nPersonX eats\txFoo\tx\ttrain\tw1\n").unwrap();
    let o = ifthen(&dir, &["stats", "--atlas", "bad.tsv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.tsv: line 2"), "{}", stderr(&o));
    assert_eq!(ifthen(&dir, &["stats", "--atlas", "missing.tsv"]).status.code(), Some(2));

    let o = ifthen(&dir, &["gradcheck", "--variants", "single9", "--epsilon", "0.5"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    let o = ifthen(&dir, &["gradcheck", "--variants", "event-pre-post", "--out", "g.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(json(&dir.join("g.json"))[0]["max_relative_error"].as_f64().unwrap() < 1e-3);
}

#[test]
fn help_lists_defaults() {
    let (_d, dir) = workspace();
    let train = stdout(&ifthen(&dir, &["train", "--help"]));
    for want in ["[default: single9]", "[default: 10]", "[default: 0.001]", "[default: 32]", "[default: 5]"] {
        assert!(train.contains(want), "train help lacks {want}");
    }
    let eval = stdout(&ifthen(&dir, &["eval-bleu", "--help"]));
    assert!(eval.contains("[default: all-orders]") && eval.contains("[default: 0.1]"));
    let prec = stdout(&ifthen(&dir, &["precision", "--help"]));
    assert!(prec.contains("[default: majority]"));
}

#[test]
fn ingest_normalizes_and_splits() {
    let (_d, dir) = workspace();
    let mut raw = String::new();
    for (i, verb) in ["eats", "buys", "paints", "fixes", "sells", "washes", "finds", "loses", "builds", "moves"].iter().enumerate() {
        raw.push_str(&format!("Alex {verb} Taylor's thing{i}\txWant\tto rest\tw1\n"));
    }
    fs::write(dir.join("raw.tsv"), raw).unwrap();
    fs::write(dir.join("names.txt"), "alex\ntaylor\n").unwrap();
    fs::write(dir.join("votes.tsv"), "PersonX moves PersonY's thing9\t1\n").unwrap();
    let o = ifthen(
        &dir,
        &["ingest", "--raw", "raw.tsv", "--names", "names.txt", "--coref", "votes.tsv", "--seed", "3", "--out", "a.jsonl"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = fs::read_to_string(dir.join("a.jsonl")).unwrap();
    assert_eq!(out.lines().count(), 9, "one event rejected by votes");
    assert!(out.contains("PersonX eats PersonY's thing0"));
    let splits: Vec<Value> = out.lines().map(|l| serde_json::from_str::<Value>(l).unwrap()["split"].clone()).collect();
    let train = splits.iter().filter(|s| *s == "train").count();
    assert!((6..=8).contains(&train), "{splits:?}");

    fs::write(dir.join("raw2.tsv"), "Alex eats\txWant\tto rest\n").unwrap();
    let o = ifthen(&dir, &["ingest", "--raw", "raw2.tsv", "--out", "b.tsv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("raw2.tsv: line 1"));
}
