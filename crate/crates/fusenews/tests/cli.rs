use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fusenews::dataset::write_articles;
use fusenews::export::read_heatmap_csv;
use fusenews::reports::report_reader;
use fusenews::weights::load_weights;
use fusenews_core::synthetic::synthetic_corpus;
use fusenews_core::text::{Article, Label};
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fusenews"));
    c.env_remove("FUSENEWS_LEXICON");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synthetic(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let path = dir.join(format!("synth-{n}-{seed}.csv"));
    write_articles(fs::File::create(&path).unwrap(), &synthetic_corpus(n, seed)).unwrap();
    path
}

/// Data rows of a report file (comment and header lines excluded).
fn rows(path: &Path) -> Vec<csv::StringRecord> {
    report_reader(fs::File::open(path).unwrap())
        .records()
        .map(Result::unwrap)
        .collect()
}

fn train_small(dir: &Path, data: &Path, out: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(out);
    let mut args = vec!["train", "--dataset", p(data), "--out", p(&out), "--epochs", "3", "--hidden-dim", "8", "--heads", "2"];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out.join("weights.json")
}

#[test]
fn features_for_a_small_dataset() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("d.csv");
    fs::write(
        &data,
        "id,title,text,label\na,BREAKING News!,The vote passed 52 to 48.,1\nb,Council meets,Budget talks resume today.,0\nc,Good day,A great result.,0\n",
    )
    .unwrap();
    let out = dir.path().join("f.csv");
    let o = run(&["features", "--dataset", p(&data), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("# fusenews features config_hash="));
    assert!(text.lines().nth(1).unwrap().starts_with("id,title_len_tokens,"));
    let r = rows(&out);
    assert_eq!(r.len(), 3);
    assert_eq!((&r[0][0], &r[0][9]), ("a", "1"));
    assert_eq!(&r[0][1], "2");
}

#[test]
fn features_of_an_empty_dataset_is_header_only() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("d.csv");
    fs::write(&data, "id,title,text,label\n").unwrap();
    let out = dir.path().join("f.csv");
    let o = run(&["features", "--dataset", p(&data), "--out", p(&out)]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("warning"));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 2);
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("d.csv");
    fs::write(&data, "id,text,label\na,b,1\n").unwrap();
    let out = dir.path().join("f.csv");
    let o = run(&["features", "--dataset", p(&data), "--out", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("\"title\""), "{}", stderr(&o));

    fs::write(&data, "id,title,text,label\na,t,b,1\nb,t,b,2\n").unwrap();
    let o = run(&["features", "--dataset", p(&data), "--out", p(&out)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let o = run(&["train", "--dataset", p(&dir.path().join("missing.csv"))]);
    assert_eq!(code(&o), 2);
    let o = run(&["train", "--bogus-flag"]);
    assert_eq!(code(&o), 2);
    let o = run(&["train", "--ablate", "most"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn single_class_data_exits_3() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("d.csv");
    let articles: Vec<Article> = (0..10)
        .map(|i| Article::new(format!("r{i}"), "Title", "some body text", Label::Real))
        .collect();
    write_articles(fs::File::create(&data).unwrap(), &articles).unwrap();
    for cmd in ["train", "eval"] {
        let o = run(&[cmd, "--dataset", p(&data), "--out", p(dir.path())]);
        assert_eq!(code(&o), 3, "{cmd}: {}", stderr(&o));
    }
}

#[test]
fn train_save_reload_predict() {
    let dir = TempDir::new().unwrap();
    let data = synthetic(dir.path(), 200, 1);
    let w1 = train_small(dir.path(), &data, "a", &[]);
    let w2 = train_small(dir.path(), &data, "b", &[]);
    assert_eq!(fs::read(&w1).unwrap(), fs::read(&w2).unwrap());
    assert!(rows(&dir.path().join("a/history.csv")).len() <= 3);

    let o = run(&["predict", "--weights", p(&w1), "--input", p(&data)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 200);
    // Same predictions as the in-memory model restored from the file.
    let (model, _) = load_weights(&fs::read_to_string(&w1).unwrap()).unwrap();
    let lexicon = fusenews::lexicon::bundled_lexicon();
    let corpus = synthetic_corpus(200, 1);
    for (line, article) in lines.iter().zip(&corpus) {
        let ex = fusenews_core::dataset::Example::from_article(article, &lexicon, None).unwrap();
        let p_fake = model.predict(&ex).unwrap()[1];
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], article.id);
        assert_eq!(fields[1].parse::<f64>().unwrap(), p_fake);
        assert_eq!(fields[2], if p_fake > 0.5 { "fake" } else { "real" });
    }
    let again = run(&["predict", "--weights", p(&w1), "--input", p(&data)]);
    assert_eq!(stdout(&again), stdout(&o));

    let o = run(&["predict", "--weights", p(&w1), "--title", "HELLO THERE", "--text", "zorblax park"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn semantic_only_weights_have_no_statistical_blocks() {
    let dir = TempDir::new().unwrap();
    let data = synthetic(dir.path(), 120, 2);
    let w = train_small(dir.path(), &data, "s", &["--ablate", "semantic-only"]);
    let text = fs::read_to_string(&w).unwrap();
    assert!(!text.contains("\"stat."));
    assert!(!text.contains("\"attention."));
    let full = fs::read_to_string(train_small(dir.path(), &data, "f", &[])).unwrap();
    assert!(full.contains("\"stat.scale\""));
}

#[test]
fn broken_weights_exit_4() {
    let dir = TempDir::new().unwrap();
    let data = synthetic(dir.path(), 100, 3);
    let w = train_small(dir.path(), &data, "m", &[]);
    let text = fs::read_to_string(&w).unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, text.replace("\"version\": 1", "\"version\": \"x\"")).unwrap();
    let o = run(&["predict", "--weights", p(&bad), "--input", p(&data)]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("version"), "{}", stderr(&o));
    fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&run(&["predict", "--weights", p(&bad), "--input", p(&data)])), 4);
}

#[test]
fn precomputed_embeddings_must_match_the_model() {
    let dir = TempDir::new().unwrap();
    let corpus = synthetic_corpus(60, 4);
    let data = dir.path().join("d.csv");
    write_articles(fs::File::create(&data).unwrap(), &corpus).unwrap();
    let write_emb = |name: &str, dim: usize| {
        let path = dir.path().join(name);
        let mut s = format!("dim={dim}\n");
        for (i, a) in corpus.iter().enumerate() {
            let v: Vec<String> = (0..dim).map(|k| format!("{}", ((i * 7 + k) % 11) as f64 / 11.0)).collect();
            s.push_str(&format!("{}\t{}\n", a.id, v.join(",")));
        }
        fs::write(&path, s).unwrap();
        path
    };
    let e4 = write_emb("e4.txt", 4);
    let e5 = write_emb("e5.txt", 5);
    let w = train_small(dir.path(), &data, "m", &["--embeddings", p(&e4)]);
    let ok = run(&["predict", "--weights", p(&w), "--input", p(&data), "--embeddings", p(&e4)]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    let o = run(&["predict", "--weights", p(&w), "--input", p(&data), "--embeddings", p(&e5)]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
    fs::write(dir.path().join("short.txt"), "dim=4\nsyn-000000\t1,2,3\n").unwrap();
    let o = run(&["predict", "--weights", p(&w), "--input", p(&data), "--embeddings", p(&dir.path().join("short.txt"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 2"));
}

#[test]
fn eval_writes_fold_and_aggregate_rows() {
    let dir = TempDir::new().unwrap();
    let corpus = synthetic_corpus(30, 5);
    let mut picked: Vec<Article> = corpus.iter().filter(|a| a.label == Label::Fake).take(5).cloned().collect();
    picked.extend(corpus.iter().filter(|a| a.label == Label::Real).take(5).cloned());
    let data = dir.path().join("ten.csv");
    write_articles(fs::File::create(&data).unwrap(), &picked).unwrap();
    let out = dir.path().join("e");
    let o = run(&["eval", "--dataset", p(&data), "--out", p(&out), "--epochs", "2", "--patience", "1", "--hidden-dim", "8", "--heads", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = rows(&out.join("metrics.csv"));
    assert_eq!(r.len(), 6);
    assert_eq!(&r[5][0], "mean");
    let f1: Vec<f64> = r[..5].iter().map(|x| x[4].parse().unwrap()).collect();
    let mean: f64 = r[5][4].parse().unwrap();
    assert!((mean - f1.iter().sum::<f64>() / 5.0).abs() < 1e-12);
    let t = rows(&out.join("timing.csv"));
    assert_eq!(t.len(), 6);
    assert!(t.iter().all(|x| x[3].parse::<f64>().unwrap() > 0.0));
}

#[test]
fn ablation_table_has_four_rows_in_order() {
    let dir = TempDir::new().unwrap();
    let data = synthetic(dir.path(), 60, 6);
    let out = dir.path().join("a");
    let o = run(&[
        "eval", "--ablation", "--dataset", p(&data), "--out", p(&out), "--epochs", "2", "--patience", "1", "--hidden-dim", "8", "--heads", "2",
        "--threads", "2",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(out.join("ablation.csv")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "config,f1,precision,recall");
    let names: Vec<String> = rows(&out.join("ablation.csv")).iter().map(|r| r[0].to_string()).collect();
    assert_eq!(names, ["semantic-only", "stat", "attention", "full"]);
}

#[test]
fn eval_is_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let data = synthetic(dir.path(), 80, 7);
    let go = |name: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = run(&[
            "eval", "--dataset", p(&data), "--out", p(&out), "--epochs", "2", "--patience", "1", "--hidden-dim", "8", "--heads", "2", "--threads",
            threads,
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        fs::read(out.join("metrics.csv")).unwrap()
    };
    assert_eq!(go("one", "1"), go("four", "4"));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = TempDir::new().unwrap();
    let data = synthetic(dir.path(), 60, 8);
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        format!(
            r#"{{"dataset": {:?}, "hidden_dim": 8, "heads": 2, "seed": 5, "train": {{"max_epochs": 2, "patience": 1}}}}"#,
            p(&data)
        ),
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = run(&["train", "--config", p(&cfg), "--seed", "9", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let history = fs::read_to_string(out.join("history.csv")).unwrap();
    assert!(history.starts_with("# fusenews history config_hash="));
    assert!(history.lines().next().unwrap().ends_with("seed=9"));
    assert!(rows(&out.join("history.csv")).len() <= 2);
    fs::write(&cfg, r#"{"hidden": 8}"#).unwrap();
    assert_eq!(code(&run(&["train", "--config", p(&cfg)])), 2);
}

#[test]
fn explain_writes_four_files_and_reports_efficiency() {
    let dir = TempDir::new().unwrap();
    let data = synthetic(dir.path(), 100, 9);
    let w = train_small(dir.path(), &data, "m", &[]);
    let out = dir.path().join("x");
    let o = run(&["explain", "--weights", p(&w), "--input", p(&data), "--id", "syn-000003", "--method", "both", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut files: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files, ["heatmap.csv", "heatmap.svg", "shapley.csv", "shapley.txt"]);
    let residual_line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("shapley efficiency residual:"))
        .map(String::from)
        .unwrap();
    let residual: f64 = residual_line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(residual.abs() <= 1e-8);

    let (labels, maps) = read_heatmap_csv(fs::File::open(out.join("heatmap.csv")).unwrap()).unwrap();
    assert_eq!(labels.len(), 9);
    assert_eq!(labels[8], "semantic");
    assert_eq!(maps[0].0, "mean");
    let (model, _) = load_weights(&fs::read_to_string(&w).unwrap()).unwrap();
    let article = synthetic_corpus(100, 9).into_iter().nth(3).unwrap();
    let ex = fusenews_core::dataset::Example::from_article(&article, &fusenews::lexicon::bundled_lexicon(), None).unwrap();
    let map = fusenews_core::explain::attention_heatmap(&model, &ex).unwrap();
    assert!(maps[0].1.max_abs_diff(&map.mean) <= 1e-9);
    for (h, m) in map.heads.iter().enumerate() {
        assert!(maps[h + 1].1.max_abs_diff(m) <= 1e-9);
    }
    let svg = fs::read_to_string(out.join("heatmap.svg")).unwrap();
    assert!(svg.contains("<svg") && svg.contains("config_hash="));

    let again = dir.path().join("y");
    run(&["explain", "--weights", p(&w), "--input", p(&data), "--id", "syn-000003", "--out", p(&again)]);
    for f in &files {
        assert_eq!(fs::read(out.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f}");
    }

    let sampled = dir.path().join("z");
    let o = run(&[
        "explain", "--weights", p(&w), "--title", "BIG NEWS", "--text", "zorblax", "--method", "shapley", "--permutations",
        "50", "--out", p(&sampled),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(fs::read_to_string(sampled.join("shapley.csv")).unwrap().contains("std_error"));
}

#[test]
fn explain_modes_that_cannot_run_exit_5() {
    let dir = TempDir::new().unwrap();
    let data = synthetic(dir.path(), 60, 10);
    let w = train_small(dir.path(), &data, "m", &["--ablate", "stat"]);
    let out = dir.path().join("x");
    for method in ["attention", "both"] {
        let o = run(&["explain", "--weights", p(&w), "--input", p(&data), "--method", method, "--out", p(&out)]);
        assert_eq!(code(&o), 5, "{}", stderr(&o));
        assert!(stderr(&o).contains("no attention in this configuration"));
    }
    let o = run(&["explain", "--weights", p(&w), "--input", p(&data), "--method", "shapley", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(&["explain", "--weights", p(&w), "--input", p(&data), "--method", "lime", "--out", p(&out)]);
    assert_eq!(code(&o), 5);
}

#[test]
fn lexicon_can_be_overridden_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let data = dir.path().join("d.csv");
    fs::write(&data, "id,title,text,label\na,Zany,zany zany,1\n").unwrap();
    let lex = dir.path().join("lex.csv");
    fs::write(&lex, "token,polarity\nzany,0.5\n").unwrap();
    let out = dir.path().join("f.csv");
    let o = bin()
        .args(["features", "--dataset", p(&data), "--out", p(&out)])
        .env("FUSENEWS_LEXICON", &lex)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(&rows(&out)[0][8], "0.5");
    let o = bin()
        .args(["features", "--dataset", p(&data), "--out", p(&out)])
        .env("FUSENEWS_LEXICON", dir.path().join("nope.csv"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
