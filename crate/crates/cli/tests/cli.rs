use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const GOLDEN: &str = "VN/Np thắng/V ./CH
anh/Pp 21/M tuổi/Nu ./CH
học__sinh/N đi/V học/V ./CH
sao/P vậy/T ?!/CH
ðường/N xa/A ./CH
bàn/N/V gỗ/N ./CH
";

fn vnpos(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vnpos"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn training_corpus(dir: &Path) -> PathBuf {
    let mut text = String::new();
    let words = [("tôi", "P"), ("anh", "P"), ("đọc", "V"), ("mua", "V"), ("sách", "N"), ("báo", "N")];
    for i in 0..40 {
        let (p, _) = words[i % 2];
        let (v, _) = words[2 + (i / 2) % 2];
        let (n, _) = words[4 + (i / 4) % 2];
        text.push_str(&format!("{p}/P {v}/V {n}/N học_sinh/N mới/A ./CH\n"));
    }
    text.push_str("cái/Nc bàn/N gỗ/N ./CH\nhọ/P bàn/V việc/N ./CH\n");
    let path = dir.join("train.txt");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn clean_reports_six_counts() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("in.txt"), GOLDEN).unwrap();
    let o = vnpos(dir.path(), &["clean", "in.txt", "-o", "out.txt", "--report", "rep.txt", "-q"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep = fs::read_to_string(dir.path().join("rep.txt")).unwrap();
    for id in ["R1\t1", "R2\t1", "R3\t1", "R4\t1", "R5\t1", "R6\t1"] {
        assert!(rep.contains(id), "{rep}");
    }
    let out = fs::read_to_string(dir.path().join("out.txt")).unwrap();
    assert!(out.starts_with("VN/Ny thắng/V"));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let train = training_corpus(dir.path());
    let train = train.to_str().unwrap();

    // Unknown flag: usage error, nothing written.
    let o = vnpos(dir.path(), &["train-linear", train, "-o", "m.bin", "--bogus"]);
    assert_eq!(code(&o), 1);
    assert!(!dir.path().join("m.bin").exists());

    // ds without clusters: configuration error.
    let o = vnpos(dir.path(), &["train", train, "-o", "m.bin", "--features", "spl+ds"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--clusters"));
    assert!(!dir.path().join("m.bin").exists());

    let o = vnpos(dir.path(), &["train", train, "-o", "m.bin", "--features", "spl+nope"]);
    assert_eq!(code(&o), 1);

    // Malformed corpus: data error naming file and line.
    fs::write(dir.path().join("bad.txt"), "a/N b/V\nc d/N\n").unwrap();
    let o = vnpos(dir.path(), &["train-scrdr", "bad.txt", "-o", "t.rdr"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.txt") && err.contains("line 2"), "{err}");
    assert!(!dir.path().join("t.rdr").exists());

    // Missing input and non-model files are data errors.
    assert_eq!(code(&vnpos(dir.path(), &["tag", "-m", "none.bin", train])), 2);
    assert_eq!(code(&vnpos(dir.path(), &["tag", "-m", train, train])), 2);

    // Too few sentences for the folds: configuration.
    fs::write(dir.path().join("two.txt"), "a/N b/V\nc/N d/V\n").unwrap();
    assert_eq!(code(&vnpos(dir.path(), &["kfold", "two.txt", "--folds", "5", "--tagger", "scrdr"])), 1);

    assert_eq!(code(&vnpos(dir.path(), &["--help"])), 0);
    for sub in ["clean", "lexicon", "train-linear", "train-scrdr", "tag", "eval", "kfold", "bench", "ablate"] {
        assert_eq!(code(&vnpos(dir.path(), &[sub, "--help"])), 0, "{sub}");
    }
}

#[test]
fn tag_uses_feature_sets_from_model_header() {
    let dir = TempDir::new().unwrap();
    let train = training_corpus(dir.path());
    let train = train.to_str().unwrap();
    fs::write(dir.path().join("raw.txt"), "tôi đọc sách mới .\n\nanh mua xe_đạp_sinh .\n").unwrap();

    let o = vnpos(dir.path(), &["train-linear", train, "-o", "m.bin", "--features", "spl+affix", "-q"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = vnpos(dir.path(), &["tag", "-m", "m.bin", "raw.txt", "-o", "tagged.txt", "-q"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let tagged = fs::read_to_string(dir.path().join("tagged.txt")).unwrap();

    // Same decisions as the library model trained with the same settings.
    let corpus = vnpos::corpus::parse_slash_format(&fs::read_to_string(train).unwrap(), &Default::default()).unwrap();
    let model = vnpos::linear::LinearModel::train(
        &corpus,
        &"spl+affix".parse().unwrap(),
        &vnpos::linear::TrainConfig::default(),
        None,
    )
    .unwrap();
    let loaded = vnpos::linear::load_model(&fs::read(dir.path().join("m.bin")).unwrap()).unwrap();
    assert_eq!(loaded.feature_sets().to_string(), "spl+affix");
    let mut expected = String::new();
    for line in ["tôi đọc sách mới .", "anh mua xe_đạp_sinh ."] {
        let words: Vec<&str> = line.split(' ').collect();
        let tags = model.decode_words(&words, model.default_mode());
        let toks: Vec<String> = words.iter().zip(tags).map(|(w, t)| format!("{w}/{t}")).collect();
        expected.push_str(&toks.join(" "));
        expected.push('\n');
    }
    assert_eq!(tagged, expected);

    let o = vnpos(dir.path(), &["train-scrdr", train, "-o", "t.rdr", "-q"]);
    assert_eq!(code(&o), 0);
    assert!(dir.path().join("t.rdr.lex").exists());
    let o = vnpos(dir.path(), &["tag", "-m", "t.rdr", "raw.txt", "-q"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 2);
}

#[test]
fn reruns_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let train = training_corpus(dir.path());
    let train = train.to_str().unwrap();
    fs::write(dir.path().join("raw.txt"), "tôi đọc sách .\n").unwrap();
    let runs: [&[&str]; 6] = [
        &["train-linear", train, "-o", "{}m.bin", "--features", "spl+bi+affix"],
        &["train-scrdr", train, "-o", "{}t.rdr"],
        &["kfold", train, "--folds", "3", "-o", "{}k.txt", "--csv", "{}k.csv"],
        &["kfold", train, "--folds", "3", "--tagger", "scrdr", "--parallel-folds", "-o", "{}ks.txt"],
        &["bench", train, "--folds", "3", "--speed-corpus", "raw.txt", "--reps", "3", "-o", "{}b.txt", "--speed-output", "{}speed.txt"],
        &["ablate", train, "--folds", "3", "--epochs", "2", "-o", "{}a.txt", "--csv", "{}a.csv"],
    ];
    for run in runs {
        for prefix in ["a_", "b_"] {
            let args: Vec<String> = ["--seed", "7", "-q"]
                .iter()
                .map(|s| s.to_string())
                .chain(run.iter().map(|a| a.replace("{}", prefix)))
                .collect();
            let args: Vec<&str> = args.iter().map(String::as_str).collect();
            let o = vnpos(dir.path(), &args);
            assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        }
    }
    for name in ["m.bin", "t.rdr", "t.rdr.lex", "k.txt", "k.csv", "ks.txt", "b.txt", "a.txt", "a.csv"] {
        let a = fs::read(dir.path().join(format!("a_{name}"))).unwrap();
        let b = fs::read(dir.path().join(format!("b_{name}"))).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let speed = fs::read_to_string(dir.path().join("a_speed.txt")).unwrap();
    assert!(speed.contains("Spd."));
}

#[test]
fn eval_needs_lexicon_for_linear_models() {
    let dir = TempDir::new().unwrap();
    let train = training_corpus(dir.path());
    let train = train.to_str().unwrap();
    assert_eq!(code(&vnpos(dir.path(), &["train", train, "-o", "m.bin", "-q"])), 0);
    assert_eq!(code(&vnpos(dir.path(), &["eval", "-m", "m.bin", train, "-q"])), 1);
    assert_eq!(code(&vnpos(dir.path(), &["lexicon", train, "-o", "lex.txt", "-q"])), 0);
    let o = vnpos(dir.path(), &["eval", "-m", "m.bin", train, "--lexicon", "lex.txt", "--csv", "e.csv", "-q"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("e.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("linear,spl+bi+affix,all,"));
}
