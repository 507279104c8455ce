use std::path::Path;
use std::sync::Arc;

use vnpos::corpus::{
    build_lexicon, parse_raw, parse_slash_format, write_sentence, write_slash_format, Cleaner, FoldMode, Lexicon,
};
use vnpos::eval::{
    ablate, crossvalidate, evaluate, measure_speed, tag_corpus, CvOptions, EvalReport, MonotonicClock, TaggerConfig,
};
use vnpos::features::{load_cluster_file, ClusterMap, FeatureSets, TemplateSet};
use vnpos::linear::{load_model, save_model, DecodeMode, LinearModel, LinearTagger, TrainConfig, MAGIC};
use vnpos::scrdr::{lexicon_path, GrowParams, ScrdrTagger, TREE_HEADER};
use vnpos::{TagSet, TaggedCorpus, Tagger};

use crate::error::{Failure, Result};
use crate::files::{emit, read_bytes, read_text, write_atomic};
use crate::{
    AblateArgs, BenchArgs, CleanArgs, Cli, Command, CvArgs, EvalArgs, LexiconArgs, LinearOpts, ScrdrOpts, TagArgs,
    TaggerKind, TrainLinearArgs, TrainScrdrArgs,
};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Clean(a) => clean(cli, a),
        Command::Lexicon(a) => lexicon(cli, a),
        Command::TrainLinear(a) => train_linear(cli, a),
        Command::TrainScrdr(a) => train_scrdr(cli, a),
        Command::Tag(a) => tag(a),
        Command::Eval(a) => eval(cli, a),
        Command::Kfold(a) => kfold(cli, &a.cv).map(|_| ()),
        Command::Bench(a) => bench(cli, a),
        Command::Ablate(a) => run_ablate(cli, a),
    }
}

fn tagset(cli: &Cli) -> Result<TagSet> {
    match cli.tagset.as_str() {
        "open" => Ok(TagSet::builtin(true)),
        "closed" => Ok(TagSet::builtin(false)),
        path => {
            let text = read_text(Path::new(path))?;
            TagSet::closed(text.lines().map(str::trim).filter(|l| !l.is_empty()))
                .ok_or_else(|| Failure::data(format!("{path}: tagset file holds a malformed tag")))
        }
    }
}

fn load_corpus(path: &Path, tagset: &TagSet) -> Result<TaggedCorpus> {
    let text = read_text(path)?;
    let mut corpus = parse_slash_format(&text, tagset).map_err(|e| Failure::from(e).in_file(&path.display().to_string()))?;
    corpus.source_id = path.display().to_string();
    Ok(corpus)
}

fn parse_mode(mode: Option<&str>) -> Result<Option<DecodeMode>> {
    mode.map(|m| m.parse().map_err(Failure::usage)).transpose()
}

struct LinearSetup {
    sets: FeatureSets,
    train: TrainConfig,
    mode: Option<DecodeMode>,
}

/// Validate linear flags without touching any file.
fn linear_setup(opts: &LinearOpts, seed: u64) -> Result<LinearSetup> {
    let sets: FeatureSets = opts.features.parse().map_err(|e: vnpos::features::FeatureError| Failure::usage(e.to_string()))?;
    if sets.contains(TemplateSet::Clusters) && opts.clusters.is_none() {
        return Err(Failure::usage("feature set `ds` needs --clusters <file>"));
    }
    let batch_size = match opts.batch_size.as_str() {
        "full" => None,
        n => Some(
            n.parse::<usize>()
                .map_err(|_| Failure::usage(format!("--batch-size must be a positive integer or `full`, got `{n}`")))?,
        ),
    };
    let train = TrainConfig {
        epochs: opts.epochs,
        learning_rate: opts.learning_rate,
        l2: opts.l2,
        seed,
        shuffle: !opts.no_shuffle,
        loss: opts.loss.parse().map_err(Failure::usage)?,
        batch_size,
        record_loss: false,
    };
    train.validate().map_err(Failure::from)?;
    Ok(LinearSetup {
        sets,
        train,
        mode: parse_mode(opts.mode.as_deref())?,
    })
}

fn load_clusters(opts: &LinearOpts, sets: Option<&FeatureSets>) -> Result<Option<Arc<ClusterMap>>> {
    let wanted = sets.is_none_or(|s| s.contains(TemplateSet::Clusters));
    match &opts.clusters {
        Some(p) if wanted => Ok(Some(Arc::new(load_cluster_file(p)?))),
        _ => Ok(None),
    }
}

fn grow_params(opts: &ScrdrOpts) -> Result<GrowParams> {
    let p = GrowParams {
        min_fired: opts.min_fired,
        min_gain: opts.min_gain,
        max_depth: opts.max_depth,
    };
    p.validate()?;
    Ok(p)
}

fn clean(cli: &Cli, a: &CleanArgs) -> Result<()> {
    let tagset = tagset(cli)?;
    let corpus = load_corpus(&a.input, &tagset)?;
    let (cleaned, report) = Cleaner::new(tagset).clean(&corpus);
    write_atomic(&a.output, write_slash_format(&cleaned).as_bytes())?;
    emit(a.report.as_deref(), &report.render_table())
}

fn lexicon(cli: &Cli, a: &LexiconArgs) -> Result<()> {
    let corpus = load_corpus(&a.corpus, &tagset(cli)?)?;
    emit(a.output.as_deref(), &build_lexicon(&corpus)?.to_text())
}

fn train_linear(cli: &Cli, a: &TrainLinearArgs) -> Result<()> {
    let setup = linear_setup(&a.opts, cli.seed)?;
    let clusters = load_clusters(&a.opts, Some(&setup.sets))?;
    let corpus = load_corpus(&a.corpus, &tagset(cli)?)?;
    let model = LinearModel::train(&corpus, &setup.sets, &setup.train, clusters)?;
    log::info!(
        "{} labels, {} features, training accuracy {:.4}",
        model.labels().len(),
        model.num_features(),
        model.accuracy_on(&corpus, setup.mode.unwrap_or(model.default_mode()))
    );
    write_atomic(&a.output, &save_model(&model)?)
}

fn train_scrdr(cli: &Cli, a: &TrainScrdrArgs) -> Result<()> {
    let params = grow_params(&a.opts)?;
    let corpus = load_corpus(&a.corpus, &tagset(cli)?)?;
    let (tagger, log) = ScrdrTagger::train(&corpus, &params)?;
    log::info!(
        "{} exception rules, training errors {} -> {}",
        log.attachments.len(),
        log.initial_errors,
        log.final_errors()
    );
    write_atomic(&lexicon_path(&a.output), tagger.lexicon_text().as_bytes())?;
    write_atomic(&a.output, tagger.tree_text().as_bytes())
}

enum Loaded {
    Linear(LinearTagger),
    Scrdr(ScrdrTagger),
}

impl Loaded {
    fn tagger(&self) -> &dyn Tagger {
        match self {
            Loaded::Linear(t) => t,
            Loaded::Scrdr(t) => t,
        }
    }
}

/// Open either model kind, recognised by its first bytes.
fn load_any(path: &Path, mode: Option<DecodeMode>) -> Result<Loaded> {
    let name = path.display().to_string();
    let bytes = read_bytes(path)?;
    if bytes.starts_with(MAGIC) {
        let model = load_model(&bytes).map_err(|e| Failure::from(e).in_file(&name))?;
        let tagger = LinearTagger::new(model);
        let mode = mode.unwrap_or(tagger.mode);
        return Ok(Loaded::Linear(tagger.with_mode(mode)));
    }
    if bytes.starts_with(TREE_HEADER.as_bytes()) {
        if mode.is_some() {
            return Err(Failure::usage("--mode applies to linear models only"));
        }
        let tree = String::from_utf8(bytes).map_err(|_| Failure::data(format!("{name}: not UTF-8")))?;
        let lex = read_text(&lexicon_path(path))?;
        return ScrdrTagger::from_texts(&tree, &lex)
            .map(Loaded::Scrdr)
            .map_err(|e| Failure::from(e).in_file(&name));
    }
    Err(Failure::data(format!("{name}: not a model file")))
}

fn tag(a: &TagArgs) -> Result<()> {
    let mode = parse_mode(a.mode.as_deref())?;
    let loaded = load_any(&a.model, mode)?;
    let text = read_text(&a.input)?;
    let mut out = String::new();
    for s in parse_raw(&text) {
        write_sentence(&mut out, &loaded.tagger().tag_sentence(&s));
        out.push('\n');
    }
    emit(a.output.as_deref(), &out)
}

fn eval(cli: &Cli, a: &EvalArgs) -> Result<()> {
    let mode = parse_mode(a.mode.as_deref())?;
    let loaded = load_any(&a.model, mode)?;
    let lexicon = match (&a.lexicon, &loaded) {
        (Some(p), _) => {
            Lexicon::from_text(&read_text(p)?).map_err(|e| Failure::from(e).in_file(&p.display().to_string()))?
        }
        (None, Loaded::Scrdr(t)) => t.initial.lexicon().clone(),
        (None, Loaded::Linear(t)) => t
            .model
            .lexicon()
            .cloned()
            .ok_or_else(|| Failure::usage("this linear model stores no lexicon; pass --lexicon <file>"))?,
    };
    let gold = load_corpus(&a.gold, &tagset(cli)?)?;
    let pred = tag_corpus(loaded.tagger(), &gold);
    let totals = evaluate(&pred, &gold, &lexicon)?;
    let report = EvalReport {
        tagger_id: match &loaded {
            Loaded::Linear(_) => "linear".into(),
            Loaded::Scrdr(_) => "scrdr".into(),
        },
        feature_sets: match &loaded {
            Loaded::Linear(t) => t.model.feature_sets().to_string(),
            Loaded::Scrdr(_) => "rules".into(),
        },
        totals,
        folds: Vec::new(),
    };
    write_reports(&report, a.output.as_deref(), a.csv.as_deref())
}

fn write_reports(report: &EvalReport, text: Option<&Path>, csv: Option<&Path>) -> Result<()> {
    if let Some(p) = csv {
        write_atomic(p, report.to_csv().as_bytes())?;
    }
    emit(text, &report.render_table())
}

fn cv_options(contiguous: bool, parallel: bool) -> CvOptions {
    CvOptions {
        mode: if contiguous { FoldMode::Contiguous } else { FoldMode::Shuffled },
        parallel,
    }
}

fn tagger_config(cli: &Cli, cv: &CvArgs) -> Result<TaggerConfig> {
    Ok(match cv.tagger {
        TaggerKind::Linear => {
            let setup = linear_setup(&cv.linear, cli.seed)?;
            let clusters = load_clusters(&cv.linear, Some(&setup.sets))?;
            TaggerConfig::Linear {
                sets: setup.sets,
                train: setup.train,
                clusters,
                mode: setup.mode,
            }
        }
        TaggerKind::Scrdr => TaggerConfig::Scrdr {
            params: grow_params(&cv.scrdr)?,
        },
    })
}

fn kfold(cli: &Cli, cv: &CvArgs) -> Result<(TaggerConfig, TaggedCorpus)> {
    let cfg = tagger_config(cli, cv)?;
    let corpus = load_corpus(&cv.corpus, &tagset(cli)?)?;
    let report = crossvalidate(&corpus, cv.folds, cli.seed, &cfg, cv_options(cv.contiguous, cv.parallel_folds))?;
    write_reports(&report, cv.output.as_deref(), cv.csv.as_deref())?;
    Ok((cfg, corpus))
}

fn bench(cli: &Cli, a: &BenchArgs) -> Result<()> {
    if a.reps < 3 {
        return Err(Failure::usage(format!("--reps must be at least 3, got {}", a.reps)));
    }
    let (cfg, corpus) = kfold(cli, &a.cv)?;
    let Some(path) = &a.speed_corpus else {
        return Ok(());
    };
    let tagger = cfg.train(&corpus)?;
    let text = read_text(path)?;
    let raw = parse_raw(&text);
    let sentences: Vec<Vec<&str>> = raw.iter().map(|s| s.words()).collect();
    let speed = measure_speed(tagger.as_ref(), &sentences, a.reps, &mut MonotonicClock::default())?;
    let mut out = format!("features: {}\n", cfg.feature_label());
    out.push_str(&speed.render());
    emit(a.speed_output.as_deref(), &out)
}

fn run_ablate(cli: &Cli, a: &AblateArgs) -> Result<()> {
    let setup = linear_setup(
        &LinearOpts {
            features: "spl".into(),
            ..a.linear.clone()
        },
        cli.seed,
    )?;
    let params = grow_params(&a.scrdr)?;
    let clusters = load_clusters(&a.linear, None)?;
    let corpus = load_corpus(&a.corpus, &tagset(cli)?)?;
    let report = ablate(
        &corpus,
        a.folds,
        cli.seed,
        clusters,
        &setup.train,
        &params,
        cv_options(a.contiguous, a.parallel_folds),
    )?;
    if let Some(p) = &a.csv {
        write_atomic(p, report.to_csv().as_bytes())?;
    }
    emit(a.output.as_deref(), &report.render_table())
}
