//! Acceptance criteria 1-10. Each test prints one PASS/FAIL line.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vnpos::corpus::{build_lexicon, clean_corpus, parse_slash_format, write_slash_format, Lexicon};
use vnpos::eval::{crossvalidate, measure_speed, CvOptions, MonotonicClock, TaggerConfig};
use vnpos::features::{Context, FeatureSets};
use vnpos::linear::{load_model, save_model, DecodeMode, ExampleSet, LinearModel, LinearTagger, LogisticObjective, TrainConfig};
use vnpos::scrdr::{
    build_object_dictionary, generate_candidates, grow_tree, Edge, GrowParams, InitialTagger, Rule, RuleCondition,
    ScrdrTagger, ScrdrTree, Slot,
};
use vnpos::{synth, Sentence, Tag, TagSet, TaggedCorpus, Tagger};

// Pinned tolerances and budgets.
const C1_TREES: usize = 200;
const C1_BUDGET: Duration = Duration::from_secs(10);
const C3_BUDGET: Duration = Duration::from_secs(30);
const C4_REL_TOL: f64 = 1e-4;
const C4_STEP: f64 = 1e-5;
const C4_BUDGET: Duration = Duration::from_secs(1);
const C5_EPOCHS: usize = 20;
const C6_MIN_GAIN_POINTS: f64 = 20.0;
const C6_BUDGET: Duration = Duration::from_secs(120);
const C8_INSTANCES: usize = 100;
const C9_WORDS: usize = 250_000;
const C9_MIN_RATIO: f64 = 1.5;
const C9_REPS: usize = 3;

fn report(n: u32, ok: bool, detail: &str) {
    println!("{} criterion {n}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} failed: {detail}");
}

fn tag(s: &str) -> Tag {
    Tag::new(s).unwrap()
}

fn training_accuracy(tagger: &dyn Tagger, corpus: &TaggedCorpus) -> f64 {
    let mut correct = 0;
    for s in &corpus.sentences {
        let pred = tagger.tag(&s.words());
        correct += pred
            .iter()
            .zip(&s.tokens)
            .filter(|(p, t)| t.tag.as_ref() == Some(**p))
            .count();
    }
    correct as f64 / corpus.token_count() as f64
}

// --- 1 -------------------------------------------------------------------

const C1_WORDS: [&str; 5] = ["a", "b", "c", "d", "e"];
const C1_TAGS: [&str; 3] = ["N", "V", "A"];

fn random_condition(r: &mut ChaCha8Rng) -> RuleCondition {
    let slots = [
        Slot::Word(-1),
        Slot::Word(0),
        Slot::Word(1),
        Slot::Tag(-2),
        Slot::Tag(-1),
        Slot::Tag(0),
        Slot::Tag(1),
        Slot::Suffix(1),
    ];
    loop {
        let n = r.random_range(1..=2);
        let conj: Vec<(Slot, String)> = (0..n)
            .map(|_| {
                let s = *slots.choose(r).unwrap();
                let v = match s {
                    Slot::Tag(_) => C1_TAGS.choose(r).unwrap().to_string(),
                    _ => C1_WORDS.choose(r).unwrap().to_string(),
                };
                (s, v)
            })
            .collect();
        if let Some(c) = RuleCondition::new(conj) {
            return c;
        }
    }
}

fn random_tree(r: &mut ChaCha8Rng) -> ScrdrTree {
    let tags: Vec<Tag> = C1_TAGS.iter().map(|t| tag(t)).collect();
    let mut tree = ScrdrTree::with_first_layer(&tags);
    for _ in 0..r.random_range(0..25) {
        let candidates: Vec<usize> = (0..tree.len()).filter(|&i| tree.node(i).depth >= 1 && tree.node(i).depth < 3).collect();
        let parent = *candidates.choose(r).unwrap();
        let rule = Rule {
            condition: random_condition(r),
            conclusion: tag(C1_TAGS.choose(r).unwrap()),
        };
        tree.add_exception(parent, rule);
    }
    tree
}

/// Flat evaluation over every node: a node is reached when its predecessor
/// was reached and fired (exception edge) or was reached and did not fire
/// (if-not edge). The deepest reached node that fires decides.
fn flat_classify<'t>(tree: &'t ScrdrTree, ctx: &Context<'_>) -> Option<&'t Tag> {
    let n = tree.len();
    let fires: Vec<bool> = (0..n).map(|i| i == 0 || tree.node(i).fires(ctx)).collect();
    let reach: Vec<bool> = {
        // Nodes are appended after their predecessor, so ids are topological.
        let mut reach = vec![false; n];
        reach[0] = true;
        for i in 1..n {
            let (p, edge) = tree.node(i).parent.unwrap();
            reach[i] = reach[p] && (fires[p] == (edge == Edge::Except));
        }
        reach
    };
    let chosen = (0..n)
        .filter(|&i| reach[i] && fires[i])
        .max_by_key(|&i| tree.node(i).depth)
        .unwrap();
    tree.node(chosen).conclusion()
}

#[test]
fn criterion_01_tree_walk_equals_flat_rules() {
    let start = Instant::now();
    let mut r = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    let mut checked = 0;
    let mut max_depth = 0;
    for _ in 0..C1_TREES {
        let tree = random_tree(&mut r);
        max_depth = max_depth.max(tree.nodes().iter().map(|n| n.depth).max().unwrap());
        for _ in 0..5 {
            let words: Vec<&str> = (0..10).map(|_| *C1_WORDS.choose(&mut r).unwrap()).collect();
            let tags: Vec<&str> = (0..10).map(|_| *C1_TAGS.choose(&mut r).unwrap()).collect();
            for pos in 0..10 {
                let ctx = Context::new(&words, &tags, pos);
                checked += 1;
                if tree.classify(&ctx) != flat_classify(&tree, &ctx) {
                    mismatches += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        mismatches == 0 && max_depth <= 3 && elapsed < C1_BUDGET,
        &format!("{C1_TREES} trees (depth <= {max_depth}), {checked} tokens, {mismatches} mismatches, {elapsed:.2?}"),
    );
}

// --- 2 -------------------------------------------------------------------

#[test]
fn criterion_02_first_rule_is_optimal() {
    let corpus = synth::ban_corpus();
    let initial = InitialTagger::new(Arc::new(build_lexicon(&corpus).unwrap())).unwrap();
    let dict = build_object_dictionary(&corpus, &initial).unwrap();
    let (tree, log) = grow_tree(&dict, &GrowParams::default()).unwrap();

    // Exhaustive scoring: every candidate from every object, scored against
    // the objects whose current tag equals the candidate's first-layer node.
    let mut best = i64::MIN;
    for i in 0..dict.len() {
        for cand in generate_candidates(&dict.context(i), &tag(dict.correct_tag(i))) {
            let mut net = 0i64;
            for j in 0..dict.len() {
                if dict.initial_tag(j) != dict.initial_tag(i) || !cand.condition.fires(&dict.context(j)) {
                    continue;
                }
                let was_right = dict.initial_tag(j) == dict.correct_tag(j);
                let now_right = cand.conclusion.as_str() == dict.correct_tag(j);
                net += now_right as i64 - was_right as i64;
            }
            best = best.max(net);
        }
    }
    let first = log.attachments.first();
    let got = first.map_or(0, |a| a.net as i64);
    let rule = first.map(|a| tree.node(a.node).rule.clone().unwrap());
    let rule_net = rule.as_ref().map_or(0, |rule| {
        (0..dict.len())
            .filter(|&j| rule.condition.fires(&dict.context(j)))
            .map(|j| {
                (rule.conclusion.as_str() == dict.correct_tag(j)) as i64
                    - (dict.initial_tag(j) == dict.correct_tag(j)) as i64
            })
            .sum()
    });
    report(
        2,
        first.is_some() && got == best && rule_net == best,
        &format!(
            "first rule `{}` net {got}, exhaustive maximum {best}",
            rule.map_or("-".into(), |r| format!("{} : {}", r.condition, r.conclusion))
        ),
    );
}

// --- 3 -------------------------------------------------------------------

#[test]
fn criterion_03_errors_never_increase() {
    let start = Instant::now();
    let corpus = synth::ambiguous_corpus(1000, 3);
    let (tagger, log) = ScrdrTagger::train(&corpus, &GrowParams::default()).unwrap();
    let mut monotone = true;
    let mut prev = log.initial_errors;
    for a in &log.attachments {
        monotone &= a.errors_after <= prev;
        prev = a.errors_after;
    }
    let initial_acc = training_accuracy(&tagger.initial, &corpus);
    let final_acc = training_accuracy(&tagger, &corpus);
    let elapsed = start.elapsed();
    report(
        3,
        monotone && final_acc >= initial_acc && elapsed < C3_BUDGET,
        &format!(
            "{} rules, errors {} -> {}, accuracy {:.4} -> {:.4}, {elapsed:.2?}",
            log.attachments.len(),
            log.initial_errors,
            log.final_errors(),
            initial_acc,
            final_acc
        ),
    );
}

// --- 4 -------------------------------------------------------------------

#[test]
fn criterion_04_gradient_check() {
    let start = Instant::now();
    let (nf, nl) = (20, 4);
    let mut r = ChaCha8Rng::seed_from_u64(4);
    let mut ex = ExampleSet::new();
    for _ in 0..10 {
        let feats: Vec<u32> = (0..r.random_range(2..6)).map(|_| r.random_range(0..nf as u32)).collect();
        ex.push(&feats, r.random_range(0..nl));
    }
    let obj = LogisticObjective {
        examples: &ex,
        num_features: nf,
        num_labels: nl,
        l2: 0.05,
    };
    let w: Vec<f64> = (0..nf * nl).map(|_| r.random_range(-1.0..1.0)).collect();
    let g = obj.gradient(&w);
    let mut worst: f64 = 0.0;
    for i in 0..w.len() {
        let (mut plus, mut minus) = (w.clone(), w.clone());
        plus[i] += C4_STEP;
        minus[i] -= C4_STEP;
        let fd = (obj.loss(&plus) - obj.loss(&minus)) / (2.0 * C4_STEP);
        worst = worst.max((g[i] - fd).abs() / (g[i].abs() + fd.abs()).max(1e-8));
    }
    let elapsed = start.elapsed();
    report(
        4,
        worst < C4_REL_TOL && elapsed < C4_BUDGET,
        &format!("max relative error {worst:.2e} over {} weights, {elapsed:.2?}", w.len()),
    );
}

// --- 5 -------------------------------------------------------------------

#[test]
fn criterion_05_memorization() {
    let corpus = synth::unambiguous_corpus(50, 5);
    let cfg = TrainConfig {
        epochs: C5_EPOCHS,
        ..TrainConfig::default()
    };
    let model = LinearModel::train(&corpus, &"spl".parse().unwrap(), &cfg, None).unwrap();
    let linear = model.accuracy_on(&corpus, DecodeMode::LeftToRight);
    let (scrdr, _) = ScrdrTagger::train(&corpus, &GrowParams::default()).unwrap();
    let initial_acc = training_accuracy(&scrdr.initial, &corpus);
    let scrdr_acc = training_accuracy(&scrdr, &corpus);
    report(
        5,
        linear == 1.0 && scrdr_acc >= initial_acc,
        &format!(
            "linear spl training accuracy {linear:.4} after {C5_EPOCHS} epochs; scrdr {scrdr_acc:.4} vs initial {initial_acc:.4}"
        ),
    );
}

// --- 6 -------------------------------------------------------------------

#[test]
fn criterion_06_affix_ablation() {
    let start = Instant::now();
    let corpus = synth::suffix_corpus(500, 0.3, 6);
    let unk = |sets: &str| {
        let cfg = TaggerConfig::linear(sets.parse().unwrap(), TrainConfig::default(), None);
        crossvalidate(&corpus, 5, 6, &cfg, CvOptions::default()).unwrap()
    };
    let spl = unk("spl");
    let affix = unk("spl+affix");
    let oov = spl.unknown_tokens() as f64 / spl.total_tokens() as f64;
    let (a, b) = (spl.unknown_acc().unwrap() * 100.0, affix.unknown_acc().unwrap() * 100.0);
    let elapsed = start.elapsed();
    report(
        6,
        b - a >= C6_MIN_GAIN_POINTS && elapsed < C6_BUDGET,
        &format!(
            "unknown accuracy spl {a:.2} vs spl+affix {b:.2} (+{:.2} points, OOV {:.1}%), {elapsed:.2?}",
            b - a,
            oov * 100.0
        ),
    );
}

// --- 7 -------------------------------------------------------------------

#[test]
fn criterion_07_cleaning_fixpoint() {
    let golden = include_str!("data/clean_golden.txt");
    let expected = include_str!("data/clean_golden.expected.txt");
    let corpus = parse_slash_format(golden, &TagSet::default()).unwrap();
    let (cleaned, rep) = clean_corpus(&corpus);
    let (again, rep2) = clean_corpus(&cleaned);
    let text = write_slash_format(&cleaned);
    report(
        7,
        rep.counts() == [1; 6] && text == expected && again == cleaned && rep2.total() == 0,
        &format!("report counts {:?}, second pass changes {}", rep.counts(), rep2.total()),
    );
}

// --- 8 -------------------------------------------------------------------

fn random_corpus(r: &mut ChaCha8Rng, sentences: usize) -> TaggedCorpus {
    let syllables = ["bàn", "ghế", "đi", "học", "a/b", "Hà", "Nội", "2024", ",", "ñ", "x"];
    let tags = ["N", "V", "A", "Np", "M", "CH", "X-1"];
    let s = (0..sentences)
        .map(|_| {
            let pairs: Vec<(String, String)> = (0..r.random_range(1..12))
                .map(|_| {
                    let n = r.random_range(1..=3);
                    let w: Vec<&str> = (0..n).map(|_| *syllables.choose(r).unwrap()).collect();
                    (w.join("_"), tags.choose(r).unwrap().to_string())
                })
                .collect();
            Sentence::from_pairs(&pairs)
        })
        .collect();
    TaggedCorpus::new(s, "")
}

#[test]
fn criterion_08_round_trips() {
    let mut r = ChaCha8Rng::seed_from_u64(8);
    let (mut corpus_bad, mut model_bad, mut tree_bad) = (0, 0, 0);
    let sets: [&str; 4] = ["spl", "spl+bi", "spl+bi+affix", "spl+affix+jvn"];
    for i in 0..C8_INSTANCES {
        let corpus = random_corpus(&mut r, 8);
        let text = write_slash_format(&corpus);
        match parse_slash_format(&text, &TagSet::default()) {
            Ok(back) if back == corpus && write_slash_format(&back) == text => {}
            _ => corpus_bad += 1,
        }

        let cfg = TrainConfig {
            epochs: 2,
            seed: i as u64,
            ..TrainConfig::default()
        };
        let fs: FeatureSets = sets[i % sets.len()].parse().unwrap();
        let model = LinearModel::train(&corpus, &fs, &cfg, None).unwrap();
        let loaded = load_model(&save_model(&model).unwrap()).unwrap();
        let probe = random_corpus(&mut r, 4);
        for s in &probe.sentences {
            let w = s.words();
            for mode in [DecodeMode::LeftToRight, DecodeMode::TwoPass] {
                if model.decode_words(&w, mode) != loaded.decode_words(&w, mode) {
                    model_bad += 1;
                }
            }
        }

        let (tagger, _) = ScrdrTagger::train(&corpus, &GrowParams { min_gain: 1, min_fired: 1, max_depth: 6 }).unwrap();
        let tree = random_tree(&mut r);
        let trees = [tagger.tree.clone(), tree];
        for t in &trees {
            let back = ScrdrTree::parse(&t.to_text()).unwrap();
            if back.to_text() != t.to_text() {
                tree_bad += 1;
                continue;
            }
            for s in probe.sentences.iter().chain(&corpus.sentences) {
                let w = s.words();
                let tags: Vec<&str> = s.tokens.iter().map(|t| t.tag.as_ref().unwrap().as_str()).collect();
                for pos in 0..w.len() {
                    let ctx = Context::new(&w, &tags, pos);
                    if t.classify(&ctx) != back.classify(&ctx) {
                        tree_bad += 1;
                    }
                }
            }
        }
        let reloaded = ScrdrTagger::from_texts(&tagger.tree_text(), &tagger.lexicon_text()).unwrap();
        for s in &probe.sentences {
            if tagger.tag(&s.words()) != reloaded.tag(&s.words()) {
                tree_bad += 1;
            }
        }
    }
    report(
        8,
        corpus_bad + model_bad + tree_bad == 0,
        &format!(
            "{C8_INSTANCES} instances each: corpus {corpus_bad}, linear model {model_bad}, scrdr tree {tree_bad} mismatches"
        ),
    );
}

// --- 9 -------------------------------------------------------------------

#[test]
fn criterion_09_speed_ordering() {
    let train = synth::ambiguous_corpus(2000, 9);
    let clusters = Arc::new(synth::clusters_for(&train, 9));
    let model = LinearModel::train(
        &train,
        &"spl+bi+affix+ds".parse().unwrap(),
        &TrainConfig::default(),
        Some(clusters),
    )
    .unwrap();
    let linear = LinearTagger::new(model);
    let (scrdr, _) = ScrdrTagger::train(&train, &GrowParams::default()).unwrap();

    let raw = synth::raw_corpus(C9_WORDS, 90);
    let sentences: Vec<Vec<&str>> = raw.iter().map(|s| s.iter().map(String::as_str).collect()).collect();
    let mut clock = MonotonicClock::default();
    let l = measure_speed(&linear, &sentences, C9_REPS, &mut clock).unwrap();
    let s = measure_speed(&scrdr, &sentences, C9_REPS, &mut clock).unwrap();
    let ratio = s.mean_wps() / l.mean_wps();
    report(
        9,
        ratio >= C9_MIN_RATIO,
        &format!(
            "{} words: scrdr {:.0} w/s, linear spl+bi+affix+ds ({}) {:.0} w/s, ratio {ratio:.2}",
            l.words,
            s.mean_wps(),
            linear.mode.name(),
            l.mean_wps()
        ),
    );
}

// --- 10 ------------------------------------------------------------------

fn pipeline_outputs(seed: u64) -> Vec<Vec<u8>> {
    let corpus = synth::ambiguous_corpus(120, seed);
    let clusters = Arc::new(synth::clusters_for(&corpus, seed));
    let mut out = Vec::new();
    let linear = TaggerConfig::linear("spl+bi+affix+ds".parse().unwrap(), TrainConfig::default(), Some(clusters.clone()));
    let cv = crossvalidate(&corpus, 3, seed, &linear, CvOptions::default()).unwrap();
    out.push(cv.to_csv().into_bytes());
    out.push(cv.render_table().into_bytes());
    let parallel = crossvalidate(&corpus, 3, seed, &linear, CvOptions { parallel: true, ..Default::default() }).unwrap();
    out.push(parallel.to_csv().into_bytes());
    let scrdr = TaggerConfig::Scrdr { params: GrowParams::default() };
    out.push(crossvalidate(&corpus, 3, seed, &scrdr, CvOptions::default()).unwrap().to_csv().into_bytes());
    for loss in ["logistic", "perceptron"] {
        let cfg = TrainConfig {
            loss: loss.parse().unwrap(),
            ..TrainConfig::default()
        };
        let m = LinearModel::train(&corpus, &"spl+bi+ds".parse().unwrap(), &cfg, Some(clusters.clone())).unwrap();
        out.push(save_model(&m).unwrap());
    }
    let (t, _) = ScrdrTagger::train(&corpus, &GrowParams::default()).unwrap();
    out.push(t.tree_text().into_bytes());
    out.push(t.lexicon_text().into_bytes());
    let lex: Lexicon = build_lexicon(&corpus).unwrap();
    out.push(lex.to_text().into_bytes());
    out
}

#[test]
fn criterion_10_determinism() {
    let a = pipeline_outputs(10);
    let b = pipeline_outputs(10);
    let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count();
    report(
        10,
        a.len() == b.len() && differing == 0,
        &format!("{} artifacts produced twice, {differing} differ", a.len()),
    );
}
