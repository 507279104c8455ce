use vnpos::eval::{ablate, CvOptions};
use vnpos::linear::TrainConfig;
use vnpos::scrdr::GrowParams;
use vnpos::synth;

#[test]
fn affix_row_beats_bidirectional_row_on_suffix_corpus() {
    let corpus = synth::suffix_corpus(300, 0.3, 11);
    let r = ablate(
        &corpus,
        5,
        11,
        None,
        &TrainConfig::default(),
        &GrowParams::default(),
        CvOptions { parallel: true, ..Default::default() },
    )
    .unwrap();
    let unk = |name: &str| r.row(name).unwrap().report.as_ref().unwrap().unknown_acc().unwrap();
    assert!(unk("spl+bi+affix") >= unk("spl+bi"), "{}", r.render_table());
    assert_eq!(r.rows.len(), 5);
    assert!(r.row("spl+bi+affix+ds").unwrap().report.is_none());
}

#[test]
fn ds_row_runs_with_clusters() {
    let corpus = synth::ambiguous_corpus(60, 2);
    let clusters = std::sync::Arc::new(synth::clusters_for(&corpus, 2));
    let train = TrainConfig { epochs: 3, ..TrainConfig::default() };
    let r = ablate(&corpus, 3, 2, Some(clusters), &train, &GrowParams::default(), CvOptions::default()).unwrap();
    assert!(r.rows.iter().all(|row| row.report.is_some()));
    for row in &r.rows {
        let rep = row.report.as_ref().unwrap();
        assert_eq!(rep.total_tokens(), corpus.token_count());
    }
}
