use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use vnpos::features::{Context, ExtractOptions, FeatureExtractor, KeyBuffer};
use vnpos::synth;
use vnpos_bench::{borrowed, raw, SEED};

fn extraction(c: &mut Criterion) {
    let train = synth::ambiguous_corpus(500, SEED);
    let clusters = Arc::new(synth::clusters_for(&train, SEED));
    let raw = raw(5_000);
    let sentences = borrowed(&raw);
    let tags: Vec<Vec<&str>> = sentences.iter().map(|s| vec!["N"; s.len()]).collect();
    let words: usize = sentences.iter().map(Vec::len).sum();

    let mut group = c.benchmark_group("extract");
    group.throughput(Throughput::Elements(words as u64));
    for sets in ["spl", "spl+bi", "spl+bi+affix", "spl+bi+affix+ds"] {
        let extractor = FeatureExtractor::new(sets.parse().unwrap(), Some(clusters.clone()), None).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(sets), &sentences, |b, s| {
            let mut buf = KeyBuffer::new();
            b.iter(|| {
                for (w, t) in s.iter().zip(&tags) {
                    for pos in 0..w.len() {
                        let ctx = Context::new(w, t, pos);
                        buf.clear();
                        extractor.extract_into(&ctx, ExtractOptions { right_tags: true }, &mut buf);
                        black_box(buf.keys().len());
                    }
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, extraction);
criterion_main!(benches);
