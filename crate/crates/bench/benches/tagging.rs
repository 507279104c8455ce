use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use vnpos::linear::DecodeMode;
use vnpos::Tagger;
use vnpos_bench::{borrowed, raw, trained_taggers};

fn tagging(c: &mut Criterion) {
    let (scrdr, linear) = trained_taggers();
    let ltr = linear.clone().with_mode(DecodeMode::LeftToRight);
    let raw = raw(10_000);
    let sentences = borrowed(&raw);
    let words: usize = sentences.iter().map(Vec::len).sum();

    let mut group = c.benchmark_group("tag");
    group.throughput(Throughput::Elements(words as u64));
    let taggers: [(&str, &dyn Tagger); 3] = [("scrdr", &scrdr), ("linear-two-pass", &linear), ("linear-ltr", &ltr)];
    for (name, tagger) in taggers {
        group.bench_with_input(BenchmarkId::from_parameter(name), &sentences, |b, s| {
            b.iter(|| {
                for words in s {
                    black_box(tagger.tag(words));
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, tagging);
criterion_main!(benches);
