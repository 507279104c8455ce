use super::{is_sentinel, ClusterMap, Context, ExtractOptions, KeyBuffer, UNK_CLUSTER};
use crate::shape;

const WORD_IDS: [&str; 5] = ["w-2", "w-1", "w0", "w+1", "w+2"];
const CLUSTER_IDS: [(&str, isize); 3] = [("ds-1", -1), ("ds0", 0), ("ds+1", 1)];

pub(super) fn simple(ctx: &Context<'_>, out: &mut KeyBuffer) {
    for (id, w) in WORD_IDS.iter().zip(ctx.words) {
        out.push(id, w);
    }
    let w0 = ctx.current();
    out.push_joined("w-1,w0", &[ctx.word(-1), w0]);
    out.push_joined("w0,w+1", &[w0, ctx.word(1)]);
    out.push_joined("w-1,w+1", &[ctx.word(-1), ctx.word(1)]);
    out.push_bool("init-upper", shape::has_initial_uppercase(w0));
    out.push_bool("has-digit", shape::contains_digit(w0));
    out.push_bool("has-punct", shape::contains_punctuation(w0));
    out.push_bool("all-upper", shape::is_all_uppercase(w0));
    // A one-word sentence is both first and last.
    if ctx.is_first() {
        out.push("position", "first");
    }
    if ctx.is_last() {
        out.push("position", "last");
    }
    if !ctx.is_first() && !ctx.is_last() {
        out.push("position", "middle");
    }
}

pub(super) fn bidirectional(ctx: &Context<'_>, opts: ExtractOptions, out: &mut KeyBuffer) {
    out.push_joined("w0,t-1", &[ctx.current(), ctx.tag(-1)]);
    if opts.right_tags {
        out.push_joined("w0,t+1", &[ctx.current(), ctx.tag(1)]);
    }
}

pub(super) fn affix(ctx: &Context<'_>, out: &mut KeyBuffer) {
    let w0 = ctx.current();
    out.push("first-syl", shape::first_syllable(w0));
    out.push("last-syl", shape::last_syllable(w0));
}

/// Prefix of a cluster id; the unknown id has no prefixes.
pub(crate) fn cluster_prefix(id: &str, len: usize) -> &str {
    if id == UNK_CLUSTER {
        return id;
    }
    &id[..len.min(id.len())]
}

pub(super) fn clusters(ctx: &Context<'_>, map: &ClusterMap, out: &mut KeyBuffer) {
    for (tid, offset) in CLUSTER_IDS {
        let word = ctx.word(offset);
        let id = if is_sentinel(word) { UNK_CLUSTER } else { map.lookup(word) };
        out.push(tid, id);
        for &p in map.prefix_lengths() {
            out.push_numbered(tid, p, cluster_prefix(id, p));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use std::collections::{BTreeSet, HashMap};

    fn keys(words: &[&str], pos: usize, sets: &[TemplateSet]) -> Vec<String> {
        let tags = vec![NO_TAG; words.len()];
        let ctx = Context::new(words, &tags, pos);
        extract(&ctx, sets, None)
            .unwrap()
            .iter()
            .map(ToString::to_string)
            .collect()
    }

    #[test]
    fn shape_predicates() {
        let k = keys(&["ở", "Hà_Nội"], 1, &[TemplateSet::Simple]);
        assert!(k.contains(&"init-upper=true".to_string()));
        assert!(k.contains(&"has-digit=false".to_string()));
        assert!(k.contains(&"all-upper=false".to_string()));
        assert!(k.contains(&"w0=Hà_Nội".to_string()));
        assert!(k.contains(&"w-1,w0=ở Hà_Nội".to_string()));
    }

    #[test]
    fn affix_syllables() {
        let k = keys(&["học_sinh"], 0, &[TemplateSet::Affix]);
        assert_eq!(k, vec!["first-syl=học", "last-syl=sinh"]);
        let k = keys(&["nhà"], 0, &[TemplateSet::Affix]);
        assert_eq!(k, vec!["first-syl=nhà", "last-syl=nhà"]);
    }

    // Hand table of position classes for sentence lengths 1..=3.
    #[test]
    fn position_classes() {
        let table: &[(usize, usize, &[&str])] = &[
            (1, 0, &["first", "last"]),
            (2, 0, &["first"]),
            (2, 1, &["last"]),
            (3, 0, &["first"]),
            (3, 1, &["middle"]),
            (3, 2, &["last"]),
        ];
        for &(len, pos, expected) in table {
            let words: Vec<&str> = ["a", "b", "c"][..len].to_vec();
            let got: Vec<String> = keys(&words, pos, &[TemplateSet::Simple])
                .into_iter()
                .filter_map(|k| k.strip_prefix("position=").map(String::from))
                .collect();
            assert_eq!(got, expected, "len {len} pos {pos}");
        }
    }

    #[test]
    fn bidirectional_reads_tags() {
        let words = ["quanh", "bàn", "để"];
        let tags = ["E", NO_TAG, "E"];
        let ctx = Context::new(&words, &tags, 1);
        let ex = FeatureExtractor::new("bi".parse().unwrap(), None, None).unwrap();
        let mut buf = KeyBuffer::new();
        ex.extract_into(&ctx, ExtractOptions::default(), &mut buf);
        assert_eq!(buf.keys(), &["w0,t-1=bàn E", "w0,t+1=bàn E"]);
        let mut b2 = KeyBuffer::new();
        ex.extract_into(&ctx, ExtractOptions { right_tags: false }, &mut b2);
        assert_eq!(b2.keys(), &["w0,t-1=bàn E"]);
    }

    #[test]
    fn cluster_keys_are_prefixes() {
        let mut a = HashMap::new();
        a.insert("học".to_string(), "0110101".to_string());
        let map = ClusterMap::new(a);
        let words = ["học", "x"];
        let ctx = Context::new(&words, &[NO_TAG, NO_TAG], 0);
        let got = extract(&ctx, &[TemplateSet::Clusters], Some(&map)).unwrap();
        let ds0: Vec<String> = got
            .iter()
            .filter(|k| k.template_id.starts_with("ds0"))
            .map(|k| k.value.clone())
            .collect();
        let full = "0110101";
        let mut oracle = vec![full.to_string()];
        for p in DEFAULT_PREFIXES {
            oracle.push(full.chars().take(p).collect());
        }
        assert_eq!(ds0, oracle);
        let ds1: BTreeSet<String> = got
            .iter()
            .filter(|k| k.template_id.starts_with("ds+1"))
            .map(|k| k.value.clone())
            .collect();
        assert_eq!(ds1, BTreeSet::from([UNK_CLUSTER.to_string()]));
    }
}
