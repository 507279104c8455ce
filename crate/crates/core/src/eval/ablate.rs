use std::fmt::Write as _;
use std::sync::Arc;

use super::{crossvalidate, pct, CvOptions, EvalError, EvalReport, TaggerConfig};
use crate::corpus::TaggedCorpus;
use crate::features::{ClusterMap, FeatureSets, TemplateSet};
use crate::linear::TrainConfig;
use crate::scrdr::GrowParams;

/// Cumulative linear feature sets, in row order.
pub const ABLATION_SETS: [&str; 4] = ["spl", "spl+bi", "spl+bi+affix", "spl+bi+affix+ds"];

pub const REFERENCE_NOTE: &str = "Reference on the original treebank (10-fold): spl 93.96 / 72.19, spl+bi+affix+ds 94.53 / 81.00 (Ovr. / Unk.).";

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub tagger_id: String,
    pub feature_sets: String,
    /// `None` when the row was skipped.
    pub report: Option<EvalReport>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationReport {
    pub k: usize,
    pub seed: u64,
    pub rows: Vec<AblationRow>,
}

impl AblationReport {
    pub fn row(&self, feature_sets: &str) -> Option<&AblationRow> {
        self.rows.iter().find(|r| r.feature_sets == feature_sets)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["tagger", "features", "status", "tokens", "unknown_tokens", "overall_pct", "unknown_pct"])
            .unwrap();
        for r in &self.rows {
            let (status, tokens, unknown, ovr, unk) = match &r.report {
                Some(e) => (
                    "ok",
                    e.total_tokens().to_string(),
                    e.unknown_tokens().to_string(),
                    pct(Some(e.overall_acc())),
                    pct(e.unknown_acc()),
                ),
                None => ("skipped", String::new(), String::new(), "-".into(), "-".into()),
            };
            w.write_record([r.tagger_id.as_str(), &r.feature_sets, status, &tokens, &unknown, &ovr, &unk])
                .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<8} {:<18} {:>8} {:>8}", "Tagger", "Features", "Ovr.", "Unk.");
        for r in &self.rows {
            let (ovr, unk) = match &r.report {
                Some(e) => (pct(Some(e.overall_acc())), pct(e.unknown_acc())),
                None => ("-".to_string(), "-".to_string()),
            };
            let _ = write!(out, "{:<8} {:<18} {:>8} {:>8}", r.tagger_id, r.feature_sets, ovr, unk);
            if let Some(n) = &r.note {
                let _ = write!(out, "  ({n})");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "\n{}-fold cross-validation, seed {}. Accuracy is micro-averaged over tokens across folds.",
            self.k, self.seed
        );
        out.push_str("Feature sets reading right tags are decoded in two passes.\n");
        out.push_str(REFERENCE_NOTE);
        out.push('\n');
        out
    }
}

/// Cross-validate the four cumulative linear feature sets and the rule
/// tagger. Without clusters the ds row is skipped.
pub fn ablate(
    corpus: &TaggedCorpus,
    k: usize,
    seed: u64,
    clusters: Option<Arc<ClusterMap>>,
    train: &TrainConfig,
    params: &GrowParams,
    opts: CvOptions,
) -> Result<AblationReport, EvalError> {
    let mut rows = Vec::with_capacity(ABLATION_SETS.len() + 1);
    for name in ABLATION_SETS {
        let sets: FeatureSets = name.parse().expect("built-in feature sets parse");
        let needs_clusters = sets.contains(TemplateSet::Clusters);
        if needs_clusters && clusters.is_none() {
            log::warn!("no cluster file; skipping {name}");
            rows.push(AblationRow {
                tagger_id: "linear".into(),
                feature_sets: name.into(),
                report: None,
                note: Some("skipped: no cluster file".into()),
            });
            continue;
        }
        let cfg = TaggerConfig::linear(sets, train.clone(), clusters.clone().filter(|_| needs_clusters));
        rows.push(AblationRow {
            tagger_id: "linear".into(),
            feature_sets: name.into(),
            report: Some(crossvalidate(corpus, k, seed, &cfg, opts)?),
            note: None,
        });
    }
    let cfg = TaggerConfig::Scrdr { params: *params };
    rows.push(AblationRow {
        tagger_id: "scrdr".into(),
        feature_sets: cfg.feature_label(),
        report: Some(crossvalidate(corpus, k, seed, &cfg, opts)?),
        note: None,
    });
    Ok(AblationReport { k, seed, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_slash_format, TagSet};

    #[test]
    fn five_rows_ds_skipped_without_clusters() {
        let mut text = String::new();
        for i in 0..10 {
            let w = ["sách", "báo", "vở", "bút", "máy_tính"][i % 5];
            text.push_str(&format!("Tôi/P có/V {w}/N ./CH\n"));
        }
        let c = parse_slash_format(&text, &TagSet::default()).unwrap();
        let train = TrainConfig { epochs: 3, ..TrainConfig::default() };
        let r = ablate(&c, 2, 3, None, &train, &GrowParams::default(), CvOptions::default()).unwrap();
        assert_eq!(r.rows.len(), 5);
        assert_eq!(r.rows.iter().filter(|r| r.tagger_id == "linear").count(), 4);
        assert!(r.row("spl+bi+affix+ds").unwrap().report.is_none());
        assert!(r.row("spl").unwrap().report.is_some());
        let table = r.render_table();
        assert!(table.contains("93.96") && table.contains("81.00"));
        assert!(table.contains("skipped"));
        let again = ablate(&c, 2, 3, None, &train, &GrowParams::default(), CvOptions::default()).unwrap();
        assert_eq!(again.to_csv(), r.to_csv());
        assert_eq!(again.render_table(), table);
    }
}
