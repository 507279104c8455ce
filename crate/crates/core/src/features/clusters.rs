use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::FeatureError;

/// Cluster id returned for words without an assignment.
pub const UNK_CLUSTER: &str = "UNK";

/// Default bit-string prefix lengths used in addition to the full id.
pub const DEFAULT_PREFIXES: [usize; 3] = [4, 6, 10];

/// Word → hierarchical cluster bit-string, read from the `paths` file written
/// by common Brown clustering tools (`bits<TAB>word<TAB>count`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterMap {
    assignments: HashMap<String, String>,
    prefix_lengths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DuplicateWord {
    pub line: usize,
    pub word: String,
}

impl ClusterMap {
    pub fn new(assignments: HashMap<String, String>) -> ClusterMap {
        ClusterMap {
            assignments,
            prefix_lengths: DEFAULT_PREFIXES.to_vec(),
        }
    }

    /// Replace the prefix lengths; an empty list keeps only the full id.
    pub fn with_prefixes(mut self, prefix_lengths: Vec<usize>) -> ClusterMap {
        self.prefix_lengths = prefix_lengths.into_iter().filter(|&p| p > 0).collect();
        self
    }

    pub fn prefix_lengths(&self) -> &[usize] {
        &self.prefix_lengths
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn lookup(&self, word: &str) -> &str {
        self.assignments
            .get(word)
            .map(String::as_str)
            .unwrap_or(UNK_CLUSTER)
    }

    /// Parse cluster file text. Duplicate words keep their last assignment and
    /// are returned for reporting.
    pub fn parse(text: &str) -> Result<(ClusterMap, Vec<DuplicateWord>), FeatureError> {
        let mut assignments = HashMap::new();
        let mut duplicates = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |reason: &str| FeatureError::ClusterFormat {
                line: line_no,
                reason: reason.to_string(),
            };
            let mut fields = line.split('\t');
            let (Some(bits), Some(word), Some(count), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(malformed("expected `bits<TAB>word<TAB>count`"));
            };
            if bits.is_empty() || !bits.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(malformed("cluster id must be a non-empty 0/1 string"));
            }
            if word.is_empty() || word.chars().any(char::is_whitespace) {
                return Err(malformed("invalid word"));
            }
            count
                .parse::<u64>()
                .map_err(|_| malformed("count is not a number"))?;
            if assignments
                .insert(word.to_string(), bits.to_string())
                .is_some()
            {
                duplicates.push(DuplicateWord {
                    line: line_no,
                    word: word.to_string(),
                });
            }
        }
        Ok((ClusterMap::new(assignments), duplicates))
    }

    /// Serialize in the file format (count column written as 0), words ascending.
    pub fn to_text(&self) -> String {
        let mut words: Vec<&String> = self.assignments.keys().collect();
        words.sort();
        let mut out = String::new();
        for w in words {
            let _ = writeln!(out, "{}\t{}\t0", self.assignments[w], w);
        }
        out
    }
}

/// Load a cluster file, logging a warning per duplicate word.
pub fn load_cluster_file(path: impl AsRef<Path>) -> Result<ClusterMap, FeatureError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| FeatureError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let (map, duplicates) = ClusterMap::parse(&text)?;
    for d in duplicates {
        log::warn!(
            "{}:{}: duplicate cluster assignment for `{}`; keeping the last one",
            path.display(),
            d.line,
            d.word
        );
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_assignment() {
        let (m, dups) = ClusterMap::parse("0110\thọc_sinh\t42\n").unwrap();
        assert_eq!(m.lookup("học_sinh"), "0110");
        assert_eq!(m.lookup("absent"), UNK_CLUSTER);
        assert!(dups.is_empty());
    }

    #[test]
    fn duplicate_word_last_wins() {
        let (m, dups) = ClusterMap::parse("01\ta\t1\n10\ta\t2\n").unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.lookup("a"), "10");
        assert_eq!(dups, vec![DuplicateWord { line: 2, word: "a".into() }]);
    }

    #[test]
    fn malformed_lines() {
        for bad in ["01 a 1", "012\ta\t1", "01\ta", "01\ta\tx", "\ta\t1"] {
            let err = ClusterMap::parse(&format!("0\tok\t1\n{bad}\n")).unwrap_err();
            assert!(matches!(err, FeatureError::ClusterFormat { line: 2, .. }), "{bad}");
        }
    }

    #[test]
    fn load_from_disk() {
        let dir = std::env::temp_dir().join(format!("vnpos-clusters-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("paths");
        std::fs::write(&path, "0\ta\t3\n11\tb\t1\n").unwrap();
        let m = load_cluster_file(&path).unwrap();
        assert_eq!(m.lookup("b"), "11");
        assert!(matches!(
            load_cluster_file(dir.join("missing")),
            Err(FeatureError::Io { .. })
        ));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn text_round_trip() {
        let (m, _) = ClusterMap::parse("0\ta\t3\n11\tb\t1\n").unwrap();
        let (back, _) = ClusterMap::parse(&m.to_text()).unwrap();
        assert_eq!(back, m);
    }
}
