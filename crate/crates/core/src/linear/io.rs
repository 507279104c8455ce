//! Binary model files.
//!
//! Layout, little endian, strings as `u32 length + UTF-8 bytes`:
//!
//! ```text
//! magic "VNPOSLIN" | u32 version
//! str feature sets | u32 n_labels | str label...
//! u32 epochs | f64 learning rate | f64 l2 | u64 seed | u8 shuffle | u8 loss | u64 batch (0 = full)
//! u8 has_clusters [u32 n | u32 prefix... | str cluster text]
//! u8 has_lexicon [str lexicon text]
//! u32 n_features | str key... (in id order)
//! f64 weights[n_features * n_labels]
//! u32 crc32 of everything above
//! ```

use std::collections::HashMap;
use std::io::{Cursor, Read};
use std::sync::Arc;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::{LinearModel, Loss, ModelError, TrainConfig};
use crate::corpus::{Lexicon, Tag};
use crate::features::{ClusterMap, FeatureExtractor, FeatureSets};

pub const MAGIC: &[u8; 8] = b"VNPOSLIN";
pub const FORMAT_VERSION: u32 = 1;

fn put_str(out: &mut Vec<u8>, s: &str) {
    out.write_u32::<LE>(s.len() as u32).unwrap();
    out.extend_from_slice(s.as_bytes());
}

pub fn save_model(model: &LinearModel) -> Result<Vec<u8>, ModelError> {
    if model.num_features() == 0 {
        return Err(ModelError::EmptyModel);
    }
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.write_u32::<LE>(FORMAT_VERSION).unwrap();

    put_str(&mut out, &model.feature_sets().to_string());
    out.write_u32::<LE>(model.labels.len() as u32).unwrap();
    for l in &model.labels {
        put_str(&mut out, l.as_str());
    }

    let c = &model.config;
    out.write_u32::<LE>(c.epochs as u32).unwrap();
    out.write_f64::<LE>(c.learning_rate).unwrap();
    out.write_f64::<LE>(c.l2).unwrap();
    out.write_u64::<LE>(c.seed).unwrap();
    out.write_u8(c.shuffle as u8).unwrap();
    out.write_u8(match c.loss {
        Loss::Logistic => 0,
        Loss::AveragedPerceptron => 1,
    })
    .unwrap();
    out.write_u64::<LE>(c.batch_size.unwrap_or(0) as u64).unwrap();

    match model.extractor.clusters() {
        Some(map) => {
            out.write_u8(1).unwrap();
            out.write_u32::<LE>(map.prefix_lengths().len() as u32).unwrap();
            for &p in map.prefix_lengths() {
                out.write_u32::<LE>(p as u32).unwrap();
            }
            put_str(&mut out, &map.to_text());
        }
        None => out.write_u8(0).unwrap(),
    }
    match model.extractor.lexicon() {
        Some(lex) => {
            out.write_u8(1).unwrap();
            put_str(&mut out, &lex.to_text());
        }
        None => out.write_u8(0).unwrap(),
    }

    let mut keys = vec![""; model.feature_index.len()];
    for (k, &id) in &model.feature_index {
        keys[id as usize] = k;
    }
    out.write_u32::<LE>(keys.len() as u32).unwrap();
    for k in keys {
        put_str(&mut out, k);
    }
    for &w in &model.weights {
        out.write_f64::<LE>(w).unwrap();
    }
    let crc = crc32fast::hash(&out);
    out.write_u32::<LE>(crc).unwrap();
    Ok(out)
}

struct Reader<'a>(Cursor<&'a [u8]>);

impl Reader<'_> {
    fn u8(&mut self) -> Result<u8, ModelError> {
        self.0.read_u8().map_err(|_| ModelError::Truncated)
    }

    fn u32(&mut self) -> Result<u32, ModelError> {
        self.0.read_u32::<LE>().map_err(|_| ModelError::Truncated)
    }

    fn u64(&mut self) -> Result<u64, ModelError> {
        self.0.read_u64::<LE>().map_err(|_| ModelError::Truncated)
    }

    fn f64(&mut self) -> Result<f64, ModelError> {
        self.0.read_f64::<LE>().map_err(|_| ModelError::Truncated)
    }

    fn str(&mut self) -> Result<String, ModelError> {
        let len = self.u32()? as usize;
        let remaining = self.0.get_ref().len() - self.0.position() as usize;
        if len > remaining {
            return Err(ModelError::Truncated);
        }
        let mut buf = vec![0; len];
        self.0.read_exact(&mut buf).map_err(|_| ModelError::Truncated)?;
        String::from_utf8(buf).map_err(|_| ModelError::Corrupted("invalid UTF-8 string".into()))
    }

    fn count(&mut self, what: &str) -> Result<usize, ModelError> {
        let n = self.u32()? as usize;
        // Every counted item takes at least 4 bytes.
        let remaining = self.0.get_ref().len() - self.0.position() as usize;
        if n > remaining / 4 + 1 {
            return Err(ModelError::Corrupted(format!("implausible {what} count {n}")));
        }
        Ok(n)
    }
}

pub fn load_model(bytes: &[u8]) -> Result<LinearModel, ModelError> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(ModelError::NotAModel);
    }
    if bytes.len() < MAGIC.len() + 8 {
        return Err(ModelError::Truncated);
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(ModelError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    if crc32fast::hash(body) != stored {
        // A short file almost always fails here; report it as truncation when
        // the structure cannot be read either.
        return Err(match parse_body(body) {
            Err(ModelError::Truncated) => ModelError::Truncated,
            _ => ModelError::Corrupted("checksum mismatch".into()),
        });
    }
    parse_body(body)
}

fn parse_body(body: &[u8]) -> Result<LinearModel, ModelError> {
    let mut r = Reader(Cursor::new(body));
    r.0.set_position(12);

    let sets: FeatureSets = r
        .str()?
        .parse()
        .map_err(|e| ModelError::Corrupted(format!("feature sets: {e}")))?;
    let n_labels = r.count("label")?;
    if n_labels == 0 {
        return Err(ModelError::Corrupted("no labels".into()));
    }
    let mut labels = Vec::with_capacity(n_labels);
    for _ in 0..n_labels {
        let s = r.str()?;
        labels.push(Tag::new(s).ok_or_else(|| ModelError::Corrupted("invalid label".into()))?);
    }

    let epochs = r.u32()? as usize;
    let learning_rate = r.f64()?;
    let l2 = r.f64()?;
    let seed = r.u64()?;
    let shuffle = r.u8()? != 0;
    let loss = match r.u8()? {
        0 => Loss::Logistic,
        1 => Loss::AveragedPerceptron,
        other => return Err(ModelError::Corrupted(format!("unknown loss id {other}"))),
    };
    let batch = r.u64()?;
    let config = TrainConfig {
        epochs,
        learning_rate,
        l2,
        seed,
        shuffle,
        loss,
        batch_size: if batch == 0 { None } else { Some(batch as usize) },
        record_loss: false,
    };

    let clusters = if r.u8()? == 1 {
        let n = r.count("prefix")?;
        let mut prefixes = Vec::with_capacity(n);
        for _ in 0..n {
            prefixes.push(r.u32()? as usize);
        }
        let (map, _) = ClusterMap::parse(&r.str()?)
            .map_err(|e| ModelError::Corrupted(format!("clusters: {e}")))?;
        Some(Arc::new(map.with_prefixes(prefixes)))
    } else {
        None
    };
    let lexicon = if r.u8()? == 1 {
        let lex = Lexicon::from_text(&r.str()?)
            .map_err(|e| ModelError::Corrupted(format!("lexicon: {e}")))?;
        Some(Arc::new(lex))
    } else {
        None
    };
    let extractor = FeatureExtractor::new(sets, clusters, lexicon)
        .map_err(|e| ModelError::Corrupted(e.to_string()))?;

    let n_features = r.count("feature")?;
    let mut feature_index = HashMap::with_capacity(n_features);
    for id in 0..n_features {
        if feature_index.insert(r.str()?, id as u32).is_some() {
            return Err(ModelError::Corrupted("duplicate feature key".into()));
        }
    }
    let n_weights = n_features * n_labels;
    let remaining = body.len() - r.0.position() as usize;
    if remaining < n_weights * 8 {
        return Err(ModelError::Truncated);
    }
    if remaining > n_weights * 8 {
        return Err(ModelError::Corrupted("trailing bytes".into()));
    }
    let mut weights = Vec::with_capacity(n_weights);
    for _ in 0..n_weights {
        let w = r.f64()?;
        if !w.is_finite() {
            return Err(ModelError::Corrupted("non-finite weight".into()));
        }
        weights.push(w);
    }
    Ok(LinearModel::from_parts(labels, feature_index, weights, config, extractor))
}
