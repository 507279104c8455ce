/// Boundary pseudo-words and pseudo-tags. Each starts with a space, which can
/// never occur inside a corpus word or tag, so they cannot collide with real
/// values.
pub const BOS2: &str = " BOS2";
pub const BOS1: &str = " BOS1";
pub const EOS1: &str = " EOS1";
pub const EOS2: &str = " EOS2";
pub const BOS_TAG: &str = " BOS";
pub const EOS_TAG: &str = " EOS";
/// Tag slot not assigned yet (right context during left-to-right decoding).
pub const NO_TAG: &str = " NOTAG";

pub fn is_sentinel(value: &str) -> bool {
    value.starts_with(' ')
}

/// The five-word window around one position, with the tags known so far.
///
/// Index 2 of `words` and `tags` is the current position; indices 0..2 are
/// the left neighbours (w-2, w-1) and 3..5 the right ones (w+1, w+2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Context<'a> {
    pub words: [&'a str; 5],
    pub tags: [&'a str; 5],
    pub position: usize,
    pub sentence_length: usize,
}

impl<'a> Context<'a> {
    /// Window at `position` of a sentence. `tags` must be as long as `words`;
    /// use [`NO_TAG`] for slots without a tag.
    pub fn new(words: &[&'a str], tags: &[&'a str], position: usize) -> Context<'a> {
        debug_assert_eq!(words.len(), tags.len());
        debug_assert!(position < words.len());
        let n = words.len() as isize;
        let mut w = [""; 5];
        let mut t = [""; 5];
        for (slot, offset) in (-2isize..=2).enumerate() {
            let i = position as isize + offset;
            if i < 0 {
                w[slot] = if i == -1 { BOS1 } else { BOS2 };
                t[slot] = BOS_TAG;
            } else if i >= n {
                w[slot] = if i == n { EOS1 } else { EOS2 };
                t[slot] = EOS_TAG;
            } else {
                w[slot] = words[i as usize];
                t[slot] = tags[i as usize];
            }
        }
        Context {
            words: w,
            tags: t,
            position,
            sentence_length: words.len(),
        }
    }

    /// Word at a relative offset in -2..=2.
    #[inline]
    pub fn word(&self, offset: isize) -> &'a str {
        self.words[(offset + 2) as usize]
    }

    /// Tag at a relative offset in -2..=2.
    #[inline]
    pub fn tag(&self, offset: isize) -> &'a str {
        self.tags[(offset + 2) as usize]
    }

    pub fn current(&self) -> &'a str {
        self.words[2]
    }

    pub fn is_first(&self) -> bool {
        self.position == 0
    }

    pub fn is_last(&self) -> bool {
        self.position + 1 == self.sentence_length
    }
}
