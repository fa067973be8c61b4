use std::cmp::Ordering;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

/// A finite binary word, naming the cylinder of all sequences that extend it.
///
/// Bits are stored most-significant-first in the low `len` bits of `bits`.
/// `Ord` is the lexicographic string order, so a prefix sorts before all of
/// its extensions and the extensions of a word form a contiguous run.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Word {
    len: u8,
    bits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("empty word (use `e` for the root)")]
    Empty,
    #[error("invalid character {0:?} in binary word")]
    BadChar(char),
    #[error("word longer than {} bits", Word::MAX_LEN)]
    TooLong,
}

impl Word {
    pub const MAX_LEN: usize = 63;
    pub const ROOT: Word = Word { len: 0, bits: 0 };

    pub fn new(bits: u64, len: usize) -> Option<Word> {
        if len > Self::MAX_LEN || (len < 64 && bits >> len != 0) {
            return None;
        }
        Some(Word { len: len as u8, bits })
    }

    /// The word of length `depth` whose bits spell `index`.
    pub fn cell(index: u64, depth: usize) -> Word {
        Word::new(index, depth).expect("cell index out of range for depth")
    }

    pub fn len(self) -> usize {
        self.len as usize
    }

    pub fn is_root(self) -> bool {
        self.len == 0
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    /// Bit `i`, counting from the left.
    pub fn bit(self, i: usize) -> bool {
        assert!(i < self.len());
        (self.bits >> (self.len() - 1 - i)) & 1 == 1
    }

    pub fn child(self, bit: bool) -> Word {
        assert!(self.len() < Self::MAX_LEN, "word length overflow");
        Word {
            len: self.len + 1,
            bits: (self.bits << 1) | bit as u64,
        }
    }

    pub fn parent(self) -> Option<Word> {
        (self.len > 0).then(|| Word {
            len: self.len - 1,
            bits: self.bits >> 1,
        })
    }

    pub fn sibling(self) -> Option<Word> {
        (self.len > 0).then(|| Word {
            len: self.len,
            bits: self.bits ^ 1,
        })
    }

    pub fn prefix(self, len: usize) -> Word {
        assert!(len <= self.len());
        Word {
            len: len as u8,
            bits: self.bits >> (self.len() - len),
        }
    }

    /// True when `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(self, other: Word) -> bool {
        self.len <= other.len && other.bits >> (other.len - self.len) == self.bits
    }

    pub fn comparable(self, other: Word) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// The cells of `[self]` at resolution `depth`, as a half-open range of cell indices.
    pub fn cell_range(self, depth: usize) -> Range<u64> {
        assert!(depth >= self.len() && depth < 64);
        let shift = depth - self.len();
        (self.bits << shift)..((self.bits + 1) << shift)
    }

    /// All words of length exactly `len`, in lexicographic order.
    pub fn all_of_len(len: usize) -> impl Iterator<Item = Word> {
        assert!(len < 64);
        (0..1u64 << len).map(move |bits| Word {
            len: len as u8,
            bits,
        })
    }

    /// All words of length at most `depth`, in length-lexicographic order.
    pub fn all_up_to(depth: usize) -> impl Iterator<Item = Word> {
        (0..=depth).flat_map(Word::all_of_len)
    }

    /// Compare in length-lexicographic order (shorter words first).
    pub fn length_lex_cmp(self, other: Word) -> Ordering {
        (self.len, self.bits).cmp(&(other.len, other.bits))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        let common = self.len.min(other.len);
        let a = self.bits >> (self.len - common);
        let b = other.bits >> (other.len - common);
        a.cmp(&b).then(self.len.cmp(&other.len))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for Word {
    type Err = WordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "e" {
            return Ok(Word::ROOT);
        }
        if s.is_empty() {
            return Err(WordError::Empty);
        }
        if s.len() > Self::MAX_LEN {
            return Err(WordError::TooLong);
        }
        let mut bits = 0u64;
        for ch in s.chars() {
            bits = (bits << 1)
                | match ch {
                    '0' => 0,
                    '1' => 1,
                    other => return Err(WordError::BadChar(other)),
                };
        }
        Ok(Word {
            len: s.len() as u8,
            bits,
        })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            return f.write_str("e");
        }
        for i in 0..self.len() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}
