//! Finite alphabets and words over them.
//!
//! Symbols are stored as indices into the alphabet; the declaration order of
//! the alphabet is the order used for lexicographic enumeration and for
//! inverse-CDF sampling.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index of a symbol in its [`Alphabet`].
pub type Symbol = usize;

/// A finite word, as symbol indices.
pub type Word = Vec<Symbol>;

/// Token reserved for the empty word in text formats.
pub const EMPTY_WORD_TOKEN: &str = "eps";

#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '#') {
                return Err(Error::InvalidAlphabet(format!("bad symbol token `{s}`")));
            }
            if s == EMPTY_WORD_TOKEN {
                return Err(Error::InvalidAlphabet(format!(
                    "`{EMPTY_WORD_TOKEN}` is reserved for the empty word"
                )));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// The alphabet `{0, 1}`.
    pub fn binary() -> Self {
        Alphabet::new(["0", "1"]).expect("valid alphabet")
    }

    /// The alphabet `{0, 1, ..., size-1}` with decimal tokens.
    pub fn digits(size: usize) -> Self {
        Alphabet::new((0..size).map(|d| d.to_string())).expect("valid alphabet")
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn token(&self, a: Symbol) -> &str {
        &self.symbols[a]
    }

    pub fn index_of(&self, token: &str) -> Result<Symbol> {
        self.index
            .get(token)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(token.to_string()))
    }

    /// True when every symbol is a single character, so words can be written
    /// without separators.
    pub fn is_single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses a word written as raw symbol text. Single-character alphabets
    /// read one symbol per character (whitespace ignored); otherwise symbols
    /// are whitespace-separated tokens. `eps` denotes the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let trimmed = text.trim();
        if trimmed == EMPTY_WORD_TOKEN {
            return Ok(Vec::new());
        }
        if self.is_single_char() {
            let mut buf = [0u8; 4];
            trimmed
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| self.index_of(c.encode_utf8(&mut buf)))
                .collect()
        } else {
            trimmed
                .split_whitespace()
                .map(|t| self.index_of(t))
                .collect()
        }
    }

    /// Inverse of [`Alphabet::parse_word`]; the empty word renders as `eps`.
    pub fn format_word(&self, word: &[Symbol]) -> String {
        if word.is_empty() {
            return EMPTY_WORD_TOKEN.to_string();
        }
        let sep = if self.is_single_char() { "" } else { " " };
        word.iter()
            .map(|&a| self.symbols[a].as_str())
            .collect::<Vec<_>>()
            .join(sep)
    }

    /// Number of words of length `k`, or `None` on overflow.
    pub fn count_words(&self, k: usize) -> Option<u128> {
        (self.len() as u128).checked_pow(u32::try_from(k).ok()?)
    }

    /// All words of length `k` in lexicographic order.
    pub fn words(&self, k: usize) -> Words {
        Words {
            size: self.len(),
            next: Some(vec![0; k]),
        }
    }

    /// Rank of `word` among the words of its length (base-`#A` value).
    pub fn rank(&self, word: &[Symbol]) -> usize {
        word.iter().fold(0, |acc, &a| acc * self.len() + a)
    }

    /// Inverse of [`Alphabet::rank`] for words of length `k`.
    pub fn unrank(&self, mut rank: usize, k: usize) -> Word {
        let mut word = vec![0; k];
        for slot in word.iter_mut().rev() {
            *slot = rank % self.len();
            rank /= self.len();
        }
        word
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.symbols).finish()
    }
}

/// Lexicographic odometer over `A^k`.
#[derive(Debug, Clone)]
pub struct Words {
    size: usize,
    next: Option<Word>,
}

impl Iterator for Words {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.len();
        loop {
            if i == 0 {
                break;
            }
            i -= 1;
            succ[i] += 1;
            if succ[i] < self.size {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

/// Whether `sub` is a subsequence of `word` (two-pointer scan).
pub fn is_subsequence(sub: &[Symbol], word: &[Symbol]) -> bool {
    let mut it = word.iter();
    sub.iter().all(|a| it.any(|b| b == a))
}
