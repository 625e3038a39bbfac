use std::fmt::Write as _;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::measures::MarkovMeasure;

/// Largest block table a counter will allocate.
const MAX_BLOCKS: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockMode {
    /// Every window `x[i..i+k]`.
    Sliding,
    /// Disjoint blocks `x[0..k]`, `x[k..2k]`, ….
    Aligned,
}

impl BlockMode {
    pub fn as_str(self) -> &'static str {
        match self {
            BlockMode::Sliding => "sliding",
            BlockMode::Aligned => "aligned",
        }
    }
}

impl std::str::FromStr for BlockMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sliding" => Ok(BlockMode::Sliding),
            "aligned" => Ok(BlockMode::Aligned),
            other => Err(Error::UnknownStrategy {
                kind: "block mode",
                name: other.to_string(),
            }),
        }
    }
}

/// Streaming block counter. Memory is one counter per word of `A^k`.
#[derive(Debug, Clone)]
pub struct BlockCounter {
    alphabet: Alphabet,
    k: usize,
    mode: BlockMode,
    modulus: usize,
    rank: usize,
    filled: usize,
    seen: u64,
    counts: Vec<u64>,
}

impl BlockCounter {
    pub fn new(alphabet: &Alphabet, k: usize, mode: BlockMode) -> Result<Self> {
        let blocks = alphabet.count_words(k).unwrap_or(u128::MAX);
        if k == 0 {
            return Err(Error::BlockLengthOutOfRange { k, len: 0 });
        }
        if blocks > MAX_BLOCKS {
            return Err(Error::CapExceeded {
                requested: blocks,
                cap: MAX_BLOCKS,
            });
        }
        Ok(BlockCounter {
            alphabet: alphabet.clone(),
            k,
            mode,
            modulus: blocks as usize,
            rank: 0,
            filled: 0,
            seen: 0,
            counts: vec![0; blocks as usize],
        })
    }

    pub fn push(&mut self, a: Symbol) {
        self.seen += 1;
        self.rank = (self.rank * self.alphabet.len() + a) % self.modulus;
        self.filled += 1;
        if self.filled >= self.k {
            self.counts[self.rank] += 1;
            if self.mode == BlockMode::Aligned {
                self.filled = 0;
                self.rank = 0;
            }
        }
    }

    /// Symbols pushed so far.
    pub fn seen(&self) -> u64 {
        self.seen
    }

    /// Number of block slots held, `(#A)^k`.
    pub fn table_size(&self) -> usize {
        self.counts.len()
    }

    pub fn report(&self) -> FrequencyReport {
        FrequencyReport {
            alphabet: self.alphabet.clone(),
            mode: self.mode,
            k: self.k,
            n: self.seen,
            counts: self.counts.clone(),
        }
    }
}

/// Block counts of a prefix, indexed by lexicographic rank and including
/// blocks that never occurred.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyReport {
    pub alphabet: Alphabet,
    pub mode: BlockMode,
    pub k: usize,
    pub n: u64,
    pub counts: Vec<u64>,
}

impl FrequencyReport {
    /// `n - k + 1` windows or `⌊n/k⌋` aligned blocks.
    pub fn total(&self) -> u64 {
        let k = self.k as u64;
        match self.mode {
            BlockMode::Sliding => (self.n + 1).saturating_sub(k),
            BlockMode::Aligned => self.n / k,
        }
    }

    pub fn count(&self, block: &[Symbol]) -> u64 {
        self.counts[self.alphabet.rank(block)]
    }

    pub fn frequency_at(&self, rank: usize) -> f64 {
        match self.total() {
            0 => 0.0,
            t => self.counts[rank] as f64 / t as f64,
        }
    }

    pub fn frequency(&self, block: &[Symbol]) -> f64 {
        self.frequency_at(self.alphabet.rank(block))
    }

    /// `max_w |frequency(w) − μ(w)|` over all of `A^k`.
    pub fn discrepancy(&self, mu: &MarkovMeasure) -> f64 {
        (0..self.counts.len())
            .map(|r| {
                let w = self.alphabet.unrank(r, self.k);
                (self.frequency_at(r) - mu.word_measure(&w)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// CSV rows in lexicographic block order. Without a target the columns
    /// are `block,count,frequency`, otherwise
    /// `block,count,frequency,target,abs_error`.
    pub fn csv_rows(&self, target: Option<&MarkovMeasure>) -> String {
        let mut out = String::new();
        for r in 0..self.counts.len() {
            let w = self.alphabet.unrank(r, self.k);
            let block = self.alphabet.format_word(&w);
            let freq = self.frequency_at(r);
            let _ = write!(out, "{block},{},{freq}", self.counts[r]);
            if let Some(mu) = target {
                let t = mu.word_measure(&w);
                let _ = write!(out, ",{t},{}", (freq - t).abs());
            }
            out.push('\n');
        }
        out
    }
}

pub fn block_frequencies(
    alphabet: &Alphabet,
    x: &[Symbol],
    k: usize,
    mode: BlockMode,
) -> Result<FrequencyReport> {
    if k == 0 || k > x.len() {
        return Err(Error::BlockLengthOutOfRange {
            k,
            len: x.len() as u64,
        });
    }
    let mut counter = BlockCounter::new(alphabet, k, mode)?;
    x.iter().for_each(|&a| counter.push(a));
    Ok(counter.report())
}

pub fn discrepancy(report: &FrequencyReport, mu: &MarkovMeasure) -> f64 {
    report.discrepancy(mu)
}
