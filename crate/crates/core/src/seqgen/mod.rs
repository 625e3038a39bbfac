//! Reproducible input sequences and block-frequency statistics.

mod freq;
mod prng;

pub use freq::{block_frequencies, discrepancy, BlockCounter, BlockMode, FrequencyReport};
pub use prng::SplitMix;

use crate::alphabet::{Alphabet, Symbol, Word};
use crate::error::{Error, Result};
use crate::measures::MarkovMeasure;

/// Concatenation of all nonempty words, by length then lexicographically.
#[derive(Debug, Clone)]
pub struct Champernowne {
    size: usize,
    word: Word,
    pos: usize,
}

impl Champernowne {
    pub fn new(alphabet: &Alphabet) -> Self {
        Champernowne {
            size: alphabet.len(),
            word: vec![0],
            pos: 0,
        }
    }
}

impl Iterator for Champernowne {
    type Item = Symbol;

    fn next(&mut self) -> Option<Symbol> {
        if self.pos == self.word.len() {
            self.pos = 0;
            match self.word.iter().rposition(|&a| a + 1 < self.size) {
                Some(i) => {
                    self.word[i] += 1;
                    self.word[i + 1..].fill(0);
                }
                None => self.word = vec![0; self.word.len() + 1],
            }
        }
        let a = self.word[self.pos];
        self.pos += 1;
        Some(a)
    }
}

pub fn champernowne(alphabet: &Alphabet, n: usize) -> Word {
    Champernowne::new(alphabet).take(n).collect()
}

/// Markov chain sampler: the first symbol from `π`, each next one from the
/// row of its predecessor.
#[derive(Debug, Clone)]
pub struct MarkovSampler {
    measure: MarkovMeasure,
    rng: SplitMix,
    prev: Option<Symbol>,
}

impl MarkovSampler {
    pub fn new(measure: MarkovMeasure, seed: u64) -> Result<Self> {
        let k = measure.alphabet().len();
        for a in 0..k {
            if !measure.matrix().row(a).iter().any(|&x| x > 0.0) {
                return Err(Error::DeadEnd {
                    symbol: measure.alphabet().token(a).to_string(),
                });
            }
        }
        Ok(MarkovSampler {
            measure,
            rng: SplitMix::new(seed),
            prev: None,
        })
    }
}

impl Iterator for MarkovSampler {
    type Item = Symbol;

    fn next(&mut self) -> Option<Symbol> {
        let weights = match self.prev {
            None => self.measure.pi(),
            Some(a) => self.measure.matrix().row(a),
        };
        let a = self.rng.pick(weights);
        self.prev = Some(a);
        Some(a)
    }
}

pub fn sample_markov(measure: &MarkovMeasure, seed: u64, n: usize) -> Result<Word> {
    Ok(MarkovSampler::new(measure.clone(), seed)?.take(n).collect())
}

/// What a generator is asked to produce.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub alphabet: Alphabet,
    pub measure: Option<MarkovMeasure>,
    pub seed: u64,
}

pub type SymbolStream = Box<dyn Iterator<Item = Symbol> + Send>;

/// An infinite input sequence source.
pub trait SequenceGenerator: Sync {
    fn name(&self) -> &'static str;
    fn open(&self, spec: &GeneratorSpec) -> Result<SymbolStream>;
}

struct ChampernowneGenerator;
struct SampleGenerator;

impl SequenceGenerator for ChampernowneGenerator {
    fn name(&self) -> &'static str {
        "champernowne"
    }

    fn open(&self, spec: &GeneratorSpec) -> Result<SymbolStream> {
        Ok(Box::new(Champernowne::new(&spec.alphabet)))
    }
}

impl SequenceGenerator for SampleGenerator {
    fn name(&self) -> &'static str {
        "sample"
    }

    fn open(&self, spec: &GeneratorSpec) -> Result<SymbolStream> {
        let measure = spec
            .measure
            .clone()
            .unwrap_or_else(|| MarkovMeasure::uniform(spec.alphabet.clone()));
        if measure.alphabet() != &spec.alphabet {
            return Err(Error::Validation(
                "measure alphabet differs from the generator alphabet".into(),
            ));
        }
        Ok(Box::new(MarkovSampler::new(measure, spec.seed)?))
    }
}

static GENERATORS: [&dyn SequenceGenerator; 2] = [&ChampernowneGenerator, &SampleGenerator];

pub fn generators() -> &'static [&'static dyn SequenceGenerator] {
    &GENERATORS
}

pub fn generator(name: &str) -> Result<&'static dyn SequenceGenerator> {
    GENERATORS
        .iter()
        .copied()
        .find(|g| g.name() == name)
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "generator",
            name: name.to_string(),
        })
}
