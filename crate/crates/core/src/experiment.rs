//! Streaming selection experiments: generate an input sequence, run a
//! selector over it, and compare input and output block frequencies with
//! the target measure.

use std::fmt::Write as _;

use crate::alphabet::Symbol;
use crate::automata::{scc_decomposition, Machine, Selector};
use crate::compatibility::{check_selector_compatibility, CompatibilityWitness, Declarations};
use crate::error::{Error, Result};
use crate::format::selector_hash;
use crate::measures::MarkovMeasure;
use crate::seqgen::{generator, BlockCounter, BlockMode, FrequencyReport, GeneratorSpec};

pub const DEFAULT_N: u64 = 1_000_000;
pub const DEFAULT_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub selector: Selector,
    pub declarations: Declarations,
    /// `None` runs in uniform mode.
    pub measure: Option<MarkovMeasure>,
    /// Registered generator name.
    pub generator: String,
    pub seed: u64,
    pub n: u64,
    pub ks: Vec<usize>,
    pub mode: BlockMode,
    pub tolerance: f64,
    /// Count only after the run first enters a recurrent component.
    pub after_recurrent: bool,
}

impl ExperimentConfig {
    pub fn new(selector: Selector, measure: Option<MarkovMeasure>) -> Self {
        ExperimentConfig {
            selector,
            declarations: Declarations::default(),
            measure,
            generator: "sample".to_string(),
            seed: 0,
            n: DEFAULT_N,
            ks: vec![1, 2, 3],
            mode: BlockMode::Sliding,
            tolerance: DEFAULT_TOLERANCE,
            after_recurrent: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let max_k = *self
            .ks
            .iter()
            .max()
            .ok_or_else(|| Error::Validation("no block lengths given".into()))?;
        if self.ks.contains(&0) {
            return Err(Error::BlockLengthOutOfRange { k: 0, len: self.n });
        }
        if self.n < 100 * max_k as u64 {
            return Err(Error::Validation(format!(
                "n = {} is below 100 times the largest block length {max_k}",
                self.n
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Validation("tolerance must be positive".into()));
        }
        Ok(())
    }

    /// The measure output frequencies are compared with.
    pub fn target(&self) -> MarkovMeasure {
        self.measure
            .clone()
            .unwrap_or_else(|| MarkovMeasure::uniform(self.selector.alphabet().clone()))
    }
}

#[derive(Debug, Clone)]
pub struct BlockResult {
    pub k: usize,
    pub report: FrequencyReport,
    pub discrepancy: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub input: Vec<BlockResult>,
    pub output: Vec<BlockResult>,
    pub input_length: u64,
    pub output_length: u64,
    /// Adjacent output pairs `ab` with `P[a][b] = 0` (Markov mode).
    pub forbidden_output_blocks: u64,
    /// Markov mode only.
    pub witness: Option<CompatibilityWitness>,
    /// Input symbols consumed before the run first stands in a recurrent
    /// component, if it does within `n` steps.
    pub recurrent_entry: Option<u64>,
    pub pass: bool,
}

/// Checks the selector, then streams `n` input symbols through it.
/// Compatibility and obliviousness failures are returned as errors.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let selector = &config.selector;
    selector.check_oblivious()?;
    let witness = match &config.measure {
        Some(mu) => Some(
            check_selector_compatibility(selector, mu, &config.declarations)
                .map_err(Error::NotCompatible)?,
        ),
        None => None,
    };
    let target = config.target();
    let alphabet = selector.alphabet();
    let spec = GeneratorSpec {
        alphabet: alphabet.clone(),
        measure: Some(target.clone()),
        seed: config.seed,
    };
    let input = generator(&config.generator)?.open(&spec)?;

    let scc = scc_decomposition(selector);
    let counters = || -> Result<Vec<BlockCounter>> {
        config
            .ks
            .iter()
            .map(|&k| BlockCounter::new(alphabet, k, config.mode))
            .collect()
    };
    let mut input_counters = counters()?;
    let mut output_counters = counters()?;

    let mut cursor = selector.cursor();
    let mut recurrent_entry = scc.is_in_recurrent(cursor.state()).then_some(0);
    let mut prev_out: Option<Symbol> = None;
    let mut forbidden = 0u64;
    let mut output_length = 0u64;
    for a in input.take(config.n as usize) {
        let counting = !config.after_recurrent || recurrent_entry.is_some();
        let emitted = cursor.feed(a)?;
        if counting {
            input_counters.iter_mut().for_each(|c| c.push(a));
            if let Some(b) = emitted {
                output_counters.iter_mut().for_each(|c| c.push(b));
                output_length += 1;
                if let (Some(prev), Some(mu)) = (prev_out, &config.measure) {
                    if mu.transition(prev, b) == 0.0 {
                        forbidden += 1;
                    }
                }
                prev_out = Some(b);
            }
        }
        if recurrent_entry.is_none() && scc.is_in_recurrent(cursor.state()) {
            recurrent_entry = Some(cursor.consumed());
        }
    }

    let finish = |counters: Vec<BlockCounter>| -> Vec<BlockResult> {
        counters
            .into_iter()
            .map(|c| {
                let report = c.report();
                BlockResult {
                    k: report.k,
                    discrepancy: report.discrepancy(&target),
                    report,
                }
            })
            .collect()
    };
    let input = finish(input_counters);
    let output = finish(output_counters);
    let pass = output.iter().all(|r| r.discrepancy <= config.tolerance);
    Ok(ExperimentReport {
        input_length: input.first().map_or(0, |r| r.report.n),
        input,
        output,
        output_length,
        forbidden_output_blocks: forbidden,
        witness,
        recurrent_entry,
        pass,
    })
}

/// The report as CSV with a `# key=value` header and a result footer.
pub fn experiment_csv(config: &ExperimentConfig, report: &ExperimentReport) -> String {
    let target = config.target();
    let mut out = String::new();
    let _ = writeln!(out, "# seed={}", config.seed);
    let _ = writeln!(out, "# n={}", config.n);
    let _ = writeln!(
        out,
        "# selector={}",
        selector_hash(&config.selector, &config.declarations)
    );
    let _ = writeln!(out, "# generator={}", config.generator);
    let _ = writeln!(
        out,
        "# measure={}",
        if config.measure.is_some() {
            "markov"
        } else {
            "uniform"
        }
    );
    let _ = writeln!(out, "# mode={}", config.mode.as_str());
    let _ = writeln!(out, "# tolerance={}", config.tolerance);
    let _ = writeln!(out, "# after_recurrent={}", config.after_recurrent);
    match report.recurrent_entry {
        Some(pos) => {
            let _ = writeln!(out, "# recurrent_entry={pos}");
        }
        None => out.push_str("# recurrent_entry=none\n"),
    }
    let _ = writeln!(out, "# output_length={}", report.output_length);
    if config.measure.is_some() {
        let _ = writeln!(
            out,
            "# forbidden_output_blocks={}",
            report.forbidden_output_blocks
        );
    }
    out.push_str("block,count,frequency,target,abs_error\n");
    for (stream, results) in [("input", &report.input), ("output", &report.output)] {
        for r in results.iter() {
            let _ = writeln!(out, "# {stream} k={} discrepancy={}", r.k, r.discrepancy);
            out.push_str(&r.report.csv_rows(Some(&target)));
        }
    }
    let _ = writeln!(
        out,
        "# result={}",
        if report.pass { "PASS" } else { "FAIL" }
    );
    out
}
