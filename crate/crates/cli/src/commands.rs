use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use fsel_core::automata::{apply_selector, Machine, Selector};
use fsel_core::chain::{
    compatible_chain, snake_distribution, snake_distribution_eta, uniform_chain, SnakeWeighting,
    StateChain,
};
use fsel_core::compatibility::{
    check_automaton_compatibility, check_selector_compatibility, CompatibilityWitness,
    Declarations, Violation,
};
use fsel_core::experiment::{experiment_csv, run_experiment, ExperimentConfig};
use fsel_core::format::{self, write_measure_text, SelectorFile};
use fsel_core::measures::{parry_measure, stationary_distribution, MarkovMeasure};
use fsel_core::oracles::{lemma_check, LemmaContext};
use fsel_core::seqgen::{block_frequencies, generator, BlockMode, GeneratorSpec};
use fsel_core::{Alphabet, Error, Word};

use crate::{Command, MeasureArgs};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_CHECK: u8 = 3;

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. }
            | Error::Io(_)
            | Error::UnknownSymbol(_)
            | Error::UnknownState(_)
            | Error::InvalidAlphabet(_)
            | Error::DuplicateTransition { .. }
            | Error::UnknownStrategy { .. } => EXIT_USAGE,
            _ => EXIT_DOMAIN,
        };
        let message = match &e {
            Error::NotCompatible(vs) => vs
                .iter()
                .map(Violation::to_string)
                .collect::<Vec<_>>()
                .join("\n"),
            Error::CapExceeded { .. } => {
                format!("{e}; use the statistical `experiment` command instead")
            }
            _ => e.to_string(),
        };
        CliError { code, message }
    }
}

type CmdResult = Result<u8, CliError>;

fn at(path: &Path) -> impl FnOnce(Error) -> CliError + '_ {
    move |e| {
        let mut err = CliError::from(e);
        err.message = format!("{}: {}", path.display(), err.message);
        err
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn load_selector(path: &Path) -> Result<SelectorFile, CliError> {
    format::read_selector(path).map_err(at(path))
}

fn load_measure(args: &MeasureArgs, alphabet: &Alphabet) -> Result<MarkovMeasure, CliError> {
    match &args.measure {
        Some(path) => format::read_measure(path).map_err(at(path)),
        None => Ok(MarkovMeasure::uniform(alphabet.clone())),
    }
}

fn parse_alphabet(spec: Option<&str>) -> Result<Alphabet, CliError> {
    match spec {
        Some(s) => Ok(Alphabet::new(s.split_whitespace())?),
        None => Ok(Alphabet::binary()),
    }
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| usage(format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

/// Raw sequence text: empty for the empty word.
fn raw(alphabet: &Alphabet, w: &[fsel_core::Symbol]) -> String {
    if w.is_empty() {
        String::new()
    } else {
        alphabet.format_word(w)
    }
}

fn witness_or_violations(
    selector: &Selector,
    mu: &MarkovMeasure,
    declarations: &Declarations,
) -> Result<CompatibilityWitness, CliError> {
    check_selector_compatibility(selector, mu, declarations)
        .map_err(|vs| CliError::from(Error::NotCompatible(vs)))
}

pub fn run(command: Command) -> CmdResult {
    match command {
        Command::Parry { matrix, digits } => parry(&matrix, digits),
        Command::Stationary { measure, digits } => stationary(&measure, digits),
        Command::Compat {
            selector,
            measure,
            automaton,
        } => compat(&selector, &measure, automaton),
        Command::LemmaCheck {
            selector,
            measure,
            lemma,
            n,
            w_max,
            k,
            epsilon,
            max_enum,
            failures_only,
        } => {
            let file = load_selector(&selector)?;
            let name = lemma.unwrap_or_else(|| {
                if measure.measure.is_some() {
                    "markov-upper"
                } else {
                    "upper"
                }
                .to_string()
            });
            let check = lemma_check(&name)?;
            let mu = load_measure(&measure, file.selector.alphabet())?;
            let witness = if check.needs_measure() {
                Some(witness_or_violations(
                    &file.selector,
                    &mu,
                    &file.declarations,
                )?)
            } else {
                None
            };
            let ctx = LemmaContext {
                selector: &file.selector,
                markov: witness.as_ref().map(|w| (&mu, w)),
                n_max: n,
                w_max,
                k,
                epsilon,
                cap: max_enum,
            };
            let results = check.run(&ctx)?;
            let mut out = std::io::stdout().lock();
            for r in results.iter().filter(|r| !failures_only || !r.pass) {
                let _ = writeln!(out, "{r}");
            }
            let failures = results.iter().filter(|r| !r.pass).count();
            eprintln!("{} checks, {failures} failures", results.len());
            Ok(if failures == 0 && !results.is_empty() {
                EXIT_OK
            } else {
                EXIT_CHECK
            })
        }
        Command::Snake {
            selector,
            measure,
            n,
            eta,
            digits,
        } => snake(&selector, &measure, n, eta, digits),
        Command::Chain {
            selector,
            measure,
            digits,
        } => chain(&selector, &measure, digits),
        Command::Select { selector, input } => {
            let file = load_selector(&selector)?;
            let alphabet = file.selector.alphabet();
            let x = alphabet.parse_word(&read_input(input.as_deref())?)?;
            let y = apply_selector(&file.selector, x).collect::<Result<Word, _>>()?;
            println!("{}", raw(alphabet, &y));
            Ok(EXIT_OK)
        }
        Command::Freq {
            ks,
            mode,
            measure,
            uniform,
            alphabet,
            input,
        } => {
            let mode: BlockMode = mode.parse()?;
            let target = match &measure {
                Some(p) => Some(format::read_measure(p).map_err(at(p))?),
                None => None,
            };
            let alphabet = match &target {
                Some(mu) => mu.alphabet().clone(),
                None => parse_alphabet(alphabet.as_deref())?,
            };
            let target =
                target.or_else(|| uniform.then(|| MarkovMeasure::uniform(alphabet.clone())));
            let x = alphabet.parse_word(&read_input(input.as_deref())?)?;
            let mut out = String::from(if target.is_some() {
                "block,count,frequency,target,abs_error\n"
            } else {
                "block,count,frequency\n"
            });
            for &k in &ks {
                let report = block_frequencies(&alphabet, &x, k, mode)?;
                if ks.len() > 1 {
                    out.push_str(&format!("# k={k}\n"));
                }
                out.push_str(&report.csv_rows(target.as_ref()));
                if let Some(mu) = &target {
                    eprintln!("k={k} discrepancy={}", report.discrepancy(mu));
                }
            }
            print!("{out}");
            Ok(EXIT_OK)
        }
        Command::Gen {
            input,
            measure,
            alphabet,
            seed,
            n,
        } => {
            let measure = match &measure {
                Some(p) => Some(format::read_measure(p).map_err(at(p))?),
                None => None,
            };
            let alphabet = match &measure {
                Some(mu) => mu.alphabet().clone(),
                None => parse_alphabet(alphabet.as_deref())?,
            };
            let spec = GeneratorSpec {
                alphabet: alphabet.clone(),
                measure,
                seed,
            };
            let x: Word = generator(&input)?.open(&spec)?.take(n as usize).collect();
            println!("{}", raw(&alphabet, &x));
            Ok(EXIT_OK)
        }
        Command::Experiment {
            selector,
            measure,
            input,
            seed,
            n,
            ks,
            mode,
            tolerance,
            out,
            after_recurrent,
            replicates,
        } => {
            let file = load_selector(&selector)?;
            let mu = match &measure.measure {
                Some(p) => Some(format::read_measure(p).map_err(at(p))?),
                None => None,
            };
            generator(&input)?;
            let mut config = ExperimentConfig::new(file.selector, mu);
            config.declarations = file.declarations;
            config.generator = input;
            config.seed = seed;
            config.n = n;
            if !ks.is_empty() {
                config.ks = ks;
            }
            config.mode = mode.parse()?;
            config.tolerance = tolerance;
            config.after_recurrent = after_recurrent;
            experiment(config, out, replicates.max(1))
        }
    }
}

fn parry(path: &Path, digits: usize) -> CmdResult {
    let sft = format::read_matrix(path).map_err(at(path))?;
    let parry = parry_measure(&sft)?;
    let mu = &parry.measure;
    let labels = mu.alphabet().symbols().to_vec();
    println!("theta {:.digits$}", parry.theta);
    print!(
        "{}",
        write_measure_text(&labels, Some(mu.pi()), mu.matrix().entries(), digits)
    );
    Ok(EXIT_OK)
}

fn stationary(path: &Path, digits: usize) -> CmdResult {
    let (alphabet, p) = format::read_transition_matrix(path).map_err(at(path))?;
    let pi = stationary_distribution(&p)?;
    print!(
        "{}",
        write_measure_text(alphabet.symbols(), Some(pi.weights()), p.entries(), digits)
    );
    Ok(EXIT_OK)
}

fn print_violations(violations: &[Violation]) -> u8 {
    for v in violations {
        println!("{v}");
    }
    EXIT_DOMAIN
}

fn compat(path: &Path, measure: &MeasureArgs, automaton: bool) -> CmdResult {
    if automaton {
        let file = format::read_automaton(path).map_err(at(path))?;
        let a = &file.automaton;
        let mu = load_measure(measure, a.alphabet())?;
        return match check_automaton_compatibility(a, &mu, &file.declarations) {
            Ok(w) => {
                for q in 0..a.num_states() {
                    println!(
                        "state {} iota {}",
                        a.state_name(q),
                        a.alphabet().token(w.iota[q])
                    );
                }
                Ok(EXIT_OK)
            }
            Err(vs) => Ok(print_violations(&vs)),
        };
    }
    let file = load_selector(path)?;
    let s = &file.selector;
    let mu = load_measure(measure, s.alphabet())?;
    match check_selector_compatibility(s, &mu, &file.declarations) {
        Ok(w) => {
            let alphabet = s.alphabet();
            let eta = w.eta.as_deref().unwrap_or(&w.iota);
            for q in 0..s.num_states() {
                let flag = if w.unconstrained_eta.contains(&q) {
                    " (eta defaulted)"
                } else {
                    ""
                };
                println!(
                    "state {} iota {} eta {}{flag}",
                    s.state_name(q),
                    alphabet.token(w.iota[q]),
                    alphabet.token(eta[q])
                );
            }
            Ok(EXIT_OK)
        }
        Err(vs) => Ok(print_violations(&vs)),
    }
}

fn print_chain(chain: &StateChain, pi: Option<&[f64]>, digits: usize) {
    print!(
        "{}",
        write_measure_text(chain.labels(), pi, chain.matrix(), digits)
    );
}

fn chain(path: &Path, measure: &MeasureArgs, digits: usize) -> CmdResult {
    let file = load_selector(path)?;
    let s = &file.selector;
    let chain = match &measure.measure {
        None => uniform_chain(s)?,
        Some(_) => {
            let mu = load_measure(measure, s.alphabet())?;
            let w = witness_or_violations(s, &mu, &file.declarations)?;
            compatible_chain(s, &mu, &w.iota)?
        }
    };
    match chain.stationary() {
        Ok(pi) => {
            print_chain(&chain, Some(pi), digits);
            Ok(EXIT_OK)
        }
        Err(e) => {
            print_chain(&chain, None, digits);
            Err(e.into())
        }
    }
}

fn snake(path: &Path, measure: &MeasureArgs, n: usize, eta: bool, digits: usize) -> CmdResult {
    let file = load_selector(path)?;
    let s = &file.selector;
    let Some(_) = &measure.measure else {
        if eta {
            return Err(usage("--eta needs --measure"));
        }
        let d = snake_distribution(s, SnakeWeighting::Uniform, n)?;
        let chain = uniform_chain(&d.snake.automaton)?;
        println!("# max_deviation {:e}", d.max_deviation);
        print_chain(&chain, Some(&d.closed_form), digits);
        return Ok(EXIT_OK);
    };
    let mu = load_measure(measure, s.alphabet())?;
    let w = witness_or_violations(s, &mu, &file.declarations)?;
    let weighting = SnakeWeighting::Markov {
        measure: &mu,
        iota: &w.iota,
    };
    let d = snake_distribution(s, weighting, n)?;
    let snake_iota: Vec<_> = d.snake.runs.iter().map(|(_, u)| u[n - 1]).collect();
    let chain = compatible_chain(&d.snake.automaton, &mu, &snake_iota)?;
    if eta {
        let eta_labels = w.eta.as_deref().unwrap_or(&w.iota);
        let (_, weights) = snake_distribution_eta(s, &mu, &w.iota, eta_labels, n)?;
        println!(
            "# eta-weighted; iota-weighted max_deviation {:e}",
            d.max_deviation
        );
        print_chain(&chain, Some(&weights), digits);
    } else {
        println!("# max_deviation {:e}", d.max_deviation);
        print_chain(&chain, Some(&d.closed_form), digits);
    }
    Ok(EXIT_OK)
}

fn replicate_path(out: &Path, seed: u64) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(format!(".seed{seed}"));
    PathBuf::from(name)
}

fn failure_csv(config: &ExperimentConfig, message: &str) -> String {
    let mut s = format!("# seed={}\n# n={}\n", config.seed, config.n);
    s.push_str(&format!(
        "# selector={}\n",
        format::selector_hash(&config.selector, &config.declarations)
    ));
    s.push_str("block,count,frequency,target,abs_error\n");
    for line in message.lines() {
        s.push_str(&format!("# error={line}\n"));
    }
    s.push_str("# result=FAIL\n");
    s
}

fn experiment(base: ExperimentConfig, out: Option<PathBuf>, replicates: u64) -> CmdResult {
    let configs: Vec<ExperimentConfig> = (0..replicates)
        .map(|i| {
            let mut c = base.clone();
            c.seed = base.seed.wrapping_add(i);
            c
        })
        .collect();
    let outcomes: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| scope.spawn(move || run_experiment(c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("experiment thread panicked"))
            .collect()
    });

    let mut code = EXIT_OK;
    for (config, outcome) in configs.iter().zip(outcomes) {
        let (csv, this_code) = match outcome {
            Ok(report) => {
                for r in &report.output {
                    eprintln!(
                        "seed={} k={} input_discrepancy={:.6} output_discrepancy={:.6}",
                        config.seed,
                        r.k,
                        report
                            .input
                            .iter()
                            .find(|i| i.k == r.k)
                            .map_or(0.0, |i| i.discrepancy),
                        r.discrepancy
                    );
                }
                if config.measure.is_some() {
                    eprintln!(
                        "seed={} forbidden_output_blocks={}",
                        config.seed, report.forbidden_output_blocks
                    );
                }
                let verdict = if report.pass { "PASS" } else { "FAIL" };
                eprintln!(
                    "seed={} output_length={} {verdict}",
                    config.seed, report.output_length
                );
                let code = if report.pass { EXIT_OK } else { EXIT_CHECK };
                (experiment_csv(config, &report), code)
            }
            Err(e) => {
                let err = CliError::from(e);
                if err.message.starts_with("VIOLATION") {
                    println!("{}", err.message);
                } else {
                    eprintln!("fsel: {}", err.message);
                }
                (failure_csv(config, &err.message), err.code)
            }
        };
        code = code.max(this_code);
        match &out {
            Some(path) => {
                let path = if replicates > 1 {
                    replicate_path(path, config.seed)
                } else {
                    path.clone()
                };
                std::fs::write(&path, csv)
                    .map_err(|e| usage(format!("{}: {e}", path.display())))?;
            }
            None => print!("{csv}"),
        }
    }
    Ok(code)
}
