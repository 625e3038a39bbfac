//! Word measures: Bernoulli and Markov measures, their conditional
//! measures, stationary distributions, and the Parry measure of a shift of
//! finite type given by a nonnegative matrix.

pub mod linalg;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::graph;

/// Row sums and distribution totals must be within this of 1.
pub const ROW_SUM_TOLERANCE: f64 = 1e-12;
/// Bound on `‖πP − π‖∞` for a valid Markov measure.
pub const STATIONARITY_TOLERANCE: f64 = 1e-10;
/// Bound on the residual of a computed stationary distribution.
pub const SOLVE_TOLERANCE: f64 = 1e-12;

/// A square row-stochastic matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl StochasticMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * n || n == 0 {
            return Err(Error::Validation(format!(
                "expected {n}x{n} entries, got {}",
                entries.len()
            )));
        }
        if let Some(x) = entries.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::Validation(format!(
                "negative or non-finite entry {x}"
            )));
        }
        for (i, row) in entries.chunks(n).enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::Validation(format!(
                    "row {i} sums to {sum}, not 1 (tolerance {ROW_SUM_TOLERANCE:e})"
                )));
            }
        }
        Ok(StochasticMatrix { n, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        StochasticMatrix::new(rows.len(), rows.concat())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_irreducible(&self) -> bool {
        graph::unreachable_pair(&graph::support_adjacency(&self.entries, self.n)).is_none()
    }
}

/// A probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    weights: Vec<f64>,
}

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::Validation("negative or non-finite weight".into()));
        }
        let sum: f64 = weights.iter().sum();
        if weights.is_empty() || (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::WeightsNotNormalized { sum });
        }
        Ok(Distribution { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Distribution {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }
}

/// The unique stationary distribution of an irreducible stochastic matrix.
pub fn stationary_distribution(p: &StochasticMatrix) -> Result<Distribution> {
    let labels: Vec<String> = (0..p.size()).map(|i| i.to_string()).collect();
    stationary_with_labels(p, &labels)
}

fn stationary_with_labels(p: &StochasticMatrix, labels: &[String]) -> Result<Distribution> {
    let adjacency = graph::support_adjacency(p.entries(), p.size());
    if let Some((from, to)) = graph::unreachable_pair(&adjacency) {
        return Err(Error::NotIrreducible {
            from: labels[from].clone(),
            to: labels[to].clone(),
        });
    }
    let pi = linalg::solve_stationary(p.entries(), p.size())
        .ok_or(Error::NonConvergence { iterations: 0 })?;
    let residual = linalg::stationary_residual(p.entries(), p.size(), &pi);
    if residual > SOLVE_TOLERANCE {
        return Err(Error::NonConvergence { iterations: 0 });
    }
    Distribution::new(pi)
}

/// The Markov measure `μ_{π,P}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovMeasure {
    alphabet: Alphabet,
    pi: Distribution,
    p: StochasticMatrix,
}

impl MarkovMeasure {
    pub fn new(alphabet: Alphabet, pi: Distribution, p: StochasticMatrix) -> Result<Self> {
        if pi.weights().len() != alphabet.len() || p.size() != alphabet.len() {
            return Err(Error::Validation(format!(
                "measure dimensions do not match alphabet of size {}",
                alphabet.len()
            )));
        }
        let residual = linalg::stationary_residual(p.entries(), p.size(), pi.weights());
        if residual > STATIONARITY_TOLERANCE {
            return Err(Error::Validation(format!(
                "pi is not stationary for P: residual {residual:e} > {STATIONARITY_TOLERANCE:e}"
            )));
        }
        Ok(MarkovMeasure { alphabet, pi, p })
    }

    /// Markov measure of an irreducible `P` with its stationary distribution.
    pub fn from_transition_matrix(alphabet: Alphabet, p: StochasticMatrix) -> Result<Self> {
        let pi = stationary_with_labels(&p, alphabet.symbols())?;
        MarkovMeasure::new(alphabet, pi, p)
    }

    /// Bernoulli measure: every row of `P` equals `weights`. Zero weights are
    /// allowed; such symbols fall outside the support.
    pub fn bernoulli(alphabet: Alphabet, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != alphabet.len() {
            return Err(Error::Validation("one weight per symbol expected".into()));
        }
        let pi = Distribution::new(weights)?;
        let rows = pi.weights().repeat(alphabet.len());
        let p = StochasticMatrix::new(alphabet.len(), rows)?;
        Ok(MarkovMeasure { alphabet, pi, p })
    }

    /// The uniform measure `w ↦ (#A)^{-|w|}`.
    pub fn uniform(alphabet: Alphabet) -> Self {
        let n = alphabet.len();
        MarkovMeasure::bernoulli(alphabet, vec![1.0 / n as f64; n]).expect("uniform weights")
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn pi(&self) -> &[f64] {
        self.pi.weights()
    }

    pub fn matrix(&self) -> &StochasticMatrix {
        &self.p
    }

    #[inline]
    pub fn transition(&self, a: Symbol, b: Symbol) -> f64 {
        self.p.get(a, b)
    }

    /// Symbols with zero stationary weight.
    pub fn null_symbols(&self) -> Vec<Symbol> {
        (0..self.alphabet.len())
            .filter(|&a| self.pi()[a] == 0.0)
            .collect()
    }

    /// `μ(w) = π_{w1} P_{w1 w2} ⋯`, with `μ(ε) = 1`. Symbols are indices into
    /// the measure's alphabet.
    pub fn word_measure(&self, w: &[Symbol]) -> f64 {
        match w.split_first() {
            None => 1.0,
            Some((&first, _)) => self.pi()[first] * self.path_product(w),
        }
    }

    /// `μ_a(w) = P_{a w1} P_{w1 w2} ⋯`, with `μ_a(ε) = 1`.
    pub fn conditional_word_measure(&self, a: Symbol, w: &[Symbol]) -> f64 {
        match w.first() {
            None => 1.0,
            Some(&first) => self.transition(a, first) * self.path_product(w),
        }
    }

    fn path_product(&self, w: &[Symbol]) -> f64 {
        w.windows(2).map(|p| self.transition(p[0], p[1])).product()
    }

    /// Forbidden blocks `ab` of the support, i.e. `P_ab = 0`.
    pub fn forbidden_blocks(&self) -> Vec<(Symbol, Symbol)> {
        let n = self.alphabet.len();
        (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.transition(a, b) == 0.0)
            .collect()
    }

    /// Whether `w` is a block of the support `X_μ`.
    pub fn word_in_support(&self, w: &[Symbol]) -> bool {
        match w.first() {
            None => true,
            Some(&a) => {
                self.pi()[a] > 0.0 && w.windows(2).all(|p| self.transition(p[0], p[1]) > 0.0)
            }
        }
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.alphabet.len() as f64;
        self.p.entries().iter().all(|&x| x == u)
    }
}

/// A shift of finite type with forbidden blocks of length two, given by the
/// zero pattern of a nonnegative matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SftSpec {
    alphabet: Alphabet,
    m: Vec<f64>,
    irreducible: bool,
    aperiodic: bool,
}

impl SftSpec {
    pub fn new(alphabet: Alphabet, m: Vec<f64>) -> Result<Self> {
        let n = alphabet.len();
        if m.len() != n * n {
            return Err(Error::Validation(format!("expected {n}x{n} matrix")));
        }
        if let Some(x) = m.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::Validation(format!(
                "negative or non-finite entry {x}"
            )));
        }
        let adjacency = graph::support_adjacency(&m, n);
        let irreducible = graph::unreachable_pair(&adjacency).is_none();
        let aperiodic = irreducible && linalg::period(&adjacency) == 1;
        Ok(SftSpec {
            alphabet,
            m,
            irreducible,
            aperiodic,
        })
    }

    pub fn from_rows(alphabet: Alphabet, rows: &[Vec<f64>]) -> Result<Self> {
        SftSpec::new(alphabet, rows.concat())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn matrix(&self) -> &[f64] {
        &self.m
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    /// Some power of the matrix is entrywise positive.
    pub fn is_aperiodic(&self) -> bool {
        self.aperiodic
    }
}

#[derive(Debug, Clone)]
pub struct ParryMeasure {
    pub measure: MarkovMeasure,
    /// Perron eigenvalue of the defining matrix.
    pub theta: f64,
    /// Left and right Perron eigenvectors, scaled so that `Σ l_i r_i = 1`.
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

/// Relative bound on `‖M r − θ r‖∞ / ‖r‖∞` (and likewise for `l`).
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-10;

/// `P_ij = M_ij r_j / (θ r_i)` and `π_i = l_i r_i`.
pub fn parry_measure(sft: &SftSpec) -> Result<ParryMeasure> {
    let n = sft.alphabet.len();
    let m = &sft.m;
    let adjacency = graph::support_adjacency(m, n);
    if let Some((from, to)) = graph::unreachable_pair(&adjacency) {
        return Err(Error::NotIrreducible {
            from: sft.alphabet.token(from).to_string(),
            to: sft.alphabet.token(to).to_string(),
        });
    }
    let pair = linalg::perron(m, n)?;
    let theta = pair.theta;
    let (mut left, right) = (pair.left, pair.right);

    let right_res = (0..n)
        .map(|i| ((0..n).map(|j| m[i * n + j] * right[j]).sum::<f64>() - theta * right[i]).abs())
        .fold(0.0, f64::max);
    let left_res = (0..n)
        .map(|j| ((0..n).map(|i| left[i] * m[i * n + j]).sum::<f64>() - theta * left[j]).abs())
        .fold(0.0, f64::max);
    // both vectors have unit ∞-norm here
    if right_res > EIGEN_RESIDUAL_TOLERANCE || left_res > EIGEN_RESIDUAL_TOLERANCE {
        return Err(Error::NonConvergence {
            iterations: pair.iterations,
        });
    }

    let dot: f64 = left.iter().zip(&right).map(|(l, r)| l * r).sum();
    left.iter_mut().for_each(|l| *l /= dot);

    let mut pi: Vec<f64> = left.iter().zip(&right).map(|(l, r)| l * r).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|x| *x /= total);

    let mut p = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            p[i * n + j] = m[i * n + j] * right[j] / (theta * right[i]);
        }
        // absorb the last few ulps of eigen-solver error
        let row_sum: f64 = p[i * n..(i + 1) * n].iter().sum();
        p[i * n..(i + 1) * n].iter_mut().for_each(|x| *x /= row_sum);
    }
    let measure = MarkovMeasure::new(
        sft.alphabet.clone(),
        Distribution::new(pi)?,
        StochasticMatrix::new(n, p)?,
    )?;
    Ok(ParryMeasure {
        measure,
        theta,
        left,
        right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const GOLDEN: f64 = 1.618_033_988_749_895;

    #[test]
    fn golden_mean_parry() {
        let parry = parry_measure(&fixtures::golden_sft()).unwrap();
        assert!((parry.theta - GOLDEN).abs() < 1e-12);
        let mu = &parry.measure;
        let l2 = GOLDEN * GOLDEN;
        assert!((mu.pi()[0] - l2 / (1.0 + l2)).abs() < 1e-12);
        assert!((mu.pi()[1] - 1.0 / (1.0 + l2)).abs() < 1e-12);
        assert!((mu.transition(0, 0) - 1.0 / GOLDEN).abs() < 1e-12);
        assert!((mu.transition(0, 1) - 1.0 / l2).abs() < 1e-12);
        assert_eq!(mu.transition(1, 0), 1.0);
        assert_eq!(mu.transition(1, 1), 0.0);
        let dot: f64 = parry
            .left
            .iter()
            .zip(&parry.right)
            .map(|(l, r)| l * r)
            .sum();
        assert!((dot - 1.0).abs() < 1e-12);
    }

    #[test]
    fn full_shift_parry_is_uniform() {
        let sft =
            SftSpec::from_rows(Alphabet::binary(), &[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let parry = parry_measure(&sft).unwrap();
        assert!((parry.theta - 2.0).abs() < 1e-12);
        for &x in parry.measure.matrix().entries() {
            assert!((x - 0.5).abs() < 1e-12);
        }
        assert!((parry.measure.pi()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn periodic_swap_parry() {
        let sft =
            SftSpec::from_rows(Alphabet::binary(), &[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(sft.is_irreducible());
        assert!(!sft.is_aperiodic());
        let parry = parry_measure(&sft).unwrap();
        assert!((parry.theta - 1.0).abs() < 1e-12);
        assert_eq!(parry.measure.matrix().entries(), &[0.0, 1.0, 1.0, 0.0]);
        assert!((parry.measure.pi()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reducible_sft_is_rejected() {
        let sft =
            SftSpec::from_rows(Alphabet::binary(), &[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        assert!(!sft.is_irreducible());
        assert!(matches!(
            parry_measure(&sft),
            Err(Error::NotIrreducible { .. })
        ));
    }

    #[test]
    fn word_measures_on_golden_parry() {
        let mu = fixtures::golden_parry();
        assert!((mu.word_measure(&[0]) - 0.723_606_797_7).abs() < 1e-10);
        assert_eq!(mu.word_measure(&[1, 1]), 0.0);
        assert!((mu.word_measure(&[0, 1, 0]) - 0.276_393_202_3).abs() < 1e-10);
        assert_eq!(mu.word_measure(&[]), 1.0);
        assert_eq!(mu.conditional_word_measure(1, &[0]), 1.0);
        assert_eq!(mu.conditional_word_measure(0, &[1, 1]), 0.0);
        assert_eq!(mu.conditional_word_measure(1, &[]), 1.0);
    }

    #[test]
    fn stationary_examples() {
        let half = StochasticMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        assert_eq!(
            stationary_distribution(&half).unwrap().weights(),
            &[0.5, 0.5]
        );

        let g = GOLDEN;
        let golden =
            StochasticMatrix::from_rows(&[vec![1.0 / g, 1.0 / (g * g)], vec![1.0, 0.0]]).unwrap();
        let pi = stationary_distribution(&golden).unwrap();
        let l2 = g * g;
        assert!((pi.weights()[0] - l2 / (1.0 + l2)).abs() < 1e-12);

        let id = StochasticMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            stationary_distribution(&id),
            Err(Error::NotIrreducible { from, to }) if from == "0" && to == "1"
        ));
    }

    #[test]
    fn bernoulli_measures() {
        let u = MarkovMeasure::uniform(Alphabet::binary());
        assert_eq!(u.word_measure(&[0, 1, 0]), 0.125);
        assert!(u.forbidden_blocks().is_empty());
        let b = MarkovMeasure::bernoulli(Alphabet::binary(), vec![0.9, 0.1]).unwrap();
        assert!((b.word_measure(&[1, 1]) - 0.01).abs() < 1e-15);
        let d = MarkovMeasure::bernoulli(Alphabet::binary(), vec![1.0, 0.0]).unwrap();
        assert_eq!(d.word_measure(&[1]), 0.0);
        assert_eq!(d.null_symbols(), vec![1]);
        assert!(!d.word_in_support(&[1]));
        assert!(matches!(
            MarkovMeasure::bernoulli(Alphabet::binary(), vec![0.5, 0.6]),
            Err(Error::WeightsNotNormalized { .. })
        ));
    }

    #[test]
    fn golden_support() {
        let mu = fixtures::golden_parry();
        assert_eq!(mu.forbidden_blocks(), vec![(1, 1)]);
        assert!(!mu.word_in_support(&[0, 1, 1, 0]));
        assert!(mu.word_in_support(&[0, 1, 0, 1]));
    }

    #[test]
    fn row_sum_validation() {
        assert!(matches!(
            StochasticMatrix::from_rows(&[vec![0.49, 0.5], vec![0.5, 0.5]]),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn aperiodicity_agrees_with_matrix_powers() {
        // brute force: some power M^k, k <= n^2, entrywise positive
        fn primitive_by_powers(m: &[f64], n: usize) -> bool {
            let base: Vec<bool> = m.iter().map(|&x| x > 0.0).collect();
            let mut power = base.clone();
            for _ in 0..n * n {
                if power.iter().all(|&b| b) {
                    return true;
                }
                let mut next = vec![false; n * n];
                for i in 0..n {
                    for j in 0..n {
                        next[i * n + j] = (0..n).any(|k| power[i * n + k] && base[k * n + j]);
                    }
                }
                power = next;
            }
            power.iter().all(|&b| b)
        }
        let alphabet = Alphabet::digits(3);
        for mask in 0u32..(1 << 9) {
            let m: Vec<f64> = (0..9).map(|i| ((mask >> i) & 1) as f64).collect();
            let sft = SftSpec::new(alphabet.clone(), m.clone()).unwrap();
            assert_eq!(
                sft.is_aperiodic(),
                primitive_by_powers(&m, 3),
                "mask {mask:09b}"
            );
        }
    }
}
