use fsel_core::fixtures;
use fsel_core::seqgen::{
    block_frequencies, champernowne, discrepancy, sample_markov, BlockCounter, BlockMode,
};
use fsel_core::Alphabet;

#[test]
fn champernowne_is_balanced_at_a_million() {
    let b = Alphabet::binary();
    let x = champernowne(&b, 1_000_000);
    let r = block_frequencies(&b, &x, 1, BlockMode::Sliding).unwrap();
    assert!(discrepancy(&r, &fixtures::uniform_binary()) < 0.02);
}

#[test]
fn golden_samples_never_contain_forbidden_blocks() {
    let mu = fixtures::golden_parry();
    for seed in [0, 1, 2] {
        let x = sample_markov(&mu, seed, 1_000_000).unwrap();
        let r = block_frequencies(mu.alphabet(), &x, 2, BlockMode::Sliding).unwrap();
        for (a, b) in mu.forbidden_blocks() {
            assert_eq!(r.count(&[a, b]), 0);
        }
    }
}

#[test]
fn golden_sample_is_generic_at_block_length_two() {
    let mu = fixtures::golden_parry();
    let x = sample_markov(&mu, 7, 1_000_000).unwrap();
    let r = block_frequencies(mu.alphabet(), &x, 2, BlockMode::Sliding).unwrap();
    assert!(discrepancy(&r, &mu) < 0.01);
}

#[test]
fn sliding_and_aligned_agree_for_single_symbols() {
    let mu = fixtures::golden_parry();
    let x = sample_markov(&mu, 3, 10_000).unwrap();
    let s = block_frequencies(mu.alphabet(), &x, 1, BlockMode::Sliding).unwrap();
    let a = block_frequencies(mu.alphabet(), &x, 1, BlockMode::Aligned).unwrap();
    assert_eq!(s.counts, a.counts);
}

#[test]
fn count_identities() {
    let t = Alphabet::digits(3);
    let x = champernowne(&t, 5_003);
    for k in 1..=4 {
        let s = block_frequencies(&t, &x, k, BlockMode::Sliding).unwrap();
        assert_eq!(s.counts.iter().sum::<u64>(), 5_003 - k as u64 + 1);
        let a = block_frequencies(&t, &x, k, BlockMode::Aligned).unwrap();
        assert_eq!(a.counts.iter().sum::<u64>(), 5_003 / k as u64);
        assert_eq!(s.counts.len(), 3usize.pow(k as u32));
    }
}

#[test]
fn counter_memory_is_independent_of_length() {
    let b = Alphabet::binary();
    let mut c = BlockCounter::new(&b, 3, BlockMode::Sliding).unwrap();
    for a in champernowne(&b, 100_000) {
        c.push(a);
    }
    assert_eq!(c.table_size(), 8);
    assert_eq!(c.seen(), 100_000);
}

#[test]
fn identical_seeds_give_identical_samples() {
    let mu = fixtures::golden_parry();
    assert_eq!(
        sample_markov(&mu, 99, 50_000).unwrap(),
        sample_markov(&mu, 99, 50_000).unwrap()
    );
    assert_ne!(
        sample_markov(&mu, 99, 50_000).unwrap(),
        sample_markov(&mu, 100, 50_000).unwrap()
    );
}
