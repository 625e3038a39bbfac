mod common;

use fsel_core::alphabet::is_subsequence;
use fsel_core::automata::{
    apply_selector, dfa_to_selector, run_word, scc_decomposition, selector_to_dfa, snake_automaton,
    Machine,
};
use fsel_core::Word;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn output_is_a_subsequence(s in common::complete_selector(4), u in common::word(2, 40)) {
        for p in 0..s.num_states() {
            let run = run_word(&s, p, &u).unwrap();
            prop_assert!(run.output.len() <= u.len());
            prop_assert!(is_subsequence(&run.output, &u));
            prop_assert_eq!(run.visits.values().sum::<u64>(), u.len() as u64);
            prop_assert_eq!(&run_word(&s, p, &u).unwrap(), &run);
        }
    }

    #[test]
    fn streaming_agrees_with_batch(s in common::complete_selector(4), u in common::word(2, 64)) {
        let streamed: Word = apply_selector(&s, u.iter().copied()).collect::<Result<_, _>>().unwrap();
        prop_assert_eq!(streamed, run_word(&s, s.initial(), &u).unwrap().output);
    }
}

proptest! {
    #[test]
    fn partial_runs_fail_at_the_first_gap(s in common::partial_selector(4), u in common::word(3, 20)) {
        let k = s.alphabet().len();
        prop_assume!(u.iter().all(|&a| a < k));
        match run_word(&s, s.initial(), &u) {
            Ok(run) => prop_assert_eq!(Some(run.end), s.end_state(s.initial(), &u)),
            Err(_) => prop_assert!(s.end_state(s.initial(), &u).is_none()),
        }
    }

    #[test]
    fn oblivious_round_trip(s in common::oblivious_selector(4)) {
        let (dfa, accepting) = selector_to_dfa(&s).unwrap();
        prop_assert_eq!(dfa_to_selector(&dfa, &accepting), s);
    }

    #[test]
    fn recurrent_components_have_no_exits(s in common::partial_selector(5)) {
        let report = scc_decomposition(&s);
        for (c, &recurrent) in report.recurrent.iter().enumerate() {
            let leaves = report.edges.iter().any(|&(from, _)| from == c);
            prop_assert_eq!(recurrent, !leaves);
        }
    }

    #[test]
    fn snake_transitions_match_runs(s in common::partial_selector(4), n in 1usize..=3) {
        let Ok(snake) = snake_automaton(&s, n) else {
            let empty = (0..s.num_states())
                .all(|p| s.alphabet().words(n).all(|w| s.end_state(p, &w).is_none()));
            prop_assert!(empty);
            return Ok(());
        };
        let k = s.alphabet().len();
        // every realizable run appears, and every extension is a transition
        for p in 0..s.num_states() {
            for w in s.alphabet().words(n) {
                let idx = snake.index_of(p, &w);
                prop_assert_eq!(idx.is_some(), s.end_state(p, &w).is_some());
                let Some(from) = idx else { continue };
                for a in 0..k {
                    let mut tail = w[1..].to_vec();
                    tail.push(a);
                    let Some(p1) = s.target(p, w[0]) else { continue };
                    let extended = s.end_state(p1, &tail).is_some();
                    let to = snake.automaton.target(from, a);
                    prop_assert_eq!(to.is_some(), extended);
                    if let Some(to) = to {
                        prop_assert_eq!(&snake.runs[to], &(p1, tail));
                    }
                }
            }
        }
    }
}
