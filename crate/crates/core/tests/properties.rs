mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{binary_words_up_to, random_machine, reference_member, BUILTINS};
use tmbench_core::convergence::{build_trie_machine, LanguageOracle};
use tmbench_core::cost::counted_set;
use tmbench_core::format::{emit_machine, parse_machine};
use tmbench_core::machine::{run, run_traced, Runner};
use tmbench_core::measures::{check_bound, BoundSpec};
use tmbench_core::nondet::{build_demo_machines, decide_nc, numeral_value, SearchLimits};
use tmbench_core::{CostModel, Machine, MeasureFunction, Verdict};

fn machine_from_seed(seed: u64) -> Machine {
    random_machine(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn binary_word(max: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('0'), Just('1')], 0..=max)
        .prop_map(|v| v.into_iter().collect())
}

fn measure() -> impl Strategy<Value = MeasureFunction> {
    let a = 0.01f64..8.0;
    let b = 0.0f64..8.0;
    prop_oneof![
        Just(MeasureFunction::Identity),
        (a.clone(), b.clone()).prop_map(|(a, b)| MeasureFunction::linear(a, b).unwrap()),
        (a.clone(), b).prop_map(|(a, b)| MeasureFunction::log_shift(a, b).unwrap()),
        (a.clone(), 0.1f64..4.0).prop_map(|(a, k)| MeasureFunction::power(a, k).unwrap()),
        a.prop_map(|a| MeasureFunction::exp2(a).unwrap()),
    ]
}

proptest! {
    #[test]
    fn runs_are_deterministic_and_traces_consistent(seed: u64, input in binary_word(8), fuel in 1u64..300) {
        let m = machine_from_seed(seed);
        let a = run_traced(&m, &input, &CostModel::FreeBlindMoves, fuel).unwrap();
        let b = run_traced(&m, &input, &CostModel::FreeBlindMoves, fuel).unwrap();
        prop_assert_eq!(&a, &b);
        let trace = a.trace.as_ref().unwrap();
        prop_assert_eq!(a.total_steps, trace.len() as u64);
        prop_assert_eq!(a.counted_steps, trace.iter().filter(|e| e.counted).count() as u64);
        prop_assert!(a.counted_steps <= a.total_steps);
    }

    #[test]
    fn more_fuel_does_not_change_a_halting_run(seed: u64, input in binary_word(8), extra in 0u64..100) {
        let m = machine_from_seed(seed);
        let r = run_traced(&m, &input, &CostModel::CountAll, 400).unwrap();
        if r.verdict != Verdict::FuelExhausted {
            let again = run_traced(&m, &input, &CostModel::CountAll, r.total_steps.max(1) + extra).unwrap();
            prop_assert_eq!(r, again);
        }
    }

    #[test]
    fn tape_stays_local(seed: u64, input in binary_word(8), fuel in 1u64..200) {
        let m = machine_from_seed(seed);
        let runner = Runner::new(&m, &CostModel::CountAll).unwrap();
        let r = runner.run_traced(&input, fuel).unwrap();
        let steps = r.total_steps as i64;
        // Replay on the configuration level and check the final tape.
        let mut c = m.initial_configuration(&input).unwrap();
        for _ in 0..r.total_steps {
            match m.step(&c).unwrap() {
                tmbench_core::machine::Step::Applied { next, .. } => c = next,
                tmbench_core::machine::Step::Halted => break,
            }
        }
        let len = input.len() as i64;
        prop_assert!(c.tape.non_blank().all(|(i, _)| -steps <= i && i <= len + steps));
    }

    #[test]
    fn smaller_counted_sets_count_fewer_steps(seed: u64, input in binary_word(8), mask: u8) {
        let m = machine_from_seed(seed);
        let working: Vec<String> = m.states.iter().filter(|q| !m.is_halting(q)).cloned().collect();
        let big: Vec<String> = working.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, q)| q.clone()).collect();
        let small: Vec<String> = big.iter().take(big.len() / 2).cloned().collect();
        // Freeing more states yields a subset of the counted entries.
        let more_free = CostModel::free_states(big);
        let fewer_free = CostModel::free_states(small);
        prop_assert!(counted_set(&m, &more_free).unwrap().is_subset(&counted_set(&m, &fewer_free).unwrap()));
        let a = run(&m, &input, &more_free, 200).unwrap();
        let b = run(&m, &input, &fewer_free, 200).unwrap();
        prop_assert!(a.counted_steps <= b.counted_steps);
    }

    #[test]
    fn counting_depends_only_on_table_keys(seed: u64, x in binary_word(8), y in binary_word(8)) {
        let m = machine_from_seed(seed);
        let cost = CostModel::FreeBlindMoves;
        let set = counted_set(&m, &cost).unwrap();
        for input in [x, y] {
            let r = run_traced(&m, &input, &cost, 200).unwrap();
            for e in r.trace.unwrap() {
                prop_assert_eq!(e.counted, set.contains(&(e.state.clone(), e.read)));
            }
        }
    }

    #[test]
    fn machine_text_round_trips(seed: u64) {
        let m = machine_from_seed(seed);
        let text = emit_machine(&m);
        let parsed = parse_machine(&text).unwrap();
        prop_assert_eq!(emit_machine(&parsed), text);
        prop_assert_eq!(parsed, m);
    }

    #[test]
    fn evaluation_is_pure_and_monotone(f in measure(), x in 0.001f64..60.0, dx in 0.001f64..10.0) {
        let a = f.evaluate(x).unwrap();
        prop_assert_eq!(a.to_bits(), f.evaluate(x).unwrap().to_bits());
        prop_assert!(a > 0.0);
        prop_assert!(f.evaluate(x + dx).unwrap() > a);
    }

    #[test]
    fn composition_order_is_not_swapped(x in 0.001f64..1e6) {
        let g = MeasureFunction::linear(2.0, 0.0).unwrap();
        let t = MeasureFunction::power(1.0, 2.0).unwrap();
        let outer = BoundSpec::outer(g, t).evaluate(x).unwrap();
        let inner = BoundSpec::inner(g, t).evaluate(x).unwrap();
        prop_assert_eq!(inner, 2.0 * outer);
    }

    #[test]
    fn identity_transform_collapses(seed: u64, g in measure(), inputs in proptest::collection::vec(binary_word(6), 1..8)) {
        let m = machine_from_seed(seed);
        let plain = check_bound(&m, &CostModel::CountAll, &BoundSpec::plain(g), &inputs, 100).unwrap();
        for spec in [BoundSpec::outer(g, MeasureFunction::Identity), BoundSpec::inner(g, MeasureFunction::Identity)] {
            prop_assert_eq!(&plain, &check_bound(&m, &CostModel::CountAll, &spec, &inputs, 100).unwrap());
        }
    }

    #[test]
    fn larger_bounds_pass_more(seed: u64, a in 0.1f64..4.0, extra in 0.0f64..4.0, inputs in proptest::collection::vec(binary_word(6), 1..8)) {
        let m = machine_from_seed(seed);
        let small = MeasureFunction::linear(a, 0.0).unwrap();
        let large = MeasureFunction::linear(a + extra, 0.0).unwrap();
        let r1 = check_bound(&m, &CostModel::CountAll, &BoundSpec::plain(small), &inputs, 100).unwrap();
        let r2 = check_bound(&m, &CostModel::CountAll, &BoundSpec::plain(large), &inputs, 100).unwrap();
        for (p, q) in r1.rows.iter().zip(&r2.rows) {
            prop_assert!(!p.pass || q.pass);
        }
        prop_assert_eq!(r1.verdict, r1.worst_margin <= 0.0);
    }

    #[test]
    fn enlarging_the_certificate_bound_keeps_acceptance(x in binary_word(10), a in 0.1f64..2.0, extra in 0.0f64..2.0) {
        let demo = build_demo_machines();
        let limits = SearchLimits::default();
        let small = decide_nc(&demo.checker, &MeasureFunction::log_shift(a, 0.0).unwrap(), &x, &CostModel::CountAll, limits).unwrap();
        let large = decide_nc(&demo.checker, &MeasureFunction::log_shift(a + extra, 0.0).unwrap(), &x, &CostModel::CountAll, limits).unwrap();
        prop_assert!(!small.accepted || large.accepted);
        prop_assert_eq!(small.accepted, small.witness.is_some());
    }

    #[test]
    fn trie_halts_within_depth_plus_two(name in proptest::sample::select(BUILTINS.to_vec()), n in 0usize..7, w in binary_word(12)) {
        let t = build_trie_machine(&LanguageOracle::Builtin(name.parse().unwrap()), n).unwrap();
        let r = run(&t.machine, &w, &CostModel::CountAll, 100).unwrap();
        prop_assert!(r.total_steps <= w.len().min(n) as u64 + 2);
        prop_assert_eq!(r.total_steps == w.len() as u64 + 1, w.len() <= n);
        prop_assert_eq!(r.verdict == Verdict::Accepted, w.len() <= n && reference_member(name, &w));
    }
}

#[test]
fn witness_numerals_are_logarithmic() {
    let demo = build_demo_machines();
    let g = MeasureFunction::log_shift(1.0, 1.0).unwrap();
    for n in 1..=64usize {
        let x = format!("{}1", "0".repeat(n - 1));
        let r = decide_nc(&demo.checker, &g, &x, &CostModel::CountAll, SearchLimits::default()).unwrap();
        let witness = r.witness.unwrap();
        assert_eq!(numeral_value(&witness), n as i64 - 1);
        assert!(witness.len() <= (n as f64).log2().floor() as usize + 1);
    }
}

#[test]
fn scanner_is_linear_under_both_models() {
    let scanner = build_demo_machines().scanner;
    for cost in [CostModel::CountAll, CostModel::FreeBlindMoves] {
        let runner = Runner::new(&scanner, &cost).unwrap();
        for n in 1..=64 {
            assert_eq!(runner.run(&"0".repeat(n), 100).unwrap().counted_steps, n as u64 + 1);
        }
    }
}

#[test]
fn shallower_tries_are_restrictions_of_deeper_ones() {
    for name in BUILTINS {
        let oracle = LanguageOracle::Builtin(name.parse().unwrap());
        let runners: Vec<Runner> = (0..=8)
            .map(|n| Runner::new(&build_trie_machine(&oracle, n).unwrap().machine, &CostModel::CountAll).unwrap())
            .collect();
        let words = binary_words_up_to(8);
        for m in 0..=8 {
            for n in m..=8 {
                for w in &words {
                    let in_m = runners[m].run(w, 50).unwrap().verdict == Verdict::Accepted;
                    let in_n = runners[n].run(w, 50).unwrap().verdict == Verdict::Accepted;
                    assert_eq!(in_m, in_n && w.len() <= m, "{name} m={m} n={n} {w}");
                }
            }
        }
    }
}
