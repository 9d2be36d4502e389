#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use tmbench_core::machine::{Action, Move};
use tmbench_core::{Machine, BLANK};

/// A random total machine over {0,1} with 1..=5 working states.
pub fn random_machine(rng: &mut impl Rng) -> Machine {
    let working = rng.gen_range(1..=5);
    let mut states: Vec<String> = (0..working).map(|i| format!("w{i}")).collect();
    states.push("acc".into());
    states.push("rej".into());
    let symbols = ['0', '1', BLANK];
    let mut transitions = BTreeMap::new();
    for q in &states[..working] {
        for c in symbols {
            let target = states[rng.gen_range(0..states.len())].clone();
            let write = symbols[rng.gen_range(0..symbols.len())];
            let movement = if rng.gen_bool(0.5) { Move::Left } else { Move::Right };
            transitions.insert((q.clone(), c), Action::new(target, write, movement));
        }
    }
    Machine {
        input_alphabet: ['0', '1'].into(),
        tape_alphabet: symbols.into(),
        start_state: states[0].clone(),
        accept_state: "acc".into(),
        reject_state: "rej".into(),
        states,
        transitions,
    }
}

pub fn random_word(rng: &mut impl Rng, max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| if rng.gen_bool(0.5) { '1' } else { '0' }).collect()
}

/// All binary words of length at most `k`, built independently of the library.
pub fn binary_words_up_to(k: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..k {
        frontier = frontier
            .iter()
            .flat_map(|w| [format!("{w}0"), format!("{w}1")])
            .collect();
        out.extend(frontier.iter().cloned());
    }
    out
}

pub fn binary_words_of_length(len: usize) -> Vec<String> {
    binary_words_up_to(len)
        .into_iter()
        .filter(|w| w.len() == len)
        .collect()
}

/// Reference membership for the built-in languages.
pub fn reference_member(name: &str, w: &str) -> bool {
    match name {
        "contains-1" => w.chars().any(|c| c == '1'),
        "parity-even-ones" => w.matches('1').count() % 2 == 0,
        "palindrome" => w.chars().rev().collect::<String>() == w,
        "all" => true,
        "empty" => false,
        "div3" => w.is_empty() || u64::from_str_radix(w, 2).unwrap() % 3 == 0,
        other => panic!("no reference for {other}"),
    }
}

pub const BUILTINS: [&str; 6] = [
    "contains-1",
    "parity-even-ones",
    "palindrome",
    "all",
    "empty",
    "div3",
];
