//! Lookup-trie machines and convergence of language sequences.
//!
//! For a language `L` over `{0,1}` and a depth `n`, the trie machine has one
//! state per bit string of length at most `n`, named `q_<prefix>`. Each input
//! symbol moves one level down the trie; a symbol read at depth `n` rejects;
//! the blank at the end of the input accepts iff the prefix read so far is
//! in `L`. The machine accepts exactly `L ∩ {w : |w| <= n}` and halts after
//! `|w| + 1` steps on every word of length at most `n`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::machine::{Action, Machine, Move, Runner, Verdict, BLANK};
use crate::nondet::words_of_length;

pub const DEFAULT_MAX_TRIE_DEPTH: usize = 20;
pub const MAX_CONVERGENCE_K: usize = 12;
/// Seed for sampling words longer than the trie depth.
pub const SAMPLE_SEED: u64 = 0x7472_6965;
pub const SAMPLE_COUNT: usize = 256;
/// Depth up to which all words of length `n + 1` are checked instead of a sample.
pub const EXHAUSTIVE_LONG_WORDS_UP_TO: usize = 10;

pub const ACCEPT_STATE: &str = "q_accept";
pub const REJECT_STATE: &str = "q_reject";

const BINARY: [char; 2] = ['0', '1'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// Words containing at least one '1'.
    ContainsOne,
    /// Words with an even number of '1's.
    ParityEvenOnes,
    Palindrome,
    All,
    Empty,
    /// Words whose binary value (most significant bit first) is divisible by 3.
    Div3,
}

impl Builtin {
    pub const ALL: [Builtin; 6] = [
        Builtin::ContainsOne,
        Builtin::ParityEvenOnes,
        Builtin::Palindrome,
        Builtin::All,
        Builtin::Empty,
        Builtin::Div3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::ContainsOne => "contains-1",
            Builtin::ParityEvenOnes => "parity-even-ones",
            Builtin::Palindrome => "palindrome",
            Builtin::All => "all",
            Builtin::Empty => "empty",
            Builtin::Div3 => "div3",
        }
    }

    pub fn contains(self, w: &str) -> bool {
        match self {
            Builtin::ContainsOne => w.contains('1'),
            Builtin::ParityEvenOnes => w.bytes().filter(|&b| b == b'1').count() % 2 == 0,
            Builtin::Palindrome => w.bytes().eq(w.bytes().rev()),
            Builtin::All => true,
            Builtin::Empty => false,
            Builtin::Div3 => w.bytes().fold(0u8, |r, b| (2 * r + u8::from(b == b'1')) % 3) == 0,
        }
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Builtin::ALL.iter().map(|b| b.name()).collect();
                Error::Syntax(format!("unknown language {s:?}; built-ins are {}", names.join(", ")))
            })
    }
}

/// Membership predicate for a language over `{0,1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LanguageOracle {
    Builtin(Builtin),
    FiniteSet(BTreeSet<String>),
}

impl LanguageOracle {
    pub fn finite<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let words: BTreeSet<String> = words.into_iter().map(Into::into).collect();
        if let Some(bad) = words.iter().find(|w| !is_binary(w)) {
            return Err(Error::Domain(format!("word {bad:?} is not over {{0,1}}")));
        }
        Ok(LanguageOracle::FiniteSet(words))
    }

    pub fn contains(&self, w: &str) -> bool {
        match self {
            LanguageOracle::Builtin(b) => b.contains(w),
            LanguageOracle::FiniteSet(words) => words.contains(w),
        }
    }
}

impl fmt::Display for LanguageOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LanguageOracle::Builtin(b) => f.write_str(b.name()),
            LanguageOracle::FiniteSet(words) => write!(f, "finite set of {} words", words.len()),
        }
    }
}

fn is_binary(w: &str) -> bool {
    w.chars().all(|c| BINARY.contains(&c))
}

pub fn prefix_state(prefix: &str) -> String {
    format!("q_{prefix}")
}

#[derive(Debug, Clone)]
pub struct TrieMachineReport {
    pub machine: Machine,
    pub n: usize,
    pub oracle_queries: u64,
    pub state_count: usize,
}

pub fn build_trie_machine(oracle: &LanguageOracle, n: usize) -> Result<TrieMachineReport> {
    build_trie_machine_with_limit(oracle, n, DEFAULT_MAX_TRIE_DEPTH)
}

pub fn build_trie_machine_with_limit(
    oracle: &LanguageOracle,
    n: usize,
    limit: usize,
) -> Result<TrieMachineReport> {
    if n > limit {
        return Err(Error::TrieTooLarge { n, limit });
    }
    let mut states = Vec::new();
    let mut transitions = BTreeMap::new();
    let mut oracle_queries = 0u64;

    for depth in 0..=n {
        for prefix in words_of_length(&BINARY, depth) {
            let here = prefix_state(&prefix);
            for symbol in BINARY {
                let target = if depth < n {
                    prefix_state(&format!("{prefix}{symbol}"))
                } else {
                    REJECT_STATE.to_string()
                };
                transitions.insert((here.clone(), symbol), Action::new(target, BLANK, Move::Right));
            }
            oracle_queries += 1;
            let verdict = if oracle.contains(&prefix) {
                ACCEPT_STATE
            } else {
                REJECT_STATE
            };
            transitions.insert((here.clone(), BLANK), Action::new(verdict, BLANK, Move::Right));
            states.push(here);
        }
    }
    states.push(ACCEPT_STATE.to_string());
    states.push(REJECT_STATE.to_string());

    let machine = Machine {
        input_alphabet: BINARY.into(),
        tape_alphabet: ['0', '1', BLANK].into(),
        states,
        start_state: prefix_state(""),
        accept_state: ACCEPT_STATE.to_string(),
        reject_state: REJECT_STATE.to_string(),
        transitions,
    };
    let state_count = machine.states.len();
    Ok(TrieMachineReport {
        machine,
        n,
        oracle_queries,
        state_count,
    })
}

/// Every binary word of length at most `k`, shortest first.
pub fn words_up_to(k: usize) -> impl Iterator<Item = String> {
    (0..=k).flat_map(|len| words_of_length(&BINARY, len).collect::<Vec<_>>())
}

/// Words of length `n + 1` used to probe the length cap: all of them up to
/// depth 10, otherwise a fixed-seed sample.
pub fn long_word_sample(n: usize) -> Vec<String> {
    if n <= EXHAUSTIVE_LONG_WORDS_UP_TO {
        return words_of_length(&BINARY, n + 1).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    (0..SAMPLE_COUNT)
        .map(|_| (0..=n).map(|_| BINARY[rng.gen_range(0..2)]).collect())
        .collect()
}

fn verification_fuel(n: usize) -> u64 {
    4 * (n as u64 + 2) + 16
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub word: String,
    /// Expected acceptance: membership for short words, rejection for long ones.
    pub expected_accept: bool,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionCheck {
    pub holds: bool,
    pub short_words: u64,
    pub long_words: u64,
    pub counterexamples: Vec<Counterexample>,
}

/// Checks that the machine accepts exactly the members of `oracle` of length
/// at most `n` and rejects the probed longer words.
pub fn verify_restriction(
    report: &TrieMachineReport,
    oracle: &LanguageOracle,
) -> Result<RestrictionCheck> {
    let runner = Runner::new(&report.machine, &CostModel::CountAll)?;
    let fuel = verification_fuel(report.n);
    let mut counterexamples = Vec::new();
    let mut check = |word: String, expected_accept: bool| -> Result<()> {
        let verdict = runner.run(&word, fuel)?.verdict;
        if (verdict == Verdict::Accepted) != expected_accept || verdict == Verdict::FuelExhausted {
            counterexamples.push(Counterexample {
                word,
                expected_accept,
                verdict,
            });
        }
        Ok(())
    };

    let mut short_words = 0;
    for w in words_up_to(report.n) {
        let member = oracle.contains(&w);
        check(w, member)?;
        short_words += 1;
    }
    let long = long_word_sample(report.n);
    let long_words = long.len() as u64;
    for w in long {
        check(w, false)?;
    }
    Ok(RestrictionCheck {
        holds: counterexamples.is_empty(),
        short_words,
        long_words,
        counterexamples,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepViolation {
    pub word: String,
    pub expected: u64,
    pub actual: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepCountCheck {
    pub holds: bool,
    pub violations: Vec<StepViolation>,
}

/// Expected step count of a depth-`n` trie machine on a word of length `len`:
/// `len + 1` up to the depth, and `n + 1` (n consumptions plus the capped
/// rejection) beyond it.
pub fn expected_trie_steps(n: usize, len: usize) -> u64 {
    if len <= n {
        len as u64 + 1
    } else {
        n as u64 + 1
    }
}

pub fn verify_step_count(report: &TrieMachineReport) -> Result<StepCountCheck> {
    let runner = Runner::new(&report.machine, &CostModel::CountAll)?;
    let fuel = verification_fuel(report.n);
    let mut violations = Vec::new();
    for word in words_up_to(report.n).chain(long_word_sample(report.n)) {
        let expected = expected_trie_steps(report.n, word.len());
        let actual = runner.run(&word, fuel)?.total_steps;
        if actual != expected {
            violations.push(StepViolation {
                word,
                expected,
                actual,
            });
        }
    }
    Ok(StepCountCheck {
        holds: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceReport {
    pub k: usize,
    /// Least index from which every member of the sequence agrees with the
    /// language on words of length at most `k`.
    pub n_k: Option<usize>,
    /// Words checked at the returned index: `2^(k+1) - 1`.
    pub verified_words: u64,
    /// Sequence indices whose machines were built and checked.
    pub indices_checked: usize,
}

/// True iff the machine's verdict matches membership on every word of length
/// at most `k`.
pub fn agrees_up_to(machine: &Machine, oracle: &LanguageOracle, k: usize, fuel: u64) -> Result<bool> {
    let runner = Runner::new(machine, &CostModel::CountAll)?;
    for w in words_up_to(k) {
        if (runner.run(&w, fuel)?.verdict == Verdict::Accepted) != oracle.contains(&w) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Finds the least `n` such that the trie machines of every depth `m >= n`
/// agree with `oracle` on all words of length at most `k`.
///
/// Depths `m >= k` agree by construction, so stability is checked on the
/// indices up to `k` and the search returns `n_k <= k`.
pub fn find_convergence_index(
    oracle: &LanguageOracle,
    k: usize,
    budget: usize,
) -> Result<ConvergenceReport> {
    if k > MAX_CONVERGENCE_K {
        return Err(Error::Domain(format!("k = {k} exceeds the limit {MAX_CONVERGENCE_K}")));
    }
    if budget < k {
        return Err(Error::Domain(format!("budget {budget} is smaller than k = {k}")));
    }
    let fuel = verification_fuel(budget.max(k));
    let mut agree = Vec::with_capacity(k + 1);
    for m in 0..=k {
        let trie = build_trie_machine(oracle, m)?;
        agree.push(agrees_up_to(&trie.machine, oracle, k, fuel)?);
    }
    let mut indices_checked = agree.len();

    // Least n whose whole tail n..=k agrees.
    let mut n_k = None;
    for n in (0..=k).rev() {
        if !agree[n] {
            break;
        }
        n_k = Some(n);
    }
    if n_k.is_none() {
        for m in k + 1..=budget {
            let trie = build_trie_machine(oracle, m)?;
            indices_checked += 1;
            if agrees_up_to(&trie.machine, oracle, k, fuel)? {
                n_k = Some(m);
                break;
            }
        }
    }
    Ok(ConvergenceReport {
        k,
        n_k,
        verified_words: (1u64 << (k + 1)) - 1,
        indices_checked,
    })
}

/// Parses a finite-language file: one binary word per line, `eps` for the
/// empty word, `#` starts a comment.
pub fn parse_language_file(text: &str) -> Result<LanguageOracle> {
    let mut words = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let word = if line == "eps" { "" } else { line };
        if !is_binary(word) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("{line:?} is not a word over {{0,1}}"),
            });
        }
        words.insert(word.to_string());
    }
    Ok(LanguageOracle::FiniteSet(words))
}
