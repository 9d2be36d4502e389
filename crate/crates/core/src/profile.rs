//! Worst-case step profiles and the contains-a-1 demonstration.

use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::machine::{Machine, Runner, Verdict};
use crate::measures::{display_word, MeasureFunction};
use crate::nondet::{build_demo_machines, decide_nc, words_of_length, SearchLimits};

/// Cap on runs per length for the exhaustive family.
pub const MAX_EXHAUSTIVE_RUNS: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputFamily {
    /// Every word of the length.
    All,
    /// `0^len`, the worst case of the contains-a-1 scanner.
    #[default]
    Zeros,
    Ones,
    Random { count: usize, seed: u64 },
}

impl fmt::Display for InputFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputFamily::All => f.write_str("all"),
            InputFamily::Zeros => f.write_str("zeros"),
            InputFamily::Ones => f.write_str("ones"),
            InputFamily::Random { count, seed } => write!(f, "random:count={count},seed={seed}"),
        }
    }
}

/// Parses `all`, `zeros`, `ones` or `random:count=<n>,seed=<s>`.
impl FromStr for InputFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => return Ok(InputFamily::All),
            "zeros" => return Ok(InputFamily::Zeros),
            "ones" => return Ok(InputFamily::Ones),
            _ => {}
        }
        let params = s
            .trim()
            .strip_prefix("random:")
            .ok_or_else(|| Error::Syntax(format!("unknown input family {s:?}")))?;
        let (mut count, mut seed) = (None, None);
        for pair in params.split(',') {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::Syntax(format!("expected key=value, got {pair:?}")))?;
            let bad = || Error::Syntax(format!("{key}: not a non-negative integer: {value:?}"));
            match key.trim() {
                "count" => count = Some(value.trim().parse().map_err(|_| bad())?),
                "seed" => seed = Some(value.trim().parse().map_err(|_| bad())?),
                other => return Err(Error::Syntax(format!("random has no parameter {other:?}"))),
            }
        }
        let count = count.ok_or_else(|| Error::Syntax("random is missing count".into()))?;
        let seed = seed.ok_or_else(|| Error::Syntax("random is missing seed".into()))?;
        if count == 0 {
            return Err(Error::Syntax("random needs count >= 1".into()));
        }
        Ok(InputFamily::Random { count, seed })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileRow {
    pub length: usize,
    pub max_counted_steps: u64,
    /// First input in family order reaching the maximum.
    pub argmax_input: String,
    pub runs: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub family: InputFamily,
    pub rows: Vec<ProfileRow>,
}

impl Profile {
    /// CSV `length,max_counted_steps,argmax_input`, preceded by a `# seed=`
    /// line for the random family.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let InputFamily::Random { count, seed } = self.family {
            out.push_str(&format!("# family=random count={count} seed={seed}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["length", "max_counted_steps", "argmax_input"])
            .expect("in-memory write");
        for row in &self.rows {
            w.write_record([
                row.length.to_string(),
                row.max_counted_steps.to_string(),
                display_word(&row.argmax_input),
            ])
            .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv"));
        out
    }
}

fn repeated(machine: &Machine, symbol: char, len: usize) -> Result<Vec<String>> {
    if !machine.input_alphabet.contains(&symbol) {
        return Err(Error::Domain(format!("input alphabet has no {symbol:?}")));
    }
    Ok(vec![symbol.to_string().repeat(len)])
}

/// Maximum counted steps per input length over an input family.
pub fn profile(
    machine: &Machine,
    cost: &CostModel,
    lengths: RangeInclusive<usize>,
    family: InputFamily,
    fuel: u64,
) -> Result<Profile> {
    let runner = Runner::new(machine, cost)?;
    let symbols: Vec<char> = machine.input_alphabet.iter().copied().collect();
    let mut rng = match family {
        InputFamily::Random { seed, .. } => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let mut rows = Vec::new();
    for length in lengths {
        let inputs: Vec<String> = match family {
            InputFamily::All => {
                let runs = (symbols.len() as u64).checked_pow(length as u32);
                if runs.map_or(true, |r| r > MAX_EXHAUSTIVE_RUNS) {
                    return Err(Error::Domain(format!(
                        "exhaustive profile at length {length} exceeds {MAX_EXHAUSTIVE_RUNS} runs"
                    )));
                }
                words_of_length(&symbols, length).collect()
            }
            InputFamily::Zeros => repeated(machine, '0', length)?,
            InputFamily::Ones => repeated(machine, '1', length)?,
            InputFamily::Random { count, .. } => {
                if symbols.is_empty() && length > 0 {
                    return Err(Error::Domain("empty input alphabet".into()));
                }
                let rng = rng.as_mut().expect("seeded for the random family");
                (0..count)
                    .map(|_| (0..length).map(|_| symbols[rng.gen_range(0..symbols.len())]).collect())
                    .collect()
            }
        };
        let mut best: Option<(u64, String)> = None;
        for input in &inputs {
            let r = runner.run(input, fuel)?;
            if r.verdict == Verdict::FuelExhausted {
                return Err(Error::FuelExhausted {
                    input: input.clone(),
                    fuel,
                });
            }
            if best.as_ref().map_or(true, |(m, _)| r.counted_steps > *m) {
                best = Some((r.counted_steps, input.clone()));
            }
        }
        let (max_counted_steps, argmax_input) = best.expect("every family yields at least one input");
        rows.push(ProfileRow {
            length,
            max_counted_steps,
            argmax_input,
            runs: inputs.len() as u64,
        });
    }
    Ok(Profile { family, rows })
}

/// Certificate bound used by the demonstration: `log2(n + 1) + 1`.
pub fn demo_certificate_bound() -> MeasureFunction {
    MeasureFunction::LogShift { a: 1.0, b: 1.0 }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemoRow {
    pub n: usize,
    /// Scanner steps on `0^n`.
    pub scanner_counted: u64,
    /// Largest checker step count seen while searching `0^n` and `0^(n-1)1`.
    pub checker_max_counted: u64,
    /// Length of the first accepting certificate for `0^(n-1)1`.
    pub witness_len: usize,
}

/// Scanner against positioned checker on the contains-a-1 language, for
/// `n = 1..=max_n`, counting every transition.
pub fn demo_nlogtime(max_n: usize) -> Result<Vec<DemoRow>> {
    let demo = build_demo_machines();
    let cost = CostModel::CountAll;
    let g = demo_certificate_bound();
    let limits = SearchLimits::default();
    let scanner = profile(&demo.scanner, &cost, 1..=max_n, InputFamily::Zeros, max_n as u64 + 2)?;

    scanner
        .rows
        .iter()
        .map(|row| {
            let n = row.length;
            let zeros = "0".repeat(n);
            let last_one = format!("{}1", "0".repeat(n - 1));
            let miss = decide_nc(&demo.checker, &g, &zeros, &cost, limits)?;
            let hit = decide_nc(&demo.checker, &g, &last_one, &cost, limits)?;
            let witness = hit.witness.ok_or_else(|| {
                Error::Domain(format!("no certificate accepted {last_one:?}"))
            })?;
            Ok(DemoRow {
                n,
                scanner_counted: row.max_counted_steps,
                checker_max_counted: miss.max_checker_counted_steps.max(hit.max_checker_counted_steps),
                witness_len: witness.len(),
            })
        })
        .collect()
}

pub fn demo_csv(rows: &[DemoRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "scanner_counted", "checker_max_counted", "witness_len"])
        .expect("in-memory write");
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.scanner_counted.to_string(),
            r.checker_max_counted.to_string(),
            r.witness_len.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}
