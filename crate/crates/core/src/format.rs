//! Line-oriented machine text format.
//!
//! ```text
//! states: <id> <id> ...
//! start: <id>
//! accept: <id>
//! reject: <id>
//! input_alphabet: <sym> <sym> ...
//! tape_alphabet: <sym> ... _
//! trans: <state> <sym> -> <state> <sym> <L|R>
//! ```
//!
//! Symbols are single characters and `_` is the blank. `#` starts a comment;
//! the symbol `#` itself is written `\#`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::machine::{Action, Machine, Move, BLANK};

const ESCAPED_HASH: &str = "\\#";

fn symbol_token(c: char) -> String {
    if c == '#' {
        ESCAPED_HASH.to_string()
    } else {
        c.to_string()
    }
}

/// Tape symbols with the blank last.
fn ordered_symbols(alphabet: &BTreeSet<char>) -> impl Iterator<Item = char> + '_ {
    alphabet
        .iter()
        .copied()
        .filter(|&c| c != BLANK)
        .chain(alphabet.contains(&BLANK).then_some(BLANK))
}

pub fn emit_machine(m: &Machine) -> String {
    let mut out = String::new();
    let join = |it: &mut dyn Iterator<Item = char>| it.map(symbol_token).collect::<Vec<_>>().join(" ");
    writeln!(out, "states: {}", m.states.join(" ")).unwrap();
    writeln!(out, "start: {}", m.start_state).unwrap();
    writeln!(out, "accept: {}", m.accept_state).unwrap();
    writeln!(out, "reject: {}", m.reject_state).unwrap();
    writeln!(out, "input_alphabet: {}", join(&mut m.input_alphabet.iter().copied())).unwrap();
    writeln!(out, "tape_alphabet: {}", join(&mut ordered_symbols(&m.tape_alphabet))).unwrap();

    let mut emitted = BTreeSet::new();
    let line = |out: &mut String, (q, c): (&String, char), a: &Action| {
        writeln!(
            out,
            "trans: {q} {} -> {} {} {}",
            symbol_token(c),
            a.target,
            symbol_token(a.write),
            a.movement
        )
        .unwrap();
    };
    for q in &m.states {
        for c in ordered_symbols(&m.tape_alphabet) {
            if let Some(a) = m.action(q, c) {
                line(&mut out, (q, c), a);
                emitted.insert((q.clone(), c));
            }
        }
    }
    // Entries outside the declared states or alphabet, so nothing is lost.
    for ((q, c), a) in &m.transitions {
        if !emitted.contains(&(q.clone(), *c)) {
            line(&mut out, (q, *c), a);
        }
    }
    out
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_symbol(token: &str, line: usize) -> Result<char> {
    if token == ESCAPED_HASH {
        return Ok('#');
    }
    let mut chars = token.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(parse_error(
            line,
            format!("symbol {token:?} is not a single character"),
        )),
    }
}

fn single<'a>(tokens: &[&'a str], key: &str, line: usize) -> Result<&'a str> {
    match tokens {
        [one] => Ok(one),
        _ => Err(parse_error(line, format!("{key}: expected exactly one state"))),
    }
}

struct RawTransition {
    line: usize,
    source: String,
    read: char,
    target: String,
    write: char,
    movement: Move,
}

/// Parses the machine text format. The result always passes
/// [`Machine::validate`]; structural defects are reported as errors.
pub fn parse_machine(text: &str) -> Result<Machine> {
    let mut states: Option<(usize, Vec<String>)> = None;
    let mut start = None;
    let mut accept = None;
    let mut reject = None;
    let mut input: Option<(usize, BTreeSet<char>)> = None;
    let mut tape: Option<(usize, BTreeSet<char>)> = None;
    let mut raw = Vec::new();

    for (i, full) in text.lines().enumerate() {
        let line = i + 1;
        let content = strip_comment(full).trim();
        if content.is_empty() {
            continue;
        }
        let (key, rest) = content
            .split_once(':')
            .ok_or_else(|| parse_error(line, format!("expected `key: value`, got {content:?}")))?;
        let key = key.trim();
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        let duplicate = || parse_error(line, format!("{key} given twice"));
        match key {
            "states" => {
                if states.is_some() {
                    return Err(duplicate());
                }
                if tokens.is_empty() {
                    return Err(parse_error(line, "states: empty list"));
                }
                let mut seen = BTreeSet::new();
                for q in &tokens {
                    if !seen.insert(*q) {
                        return Err(parse_error(line, format!("state {q} declared twice")));
                    }
                }
                states = Some((line, tokens.iter().map(|s| s.to_string()).collect()));
            }
            "start" | "accept" | "reject" => {
                let slot = match key {
                    "start" => &mut start,
                    "accept" => &mut accept,
                    _ => &mut reject,
                };
                if slot.is_some() {
                    return Err(duplicate());
                }
                *slot = Some((line, single(&tokens, key, line)?.to_string()));
            }
            "input_alphabet" | "tape_alphabet" => {
                let slot = if key == "input_alphabet" {
                    &mut input
                } else {
                    &mut tape
                };
                if slot.is_some() {
                    return Err(duplicate());
                }
                let mut symbols = BTreeSet::new();
                for t in &tokens {
                    if !symbols.insert(parse_symbol(t, line)?) {
                        return Err(parse_error(line, format!("symbol {t} listed twice")));
                    }
                }
                if key == "input_alphabet" && symbols.contains(&BLANK) {
                    return Err(parse_error(line, "the blank '_' is reserved and cannot be an input symbol"));
                }
                if key == "tape_alphabet" && !symbols.contains(&BLANK) {
                    return Err(parse_error(line, "tape alphabet is missing the blank '_'"));
                }
                *slot = Some((line, symbols));
            }
            "trans" => {
                let [source, read, arrow, target, write, dir] = tokens[..] else {
                    return Err(parse_error(
                        line,
                        "trans: expected `<state> <sym> -> <state> <sym> <L|R>`",
                    ));
                };
                if arrow != "->" {
                    return Err(parse_error(line, format!("trans: expected `->`, got {arrow:?}")));
                }
                let movement = match dir {
                    "L" => Move::Left,
                    "R" => Move::Right,
                    other => {
                        return Err(parse_error(line, format!("trans: direction {other:?} is not L or R")))
                    }
                };
                raw.push(RawTransition {
                    line,
                    source: source.to_string(),
                    read: parse_symbol(read, line)?,
                    target: target.to_string(),
                    write: parse_symbol(write, line)?,
                    movement,
                });
            }
            other => return Err(parse_error(line, format!("unknown key {other:?}"))),
        }
    }

    let (_, states) = states.ok_or(Error::MissingField("states"))?;
    let (_, input_alphabet) = input.ok_or(Error::MissingField("input_alphabet"))?;
    let (tape_line, tape_alphabet) = tape.ok_or(Error::MissingField("tape_alphabet"))?;
    let mut designated = Vec::new();
    for (slot, name) in [(start, "start"), (accept, "accept"), (reject, "reject")] {
        let (line, q) = slot.ok_or(Error::MissingField(name))?;
        if !states.contains(&q) {
            return Err(parse_error(line, format!("{name} state {q} is not declared")));
        }
        designated.push(q);
    }
    if let Some(c) = input_alphabet.iter().find(|c| !tape_alphabet.contains(c)) {
        return Err(parse_error(
            tape_line,
            format!("tape alphabet is missing input symbol {c:?}"),
        ));
    }

    let known: BTreeSet<&str> = states.iter().map(String::as_str).collect();
    let mut transitions = BTreeMap::new();
    for t in raw {
        for q in [&t.source, &t.target] {
            if !known.contains(q.as_str()) {
                return Err(parse_error(t.line, format!("unknown state {q}")));
            }
        }
        for c in [t.read, t.write] {
            if !tape_alphabet.contains(&c) {
                return Err(parse_error(
                    t.line,
                    format!("symbol {c:?} is not in the tape alphabet"),
                ));
            }
        }
        let key = (t.source, t.read);
        if transitions.contains_key(&key) {
            return Err(parse_error(
                t.line,
                format!("duplicate transition for ({}, {})", key.0, key.1),
            ));
        }
        transitions.insert(key, Action::new(t.target, t.write, t.movement));
    }

    let [start_state, accept_state, reject_state]: [String; 3] =
        designated.try_into().expect("three designated states");
    let machine = Machine {
        input_alphabet,
        tape_alphabet,
        states,
        start_state,
        accept_state,
        reject_state,
        transitions,
    };
    let defects = machine.validate();
    if defects.is_empty() {
        Ok(machine)
    } else {
        Err(Error::InvalidMachine(defects))
    }
}

/// Drops everything from the first unescaped `#`.
fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'#' && (i == 0 || bytes[i - 1] != b'\\') {
            return &line[..i];
        }
    }
    line
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convergence::{build_trie_machine, Builtin, LanguageOracle};
    use crate::nondet::build_demo_machines;

    const SCANNER: &str = "\
# contains-a-1 scanner
states: q_start q_scan q_accept q_reject
start: q_start
accept: q_accept
reject: q_reject
input_alphabet: 0 1
tape_alphabet: 0 1 _   # must include '_'
trans: q_start 0 -> q_scan 0 R
trans: q_start 1 -> q_accept 1 R
trans: q_start _ -> q_reject _ R
trans: q_scan 0 -> q_scan 0 R
trans: q_scan 1 -> q_accept 1 R
trans: q_scan _ -> q_reject _ R
";

    #[test]
    fn demo_scanner_file() {
        let demo = build_demo_machines();
        let parsed = parse_machine(SCANNER).unwrap();
        assert_eq!(parsed, demo.scanner);
        let emitted = emit_machine(&demo.scanner);
        assert_eq!(parse_machine(&emitted).unwrap(), demo.scanner);
        assert_eq!(emit_machine(&parse_machine(&emitted).unwrap()), emitted);
    }

    #[test]
    fn trie_round_trip() {
        let t = build_trie_machine(&LanguageOracle::Builtin(Builtin::Div3), 3).unwrap();
        let text = emit_machine(&t.machine);
        assert_eq!(parse_machine(&text).unwrap(), t.machine);
        assert!(text.contains("trans: q_ _ -> q_accept _ R"));
    }

    #[test]
    fn separator_symbol_is_escaped() {
        let mut m = build_demo_machines().scanner;
        m.tape_alphabet.insert('#');
        for q in ["q_start", "q_scan"] {
            m.transitions
                .insert((q.into(), '#'), Action::new("q_reject", '#', Move::Left));
        }
        let text = emit_machine(&m);
        assert!(text.contains("tape_alphabet: \\# 0 1 _"));
        assert_eq!(parse_machine(&text).unwrap(), m);
    }

    fn error_line(text: &str) -> (usize, String) {
        match parse_machine(text).unwrap_err() {
            Error::Parse { line, message } => (line, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_transition() {
        let text = format!("{SCANNER}trans: q_scan 0 -> q_reject 0 R\n");
        let (line, message) = error_line(&text);
        assert_eq!(line, 14);
        assert!(message.contains("duplicate transition"));
    }

    #[test]
    fn missing_reject() {
        let text = SCANNER.replace("reject: q_reject\n", "");
        assert_eq!(parse_machine(&text).unwrap_err(), Error::MissingField("reject"));
        assert_eq!(Error::MissingField("reject").to_string(), "missing reject");
    }

    #[test]
    fn distinct_diagnostics() {
        let (line, msg) = error_line(&SCANNER.replace("q_scan _ -> q_reject", "q_scan _ -> q_gone"));
        assert_eq!(line, 13);
        assert!(msg.contains("unknown state q_gone"));

        let (line, msg) = error_line(&SCANNER.replace("tape_alphabet: 0 1 _", "tape_alphabet: 0 1"));
        assert_eq!(line, 7);
        assert!(msg.contains("missing the blank"));

        let (line, msg) = error_line(&SCANNER.replace("input_alphabet: 0 1", "input_alphabet: 0 10"));
        assert_eq!(line, 6);
        assert!(msg.contains("not a single character"));

        let (_, msg) = error_line(&SCANNER.replace("q_scan 1 -> q_accept 1 R", "q_scan 1 -> q_accept 1 S"));
        assert!(msg.contains("direction"));

        let (_, msg) = error_line(&format!("{SCANNER}bogus: 1\n"));
        assert!(msg.contains("unknown key"));
    }

    #[test]
    fn incomplete_table_is_invalid() {
        let text = SCANNER.replace("trans: q_scan _ -> q_reject _ R\n", "");
        assert!(matches!(parse_machine(&text), Err(Error::InvalidMachine(_))));
    }
}
