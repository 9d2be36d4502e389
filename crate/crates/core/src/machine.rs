//! Deterministic single-tape Turing machines.
//!
//! A [`Machine`] is plain data and may be malformed; [`Machine::validate`]
//! lists every defect. Execution goes through a [`Runner`], which checks the
//! machine once, indexes its transition table and fixes the counted set of
//! the chosen [`CostModel`] before any input is run.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::cost::{counted_set, CostModel};
use crate::error::{Error, Result};

/// The blank tape symbol.
pub const BLANK: char = '_';

/// Head movement of a transition. `Left` is -1, `Right` is +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Move {
    Left,
    Right,
}

impl Move {
    pub fn offset(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Right => 1,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Move::Left => 'L',
            Move::Right => 'R',
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Right-hand side of a transition: `(target, write, move)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Action {
    pub target: String,
    pub write: char,
    pub movement: Move,
}

impl Action {
    pub fn new(target: impl Into<String>, write: char, movement: Move) -> Self {
        Action {
            target: target.into(),
            write,
            movement,
        }
    }
}

/// Key of a transition-table entry: `(source state, read symbol)`.
pub type TransitionKey = (String, char);

/// A deterministic Turing machine with distinct accept and reject states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Machine {
    pub input_alphabet: BTreeSet<char>,
    pub tape_alphabet: BTreeSet<char>,
    /// State identifiers in declaration order.
    pub states: Vec<String>,
    pub start_state: String,
    pub accept_state: String,
    pub reject_state: String,
    pub transitions: BTreeMap<TransitionKey, Action>,
}

/// A violated machine invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Defect {
    DuplicateState(String),
    UnknownDesignatedState { role: &'static str, state: String },
    HaltingStatesNotDistinct { first: &'static str, second: &'static str },
    BlankInInputAlphabet,
    BlankMissingFromTapeAlphabet,
    InputSymbolNotInTape(char),
    NotTotal { state: String, symbol: char },
    TransitionFromHalting { state: String, symbol: char },
    UnknownSourceState { state: String, symbol: char },
    UnknownReadSymbol { state: String, symbol: char },
    UnknownTargetState { state: String, symbol: char, target: String },
    UnknownWriteSymbol { state: String, symbol: char, write: char },
}

impl fmt::Display for Defect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Defect::DuplicateState(q) => write!(f, "state {q} declared twice"),
            Defect::UnknownDesignatedState { role, state } => {
                write!(f, "{role} state {state} is not a declared state")
            }
            Defect::HaltingStatesNotDistinct { first, second } => {
                write!(f, "halting states not distinct: {first} and {second} coincide")
            }
            Defect::BlankInInputAlphabet => {
                write!(f, "input alphabet contains the blank {BLANK:?}")
            }
            Defect::BlankMissingFromTapeAlphabet => {
                write!(f, "tape alphabet is missing the blank {BLANK:?}")
            }
            Defect::InputSymbolNotInTape(c) => {
                write!(f, "input symbol {c:?} is not in the tape alphabet")
            }
            Defect::NotTotal { state, symbol } => {
                write!(f, "transition table not total: no entry for ({state}, {symbol})")
            }
            Defect::TransitionFromHalting { state, symbol } => {
                write!(f, "halting state has a transition: ({state}, {symbol})")
            }
            Defect::UnknownSourceState { state, symbol } => {
                write!(f, "transition ({state}, {symbol}) leaves an unknown state")
            }
            Defect::UnknownReadSymbol { state, symbol } => {
                write!(f, "transition ({state}, {symbol}) reads a symbol outside the tape alphabet")
            }
            Defect::UnknownTargetState {
                state,
                symbol,
                target,
            } => write!(f, "transition ({state}, {symbol}) targets unknown state {target}"),
            Defect::UnknownWriteSymbol {
                state,
                symbol,
                write,
            } => write!(
                f,
                "transition ({state}, {symbol}) writes {write:?}, which is not in the tape alphabet"
            ),
        }
    }
}

impl Machine {
    pub fn is_halting(&self, state: &str) -> bool {
        state == self.accept_state || state == self.reject_state
    }

    pub fn has_state(&self, state: &str) -> bool {
        self.states.iter().any(|q| q == state)
    }

    pub fn action(&self, state: &str, symbol: char) -> Option<&Action> {
        self.transitions.get(&(state.to_owned(), symbol))
    }

    /// Returns every violated invariant; an empty list means the machine is valid.
    pub fn validate(&self) -> Vec<Defect> {
        let mut defects = Vec::new();

        let mut seen = BTreeSet::new();
        for q in &self.states {
            if !seen.insert(q.as_str()) {
                defects.push(Defect::DuplicateState(q.clone()));
            }
        }

        let designated = [
            ("start", &self.start_state),
            ("accept", &self.accept_state),
            ("reject", &self.reject_state),
        ];
        for (role, state) in designated {
            if !seen.contains(state.as_str()) {
                defects.push(Defect::UnknownDesignatedState {
                    role,
                    state: state.clone(),
                });
            }
        }
        for i in 0..designated.len() {
            for j in i + 1..designated.len() {
                if designated[i].1 == designated[j].1 {
                    defects.push(Defect::HaltingStatesNotDistinct {
                        first: designated[i].0,
                        second: designated[j].0,
                    });
                }
            }
        }

        if self.input_alphabet.contains(&BLANK) {
            defects.push(Defect::BlankInInputAlphabet);
        }
        if !self.tape_alphabet.contains(&BLANK) {
            defects.push(Defect::BlankMissingFromTapeAlphabet);
        }
        for &c in &self.input_alphabet {
            if !self.tape_alphabet.contains(&c) {
                defects.push(Defect::InputSymbolNotInTape(c));
            }
        }

        for ((state, symbol), action) in &self.transitions {
            let (state, symbol) = (state.clone(), *symbol);
            if !seen.contains(state.as_str()) {
                defects.push(Defect::UnknownSourceState {
                    state: state.clone(),
                    symbol,
                });
            } else if self.is_halting(&state) {
                defects.push(Defect::TransitionFromHalting {
                    state: state.clone(),
                    symbol,
                });
            }
            if !self.tape_alphabet.contains(&symbol) {
                defects.push(Defect::UnknownReadSymbol {
                    state: state.clone(),
                    symbol,
                });
            }
            if !seen.contains(action.target.as_str()) {
                defects.push(Defect::UnknownTargetState {
                    state: state.clone(),
                    symbol,
                    target: action.target.clone(),
                });
            }
            if !self.tape_alphabet.contains(&action.write) {
                defects.push(Defect::UnknownWriteSymbol {
                    state,
                    symbol,
                    write: action.write,
                });
            }
        }

        for q in &self.states {
            if self.is_halting(q) {
                continue;
            }
            for &c in &self.tape_alphabet {
                if self.action(q, c).is_none() {
                    defects.push(Defect::NotTotal {
                        state: q.clone(),
                        symbol: c,
                    });
                }
            }
        }

        defects
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    fn ensure_valid(&self) -> Result<()> {
        let defects = self.validate();
        if defects.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidMachine(defects))
        }
    }

    pub fn check_input(&self, input: &str) -> Result<()> {
        check_word(input, &self.input_alphabet)
    }

    /// Input written on cells `0..|x|`, head on cell 0, start state.
    pub fn initial_configuration(&self, input: &str) -> Result<Configuration> {
        self.check_input(input)?;
        Ok(Configuration {
            state: self.start_state.clone(),
            tape: Tape::from_word(input),
            head: 0,
        })
    }

    /// Applies the single transition enabled in `config`.
    pub fn step(&self, config: &Configuration) -> Result<Step> {
        if self.is_halting(&config.state) {
            return Ok(Step::Halted);
        }
        let read = config.tape.get(config.head);
        let action = self.action(&config.state, read).ok_or_else(|| {
            Error::InvalidMachine(vec![Defect::NotTotal {
                state: config.state.clone(),
                symbol: read,
            }])
        })?;
        let mut tape = config.tape.clone();
        tape.set(config.head, action.write);
        let record = AppliedTransition {
            source: config.state.clone(),
            head: config.head,
            read,
            write: action.write,
            movement: action.movement,
            target: action.target.clone(),
        };
        let next = Configuration {
            state: action.target.clone(),
            tape,
            head: config.head + action.movement.offset(),
        };
        Ok(Step::Applied { next, record })
    }
}

pub(crate) fn check_word(word: &str, alphabet: &BTreeSet<char>) -> Result<()> {
    match word.chars().enumerate().find(|(_, c)| !alphabet.contains(c)) {
        Some((position, symbol)) => Err(Error::InvalidInput { symbol, position }),
        None => Ok(()),
    }
}

/// Two-way infinite tape. Only non-blank cells are stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tape {
    cells: BTreeMap<i64, char>,
}

impl Tape {
    pub fn from_word(word: &str) -> Self {
        let mut tape = Tape::default();
        for (i, c) in word.chars().enumerate() {
            tape.set(i as i64, c);
        }
        tape
    }

    pub fn get(&self, index: i64) -> char {
        self.cells.get(&index).copied().unwrap_or(BLANK)
    }

    pub fn set(&mut self, index: i64, symbol: char) {
        if symbol == BLANK {
            self.cells.remove(&index);
        } else {
            self.cells.insert(index, symbol);
        }
    }

    /// Non-blank cells in index order.
    pub fn non_blank(&self) -> impl Iterator<Item = (i64, char)> + '_ {
        self.cells.iter().map(|(&i, &c)| (i, c))
    }

    pub fn is_blank(&self) -> bool {
        self.cells.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub state: String,
    pub tape: Tape,
    pub head: i64,
}

/// The transition applied by one [`Machine::step`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppliedTransition {
    pub source: String,
    pub head: i64,
    pub read: char,
    pub write: char,
    pub movement: Move,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Applied {
        next: Configuration,
        record: AppliedTransition,
    },
    Halted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accepted,
    Rejected,
    FuelExhausted,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accepted => "accepted",
            Verdict::Rejected => "rejected",
            Verdict::FuelExhausted => "fuel-exhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub state: String,
    pub head: i64,
    pub read: char,
    pub write: char,
    pub movement: Move,
    pub counted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub verdict: Verdict,
    /// Every applied transition.
    pub total_steps: u64,
    /// Applied transitions that the cost model counts.
    pub counted_steps: u64,
    pub trace: Option<Vec<TraceEntry>>,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    target: u32,
    write: u8,
    movement: Move,
    counted: bool,
}

/// A validated machine bound to a cost model, ready to run inputs.
#[derive(Debug, Clone)]
pub struct Runner {
    states: Vec<String>,
    symbols: Vec<char>,
    symbol_index: HashMap<char, u8>,
    state_index: HashMap<String, u32>,
    input_alphabet: BTreeSet<char>,
    tape_alphabet: BTreeSet<char>,
    /// Indexed by `state * symbols.len() + symbol`; `None` for halting states.
    table: Vec<Option<Entry>>,
    start: u32,
    accept: u32,
    reject: u32,
    blank: u8,
}

impl Runner {
    pub fn new(machine: &Machine, cost: &CostModel) -> Result<Self> {
        machine.ensure_valid()?;
        let counted = counted_set(machine, cost)?;

        let states = machine.states.clone();
        let symbols: Vec<char> = machine.tape_alphabet.iter().copied().collect();
        let symbol_index: HashMap<char, u8> = symbols
            .iter()
            .enumerate()
            .map(|(i, &c)| (c, i as u8))
            .collect();
        let state_index: HashMap<String, u32> = states
            .iter()
            .enumerate()
            .map(|(i, q)| (q.clone(), i as u32))
            .collect();

        let mut table = vec![None; states.len() * symbols.len()];
        for (key, action) in &machine.transitions {
            let (source, read) = key;
            let slot = state_index[source] as usize * symbols.len() + symbol_index[read] as usize;
            table[slot] = Some(Entry {
                target: state_index[&action.target],
                write: symbol_index[&action.write],
                movement: action.movement,
                counted: counted.contains(key),
            });
        }

        Ok(Runner {
            start: state_index[&machine.start_state],
            accept: state_index[&machine.accept_state],
            reject: state_index[&machine.reject_state],
            blank: symbol_index[&BLANK],
            states,
            symbols,
            symbol_index,
            state_index,
            input_alphabet: machine.input_alphabet.clone(),
            tape_alphabet: machine.tape_alphabet.clone(),
            table,
        })
    }

    pub fn run(&self, input: &str, fuel: u64) -> Result<RunResult> {
        check_word(input, &self.input_alphabet)?;
        self.execute(self.start, tape_cells(input, 0, &self.symbol_index), 0, fuel, false)
    }

    pub fn run_traced(&self, input: &str, fuel: u64) -> Result<RunResult> {
        check_word(input, &self.input_alphabet)?;
        self.execute(self.start, tape_cells(input, 0, &self.symbol_index), 0, fuel, true)
    }

    /// Runs from an arbitrary configuration. Tape symbols are checked against
    /// the tape alphabet rather than the input alphabet.
    pub fn run_configuration(
        &self,
        config: &Configuration,
        fuel: u64,
        trace: bool,
    ) -> Result<RunResult> {
        let state = *self.state_index.get(&config.state).ok_or_else(|| {
            Error::Domain(format!("unknown state {} in configuration", config.state))
        })?;
        let mut cells = BTreeMap::new();
        for (i, c) in config.tape.non_blank() {
            let symbol = *self.symbol_index.get(&c).ok_or(Error::InvalidInput {
                symbol: c,
                position: i.max(0) as usize,
            })?;
            cells.insert(i, symbol);
        }
        self.execute(state, cells, config.head, fuel, trace)
    }

    pub fn tape_alphabet(&self) -> &BTreeSet<char> {
        &self.tape_alphabet
    }

    fn execute(
        &self,
        mut state: u32,
        mut cells: BTreeMap<i64, u8>,
        mut head: i64,
        fuel: u64,
        trace: bool,
    ) -> Result<RunResult> {
        if fuel == 0 {
            return Err(Error::ZeroFuel);
        }
        let width = self.symbols.len();
        let mut entries = trace.then(Vec::new);
        let mut total = 0u64;
        let mut counted = 0u64;

        let verdict = loop {
            if state == self.accept {
                break Verdict::Accepted;
            }
            if state == self.reject {
                break Verdict::Rejected;
            }
            if total == fuel {
                break Verdict::FuelExhausted;
            }
            let read = cells.get(&head).copied().unwrap_or(self.blank);
            let entry = self.table[state as usize * width + read as usize]
                .expect("validated machine has a total transition table");
            if entry.write == self.blank {
                cells.remove(&head);
            } else {
                cells.insert(head, entry.write);
            }
            if let Some(entries) = entries.as_mut() {
                entries.push(TraceEntry {
                    state: self.states[state as usize].clone(),
                    head,
                    read: self.symbols[read as usize],
                    write: self.symbols[entry.write as usize],
                    movement: entry.movement,
                    counted: entry.counted,
                });
            }
            total += 1;
            if entry.counted {
                counted += 1;
            }
            head += entry.movement.offset();
            state = entry.target;
        };

        Ok(RunResult {
            verdict,
            total_steps: total,
            counted_steps: counted,
            trace: entries,
        })
    }
}

fn tape_cells(word: &str, origin: i64, index: &HashMap<char, u8>) -> BTreeMap<i64, u8> {
    let blank = index[&BLANK];
    word.chars()
        .enumerate()
        .map(|(i, c)| (origin + i as i64, index[&c]))
        .filter(|&(_, s)| s != blank)
        .collect()
}

/// Runs `machine` on `input` under `cost`, stopping after `fuel` applied transitions.
pub fn run(machine: &Machine, input: &str, cost: &CostModel, fuel: u64) -> Result<RunResult> {
    Runner::new(machine, cost)?.run(input, fuel)
}

/// Like [`run`], recording a trace entry per applied transition.
pub fn run_traced(
    machine: &Machine,
    input: &str,
    cost: &CostModel,
    fuel: u64,
) -> Result<RunResult> {
    Runner::new(machine, cost)?.run_traced(input, fuel)
}
