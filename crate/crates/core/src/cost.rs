//! Selection functions: which transition-table entries count toward the
//! length of a computation.
//!
//! A cost model is a property of the transition table. The counted set is
//! fixed per `(machine, cost)` pair and never consults the tape, the head
//! position or the step index.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::machine::{Machine, Move, RunResult, TransitionKey};

/// A transition-table entry as seen by a custom predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransitionView<'a> {
    pub source: &'a str,
    pub read: char,
    pub write: char,
    pub movement: Move,
    pub target: &'a str,
}

pub type TransitionPredicate = Arc<dyn Fn(&TransitionView<'_>) -> bool + Send + Sync>;

#[derive(Clone)]
pub enum CostModel {
    /// Every applied transition counts.
    CountAll,
    /// Transitions leaving blind states are free.
    FreeBlindMoves,
    /// Transitions leaving any of these states are free.
    FreeStates(BTreeSet<String>),
    /// Library-only: counted iff the predicate returns true.
    Custom(TransitionPredicate),
}

impl CostModel {
    pub fn free_states<I, S>(states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        CostModel::FreeStates(states.into_iter().map(Into::into).collect())
    }

    pub fn custom(predicate: impl Fn(&TransitionView<'_>) -> bool + Send + Sync + 'static) -> Self {
        CostModel::Custom(Arc::new(predicate))
    }
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::CountAll
    }
}

impl fmt::Debug for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostModel::CountAll => f.write_str("CountAll"),
            CostModel::FreeBlindMoves => f.write_str("FreeBlindMoves"),
            CostModel::FreeStates(s) => f.debug_tuple("FreeStates").field(s).finish(),
            CostModel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostModel::CountAll => f.write_str("count-all"),
            CostModel::FreeBlindMoves => f.write_str("free-blind"),
            CostModel::FreeStates(s) => {
                let names: Vec<&str> = s.iter().map(String::as_str).collect();
                write!(f, "free-states:{}", names.join(","))
            }
            CostModel::Custom(_) => f.write_str("custom"),
        }
    }
}

/// Parses `count-all`, `free-blind` or `free-states:q1,q2,...`.
impl FromStr for CostModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "count-all" => Ok(CostModel::CountAll),
            "free-blind" => Ok(CostModel::FreeBlindMoves),
            other => {
                let list = other.strip_prefix("free-states:").ok_or_else(|| {
                    Error::Syntax(format!(
                        "unknown cost model {other:?}; expected count-all, free-blind or free-states:q1,q2,..."
                    ))
                })?;
                let states: BTreeSet<String> = list
                    .split(',')
                    .map(str::trim)
                    .filter(|q| !q.is_empty())
                    .map(String::from)
                    .collect();
                if states.is_empty() {
                    return Err(Error::Syntax("free-states needs at least one state".into()));
                }
                Ok(CostModel::FreeStates(states))
            }
        }
    }
}

/// A state is blind when every scanned symbol is written back unchanged and
/// the target state and direction do not depend on it: pure head movement.
pub fn is_blind_state(machine: &Machine, state: &str) -> Result<bool> {
    if !machine.has_state(state) {
        return Err(Error::Domain(format!("unknown state {state}")));
    }
    if machine.is_halting(state) {
        return Err(Error::Domain(format!("{state} is a halting state")));
    }
    let mut shared: Option<(&str, Move)> = None;
    for &symbol in &machine.tape_alphabet {
        let Some(action) = machine.action(state, symbol) else {
            return Ok(false);
        };
        if action.write != symbol {
            return Ok(false);
        }
        let here = (action.target.as_str(), action.movement);
        match shared {
            None => shared = Some(here),
            Some(prev) if prev != here => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}

/// The transition-table entries that `cost` counts on `machine`.
pub fn counted_set(machine: &Machine, cost: &CostModel) -> Result<BTreeSet<TransitionKey>> {
    let keys = machine.transitions.keys();
    let set = match cost {
        CostModel::CountAll => keys.cloned().collect(),
        CostModel::FreeBlindMoves => {
            let mut blind = BTreeSet::new();
            for q in &machine.states {
                if !machine.is_halting(q) && is_blind_state(machine, q)? {
                    blind.insert(q.as_str());
                }
            }
            keys.filter(|(q, _)| !blind.contains(q.as_str()))
                .cloned()
                .collect()
        }
        CostModel::FreeStates(free) => {
            if let Some(unknown) = free.iter().find(|q| !machine.has_state(q)) {
                return Err(Error::Domain(format!(
                    "free-states names unknown state {unknown}"
                )));
            }
            keys.filter(|(q, _)| !free.contains(q)).cloned().collect()
        }
        CostModel::Custom(predicate) => machine
            .transitions
            .iter()
            .filter(|((source, read), action)| {
                predicate(&TransitionView {
                    source,
                    read: *read,
                    write: action.write,
                    movement: action.movement,
                    target: &action.target,
                })
            })
            .map(|(key, _)| key.clone())
            .collect(),
    };
    Ok(set)
}

/// The redefined computation length: applied transitions in the counted set.
pub fn counted_length(result: &RunResult) -> u64 {
    result.counted_steps
}
