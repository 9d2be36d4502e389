//! Nondeterministic acceptance through checking relations.
//!
//! A language is accepted nondeterministically when some certificate `y`,
//! short enough relative to the input `x`, makes a deterministic checker
//! accept the pair. Certificates reach the checker in one of two ways:
//!
//! * [`Delivery::Inline`]: the tape holds `x # y` and the head starts on cell 0.
//! * [`Delivery::Positioned`]: the tape holds `x` alone and the head starts on
//!   the cell whose index is `y` read as a binary numeral. This is how a
//!   constant-time indexed access is expressed on a sequential tape.

use std::collections::{BTreeMap, BTreeSet};

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::machine::{check_word, Action, Configuration, Machine, Move, Runner, Tape, Verdict, BLANK};
use crate::measures::{measure_point, MeasureFunction, BOUND_SLACK};

/// Separator between input and certificate under inline delivery.
pub const SEPARATOR: char = '#';

pub const DEFAULT_CERTIFICATE_BUDGET: u64 = 1 << 20;
pub const DEFAULT_CHECKER_FUEL: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delivery {
    Inline,
    Positioned,
}

impl std::str::FromStr for Delivery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inline" => Ok(Delivery::Inline),
            "positioned" => Ok(Delivery::Positioned),
            other => Err(Error::Syntax(format!(
                "unknown delivery {other:?}; expected inline or positioned"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckingRelation {
    checker: Machine,
    delivery: Delivery,
    certificate_alphabet: BTreeSet<char>,
}

impl CheckingRelation {
    /// A relation whose certificates are binary words.
    pub fn new(checker: Machine, delivery: Delivery) -> Result<Self> {
        Self::with_certificate_alphabet(checker, delivery, ['0', '1'].into())
    }

    pub fn with_certificate_alphabet(
        checker: Machine,
        delivery: Delivery,
        certificate_alphabet: BTreeSet<char>,
    ) -> Result<Self> {
        let defects = checker.validate();
        if !defects.is_empty() {
            return Err(Error::InvalidMachine(defects));
        }
        if certificate_alphabet.is_empty() {
            return Err(Error::Domain("certificate alphabet is empty".into()));
        }
        match delivery {
            Delivery::Inline => {
                if !checker.tape_alphabet.contains(&SEPARATOR) {
                    return Err(Error::Domain(format!(
                        "inline delivery needs {SEPARATOR:?} in the checker's tape alphabet"
                    )));
                }
                if checker.input_alphabet.contains(&SEPARATOR) {
                    return Err(Error::Domain(format!(
                        "inline delivery needs {SEPARATOR:?} outside the input alphabet"
                    )));
                }
                if let Some(c) = certificate_alphabet
                    .iter()
                    .find(|c| !checker.tape_alphabet.contains(c) || **c == BLANK || **c == SEPARATOR)
                {
                    return Err(Error::Domain(format!(
                        "certificate symbol {c:?} cannot be written after the separator"
                    )));
                }
            }
            Delivery::Positioned => {
                if certificate_alphabet != BTreeSet::from(['0', '1']) {
                    return Err(Error::Domain(
                        "positioned delivery reads certificates as binary numerals over {0,1}".into(),
                    ));
                }
            }
        }
        Ok(CheckingRelation {
            checker,
            delivery,
            certificate_alphabet,
        })
    }

    pub fn checker(&self) -> &Machine {
        &self.checker
    }

    pub fn delivery(&self) -> Delivery {
        self.delivery
    }

    pub fn certificate_alphabet(&self) -> &BTreeSet<char> {
        &self.certificate_alphabet
    }

    /// The checker's starting configuration for the pair `(x, y)`.
    pub fn deliver(&self, x: &str, y: &str) -> Result<Configuration> {
        self.checker.check_input(x)?;
        check_word(y, &self.certificate_alphabet)?;
        let (tape, head) = match self.delivery {
            Delivery::Inline => (Tape::from_word(&format!("{x}{SEPARATOR}{y}")), 0),
            Delivery::Positioned => (Tape::from_word(x), numeral_value(y)),
        };
        Ok(Configuration {
            state: self.checker.start_state.clone(),
            tape,
            head,
        })
    }
}

/// Base-2 value of `y`, most significant bit first; the empty word is 0.
/// Values beyond `i64` range saturate, which still points past any input.
pub fn numeral_value(y: &str) -> i64 {
    y.chars().try_fold(0i64, |acc, c| {
        acc.checked_mul(2)?.checked_add(i64::from(c == '1'))
    })
    .unwrap_or(i64::MAX / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Step limit for each checker run.
    pub fuel: u64,
    /// Maximum number of certificates the length bound may admit.
    pub budget: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            fuel: DEFAULT_CHECKER_FUEL,
            budget: DEFAULT_CERTIFICATE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateSearchReport {
    pub accepted: bool,
    /// First accepting certificate in length-then-lexicographic order.
    pub witness: Option<String>,
    pub certificates_tried: u64,
    pub max_checker_counted_steps: u64,
    /// Longest certificate length admitted by the bound.
    pub max_certificate_len: usize,
    /// Checker runs that ran out of fuel; these count as non-accepting.
    pub fuel_exhausted_runs: u64,
}

/// Accepts `x` iff some `y` with `|y| <= g(|x|)` makes the checker accept.
pub fn decide_nc(
    rel: &CheckingRelation,
    g: &MeasureFunction,
    x: &str,
    cost: &CostModel,
    limits: SearchLimits,
) -> Result<CertificateSearchReport> {
    let bound = g.evaluate(measure_point(x.chars().count()))?;
    search(rel, x, cost, limits, |len| Ok(len as f64 <= bound + BOUND_SLACK))
}

/// Accepts `x` iff some `y` with `T(|y|) <= g(T(|x|))` makes the checker accept.
pub fn decide_nt(
    rel: &CheckingRelation,
    g: &MeasureFunction,
    t: &MeasureFunction,
    x: &str,
    cost: &CostModel,
    limits: SearchLimits,
) -> Result<CertificateSearchReport> {
    let bound = g.evaluate(t.evaluate(measure_point(x.chars().count()))?)?;
    search(rel, x, cost, limits, |len| {
        Ok(t.evaluate(measure_point(len))? <= bound + BOUND_SLACK)
    })
}

/// Lengths admitted by `allowed`, which must be downward closed.
fn admitted_lengths(
    alphabet_size: u128,
    budget: u64,
    allowed: impl Fn(usize) -> Result<bool>,
) -> Result<Option<usize>> {
    let mut total: u128 = 0;
    let mut per_length: u128 = 1;
    let mut max_len = None;
    let mut len = 0usize;
    while allowed(len)? {
        total = total.saturating_add(per_length);
        if total > u128::from(budget) {
            return Err(Error::BudgetExceeded {
                required: total,
                budget,
            });
        }
        max_len = Some(len);
        per_length = per_length.saturating_mul(alphabet_size);
        len += 1;
    }
    Ok(max_len)
}

fn search(
    rel: &CheckingRelation,
    x: &str,
    cost: &CostModel,
    limits: SearchLimits,
    allowed: impl Fn(usize) -> Result<bool>,
) -> Result<CertificateSearchReport> {
    rel.checker.check_input(x)?;
    let symbols: Vec<char> = rel.certificate_alphabet.iter().copied().collect();
    let max_len = admitted_lengths(symbols.len() as u128, limits.budget, allowed)?;
    let runner = Runner::new(&rel.checker, cost)?;

    let mut report = CertificateSearchReport {
        accepted: false,
        witness: None,
        certificates_tried: 0,
        max_checker_counted_steps: 0,
        max_certificate_len: max_len.unwrap_or(0),
        fuel_exhausted_runs: 0,
    };
    let Some(max_len) = max_len else {
        return Ok(report);
    };

    for len in 0..=max_len {
        for y in words_of_length(&symbols, len) {
            let config = rel.deliver(x, &y)?;
            let result = runner.run_configuration(&config, limits.fuel, false)?;
            report.certificates_tried += 1;
            report.max_checker_counted_steps =
                report.max_checker_counted_steps.max(result.counted_steps);
            match result.verdict {
                Verdict::Accepted => {
                    report.accepted = true;
                    report.witness = Some(y);
                    return Ok(report);
                }
                Verdict::FuelExhausted => report.fuel_exhausted_runs += 1,
                Verdict::Rejected => {}
            }
        }
    }
    Ok(report)
}

/// All words of length `len` over `symbols`, in lexicographic order of the
/// given symbol sequence.
pub fn words_of_length(symbols: &[char], len: usize) -> impl Iterator<Item = String> + '_ {
    let mut digits = vec![0usize; len];
    let mut done = symbols.is_empty() && len > 0;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let word: String = digits.iter().map(|&d| symbols[d]).collect();
        done = true;
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < symbols.len() {
                done = false;
                break;
            }
            *d = 0;
        }
        Some(word)
    })
}

/// The contains-a-1 demonstration pair.
#[derive(Debug, Clone)]
pub struct DemoMachines {
    /// Scans left to right; accepts at the first '1', rejects at the blank.
    pub scanner: Machine,
    /// Positioned checker: accepts iff the indexed cell holds '1'.
    pub checker: CheckingRelation,
}

pub fn build_demo_machines() -> DemoMachines {
    let binary: BTreeSet<char> = ['0', '1'].into();
    let tape: BTreeSet<char> = ['0', '1', BLANK].into();

    let mut scan = BTreeMap::new();
    for q in ["q_start", "q_scan"] {
        scan.insert((q.to_string(), '0'), Action::new("q_scan", '0', Move::Right));
        scan.insert((q.to_string(), '1'), Action::new("q_accept", '1', Move::Right));
        scan.insert((q.to_string(), BLANK), Action::new("q_reject", BLANK, Move::Right));
    }
    let scanner = Machine {
        input_alphabet: binary.clone(),
        tape_alphabet: tape.clone(),
        states: ["q_start", "q_scan", "q_accept", "q_reject"]
            .map(String::from)
            .to_vec(),
        start_state: "q_start".into(),
        accept_state: "q_accept".into(),
        reject_state: "q_reject".into(),
        transitions: scan,
    };

    let mut probe = BTreeMap::new();
    probe.insert(("q_start".to_string(), '1'), Action::new("q_accept", '1', Move::Right));
    probe.insert(("q_start".to_string(), '0'), Action::new("q_reject", '0', Move::Right));
    probe.insert(("q_start".to_string(), BLANK), Action::new("q_reject", BLANK, Move::Right));
    let checker = Machine {
        input_alphabet: binary,
        tape_alphabet: tape,
        states: ["q_start", "q_accept", "q_reject"].map(String::from).to_vec(),
        start_state: "q_start".into(),
        accept_state: "q_accept".into(),
        reject_state: "q_reject".into(),
        transitions: probe,
    };

    DemoMachines {
        scanner,
        checker: CheckingRelation::new(checker, Delivery::Positioned)
            .expect("demo checker is a valid positioned relation"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::run;

    fn log_g() -> MeasureFunction {
        MeasureFunction::log_shift(1.0, 1.0).unwrap()
    }

    fn nc(x: &str) -> CertificateSearchReport {
        let demo = build_demo_machines();
        decide_nc(&demo.checker, &log_g(), x, &CostModel::CountAll, SearchLimits::default()).unwrap()
    }

    /// Accepts iff the certificate after '#' is non-empty and ends in '1'.
    fn inline_last_bit_checker() -> Machine {
        let mut t = BTreeMap::new();
        let mut put = |q: &str, c: char, to: &str| {
            t.insert((q.to_string(), c), Action::new(to, c, Move::Right));
        };
        for c in ['0', '1'] {
            put("skip", c, "skip");
        }
        put("skip", SEPARATOR, "cert");
        put("skip", BLANK, "no");
        for q in ["cert", "last0", "last1"] {
            put(q, '0', "last0");
            put(q, '1', "last1");
            put(q, SEPARATOR, "no");
        }
        put("cert", BLANK, "no");
        put("last0", BLANK, "no");
        put("last1", BLANK, "yes");
        Machine {
            input_alphabet: ['0', '1'].into(),
            tape_alphabet: ['0', '1', SEPARATOR, BLANK].into(),
            states: ["skip", "cert", "last0", "last1", "yes", "no"]
                .map(String::from)
                .to_vec(),
            start_state: "skip".into(),
            accept_state: "yes".into(),
            reject_state: "no".into(),
            transitions: t,
        }
    }

    #[test]
    fn word_enumeration_order() {
        let words: Vec<String> = words_of_length(&['0', '1'], 2).collect();
        assert_eq!(words, ["00", "01", "10", "11"]);
        assert_eq!(words_of_length(&['0', '1'], 0).collect::<Vec<_>>(), [""]);
    }

    #[test]
    fn numerals() {
        assert_eq!(numeral_value(""), 0);
        assert_eq!(numeral_value("1"), 1);
        assert_eq!(numeral_value("0101"), 5);
        assert_eq!(numeral_value(&"1".repeat(80)), i64::MAX / 2);
    }

    #[test]
    fn positioned_search_examples() {
        let r = nc("0100");
        assert!(r.accepted);
        assert_eq!(r.witness.as_deref(), Some("1"));
        assert_eq!(r.max_certificate_len, 3);
        // "", "0" probe cell 0, "1" probes cell 1
        assert_eq!(r.certificates_tried, 3);

        let r = nc("0000");
        assert!(!r.accepted);
        assert_eq!(r.witness, None);
        assert_eq!(r.certificates_tried, 15);

        let r = nc("");
        assert!(!r.accepted);
        // bound at length 1 is log2(2)+1 = 2
        assert_eq!(r.max_certificate_len, 2);
    }

    #[test]
    fn transformed_search_examples() {
        let demo = build_demo_machines();
        let exp = MeasureFunction::exp2(1.0).unwrap();
        let limits = SearchLimits::default();

        let r = decide_nt(&demo.checker, &MeasureFunction::linear(1.0, 0.0).unwrap(), &exp, "01", &CostModel::CountAll, limits)
            .unwrap();
        assert_eq!(r.max_certificate_len, 2);
        assert_eq!(r.witness.as_deref(), Some("1"));

        let r = decide_nt(&demo.checker, &MeasureFunction::linear(0.5, 0.0).unwrap(), &exp, "01", &CostModel::CountAll, limits)
            .unwrap();
        assert_eq!(r.max_certificate_len, 1);
        assert_eq!(r.witness.as_deref(), Some("1"));
    }

    #[test]
    fn identity_transform_reduces_to_plain_search() {
        let demo = build_demo_machines();
        let limits = SearchLimits::default();
        for g in [log_g(), MeasureFunction::linear(1.0, 0.0).unwrap(), MeasureFunction::linear(0.5, 1.0).unwrap()] {
            for x in ["", "0", "1", "0001", "000000", "0000001"] {
                let a = decide_nc(&demo.checker, &g, x, &CostModel::CountAll, limits).unwrap();
                let b = decide_nt(&demo.checker, &g, &MeasureFunction::Identity, x, &CostModel::CountAll, limits)
                    .unwrap();
                assert_eq!(a, b, "g={g} x={x}");
            }
        }
    }

    #[test]
    fn budget_is_explicit() {
        let demo = build_demo_machines();
        let limits = SearchLimits { budget: 10, ..SearchLimits::default() };
        let err = decide_nc(&demo.checker, &log_g(), "0000", &CostModel::CountAll, limits).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded { required: 15, budget: 10 });

        let huge = MeasureFunction::exp2(1.0).unwrap();
        let err = decide_nc(&demo.checker, &huge, "0".repeat(200).as_str(), &CostModel::CountAll, SearchLimits::default())
            .unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn demo_scanner_counts() {
        let demo = build_demo_machines();
        let r = run(&demo.scanner, "001", &CostModel::CountAll, 100).unwrap();
        assert_eq!((r.verdict, r.total_steps), (Verdict::Accepted, 3));
        for n in 1..=20 {
            let r = run(&demo.scanner, &"0".repeat(n), &CostModel::CountAll, 100).unwrap();
            assert_eq!((r.verdict, r.total_steps), (Verdict::Rejected, n as u64 + 1));
        }
        let r = nc("001");
        assert!(r.accepted);
        assert!(r.max_checker_counted_steps <= 2);
    }

    #[test]
    fn inline_delivery() {
        let rel = CheckingRelation::new(inline_last_bit_checker(), Delivery::Inline).unwrap();
        let config = rel.deliver("01", "1").unwrap();
        assert_eq!(config.head, 0);
        assert_eq!(config.tape.non_blank().map(|(_, c)| c).collect::<String>(), "01#1");

        let g = MeasureFunction::linear(1.0, 0.0).unwrap();
        let r = decide_nc(&rel, &g, "010", &CostModel::CountAll, SearchLimits::default()).unwrap();
        assert_eq!(r.witness.as_deref(), Some("1"));
        // "" then "0" then "1": seek costs |x| + 1 steps before the certificate
        assert_eq!(r.certificates_tried, 3);
        assert_eq!(r.max_checker_counted_steps, 6);

        let g = MeasureFunction::linear(0.5, 0.0).unwrap();
        let r = decide_nc(&rel, &g, "0", &CostModel::CountAll, SearchLimits::default()).unwrap();
        assert!(!r.accepted);
        assert_eq!(r.max_certificate_len, 0);
    }

    #[test]
    fn relation_invariants() {
        let demo = build_demo_machines();
        let plain = demo.checker.checker().clone();
        assert!(CheckingRelation::new(plain.clone(), Delivery::Inline).is_err());
        assert!(CheckingRelation::with_certificate_alphabet(plain, Delivery::Positioned, ['a', 'b'].into()).is_err());
        assert!(demo.checker.deliver("01", "2").is_err());
        assert!(demo.checker.deliver("0a", "1").is_err());
    }

    #[test]
    fn overflowing_position_reads_blank() {
        let demo = build_demo_machines();
        let runner = Runner::new(demo.checker.checker(), &CostModel::CountAll).unwrap();
        for y in ["10", "111", &"1".repeat(70)] {
            let config = demo.checker.deliver("01", y).unwrap();
            let r = runner.run_configuration(&config, 10, false).unwrap();
            assert_eq!(r.verdict, Verdict::Rejected);
        }
    }
}
