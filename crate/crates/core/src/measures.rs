//! Complexity measure functions, input-measure transforms and empirical
//! bound checking.
//!
//! Measure functions are restricted to parametric families that are strictly
//! increasing and positive on `(0, inf)` whenever their parameters satisfy
//! `a > 0`, `b >= 0`, `k > 0`.

use std::fmt;
use std::str::FromStr;

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::machine::{Machine, Runner, Verdict};

/// Slack added to a bound before flooring it to an integer step budget.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureFunction {
    /// `x`
    Identity,
    /// `a*x + b`
    Linear { a: f64, b: f64 },
    /// `a*log2(x + 1) + b`
    LogShift { a: f64, b: f64 },
    /// `a*x^k`
    Power { a: f64, k: f64 },
    /// `a*2^x`
    Exp2 { a: f64 },
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Domain(format!("parameter {name} must be finite and > 0, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::Domain(format!("parameter {name} must be finite and >= 0, got {v}")))
    }
}

impl MeasureFunction {
    pub fn linear(a: f64, b: f64) -> Result<Self> {
        Ok(MeasureFunction::Linear {
            a: positive("a", a)?,
            b: non_negative("b", b)?,
        })
    }

    pub fn log_shift(a: f64, b: f64) -> Result<Self> {
        Ok(MeasureFunction::LogShift {
            a: positive("a", a)?,
            b: non_negative("b", b)?,
        })
    }

    pub fn power(a: f64, k: f64) -> Result<Self> {
        Ok(MeasureFunction::Power {
            a: positive("a", a)?,
            k: positive("k", k)?,
        })
    }

    pub fn exp2(a: f64) -> Result<Self> {
        Ok(MeasureFunction::Exp2 {
            a: positive("a", a)?,
        })
    }

    /// Re-checks the parameter constraints, for values built from the enum directly.
    pub fn validated(self) -> Result<Self> {
        match self {
            MeasureFunction::Identity => Ok(self),
            MeasureFunction::Linear { a, b } => Self::linear(a, b),
            MeasureFunction::LogShift { a, b } => Self::log_shift(a, b),
            MeasureFunction::Power { a, k } => Self::power(a, k),
            MeasureFunction::Exp2 { a } => Self::exp2(a),
        }
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("measure functions are defined on x > 0, got {x}")));
        }
        Ok(self.apply(x))
    }

    fn apply(&self, x: f64) -> f64 {
        match *self {
            MeasureFunction::Identity => x,
            MeasureFunction::Linear { a, b } => a * x + b,
            MeasureFunction::LogShift { a, b } => a * (x + 1.0).log2() + b,
            MeasureFunction::Power { a, k } => a * x.powf(k),
            MeasureFunction::Exp2 { a } => a * x.exp2(),
        }
    }

    /// True iff the values at consecutive sample points strictly increase.
    pub fn check_monotone_sample(&self, xs: &[f64]) -> Result<bool> {
        check_monotone_by(|x| self.evaluate(x), xs)
    }
}

pub(crate) fn check_monotone_by(f: impl Fn(f64) -> Result<f64>, xs: &[f64]) -> Result<bool> {
    if xs.len() < 2 {
        return Err(Error::Domain("monotonicity sample needs at least two points".into()));
    }
    if xs.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::Domain("monotonicity sample points must be positive".into()));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("monotonicity sample must be strictly increasing".into()));
    }
    let values = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    Ok(values.windows(2).all(|w| w[0] < w[1]))
}

impl fmt::Display for MeasureFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureFunction::Identity => f.write_str("identity"),
            MeasureFunction::Linear { a, b } => write!(f, "linear:a={a},b={b}"),
            MeasureFunction::LogShift { a, b } => write!(f, "log:a={a},b={b}"),
            MeasureFunction::Power { a, k } => write!(f, "power:a={a},k={k}"),
            MeasureFunction::Exp2 { a } => write!(f, "exp2:a={a}"),
        }
    }
}

/// Parses `identity`, `linear:a=<r>,b=<r>`, `log:a=<r>,b=<r>`,
/// `power:a=<r>,k=<r>` or `exp2:a=<r>`.
impl FromStr for MeasureFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "identity" {
            return Ok(MeasureFunction::Identity);
        }
        let (family, params) = s
            .split_once(':')
            .ok_or_else(|| Error::Syntax(format!("unknown measure {s:?}")))?;
        let expected: &[&str] = match family {
            "linear" | "log" => &["a", "b"],
            "power" => &["a", "k"],
            "exp2" => &["a"],
            _ => return Err(Error::Syntax(format!("unknown measure family {family:?}"))),
        };
        let mut values = vec![None; expected.len()];
        for pair in params.split(',') {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::Syntax(format!("expected key=value, got {pair:?}")))?;
            let slot = expected
                .iter()
                .position(|k| *k == key.trim())
                .ok_or_else(|| Error::Syntax(format!("{family} has no parameter {key:?}")))?;
            if values[slot].is_some() {
                return Err(Error::Syntax(format!("parameter {key} given twice")));
            }
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Syntax(format!("parameter {key}: not a number: {value:?}")))?;
            values[slot] = Some(v);
        }
        let mut values = values.into_iter().zip(expected).map(|(v, k)| {
            v.ok_or_else(|| Error::Syntax(format!("{family} is missing parameter {k}")))
        });
        let mut next = || values.next().expect("parameter count matches family");
        match family {
            "linear" => MeasureFunction::linear(next()?, next()?),
            "log" => MeasureFunction::log_shift(next()?, next()?),
            "power" => MeasureFunction::power(next()?, next()?),
            _ => MeasureFunction::exp2(next()?),
        }
    }
}

/// How the transform `T` combines with the bound `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundMode {
    /// `g(x)`
    Plain,
    /// `g(T(x))`
    Outer(MeasureFunction),
    /// `T(g(x))`
    Inner(MeasureFunction),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSpec {
    pub g: MeasureFunction,
    pub mode: BoundMode,
}

impl BoundSpec {
    pub fn plain(g: MeasureFunction) -> Self {
        BoundSpec {
            g,
            mode: BoundMode::Plain,
        }
    }

    pub fn outer(g: MeasureFunction, t: MeasureFunction) -> Self {
        BoundSpec {
            g,
            mode: BoundMode::Outer(t),
        }
    }

    pub fn inner(g: MeasureFunction, t: MeasureFunction) -> Self {
        BoundSpec {
            g,
            mode: BoundMode::Inner(t),
        }
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        match self.mode {
            BoundMode::Plain => self.g.evaluate(x),
            BoundMode::Outer(t) => self.g.evaluate(t.evaluate(x)?),
            BoundMode::Inner(t) => t.evaluate(self.g.evaluate(x)?),
        }
    }

    /// Bound for an input of length `len`; the empty word is checked at 1.
    pub fn for_length(&self, len: usize) -> Result<f64> {
        self.evaluate(measure_point(len))
    }
}

/// The point of `(0, inf)` at which a length is measured: `max(len, 1)`.
pub fn measure_point(len: usize) -> f64 {
    len.max(1) as f64
}

/// Largest step count permitted by a real-valued bound.
pub fn step_budget(bound: f64) -> f64 {
    (bound + BOUND_SLACK).floor()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundRow {
    pub input: String,
    pub length: usize,
    /// The point the bound was evaluated at; 1 for the empty word.
    pub evaluated_at: f64,
    /// `None` when the run exhausted its fuel.
    pub counted_steps: Option<u64>,
    pub bound: f64,
    pub pass: bool,
    /// `counted_steps - floor(bound + slack)`; infinite on fuel exhaustion.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub rows: Vec<BoundRow>,
    pub verdict: bool,
    pub worst_margin: f64,
    pub fuel_exhausted: usize,
}

impl BoundReport {
    /// CSV with columns `input,length,counted_steps,bound,pass`.
    pub fn to_csv(&self) -> String {
        let mut out = csv::Writer::from_writer(Vec::new());
        out.write_record(["input", "length", "counted_steps", "bound", "pass"])
            .expect("in-memory write");
        for row in &self.rows {
            let steps = row
                .counted_steps
                .map_or_else(|| "fuel-exhausted".to_string(), |s| s.to_string());
            out.write_record([
                display_word(&row.input),
                row.length.to_string(),
                steps,
                row.bound.to_string(),
                row.pass.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(out.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// Renders the empty word as `eps`.
pub fn display_word(word: &str) -> String {
    if word.is_empty() {
        "eps".to_string()
    } else {
        word.to_string()
    }
}

/// Runs `machine` on every input and compares counted steps with the bound.
pub fn check_bound<S: AsRef<str>>(
    machine: &Machine,
    cost: &CostModel,
    spec: &BoundSpec,
    inputs: &[S],
    fuel: u64,
) -> Result<BoundReport> {
    if inputs.is_empty() {
        return Err(Error::Domain("bound check needs at least one input".into()));
    }
    let runner = Runner::new(machine, cost)?;
    let mut rows = Vec::with_capacity(inputs.len());
    for input in inputs {
        let input = input.as_ref();
        let length = input.chars().count();
        let evaluated_at = measure_point(length);
        let bound = spec.evaluate(evaluated_at)?;
        let result = runner.run(input, fuel)?;
        let (counted_steps, margin) = match result.verdict {
            Verdict::FuelExhausted => (None, f64::INFINITY),
            _ => {
                let c = result.counted_steps;
                (Some(c), c as f64 - step_budget(bound))
            }
        };
        rows.push(BoundRow {
            input: input.to_string(),
            length,
            evaluated_at,
            counted_steps,
            bound,
            pass: margin <= 0.0,
            margin,
        });
    }
    let worst_margin = rows
        .iter()
        .map(|r| r.margin)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundReport {
        verdict: rows.iter().all(|r| r.pass),
        fuel_exhausted: rows.iter().filter(|r| r.counted_steps.is_none()).count(),
        worst_margin,
        rows,
    })
}
