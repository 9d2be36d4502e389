//! `tmbench`: command-line front end for the Turing-machine workbench.
//!
//! Exit codes: 0 success, 2 usage/parse/input error, 3 a verification
//! command found a counterexample. `run --exit-status` instead maps
//! accepted to 0, rejected to 1 and fuel exhaustion to 4.

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use tmbench_core::convergence::{
    build_trie_machine, find_convergence_index, parse_language_file, verify_restriction,
    verify_step_count, Builtin, LanguageOracle,
};
use tmbench_core::format::{emit_machine, parse_machine};
use tmbench_core::measures::{check_bound, display_word, BoundSpec};
use tmbench_core::nondet::{decide_nc, decide_nt, CheckingRelation, Delivery, SearchLimits};
use tmbench_core::nondet::{DEFAULT_CERTIFICATE_BUDGET, DEFAULT_CHECKER_FUEL};
use tmbench_core::profile::{demo_csv, demo_nlogtime, profile, InputFamily};
use tmbench_core::{CostModel, Machine, MeasureFunction, Runner, Verdict};

const MACHINE_FORMAT: &str = "\
Machine file format (line-oriented, '#' starts a comment, whitespace-separated tokens):
  states: <id> <id> ...
  start: <id>
  accept: <id>
  reject: <id>
  input_alphabet: <sym> <sym> ...       # single-character symbols; '_' reserved for blank
  tape_alphabet: <sym> ... _            # must include '_'
  trans: <state> <sym> -> <state> <sym> <L|R>
One trans line per (state, symbol) pair; duplicate pairs are a parse error.
The symbol '#' is written as \\#.";

const COST_SYNTAX: &str = "\
Cost models: \"count-all\", \"free-blind\", \"free-states:q1,q2,...\".";

const MEASURE_SYNTAX: &str = "\
Measures: \"identity\", \"linear:a=<r>,b=<r>\", \"log:a=<r>,b=<r>\", \"power:a=<r>,k=<r>\", \"exp2:a=<r>\"
(a > 0, b >= 0, k > 0; log is a*log2(x+1)+b).";

const LANGUAGE_SYNTAX: &str = "\
Languages: a built-in name (contains-1, parity-even-ones, palindrome, all, empty, div3)
or @<file>: one word per line over {0,1}; the literal line \"eps\" denotes the empty word;
'#' comments allowed.";

const FAMILY_SYNTAX: &str = "\
Input families: \"all\" (exhaustive, at most 2^16 runs per length), \"zeros\", \"ones\",
\"random:count=<n>,seed=<s>\". Lengths are given as A..B (inclusive) or a single N.";

#[derive(Parser)]
#[command(name = "tmbench", version, about = "Turing-machine workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a machine on one input.
    #[command(after_long_help = format!("{MACHINE_FORMAT}\n\n{COST_SYNTAX}"))]
    Run(RunArgs),
    /// Generate the lookup-trie machine for a language and depth.
    #[command(after_long_help = format!("{LANGUAGE_SYNTAX}\n\n{MACHINE_FORMAT}"))]
    GenTrie(GenTrieArgs),
    /// Verify a generated trie machine exhaustively.
    #[command(after_long_help = LANGUAGE_SYNTAX)]
    VerifyTrie(VerifyTrieArgs),
    /// Find the convergence index of the trie sequence for a length bound.
    #[command(after_long_help = LANGUAGE_SYNTAX)]
    Converge(ConvergeArgs),
    /// Worst-case counted steps per input length, as CSV.
    #[command(after_long_help = format!("{FAMILY_SYNTAX}\n\n{COST_SYNTAX}\n\n{MACHINE_FORMAT}"))]
    Profile(ProfileArgs),
    /// Check counted steps against a bound g, optionally transformed by T.
    #[command(after_long_help = format!("{MEASURE_SYNTAX}\n\n{COST_SYNTAX}\n\n{MACHINE_FORMAT}"))]
    CheckBound(CheckBoundArgs),
    /// Certificate search through a checking relation.
    #[command(after_long_help = format!("{MEASURE_SYNTAX}\n\n{COST_SYNTAX}\n\n{MACHINE_FORMAT}"))]
    Nsearch(NsearchArgs),
    /// Scanner versus positioned checker on the contains-a-1 language, as CSV.
    DemoNlogtime(DemoArgs),
}

#[derive(Args)]
struct CostArg {
    /// Cost model.
    #[arg(long, default_value = "count-all")]
    cost: String,
}

impl CostArg {
    fn model(&self) -> Result<CostModel> {
        Ok(self.cost.parse()?)
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    machine: PathBuf,
    /// Input word; "eps" or "" for the empty word.
    #[arg(long, allow_hyphen_values = true)]
    input: String,
    #[command(flatten)]
    cost: CostArg,
    #[arg(long, default_value_t = 1_000_000)]
    fuel: u64,
    /// Print one CSV row per applied transition.
    #[arg(long)]
    trace: bool,
    /// Exit 0 on accept, 1 on reject, 4 on fuel exhaustion.
    #[arg(long)]
    exit_status: bool,
}

#[derive(Args)]
struct GenTrieArgs {
    #[arg(long)]
    lang: String,
    #[arg(long)]
    n: usize,
    /// Output machine file, or "-" for stdout.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyTrieArgs {
    #[arg(long)]
    lang: String,
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct ConvergeArgs {
    #[arg(long)]
    lang: String,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    budget: usize,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long)]
    machine: PathBuf,
    #[command(flatten)]
    cost: CostArg,
    #[arg(long)]
    lengths: String,
    #[arg(long, default_value = "zeros")]
    family: String,
    #[arg(long, default_value_t = 1_000_000)]
    fuel: u64,
}

#[derive(Args)]
struct CheckBoundArgs {
    #[arg(long)]
    machine: PathBuf,
    #[command(flatten)]
    cost: CostArg,
    #[arg(long)]
    g: String,
    /// Input-measure transform T.
    #[arg(long)]
    t: Option<String>,
    /// outer: g(T(x)); inner: T(g(x)). Requires --t.
    #[arg(long, requires = "t")]
    mode: Option<String>,
    /// Comma-separated input words; "eps" is the empty word.
    #[arg(long, allow_hyphen_values = true)]
    inputs: Option<String>,
    /// Also check every word over the input alphabet of length at most N.
    #[arg(long)]
    all_up_to: Option<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    fuel: u64,
}

#[derive(Args)]
struct NsearchArgs {
    #[arg(long)]
    checker: PathBuf,
    #[arg(long)]
    delivery: String,
    #[arg(long)]
    g: String,
    #[arg(long)]
    t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    input: String,
    #[command(flatten)]
    cost: CostArg,
    #[arg(long, default_value_t = DEFAULT_CERTIFICATE_BUDGET)]
    budget: u64,
    /// Step limit per checker run.
    #[arg(long, default_value_t = DEFAULT_CHECKER_FUEL)]
    fuel: u64,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long)]
    max_n: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn read_machine(path: &Path) -> Result<Machine> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_machine(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_language(spec: &str) -> Result<LanguageOracle> {
    match spec.strip_prefix('@') {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            parse_language_file(&text).with_context(|| format!("parsing {path}"))
        }
        None => Ok(LanguageOracle::Builtin(spec.parse::<Builtin>()?)),
    }
}

fn word_arg(w: &str) -> String {
    if w == "eps" {
        String::new()
    } else {
        w.to_string()
    }
}

fn parse_lengths(text: &str) -> Result<RangeInclusive<usize>> {
    let bad = || anyhow!("lengths must be N or A..B, got {text:?}");
    match text.split_once("..") {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok(a..=b)
        }
        None => {
            let n: usize = text.trim().parse().map_err(|_| bad())?;
            Ok(n..=n)
        }
    }
}

fn execute(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run(args) => cmd_run(args),
        Command::GenTrie(args) => {
            let lang = read_language(&args.lang)?;
            let report = build_trie_machine(&lang, args.n)?;
            let text = emit_machine(&report.machine);
            if args.out.as_os_str() == "-" {
                print!("{text}");
            } else {
                fs::write(&args.out, text)
                    .with_context(|| format!("writing {}", args.out.display()))?;
                println!(
                    "n={} states={} oracle_queries={}",
                    report.n, report.state_count, report.oracle_queries
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifyTrie(args) => {
            let lang = read_language(&args.lang)?;
            let report = build_trie_machine(&lang, args.n)?;
            let restriction = verify_restriction(&report, &lang)?;
            let steps = verify_step_count(&report)?;
            println!(
                "restriction: {} ({} short words, {} longer words)",
                if restriction.holds { "ok" } else { "FAILED" },
                restriction.short_words,
                restriction.long_words
            );
            for c in &restriction.counterexamples {
                println!(
                    "  counterexample: {} expected {} got {}",
                    display_word(&c.word),
                    if c.expected_accept { "accept" } else { "reject" },
                    c.verdict
                );
            }
            println!("step count: {}", if steps.holds { "ok" } else { "FAILED" });
            for v in &steps.violations {
                println!(
                    "  counterexample: {} expected {} steps got {}",
                    display_word(&v.word),
                    v.expected,
                    v.actual
                );
            }
            Ok(if restriction.holds && steps.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Converge(args) => {
            let lang = read_language(&args.lang)?;
            let report = find_convergence_index(&lang, args.k, args.budget)?;
            println!("k,n_k,verified_words");
            let n_k = report.n_k.map_or_else(|| "none".to_string(), |n| n.to_string());
            println!("{},{},{}", report.k, n_k, report.verified_words);
            Ok(if report.n_k.is_some() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Profile(args) => {
            let machine = read_machine(&args.machine)?;
            let family: InputFamily = args.family.parse()?;
            let lengths = parse_lengths(&args.lengths)?;
            let p = profile(&machine, &args.cost.model()?, lengths, family, args.fuel)?;
            print!("{}", p.to_csv());
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckBound(args) => cmd_check_bound(args),
        Command::Nsearch(args) => {
            let checker = read_machine(&args.checker)?;
            let delivery: Delivery = args.delivery.parse()?;
            let rel = CheckingRelation::new(checker, delivery)?;
            let g: MeasureFunction = args.g.parse()?;
            let cost = args.cost.model()?;
            let input = word_arg(&args.input);
            let limits = SearchLimits {
                fuel: args.fuel,
                budget: args.budget,
            };
            let report = match &args.t {
                Some(t) => decide_nt(&rel, &g, &t.parse()?, &input, &cost, limits)?,
                None => decide_nc(&rel, &g, &input, &cost, limits)?,
            };
            println!("accepted: {}", report.accepted);
            println!(
                "witness: {}",
                report.witness.as_deref().map_or_else(|| "none".to_string(), display_word)
            );
            println!("certificates_tried: {}", report.certificates_tried);
            println!("max_certificate_len: {}", report.max_certificate_len);
            println!("max_checker_counted_steps: {}", report.max_checker_counted_steps);
            println!("fuel_exhausted_runs: {}", report.fuel_exhausted_runs);
            Ok(ExitCode::SUCCESS)
        }
        Command::DemoNlogtime(args) => {
            if args.max_n == 0 {
                bail!("--max-n must be at least 1");
            }
            print!("{}", demo_csv(&demo_nlogtime(args.max_n)?));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<ExitCode> {
    let machine = read_machine(&args.machine)?;
    let runner = Runner::new(&machine, &args.cost.model()?)?;
    let input = word_arg(&args.input);
    let result = if args.trace {
        runner.run_traced(&input, args.fuel)?
    } else {
        runner.run(&input, args.fuel)?
    };
    if let Some(trace) = &result.trace {
        println!("step,state,head,read,write,move,counted");
        for (i, e) in trace.iter().enumerate() {
            println!(
                "{},{},{},{},{},{},{}",
                i + 1,
                e.state,
                e.head,
                e.read,
                e.write,
                e.movement,
                e.counted
            );
        }
    }
    println!("verdict: {}", result.verdict);
    println!("total_steps: {}", result.total_steps);
    println!("counted_steps: {}", result.counted_steps);
    if !args.exit_status {
        return Ok(ExitCode::SUCCESS);
    }
    Ok(ExitCode::from(match result.verdict {
        Verdict::Accepted => 0,
        Verdict::Rejected => 1,
        Verdict::FuelExhausted => 4,
    }))
}

fn cmd_check_bound(args: CheckBoundArgs) -> Result<ExitCode> {
    let machine = read_machine(&args.machine)?;
    let g: MeasureFunction = args.g.parse()?;
    let spec = match (&args.t, args.mode.as_deref()) {
        (None, _) => BoundSpec::plain(g),
        (Some(t), None | Some("outer")) => BoundSpec::outer(g, t.parse()?),
        (Some(t), Some("inner")) => BoundSpec::inner(g, t.parse()?),
        (Some(_), Some(other)) => bail!("--mode must be outer or inner, got {other:?}"),
    };
    let mut inputs: Vec<String> = args
        .inputs
        .iter()
        .flat_map(|list| list.split(','))
        .map(|w| word_arg(w.trim()))
        .collect();
    if let Some(max) = args.all_up_to {
        let symbols: Vec<char> = machine.input_alphabet.iter().copied().collect();
        let mut total: u64 = 0;
        for len in 0..=max {
            total = total.saturating_add((symbols.len() as u64).saturating_pow(len as u32));
            if total > 1 << 16 {
                bail!("--all-up-to {max} would run more than 65536 inputs");
            }
            inputs.extend(tmbench_core::nondet::words_of_length(&symbols, len));
        }
    }
    if inputs.is_empty() {
        bail!("give --inputs or --all-up-to");
    }
    let report = check_bound(&machine, &args.cost.model()?, &spec, &inputs, args.fuel)?;
    print!("{}", report.to_csv());
    Ok(if report.verdict {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}
