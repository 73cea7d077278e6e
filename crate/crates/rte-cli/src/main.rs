// SPDX-License-Identifier: Apache-2.0
//! `rte`: compile regular transducer expressions, evaluate words, run
//! differential checks and export machines.
//!
//! Exit codes: 0 success, 1 a check failed, 2 bad input or usage.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rte::check::{check_pipeline, CheckOptions};
use rte::config::Config;
use rte::corpus::{corpus, Shape};
use rte::expr::{label_occurrences, parse_rte_unchecked, Alphabet, LabeledExpr};
use rte::machines::{
    default_budget, determinize, enumerate_outputs_with, letters_of, minimize, render_word, run_two_way, EnumLimits,
    Machine, RunOutcome,
};
use rte::oracle::{oracle_dom, oracle_parsings, oracle_rsem, oracle_udom, oracle_usem, OracleBound};
use rte::pipeline::{c_n, c_n_alphabet, check_size_bounds, Gate, Pipeline};

/// `println!` that exits quietly when the reader has gone away.
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write;
        if let Err(e) = writeln!(std::io::stdout(), $($t)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
    }};
}

#[derive(Parser)]
#[command(name = "rte", version, about = "Regular transducer expression toolkit")]
struct Cli {
    /// Key-value configuration file (alphabets, bounds, seed).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Source {
    /// Expression text.
    #[arg(conflicts_with_all = ["file", "cn"])]
    expr: Option<String>,
    /// Read the expression from a file.
    #[arg(long, short)]
    file: Option<PathBuf>,
    /// Use the built-in family member C_N over the letters 1..N.
    #[arg(long, value_name = "N")]
    cn: Option<u32>,
    /// Input alphabet, as a run of letters.
    #[arg(long)]
    sigma: Option<String>,
    /// Output alphabet; when absent, any output letter is accepted.
    #[arg(long)]
    gamma: Option<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build all machines and write JSON dumps plus a metrics file.
    Compile {
        #[command(flatten)]
        src: Source,
        #[arg(long, short, default_value = "out")]
        out: PathBuf,
    },
    /// Evaluate an expression on a word.
    Eval {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        word: String,
        #[arg(long, value_enum, default_value_t = Mode::Unambiguous)]
        mode: Mode,
        /// Also print the parsed word(s).
        #[arg(long)]
        show_parsing: bool,
    },
    /// Compare machines with the oracle on every word up to a length.
    Check {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        max_len: Option<usize>,
        /// Check this many random expressions from the configured seed instead.
        #[arg(long, value_name = "N")]
        random: Option<usize>,
        /// Use a parser loaded from a JSON dump.
        #[arg(long)]
        parser: Option<PathBuf>,
        /// Use an evaluator loaded from a JSON dump.
        #[arg(long)]
        evaluator: Option<PathBuf>,
    },
    /// Export one machine as DOT or JSON.
    Dump {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
        #[arg(long, value_enum)]
        machine: Which,
        /// Output file; standard output when absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Print what the brute-force oracle says about a word.
    Oracle {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        word: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Relational,
    Unambiguous,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Parser,
    Evaluator,
    Checker,
    Acceptor,
}

fn letters(s: &str) -> Alphabet {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn load_config(path: Option<&Path>) -> Result<(Config, bool)> {
    match path {
        None => Ok((Config::default(), false)),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok((Config::parse(&text).with_context(|| format!("in {}", p.display()))?, true))
        }
    }
}

struct Loaded {
    h: LabeledExpr,
    sigma: Alphabet,
}

fn load(src: &Source, cfg: &Config, from_file: bool) -> Result<Loaded> {
    if let Some(n) = src.cn {
        if !(2..=9).contains(&n) {
            bail!("--cn needs 2 <= N <= 9");
        }
        return Ok(Loaded { h: label_occurrences(&c_n(n)), sigma: c_n_alphabet(n) });
    }
    let text = match (&src.expr, &src.file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        (None, None) => bail!("no expression given"),
    };
    let sigma = src.sigma.as_deref().map(letters).unwrap_or_else(|| cfg.sigma.clone());
    let e = parse_rte_unchecked(text.trim()).map_err(|e| anyhow::anyhow!("{e}"))?;
    let gamma: Alphabet = match (&src.gamma, from_file) {
        (Some(g), _) => letters(g),
        (None, true) => cfg.gamma.iter().chain(&sigma).copied().collect(),
        (None, false) => (' '..='~').chain(sigma.iter().copied()).collect(),
    };
    e.check_alphabets(&sigma, &gamma).map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(Loaded { h: label_occurrences(&e), sigma })
}

fn show_set(items: &BTreeSet<String>) -> String {
    let v: Vec<String> = items.iter().map(|s| format!("{s:?}")).collect();
    format!("{{{}}}", v.join(", "))
}

fn limits(cfg: &Config) -> EnumLimits {
    EnumLimits { max_eps_run: cfg.max_eps_run, max_outputs: cfg.max_outputs, max_steps: 2_000_000 }
}

fn compile(l: &Loaded, out: &Path) -> Result<()> {
    let p = Pipeline::build(&l.h, &l.sigma)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let write = |name: &str, body: String| {
        let path = out.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
    };
    write("parser.json", Machine::OneWay(p.parser.clone()).to_json())?;
    write("evaluator.json", Machine::TwoWay(p.evaluator.clone()).to_json())?;
    if let Some(b) = &p.checker {
        write("checker.json", Machine::Automaton(b.clone()).to_json())?;
    }
    let expr = l.h.expr();
    let dom = minimize(&determinize(&p.parser.domain_nfa()))?;
    let mut m = String::new();
    m += &format!("expression: {expr}\n");
    m += &format!("size: {}\nwidth: {}\n", expr.size(), expr.width());
    m += &format!("parser_states: {}\nparser_nominal_states: {}\n", p.parser.num_states, p.parser.nominal_states);
    m += &format!("evaluator_states: {}\n", p.evaluator.num_states());
    match &p.checker {
        Some(b) => m += &format!("checker_states: {}\n", b.num_states),
        None => m += "checker_states: not materialized\n",
    }
    match &p.gate {
        Gate::Dfa(d) => {
            write("acceptor.json", Machine::Automaton(d.to_nfa()).to_json())?;
            m += &format!("acceptor_states: {}\n", d.num_states());
        }
        Gate::Subsets(_) | Gate::Product(_) => m += "acceptor_states: not materialized\n",
    }
    m += &format!("domain_min_dfa_states: {}\n", dom.num_states());
    for line in check_size_bounds(&p) {
        if !line.holds() {
            eprintln!("warning: bound violated: {line}");
        }
        m += &format!("bound: {line}\n");
    }
    write("metrics.txt", m)?;
    say!("wrote {}", out.display());
    Ok(())
}

fn eval(l: &Loaded, cfg: &Config, word: &str, mode: Mode, show_parsing: bool) -> Result<()> {
    if let Some(c) = word.chars().find(|c| !l.sigma.contains(c)) {
        bail!("letter {c:?} is not in the input alphabet");
    }
    let p = Pipeline::build(&l.h, &l.sigma)?;
    match mode {
        Mode::Unambiguous => {
            let t = p.trace(word)?;
            if show_parsing {
                match &t.parsing {
                    Some(x) => say!("parsing: {}", render_word(x)),
                    None => say!("parsing: none (gate {})", if t.gate_open { "open" } else { "closed" }),
                }
            }
            say!("{}", t.output.as_deref().map(|v| format!("{v:?}")).unwrap_or_else(|| "undefined".into()));
        }
        Mode::Relational => {
            let parsed = enumerate_outputs_with(&p.parser, &letters_of(word), limits(cfg));
            let mut outs = BTreeSet::new();
            for x in &parsed.items {
                if show_parsing {
                    say!("parsing: {}", render_word(x));
                }
                match run_two_way(&p.evaluator, x, default_budget(&p.evaluator, x)) {
                    RunOutcome::Accept(v) => {
                        outs.insert(v);
                    }
                    other => bail!("internal error: evaluator gave {other:?} on {}", render_word(x)),
                }
            }
            if parsed.truncated {
                eprintln!("warning: output set truncated");
            }
            say!("{}", show_set(&outs));
        }
    }
    Ok(())
}

fn load_machine(path: &Path) -> Result<Machine> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Machine::from_json(&text).with_context(|| format!("loading {}", path.display()))
}

fn check_one(p: &Pipeline, opts: &CheckOptions) -> bool {
    let r = check_pipeline(p, opts);
    for line in &r.sizes {
        say!("  {line}");
    }
    say!("  words checked: {} ({} with truncated enumeration)", r.words, r.truncated);
    for f in &r.failures {
        say!("  FAIL {f}");
    }
    say!("  {}", if r.passed() { "pass" } else { "FAIL" });
    r.passed()
}

fn check(
    src: &Source,
    cfg: &Config,
    from_file: bool,
    max_len: Option<usize>,
    random: Option<usize>,
    parser: Option<&Path>,
    evaluator: Option<&Path>,
) -> Result<bool> {
    let opts = CheckOptions {
        max_len: max_len.unwrap_or(cfg.max_len),
        limits: EnumLimits { max_eps_run: cfg.max_eps_run, max_outputs: cfg.max_outputs, max_steps: 200_000 },
        bound: OracleBound::default(),
        ..CheckOptions::default()
    };
    if let Some(n) = random {
        let shape = Shape { sigma: cfg.sigma.iter().copied().collect(), ..Shape::default() };
        let mut ok = true;
        for (i, e) in corpus(cfg.seed, n, cfg.depth, &shape).iter().enumerate() {
            say!("#{i} {e}");
            let h = label_occurrences(e);
            match Pipeline::build(&h, &cfg.sigma) {
                Ok(p) => ok &= check_one(&p, &opts),
                Err(err) => say!("  skipped: {err}"),
            }
        }
        return Ok(ok);
    }
    let l = load(src, cfg, from_file)?;
    let mut p = Pipeline::build(&l.h, &l.sigma)?;
    if parser.is_some() || evaluator.is_some() {
        let mut pa = p.parser.clone();
        let mut ev = p.evaluator.clone();
        if let Some(path) = parser {
            match load_machine(path)? {
                Machine::OneWay(t) => pa = t,
                _ => bail!("{} is not a one-way transducer", path.display()),
            }
        }
        if let Some(path) = evaluator {
            match load_machine(path)? {
                Machine::TwoWay(t) => ev = t,
                _ => bail!("{} is not a two-way transducer", path.display()),
            }
        }
        p = Pipeline::from_machines(&l.h, &l.sigma, pa, ev);
    }
    say!("{}", l.h.expr());
    Ok(check_one(&p, &opts))
}

fn dump(l: &Loaded, format: Format, which: Which, out: Option<&Path>) -> Result<()> {
    let p = Pipeline::build(&l.h, &l.sigma)?;
    let (m, name) = match which {
        Which::Parser => (Machine::OneWay(p.parser), "parser"),
        Which::Evaluator => (Machine::TwoWay(p.evaluator), "evaluator"),
        Which::Checker => match p.checker {
            Some(b) => (Machine::Automaton(b), "checker"),
            None => bail!("the checker is too large to materialize"),
        },
        Which::Acceptor => match p.gate {
            Gate::Dfa(d) => (Machine::Automaton(d.to_nfa()), "acceptor"),
            Gate::Subsets(_) | Gate::Product(_) => bail!("the acceptor is too large to materialize"),
        },
    };
    let body = match format {
        Format::Dot => m.to_dot(name),
        Format::Json => m.to_json() + "\n",
    };
    match out {
        Some(path) => fs::write(path, body).with_context(|| format!("writing {}", path.display()))?,
        None => say!("{}", body.trim_end_matches('\n')),
    }
    Ok(())
}

fn oracle(l: &Loaded, word: &str) {
    let bound = OracleBound::default();
    let parsings = oracle_parsings(&l.h, word, bound);
    for x in &parsings.items {
        say!("parsing: {}", render_word(x));
    }
    say!("dom: {}", oracle_dom(&l.h, word));
    say!("udom: {}", oracle_udom(&l.h, word));
    let rsem = oracle_rsem(&l.h, word, bound);
    say!("rsem: {}{}", show_set(&rsem.items), if rsem.truncated { " (truncated)" } else { "" });
    match oracle_usem(&l.h, word) {
        Some(v) => say!("usem: {v:?}"),
        None => say!("usem: undefined"),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let (cfg, from_file) = load_config(cli.config.as_deref())?;
    match &cli.cmd {
        Cmd::Compile { src, out } => compile(&load(src, &cfg, from_file)?, out)?,
        Cmd::Eval { src, word, mode, show_parsing } => {
            eval(&load(src, &cfg, from_file)?, &cfg, word, *mode, *show_parsing)?
        }
        Cmd::Check { src, max_len, random, parser, evaluator } => {
            return check(src, &cfg, from_file, *max_len, *random, parser.as_deref(), evaluator.as_deref());
        }
        Cmd::Dump { src, format, machine, out } => {
            dump(&load(src, &cfg, from_file)?, *format, *machine, out.as_deref())?
        }
        Cmd::Oracle { src, word } => oracle(&load(src, &cfg, from_file)?, word),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
