// SPDX-License-Identifier: Apache-2.0
//! Differential check of a pipeline's machines against the oracle on every
//! short word.

use std::collections::BTreeSet;
use std::fmt;

use crate::corpus::words_up_to;
use crate::evaluator_build::check_evaluator_shape;
use crate::machines::{
    default_budget, enumerate_outputs_with, letters_of, render_word, run_two_way_traced, EnumLimits, ParsedWord,
    RunOutcome, TwoWayTransducer,
};
use crate::oracle::{
    check_kstar_conditions, oracle_dom, oracle_parsings, oracle_rsem, oracle_udom, oracle_usem, OracleBound,
};
use crate::parser_build::check_parser_invariants;
use crate::pipeline::{check_size_bounds, BoundCheck, Pipeline};
use crate::regex::nfa_accepts;

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub max_len: usize,
    pub limits: EnumLimits,
    pub bound: OracleBound,
    /// Stop collecting after this many failures.
    pub max_failures: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            max_len: 6,
            limits: EnumLimits { max_eps_run: 40, max_outputs: 512, max_steps: 200_000 },
            bound: OracleBound::default(),
            max_failures: 20,
        }
    }
}

/// A counterexample: the word (if any) and what disagreed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub word: Option<String>,
    pub what: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.word {
            Some(w) => write!(f, "on {w:?}: {}", self.what),
            None => write!(f, "{}", self.what),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub words: usize,
    /// Words where a bounded enumeration was cut short and equality was not asserted.
    pub truncated: usize,
    pub sizes: Vec<BoundCheck>,
    pub failures: Vec<Failure>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn fail(&mut self, word: Option<&str>, what: String) {
        self.failures.push(Failure { word: word.map(str::to_string), what });
    }
}

fn show(set: &BTreeSet<String>) -> String {
    let items: Vec<String> = set.iter().map(|s| format!("{s:?}")).collect();
    format!("{{{}}}", items.join(", "))
}

fn show_parsings<'a>(it: impl IntoIterator<Item = &'a ParsedWord>) -> String {
    it.into_iter().map(|x| render_word(x)).collect::<Vec<_>>().join(" | ")
}

fn evaluate(t: &TwoWayTransducer, x: &[crate::machines::Sym]) -> Result<String, String> {
    let (out, trace) = run_two_way_traced(t, x, default_budget(t, x));
    match out {
        RunOutcome::Accept(v) => {
            let (first, last) = (trace.first().unwrap(), trace.last().unwrap());
            if first.pos != 0 || last.pos != x.len() {
                return Err(format!("accepting run spans {}..{} of {}", first.pos, last.pos, x.len()));
            }
            Ok(v)
        }
        other => Err(format!("evaluator gave {other:?} on {}", render_word(x))),
    }
}

pub fn check_pipeline(p: &Pipeline, opts: &CheckOptions) -> CheckReport {
    let mut report = CheckReport::default();
    let h = &p.h;
    if let Err(e) = check_parser_invariants(&p.parser) {
        report.fail(None, format!("parser invariant: {e}"));
    }
    if !p.evaluator.is_reversible() {
        report.fail(None, "evaluator is not reversible".into());
    }
    if let Err(e) = check_evaluator_shape(&p.evaluator, h.occ) {
        report.fail(None, format!("evaluator shape: {e}"));
    }
    report.sizes = check_size_bounds(p);
    for line in report.sizes.clone() {
        if !line.holds() {
            report.fail(None, format!("size bound: {line}"));
        }
    }
    for w in words_up_to(&p.sigma, opts.max_len) {
        if report.failures.len() >= opts.max_failures {
            break;
        }
        report.words += 1;
        let mut cut = false;
        let oracle = oracle_parsings(h, &w, opts.bound);
        let parsed = enumerate_outputs_with(&p.parser, &letters_of(&w), opts.limits);
        cut |= oracle.truncated || parsed.truncated;
        if !cut && oracle.items != parsed.items {
            let missing = oracle.items.difference(&parsed.items);
            let extra = parsed.items.difference(&oracle.items);
            report.fail(
                Some(&w),
                format!("parser missing [{}] extra [{}]", show_parsings(missing), show_parsings(extra)),
            );
        }
        for x in parsed.items.iter().chain(&oracle.items) {
            if let Err(e) = check_kstar_conditions(h, x) {
                report.fail(Some(&w), format!("k-star conditions on {}: {e}", render_word(x)));
            }
        }
        let want = oracle_rsem(h, &w, opts.bound);
        cut |= want.truncated;
        let mut got = BTreeSet::new();
        for x in &oracle.items {
            match evaluate(&p.evaluator, x) {
                Ok(v) => {
                    got.insert(v);
                }
                Err(e) => report.fail(Some(&w), e),
            }
        }
        if !want.truncated && !oracle.truncated && got != want.items {
            report.fail(Some(&w), format!("evaluator gives {} but oracle gives {}", show(&got), show(&want.items)));
        }
        let chars: Vec<char> = w.chars().collect();
        let ambiguous = oracle_dom(h, &w) && !oracle_udom(h, &w);
        if let Some(b) = &p.checker {
            if nfa_accepts(b, &chars) != ambiguous {
                report.fail(Some(&w), format!("checker says ambiguous={}, oracle says {ambiguous}", !ambiguous));
            }
        }
        if p.product.ambiguous(&chars) != ambiguous {
            report.fail(Some(&w), format!("product checker says ambiguous={}, oracle says {ambiguous}", !ambiguous));
        }
        if p.gate.accepts(&chars) == ambiguous {
            report.fail(Some(&w), "gate disagrees with the checker".into());
        }
        match p.run(&w) {
            Ok(v) => {
                let expect = oracle_usem(h, &w);
                if v != expect {
                    report.fail(Some(&w), format!("unambiguous run gives {v:?}, oracle gives {expect:?}"));
                }
            }
            Err(e) => report.fail(Some(&w), e.to_string()),
        }
        report.truncated += usize::from(cut);
    }
    report
}
