// SPDX-License-Identifier: Apache-2.0
//! Acceptance report: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p rte --test acceptance`. The target exits non-zero
//! on any red criterion except those listed in `KNOWN_RED`, and on any hard
//! size-bound violation.
mod common;

use std::collections::BTreeSet;
use std::ops::RangeInclusive;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use rte::corpus::rng;
use rte::evaluator_build::{build_evaluator, check_evaluator_shape};
use rte::expr::{label_occurrences, parse_rte, Expr, LNode, LabeledExpr};
use rte::machines::{
    default_budget, enumerate_outputs_with, letters_of, render_word, run_two_way_traced, EnumLimits, RunOutcome,
};
use rte::oracle::{
    check_kstar_conditions, oracle_dom, oracle_parsings, oracle_rsem, oracle_udom, oracle_usem, OracleBound,
};
use rte::parser_build::{build_parser, build_parser_with, parser_base, BuildMode};
use rte::pipeline::{c_n, c_n_alphabet, check_size_bounds, u_word, BoundKind, Pipeline};
use rte::regex::nfa_accepts;

const WORKED_EXAMPLE_BUDGET: Duration = Duration::from_secs(1);
const CORPUS_SEED: u64 = SEED ^ 0xacce;
const CORPUS_SIZE: usize = 200;
const CORPUS_MAX_DEPTH: usize = 4;
const CORPUS_MAX_SIZE: usize = 60;
const WORD_LEN: usize = 6;
const LIMITS: EnumLimits = EnumLimits { max_eps_run: 40, max_outputs: 512, max_steps: 200_000 };
const HADAMARD_FULL_CAP: u128 = 1 << 14;
const CN_RANGE: RangeInclusive<u32> = 2..=8;
const CN_BUDGET: Duration = Duration::from_secs(60);
const CN_SAMPLES: usize = 300;
const ASSOC_TRIPLES: usize = 40;
const ASSOC_MAX_SIZE: usize = 16;
const FDOM_LEN: usize = 8;

/// Criteria expected to stay red: the forward k-star evaluator is k states short of the exact count.
const KNOWN_RED: &[u32] = &[4];

struct Verdict {
    id: u32,
    title: &'static str,
    ok: bool,
    detail: String,
}

impl Verdict {
    fn line(&self) -> String {
        format!("{} [{}] {}: {}", if self.ok { "PASS" } else { "FAIL" }, self.id, self.title, self.detail)
    }
}

fn rte_text(text: &str) -> LabeledExpr {
    label_occurrences(&parse_rte(text, &sigma(), &gamma_all()).unwrap())
}

fn parser_strings(h: &LabeledExpr, w: &str) -> Vec<String> {
    let p = build_parser(h, &sigma()).unwrap();
    enumerate_outputs_with(&p, &letters_of(w), LIMITS).items.iter().map(|x| render_word(x)).collect()
}

fn oracle_strings(h: &LabeledExpr, w: &str) -> Vec<String> {
    oracle_parsings(h, w, OracleBound::default()).items.iter().map(|x| render_word(x)).collect()
}

fn worked_examples() -> Verdict {
    let start = Instant::now();
    let sum = rte_text("((a->\"\")*.(b->\"\")) + ((a->\"\").(b->\"\")*)");
    let had = rte_text("((a->\"\")*.(b->\"\")) odot ((a->\"\").(b->\"\")*)");
    let cases: [(&LabeledExpr, &str, Vec<&str>); 3] = [
        (&sum, "aab", vec!["(9 (4 (2 (1 a )1 (1 a )1 )2 (3 b )3 )4 )9"]),
        (&sum, "ab", vec!["(9 (4 (2 (1 a )1 )2 (3 b )3 )4 )9", "(9 (8 (5 a )5 (7 (6 b )6 )7 )8 )9"]),
        (&had, "ab", vec!["(9 (4 (2 (1 (8 (5 a )1 )2 (3 )5 (7 (6 b )3 )4 )6 )7 )8 )9"]),
    ];
    let mut bad = Vec::new();
    for (h, w, want) in &cases {
        let mut want: Vec<String> = want.iter().map(|s| s.to_string()).collect();
        want.sort();
        if oracle_strings(h, w) != want {
            bad.push(format!("oracle on {w}"));
        }
        if parser_strings(h, w) != want {
            bad.push(format!("parser on {w}"));
        }
    }
    let took = start.elapsed();
    Verdict {
        id: 1,
        title: "worked-example fidelity",
        ok: bad.is_empty() && took < WORKED_EXAMPLE_BUDGET,
        detail: format!(
            "3 cases x 2 routes, mismatches [{}], {} ms (limit {} ms)",
            bad.join(", "),
            took.as_millis(),
            WORKED_EXAMPLE_BUDGET.as_millis()
        ),
    }
}

fn acceptance_corpus() -> Vec<Expr> {
    let mut r = rng(CORPUS_SEED);
    let shape = rte::corpus::Shape::default();
    let mut out = Vec::new();
    while out.len() < CORPUS_SIZE {
        let h = rte::corpus::random_rte(&mut r, &shape, 3);
        if h.size() <= CORPUS_MAX_SIZE && h.depth() <= CORPUS_MAX_DEPTH {
            out.push(h);
        }
    }
    out
}

fn combinators(h: &Expr, seen: &mut BTreeSet<&'static str>) {
    let name = match h {
        Expr::Base(..) => "base",
        Expr::Dup(_) => "dup",
        Expr::Rev => "rev",
        Expr::Sum(..) => "sum",
        Expr::Cauchy(..) => "cauchy",
        Expr::CauchyRev(..) => "cauchy_r",
        Expr::Star(_) => "star",
        Expr::StarRev(_) => "star_r",
        Expr::Hadamard(..) => "odot",
        Expr::KStar(..) => "kstar",
        Expr::KStarRev(..) => "kstar_r",
    };
    seen.insert(name);
    match h {
        Expr::Sum(f, g) | Expr::Cauchy(f, g) | Expr::CauchyRev(f, g) | Expr::Hadamard(f, g) => {
            combinators(f, seen);
            combinators(g, seen);
        }
        Expr::Star(f) | Expr::StarRev(f) | Expr::KStar(_, _, f) | Expr::KStarRev(_, _, f) => combinators(f, seen),
        _ => {}
    }
}

#[derive(Default)]
struct CorpusStats {
    expressions: usize,
    build_failures: Vec<String>,
    combinators: BTreeSet<&'static str>,
    words: usize,
    // differential semantics
    parsing_compared: usize,
    parsing_skipped: usize,
    parsing_mismatch: Vec<String>,
    rsem_compared: usize,
    rsem_mismatch: Vec<String>,
    usem_compared: usize,
    usem_mismatch: Vec<String>,
    // reversibility
    reversible: usize,
    shape_errors: Vec<String>,
    runs: usize,
    run_errors: Vec<String>,
    // size bounds
    bound_lines: usize,
    bound_violations: Vec<String>,
    exact_checked: usize,
    exact_violations: Vec<String>,
    kstar_forward_mismatch: Vec<String>,
    hadamard_full_skipped: usize,
    // checker
    checker_explicit: usize,
    checker_product_only: usize,
    checker_compared: usize,
    checker_mismatch: Vec<String>,
    gate_mismatch: Vec<String>,
    ambiguous_words: usize,
    // k-star conditions
    kstar_parsings: usize,
    kstar_failures: Vec<String>,
    seconds: f64,
}

fn push(v: &mut Vec<String>, s: String) {
    if v.len() < 5 {
        v.push(s);
    } else if v.len() == 5 {
        v.push("...".into());
    }
}

fn exact_counts(n: usize, lh: &LabeledExpr, st: &mut CorpusStats) {
    let s = sigma();
    for node in lh.nodes() {
        match &node.node {
            LNode::Base(e, _) => {
                st.exact_checked += 1;
                let got = parser_base(e, node.occ).num_states;
                if got != e.nl() + 3 {
                    push(&mut st.exact_violations, format!("#{n} base parser {got} != nl+3"));
                }
            }
            LNode::Dup(_) | LNode::Rev => {
                st.exact_checked += 1;
                let got = build_evaluator(node, &s).unwrap().num_states();
                if got != 5 {
                    push(&mut st.exact_violations, format!("#{n} dup/rev evaluator {got} != 5"));
                }
            }
            LNode::Hadamard(f, g) => {
                let (tf, tg) = (build_parser(f, &s).unwrap(), build_parser(g, &s).unwrap());
                if 2 * tf.nominal_states * tg.nominal_states + 2 > HADAMARD_FULL_CAP {
                    st.hadamard_full_skipped += 1;
                    continue;
                }
                st.exact_checked += 1;
                let pf = build_parser_with(f, &s, BuildMode::Full).unwrap().num_states;
                let pg = build_parser_with(g, &s, BuildMode::Full).unwrap().num_states;
                let ph = build_parser_with(node, &s, BuildMode::Full).unwrap().num_states;
                if ph != 2 * pf * pg + 2 {
                    push(&mut st.exact_violations, format!("#{n} odot parser {ph} != 2*{pf}*{pg}+2"));
                }
            }
            LNode::KStar(k, _, f) | LNode::KStarRev(k, _, f) => {
                st.exact_checked += 1;
                let tf = build_evaluator(f, &s).unwrap().num_states();
                let th = build_evaluator(node, &s).unwrap().num_states();
                let k = *k as usize;
                let want = k * tf + 3 * k + 8;
                if th != want {
                    let msg = format!("#{n} k={k} |Tf|={tf}: {th} != {want}");
                    if matches!(node.node, LNode::KStar(..)) && th == k * tf + 2 * k + 8 {
                        push(&mut st.kstar_forward_mismatch, msg);
                    } else {
                        push(&mut st.exact_violations, msg);
                    }
                }
            }
            _ => {}
        }
    }
}

fn corpus_pass() -> CorpusStats {
    let start = Instant::now();
    let mut st = CorpusStats::default();
    let words = words_up_to(WORD_LEN);
    for (n, h) in acceptance_corpus().into_iter().enumerate() {
        st.expressions += 1;
        combinators(&h, &mut st.combinators);
        let lh = label_occurrences(&h);
        let p = match Pipeline::build(&lh, &sigma()) {
            Ok(p) => p,
            Err(e) => {
                push(&mut st.build_failures, format!("#{n} {h}: {e}"));
                continue;
            }
        };
        if p.evaluator.is_reversible() {
            st.reversible += 1;
        }
        if let Err(e) = check_evaluator_shape(&p.evaluator, lh.occ) {
            push(&mut st.shape_errors, format!("#{n}: {e}"));
        }
        for line in check_size_bounds(&p) {
            if line.kind != BoundKind::Reference {
                st.bound_lines += 1;
                if !line.holds() {
                    push(&mut st.bound_violations, format!("#{n} {line}"));
                }
            }
        }
        exact_counts(n, &lh, &mut st);
        match &p.checker {
            Some(_) => st.checker_explicit += 1,
            None => st.checker_product_only += 1,
        }
        let uses_kstar = h.uses_kstar();
        for w in &words {
            st.words += 1;
            let oracle = oracle_parsings(&lh, w, OracleBound::default());
            let parsed = enumerate_outputs_with(&p.parser, &letters_of(w), LIMITS);
            if oracle.truncated || parsed.truncated {
                st.parsing_skipped += 1;
            } else {
                st.parsing_compared += 1;
                if oracle.items != parsed.items {
                    push(&mut st.parsing_mismatch, format!("#{n} {h} on {w:?}"));
                }
            }
            if uses_kstar {
                for x in parsed.items.iter().chain(&oracle.items) {
                    st.kstar_parsings += 1;
                    if let Err(e) = check_kstar_conditions(&lh, x) {
                        push(&mut st.kstar_failures, format!("#{n} {}: {e}", render_word(x)));
                    }
                }
            }
            let mut outs = BTreeSet::new();
            for x in &parsed.items {
                st.runs += 1;
                let (out, trace) = run_two_way_traced(&p.evaluator, x, default_budget(&p.evaluator, x));
                match out {
                    RunOutcome::Accept(v) => {
                        if trace.first().unwrap().pos != 0 || trace.last().unwrap().pos != x.len() {
                            push(&mut st.run_errors, format!("#{n} run on {} not end to end", render_word(x)));
                        }
                        outs.insert(v);
                    }
                    other => push(&mut st.run_errors, format!("#{n} {other:?} on {}", render_word(x))),
                }
            }
            let want = oracle_rsem(&lh, w, OracleBound::default());
            if !want.truncated && !parsed.truncated {
                st.rsem_compared += 1;
                if outs != want.items {
                    push(&mut st.rsem_mismatch, format!("#{n} {h} on {w:?}"));
                }
            }
            let chars: Vec<char> = w.chars().collect();
            let ambiguous = oracle_dom(&lh, w) && !oracle_udom(&lh, w);
            st.ambiguous_words += usize::from(ambiguous);
            st.checker_compared += 1;
            let accepted = match &p.checker {
                Some(b) => nfa_accepts(b, &chars),
                None => p.product.ambiguous(&chars),
            };
            if accepted != ambiguous {
                push(&mut st.checker_mismatch, format!("#{n} {h} on {w:?}"));
            }
            if p.gate.accepts(&chars) == accepted {
                push(&mut st.gate_mismatch, format!("#{n} {h} on {w:?}"));
            }
            st.usem_compared += 1;
            match p.run(w) {
                Ok(v) if v == oracle_usem(&lh, w) => {}
                Ok(v) => push(&mut st.usem_mismatch, format!("#{n} {h} on {w:?}: got {v:?}")),
                Err(e) => push(&mut st.usem_mismatch, format!("#{n} {h} on {w:?}: {e}")),
            }
        }
    }
    st.seconds = start.elapsed().as_secs_f64();
    st
}

fn list(v: &[String]) -> String {
    if v.is_empty() {
        String::new()
    } else {
        format!(" [{}]", v.join("; "))
    }
}

fn differential(st: &CorpusStats) -> Verdict {
    let all = ["base", "dup", "rev", "sum", "cauchy", "cauchy_r", "star", "star_r", "odot", "kstar", "kstar_r"];
    let missing: Vec<&str> = all.iter().copied().filter(|c| !st.combinators.contains(c)).collect();
    let ok = st.expressions >= CORPUS_SIZE
        && missing.is_empty()
        && st.build_failures.is_empty()
        && st.parsing_mismatch.is_empty()
        && st.rsem_mismatch.is_empty()
        && st.usem_mismatch.is_empty();
    Verdict {
        id: 2,
        title: "differential semantics",
        ok,
        detail: format!(
            "{} expressions (depth <= {CORPUS_MAX_DEPTH}, |h| <= {CORPUS_MAX_SIZE}, missing combinators {missing:?}), \
             words <= {WORD_LEN}; parsings {} compared / {} truncated, {} mismatches{}; \
             rsem {} compared, {} mismatches{}; usem {} compared, {} mismatches{}; build failures {}{}; {:.1} s",
            st.expressions,
            st.parsing_compared,
            st.parsing_skipped,
            st.parsing_mismatch.len(),
            list(&st.parsing_mismatch),
            st.rsem_compared,
            st.rsem_mismatch.len(),
            list(&st.rsem_mismatch),
            st.usem_compared,
            st.usem_mismatch.len(),
            list(&st.usem_mismatch),
            st.build_failures.len(),
            list(&st.build_failures),
            st.seconds
        ),
    }
}

fn reversibility(st: &CorpusStats) -> Verdict {
    let built = st.expressions - st.build_failures.len();
    Verdict {
        id: 3,
        title: "reversibility",
        ok: st.reversible == built && st.shape_errors.is_empty() && st.run_errors.is_empty() && built > 0,
        detail: format!(
            "{}/{} evaluators reversible; {} accepting runs, {} not end to end or not accepting{}; shape errors {}{}",
            st.reversible,
            built,
            st.runs,
            st.run_errors.len(),
            list(&st.run_errors),
            st.shape_errors.len(),
            list(&st.shape_errors)
        ),
    }
}

fn size_bounds(st: &CorpusStats) -> (Verdict, usize) {
    let hard = st.bound_violations.len() + st.exact_violations.len();
    let verdict = Verdict {
        id: 4,
        title: "size bounds",
        ok: hard == 0 && st.kstar_forward_mismatch.is_empty(),
        detail: format!(
            "{} bound lines, {} violations{}; {} exact per-node counts, {} violations{}; \
             forward k-star evaluator k|Tf|+3k+8 mismatches {} (construction yields k|Tf|+2k+8){}; \
             {} odot nodes too large for a full build",
            st.bound_lines,
            st.bound_violations.len(),
            list(&st.bound_violations),
            st.exact_checked,
            st.exact_violations.len(),
            list(&st.exact_violations),
            st.kstar_forward_mismatch.len(),
            list(&st.kstar_forward_mismatch),
            st.hadamard_full_skipped
        ),
    };
    (verdict, hard)
}

fn intro_cauchy() -> (bool, String) {
    let f = "((a->\"c\") + (aa->\"cc\"))";
    let g = "((a->\"d\") + (aa->\"dd\"))";
    let h = "((b->\"e\") + (ab->\"ee\"))";
    let gamma: rte::expr::Alphabet = ['c', 'd', 'e'].into();
    let left = label_occurrences(&parse_rte(&format!("({f}.{g}).{h}"), &sigma(), &gamma).unwrap());
    let right = label_occurrences(&parse_rte(&format!("{f}.({g}.{h})"), &sigma(), &gamma).unwrap());
    let mut ok = true;
    for lh in [&left, &right] {
        let p = Pipeline::build(lh, &sigma()).unwrap();
        let b = p.checker.as_ref().expect("small checker");
        ok &= nfa_accepts(b, &['a', 'a', 'a', 'b']);
        ok &= !p.gate.accepts(&['a', 'a', 'a', 'b']);
        ok &= oracle_dom(lh, "aaab") && !oracle_udom(lh, "aaab");
        ok &= p.run("aaab").unwrap().is_none();
    }
    (ok, format!("intro Cauchy \"aaab\" accepted by B for both bracketings: {ok}"))
}

fn checker(st: &CorpusStats) -> Verdict {
    let (intro_ok, intro) = intro_cauchy();
    Verdict {
        id: 5,
        title: "functionality checker",
        ok: intro_ok && st.checker_mismatch.is_empty() && st.gate_mismatch.is_empty() && st.checker_compared > 0,
        detail: format!(
            "{} words ({} ambiguous); B explicit for {} expressions, ε-product form for {} whose B exceeds the \
             transition cap; L(B) vs dom\\udom mismatches {}{}; B' not the complement {}{}; {intro}",
            st.checker_compared,
            st.ambiguous_words,
            st.checker_explicit,
            st.checker_product_only,
            st.checker_mismatch.len(),
            list(&st.checker_mismatch),
            st.gate_mismatch.len(),
            list(&st.gate_mismatch)
        ),
    }
}

fn scaling() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut sizes = Vec::new();
    let mut r = rng(SEED ^ 0xc0de);
    for n in CN_RANGE {
        let sigma = c_n_alphabet(n);
        let letters: Vec<char> = sigma.iter().copied().collect();
        let lh = label_occurrences(&c_n(n));
        let p = Pipeline::build(&lh, &sigma).unwrap();
        let u = u_word(n);
        if u.len() != 1 << n {
            bad.push(format!("n={n}: |u_n| = {}", u.len()));
        }
        let dom = rte::machines::minimize(&rte::machines::determinize(&p.parser.domain_nfa())).unwrap();
        sizes.push(format!("{n}:{}", dom.num_states()));
        if dom.num_states() < 1 << n {
            bad.push(format!("n={n}: minimal domain automaton has {} states", dom.num_states()));
        }
        let uc: Vec<char> = u.chars().collect();
        let mut samples: Vec<Vec<char>> = vec![uc.clone(), Vec::new()];
        for _ in 0..CN_SAMPLES {
            let mut w = uc.clone();
            match r.gen_range(0..4) {
                0 => w[r.gen_range(0..uc.len())] = letters[r.gen_range(0..letters.len())],
                1 => {
                    w.remove(r.gen_range(0..uc.len()));
                }
                2 => w.insert(r.gen_range(0..=uc.len()), letters[r.gen_range(0..letters.len())]),
                _ => w = (0..r.gen_range(0..2 * uc.len())).map(|_| letters[r.gen_range(0..letters.len())]).collect(),
            }
            samples.push(w);
        }
        for w in samples {
            let s: String = w.iter().collect();
            let defined = p.gate.accepts(&w) && p.run(&s).unwrap().is_some();
            if defined != (s == u) {
                bad.push(format!("n={n}: {s} defined={defined}"));
                break;
            }
        }
        if n <= 4 && !(oracle_dom(&lh, &u) && oracle_udom(&lh, &u)) {
            bad.push(format!("n={n}: oracle rejects u_n"));
        }
    }
    let took = start.elapsed();
    Verdict {
        id: 6,
        title: "exponential domain family",
        ok: bad.is_empty() && took < CN_BUDGET,
        detail: format!(
            "n = {}..={}, minimal domain DFA sizes [{}], {} samples each, problems {}{}; {:.1} s (limit {} s)",
            CN_RANGE.start(),
            CN_RANGE.end(),
            sizes.join(" "),
            CN_SAMPLES + 2,
            bad.len(),
            list(&bad),
            took.as_secs_f64(),
            CN_BUDGET.as_secs()
        ),
    }
}

fn laws() -> Verdict {
    let mut bad = Vec::new();
    let words = words_up_to(WORD_LEN);
    let small: Vec<Expr> = acceptance_corpus().into_iter().filter(|h| h.size() <= ASSOC_MAX_SIZE).collect();
    let mut compared = 0;
    let mut triples = 0;
    for t in small.windows(3).step_by(3).take(ASSOC_TRIPLES) {
        let (f, g, h) = (t[0].clone(), t[1].clone(), t[2].clone());
        let left = label_occurrences(&Expr::cauchy(Expr::cauchy(f.clone(), g.clone()), h.clone()));
        let right = label_occurrences(&Expr::cauchy(f, Expr::cauchy(g, h)));
        let (Ok(pl), Ok(pr)) = (Pipeline::build(&left, &sigma()), Pipeline::build(&right, &sigma())) else {
            push(&mut bad, format!("build failed for {}", left.expr()));
            continue;
        };
        triples += 1;
        for w in &words {
            compared += 1;
            let l = pl.run(w).ok();
            let r = pr.run(w).ok();
            let ol = oracle_usem(&left, w);
            let or = oracle_usem(&right, w);
            if l != r || ol != or || l != Some(ol.clone()) {
                push(&mut bad, format!("{} on {w:?}", left.expr()));
            }
        }
    }
    let dup = Pipeline::build(&rte_text("dup{#}"), &sigma()).unwrap();
    let rev = Pipeline::build(&rte_text("rev"), &sigma()).unwrap();
    for w in &words {
        if dup.run(w).unwrap() != Some(format!("{w}#{w}")) {
            push(&mut bad, format!("dup on {w:?}"));
        }
        if rev.run(w).unwrap() != Some(w.chars().rev().collect()) {
            push(&mut bad, format!("rev on {w:?}"));
        }
    }
    Verdict {
        id: 7,
        title: "unambiguous-semantics laws",
        ok: bad.is_empty() && triples >= ASSOC_TRIPLES / 2,
        detail: format!(
            "associativity on {triples} corpus triples x {} words ({compared} comparisons); dup and rev on {} words; \
             problems {}{}",
            words.len(),
            words.len(),
            bad.len(),
            list(&bad)
        ),
    }
}

fn kstar_conditions(st: &CorpusStats) -> Verdict {
    let mut bad = Vec::new();
    let cases = [
        ("kstar{3, a}(a->\"c\")", "aa", "(2 a #2 a )2"),
        ("kstar{3, a}(a->\"c\")", "a", "(2 a )2"),
        ("kstar{3, a}(a->\"c\")", "", "(2 )2"),
        ("kstar_r{3, a+b}(dup{#})", "ab", "(2 a #2 b )2"),
        ("kstar{4, ab}(rev)", "ababab", "(2 a b #2 a b #2 a b )2"),
    ];
    for (text, w, want) in cases {
        let lh = rte_text(text);
        let got = parser_strings(&lh, w);
        if got != [want.to_string()] || oracle_strings(&lh, w) != got {
            bad.push(format!("{text} on {w:?}: {got:?}"));
        }
    }
    Verdict {
        id: 8,
        title: "k-star conditions",
        ok: bad.is_empty() && st.kstar_failures.is_empty() && st.kstar_parsings > 0,
        detail: format!(
            "{} corpus k-star parsings checked, {} failures{}; short-word form on {} cases, problems {}{}",
            st.kstar_parsings,
            st.kstar_failures.len(),
            list(&st.kstar_failures),
            cases.len(),
            bad.len(),
            list(&bad)
        ),
    }
}

fn functional_domain() -> Verdict {
    let h = label_occurrences(
        &parse_rte("((a->\"c\") + (b->\"\"))* + ((a->\"\") + (b->\"c\"))*", &sigma(), &gamma_all()).unwrap(),
    );
    let mut bad = Vec::new();
    let mut fdom = 0;
    let mut udom = 0;
    let words = words_up_to(FDOM_LEN);
    for w in &words {
        let rsem = oracle_rsem(&h, w, OracleBound::default());
        let functional = !rsem.truncated && rsem.items.len() == 1;
        let balanced = w.matches('a').count() == w.matches('b').count();
        fdom += usize::from(functional);
        udom += usize::from(oracle_udom(&h, w));
        if functional != balanced {
            push(&mut bad, format!("{w:?}"));
        }
    }
    Verdict {
        id: 9,
        title: "non-regular functional domain",
        ok: bad.is_empty() && udom == 0,
        detail: format!(
            "{} words <= {FDOM_LEN}: {fdom} functional, all and only the balanced ones (exceptions {}{}); \
             unambiguous domain has {udom} of them",
            words.len(),
            bad.len(),
            list(&bad)
        ),
    }
}

fn main() -> ExitCode {
    let report = |v: Verdict| {
        println!("{}", v.line());
        v
    };
    let mut verdicts = vec![report(worked_examples())];
    let st = corpus_pass();
    verdicts.push(report(differential(&st)));
    verdicts.push(report(reversibility(&st)));
    let (sizes, hard_size) = size_bounds(&st);
    verdicts.push(report(sizes));
    verdicts.push(report(checker(&st)));
    verdicts.push(report(scaling()));
    verdicts.push(report(laws()));
    verdicts.push(report(kstar_conditions(&st)));
    verdicts.push(report(functional_domain()));
    let unexpected: Vec<u32> = verdicts.iter().filter(|v| !v.ok && !KNOWN_RED.contains(&v.id)).map(|v| v.id).collect();
    let green = verdicts.iter().filter(|v| v.ok).count();
    println!("{green}/{} criteria green; known red {KNOWN_RED:?}", verdicts.len());
    if !unexpected.is_empty() || hard_size != 0 {
        eprintln!("unexpected red criteria {unexpected:?}, hard size violations {hard_size}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
