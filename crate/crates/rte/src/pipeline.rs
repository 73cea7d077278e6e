// SPDX-License-Identifier: Apache-2.0
//! Unambiguous evaluation: the functionality checker `B`, its complement
//! `B′`, a uniformized parser, and staged execution of the evaluator on the
//! single selected parsing.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::evaluator_build::build_evaluator;
use crate::expr::{Alphabet, Expr, LabeledExpr, Regex};
use crate::machines::{
    complement_dfa, default_budget, determinize_capped, letters_of, run_two_way, Dfa, OneWayTransducer, ParsedWord,
    RunOutcome, StateId, Sym, TwoWayTransducer,
};
use crate::parser_build::{build_parser, BuildError};
use crate::regex::{nfa_accepts, Nfa};

/// Target pairs of one macro-step from `(p, q)` on a letter.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MacroStep {
    /// Pairs reached by two runs whose bracket outputs before the letter agree.
    pub same: BTreeSet<(StateId, StateId)>,
    /// Pairs reached by two runs whose bracket outputs before the letter differ.
    pub diff: BTreeSet<(StateId, StateId)>,
}

/// End-of-word flags for a pair `(p, q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EndFlags {
    /// Both states reach the final state on ε-moves.
    pub both: bool,
    /// They do so with different outputs.
    pub diff: bool,
}

/// Macro-step table of a parser, filled lazily by saturation over state pairs.
pub struct MacroStepTable {
    finals: Vec<bool>,
    eps: Vec<Vec<(Sym, StateId)>>,
    reads: Vec<Vec<(char, StateId)>>,
    closure: Vec<Vec<StateId>>,
    reaches_final: Vec<bool>,
}

impl MacroStepTable {
    pub fn new(t: &OneWayTransducer) -> Self {
        let n = t.num_states;
        let mut eps = vec![Vec::new(); n];
        let mut reads = vec![Vec::new(); n];
        for tr in &t.transitions {
            match tr.input {
                None => eps[tr.from].push((tr.output.first().copied().unwrap_or(Sym::LeftEnd), tr.to)),
                Some(s) => {
                    if let Some(a) = s.letter() {
                        reads[tr.from].push((a, tr.to));
                    }
                }
            }
        }
        let closure: Vec<Vec<StateId>> = (0..n)
            .map(|q| {
                let mut seen = vec![false; n];
                seen[q] = true;
                let mut stack = vec![q];
                let mut all = vec![q];
                while let Some(p) = stack.pop() {
                    for &(_, r) in &eps[p] {
                        if !seen[r] {
                            seen[r] = true;
                            stack.push(r);
                            all.push(r);
                        }
                    }
                }
                all
            })
            .collect();
        let finals: Vec<bool> = (0..n).map(|q| t.finals.contains(&q)).collect();
        let reaches_final = closure.iter().map(|c| c.iter().any(|&r| finals[r])).collect();
        MacroStepTable { finals, eps, reads, closure, reaches_final }
    }

    /// Pairs reachable from `(p, q)` by ε-moves emitting the same symbols.
    pub fn same_phase(&self, p: StateId, q: StateId) -> Vec<(StateId, StateId)> {
        let mut seen: BTreeSet<(StateId, StateId)> = [(p, q)].into();
        let mut queue = VecDeque::from([(p, q)]);
        while let Some((x, y)) = queue.pop_front() {
            for &(s, x1) in &self.eps[x] {
                for &(t, y1) in &self.eps[y] {
                    if s == t && seen.insert((x1, y1)) {
                        queue.push_back((x1, y1));
                    }
                }
            }
        }
        seen.into_iter().collect()
    }

    fn read(&self, r: StateId, a: char) -> impl Iterator<Item = StateId> + '_ {
        self.reads[r].iter().filter(move |e| e.0 == a).map(|e| e.1)
    }

    /// States reached from `r` by ε-moves followed by reading `a`.
    fn after(&self, r: StateId, a: char) -> BTreeSet<StateId> {
        self.closure[r].iter().flat_map(|&x| self.read(x, a)).collect()
    }

    pub fn step(&self, p: StateId, q: StateId, a: char) -> MacroStep {
        self.step_from(&self.same_phase(p, q), a)
    }

    /// [`Self::step`] given the precomputed [`Self::same_phase`] of the pair.
    pub fn step_from(&self, phase: &[(StateId, StateId)], a: char) -> MacroStep {
        let mut m = MacroStep::default();
        for &(x, y) in phase {
            let sx: Vec<_> = self.read(x, a).collect();
            let sy: Vec<_> = self.read(y, a).collect();
            for &x1 in &sx {
                for &y1 in &sy {
                    m.same.insert((x1, y1));
                }
            }
            for &(s, x1) in &self.eps[x] {
                let ax = self.after(x1, a);
                for &y1 in &sy {
                    m.diff.extend(ax.iter().map(|&u| (u, y1)));
                }
                for &(t, y1) in &self.eps[y] {
                    if s != t {
                        let ay = self.after(y1, a);
                        for &u in &ax {
                            m.diff.extend(ay.iter().map(|&v| (u, v)));
                        }
                    }
                }
            }
            for &(_, y1) in &self.eps[y] {
                let ay = self.after(y1, a);
                for &x1 in &sx {
                    m.diff.extend(ay.iter().map(|&v| (x1, v)));
                }
            }
        }
        m
    }

    /// Targets once the outputs have already diverged.
    pub fn step_free(&self, p: StateId, q: StateId, a: char) -> Vec<(StateId, StateId)> {
        let ap = self.after(p, a);
        let aq = self.after(q, a);
        ap.iter().flat_map(|&u| aq.iter().map(move |&v| (u, v))).collect()
    }

    pub fn end(&self, p: StateId, q: StateId) -> EndFlags {
        self.end_from(p, q, &self.same_phase(p, q))
    }

    pub fn end_from(&self, p: StateId, q: StateId, phase: &[(StateId, StateId)]) -> EndFlags {
        let both = self.reaches_final[p] && self.reaches_final[q];
        let mut diff = false;
        if both {
            for &(x, y) in phase {
                let rf = &self.reaches_final;
                let ex = || self.eps[x].iter().filter(|e| rf[e.1]);
                let ey = || self.eps[y].iter().filter(|e| rf[e.1]);
                if (self.finals[x] && ey().next().is_some())
                    || (self.finals[y] && ex().next().is_some())
                    || ex().any(|s| ey().any(|t| s.0 != t.0))
                {
                    diff = true;
                    break;
                }
            }
        }
        EndFlags { both, diff }
    }
}

fn encode(n: usize, p: StateId, q: StateId, diverged: bool) -> usize {
    (p * n + q) * 2 + usize::from(diverged)
}

/// Decodes a checker state into `(p, q, ν)`.
pub fn decode(n: usize, id: usize) -> (StateId, StateId, bool) {
    let pair = id / 2;
    (pair / n, pair % n, id % 2 == 1)
}

/// Builds `B` over `sigma`: it accepts exactly the words with at least two
/// parsings. States are triples `(p, q, ν)` numbered by [`decode`]; only
/// triples reachable from `(qI, qI, 0)` carry transitions.
pub fn build_functionality_checker(ph: &OneWayTransducer, sigma: &Alphabet) -> Nfa {
    build_functionality_checker_capped(ph, sigma, usize::MAX).expect("uncapped")
}

/// Like [`build_functionality_checker`], giving up past `max_transitions`.
pub fn build_functionality_checker_capped(
    ph: &OneWayTransducer,
    sigma: &Alphabet,
    max_transitions: usize,
) -> Option<Nfa> {
    let n = ph.num_states;
    let table = MacroStepTable::new(ph);
    let start = encode(n, ph.initial, ph.initial, false);
    let mut seen = vec![false; 2 * n * n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut transitions = Vec::new();
    let mut finals = BTreeSet::new();
    while let Some(from) = queue.pop_front() {
        let (p, q, nu) = decode(n, from);
        let phase = if nu { Vec::new() } else { table.same_phase(p, q) };
        let end = table.end_from(p, q, &phase);
        if (nu && end.both) || (!nu && end.diff) {
            finals.insert(from);
        }
        for &a in sigma {
            let mut targets = Vec::new();
            if nu {
                targets.extend(table.step_free(p, q, a).into_iter().map(|(u, v)| encode(n, u, v, true)));
            } else {
                let m = table.step_from(&phase, a);
                targets.extend(m.same.into_iter().map(|(u, v)| encode(n, u, v, false)));
                targets.extend(m.diff.into_iter().map(|(u, v)| encode(n, u, v, true)));
            }
            if transitions.len() + targets.len() > max_transitions {
                return None;
            }
            for to in targets {
                transitions.push((from, a, to));
                if !seen[to] {
                    seen[to] = true;
                    queue.push_back(to);
                }
            }
        }
    }
    Some(Nfa { num_states: 2 * n * n, alphabet: sigma.clone(), initial: start, finals, transitions })
}

/// Renumbers the states that occur in transitions, keeping the language.
fn compact(b: &Nfa) -> Nfa {
    let mut ids: HashMap<usize, usize> = HashMap::from([(b.initial, 0)]);
    let mut id = |q: usize| {
        let next = ids.len();
        *ids.entry(q).or_insert(next)
    };
    let transitions: Vec<_> = b.transitions.iter().map(|&(p, a, q)| (id(p), a, id(q))).collect();
    let finals = b.finals.iter().filter(|f| ids.contains_key(f)).map(|f| ids[f]).collect();
    Nfa { num_states: ids.len(), alphabet: b.alphabet.clone(), initial: 0, finals, transitions }
}

/// `B′`: the complement of `L(B)` as a complete automaton over `B`'s alphabet.
pub fn build_unambiguity_acceptor(b: &Nfa) -> Dfa {
    let d = determinize_capped(&compact(b), usize::MAX).expect("uncapped");
    complement_dfa(&d).expect("subset construction is complete")
}

/// The checker with ε-moves kept: states `(p, q, m)` where `m` is 0 while
/// both runs have emitted the same brackets, 1 once they differ, and 2 or 3
/// when they differ because the first or second run has already ended its
/// bracket block and must read the next letter. It accepts the same words as
/// `B` and is simulated on demand, restricted to co-reachable parser states.
#[derive(Clone, Debug)]
pub struct ProductChecker {
    finals: Vec<bool>,
    eps: Vec<Vec<(Sym, StateId)>>,
    reads: Vec<Vec<(Sym, StateId)>>,
    uniform: UniformParser,
}

type Config3 = (StateId, StateId, u8);

impl ProductChecker {
    pub fn new(ph: &OneWayTransducer) -> Self {
        let n = ph.num_states;
        let mut eps = vec![Vec::new(); n];
        let mut reads = vec![Vec::new(); n];
        for tr in &ph.transitions {
            match tr.input {
                None => eps[tr.from].push((tr.output.first().copied().unwrap_or(Sym::LeftEnd), tr.to)),
                Some(s) => reads[tr.from].push((s, tr.to)),
            }
        }
        let finals = (0..n).map(|q| ph.finals.contains(&q)).collect();
        ProductChecker { finals, eps, reads, uniform: uniformize_parser(ph) }
    }

    fn closure(&self, set: &mut HashSet<Config3>, live: &[Option<u32>]) {
        let ok = |q: StateId| live[q].is_some();
        let mut stack: Vec<Config3> = set.iter().copied().collect();
        while let Some((x, y, m)) = stack.pop() {
            let mut push = |c: Config3, set: &mut HashSet<Config3>| {
                if ok(c.0) && ok(c.1) && set.insert(c) {
                    stack.push(c);
                }
            };
            match m {
                0 => {
                    for &(s, x1) in &self.eps[x] {
                        for &(t, y1) in &self.eps[y] {
                            push((x1, y1, u8::from(s != t)), set);
                        }
                        push((x1, y, 3), set);
                    }
                    for &(_, y1) in &self.eps[y] {
                        push((x, y1, 2), set);
                    }
                }
                1 => {
                    for &(_, x1) in &self.eps[x] {
                        push((x1, y, 1), set);
                    }
                    for &(_, y1) in &self.eps[y] {
                        push((x, y1, 1), set);
                    }
                }
                2 => {
                    for &(_, y1) in &self.eps[y] {
                        push((x, y1, 2), set);
                    }
                }
                _ => {
                    for &(_, x1) in &self.eps[x] {
                        push((x1, y, 3), set);
                    }
                }
            }
        }
    }

    /// True when `w` has at least two parsings.
    pub fn ambiguous(&self, w: &[char]) -> bool {
        let syms: Vec<Sym> = w.iter().map(|&c| Sym::Letter(c)).collect();
        let live = self.uniform.annotate(&syms);
        let q0 = self.uniform.parser.initial;
        if live[0][q0].is_none() {
            return false;
        }
        let mut current: HashSet<Config3> = [(q0, q0, 0)].into();
        for (i, &a) in syms.iter().enumerate() {
            self.closure(&mut current, &live[i]);
            let mut next = HashSet::new();
            for &(x, y, m) in &current {
                for &(s, x1) in &self.reads[x] {
                    if s != a || live[i + 1][x1].is_none() {
                        continue;
                    }
                    for &(t, y1) in &self.reads[y] {
                        if t == a && live[i + 1][y1].is_some() {
                            next.insert((x1, y1, u8::from(m != 0)));
                        }
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            current = next;
        }
        self.closure(&mut current, &live[syms.len()]);
        current.iter().any(|&(x, y, m)| m != 0 && self.finals[x] && self.finals[y])
    }
}

/// Ceiling on the transitions of an explicit `B` inside a pipeline.
pub const CHECKER_CAP: usize = 4_000_000;

/// Ceiling on the explicit `B′`.
pub const GATE_CAP: usize = 20_000;

/// `B′` as used by a pipeline: an explicit automaton when the subset
/// construction stays small, otherwise subset simulation of `B`, otherwise
/// simulation of the ε-product form.
#[derive(Clone, Debug)]
pub enum Gate {
    Dfa(Dfa),
    Subsets(Nfa),
    Product(ProductChecker),
}

impl Gate {
    pub fn build(b: Option<&Nfa>, product: &ProductChecker) -> Gate {
        let Some(b) = b else { return Gate::Product(product.clone()) };
        let b = compact(b);
        match determinize_capped(&b, GATE_CAP) {
            Some(d) => Gate::Dfa(complement_dfa(&d).expect("subset construction is complete")),
            None => Gate::Subsets(b),
        }
    }

    /// True when `w` has at most one parsing.
    pub fn accepts(&self, w: &[char]) -> bool {
        match self {
            Gate::Dfa(d) => d.accepts(w),
            Gate::Subsets(b) => !nfa_accepts(b, w),
            Gate::Product(p) => !p.ambiguous(w),
        }
    }
}

/// Deterministic selection of one parsing per input word.
///
/// The backward pass labels every configuration `(i, q)` with its distance
/// to acceptance; finite distance is exactly co-reachability. The forward
/// pass then follows, from each configuration, the move to the least
/// co-reachable successor state one step closer to acceptance, which rules
/// out ε-cycles.
#[derive(Clone, Debug)]
pub struct UniformParser {
    parser: OneWayTransducer,
    outgoing: Vec<Vec<usize>>,
    incoming: Vec<Vec<usize>>,
}

pub fn uniformize_parser(ph: &OneWayTransducer) -> UniformParser {
    let mut outgoing = ph.out_index();
    for v in &mut outgoing {
        v.sort_by_key(|&t| (ph.transitions[t].to, t));
    }
    UniformParser { parser: ph.clone(), outgoing, incoming: ph.in_index() }
}

impl UniformParser {
    /// `dist[i][q]`: the length of the shortest accepting run from state `q`
    /// at position `i`, if any.
    pub fn annotate(&self, w: &[Sym]) -> Vec<Vec<Option<u32>>> {
        let t = &self.parser;
        let mut dist = vec![vec![None; t.num_states]; w.len() + 1];
        let mut queue = VecDeque::new();
        for &f in &t.finals {
            dist[w.len()][f] = Some(0);
            queue.push_back((w.len(), f));
        }
        while let Some((i, q)) = queue.pop_front() {
            let d = dist[i][q].unwrap();
            for &ti in &self.incoming[q] {
                let tr = &t.transitions[ti];
                let at = match tr.input {
                    None => i,
                    Some(s) if i > 0 && w[i - 1] == s => i - 1,
                    Some(_) => continue,
                };
                if dist[at][tr.from].is_none() {
                    dist[at][tr.from] = Some(d + 1);
                    queue.push_back((at, tr.from));
                }
            }
        }
        dist
    }

    /// Co-reachable state sets per position.
    pub fn coreachable(&self, w: &[Sym]) -> Vec<BTreeSet<StateId>> {
        self.annotate(w)
            .into_iter()
            .map(|row| row.iter().enumerate().filter(|(_, d)| d.is_some()).map(|(q, _)| q).collect())
            .collect()
    }

    pub fn parse_syms(&self, w: &[Sym]) -> Option<ParsedWord> {
        let t = &self.parser;
        let dist = self.annotate(w);
        let (mut i, mut q) = (0, t.initial);
        let mut d = dist[0][q]?;
        let mut out = Vec::new();
        while d > 0 {
            let (ti, at) = self.outgoing[q]
                .iter()
                .find_map(|&ti| {
                    let tr = &t.transitions[ti];
                    let at = match tr.input {
                        None => i,
                        Some(s) if i < w.len() && w[i] == s => i + 1,
                        Some(_) => return None,
                    };
                    (dist[at][tr.to] == Some(d - 1)).then_some((ti, at))
                })
                .expect("a co-reachable configuration has a successor one step closer");
            out.extend_from_slice(&t.transitions[ti].output);
            i = at;
            q = t.transitions[ti].to;
            d -= 1;
        }
        Some(out)
    }

    pub fn parse(&self, w: &str) -> Option<ParsedWord> {
        self.parse_syms(&letters_of(w))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("evaluator failed on `{word}`: {outcome:?}")]
    Evaluator { word: String, outcome: RunOutcome },
}

/// Stage results of one unambiguous run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub gate_open: bool,
    pub parsing: Option<ParsedWord>,
    pub output: Option<String>,
}

/// All machines for one expression. Immutable once built.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub h: LabeledExpr,
    pub sigma: Alphabet,
    pub parser: OneWayTransducer,
    pub evaluator: TwoWayTransducer,
    /// `B`, when it fits under [`CHECKER_CAP`] transitions.
    pub checker: Option<Nfa>,
    pub product: ProductChecker,
    pub gate: Gate,
    pub uniform: UniformParser,
}

impl Pipeline {
    pub fn build(h: &LabeledExpr, sigma: &Alphabet) -> Result<Pipeline, PipelineError> {
        let parser = build_parser(h, sigma)?;
        let evaluator = build_evaluator(h, sigma)?;
        Ok(Pipeline::from_machines(h, sigma, parser, evaluator))
    }

    /// Assembles a pipeline around given machines, e.g. ones loaded from dumps.
    pub fn from_machines(
        h: &LabeledExpr,
        sigma: &Alphabet,
        parser: OneWayTransducer,
        evaluator: TwoWayTransducer,
    ) -> Pipeline {
        let checker = build_functionality_checker_capped(&parser, sigma, CHECKER_CAP);
        let product = ProductChecker::new(&parser);
        let gate = Gate::build(checker.as_ref(), &product);
        let uniform = uniformize_parser(&parser);
        Pipeline { h: h.clone(), sigma: sigma.clone(), parser, evaluator, checker, product, gate, uniform }
    }

    pub fn trace(&self, w: &str) -> Result<Trace, PipelineError> {
        let chars: Vec<char> = w.chars().collect();
        let gate_open = self.gate.accepts(&chars);
        if !gate_open {
            return Ok(Trace { gate_open, parsing: None, output: None });
        }
        let Some(parsing) = self.uniform.parse(w) else {
            return Ok(Trace { gate_open, parsing: None, output: None });
        };
        match run_two_way(&self.evaluator, &parsing, default_budget(&self.evaluator, &parsing)) {
            RunOutcome::Accept(v) => Ok(Trace { gate_open, parsing: Some(parsing), output: Some(v) }),
            outcome => Err(PipelineError::Evaluator { word: w.to_string(), outcome }),
        }
    }

    /// The output on `w` if `w` has exactly one parsing.
    pub fn run(&self, w: &str) -> Result<Option<String>, PipelineError> {
        Ok(self.trace(w)?.output)
    }
}

/// One-shot convenience: builds the pipeline for `h` and runs it on `w`.
pub fn run_unambiguous(h: &LabeledExpr, sigma: &Alphabet, w: &str) -> Result<Option<String>, PipelineError> {
    Pipeline::build(h, sigma)?.run(w)
}

/// One line of a size report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub actual: u128,
    pub bound: u128,
    /// Exact counts must match; upper bounds must hold; reference lines are informative.
    pub kind: BoundKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Exact,
    Upper,
    Reference,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        match self.kind {
            BoundKind::Exact => self.actual == self.bound,
            BoundKind::Upper => self.actual <= self.bound,
            BoundKind::Reference => true,
        }
    }
}

impl fmt::Display for BoundCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = match self.kind {
            BoundKind::Exact => "==",
            BoundKind::Upper => "<=",
            BoundKind::Reference => "ref",
        };
        let bound = if self.bound == u128::MAX { ">=2^128".to_string() } else { self.bound.to_string() };
        let verdict = match (self.kind, self.holds()) {
            (BoundKind::Reference, _) => "",
            (_, true) => " ok",
            (_, false) => " VIOLATED",
        };
        if self.kind == BoundKind::Reference {
            return write!(f, "{:<28} {:>12} {rel} {bound}", self.name, "-");
        }
        write!(f, "{:<28} {:>12} {rel} {bound}{verdict}", self.name, self.actual)
    }
}

fn pow_sat(base: u128, exp: u32) -> u128 {
    base.saturating_pow(exp)
}

fn mul_sat(a: u128, b: u128) -> u128 {
    a.saturating_mul(b)
}

/// Actual machine sizes against the size bounds for the pipeline's expression.
/// Parser bounds use the untrimmed state count.
pub fn check_size_bounds(p: &Pipeline) -> Vec<BoundCheck> {
    let h = p.h.expr();
    let size = h.size() as u128;
    let width = h.width() as u32;
    let np = p.parser.nominal_states;
    let nt = p.evaluator.num_states() as u128;
    let n = p.parser.num_states as u128;
    let mut report = Vec::new();
    if !h.uses_hadamard_or_kstar() {
        report.push(BoundCheck { name: "parser <= |h|", actual: np, bound: size, kind: BoundKind::Upper });
    }
    report.push(BoundCheck {
        name: "parser <= |h|^w(h)",
        actual: np,
        bound: pow_sat(size, width),
        kind: BoundKind::Upper,
    });
    if !h.uses_kstar() {
        report.push(BoundCheck { name: "evaluator <= 5|h|", actual: nt, bound: 5 * size, kind: BoundKind::Upper });
    }
    report.push(BoundCheck {
        name: "evaluator <= 5|h|w(h)",
        actual: nt,
        bound: 5 * size * width as u128,
        kind: BoundKind::Upper,
    });
    match &p.checker {
        Some(b) => report.push(BoundCheck {
            name: "checker == 2|P|^2",
            actual: b.num_states as u128,
            bound: 2 * n * n,
            kind: BoundKind::Exact,
        }),
        None => report.push(BoundCheck {
            name: "checker (not built)",
            actual: 0,
            bound: 2 * n * n,
            kind: BoundKind::Reference,
        }),
    }
    let n32 = u32::try_from(n).unwrap_or(u32::MAX);
    report.push(BoundCheck {
        name: "reversible uniformizer",
        actual: 0,
        bound: mul_sat(144 * n * n, pow_sat(2, n32.saturating_mul(2))),
        kind: BoundKind::Reference,
    });
    let nb = 2 * n * n;
    report.push(BoundCheck {
        name: "reversible complement of B",
        actual: 0,
        bound: pow_sat(2, u32::try_from(nb + 1).unwrap_or(u32::MAX)).saturating_add(6),
        kind: BoundKind::Reference,
    });
    report
}

fn digits(range: std::ops::Range<u32>) -> Vec<char> {
    range.map(|d| char::from_digit(d, 10).expect("digit")).collect()
}

/// The family `C_n` over letters `1..=n` (2 ≤ n ≤ 9): the Hadamard product
/// of `n` expressions with empty outputs whose common domain is the single
/// word [`u_word`]`(n)`.
pub fn c_n(n: u32) -> Expr {
    assert!((2..=9).contains(&n), "C_n needs 2 <= n <= 9");
    let below = |i: u32| if i == 1 { Regex::Epsilon } else { Regex::star(Regex::any_of(digits(1..i))) };
    let above = |i: u32| Regex::any_of(digits(i + 1..n + 1));
    let letter = |i: u32| Regex::letter(char::from_digit(i, 10).expect("digit"));
    let block = |i: u32| Regex::concat(Regex::concat(below(i), letter(i)), below(i));
    let lang = |i: u32| {
        if i < n {
            Regex::star(Regex::concat(block(i), above(i)))
        } else {
            Regex::concat(block(n), letter(n))
        }
    };
    (2..=n).fold(Expr::base(lang(1), ""), |acc, i| Expr::hadamard(acc, Expr::base(lang(i), "")))
}

/// `u_1 = 1`, `u_i = u_{i-1} i u_{i-1}` and, for the last level,
/// `u_n = u_{n-1} n u_{n-1} n`, of length `2^n`.
pub fn u_word(n: u32) -> String {
    let mut u = String::from("1");
    for i in 2..n {
        let d = char::from_digit(i, 10).expect("digit");
        u = format!("{u}{d}{u}");
    }
    let d = char::from_digit(n, 10).expect("digit");
    format!("{u}{d}{u}{d}")
}

pub fn c_n_alphabet(n: u32) -> Alphabet {
    digits(1..n + 1).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{label_occurrences, parse_rte};
    use crate::machines::{determinize, minimize, render_word};
    use crate::oracle::{oracle_parsings, OracleBound};

    fn ab() -> Alphabet {
        ['a', 'b'].into()
    }

    fn pipeline(text: &str) -> Pipeline {
        let h = label_occurrences(&parse_rte(text, &ab(), &['a', 'b', 'c', 'd', '#'].into()).unwrap());
        Pipeline::build(&h, &ab()).unwrap()
    }

    fn b_accepts(p: &Pipeline, w: &str) -> bool {
        let w: Vec<char> = w.chars().collect();
        let explicit = nfa_accepts(p.checker.as_ref().unwrap(), &w);
        assert_eq!(explicit, p.product.ambiguous(&w));
        explicit
    }

    #[test]
    fn ambiguous_sum() {
        let p = pipeline("(a->\"c\")+(a->\"d\")");
        assert!(b_accepts(&p, "a"));
        assert!(!b_accepts(&p, "b"));
        assert_eq!(p.run("a").unwrap(), None);
        let first = p.uniform.parse("a").unwrap();
        assert_eq!(p.uniform.parse("a").unwrap(), first);
        let all = oracle_parsings(&p.h, "a", OracleBound::default());
        assert!(all.items.contains(&first));
    }

    #[test]
    fn base_star_is_functional() {
        let p = pipeline("a*->\"c\"");
        for n in 0..=6 {
            assert!(!b_accepts(&p, &"a".repeat(n)));
        }
        assert_eq!(p.run("aaa").unwrap().as_deref(), Some("c"));
    }

    #[test]
    fn checker_state_count() {
        let p = pipeline("(a->\"c\").(b->\"d\")");
        let n = p.parser.num_states;
        assert_eq!(p.checker.as_ref().unwrap().num_states, 2 * n * n);
        assert!(check_size_bounds(&p).iter().all(BoundCheck::holds));
    }

    #[test]
    fn dup_and_hadamard() {
        let p = pipeline("dup{#}");
        assert_eq!(p.run("ab").unwrap().as_deref(), Some("ab#ab"));
        let p = pipeline("((a->\"c\").(b->\"d\")) odot dup{#}");
        assert_eq!(p.run("ab").unwrap().as_deref(), Some("cdab#ab"));
    }

    #[test]
    fn outside_domain() {
        let p = pipeline("a->\"c\"");
        assert!(p.gate.accepts(&['b']));
        let t = p.trace("b").unwrap();
        assert!(t.gate_open && t.parsing.is_none() && t.output.is_none());
    }

    #[test]
    fn unique_parsing_selected() {
        let p = pipeline("(a*.b->\"c\")+(a.b*->\"d\")");
        let got = render_word(&p.uniform.parse("aab").unwrap());
        let all = oracle_parsings(&p.h, "aab", OracleBound::default());
        assert_eq!(all.items.len(), 1);
        assert_eq!(got, render_word(all.items.iter().next().unwrap()));
        assert!(p.gate.accepts(&['a', 'a', 'b']));
        assert!(!p.gate.accepts(&['a', 'b']));
    }

    #[test]
    fn c_n_small() {
        assert_eq!(u_word(2), "1212");
        assert_eq!(u_word(3), "12131213");
        for n in 2..=3 {
            let h = label_occurrences(&c_n(n));
            let p = Pipeline::build(&h, &c_n_alphabet(n)).unwrap();
            let u = u_word(n);
            assert_eq!(p.trace(&u).unwrap().output.as_deref(), Some(""));
            let dom = minimize(&determinize(&p.parser.domain_nfa())).unwrap();
            assert!(dom.num_states() >= 1 << n);
        }
    }
}
