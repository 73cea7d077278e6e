// SPDX-License-Identifier: Apache-2.0
//! One-way and two-way machines over tagged symbols: execution,
//! structural predicates, subset construction, complement, minimization,
//! DOT and JSON export.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::expr::{Alphabet, Occ};
use crate::regex::Nfa;

pub type StateId = usize;

/// Largest index a k-star may attach to a parenthesis.
pub const MAX_K: u32 = 15;

/// Symbols of the extended alphabet.
///
/// Indices attached by enclosing k-stars are packed four bits each in
/// `idx`; the index added last (outermost k-star) sits in the low nibble and
/// zero means "no index".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Letter(char),
    Open(Occ, u32),
    Close(Occ, u32),
    Sep(Occ, u32),
    LeftEnd,
    RightEnd,
}

impl Sym {
    pub fn open(occ: Occ) -> Sym {
        Sym::Open(occ, 0)
    }

    pub fn close(occ: Occ) -> Sym {
        Sym::Close(occ, 0)
    }

    pub fn sep(occ: Occ) -> Sym {
        Sym::Sep(occ, 0)
    }

    pub fn is_letter(&self) -> bool {
        matches!(self, Sym::Letter(_))
    }

    pub fn letter(&self) -> Option<char> {
        match self {
            Sym::Letter(a) => Some(*a),
            _ => None,
        }
    }

    pub fn is_paren(&self) -> bool {
        matches!(self, Sym::Open(..) | Sym::Close(..))
    }

    pub fn occ(&self) -> Option<Occ> {
        match self {
            Sym::Open(o, _) | Sym::Close(o, _) | Sym::Sep(o, _) => Some(*o),
            _ => None,
        }
    }

    pub fn index_stack(&self) -> u32 {
        match self {
            Sym::Open(_, i) | Sym::Close(_, i) | Sym::Sep(_, i) => *i,
            _ => 0,
        }
    }

    /// Index added by the nearest enclosing k-star seen so far (0 if none).
    pub fn outer_index(&self) -> u32 {
        self.index_stack() & 0xF
    }

    fn map_index(self, f: impl Fn(u32) -> u32) -> Sym {
        match self {
            Sym::Open(o, i) => Sym::Open(o, f(i)),
            Sym::Close(o, i) => Sym::Close(o, f(i)),
            Sym::Sep(o, i) => Sym::Sep(o, f(i)),
            s => s,
        }
    }

    /// Attaches index `i` (1..=15) as the new outermost index.
    pub fn push_index(self, i: u32) -> Sym {
        debug_assert!((1..=MAX_K).contains(&i));
        self.map_index(|s| (s << 4) | i)
    }

    /// Removes the outermost index.
    pub fn pop_index(self) -> Sym {
        self.map_index(|s| s >> 4)
    }

    /// ASCII token; see [`parse_sym`] for the inverse.
    pub fn ascii(&self) -> String {
        fn suffix(mut idx: u32) -> String {
            let mut parts = Vec::new();
            while idx != 0 {
                parts.push(idx & 0xF);
                idx >>= 4;
            }
            parts.iter().rev().map(|i| format!("^{i}")).collect()
        }
        match self {
            Sym::Letter(a) => a.to_string(),
            Sym::Open(o, i) => format!("({o}{}", suffix(*i)),
            Sym::Close(o, i) => format!("){o}{}", suffix(*i)),
            Sym::Sep(o, i) => format!("#{o}{}", suffix(*i)),
            Sym::LeftEnd => "|-".to_string(),
            Sym::RightEnd => "-|".to_string(),
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.ascii())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymError {
    #[error("empty symbol token")]
    Empty,
    #[error("malformed symbol token '{0}'")]
    Malformed(String),
}

/// Reads one ASCII token: a single letter, `|-`, `-|`, or a bracket/separator
/// `(N`, `)N`, `#N` optionally followed by `^i` groups (innermost first).
pub fn parse_sym(tok: &str) -> Result<Sym, SymError> {
    let mut chars = tok.chars();
    let first = chars.next().ok_or(SymError::Empty)?;
    if chars.as_str().is_empty() {
        return Ok(Sym::Letter(first));
    }
    match tok {
        "|-" => return Ok(Sym::LeftEnd),
        "-|" => return Ok(Sym::RightEnd),
        _ => {}
    }
    let bad = || SymError::Malformed(tok.to_string());
    let mut groups = chars.as_str().split('^');
    let occ: Occ = match groups.next() {
        Some(d) if !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) => d.parse().map_err(|_| bad())?,
        _ => return Err(bad()),
    };
    let mut idx: u32 = 0;
    for (n, g) in groups.enumerate() {
        if n >= 8 || g.is_empty() || !g.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let i: u32 = g.parse().map_err(|_| bad())?;
        if !(1..=MAX_K).contains(&i) {
            return Err(bad());
        }
        idx = (idx << 4) | i;
    }
    match first {
        '(' => Ok(Sym::Open(occ, idx)),
        ')' => Ok(Sym::Close(occ, idx)),
        '#' => Ok(Sym::Sep(occ, idx)),
        _ => Err(bad()),
    }
}

/// A word over the extended alphabet.
pub type ParsedWord = Vec<Sym>;

/// Space-separated ASCII rendering of a parsed word.
pub fn render_word(w: &[Sym]) -> String {
    w.iter().map(Sym::ascii).collect::<Vec<_>>().join(" ")
}

pub fn parse_word(text: &str) -> Result<ParsedWord, SymError> {
    text.split_whitespace().map(parse_sym).collect()
}

pub fn letters_of(w: &str) -> ParsedWord {
    w.chars().map(Sym::Letter).collect()
}

/// Projection of a parsed word onto its input letters.
pub fn project_letters(w: &[Sym]) -> String {
    w.iter().filter_map(Sym::letter).collect()
}

/// A finite set together with a flag recording whether an enumeration bound cut it short.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedSet<T: Ord> {
    pub items: BTreeSet<T>,
    pub truncated: bool,
}

impl<T: Ord> Default for BoundedSet<T> {
    fn default() -> Self {
        BoundedSet { items: BTreeSet::new(), truncated: false }
    }
}

impl<T: Ord> BoundedSet<T> {
    pub fn exact(items: BTreeSet<T>) -> Self {
        BoundedSet { items, truncated: false }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OwTrans {
    pub from: StateId,
    /// `None` is an ε-move.
    pub input: Option<Sym>,
    pub to: StateId,
    pub output: Vec<Sym>,
}

/// Nondeterministic one-way transducer with ε-moves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneWayTransducer {
    pub num_states: usize,
    pub initial: StateId,
    pub finals: BTreeSet<StateId>,
    pub transitions: Vec<OwTrans>,
    /// State count of the full construction; differs from `num_states`
    /// only when unreachable product states were never materialized.
    pub nominal_states: u128,
}

impl OneWayTransducer {
    pub fn new(num_states: usize, initial: StateId) -> Self {
        OneWayTransducer {
            num_states,
            initial,
            finals: BTreeSet::new(),
            transitions: Vec::new(),
            nominal_states: num_states as u128,
        }
    }

    pub fn add(&mut self, from: StateId, input: Option<Sym>, to: StateId, output: Vec<Sym>) {
        self.transitions.push(OwTrans { from, input, to, output });
    }

    /// Outgoing transition indices per state.
    pub fn out_index(&self) -> Vec<Vec<usize>> {
        let mut idx = vec![Vec::new(); self.num_states];
        for (t, tr) in self.transitions.iter().enumerate() {
            idx[tr.from].push(t);
        }
        idx
    }

    pub fn in_index(&self) -> Vec<Vec<usize>> {
        let mut idx = vec![Vec::new(); self.num_states];
        for (t, tr) in self.transitions.iter().enumerate() {
            idx[tr.to].push(t);
        }
        idx
    }

    pub fn output_alphabet(&self) -> BTreeSet<Sym> {
        self.transitions.iter().flat_map(|t| t.output.iter().copied()).collect()
    }

    pub fn input_letters(&self) -> Alphabet {
        self.transitions.iter().filter_map(|t| t.input.and_then(|s| s.letter())).collect()
    }

    pub fn is_deterministic(&self) -> bool {
        let mut seen = HashSet::new();
        self.transitions.iter().all(|t| t.input.is_some() && seen.insert((t.from, t.input)))
    }

    pub fn is_codeterministic(&self) -> bool {
        let mut seen = HashSet::new();
        self.finals.len() == 1 && self.transitions.iter().all(|t| seen.insert((t.to, t.input)))
    }

    pub fn is_reversible(&self) -> bool {
        self.is_deterministic() && self.is_codeterministic()
    }

    /// States from which `finals` are reachable by ε-moves alone, as a bit vector.
    fn eps_backward(&self, seed: Vec<bool>, rev: &[Vec<usize>]) -> Vec<bool> {
        let mut mark = seed;
        let mut queue: VecDeque<StateId> = (0..self.num_states).filter(|&q| mark[q]).collect();
        while let Some(q) = queue.pop_front() {
            for &t in &rev[q] {
                let tr = &self.transitions[t];
                if tr.input.is_none() && !mark[tr.from] {
                    mark[tr.from] = true;
                    queue.push_back(tr.from);
                }
            }
        }
        mark
    }

    /// For each position `i` of `w`, the states from which the suffix `w[i..]` can be accepted.
    pub fn coreachable_sets(&self, w: &[Sym]) -> Vec<Vec<bool>> {
        let rev = self.in_index();
        let mut seed = vec![false; self.num_states];
        for &f in &self.finals {
            seed[f] = true;
        }
        let mut sets = vec![self.eps_backward(seed, &rev)];
        for &a in w.iter().rev() {
            let next = sets.last().unwrap();
            let mut seed = vec![false; self.num_states];
            for tr in &self.transitions {
                if tr.input == Some(a) && next[tr.to] {
                    seed[tr.from] = true;
                }
            }
            sets.push(self.eps_backward(seed, &rev));
        }
        sets.reverse();
        sets
    }

    /// Input projection as an ε-free automaton over letters (same states).
    pub fn domain_nfa(&self) -> Nfa {
        let out = self.out_index();
        let closure = |q: StateId| -> Vec<StateId> {
            let mut seen = vec![false; self.num_states];
            seen[q] = true;
            let mut stack = vec![q];
            let mut all = vec![q];
            while let Some(p) = stack.pop() {
                for &t in &out[p] {
                    let tr = &self.transitions[t];
                    if tr.input.is_none() && !seen[tr.to] {
                        seen[tr.to] = true;
                        stack.push(tr.to);
                        all.push(tr.to);
                    }
                }
            }
            all
        };
        let mut transitions = BTreeSet::new();
        let mut finals = BTreeSet::new();
        for q in 0..self.num_states {
            for p in closure(q) {
                if self.finals.contains(&p) {
                    finals.insert(q);
                }
                for &t in &out[p] {
                    let tr = &self.transitions[t];
                    if let Some(a) = tr.input.and_then(|s| s.letter()) {
                        transitions.insert((q, a, tr.to));
                    }
                }
            }
        }
        Nfa {
            num_states: self.num_states,
            alphabet: self.input_letters(),
            initial: self.initial,
            finals,
            transitions: transitions.into_iter().collect(),
        }
    }
}

/// Limits for [`enumerate_outputs`].
#[derive(Clone, Copy, Debug)]
pub struct EnumLimits {
    pub max_eps_run: usize,
    pub max_outputs: usize,
    pub max_steps: usize,
}

impl EnumLimits {
    pub fn for_machine(t: &OneWayTransducer) -> Self {
        let alphabet = t.output_alphabet().len().max(1);
        EnumLimits { max_eps_run: t.num_states * alphabet * 4, max_outputs: 4096, max_steps: 2_000_000 }
    }
}

/// All outputs of accepting runs on `w`, with at most `max_eps_run`
/// consecutive ε-moves per run.
pub fn enumerate_outputs(t: &OneWayTransducer, w: &[Sym], max_eps_run: usize) -> BoundedSet<Vec<Sym>> {
    let limits = EnumLimits { max_eps_run, ..EnumLimits::for_machine(t) };
    enumerate_outputs_with(t, w, limits)
}

pub fn enumerate_outputs_with(t: &OneWayTransducer, w: &[Sym], limits: EnumLimits) -> BoundedSet<Vec<Sym>> {
    let co = t.coreachable_sets(w);
    let out = t.out_index();
    let mut result = BoundedSet::default();
    if !co[0][t.initial] {
        return result;
    }
    // Explicit DFS: (state, position, ε-run, output length, next edge to try).
    let mut buf: Vec<Sym> = Vec::new();
    let mut stack: Vec<(StateId, usize, usize, usize, usize)> = vec![(t.initial, 0, 0, 0, 0)];
    let mut steps = 0usize;
    while let Some(top) = stack.last_mut() {
        let (q, i, eps, len, next) = *top;
        if next == 0 {
            steps += 1;
            if steps >= limits.max_steps {
                result.truncated = true;
                break;
            }
            if i == w.len() && t.finals.contains(&q) {
                if result.items.len() >= limits.max_outputs {
                    result.truncated = true;
                    break;
                }
                result.items.insert(buf.clone());
            }
        }
        if next == out[q].len() {
            stack.pop();
            continue;
        }
        top.4 += 1;
        let tr = &t.transitions[out[q][next]];
        let (ni, neps) = match tr.input {
            None => (i, eps + 1),
            Some(a) if i < w.len() && w[i] == a => (i + 1, 0),
            Some(_) => continue,
        };
        if !co[ni][tr.to] {
            continue;
        }
        if neps > limits.max_eps_run {
            result.truncated = true;
            continue;
        }
        buf.truncate(len);
        buf.extend_from_slice(&tr.output);
        stack.push((tr.to, ni, neps, buf.len(), 0));
    }
    result
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn symbol(&self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// How the input of a two-way machine is laid out on its tape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TapeMode {
    /// The word is framed by `|-` and `-|`.
    Endmarked,
    /// The word is used as is; parsed words carry their own outer brackets.
    Bare,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwTrans {
    pub from: StateId,
    pub symbol: Sym,
    pub to: StateId,
    pub output: String,
}

/// Two-way transducer over signed states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoWayTransducer {
    pub signs: Vec<Sign>,
    pub initial: StateId,
    pub finals: BTreeSet<StateId>,
    pub transitions: Vec<TwTrans>,
    pub tape: TapeMode,
}

/// Head position between tape cells, together with the current state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub pos: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Accept(String),
    Reject,
    LoopDetected,
    BudgetExhausted,
}

impl RunOutcome {
    pub fn output(&self) -> Option<&str> {
        match self {
            RunOutcome::Accept(v) => Some(v),
            _ => None,
        }
    }
}

impl TwoWayTransducer {
    pub fn new(tape: TapeMode) -> Self {
        TwoWayTransducer { signs: Vec::new(), initial: 0, finals: BTreeSet::new(), transitions: Vec::new(), tape }
    }

    pub fn num_states(&self) -> usize {
        self.signs.len()
    }

    pub fn add_state(&mut self, sign: Sign) -> StateId {
        self.signs.push(sign);
        self.signs.len() - 1
    }

    pub fn add(&mut self, from: StateId, symbol: Sym, to: StateId, output: &str) {
        self.transitions.push(TwTrans { from, symbol, to, output: output.to_string() });
    }

    pub fn alphabet(&self) -> BTreeSet<Sym> {
        self.transitions.iter().map(|t| t.symbol).collect()
    }

    pub fn is_deterministic(&self) -> bool {
        let mut seen = HashSet::new();
        self.transitions.iter().all(|t| seen.insert((t.from, t.symbol)))
    }

    pub fn is_codeterministic(&self) -> bool {
        let mut seen = HashSet::new();
        self.finals.len() == 1 && self.transitions.iter().all(|t| seen.insert((t.to, t.symbol)))
    }

    pub fn is_reversible(&self) -> bool {
        self.is_deterministic() && self.is_codeterministic()
    }

    pub fn is_one_way(&self) -> bool {
        self.signs.iter().all(|s| *s == Sign::Plus)
    }

    pub fn tape_for(&self, w: &[Sym]) -> Vec<Sym> {
        match self.tape {
            TapeMode::Bare => w.to_vec(),
            TapeMode::Endmarked => {
                let mut t = Vec::with_capacity(w.len() + 2);
                t.push(Sym::LeftEnd);
                t.extend_from_slice(w);
                t.push(Sym::RightEnd);
                t
            }
        }
    }

    /// Symbol under the head for a configuration, if any.
    pub fn reads(&self, tape: &[Sym], c: Configuration) -> Option<Sym> {
        match self.signs[c.state] {
            Sign::Plus => tape.get(c.pos).copied(),
            Sign::Minus => c.pos.checked_sub(1).map(|p| tape[p]),
        }
    }

    /// Applies a transition taken from configuration `c`.
    pub fn successor(&self, c: Configuration, t: &TwTrans) -> Configuration {
        let pos = match (self.signs[c.state], self.signs[t.to]) {
            (Sign::Plus, Sign::Plus) => c.pos + 1,
            (Sign::Minus, Sign::Minus) => c.pos - 1,
            _ => c.pos,
        };
        Configuration { state: t.to, pos }
    }

    fn index(&self) -> HashMap<(StateId, Sym), Vec<usize>> {
        let mut m: HashMap<(StateId, Sym), Vec<usize>> = HashMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            m.entry((t.from, t.symbol)).or_default().push(i);
        }
        m
    }

    fn accepting(&self, tape: &[Sym], c: Configuration) -> bool {
        c.pos == tape.len() && self.finals.contains(&c.state)
    }
}

/// Runs `t` on `w`, returning the outcome and the visited configurations.
pub fn run_two_way_traced(t: &TwoWayTransducer, w: &[Sym], step_budget: usize) -> (RunOutcome, Vec<Configuration>) {
    let tape = t.tape_for(w);
    let index = t.index();
    let start = Configuration { state: t.initial, pos: 0 };
    if t.is_deterministic() {
        let mut trace = vec![start];
        let mut seen = HashSet::from([start]);
        let mut out = String::new();
        let mut c = start;
        for _ in 0..step_budget {
            if t.accepting(&tape, c) {
                return (RunOutcome::Accept(out), trace);
            }
            let Some(sym) = t.reads(&tape, c) else { return (RunOutcome::Reject, trace) };
            let Some(tr) = index.get(&(c.state, sym)).and_then(|v| v.first()) else {
                return (RunOutcome::Reject, trace);
            };
            let tr = &t.transitions[*tr];
            out.push_str(&tr.output);
            c = t.successor(c, tr);
            trace.push(c);
            if !seen.insert(c) {
                return (RunOutcome::LoopDetected, trace);
            }
        }
        return (RunOutcome::BudgetExhausted, trace);
    }
    // Nondeterministic: depth-first search, never revisiting a configuration on the current path.
    let mut budget = step_budget;
    let mut path = vec![start];
    let mut on_path = HashSet::from([start]);
    let mut out = String::new();
    fn dfs(
        t: &TwoWayTransducer,
        tape: &[Sym],
        index: &HashMap<(StateId, Sym), Vec<usize>>,
        path: &mut Vec<Configuration>,
        on_path: &mut HashSet<Configuration>,
        out: &mut String,
        budget: &mut usize,
    ) -> Option<RunOutcome> {
        let c = *path.last().unwrap();
        if t.accepting(tape, c) {
            return Some(RunOutcome::Accept(out.clone()));
        }
        let sym = t.reads(tape, c)?;
        for &ti in index.get(&(c.state, sym)).map(Vec::as_slice).unwrap_or(&[]) {
            if *budget == 0 {
                return Some(RunOutcome::BudgetExhausted);
            }
            *budget -= 1;
            let tr = &t.transitions[ti];
            let n = t.successor(c, tr);
            if !on_path.insert(n) {
                continue;
            }
            let len = out.len();
            out.push_str(&tr.output);
            path.push(n);
            if let Some(r) = dfs(t, tape, index, path, on_path, out, budget) {
                return Some(r);
            }
            path.pop();
            on_path.remove(&n);
            out.truncate(len);
        }
        None
    }
    match dfs(t, &tape, &index, &mut path, &mut on_path, &mut out, &mut budget) {
        Some(r) => (r, path),
        None => (RunOutcome::Reject, path),
    }
}

pub fn run_two_way(t: &TwoWayTransducer, w: &[Sym], step_budget: usize) -> RunOutcome {
    run_two_way_traced(t, w, step_budget).0
}

/// Default step budget: the number of distinct configurations plus one.
pub fn default_budget(t: &TwoWayTransducer, w: &[Sym]) -> usize {
    t.num_states() * (t.tape_for(w).len() + 1) + 1
}

/// Complete deterministic automaton over letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    pub alphabet: Vec<char>,
    pub initial: StateId,
    pub finals: Vec<bool>,
    /// `delta[q][k]` is the successor on `alphabet[k]`.
    pub delta: Vec<Vec<Option<StateId>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DfaError {
    #[error("automaton is not complete: state {0} lacks a successor")]
    Incomplete(StateId),
}

impl Dfa {
    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().all(|row| row.iter().all(Option::is_some))
    }

    pub fn accepts(&self, w: &[char]) -> bool {
        let mut q = self.initial;
        for c in w {
            let Some(k) = self.alphabet.iter().position(|a| a == c) else { return false };
            match self.delta[q][k] {
                Some(n) => q = n,
                None => return false,
            }
        }
        self.finals[q]
    }

    pub fn accepts_str(&self, w: &str) -> bool {
        self.accepts(&w.chars().collect::<Vec<_>>())
    }

    /// The same automaton as an [`Nfa`], for dumping.
    pub fn to_nfa(&self) -> Nfa {
        let mut transitions = Vec::new();
        for (q, row) in self.delta.iter().enumerate() {
            for (k, s) in row.iter().enumerate() {
                if let Some(s) = s {
                    transitions.push((q, self.alphabet[k], *s));
                }
            }
        }
        Nfa {
            num_states: self.num_states(),
            alphabet: self.alphabet.iter().copied().collect(),
            initial: self.initial,
            finals: (0..self.num_states()).filter(|&q| self.finals[q]).collect(),
            transitions,
        }
    }
}

/// Subset construction over `a.alphabet`, complete with the empty subset as sink.
pub fn determinize(a: &Nfa) -> Dfa {
    determinize_capped(a, usize::MAX).expect("uncapped subset construction")
}

/// Like [`determinize`], giving up once more than `cap` subsets are discovered.
pub fn determinize_capped(a: &Nfa, cap: usize) -> Option<Dfa> {
    let alphabet: Vec<char> = a.alphabet.iter().copied().collect();
    let mut succ: Vec<BTreeMap<char, Vec<StateId>>> = vec![BTreeMap::new(); a.num_states];
    for &(p, c, q) in &a.transitions {
        succ[p].entry(c).or_default().push(q);
    }
    let start: BTreeSet<StateId> = [a.initial].into();
    let mut ids: HashMap<BTreeSet<StateId>, StateId> = HashMap::from([(start.clone(), 0)]);
    let mut subsets = vec![start];
    let mut delta = Vec::new();
    let mut i = 0;
    while i < subsets.len() {
        let mut row = Vec::with_capacity(alphabet.len());
        for c in &alphabet {
            let next: BTreeSet<StateId> =
                subsets[i].iter().flat_map(|p| succ[*p].get(c).into_iter().flatten().copied()).collect();
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    let id = subsets.len();
                    if id >= cap {
                        return None;
                    }
                    ids.insert(next.clone(), id);
                    subsets.push(next);
                    id
                }
            };
            row.push(Some(id));
        }
        delta.push(row);
        i += 1;
    }
    let finals = subsets.iter().map(|s| s.iter().any(|q| a.finals.contains(q))).collect();
    Some(Dfa { alphabet, initial: 0, finals, delta })
}

/// Flips the accepting states of a complete automaton.
pub fn complement_dfa(d: &Dfa) -> Result<Dfa, DfaError> {
    if let Some(q) = d.delta.iter().position(|row| row.iter().any(Option::is_none)) {
        return Err(DfaError::Incomplete(q));
    }
    let mut c = d.clone();
    for f in &mut c.finals {
        *f = !*f;
    }
    Ok(c)
}

/// Minimal complete automaton via partition refinement, after dropping unreachable states.
pub fn minimize(d: &Dfa) -> Result<Dfa, DfaError> {
    if let Some(q) = d.delta.iter().position(|row| row.iter().any(Option::is_none)) {
        return Err(DfaError::Incomplete(q));
    }
    let n = d.num_states();
    let mut reach = vec![false; n];
    let mut order = vec![d.initial];
    reach[d.initial] = true;
    let mut i = 0;
    while i < order.len() {
        for s in d.delta[order[i]].iter().flatten() {
            if !reach[*s] {
                reach[*s] = true;
                order.push(*s);
            }
        }
        i += 1;
    }
    let mut class: Vec<usize> = (0..n).map(|q| usize::from(d.finals[q])).collect();
    let mut count = 0;
    loop {
        let mut sig: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let mut next = vec![0; n];
        for &q in &order {
            let key = (class[q], d.delta[q].iter().map(|s| class[s.unwrap()]).collect());
            let fresh = sig.len();
            next[q] = *sig.entry(key).or_insert(fresh);
        }
        let new_count = sig.len();
        class = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    let mut delta = vec![Vec::new(); count];
    let mut finals = vec![false; count];
    for &q in &order {
        let c = class[q];
        finals[c] = d.finals[q];
        delta[c] = d.delta[q].iter().map(|s| Some(class[s.unwrap()])).collect();
    }
    Ok(Dfa { alphabet: d.alphabet.clone(), initial: class[d.initial], finals, delta })
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering; edges are labeled `in | out`.
pub fn one_way_to_dot(t: &OneWayTransducer, name: &str) -> String {
    let mut s = format!("digraph \"{}\" {{\n  rankdir=LR;\n", dot_escape(name));
    for q in 0..t.num_states {
        let shape = if t.finals.contains(&q) { "doublecircle" } else { "circle" };
        s += &format!("  q{q} [shape={shape}, label=\"{q}\"];\n");
    }
    s += &format!("  start [shape=point];\n  start -> q{};\n", t.initial);
    for tr in &t.transitions {
        let input = tr.input.map(|a| a.ascii()).unwrap_or_else(|| "eps".into());
        let label = format!("{input} | {}", render_word(&tr.output));
        s += &format!("  q{} -> q{} [label=\"{}\"];\n", tr.from, tr.to, dot_escape(&label));
    }
    s + "}\n"
}

/// Graphviz rendering with the sign of each state in its label.
pub fn two_way_to_dot(t: &TwoWayTransducer, name: &str) -> String {
    let mut s = format!("digraph \"{}\" {{\n  rankdir=LR;\n", dot_escape(name));
    for (q, sign) in t.signs.iter().enumerate() {
        let shape = if t.finals.contains(&q) { "doublecircle" } else { "circle" };
        s += &format!("  q{q} [shape={shape}, label=\"{q}{}\"];\n", sign.symbol());
    }
    s += &format!("  start [shape=point];\n  start -> q{};\n", t.initial);
    for tr in &t.transitions {
        let label = format!("{} | {}", tr.symbol, tr.output);
        s += &format!("  q{} -> q{} [label=\"{}\"];\n", tr.from, tr.to, dot_escape(&label));
    }
    s + "}\n"
}

pub fn dfa_to_dot(d: &Dfa, name: &str) -> String {
    let mut s = format!("digraph \"{}\" {{\n  rankdir=LR;\n", dot_escape(name));
    for q in 0..d.num_states() {
        let shape = if d.finals[q] { "doublecircle" } else { "circle" };
        s += &format!("  q{q} [shape={shape}, label=\"{q}\"];\n");
    }
    s += &format!("  start [shape=point];\n  start -> q{};\n", d.initial);
    for (q, row) in d.delta.iter().enumerate() {
        for (k, to) in row.iter().enumerate() {
            if let Some(to) = to {
                s += &format!("  q{q} -> q{to} [label=\"{}\"];\n", dot_escape(&d.alphabet[k].to_string()));
            }
        }
    }
    s + "}\n"
}

pub fn nfa_to_dot(a: &Nfa, name: &str) -> String {
    let mut s = format!("digraph \"{}\" {{\n  rankdir=LR;\n", dot_escape(name));
    for q in 0..a.num_states {
        let shape = if a.finals.contains(&q) { "doublecircle" } else { "circle" };
        s += &format!("  q{q} [shape={shape}, label=\"{q}\"];\n");
    }
    s += &format!("  start [shape=point];\n  start -> q{};\n", a.initial);
    for (p, c, q) in &a.transitions {
        s += &format!("  q{p} -> q{q} [label=\"{}\"];\n", dot_escape(&c.to_string()));
    }
    s + "}\n"
}

/// JSON machine dump. Symbols use their ASCII tokens; ε-inputs are `null`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MachineDump {
    OneWay {
        states: usize,
        #[serde(default)]
        nominal_states: Option<String>,
        initial: StateId,
        finals: Vec<StateId>,
        transitions: Vec<OneWayEdge>,
    },
    TwoWay {
        tape: TapeMode,
        states: Vec<Sign>,
        initial: StateId,
        finals: Vec<StateId>,
        transitions: Vec<TwoWayEdge>,
    },
    Automaton {
        alphabet: String,
        states: usize,
        initial: StateId,
        finals: Vec<StateId>,
        transitions: Vec<(StateId, char, StateId)>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneWayEdge {
    pub from: StateId,
    pub input: Option<String>,
    pub to: StateId,
    pub output: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoWayEdge {
    pub from: StateId,
    pub symbol: String,
    pub to: StateId,
    pub output: String,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Symbol(#[from] SymError),
    #[error("state {0} out of range")]
    StateRange(StateId),
    #[error("bad nominal state count")]
    Nominal,
}

/// A machine loaded from a dump.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Machine {
    OneWay(OneWayTransducer),
    TwoWay(TwoWayTransducer),
    Automaton(Nfa),
}

impl Machine {
    pub fn dump(&self) -> MachineDump {
        match self {
            Machine::OneWay(t) => MachineDump::OneWay {
                states: t.num_states,
                nominal_states: (t.nominal_states != t.num_states as u128).then(|| t.nominal_states.to_string()),
                initial: t.initial,
                finals: t.finals.iter().copied().collect(),
                transitions: t
                    .transitions
                    .iter()
                    .map(|tr| OneWayEdge {
                        from: tr.from,
                        input: tr.input.map(|s| s.ascii()),
                        to: tr.to,
                        output: tr.output.iter().map(Sym::ascii).collect(),
                    })
                    .collect(),
            },
            Machine::TwoWay(t) => MachineDump::TwoWay {
                tape: t.tape,
                states: t.signs.clone(),
                initial: t.initial,
                finals: t.finals.iter().copied().collect(),
                transitions: t
                    .transitions
                    .iter()
                    .map(|tr| TwoWayEdge {
                        from: tr.from,
                        symbol: tr.symbol.ascii(),
                        to: tr.to,
                        output: tr.output.clone(),
                    })
                    .collect(),
            },
            Machine::Automaton(a) => MachineDump::Automaton {
                alphabet: a.alphabet.iter().collect(),
                states: a.num_states,
                initial: a.initial,
                finals: a.finals.iter().copied().collect(),
                transitions: a.transitions.clone(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.dump()).expect("dump serializes")
    }

    pub fn to_dot(&self, name: &str) -> String {
        match self {
            Machine::OneWay(t) => one_way_to_dot(t, name),
            Machine::TwoWay(t) => two_way_to_dot(t, name),
            Machine::Automaton(a) => nfa_to_dot(a, name),
        }
    }

    pub fn from_json(text: &str) -> Result<Machine, LoadError> {
        let dump: MachineDump = serde_json::from_str(text)?;
        Machine::from_dump(dump)
    }

    pub fn from_dump(dump: MachineDump) -> Result<Machine, LoadError> {
        let check = |q: StateId, n: usize| if q < n { Ok(q) } else { Err(LoadError::StateRange(q)) };
        match dump {
            MachineDump::OneWay { states, nominal_states, initial, finals, transitions } => {
                let mut t = OneWayTransducer::new(states, check(initial, states)?);
                for f in finals {
                    t.finals.insert(check(f, states)?);
                }
                for e in transitions {
                    let input = e.input.as_deref().map(parse_sym).transpose()?;
                    let output = e.output.iter().map(|s| parse_sym(s)).collect::<Result<_, _>>()?;
                    t.add(check(e.from, states)?, input, check(e.to, states)?, output);
                }
                if let Some(n) = nominal_states {
                    t.nominal_states = n.parse().map_err(|_| LoadError::Nominal)?;
                }
                Ok(Machine::OneWay(t))
            }
            MachineDump::TwoWay { tape, states, initial, finals, transitions } => {
                let n = states.len();
                let mut t = TwoWayTransducer::new(tape);
                t.signs = states;
                t.initial = check(initial, n)?;
                for f in finals {
                    t.finals.insert(check(f, n)?);
                }
                for e in transitions {
                    let sym = parse_sym(&e.symbol)?;
                    t.add(check(e.from, n)?, sym, check(e.to, n)?, &e.output);
                }
                Ok(Machine::TwoWay(t))
            }
            MachineDump::Automaton { alphabet, states, initial, finals, transitions } => {
                let mut a = Nfa {
                    num_states: states,
                    alphabet: alphabet.chars().collect(),
                    initial: check(initial, states)?,
                    finals: BTreeSet::new(),
                    transitions: Vec::new(),
                };
                for f in finals {
                    a.finals.insert(check(f, states)?);
                }
                for (p, c, q) in transitions {
                    a.transitions.push((check(p, states)?, c, check(q, states)?));
                }
                Ok(Machine::Automaton(a))
            }
        }
    }
}

/// The automata of the introductory example for the language of words containing an `a`.
pub mod examples {
    use super::*;

    /// One-way deterministic automaton, not co-deterministic.
    pub fn a1() -> TwoWayTransducer {
        let mut t = TwoWayTransducer::new(TapeMode::Endmarked);
        let [qi, n0, n1, qf] = [(); 4].map(|_| t.add_state(Sign::Plus));
        t.initial = qi;
        t.finals.insert(qf);
        t.add(qi, Sym::LeftEnd, n0, "");
        t.add(n0, Sym::Letter('b'), n0, "");
        t.add(n0, Sym::Letter('a'), n1, "");
        t.add(n1, Sym::Letter('a'), n1, "");
        t.add(n1, Sym::Letter('b'), n1, "");
        t.add(n1, Sym::RightEnd, qf, "");
        t
    }

    /// Reversible two-way automaton: find an `a`, rewind to `|-`, then scan to `-|`.
    pub fn a2() -> TwoWayTransducer {
        let mut t = TwoWayTransducer::new(TapeMode::Endmarked);
        let qi = t.add_state(Sign::Plus);
        let n0 = t.add_state(Sign::Plus);
        let n1 = t.add_state(Sign::Minus);
        let n2 = t.add_state(Sign::Plus);
        let qf = t.add_state(Sign::Plus);
        t.initial = qi;
        t.finals.insert(qf);
        t.add(qi, Sym::LeftEnd, n0, "");
        t.add(n0, Sym::Letter('b'), n0, "");
        t.add(n0, Sym::Letter('a'), n1, "");
        t.add(n1, Sym::Letter('b'), n1, "");
        t.add(n1, Sym::LeftEnd, n2, "");
        t.add(n2, Sym::Letter('a'), n2, "");
        t.add(n2, Sym::Letter('b'), n2, "");
        t.add(n2, Sym::RightEnd, qf, "");
        t
    }
}
