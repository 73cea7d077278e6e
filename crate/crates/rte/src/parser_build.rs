// SPDX-License-Identifier: Apache-2.0
//! One-way parsers: each emits the bracketed traversals of the input with
//! respect to an expression.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::hash::Hash;

use crate::expr::{Alphabet, LNode, LabeledExpr, Occ, Regex};
use crate::machines::{OneWayTransducer, StateId, Sym, MAX_K};
use crate::regex::glushkov;

pub use crate::machines::{ParsedWord, Sym as ParseSymbol};

/// How product constructions materialize their state spaces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BuildMode {
    /// Every state of the construction gets an id, reachable or not.
    Full,
    /// Only states that lie on some accepting run are kept.
    #[default]
    Trim,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("construction needs {0} states, too many to materialize")]
    TooLarge(u128),
}

/// Ceiling on explicitly numbered product states in [`BuildMode::Full`].
const FULL_LIMIT: u128 = 1 << 26;

/// Non-letter symbols that can occur in parsings for `h`.
pub fn paren_alphabet(h: &LabeledExpr) -> BTreeSet<Sym> {
    let mut out: BTreeSet<Sym> = [Sym::open(h.occ), Sym::close(h.occ)].into();
    match &h.node {
        LNode::KStar(k, _, f) | LNode::KStarRev(k, _, f) => {
            out.insert(Sym::sep(h.occ));
            for s in paren_alphabet(f) {
                for i in 1..=*k {
                    out.insert(s.push_index(i));
                }
            }
        }
        _ => {
            for c in h.children() {
                out.extend(paren_alphabet(c));
            }
        }
    }
    out
}

pub fn final_state(t: &OneWayTransducer) -> StateId {
    debug_assert_eq!(t.finals.len(), 1);
    *t.finals.iter().next().expect("parser has a final state")
}

fn fresh(t: &mut OneWayTransducer) -> StateId {
    t.num_states += 1;
    t.num_states - 1
}

/// Copies `src` into `dst`, identifying its initial and final states with
/// `init` and `fin` when given. Returns the images of both.
fn embed(
    dst: &mut OneWayTransducer,
    src: &OneWayTransducer,
    init: Option<StateId>,
    fin: Option<StateId>,
) -> (StateId, StateId) {
    let sf = final_state(src);
    let map: Vec<StateId> = (0..src.num_states)
        .map(|s| {
            let fixed = if s == src.initial {
                init
            } else if s == sf {
                fin
            } else {
                None
            };
            fixed.unwrap_or_else(|| fresh(dst))
        })
        .collect();
    for tr in &src.transitions {
        dst.add(map[tr.from], tr.input, map[tr.to], tr.output.clone());
    }
    (map[src.initial], map[sf])
}

fn wrap_open(h: Occ) -> Vec<Sym> {
    vec![Sym::open(h)]
}

fn wrap_close(h: Occ) -> Vec<Sym> {
    vec![Sym::close(h)]
}

/// `q0 -ε|(h-> Glushkov(e) -ε|)h-> qF`, with `nl(e)+3` states.
pub fn parser_base(e: &Regex, occ: Occ) -> OneWayTransducer {
    let g = glushkov(e);
    let qf = g.num_states + 1;
    let mut t = OneWayTransducer::new(g.num_states + 2, 0);
    t.add(0, None, 1, wrap_open(occ));
    for &(p, a, q) in &g.transitions {
        t.add(p + 1, Some(Sym::Letter(a)), q + 1, vec![Sym::Letter(a)]);
    }
    for &f in &g.finals {
        t.add(f + 1, None, qf, wrap_close(occ));
    }
    t.finals.insert(qf);
    t
}

/// Three states, copying the input between `(h` and `)h`.
pub fn parser_basefun(occ: Occ, sigma: &Alphabet) -> OneWayTransducer {
    let mut t = OneWayTransducer::new(3, 0);
    t.add(0, None, 1, wrap_open(occ));
    for &a in sigma {
        t.add(1, Some(Sym::Letter(a)), 1, vec![Sym::Letter(a)]);
    }
    t.add(1, None, 2, wrap_close(occ));
    t.finals.insert(2);
    t
}

/// Initial states of both operands merged, and so are their final states.
pub fn parser_sum(pf: &OneWayTransducer, pg: &OneWayTransducer, occ: Occ) -> OneWayTransducer {
    let mut t = OneWayTransducer::new(0, 0);
    let q0 = fresh(&mut t);
    let j = fresh(&mut t);
    let k = fresh(&mut t);
    embed(&mut t, pf, Some(j), Some(k));
    embed(&mut t, pg, Some(j), Some(k));
    let qf = fresh(&mut t);
    t.add(q0, None, j, wrap_open(occ));
    t.add(k, None, qf, wrap_close(occ));
    t.finals.insert(qf);
    t.nominal_states = pf.nominal_states + pg.nominal_states;
    t
}

/// The final state of `pf` is merged with the initial state of `pg`.
pub fn parser_cauchy(pf: &OneWayTransducer, pg: &OneWayTransducer, occ: Occ) -> OneWayTransducer {
    let mut t = OneWayTransducer::new(0, 0);
    let q0 = fresh(&mut t);
    let (fi, mid) = embed(&mut t, pf, None, None);
    let (_, gf) = embed(&mut t, pg, Some(mid), None);
    let qf = fresh(&mut t);
    t.add(q0, None, fi, wrap_open(occ));
    t.add(gf, None, qf, wrap_close(occ));
    t.finals.insert(qf);
    t.nominal_states = 1 + pf.nominal_states + pg.nominal_states;
    t
}

/// The initial and final states of `pf` become a single hub.
pub fn parser_star(pf: &OneWayTransducer, occ: Occ) -> OneWayTransducer {
    let mut t = OneWayTransducer::new(0, 0);
    let q0 = fresh(&mut t);
    let hub = fresh(&mut t);
    embed(&mut t, pf, Some(hub), Some(hub));
    let qf = fresh(&mut t);
    t.add(q0, None, hub, wrap_open(occ));
    t.add(hub, None, qf, wrap_close(occ));
    t.finals.insert(qf);
    t.nominal_states = 1 + pf.nominal_states;
    t
}

type Edge<S> = (Option<Sym>, Sym, S);
type Encoder<'a, S> = Option<(&'a dyn Fn(&S) -> usize, usize)>;

/// Explores an implicitly given inner machine from `start` and returns its
/// edges and finals with ids offset by `base`.
struct Explored {
    edges: Vec<(StateId, Option<Sym>, StateId, Sym)>,
    start: StateId,
    finals: Vec<StateId>,
    count: usize,
}

fn explore<S: Clone + Eq + Hash>(
    start: S,
    base: StateId,
    mut succ: impl FnMut(&S) -> Vec<Edge<S>>,
    is_final: impl Fn(&S) -> bool,
    encode: Encoder<'_, S>,
) -> Explored {
    let mut ids: HashMap<S, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut next_id = 0usize;
    let mut id_of = |s: &S, ids: &mut HashMap<S, StateId>, queue: &mut VecDeque<S>| -> StateId {
        if let Some(&id) = ids.get(s) {
            return id;
        }
        let id = match encode {
            Some((enc, _)) => base + enc(s),
            None => {
                next_id += 1;
                base + next_id - 1
            }
        };
        ids.insert(s.clone(), id);
        queue.push_back(s.clone());
        id
    };
    let start_id = id_of(&start, &mut ids, &mut queue);
    let mut edges = Vec::new();
    let mut finals = Vec::new();
    while let Some(s) = queue.pop_front() {
        let from = ids[&s];
        if is_final(&s) {
            finals.push(from);
        }
        for (input, out, t) in succ(&s) {
            let to = id_of(&t, &mut ids, &mut queue);
            edges.push((from, input, to, out));
        }
    }
    let count = match encode {
        Some((_, total)) => total,
        None => ids.len(),
    };
    Explored { edges, start: start_id, finals, count }
}

/// Removes states that are not both reachable and co-reachable, keeping the
/// initial and final states. Ids keep their relative order.
pub fn trim(t: &OneWayTransducer) -> OneWayTransducer {
    let n = t.num_states;
    let out = t.out_index();
    let inn = t.in_index();
    let sweep = |seeds: Vec<StateId>, adj: &Vec<Vec<usize>>, forward: bool| {
        let mut mark = vec![false; n];
        let mut stack = seeds;
        for &s in &stack {
            mark[s] = true;
        }
        while let Some(p) = stack.pop() {
            for &e in &adj[p] {
                let tr = &t.transitions[e];
                let q = if forward { tr.to } else { tr.from };
                if !mark[q] {
                    mark[q] = true;
                    stack.push(q);
                }
            }
        }
        mark
    };
    let fwd = sweep(vec![t.initial], &out, true);
    let bwd = sweep(t.finals.iter().copied().collect(), &inn, false);
    let keep: Vec<bool> = (0..n).map(|q| (fwd[q] && bwd[q]) || q == t.initial || t.finals.contains(&q)).collect();
    let mut map = vec![usize::MAX; n];
    let mut count = 0;
    for q in 0..n {
        if keep[q] {
            map[q] = count;
            count += 1;
        }
    }
    let mut r = OneWayTransducer::new(count, map[t.initial]);
    r.finals = t.finals.iter().map(|&f| map[f]).collect();
    for tr in &t.transitions {
        if keep[tr.from] && keep[tr.to] && fwd[tr.from] && bwd[tr.to] {
            r.add(map[tr.from], tr.input, map[tr.to], tr.output.clone());
        }
    }
    r.nominal_states = t.nominal_states;
    r
}

struct Adjacency {
    eps: Vec<Vec<(Sym, StateId)>>,
    letters: Vec<Vec<(Sym, StateId)>>,
}

fn adjacency(t: &OneWayTransducer) -> Adjacency {
    let mut eps = vec![Vec::new(); t.num_states];
    let mut letters = vec![Vec::new(); t.num_states];
    for tr in &t.transitions {
        match tr.input {
            None => eps[tr.from].push((tr.output[0], tr.to)),
            Some(a) => letters[tr.from].push((a, tr.to)),
        }
    }
    Adjacency { eps, letters }
}

fn assemble(occ: Occ, parts: Vec<Explored>, nominal: u128, mode: BuildMode) -> OneWayTransducer {
    let inner: usize = parts.iter().map(|p| p.count).sum();
    let mut t = OneWayTransducer::new(inner + 2, 0);
    let qf = inner + 1;
    for p in &parts {
        t.add(0, None, p.start, wrap_open(occ));
        for &(from, input, to, out) in &p.edges {
            t.add(from, input, to, vec![out]);
        }
        for &f in &p.finals {
            t.add(f, None, qf, wrap_close(occ));
        }
    }
    t.finals.insert(qf);
    t.nominal_states = nominal;
    match mode {
        BuildMode::Full => t,
        BuildMode::Trim => trim(&t),
    }
}

fn check_full(nominal: u128, mode: BuildMode) -> Result<(), BuildError> {
    if mode == BuildMode::Full && nominal > FULL_LIMIT {
        return Err(BuildError::TooLarge(nominal));
    }
    Ok(())
}

/// Synchronized product: between two letters the f-side moves first, then
/// the g-side; the bit records whether the g-side has moved.
pub fn parser_hadamard(
    pf: &OneWayTransducer,
    pg: &OneWayTransducer,
    occ: Occ,
    mode: BuildMode,
) -> Result<OneWayTransducer, BuildError> {
    let nominal = 2 * pf.nominal_states * pg.nominal_states + 2;
    check_full(nominal, mode)?;
    let (af, ag) = (adjacency(pf), adjacency(pg));
    let (ff, fg) = (final_state(pf), final_state(pg));
    let ng = pg.num_states;
    let succ = |&(p, q, b): &(StateId, StateId, u8)| {
        let mut out = Vec::new();
        if b == 0 {
            for &(x, p2) in &af.eps[p] {
                out.push((None, x, (p2, q, 0)));
            }
        }
        for &(y, q2) in &ag.eps[q] {
            out.push((None, y, (p, q2, 1)));
        }
        for &(a, p2) in &af.letters[p] {
            for &(c, q2) in &ag.letters[q] {
                if a == c {
                    out.push((Some(a), a, (p2, q2, 0)));
                }
            }
        }
        out
    };
    let enc = |&(p, q, b): &(StateId, StateId, u8)| (p * ng + q) * 2 + b as usize;
    let encode: Encoder<(StateId, StateId, u8)> = match mode {
        BuildMode::Full => Some((&enc, 2 * pf.num_states * ng)),
        BuildMode::Trim => None,
    };
    let part = explore((pf.initial, pg.initial, 0u8), 1, succ, |&(p, q, b)| p == ff && q == fg && b == 1, encode);
    Ok(assemble(occ, vec![part], nominal, mode))
}

/// Next index after `i`, where the successor of `k` is `1`.
pub fn next_index(i: u32, k: u32) -> u32 {
    i % k + 1
}

/// Position of `l` in the cyclic order that starts right after `i`.
pub fn rank(l: u32, i: u32, k: u32) -> u32 {
    (l + 2 * k - i - 1) % k
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct KState {
    i: u32,
    q: StateId,
    /// `comps[l-1]` is the state of copy `l`, `None` when idle.
    comps: Vec<Option<StateId>>,
    j: u32,
}

/// Parser for k-star and reverse k-star: one branch for at least `k`
/// factors, running up to `k` indexed copies of `pf`, and one branch for
/// fewer factors that only inserts separators.
pub fn parser_kstar(
    k: u32,
    e: &Regex,
    pf: &OneWayTransducer,
    f_occ: Occ,
    occ: Occ,
    mode: BuildMode,
) -> Result<OneWayTransducer, BuildError> {
    if !(2..=MAX_K).contains(&k) {
        return Err(BuildError::Unsupported(format!("k-star with k = {k}; supported range is 2..={MAX_K}")));
    }
    let g = glushkov(e);
    let nq = g.num_states;
    let ku = k as usize;
    let pn = pf.nominal_states;
    let nominal = (k as u128).pow(2) * nq as u128 * (pn + 1).pow(k) + (k as u128 - 1) * nq as u128 + 2;
    check_full(nominal, mode)?;
    let gsucc = g.successor_table();
    let af = adjacency(pf);
    let (fi, ff) = (pf.initial, final_state(pf));
    let close_f = Sym::close(f_occ);
    let sep = Sym::sep(occ);
    let is_final = |s: &KState| {
        let m = next_index(s.i, k);
        g.finals.contains(&s.q) && (1..=k).all(|l| s.comps[l as usize - 1] == if l == m { Some(ff) } else { None })
    };
    let succ = |s: &KState| -> Vec<Edge<KState>> {
        let m = next_index(s.i, k);
        let mut out = Vec::new();
        // Letters: the Glushkov automaton and every active copy step together.
        for &(a, q2) in &gsucc[s.q] {
            let a = Sym::Letter(a);
            let mut combos: Vec<Vec<Option<StateId>>> = vec![Vec::with_capacity(ku)];
            for c in &s.comps {
                let choices: Vec<Option<StateId>> = match c {
                    None => vec![None],
                    Some(p) => af.letters[*p].iter().filter(|(b, _)| *b == a).map(|(_, t)| Some(*t)).collect(),
                };
                combos = combos
                    .into_iter()
                    .flat_map(|prefix| {
                        choices.iter().map(move |&ch| {
                            let mut v = prefix.clone();
                            v.push(ch);
                            v
                        })
                    })
                    .collect();
                if combos.is_empty() {
                    break;
                }
            }
            for comps in combos {
                out.push((Some(a), a, KState { i: s.i, q: q2, comps, j: m }));
            }
        }
        // Bracket moves of copy l, in cyclic order starting after i.
        if s.comps[m as usize - 1] != Some(ff) {
            for l in 1..=k {
                if rank(s.j, s.i, k) > rank(l, s.i, k) {
                    continue;
                }
                let Some(p) = s.comps[l as usize - 1] else { continue };
                for &(x, t) in &af.eps[p] {
                    if t == ff {
                        continue;
                    }
                    let mut comps = s.comps.clone();
                    comps[l as usize - 1] = Some(t);
                    out.push((None, x.push_index(l), KState { i: s.i, q: s.q, comps, j: l }));
                }
            }
        }
        let q_final = g.finals.contains(&s.q);
        let qi_started = s.comps[s.i as usize - 1] == Some(fi);
        if q_final && !qi_started {
            // Copy m closes its window.
            if let Some(p) = s.comps[m as usize - 1] {
                for &(x, t) in &af.eps[p] {
                    if t == ff && x == close_f {
                        let mut comps = s.comps.clone();
                        comps[m as usize - 1] = Some(ff);
                        out.push((None, x.push_index(m), KState { comps, ..s.clone() }));
                    }
                }
            }
            // End of a factor: move to the next counter value, maybe starting copy m afresh.
            let cm = s.comps[m as usize - 1];
            if (cm == Some(ff) || cm.is_none()) && !is_final(s) {
                let restarts: &[Option<StateId>] =
                    if s.comps[s.i as usize - 1].is_none() { &[None] } else { &[None, Some(fi)] };
                for &r in restarts {
                    let mut comps = s.comps.clone();
                    comps[m as usize - 1] = r;
                    out.push((None, sep, KState { i: m, q: g.initial, comps, j: m }));
                }
            }
        }
        out
    };
    let width = pf.num_states + 1;
    let enc = |s: &KState| {
        let mut code = (s.i as usize - 1) * nq + s.q;
        for l in (0..ku).rev() {
            code = code * width + s.comps[l].unwrap_or(pf.num_states);
        }
        code * ku + (s.j as usize - 1)
    };
    let long_count = ku * ku * nq * width.pow(k);
    let encode: Encoder<KState> = match mode {
        BuildMode::Full => Some((&enc, long_count)),
        BuildMode::Trim => None,
    };
    let mut comps = vec![None; ku];
    comps[0] = Some(fi);
    let long = explore(KState { i: 1, q: g.initial, comps, j: 1 }, 1, succ, is_final, encode);

    // Fewer than k factors: (q, i) for i in 1..k, with (q_I, 1) also accepting the empty factorization.
    let base = 1 + long.count;
    let short_id = |q: StateId, i: usize| base + (i - 1) * nq + q;
    let mut short =
        Explored { edges: Vec::new(), start: short_id(g.initial, 1), finals: Vec::new(), count: (ku - 1) * nq };
    for i in 1..ku {
        for &(p, a, q) in &g.transitions {
            short.edges.push((short_id(p, i), Some(Sym::Letter(a)), short_id(q, i), Sym::Letter(a)));
        }
        for &f in &g.finals {
            if i + 1 < ku {
                short.edges.push((short_id(f, i), None, short_id(g.initial, i + 1), sep));
            }
            short.finals.push(short_id(f, i));
        }
    }
    if !g.finals.contains(&g.initial) {
        short.finals.push(short_id(g.initial, 1));
    }
    Ok(assemble(occ, vec![long, short], nominal, mode))
}

/// Compiles `h` into its parser.
pub fn build_parser(h: &LabeledExpr, sigma: &Alphabet) -> Result<OneWayTransducer, BuildError> {
    build_parser_with(h, sigma, BuildMode::default())
}

pub fn build_parser_with(h: &LabeledExpr, sigma: &Alphabet, mode: BuildMode) -> Result<OneWayTransducer, BuildError> {
    let rec = |f: &LabeledExpr| build_parser_with(f, sigma, mode);
    Ok(match &h.node {
        LNode::Base(e, _) => parser_base(e, h.occ),
        LNode::Dup(_) | LNode::Rev => parser_basefun(h.occ, sigma),
        LNode::Sum(f, g) => parser_sum(&rec(f)?, &rec(g)?, h.occ),
        LNode::Cauchy(f, g) | LNode::CauchyRev(f, g) => parser_cauchy(&rec(f)?, &rec(g)?, h.occ),
        LNode::Star(f) | LNode::StarRev(f) => parser_star(&rec(f)?, h.occ),
        LNode::Hadamard(f, g) => parser_hadamard(&rec(f)?, &rec(g)?, h.occ, mode)?,
        LNode::KStar(k, e, f) | LNode::KStarRev(k, e, f) => parser_kstar(*k, e, &rec(f)?, f.occ, h.occ, mode)?,
    })
}

/// Structural parser checks: a unique initial state without incoming moves,
/// a unique final state without outgoing moves, and every move either
/// copies a letter or emits one bracket or separator on ε.
pub fn check_parser_invariants(t: &OneWayTransducer) -> Result<(), String> {
    if t.finals.len() != 1 {
        return Err(format!("expected one final state, found {}", t.finals.len()));
    }
    let qf = final_state(t);
    for tr in &t.transitions {
        if tr.to == t.initial {
            return Err(format!("initial state {} has an incoming transition", t.initial));
        }
        if tr.from == qf {
            return Err(format!("final state {qf} has an outgoing transition"));
        }
        match (tr.input, tr.output.as_slice()) {
            (Some(Sym::Letter(a)), [Sym::Letter(b)]) if a == *b => {}
            (None, [s]) if !s.is_letter() => {}
            _ => return Err(format!("malformed transition {} -> {}", tr.from, tr.to)),
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{label_occurrences, parse_rte_unchecked};
    use crate::machines::{enumerate_outputs, letters_of, parse_word, render_word};

    fn ab() -> Alphabet {
        ['a', 'b'].into_iter().collect()
    }

    fn parser(text: &str, mode: BuildMode) -> OneWayTransducer {
        let h = label_occurrences(&parse_rte_unchecked(text).unwrap());
        build_parser_with(&h, &ab(), mode).unwrap()
    }

    fn outputs(t: &OneWayTransducer, w: &str) -> Vec<String> {
        enumerate_outputs(t, &letters_of(w), 64).items.iter().map(|x| render_word(x)).collect()
    }

    #[test]
    fn base_state_count() {
        let t = parser("a*.b+a.b* -> \"\"", BuildMode::Full);
        assert_eq!(t.num_states, 7);
        check_parser_invariants(&t).unwrap();
    }

    #[test]
    fn basefun_copies() {
        let t = parser("dup{#}", BuildMode::Full);
        assert_eq!(t.num_states, 3);
        assert_eq!(outputs(&t, "ab"), vec!["(1 a b )1"]);
    }

    #[test]
    fn star_of_nothing() {
        let t = parser("(a -> \"c\")*", BuildMode::Full);
        assert_eq!(outputs(&t, ""), vec!["(2 )2"]);
        assert_eq!(outputs(&t, "aa"), vec!["(2 (1 a )1 (1 a )1 )2"]);
    }

    #[test]
    fn composite_counts() {
        let t = parser("(a -> \"c\") + (b -> \"d\")", BuildMode::Full);
        assert_eq!(t.num_states, 8);
        let t = parser("(a -> \"c\").(b -> \"d\")", BuildMode::Full);
        assert_eq!(t.num_states, 9);
        let t = parser("(a -> \"c\")*", BuildMode::Full);
        assert_eq!(t.num_states, 5);
        let t = parser("(a -> \"c\") odot (a -> \"d\")", BuildMode::Full);
        assert_eq!(t.num_states, 2 * 4 * 4 + 2);
        let trimmed = parser("(a -> \"c\") odot (a -> \"d\")", BuildMode::Trim);
        assert_eq!(trimmed.nominal_states, 34);
        assert!(trimmed.num_states < 34);
        check_parser_invariants(&trimmed).unwrap();
    }

    #[test]
    fn hadamard_puts_f_before_g() {
        let t = parser("(a -> \"c\") odot (a -> \"d\")", BuildMode::Trim);
        assert_eq!(outputs(&t, "a"), vec!["(3 (1 (2 a )1 )2 )3"]);
        assert!(outputs(&t, "b").is_empty());
    }

    #[test]
    fn kstar_short_and_long() {
        let text = "kstar{2, a}((a -> \"c\").(a -> \"d\"))";
        let t = parser(text, BuildMode::Trim);
        check_parser_invariants(&t).unwrap();
        assert_eq!(outputs(&t, ""), vec!["(4 )4"]);
        assert_eq!(outputs(&t, "a"), vec!["(4 a )4"]);
        let aa = outputs(&t, "aa");
        assert_eq!(aa, vec!["(4 (3^1 (1^1 a )1^1 (2^1 #4 a )2^1 )3^1 )4"]);
        let w = parse_word(&aa[0]).unwrap();
        assert_eq!(crate::machines::project_letters(&w), "aa");
        let full = parser(text, BuildMode::Full);
        let nq = 2u128;
        let pf = 9u128;
        assert_eq!(full.num_states as u128, 4 * nq * (pf + 1).pow(2) + nq + 2);
        assert_eq!(full.nominal_states, full.num_states as u128);
        assert_eq!(outputs(&full, "aaa"), outputs(&t, "aaa"));
    }

    #[test]
    fn kstar_index_helpers() {
        assert_eq!(next_index(3, 3), 1);
        assert_eq!(next_index(1, 3), 2);
        assert_eq!(rank(2, 1, 3), 0);
        assert_eq!(rank(1, 1, 3), 2);
    }

    #[test]
    fn alphabet_of_parentheses() {
        let h = label_occurrences(&parse_rte_unchecked("kstar{2, a}((a -> \"c\"))").unwrap());
        let alph = paren_alphabet(&h);
        assert_eq!(alph.len(), 3 + 4);
        assert!(alph.contains(&Sym::Open(1, 2)));
    }

    #[test]
    fn unsupported_k() {
        let h = label_occurrences(&parse_rte_unchecked("kstar{1, a}((a -> \"c\"))").unwrap());
        assert!(matches!(build_parser(&h, &ab()), Err(BuildError::Unsupported(_))));
    }
}
