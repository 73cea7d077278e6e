// SPDX-License-Identifier: Apache-2.0
//! Two-way reversible evaluators consuming parsed words.
//!
//! Every evaluator has the same frame: an initial `+` state whose only move
//! reads `⟨h`, and a final `+` state entered only on `⟩h`. Sub-evaluators are
//! spliced in by identifying (or replacing) their initial and final states
//! with states of the enclosing construction.

use std::collections::BTreeSet;

use crate::expr::{Alphabet, LNode, LabeledExpr, Occ};
use crate::machines::{Sign, StateId, Sym, TapeMode, TwoWayTransducer};
use crate::parser_build::{next_index, paren_alphabet, BuildError};

const P: Sign = Sign::Plus;
const M: Sign = Sign::Minus;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiftError {
    #[error("symbol {0} is already read by the machine")]
    Collision(String),
}

/// Letters plus every bracket and separator that may occur in parsings for `h`.
pub fn extended_alphabet(h: &LabeledExpr, sigma: &Alphabet) -> BTreeSet<Sym> {
    let mut out = paren_alphabet(h);
    out.extend(sigma.iter().map(|&c| Sym::Letter(c)));
    out
}

fn except(all: &BTreeSet<Sym>, removed: &[Sym]) -> Vec<Sym> {
    all.iter().copied().filter(|s| !removed.contains(s)).collect()
}

fn final_of(t: &TwoWayTransducer) -> StateId {
    *t.finals.iter().next().expect("evaluator has a final state")
}

/// Adds an ε-output self-loop on every ignored symbol to every state.
pub fn lift_ignoring(t: &TwoWayTransducer, ignore: &BTreeSet<Sym>) -> Result<TwoWayTransducer, LiftError> {
    let live = t.alphabet();
    if let Some(s) = ignore.iter().find(|s| live.contains(s)) {
        return Err(LiftError::Collision(s.ascii()));
    }
    let mut out = t.clone();
    for q in 0..t.num_states() {
        for &s in ignore {
            out.add(q, s, q, "");
        }
    }
    Ok(out)
}

/// Copies `src` into `dst`. Its initial and final states are mapped to
/// `entry` and `exit` when given; every freshly created state gets a
/// self-loop on each symbol of `loops`. Returns the state map.
fn splice(
    dst: &mut TwoWayTransducer,
    src: &TwoWayTransducer,
    entry: Option<StateId>,
    exit: Option<StateId>,
    relabel: impl Fn(Sym) -> Sym,
    loops: &[Sym],
) -> Vec<StateId> {
    let fin = final_of(src);
    let map: Vec<StateId> = (0..src.num_states())
        .map(|q| match (q == src.initial, q == fin, entry, exit) {
            (true, _, Some(e), _) => e,
            (_, true, _, Some(x)) => x,
            _ => {
                let n = dst.add_state(src.signs[q]);
                for &s in loops {
                    dst.add(n, s, n, "");
                }
                n
            }
        })
        .collect();
    for t in &src.transitions {
        dst.add(map[t.from], relabel(t.symbol), map[t.to], &t.output);
    }
    map
}

fn frame() -> (TwoWayTransducer, StateId) {
    let mut t = TwoWayTransducer::new(TapeMode::Bare);
    let init = t.add_state(P);
    t.initial = init;
    (t, init)
}

fn letters(sigma: &Alphabet) -> impl Iterator<Item = Sym> + '_ {
    sigma.iter().map(|&c| Sym::Letter(c))
}

pub fn eval_base(occ: Occ, v: &str, sigma: &Alphabet) -> TwoWayTransducer {
    let (mut t, s1) = frame();
    let s2 = t.add_state(P);
    let s3 = t.add_state(P);
    t.add(s1, Sym::open(occ), s2, "");
    for a in letters(sigma) {
        t.add(s2, a, s2, "");
    }
    t.add(s2, Sym::close(occ), s3, v);
    t.finals.insert(s3);
    t
}

/// Five states: copy forward, emit the separator, rewind, copy again.
pub fn eval_dup(occ: Occ, sep: char, sigma: &Alphabet) -> TwoWayTransducer {
    let (mut t, s1) = frame();
    let [s2, s3, s4, s5] = [P, M, P, P].map(|s| t.add_state(s));
    t.add(s1, Sym::open(occ), s2, "");
    t.add(s2, Sym::close(occ), s3, &sep.to_string());
    t.add(s3, Sym::open(occ), s4, "");
    t.add(s4, Sym::close(occ), s5, "");
    for a in letters(sigma) {
        let c = a.letter().unwrap().to_string();
        t.add(s2, a, s2, &c);
        t.add(s3, a, s3, "");
        t.add(s4, a, s4, &c);
    }
    t.finals.insert(s5);
    t
}

/// Five states: skip forward, copy while moving back, skip forward again.
pub fn eval_rev(occ: Occ, sigma: &Alphabet) -> TwoWayTransducer {
    let (mut t, s1) = frame();
    let [s2, s3, s4, s5] = [P, M, P, P].map(|s| t.add_state(s));
    t.add(s1, Sym::open(occ), s2, "");
    t.add(s2, Sym::close(occ), s3, "");
    t.add(s3, Sym::open(occ), s4, "");
    t.add(s4, Sym::close(occ), s5, "");
    for a in letters(sigma) {
        t.add(s2, a, s2, "");
        t.add(s3, a, s3, &a.letter().unwrap().to_string());
        t.add(s4, a, s4, "");
    }
    t.finals.insert(s5);
    t
}

pub fn eval_sum(occ: Occ, tf: &TwoWayTransducer, tg: &TwoWayTransducer) -> TwoWayTransducer {
    let (mut t, s1) = frame();
    let entry = t.add_state(P);
    let exit = t.add_state(P);
    let s4 = t.add_state(P);
    t.add(s1, Sym::open(occ), entry, "");
    splice(&mut t, tf, Some(entry), Some(exit), |s| s, &[]);
    splice(&mut t, tg, Some(entry), Some(exit), |s| s, &[]);
    t.add(exit, Sym::close(occ), s4, "");
    t.finals.insert(s4);
    t
}

pub fn eval_cauchy(occ: Occ, tf: &TwoWayTransducer, tg: &TwoWayTransducer) -> TwoWayTransducer {
    let (mut t, s1) = frame();
    let s2 = t.add_state(P);
    let mid = t.add_state(P);
    let s8 = t.add_state(P);
    let s9 = t.add_state(P);
    t.add(s1, Sym::open(occ), s2, "");
    splice(&mut t, tf, Some(s2), Some(mid), |s| s, &[]);
    splice(&mut t, tg, Some(mid), Some(s8), |s| s, &[]);
    t.add(s8, Sym::close(occ), s9, "");
    t.finals.insert(s9);
    t
}

pub fn eval_star(occ: Occ, tf: &TwoWayTransducer) -> TwoWayTransducer {
    let (mut t, s1) = frame();
    let hub = t.add_state(P);
    let s3 = t.add_state(P);
    t.add(s1, Sym::open(occ), hub, "");
    splice(&mut t, tf, Some(hub), Some(hub), |s| s, &[]);
    t.add(hub, Sym::close(occ), s3, "");
    t.finals.insert(s3);
    t
}

/// Skips to `g`, evaluates it, rewinds to `⟨h`, then evaluates `f` and skips to the end.
pub fn eval_cauchy_rev(
    h: &LabeledExpr,
    sigma: &Alphabet,
    tf: &TwoWayTransducer,
    tg: &TwoWayTransducer,
) -> TwoWayTransducer {
    let (f, g) = match &h.node {
        LNode::CauchyRev(f, g) => (f.occ, g.occ),
        _ => unreachable!("reverse product expected"),
    };
    let ext = extended_alphabet(h, sigma);
    let (oh, ch) = (Sym::open(h.occ), Sym::close(h.occ));
    let (mut t, s1) = frame();
    let s2 = t.add_state(P);
    let s5 = t.add_state(P);
    let s6 = t.add_state(M);
    let s7 = t.add_state(P);
    let s10 = t.add_state(P);
    let s11 = t.add_state(P);
    t.add(s1, oh, s2, "");
    for a in except(&ext, &[oh, Sym::open(g)]) {
        t.add(s2, a, s2, "");
    }
    splice(&mut t, tg, Some(s2), Some(s5), |s| s, &[]);
    t.add(s5, ch, s6, "");
    for b in except(&ext, &[oh, ch]) {
        t.add(s6, b, s6, "");
    }
    t.add(s6, oh, s7, "");
    splice(&mut t, tf, Some(s7), Some(s10), |s| s, &[]);
    for c in except(&ext, &[Sym::close(f), ch]) {
        t.add(s10, c, s10, "");
    }
    t.add(s10, ch, s11, "");
    t.finals.insert(s11);
    t
}

/// Runs to `⟩h`, then evaluates the factors from right to left, each time
/// rewinding to the opening bracket of the factor just evaluated.
pub fn eval_star_rev(h: &LabeledExpr, sigma: &Alphabet, tf: &TwoWayTransducer) -> TwoWayTransducer {
    let f = match &h.node {
        LNode::StarRev(f) => f.occ,
        _ => unreachable!("reverse star expected"),
    };
    let ext = extended_alphabet(h, sigma);
    let (oh, ch, of, cf) = (Sym::open(h.occ), Sym::close(h.occ), Sym::open(f), Sym::close(f));
    let (mut t, s1) = frame();
    let s2 = t.add_state(P);
    let s3 = t.add_state(M);
    let s4 = t.add_state(P);
    let s5 = t.add_state(P);
    let s6 = t.add_state(M);
    let s7 = t.add_state(M);
    t.add(s1, oh, s2, "");
    t.add(s2, ch, s3, "");
    t.add(s3, oh, s4, "");
    t.add(s4, ch, s5, "");
    for a in except(&ext, &[oh, ch]) {
        t.add(s2, a, s2, "");
        t.add(s4, a, s4, "");
    }
    t.add(s3, cf, s6, "");
    t.add(s7, of, s3, "");
    for b in except(&ext, &[of, cf]) {
        t.add(s6, b, s6, "");
        t.add(s7, b, s7, "");
    }
    splice(&mut t, tf, Some(s6), Some(s7), |s| s, &[]);
    t.finals.insert(s5);
    t
}

/// Evaluates `f` ignoring the brackets of `g`, rewinds, then evaluates `g`
/// ignoring the brackets of `f`.
pub fn eval_hadamard(
    h: &LabeledExpr,
    sigma: &Alphabet,
    tf: &TwoWayTransducer,
    tg: &TwoWayTransducer,
) -> Result<TwoWayTransducer, LiftError> {
    let (f, g) = match &h.node {
        LNode::Hadamard(f, g) => (f, g),
        _ => unreachable!("Hadamard product expected"),
    };
    let ext = extended_alphabet(h, sigma);
    let (oh, ch) = (Sym::open(h.occ), Sym::close(h.occ));
    let tf = lift_ignoring(tf, &paren_alphabet(g))?;
    let tg = lift_ignoring(tg, &paren_alphabet(f))?;
    let (mut t, s1) = frame();
    let mf = splice(&mut t, &tf, None, None, |s| s, &[]);
    let s6 = t.add_state(M);
    let mg = splice(&mut t, &tg, None, None, |s| s, &[]);
    let s11 = t.add_state(P);
    t.add(s1, oh, mf[tf.initial], "");
    t.add(mf[final_of(&tf)], ch, s6, "");
    for y in except(&ext, &[oh, ch]) {
        t.add(s6, y, s6, "");
    }
    t.add(s6, oh, mg[tg.initial], "");
    t.add(mg[final_of(&tg)], ch, s11, "");
    t.finals.insert(s11);
    Ok(t)
}

/// Symbols ignored by the copy of `T_f` working on index `i`.
fn ignored_by_copy(f: &LabeledExpr, k: u32, i: u32, sep: Sym) -> Vec<Sym> {
    let pf = paren_alphabet(f);
    let mut out: Vec<Sym> = (1..=k).filter(|&j| j != i).flat_map(|j| pf.iter().map(move |s| s.push_index(j))).collect();
    out.push(sep);
    out
}

fn index_by(i: u32) -> impl Fn(Sym) -> Sym {
    move |s| if s.is_letter() { s } else { s.push_index(i) }
}

fn kstar_parts(h: &LabeledExpr) -> Result<(u32, &LabeledExpr), BuildError> {
    match &h.node {
        LNode::KStar(k, _, f) | LNode::KStarRev(k, _, f) => {
            if *k < 2 {
                return Err(BuildError::Unsupported(format!("k = {k}")));
            }
            Ok((*k, f))
        }
        _ => unreachable!("k-star expected"),
    }
}

/// Forward k-star: block `i` is evaluated by the copy indexed `i mod k`;
/// after each block the head walks back to the opening bracket of the next.
pub fn eval_kstar(h: &LabeledExpr, sigma: &Alphabet, tf: &TwoWayTransducer) -> Result<TwoWayTransducer, BuildError> {
    let (k, f) = kstar_parts(h)?;
    let ext = extended_alphabet(h, sigma);
    let (oh, ch, sep) = (Sym::open(h.occ), Sym::close(h.occ), Sym::sep(h.occ));
    let of = |i: u32| Sym::open(f.occ).push_index(i);
    let cf = |i: u32| Sym::close(f.occ).push_index(i);
    let (mut t, s1) = frame();
    let s2 = t.add_state(P);
    let s401 = t.add_state(M);
    let s20 = t.add_state(P);
    let s21 = t.add_state(P);
    let s501 = t.add_state(M);
    let s502 = t.add_state(P);
    let s503 = t.add_state(M);
    t.add(s1, oh, s2, "");
    // Fewer than k factors: nothing to output.
    let short: Vec<Sym> = letters(sigma).chain([sep]).collect();
    for &a in &short {
        t.add(s2, a, s2, "");
    }
    t.add(s2, ch, s401, "");
    for &a in short.iter().chain([&oh]) {
        t.add(s401, a, s20, "");
    }
    t.add(s20, ch, s21, "");
    t.add(s2, of(1), s501, "");
    t.add(s501, oh, s502, "");
    for b in except(&ext, &[oh]) {
        t.add(s503, b, s502, "");
    }
    let mut entry = s502;
    let mut last_y = None;
    for i in 1..=k {
        let exit = t.add_state(P);
        let done = t.add_state(M);
        let back = t.add_state(M);
        let y = t.add_state(M);
        splice(&mut t, tf, Some(entry), Some(exit), index_by(i), &ignored_by_copy(f, k, i, sep));
        t.add(exit, ch, done, "");
        t.add(done, cf(i), s20, "");
        t.add(exit, sep, back, "");
        t.add(back, cf(i), y, "");
        let n = next_index(i, k);
        for s in except(&ext, &[cf(i), of(n)]) {
            t.add(y, s, y, "");
        }
        entry = y;
        last_y = Some(y);
    }
    // The walk back from the last copy re-enters the first copy through 503 and 502.
    let yk = last_y.expect("k >= 2");
    t.add(yk, of(1), s503, "");
    t.finals.insert(s21);
    Ok(t)
}

/// Reverse k-star: locates the last block, evaluates blocks from right to left.
pub fn eval_kstar_rev(
    h: &LabeledExpr,
    sigma: &Alphabet,
    tf: &TwoWayTransducer,
) -> Result<TwoWayTransducer, BuildError> {
    let (k, f) = kstar_parts(h)?;
    let ext = extended_alphabet(h, sigma);
    let (oh, ch, sep) = (Sym::open(h.occ), Sym::close(h.occ), Sym::sep(h.occ));
    let of = |i: u32| Sym::open(f.occ).push_index(i);
    let cf = |i: u32| Sym::close(f.occ).push_index(i);
    let (mut t, s1) = frame();
    let s2 = t.add_state(P);
    let s3 = t.add_state(M);
    let s20 = t.add_state(M);
    let s21 = t.add_state(P);
    let s22 = t.add_state(M);
    let s23 = t.add_state(P);
    let s24 = t.add_state(P);
    t.add(s1, oh, s2, "");
    for a in except(&ext, &[oh, ch]) {
        t.add(s2, a, s2, "");
        t.add(s21, a, s21, "");
    }
    t.add(s2, ch, s3, "");
    for a in letters(sigma).chain([sep, oh]) {
        t.add(s3, a, s23, "");
    }
    t.add(s20, oh, s21, "");
    t.add(s21, ch, s22, "");
    for p in ext.iter().copied().filter(|s| !s.is_letter() && *s != oh && *s != sep) {
        t.add(s22, p, s23, "");
    }
    t.add(s23, ch, s24, "");
    let ys: Vec<StateId> = (0..k).map(|_| t.add_state(M)).collect();
    let y = |i: u32| ys[(i - 1) as usize];
    for i in 1..=k {
        let exit = t.add_state(M);
        let back = t.add_state(M);
        let more = t.add_state(P);
        let first = t.add_state(P);
        t.add(s3, cf(i), y(i), "");
        for s in except(&ext, &[of(i), cf(i), of(next_index(i, k))]) {
            t.add(y(i), s, y(i), "");
        }
        splice(&mut t, tf, Some(y(i)), Some(exit), index_by(i), &ignored_by_copy(f, k, i, sep));
        for z in except(&ext, &[cf(i), of(i)]) {
            t.add(exit, z, exit, "");
        }
        t.add(exit, of(i), back, "");
        t.add(back, sep, more, "");
        let prev = if i == 1 { k } else { i - 1 };
        t.add(more, of(i), y(prev), "");
        t.add(back, oh, first, "");
        t.add(first, of(i), s20, "");
    }
    t.finals.insert(s24);
    Ok(t)
}

/// Compiles `h` into its evaluator.
pub fn build_evaluator(h: &LabeledExpr, sigma: &Alphabet) -> Result<TwoWayTransducer, BuildError> {
    let rec = |f: &LabeledExpr| build_evaluator(f, sigma);
    let lift = |e: LiftError| BuildError::Unsupported(e.to_string());
    Ok(match &h.node {
        LNode::Base(_, v) => eval_base(h.occ, v, sigma),
        LNode::Dup(sep) => eval_dup(h.occ, *sep, sigma),
        LNode::Rev => eval_rev(h.occ, sigma),
        LNode::Sum(f, g) => eval_sum(h.occ, &rec(f)?, &rec(g)?),
        LNode::Cauchy(f, g) => eval_cauchy(h.occ, &rec(f)?, &rec(g)?),
        LNode::CauchyRev(f, g) => eval_cauchy_rev(h, sigma, &rec(f)?, &rec(g)?),
        LNode::Star(f) => eval_star(h.occ, &rec(f)?),
        LNode::StarRev(f) => eval_star_rev(h, sigma, &rec(f)?),
        LNode::Hadamard(f, g) => eval_hadamard(h, sigma, &rec(f)?, &rec(g)?).map_err(lift)?,
        LNode::KStar(_, _, f) => eval_kstar(h, sigma, &rec(f)?)?,
        LNode::KStarRev(_, _, f) => eval_kstar_rev(h, sigma, &rec(f)?)?,
    })
}

/// State count predicted for the node `h`, given the sizes of the child evaluators.
pub fn predicted_states(h: &LabeledExpr, children: &[usize]) -> usize {
    match &h.node {
        LNode::Base(..) => 3,
        LNode::Dup(_) | LNode::Rev => 5,
        LNode::Sum(..) => children[0] + children[1],
        LNode::Cauchy(..) => 1 + children[0] + children[1],
        LNode::Star(_) => 1 + children[0],
        LNode::CauchyRev(..) | LNode::Hadamard(..) => children[0] + children[1] + 3,
        LNode::StarRev(_) => children[0] + 5,
        LNode::KStar(k, ..) | LNode::KStarRev(k, ..) => {
            let k = *k as usize;
            k * children[0] + 3 * k + 8
        }
    }
}

/// Checks the common frame: one initial `+` state without incoming moves
/// whose single move reads `⟨h`, and one final `+` state without outgoing
/// moves that is entered on `⟩h` only.
pub fn check_evaluator_shape(t: &TwoWayTransducer, occ: Occ) -> Result<(), String> {
    if t.finals.len() != 1 {
        return Err(format!("{} final states", t.finals.len()));
    }
    let fin = final_of(t);
    if t.signs[t.initial] != P || t.signs[fin] != P {
        return Err("initial and final states must be + states".into());
    }
    let out_init: Vec<_> = t.transitions.iter().filter(|x| x.from == t.initial).collect();
    if out_init.len() != 1 || out_init[0].symbol != Sym::open(occ) {
        return Err("initial state must have a single move on the opening bracket".into());
    }
    if t.transitions.iter().any(|x| x.to == t.initial) {
        return Err("initial state has incoming moves".into());
    }
    if t.transitions.iter().any(|x| x.from == fin) {
        return Err("final state has outgoing moves".into());
    }
    if t.transitions.iter().any(|x| x.to == fin && x.symbol != Sym::close(occ)) {
        return Err("final state entered on a symbol other than the closing bracket".into());
    }
    Ok(())
}
