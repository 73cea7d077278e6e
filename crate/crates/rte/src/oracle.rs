// SPDX-License-Identifier: Apache-2.0
//! Brute-force semantics computed straight from the recursive definitions.
//!
//! Every quantity is evaluated on factors `w[i..j]` of a single input word
//! and memoized on `(occurrence, i, j)`. Nothing here uses the automata.

use std::collections::{BTreeSet, HashMap};

use crate::expr::{LNode, LabeledExpr, Occ, Regex};
use crate::machines::{project_letters, BoundedSet, ParsedWord, Sym};
use crate::parser_build::{next_index, rank};

/// Enumeration limits.
#[derive(Clone, Copy, Debug)]
pub struct OracleBound {
    /// Maximum number of elements kept in any set.
    pub max_items: usize,
    /// Maximum length of an output word or parsed word.
    pub max_len: usize,
    /// Maximum number of k-star factorizations explored per factor.
    pub max_factorizations: usize,
}

impl Default for OracleBound {
    fn default() -> Self {
        OracleBound { max_items: 256, max_len: 256, max_factorizations: 20_000 }
    }
}

/// Direct recursive membership test, independent of any automaton.
pub fn regex_matches(e: &Regex, w: &[char]) -> bool {
    match e {
        Regex::Empty => false,
        Regex::Epsilon => w.is_empty(),
        Regex::Letter(a) => w.len() == 1 && w[0] == *a,
        Regex::Sum(l, r) => regex_matches(l, w) || regex_matches(r, w),
        Regex::Concat(l, r) => (0..=w.len()).any(|m| regex_matches(l, &w[..m]) && regex_matches(r, &w[m..])),
        Regex::Star(inner) => {
            w.is_empty() || (1..=w.len()).any(|m| regex_matches(inner, &w[..m]) && regex_matches(e, &w[m..]))
        }
    }
}

type Key = (Occ, usize, usize);
type Factorization = Vec<(usize, usize)>;

/// Memoized evaluation context for one input word.
pub struct Oracle {
    w: Vec<char>,
    bound: OracleBound,
    dom: HashMap<Key, bool>,
    udom: HashMap<Key, bool>,
    rsem: HashMap<Key, BoundedSet<String>>,
    parsings: HashMap<Key, BoundedSet<ParsedWord>>,
    factorizations: HashMap<Key, (Vec<Factorization>, bool)>,
    in_e: HashMap<Key, bool>,
}

fn push_bounded<T: Ord>(set: &mut BoundedSet<T>, item: T, bound: &OracleBound, len: usize) {
    if len > bound.max_len || (set.items.len() >= bound.max_items && !set.items.contains(&item)) {
        set.truncated = true;
    } else {
        set.items.insert(item);
    }
}

/// All concatenations `x·y` with `x ∈ a`, `y ∈ b`.
fn concat_sets(a: &BoundedSet<String>, b: &BoundedSet<String>, bound: &OracleBound) -> BoundedSet<String> {
    let mut out = BoundedSet { items: BTreeSet::new(), truncated: a.truncated || b.truncated };
    for x in &a.items {
        for y in &b.items {
            let s = format!("{x}{y}");
            let len = s.chars().count();
            push_bounded(&mut out, s, bound, len);
        }
    }
    out
}

fn union_into<T: Ord + Clone>(
    dst: &mut BoundedSet<T>,
    src: &BoundedSet<T>,
    bound: &OracleBound,
    len: impl Fn(&T) -> usize,
) {
    dst.truncated |= src.truncated;
    for x in &src.items {
        push_bounded(dst, x.clone(), bound, len(x));
    }
}

fn wrap(occ: Occ, inner: impl IntoIterator<Item = Sym>) -> ParsedWord {
    let mut v = vec![Sym::open(occ)];
    v.extend(inner);
    v.push(Sym::close(occ));
    v
}

impl Oracle {
    pub fn new(w: &str) -> Self {
        Oracle::with_bound(w, OracleBound::default())
    }

    pub fn with_bound(w: &str, bound: OracleBound) -> Self {
        Oracle {
            w: w.chars().collect(),
            bound,
            dom: HashMap::new(),
            udom: HashMap::new(),
            rsem: HashMap::new(),
            parsings: HashMap::new(),
            factorizations: HashMap::new(),
            in_e: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    fn in_regex(&mut self, occ: Occ, e: &Regex, i: usize, j: usize) -> bool {
        if let Some(&b) = self.in_e.get(&(occ, i, j)) {
            return b;
        }
        let b = regex_matches(e, &self.w[i..j]);
        self.in_e.insert((occ, i, j), b);
        b
    }

    /// Whether `f` accepts the empty word (independent of position).
    fn nullable(&mut self, f: &LabeledExpr) -> bool {
        let mut probe = Oracle::with_bound("", self.bound);
        probe.dom_at(f, 0, 0)
    }

    pub fn dom_at(&mut self, h: &LabeledExpr, i: usize, j: usize) -> bool {
        let key = (h.occ, i, j);
        if let Some(&b) = self.dom.get(&key) {
            return b;
        }
        let b = match &h.node {
            LNode::Base(e, _) => self.in_regex(h.occ, e, i, j),
            LNode::Dup(_) | LNode::Rev => true,
            LNode::Sum(f, g) => self.dom_at(f, i, j) || self.dom_at(g, i, j),
            LNode::Cauchy(f, g) | LNode::CauchyRev(f, g) => {
                (i..=j).any(|m| self.dom_at(f, i, m) && self.dom_at(g, m, j))
            }
            LNode::Star(_) | LNode::StarRev(_) => !self.star_splits(h, i, j).0.is_empty() || i == j,
            LNode::Hadamard(f, g) => self.dom_at(f, i, j) && self.dom_at(g, i, j),
            LNode::KStar(..) | LNode::KStarRev(..) => !self.kstar_factorizations(h, i, j).0.is_empty(),
        };
        self.dom.insert(key, b);
        b
    }

    /// Factorizations of `w[i..j]` into nonempty factors of `dom f`, and whether `ε ∈ dom f`.
    fn star_splits(&mut self, h: &LabeledExpr, i: usize, j: usize) -> (Vec<Factorization>, bool) {
        let f = match &h.node {
            LNode::Star(f) | LNode::StarRev(f) => f,
            _ => unreachable!("star node expected"),
        };
        let eps = self.nullable(f);
        let mut all = Vec::new();
        let mut stack = vec![(i, Vec::new())];
        while let Some((p, acc)) = stack.pop() {
            if p == j {
                all.push(acc);
                if all.len() >= self.bound.max_factorizations {
                    break;
                }
                continue;
            }
            for m in (p + 1..=j).rev() {
                if self.dom_at(f, p, m) {
                    let mut next: Factorization = acc.clone();
                    next.push((p, m));
                    stack.push((m, next));
                }
            }
        }
        (all, eps)
    }

    /// Factorizations of `w[i..j]` satisfying the k-star domain condition.
    /// The flag is set when infinitely many exist or the enumeration was cut.
    fn kstar_factorizations(&mut self, h: &LabeledExpr, i: usize, j: usize) -> (Vec<Factorization>, bool) {
        let key = (h.occ, i, j);
        if let Some(r) = self.factorizations.get(&key) {
            return r.clone();
        }
        let (k, e, f) = match &h.node {
            LNode::KStar(k, e, f) | LNode::KStarRev(k, e, f) => (*k as usize, e, f),
            _ => unreachable!("k-star node expected"),
        };
        let mut found = Vec::new();
        let mut truncated = false;
        // A run of k empty factors inside a valid factorization can be pumped forever.
        let mut stack: Vec<(usize, usize, Factorization)> = vec![(i, 0, Vec::new())];
        let mut explored = 0usize;
        while let Some((p, eps_run, acc)) = stack.pop() {
            explored += 1;
            if explored > self.bound.max_factorizations * 8 {
                truncated = true;
                break;
            }
            if p == j {
                let max_run = acc
                    .iter()
                    .fold((0usize, 0usize), |(best, cur), &(a, b)| {
                        let cur = if a == b { cur + 1 } else { 0 };
                        (best.max(cur), cur)
                    })
                    .0;
                if max_run >= k {
                    truncated = true;
                }
                found.push(acc.clone());
                if found.len() >= self.bound.max_factorizations {
                    truncated = true;
                    break;
                }
            }
            for m in (p..=j).rev() {
                let run = if m == p { eps_run + 1 } else { 0 };
                if run > k || !self.in_regex(h.occ, e, p, m) {
                    continue;
                }
                let mut next = acc.clone();
                next.push((p, m));
                if next.len() >= k {
                    let (a, _) = next[next.len() - k];
                    if !self.dom_at(f, a, m) {
                        continue;
                    }
                }
                stack.push((m, run, next));
            }
        }
        if i == j {
            // One empty factor brackets exactly like zero factors.
            found.retain(|f| f.len() != 1);
        }
        let r = (found, truncated);
        self.factorizations.insert(key, r.clone());
        r
    }

    pub fn udom_at(&mut self, h: &LabeledExpr, i: usize, j: usize) -> bool {
        let key = (h.occ, i, j);
        if let Some(&b) = self.udom.get(&key) {
            return b;
        }
        let b = match &h.node {
            LNode::Base(e, _) => self.in_regex(h.occ, e, i, j),
            LNode::Dup(_) | LNode::Rev => true,
            LNode::Sum(f, g) => {
                (self.udom_at(f, i, j) && !self.dom_at(g, i, j)) || (self.udom_at(g, i, j) && !self.dom_at(f, i, j))
            }
            LNode::Cauchy(f, g) | LNode::CauchyRev(f, g) => {
                let splits: Vec<usize> = (i..=j).filter(|&m| self.dom_at(f, i, m) && self.dom_at(g, m, j)).collect();
                splits.len() == 1 && self.udom_at(f, i, splits[0]) && self.udom_at(g, splits[0], j)
            }
            LNode::Star(f) | LNode::StarRev(f) => {
                let (splits, eps) = self.star_splits(h, i, j);
                !eps && splits.len() == 1 && splits[0].iter().all(|&(a, b)| self.udom_at(f, a, b))
            }
            LNode::Hadamard(f, g) => self.udom_at(f, i, j) && self.udom_at(g, i, j),
            LNode::KStar(k, _, f) | LNode::KStarRev(k, _, f) => {
                let k = *k as usize;
                let (facts, truncated) = self.kstar_factorizations(h, i, j);
                !truncated
                    && facts.len() == 1
                    && (0..(facts[0].len() + 1).saturating_sub(k)).all(|s| {
                        let (a, _) = facts[0][s];
                        let (_, b) = facts[0][s + k - 1];
                        self.udom_at(f, a, b)
                    })
            }
        };
        self.udom.insert(key, b);
        b
    }

    pub fn rsem_at(&mut self, h: &LabeledExpr, i: usize, j: usize) -> BoundedSet<String> {
        let key = (h.occ, i, j);
        if let Some(r) = self.rsem.get(&key) {
            return r.clone();
        }
        let bound = self.bound;
        let r = match &h.node {
            LNode::Base(e, v) => {
                let mut s = BoundedSet::default();
                if self.in_regex(h.occ, e, i, j) {
                    s.items.insert(v.clone());
                }
                s
            }
            LNode::Dup(sep) => {
                let u: String = self.w[i..j].iter().collect();
                BoundedSet::exact([format!("{u}{sep}{u}")].into())
            }
            LNode::Rev => BoundedSet::exact([self.w[i..j].iter().rev().collect()].into()),
            LNode::Sum(f, g) => {
                let mut s = self.rsem_at(f, i, j);
                let t = self.rsem_at(g, i, j);
                union_into(&mut s, &t, &bound, |x| x.chars().count());
                s
            }
            LNode::Cauchy(f, g) | LNode::CauchyRev(f, g) => {
                let reverse = matches!(h.node, LNode::CauchyRev(..));
                let mut s = BoundedSet::default();
                for m in i..=j {
                    if !(self.dom_at(f, i, m) && self.dom_at(g, m, j)) {
                        continue;
                    }
                    let (a, b) = (self.rsem_at(f, i, m), self.rsem_at(g, m, j));
                    let part = if reverse { concat_sets(&b, &a, &bound) } else { concat_sets(&a, &b, &bound) };
                    union_into(&mut s, &part, &bound, |x| x.chars().count());
                }
                s
            }
            LNode::Star(f) | LNode::StarRev(f) => {
                let reverse = matches!(h.node, LNode::StarRev(_));
                let (splits, eps) = self.star_splits(h, i, j);
                let mut s = BoundedSet { items: BTreeSet::new(), truncated: eps };
                for fact in splits {
                    let mut acc = BoundedSet::exact([String::new()].into());
                    for &(a, b) in &fact {
                        let part = self.rsem_at(f, a, b);
                        acc = if reverse { concat_sets(&part, &acc, &bound) } else { concat_sets(&acc, &part, &bound) };
                    }
                    union_into(&mut s, &acc, &bound, |x| x.chars().count());
                }
                s
            }
            LNode::Hadamard(f, g) => {
                let (a, b) = (self.rsem_at(f, i, j), self.rsem_at(g, i, j));
                concat_sets(&a, &b, &bound)
            }
            LNode::KStar(k, _, f) | LNode::KStarRev(k, _, f) => {
                let reverse = matches!(h.node, LNode::KStarRev(..));
                let k = *k as usize;
                let (facts, truncated) = self.kstar_factorizations(h, i, j);
                let mut s = BoundedSet { items: BTreeSet::new(), truncated };
                for fact in facts {
                    let mut acc = BoundedSet::exact([String::new()].into());
                    for start in 0..(fact.len() + 1).saturating_sub(k) {
                        let (a, _) = fact[start];
                        let (_, b) = fact[start + k - 1];
                        let part = self.rsem_at(f, a, b);
                        acc = if reverse { concat_sets(&part, &acc, &bound) } else { concat_sets(&acc, &part, &bound) };
                    }
                    union_into(&mut s, &acc, &bound, |x| x.chars().count());
                }
                s
            }
        };
        self.rsem.insert(key, r.clone());
        r
    }

    pub fn parsings_at(&mut self, h: &LabeledExpr, i: usize, j: usize) -> BoundedSet<ParsedWord> {
        let key = (h.occ, i, j);
        if let Some(r) = self.parsings.get(&key) {
            return r.clone();
        }
        let bound = self.bound;
        let letters = |o: &Oracle, a: usize, b: usize| o.w[a..b].iter().map(|&c| Sym::Letter(c)).collect::<Vec<_>>();
        let mut out: BoundedSet<ParsedWord> = BoundedSet::default();
        match &h.node {
            LNode::Base(e, _) => {
                if self.in_regex(h.occ, e, i, j) {
                    out.items.insert(wrap(h.occ, letters(self, i, j)));
                }
            }
            LNode::Dup(_) | LNode::Rev => {
                out.items.insert(wrap(h.occ, letters(self, i, j)));
            }
            LNode::Sum(f, g) => {
                for c in [f, g] {
                    let p = self.parsings_at(c, i, j);
                    out.truncated |= p.truncated;
                    for x in p.items {
                        let y = wrap(h.occ, x);
                        let n = y.len();
                        push_bounded(&mut out, y, &bound, n);
                    }
                }
            }
            LNode::Cauchy(f, g) | LNode::CauchyRev(f, g) => {
                for m in i..=j {
                    if !(self.dom_at(f, i, m) && self.dom_at(g, m, j)) {
                        continue;
                    }
                    let (a, b) = (self.parsings_at(f, i, m), self.parsings_at(g, m, j));
                    out.truncated |= a.truncated || b.truncated;
                    for x in &a.items {
                        for y in &b.items {
                            let z = wrap(h.occ, x.iter().chain(y).copied());
                            let n = z.len();
                            push_bounded(&mut out, z, &bound, n);
                        }
                    }
                }
            }
            LNode::Star(f) | LNode::StarRev(f) => {
                let (splits, eps) = self.star_splits(h, i, j);
                out.truncated |= eps;
                for fact in splits {
                    let mut acc: Vec<ParsedWord> = vec![Vec::new()];
                    for &(a, b) in &fact {
                        let p = self.parsings_at(f, a, b);
                        out.truncated |= p.truncated;
                        let mut next = Vec::new();
                        for x in &acc {
                            for y in &p.items {
                                if next.len() >= bound.max_items {
                                    out.truncated = true;
                                    break;
                                }
                                next.push(x.iter().chain(y).copied().collect());
                            }
                        }
                        acc = next;
                    }
                    for x in acc {
                        let y = wrap(h.occ, x);
                        let n = y.len();
                        push_bounded(&mut out, y, &bound, n);
                    }
                }
            }
            LNode::Hadamard(f, g) => {
                let (a, b) = (self.parsings_at(f, i, j), self.parsings_at(g, i, j));
                out.truncated |= a.truncated || b.truncated;
                for x in &a.items {
                    for y in &b.items {
                        let z = wrap(h.occ, hadamard_merge(x, y));
                        let n = z.len();
                        push_bounded(&mut out, z, &bound, n);
                    }
                }
            }
            LNode::KStar(k, _, f) | LNode::KStarRev(k, _, f) => {
                let ku = *k as usize;
                let (facts, truncated) = self.kstar_factorizations(h, i, j);
                out.truncated |= truncated;
                for fact in facts {
                    let factors: Vec<Vec<Sym>> = fact.iter().map(|&(a, b)| letters(self, a, b)).collect();
                    if fact.len() < ku {
                        let mut inner = Vec::new();
                        for (n, u) in factors.iter().enumerate() {
                            if n > 0 {
                                inner.push(Sym::sep(h.occ));
                            }
                            inner.extend(u.iter().copied());
                        }
                        let z = wrap(h.occ, inner);
                        let n = z.len();
                        push_bounded(&mut out, z, &bound, n);
                        continue;
                    }
                    let mut choices: Vec<Vec<ParsedWord>> = vec![Vec::new()];
                    for start in 0..=fact.len() - ku {
                        let p = self.parsings_at(f, fact[start].0, fact[start + ku - 1].1);
                        out.truncated |= p.truncated;
                        let mut next = Vec::new();
                        for c in &choices {
                            for beta in &p.items {
                                if next.len() >= bound.max_items {
                                    out.truncated = true;
                                    break;
                                }
                                let mut c2 = c.clone();
                                c2.push(beta.clone());
                                next.push(c2);
                            }
                        }
                        choices = next;
                    }
                    for betas in choices {
                        let z = wrap(h.occ, kstar_merge(h.occ, f.occ, *k, &factors, &betas));
                        let n = z.len();
                        push_bounded(&mut out, z, &bound, n);
                    }
                }
            }
        }
        self.parsings.insert(key, out.clone());
        out
    }
}

/// Splits a parsed word into the bracket blocks around its letters.
fn gaps(x: &[Sym]) -> (Vec<Vec<Sym>>, Vec<Sym>) {
    let mut blocks = vec![Vec::new()];
    let mut letters = Vec::new();
    for &s in x {
        if s.is_letter() {
            letters.push(s);
            blocks.push(Vec::new());
        } else {
            blocks.last_mut().unwrap().push(s);
        }
    }
    (blocks, letters)
}

/// Interleaves two parsings of the same word: in every gap between letters
/// the brackets of `x` precede those of `y`.
pub fn hadamard_merge(x: &[Sym], y: &[Sym]) -> ParsedWord {
    let (bx, lx) = gaps(x);
    let (by, ly) = gaps(y);
    assert_eq!(lx, ly, "both parsings read the same word");
    let mut out = Vec::with_capacity(x.len() + y.len());
    for t in 0..bx.len() {
        out.extend_from_slice(&bx[t]);
        out.extend_from_slice(&by[t]);
        if t < lx.len() {
            out.push(lx[t]);
        }
    }
    out
}

/// Canonical shuffle of the window parsings `betas[j]` (one per window of `k`
/// consecutive factors) into `α_1 # … # α_n`, without the outer brackets.
pub fn kstar_merge(h_occ: Occ, f_occ: Occ, k: u32, factors: &[Vec<Sym>], betas: &[ParsedWord]) -> ParsedWord {
    let n = factors.len();
    let ku = k as usize;
    let close_f = |m: u32| Sym::close(f_occ).push_index(m);
    // pieces[j][l-1] is the part of window j's parsing that lies over factor j+l.
    let mut pieces: Vec<Vec<Vec<Sym>>> = Vec::with_capacity(betas.len());
    for (j, beta) in betas.iter().enumerate() {
        let m = next_index(j as u32, k);
        let gamma: Vec<Sym> = beta.iter().map(|s| if s.is_letter() { *s } else { s.push_index(m) }).collect();
        let (last, body) = gamma.split_last().expect("nonempty window parsing");
        debug_assert_eq!(*last, close_f(m));
        let mut parts = vec![Vec::new(); ku];
        let mut used = vec![0usize; ku];
        let mut p = 0usize;
        for &s in body {
            if s.is_letter() {
                while used[p] == factors[j + p].len() {
                    p += 1;
                }
                used[p] += 1;
            }
            parts[p].push(s);
        }
        parts[ku - 1].push(*last);
        pieces.push(parts);
    }
    let mut out = Vec::new();
    for i in 1..=n {
        if i > 1 {
            out.push(Sym::sep(h_occ));
        }
        let lo = i.saturating_sub(ku);
        let hi = (i - 1).min(n - ku);
        let mut segs: Vec<Vec<Vec<Sym>>> = Vec::new();
        let mut lead = Vec::new();
        let mut tail = None;
        for (j, row) in pieces.iter().enumerate().take(hi + 1).skip(lo) {
            let l = i - j;
            let mut piece = row[l - 1].clone();
            if l == ku {
                tail = piece.pop();
            }
            let (mut blocks, _) = gaps(&piece);
            let first = std::mem::take(&mut blocks[0]);
            if l == 1 {
                lead = first;
            } else {
                debug_assert!(first.is_empty());
            }
            segs.push(blocks);
        }
        out.extend(lead);
        for (t, &a) in factors[i - 1].iter().enumerate() {
            out.push(a);
            for blocks in &segs {
                if let Some(b) = blocks.get(t + 1) {
                    out.extend_from_slice(b);
                }
            }
        }
        out.extend(tail);
    }
    out
}

/// Word-level entry points.
pub fn oracle_dom(h: &LabeledExpr, w: &str) -> bool {
    let mut o = Oracle::new(w);
    let n = o.len();
    o.dom_at(h, 0, n)
}

pub fn oracle_udom(h: &LabeledExpr, w: &str) -> bool {
    let mut o = Oracle::new(w);
    let n = o.len();
    o.udom_at(h, 0, n)
}

pub fn oracle_rsem(h: &LabeledExpr, w: &str, bound: OracleBound) -> BoundedSet<String> {
    let mut o = Oracle::with_bound(w, bound);
    let n = o.len();
    o.rsem_at(h, 0, n)
}

pub fn oracle_usem(h: &LabeledExpr, w: &str) -> Option<String> {
    let mut o = Oracle::new(w);
    let n = o.len();
    if !o.udom_at(h, 0, n) {
        return None;
    }
    let r = o.rsem_at(h, 0, n);
    debug_assert_eq!(r.items.len(), 1);
    r.items.into_iter().next()
}

pub fn oracle_parsings(h: &LabeledExpr, w: &str, bound: OracleBound) -> BoundedSet<ParsedWord> {
    let mut o = Oracle::with_bound(w, bound);
    let n = o.len();
    o.parsings_at(h, 0, n)
}

/// Keeps letters and the brackets whose outermost index is `j`, with that index removed.
pub fn project_index(x: &[Sym], j: u32) -> ParsedWord {
    x.iter()
        .filter_map(|s| {
            if s.is_letter() {
                Some(*s)
            } else if s.outer_index() == j {
                Some(s.pop_index())
            } else {
                None
            }
        })
        .collect()
}

/// Keeps letters and the symbols of `alphabet`.
pub fn project_onto(x: &[Sym], alphabet: &BTreeSet<Sym>) -> ParsedWord {
    x.iter().copied().filter(|s| s.is_letter() || alphabet.contains(s)).collect()
}

/// Checks the six k-star parsing conditions for the top node `h` and,
/// recursively, for every k-star reached by decomposing `x`. Membership of
/// window parsings is decided with the oracle.
pub fn check_kstar_conditions(h: &LabeledExpr, x: &[Sym]) -> Result<(), String> {
    let open = Sym::open(h.occ);
    let close = Sym::close(h.occ);
    if x.first() != Some(&open) || x.last() != Some(&close) || x.len() < 2 {
        return Err(format!("parsing of occurrence {} is not enclosed in its brackets", h.occ));
    }
    let inner = &x[1..x.len() - 1];
    match &h.node {
        LNode::Base(..) | LNode::Dup(_) | LNode::Rev => Ok(()),
        LNode::Sum(f, g) => {
            let c = if inner.first() == Some(&Sym::open(f.occ)) { f } else { g };
            check_kstar_conditions(c, inner)
        }
        LNode::Cauchy(f, g) | LNode::CauchyRev(f, g) => {
            let cut = inner
                .iter()
                .position(|s| *s == Sym::close(f.occ))
                .ok_or_else(|| format!("missing close bracket of {}", f.occ))?;
            check_kstar_conditions(f, &inner[..=cut])?;
            check_kstar_conditions(g, &inner[cut + 1..])
        }
        LNode::Star(f) | LNode::StarRev(f) => {
            let mut rest = inner;
            while !rest.is_empty() {
                let cut = rest
                    .iter()
                    .position(|s| *s == Sym::close(f.occ))
                    .ok_or_else(|| format!("missing close bracket of {}", f.occ))?;
                check_kstar_conditions(f, &rest[..=cut])?;
                rest = &rest[cut + 1..];
            }
            Ok(())
        }
        LNode::Hadamard(f, g) => {
            let af = crate::parser_build::paren_alphabet(f);
            let ag = crate::parser_build::paren_alphabet(g);
            check_kstar_conditions(f, &project_onto(inner, &af))?;
            check_kstar_conditions(g, &project_onto(inner, &ag))
        }
        LNode::KStar(k, e, f) | LNode::KStarRev(k, e, f) => check_kstar_node(h.occ, *k, e, f, inner),
    }
}

fn check_kstar_node(occ: Occ, k: u32, e: &Regex, f: &LabeledExpr, inner: &[Sym]) -> Result<(), String> {
    if inner.is_empty() {
        // Zero factors; with a nullable factor language this coincides with one empty factor.
        return Ok(());
    }
    let alphas: Vec<&[Sym]> = inner.split(|s| *s == Sym::sep(occ)).collect();
    let n = alphas.len();
    let us: Vec<String> = alphas.iter().map(|a| project_letters(a)).collect();
    for (i, u) in us.iter().enumerate() {
        if !regex_matches(e, &u.chars().collect::<Vec<_>>()) {
            return Err(format!("factor {} = {u:?} is not in the factor language", i + 1));
        }
    }
    if n < k as usize {
        if inner.iter().any(|s| !s.is_letter() && *s != Sym::sep(occ)) {
            return Err("short factorization carries brackets".into());
        }
        return Ok(());
    }
    let ku = k as usize;
    let idx = |i: usize| next_index((i as u32 + k - 1) % k, k);
    let parens = |a: &[Sym]| a.iter().filter(|s| !s.is_letter()).copied().collect::<Vec<_>>();
    // (1) every window projects onto a parsing of f.
    for i in 0..=n - ku {
        let window: Vec<Sym> = alphas[i..i + ku].iter().flat_map(|a| a.iter().copied()).collect();
        let proj = project_index(&window, idx(i + 1));
        let u: String = us[i..i + ku].concat();
        let p = oracle_parsings(f, &u, OracleBound::default());
        // A truncated enumeration cannot refute membership.
        if !p.truncated && !p.items.contains(&proj) {
            return Err(format!("window {i} projects to a non-parsing"));
        }
        check_kstar_conditions(f, &proj)?;
    }
    for i in 1..=n {
        let a = alphas[i - 1];
        let ps = parens(a);
        // (2) no bracket of a window that has not started yet.
        if i < ku && ps.iter().any(|s| (i as u32 + 1..=k).contains(&s.outer_index())) {
            return Err(format!("alpha_{i} mentions a later window"));
        }
        // (3) no bracket of a window that never starts.
        if i + ku > n + 1 {
            for j in (n + 2).saturating_sub(ku).max(1)..=i {
                if ps.iter().any(|s| s.outer_index() == idx(j)) {
                    return Err(format!("alpha_{i} mentions missing window {j}"));
                }
            }
        }
        let end_f = Sym::close(f.occ).push_index(idx(i + 1));
        // (4)
        if i >= ku && a.last() != Some(&end_f) {
            return Err(format!("alpha_{i} does not end its window"));
        }
        // (5)
        if i + ku <= n + 1 {
            if a.first() != Some(&Sym::open(f.occ).push_index(idx(i))) {
                return Err(format!("alpha_{i} does not open its window"));
            }
        } else {
            let ok = a.first().is_some_and(Sym::is_letter) || a == [end_f] || (a.is_empty() && i < ku);
            if !ok {
                return Err(format!("alpha_{i} starts badly"));
            }
        }
        // (6) adjacent brackets follow the cyclic order starting after i.
        for pair in a.windows(2) {
            let (x, y) = (pair[0], pair[1]);
            if x.is_letter() || y.is_letter() || y == end_f {
                continue;
            }
            let ri = idx(i) as usize;
            if rank(x.outer_index(), ri as u32, k) > rank(y.outer_index(), ri as u32, k) {
                return Err(format!("alpha_{i} has brackets out of order"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{label_occurrences, parse_regex, parse_rte_unchecked};
    use crate::machines::{parse_word, render_word};

    fn lab(text: &str) -> LabeledExpr {
        label_occurrences(&parse_rte_unchecked(text).unwrap())
    }

    fn rendered(h: &LabeledExpr, w: &str) -> Vec<String> {
        oracle_parsings(h, w, OracleBound::default()).items.iter().map(|x| render_word(x)).collect()
    }

    #[test]
    fn matcher() {
        let e = parse_regex("(ab)*").unwrap();
        for (w, ok) in [("", true), ("ab", true), ("abab", true), ("a", false), ("ba", false)] {
            assert_eq!(regex_matches(&e, &w.chars().collect::<Vec<_>>()), ok, "{w}");
        }
    }

    #[test]
    fn sum_overlap() {
        let h = lab("(a -> \"c\") + (a -> \"d\")");
        assert!(oracle_dom(&h, "a"));
        assert!(!oracle_udom(&h, "a"));
        assert_eq!(oracle_usem(&h, "a"), None);
        assert_eq!(rendered(&h, "a").len(), 2);
        let r = oracle_rsem(&h, "a", OracleBound::default());
        assert_eq!(r.items, ["c".to_string(), "d".to_string()].into());
    }

    #[test]
    fn counting_star() {
        let f = lab("((a -> \"c\") + (b -> \"\"))*");
        let r = oracle_rsem(&f, "abab", OracleBound::default());
        assert_eq!(r.items, ["cc".to_string()].into());
        assert!(!r.truncated);
    }

    #[test]
    fn dup_and_rev() {
        assert_eq!(oracle_usem(&lab("dup{#}"), "ab"), Some("ab#ab".into()));
        assert_eq!(oracle_usem(&lab("dup{#}"), ""), Some("#".into()));
        assert_eq!(oracle_usem(&lab("rev"), "aab"), Some("baa".into()));
        assert_eq!(oracle_usem(&lab("a* -> \"v\""), "aaa"), Some("v".into()));
    }

    #[test]
    fn kstar_short_branch_and_windows() {
        let h = lab("kstar{2, a}((a -> \"c\").(a -> \"d\"))");
        assert!(oracle_dom(&h, "a"));
        assert_eq!(rendered(&h, "a"), vec!["(4 a )4"]);
        assert_eq!(rendered(&h, ""), vec!["(4 )4"]);
        let r = oracle_rsem(&h, "aaa", OracleBound::default());
        assert_eq!(r.items, ["cdcd".to_string()].into());
        let p = oracle_parsings(&h, "aaa", OracleBound::default());
        assert_eq!(p.items.len(), 1);
        let x = p.items.iter().next().unwrap();
        check_kstar_conditions(&h, x).unwrap();
        let rev = lab("kstar_r{2, a}((a -> \"c\").(a -> \"dd\"))");
        let r = oracle_rsem(&rev, "aaa", OracleBound::default());
        assert_eq!(r.items, ["cddcdd".to_string()].into());
    }

    #[test]
    fn kstar_checker_rejects_shuffles() {
        let h = lab("kstar{2, a}((a -> \"c\").(a -> \"d\"))");
        let good = rendered(&h, "aaa").pop().unwrap();
        let mut x = parse_word(&good).unwrap();
        check_kstar_conditions(&h, &x).unwrap();
        // Moving the closing bracket of the last window out of place breaks condition (4).
        let last = x.len() - 2;
        x.swap(last, last - 1);
        assert!(check_kstar_conditions(&h, &x).is_err());
    }

    #[test]
    fn nullable_factor_corner() {
        // With ε in L(e), the empty word has both the empty factorization and
        // the one-factor factorization; both yield the same bracketing.
        let h = lab("kstar{2, a*}((a* -> \"c\"))");
        let p = oracle_parsings(&h, "", OracleBound::default());
        assert!(p.truncated);
        assert!(!oracle_udom(&h, ""));
    }

    #[test]
    fn star_with_empty_factor_is_flagged() {
        let h = lab("(eps -> \"x\")*");
        let r = oracle_rsem(&h, "", OracleBound::default());
        assert!(r.truncated);
        assert!(!oracle_udom(&h, ""));
    }
}
