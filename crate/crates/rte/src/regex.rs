// SPDX-License-Identifier: Apache-2.0
//! Glushkov position automata.

use std::collections::BTreeSet;

use crate::expr::{Alphabet, Regex};

/// A nondeterministic automaton over letters. State 0 is initial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    pub num_states: usize,
    pub alphabet: Alphabet,
    pub initial: usize,
    pub finals: BTreeSet<usize>,
    pub transitions: Vec<(usize, char, usize)>,
}

struct Positions {
    nullable: bool,
    first: BTreeSet<usize>,
    last: BTreeSet<usize>,
}

fn analyse(e: &Regex, letters: &mut Vec<char>, follow: &mut Vec<BTreeSet<usize>>) -> Positions {
    match e {
        Regex::Empty => Positions { nullable: false, first: BTreeSet::new(), last: BTreeSet::new() },
        Regex::Epsilon => Positions { nullable: true, first: BTreeSet::new(), last: BTreeSet::new() },
        Regex::Letter(a) => {
            letters.push(*a);
            follow.push(BTreeSet::new());
            let p = letters.len();
            Positions { nullable: false, first: [p].into(), last: [p].into() }
        }
        Regex::Sum(l, r) => {
            let l = analyse(l, letters, follow);
            let r = analyse(r, letters, follow);
            Positions { nullable: l.nullable || r.nullable, first: &l.first | &r.first, last: &l.last | &r.last }
        }
        Regex::Concat(l, r) => {
            let l = analyse(l, letters, follow);
            let r = analyse(r, letters, follow);
            for &p in &l.last {
                follow[p - 1].extend(r.first.iter().copied());
            }
            Positions {
                nullable: l.nullable && r.nullable,
                first: if l.nullable { &l.first | &r.first } else { l.first },
                last: if r.nullable { &l.last | &r.last } else { r.last },
            }
        }
        Regex::Star(inner) => {
            let s = analyse(inner, letters, follow);
            for &p in &s.last {
                follow[p - 1].extend(s.first.iter().copied());
            }
            Positions { nullable: true, first: s.first, last: s.last }
        }
    }
}

/// Builds the position automaton of `e`: one state per letter occurrence
/// plus an initial state without incoming transitions.
pub fn glushkov(e: &Regex) -> Nfa {
    let mut letters = Vec::new();
    let mut follow = Vec::new();
    let pos = analyse(e, &mut letters, &mut follow);
    let mut transitions = Vec::new();
    for &p in &pos.first {
        transitions.push((0, letters[p - 1], p));
    }
    for (i, fol) in follow.iter().enumerate() {
        for &q in fol {
            transitions.push((i + 1, letters[q - 1], q));
        }
    }
    let mut finals = pos.last;
    if pos.nullable {
        finals.insert(0);
    }
    Nfa { num_states: letters.len() + 1, alphabet: e.letters(), initial: 0, finals, transitions }
}

impl Nfa {
    /// Successors of `p` on `a`.
    pub fn step(&self, p: usize, a: char) -> impl Iterator<Item = usize> + '_ {
        self.transitions.iter().filter(move |t| t.0 == p && t.1 == a).map(|t| t.2)
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.contains(&q)
    }

    /// Successor table indexed by state, then by letter.
    pub fn successor_table(&self) -> Vec<Vec<(char, usize)>> {
        let mut table = vec![Vec::new(); self.num_states];
        for &(p, a, q) in &self.transitions {
            table[p].push((a, q));
        }
        table
    }
}

/// Subset simulation.
pub fn nfa_accepts(a: &Nfa, w: &[char]) -> bool {
    let table = a.successor_table();
    let mut current: BTreeSet<usize> = [a.initial].into();
    for &c in w {
        current = current.iter().flat_map(|&p| table[p].iter().filter(|e| e.0 == c).map(|e| e.1)).collect();
        if current.is_empty() {
            return false;
        }
    }
    current.iter().any(|q| a.is_final(*q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_regex;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn running_example() {
        let e = parse_regex("a*.b+a.b*").unwrap();
        let a = glushkov(&e);
        assert_eq!(a.num_states, 5);
        assert!(nfa_accepts(&a, &chars("aab")));
        assert!(nfa_accepts(&a, &chars("ab")));
        assert!(!nfa_accepts(&a, &chars("ba")));
        assert!(!nfa_accepts(&a, &[]));
        assert!(a.transitions.iter().all(|t| t.2 != 0));
    }

    #[test]
    fn empty_language() {
        let a = glushkov(&Regex::Empty);
        assert_eq!(a.num_states, 1);
        assert!(a.finals.is_empty());
    }

    #[test]
    fn repeated_word() {
        let a = glushkov(&parse_regex("(ab)*").unwrap());
        assert_eq!(a.num_states, 3);
        for (w, ok) in [("", true), ("ab", true), ("abab", true), ("a", false), ("aba", false)] {
            assert_eq!(nfa_accepts(&a, &chars(w)), ok, "{w}");
        }
    }
}
