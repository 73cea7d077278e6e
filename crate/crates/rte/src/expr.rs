// SPDX-License-Identifier: Apache-2.0
//! Expression syntax: regular expressions, transducer expressions, the
//! textual surface syntax, occurrence labeling, size and width.

use std::collections::BTreeSet;
use std::fmt;

/// A finite alphabet of single characters.
pub type Alphabet = BTreeSet<char>;

/// Occurrence identifier attached to every node of a labeled expression.
pub type Occ = u32;

/// Classical regular expressions over single-character letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regex {
    Empty,
    Epsilon,
    Letter(char),
    Sum(Box<Regex>, Box<Regex>),
    Concat(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn letter(a: char) -> Regex {
        Regex::Letter(a)
    }

    pub fn sum(l: Regex, r: Regex) -> Regex {
        Regex::Sum(Box::new(l), Box::new(r))
    }

    pub fn concat(l: Regex, r: Regex) -> Regex {
        Regex::Concat(Box::new(l), Box::new(r))
    }

    pub fn star(e: Regex) -> Regex {
        Regex::Star(Box::new(e))
    }

    /// Concatenation of the letters of `w`, or epsilon when `w` is empty.
    pub fn word(w: &str) -> Regex {
        let mut it = w.chars().map(Regex::Letter);
        match it.next() {
            None => Regex::Epsilon,
            Some(first) => it.fold(first, Regex::concat),
        }
    }

    /// Sum of the given letters, or the empty language when there are none.
    pub fn any_of(letters: impl IntoIterator<Item = char>) -> Regex {
        let mut it = letters.into_iter().map(Regex::Letter);
        match it.next() {
            None => Regex::Empty,
            Some(first) => it.fold(first, Regex::sum),
        }
    }

    /// Number of letter occurrences.
    pub fn nl(&self) -> usize {
        match self {
            Regex::Empty | Regex::Epsilon => 0,
            Regex::Letter(_) => 1,
            Regex::Sum(l, r) | Regex::Concat(l, r) => l.nl() + r.nl(),
            Regex::Star(e) => e.nl(),
        }
    }

    /// Standard syntactic size: one per node.
    pub fn syntactic_size(&self) -> usize {
        match self {
            Regex::Empty | Regex::Epsilon | Regex::Letter(_) => 1,
            Regex::Sum(l, r) | Regex::Concat(l, r) => 1 + l.syntactic_size() + r.syntactic_size(),
            Regex::Star(e) => 1 + e.syntactic_size(),
        }
    }

    pub fn nullable(&self) -> bool {
        match self {
            Regex::Empty | Regex::Letter(_) => false,
            Regex::Epsilon | Regex::Star(_) => true,
            Regex::Sum(l, r) => l.nullable() || r.nullable(),
            Regex::Concat(l, r) => l.nullable() && r.nullable(),
        }
    }

    pub fn letters(&self) -> Alphabet {
        let mut out = Alphabet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters(&self, out: &mut Alphabet) {
        match self {
            Regex::Empty | Regex::Epsilon => {}
            Regex::Letter(a) => {
                out.insert(*a);
            }
            Regex::Sum(l, r) | Regex::Concat(l, r) => {
                l.collect_letters(out);
                r.collect_letters(out);
            }
            Regex::Star(e) => e.collect_letters(out),
        }
    }

    fn level(&self) -> u8 {
        match self {
            Regex::Sum(..) => 0,
            Regex::Concat(..) => 1,
            Regex::Star(_) => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Regex, paren: bool) -> fmt::Result {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Regex::Empty => write!(f, "empty"),
            Regex::Epsilon => write!(f, "eps"),
            Regex::Letter(a) => write!(f, "{a}"),
            Regex::Sum(l, r) => {
                child(f, l, false)?;
                write!(f, "+")?;
                child(f, r, r.level() == 0)
            }
            Regex::Concat(l, r) => {
                child(f, l, l.level() < 1)?;
                write!(f, ".")?;
                child(f, r, r.level() <= 1)
            }
            Regex::Star(e) => {
                child(f, e, e.level() < 2)?;
                write!(f, "*")
            }
        }
    }
}

/// Regular transducer expressions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Base(Regex, String),
    Sum(Box<Expr>, Box<Expr>),
    Cauchy(Box<Expr>, Box<Expr>),
    CauchyRev(Box<Expr>, Box<Expr>),
    Star(Box<Expr>),
    StarRev(Box<Expr>),
    Hadamard(Box<Expr>, Box<Expr>),
    KStar(u32, Regex, Box<Expr>),
    KStarRev(u32, Regex, Box<Expr>),
    Dup(char),
    Rev,
}

impl Expr {
    pub fn base(e: Regex, v: &str) -> Expr {
        Expr::Base(e, v.to_string())
    }
    pub fn sum(f: Expr, g: Expr) -> Expr {
        Expr::Sum(Box::new(f), Box::new(g))
    }
    pub fn cauchy(f: Expr, g: Expr) -> Expr {
        Expr::Cauchy(Box::new(f), Box::new(g))
    }
    pub fn cauchy_rev(f: Expr, g: Expr) -> Expr {
        Expr::CauchyRev(Box::new(f), Box::new(g))
    }
    pub fn star(f: Expr) -> Expr {
        Expr::Star(Box::new(f))
    }
    pub fn star_rev(f: Expr) -> Expr {
        Expr::StarRev(Box::new(f))
    }
    pub fn hadamard(f: Expr, g: Expr) -> Expr {
        Expr::Hadamard(Box::new(f), Box::new(g))
    }
    pub fn kstar(k: u32, e: Regex, f: Expr) -> Expr {
        Expr::KStar(k, e, Box::new(f))
    }
    pub fn kstar_rev(k: u32, e: Regex, f: Expr) -> Expr {
        Expr::KStarRev(k, e, Box::new(f))
    }

    /// Size as defined for the state-count bounds.
    pub fn size(&self) -> usize {
        match self {
            Expr::Base(e, v) => 1 + (1 + e.nl()) + v.chars().count().max(1),
            Expr::Sum(f, g) | Expr::Cauchy(f, g) | Expr::CauchyRev(f, g) | Expr::Hadamard(f, g) => {
                1 + f.size() + g.size()
            }
            Expr::Star(f) | Expr::StarRev(f) => 1 + f.size(),
            Expr::KStar(k, e, f) | Expr::KStarRev(k, e, f) => 1 + e.nl() + f.size() + *k as usize + 1,
            Expr::Dup(_) | Expr::Rev => 3,
        }
    }

    /// Number of passes over an input position needed to evaluate the expression.
    pub fn width(&self) -> usize {
        match self {
            Expr::Base(..) | Expr::Dup(_) | Expr::Rev => 1,
            Expr::Sum(f, g) | Expr::Cauchy(f, g) | Expr::CauchyRev(f, g) => f.width().max(g.width()),
            Expr::Star(f) | Expr::StarRev(f) => f.width(),
            Expr::Hadamard(f, g) => f.width() + g.width(),
            Expr::KStar(k, _, f) | Expr::KStarRev(k, _, f) => 2 + *k as usize * f.width(),
        }
    }

    /// Nesting depth, counting a leaf as depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Expr::Base(..) | Expr::Dup(_) | Expr::Rev => 1,
            Expr::Sum(f, g) | Expr::Cauchy(f, g) | Expr::CauchyRev(f, g) | Expr::Hadamard(f, g) => {
                1 + f.depth().max(g.depth())
            }
            Expr::Star(f) | Expr::StarRev(f) | Expr::KStar(_, _, f) | Expr::KStarRev(_, _, f) => 1 + f.depth(),
        }
    }

    pub fn uses_hadamard_or_kstar(&self) -> bool {
        match self {
            Expr::Hadamard(..) | Expr::KStar(..) | Expr::KStarRev(..) => true,
            Expr::Base(..) | Expr::Dup(_) | Expr::Rev => false,
            Expr::Sum(f, g) | Expr::Cauchy(f, g) | Expr::CauchyRev(f, g) => {
                f.uses_hadamard_or_kstar() || g.uses_hadamard_or_kstar()
            }
            Expr::Star(f) | Expr::StarRev(f) => f.uses_hadamard_or_kstar(),
        }
    }

    pub fn uses_kstar(&self) -> bool {
        match self {
            Expr::KStar(..) | Expr::KStarRev(..) => true,
            Expr::Base(..) | Expr::Dup(_) | Expr::Rev => false,
            Expr::Sum(f, g) | Expr::Cauchy(f, g) | Expr::CauchyRev(f, g) | Expr::Hadamard(f, g) => {
                f.uses_kstar() || g.uses_kstar()
            }
            Expr::Star(f) | Expr::StarRev(f) => f.uses_kstar(),
        }
    }

    fn level(&self) -> u8 {
        match self {
            Expr::Sum(..) => 0,
            Expr::Hadamard(..) => 1,
            Expr::Cauchy(..) | Expr::CauchyRev(..) => 2,
            Expr::Star(_) | Expr::StarRev(_) => 3,
            _ => 4,
        }
    }

    /// Checks letters against the declared alphabets.
    pub fn check_alphabets(&self, sigma: &Alphabet, gamma: &Alphabet) -> Result<(), SyntaxError> {
        let check_re = |e: &Regex| -> Result<(), SyntaxError> {
            for a in e.letters() {
                if !sigma.contains(&a) {
                    return Err(SyntaxError::UndeclaredInput(a));
                }
            }
            Ok(())
        };
        match self {
            Expr::Base(e, v) => {
                check_re(e)?;
                for c in v.chars() {
                    if !gamma.contains(&c) {
                        return Err(SyntaxError::UndeclaredOutput(c));
                    }
                }
                Ok(())
            }
            Expr::Sum(f, g) | Expr::Cauchy(f, g) | Expr::CauchyRev(f, g) | Expr::Hadamard(f, g) => {
                f.check_alphabets(sigma, gamma)?;
                g.check_alphabets(sigma, gamma)
            }
            Expr::Star(f) | Expr::StarRev(f) => f.check_alphabets(sigma, gamma),
            Expr::KStar(k, e, f) | Expr::KStarRev(k, e, f) => {
                if *k == 0 {
                    return Err(SyntaxError::ZeroK);
                }
                check_re(e)?;
                f.check_alphabets(sigma, gamma)
            }
            Expr::Dup(sep) => {
                if sigma.contains(sep) || !gamma.contains(sep) {
                    return Err(SyntaxError::BadSeparator(*sep));
                }
                copies_input(sigma, gamma)
            }
            Expr::Rev => copies_input(sigma, gamma),
        }
    }
}

fn copies_input(sigma: &Alphabet, gamma: &Alphabet) -> Result<(), SyntaxError> {
    match sigma.iter().find(|a| !gamma.contains(a)) {
        Some(a) => Err(SyntaxError::UndeclaredOutput(*a)),
        None => Ok(()),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
            if paren {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        let binary = |f: &mut fmt::Formatter<'_>, l: &Expr, op: &str, r: &Expr, lvl: u8| {
            child(f, l, l.level() < lvl)?;
            write!(f, "{op}")?;
            child(f, r, r.level() <= lvl)
        };
        match self {
            Expr::Base(e, v) => {
                write!(f, "({e} -> \"")?;
                for c in v.chars() {
                    if c == '"' || c == '\\' {
                        write!(f, "\\")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "\")")
            }
            Expr::Sum(l, r) => binary(f, l, " + ", r, 0),
            Expr::Hadamard(l, r) => binary(f, l, " odot ", r, 1),
            Expr::Cauchy(l, r) => binary(f, l, ".", r, 2),
            Expr::CauchyRev(l, r) => binary(f, l, " .r ", r, 2),
            Expr::Star(e) => {
                child(f, e, e.level() < 3)?;
                write!(f, "*")
            }
            Expr::StarRev(e) => {
                child(f, e, e.level() < 3)?;
                write!(f, "*r")
            }
            Expr::KStar(k, e, body) => write!(f, "kstar{{{k}, {e}}}({body})"),
            Expr::KStarRev(k, e, body) => write!(f, "kstar_r{{{k}, {e}}}({body})"),
            Expr::Dup(sep) => write!(f, "dup{{{sep}}}"),
            Expr::Rev => write!(f, "rev"),
        }
    }
}

/// Errors raised while reading expression text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SyntaxError {
    #[error("syntax error at byte {pos}: {msg}")]
    At { pos: usize, msg: String },
    #[error("input letter '{0}' is not in the declared input alphabet")]
    UndeclaredInput(char),
    #[error("output letter '{0}' is not in the declared output alphabet")]
    UndeclaredOutput(char),
    #[error("separator '{0}' must be an output letter outside the input alphabet")]
    BadSeparator(char),
    #[error("k must be at least 1")]
    ZeroK,
}

const RESERVED: [&str; 7] = ["eps", "empty", "odot", "dup", "rev", "kstar", "kstar_r"];

fn is_ident(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl<'a> Reader<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(SyntaxError::At { pos: self.pos, msg: msg.into() })
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> PResult<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected '{s}'"))
        }
    }

    /// Reads a reserved word if one starts here on an identifier boundary.
    fn keyword(&mut self) -> Option<&'static str> {
        self.skip_ws();
        let run: String = self.rest().chars().take_while(|c| is_ident(*c)).collect();
        RESERVED.iter().copied().find(|k| *k == run)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.keyword() == Some(kw) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    /// `op` followed by `r` not continuing an identifier.
    fn at_reversed(&mut self, op: char) -> bool {
        self.skip_ws();
        self.peek_at(0) == Some(op) && self.peek_at(1) == Some('r') && !self.peek_at(2).is_some_and(is_ident)
    }

    fn rte(&mut self) -> PResult<Expr> {
        let mut acc = self.hodot()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            let rhs = self.hodot()?;
            acc = Expr::sum(acc, rhs);
        }
        Ok(acc)
    }

    fn hodot(&mut self) -> PResult<Expr> {
        let mut acc = self.hcat()?;
        while self.eat_keyword("odot") {
            let rhs = self.hcat()?;
            acc = Expr::hadamard(acc, rhs);
        }
        Ok(acc)
    }

    fn hcat(&mut self) -> PResult<Expr> {
        let mut acc = self.hpost()?;
        loop {
            if self.at_reversed('.') {
                self.pos += 2;
                let rhs = self.hpost()?;
                acc = Expr::cauchy_rev(acc, rhs);
            } else if self.peek() == Some('.') {
                self.pos += 1;
                let rhs = self.hpost()?;
                acc = Expr::cauchy(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn hpost(&mut self) -> PResult<Expr> {
        let mut acc = self.hatom()?;
        loop {
            if self.at_reversed('*') {
                self.pos += 2;
                acc = Expr::star_rev(acc);
            } else if self.peek() == Some('*') {
                self.pos += 1;
                acc = Expr::star(acc);
            } else {
                return Ok(acc);
            }
        }
    }

    fn hatom(&mut self) -> PResult<Expr> {
        self.skip_ws();
        match self.keyword() {
            Some("dup") => {
                self.pos += 3;
                self.expect("{")?;
                self.skip_ws();
                let sep = match self.rest().chars().next() {
                    Some(c) if c != '}' => c,
                    _ => return self.err("expected a separator letter"),
                };
                self.pos += sep.len_utf8();
                self.expect("}")?;
                return Ok(Expr::Dup(sep));
            }
            Some("rev") => {
                self.pos += 3;
                return Ok(Expr::Rev);
            }
            Some(kw @ ("kstar" | "kstar_r")) => {
                self.pos += kw.len();
                self.expect("{")?;
                let k = self.number()?;
                self.expect(",")?;
                let e = self.regex()?;
                self.expect("}")?;
                self.expect("(")?;
                let body = self.rte()?;
                self.expect(")")?;
                return Ok(if kw == "kstar" { Expr::kstar(k, e, body) } else { Expr::kstar_rev(k, e, body) });
            }
            _ => {}
        }
        let start = self.pos;
        match self.base() {
            Ok(b) => Ok(b),
            Err(base_err) => {
                self.pos = start;
                if self.eat("(") {
                    let inner = self.rte()?;
                    self.expect(")")?;
                    Ok(inner)
                } else {
                    Err(base_err)
                }
            }
        }
    }

    fn base(&mut self) -> PResult<Expr> {
        let e = self.regex()?;
        self.expect("->")?;
        let v = self.string()?;
        Ok(Expr::Base(e, v))
    }

    fn number(&mut self) -> PResult<u32> {
        self.skip_ws();
        let digits: String = self.rest().chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return self.err("expected a number");
        }
        let n = digits.parse::<u32>().or_else(|_| self.err("number out of range"))?;
        self.pos += digits.len();
        Ok(n)
    }

    fn string(&mut self) -> PResult<String> {
        self.skip_ws();
        if !self.rest().starts_with('"') {
            return self.err("expected a quoted output word");
        }
        self.pos += 1;
        let mut out = String::new();
        loop {
            let c = match self.rest().chars().next() {
                Some(c) => c,
                None => return self.err("unterminated string"),
            };
            self.pos += c.len_utf8();
            match c {
                '"' => return Ok(out),
                '\\' => {
                    let d = match self.rest().chars().next() {
                        Some(d) => d,
                        None => return self.err("unterminated escape"),
                    };
                    self.pos += d.len_utf8();
                    out.push(d);
                }
                _ => out.push(c),
            }
        }
    }

    fn regex(&mut self) -> PResult<Regex> {
        let mut acc = self.rcat()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            let rhs = self.rcat()?;
            acc = Regex::sum(acc, rhs);
        }
        Ok(acc)
    }

    fn rcat(&mut self) -> PResult<Regex> {
        let mut acc = self.rpost()?;
        loop {
            if self.peek() == Some('.') {
                self.pos += 1;
                let rhs = self.rpost()?;
                acc = Regex::concat(acc, rhs);
            } else if self.regex_atom_starts() {
                let rhs = self.rpost()?;
                acc = Regex::concat(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn regex_atom_starts(&mut self) -> bool {
        match self.peek() {
            Some('(') => true,
            Some(c) if is_ident(c) => matches!(self.keyword(), None | Some("eps") | Some("empty")),
            _ => false,
        }
    }

    fn rpost(&mut self) -> PResult<Regex> {
        let mut acc = self.ratom()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            acc = Regex::star(acc);
        }
        Ok(acc)
    }

    fn ratom(&mut self) -> PResult<Regex> {
        if self.eat_keyword("eps") {
            return Ok(Regex::Epsilon);
        }
        if self.eat_keyword("empty") {
            return Ok(Regex::Empty);
        }
        if self.keyword().is_some() {
            return self.err("reserved word where a letter was expected");
        }
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.regex()?;
                self.expect(")")?;
                Ok(e)
            }
            Some(c) if is_ident(c) => {
                // A run of letters is read one letter at a time; the caller
                // concatenates juxtaposed atoms.
                self.pos += c.len_utf8();
                Ok(Regex::Letter(c))
            }
            _ => self.err("expected a letter, 'eps', 'empty' or '('"),
        }
    }
}

/// Parses expression text and checks it against the declared alphabets.
pub fn parse_rte(text: &str, sigma: &Alphabet, gamma: &Alphabet) -> Result<Expr, SyntaxError> {
    let e = parse_rte_unchecked(text)?;
    e.check_alphabets(sigma, gamma)?;
    Ok(e)
}

/// Parses expression text without alphabet checks.
pub fn parse_rte_unchecked(text: &str) -> Result<Expr, SyntaxError> {
    let mut r = Reader { src: text, pos: 0 };
    let e = r.rte()?;
    r.skip_ws();
    if r.pos != text.len() {
        return r.err("unexpected trailing input");
    }
    Ok(e)
}

/// Parses a bare regular expression.
pub fn parse_regex(text: &str) -> Result<Regex, SyntaxError> {
    let mut r = Reader { src: text, pos: 0 };
    let e = r.regex()?;
    r.skip_ws();
    if r.pos != text.len() {
        return r.err("unexpected trailing input");
    }
    Ok(e)
}

/// An expression whose nodes each carry a distinct occurrence identifier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledExpr {
    pub occ: Occ,
    pub node: LNode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LNode {
    Base(Regex, String),
    Sum(Box<LabeledExpr>, Box<LabeledExpr>),
    Cauchy(Box<LabeledExpr>, Box<LabeledExpr>),
    CauchyRev(Box<LabeledExpr>, Box<LabeledExpr>),
    Star(Box<LabeledExpr>),
    StarRev(Box<LabeledExpr>),
    Hadamard(Box<LabeledExpr>, Box<LabeledExpr>),
    KStar(u32, Regex, Box<LabeledExpr>),
    KStarRev(u32, Regex, Box<LabeledExpr>),
    Dup(char),
    Rev,
}

/// Numbers the nodes of `h` in post-order, starting from 1.
pub fn label_occurrences(h: &Expr) -> LabeledExpr {
    let mut next = 1;
    label(h, &mut next)
}

fn label(h: &Expr, next: &mut Occ) -> LabeledExpr {
    let mut sub = |e: &Expr| Box::new(label(e, next));
    let node = match h {
        Expr::Base(e, v) => LNode::Base(e.clone(), v.clone()),
        Expr::Sum(f, g) => {
            let l = sub(f);
            LNode::Sum(l, sub(g))
        }
        Expr::Cauchy(f, g) => {
            let l = sub(f);
            LNode::Cauchy(l, sub(g))
        }
        Expr::CauchyRev(f, g) => {
            let l = sub(f);
            LNode::CauchyRev(l, sub(g))
        }
        Expr::Hadamard(f, g) => {
            let l = sub(f);
            LNode::Hadamard(l, sub(g))
        }
        Expr::Star(f) => LNode::Star(sub(f)),
        Expr::StarRev(f) => LNode::StarRev(sub(f)),
        Expr::KStar(k, e, f) => LNode::KStar(*k, e.clone(), sub(f)),
        Expr::KStarRev(k, e, f) => LNode::KStarRev(*k, e.clone(), sub(f)),
        Expr::Dup(s) => LNode::Dup(*s),
        Expr::Rev => LNode::Rev,
    };
    let occ = *next;
    *next += 1;
    LabeledExpr { occ, node }
}

impl LabeledExpr {
    /// Drops the labels.
    pub fn expr(&self) -> Expr {
        let b = |e: &LabeledExpr| Box::new(e.expr());
        match &self.node {
            LNode::Base(e, v) => Expr::Base(e.clone(), v.clone()),
            LNode::Sum(f, g) => Expr::Sum(b(f), b(g)),
            LNode::Cauchy(f, g) => Expr::Cauchy(b(f), b(g)),
            LNode::CauchyRev(f, g) => Expr::CauchyRev(b(f), b(g)),
            LNode::Hadamard(f, g) => Expr::Hadamard(b(f), b(g)),
            LNode::Star(f) => Expr::Star(b(f)),
            LNode::StarRev(f) => Expr::StarRev(b(f)),
            LNode::KStar(k, e, f) => Expr::KStar(*k, e.clone(), b(f)),
            LNode::KStarRev(k, e, f) => Expr::KStarRev(*k, e.clone(), b(f)),
            LNode::Dup(s) => Expr::Dup(*s),
            LNode::Rev => Expr::Rev,
        }
    }

    pub fn children(&self) -> Vec<&LabeledExpr> {
        match &self.node {
            LNode::Base(..) | LNode::Dup(_) | LNode::Rev => vec![],
            LNode::Sum(f, g) | LNode::Cauchy(f, g) | LNode::CauchyRev(f, g) | LNode::Hadamard(f, g) => {
                vec![f, g]
            }
            LNode::Star(f) | LNode::StarRev(f) | LNode::KStar(_, _, f) | LNode::KStarRev(_, _, f) => vec![f],
        }
    }

    /// All nodes in post-order.
    pub fn nodes(&self) -> Vec<&LabeledExpr> {
        let mut out = Vec::new();
        fn walk<'a>(h: &'a LabeledExpr, out: &mut Vec<&'a LabeledExpr>) {
            for c in h.children() {
                walk(c, out);
            }
            out.push(h);
        }
        walk(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        self.expr().size()
    }

    pub fn width(&self) -> usize {
        self.expr().width()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        ['a', 'b'].into_iter().collect()
    }

    fn cd() -> Alphabet {
        ['a', 'b', 'c', 'd', 'x', 'y', '#'].into_iter().collect()
    }

    fn running_example() -> Regex {
        let a = Regex::letter('a');
        let b = Regex::letter('b');
        Regex::sum(Regex::concat(Regex::star(a.clone()), b.clone()), Regex::concat(a, Regex::star(b)))
    }

    #[test]
    fn literal_counts() {
        assert_eq!(running_example().nl(), 4);
        assert_eq!(Regex::Epsilon.nl(), 0);
        assert_eq!(parse_regex("(ab)*").unwrap().nl(), 2);
    }

    #[test]
    fn sizes() {
        let b = Expr::base(Regex::letter('a'), "bc");
        assert_eq!(b.size(), 5);
        assert_eq!(Expr::sum(b.clone(), b).size(), 11);
        assert_eq!(Expr::Dup('#').size(), 3);
        assert_eq!(Expr::Rev.size(), 3);
        assert_eq!(Expr::base(Regex::Epsilon, "").size(), 3);
    }

    #[test]
    fn widths() {
        let f = Expr::base(Regex::letter('a'), "c");
        let g = Expr::base(Regex::letter('b'), "d");
        assert_eq!(Expr::hadamard(f.clone(), g).width(), 2);
        assert_eq!(Expr::base(Regex::star(Regex::letter('a')), "v").width(), 1);
        assert_eq!(Expr::kstar(2, Regex::letter('a'), f).width(), 4);
    }

    #[test]
    fn parses_examples() {
        let e = parse_rte("(a -> \"c\") + (a -> \"d\")", &ab(), &cd()).unwrap();
        assert_eq!(e, Expr::sum(Expr::base(Regex::letter('a'), "c"), Expr::base(Regex::letter('a'), "d")));
        let e = parse_rte("((a*.b -> \"x\") odot (a.b* -> \"y\"))", &ab(), &cd()).unwrap();
        let a = Regex::letter('a');
        let b = Regex::letter('b');
        assert_eq!(
            e,
            Expr::hadamard(
                Expr::base(Regex::concat(Regex::star(a.clone()), b.clone()), "x"),
                Expr::base(Regex::concat(a.clone(), Regex::star(b)), "y"),
            )
        );
        let e = parse_rte("kstar{2, a}((a -> \"c\").(a -> \"d\"))", &ab(), &cd()).unwrap();
        assert_eq!(e, Expr::kstar(2, a.clone(), Expr::cauchy(Expr::base(a.clone(), "c"), Expr::base(a, "d"))));
        assert_eq!(e.to_string(), "kstar{2, a}((a -> \"c\").(a -> \"d\"))");
    }

    #[test]
    fn reverse_operators_and_keywords() {
        let e = parse_rte_unchecked("(a -> \"c\") .r rev*r . dup{#}").unwrap();
        assert_eq!(
            e,
            Expr::cauchy(
                Expr::cauchy_rev(Expr::base(Regex::letter('a'), "c"), Expr::star_rev(Expr::Rev)),
                Expr::Dup('#')
            )
        );
        let juxt = parse_regex("ab*").unwrap();
        assert_eq!(juxt, Regex::concat(Regex::letter('a'), Regex::star(Regex::letter('b'))));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_rte_unchecked("(a -> \"c\") + ") {
            Err(SyntaxError::At { pos, .. }) => assert!(pos >= 12),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(parse_rte("(z -> \"c\")", &ab(), &cd()), Err(SyntaxError::UndeclaredInput('z')));
        assert_eq!(parse_rte("(a -> \"q\")", &ab(), &cd()), Err(SyntaxError::UndeclaredOutput('q')));
        assert_eq!(parse_rte("dup{a}", &ab(), &cd()), Err(SyntaxError::BadSeparator('a')));
        assert_eq!(parse_rte("kstar{0, a}(rev)", &ab(), &cd()), Err(SyntaxError::ZeroK));
    }

    #[test]
    fn post_order_labels() {
        let h = Expr::sum(
            Expr::cauchy(Expr::star(Expr::base(Regex::letter('a'), "")), Expr::base(Regex::letter('b'), "")),
            Expr::cauchy(Expr::base(Regex::letter('a'), ""), Expr::star(Expr::base(Regex::letter('b'), ""))),
        );
        let l = label_occurrences(&h);
        let occs: Vec<Occ> = l.nodes().iter().map(|n| n.occ).collect();
        assert_eq!(occs, (1..=9).collect::<Vec<_>>());
        assert_eq!(l.occ, 9);
        assert_eq!(l.expr(), h);
        assert_eq!(label_occurrences(&Expr::base(Regex::letter('a'), "c")).nodes().len(), 1);
    }
}
