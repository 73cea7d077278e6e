// SPDX-License-Identifier: Apache-2.0
//! Seeded random expressions and exhaustive word lists for differential checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{Alphabet, Expr, Regex};

/// Every word over `sigma` of length at most `n`, shortest first.
pub fn words_up_to(sigma: &Alphabet, n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut layer = vec![String::new()];
    for _ in 0..n {
        layer = layer.iter().flat_map(|w| sigma.iter().map(move |c| format!("{w}{c}"))).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Alphabets and shape knobs for [`random_rte`].
#[derive(Clone, Debug)]
pub struct Shape {
    pub sigma: Vec<char>,
    pub gamma: Vec<char>,
    pub separator: char,
    pub kstar: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { sigma: vec!['a', 'b'], gamma: vec!['c', 'd'], separator: '#', kstar: true }
    }
}

pub fn random_regex(r: &mut impl Rng, sigma: &[char], depth: u32) -> Regex {
    if depth == 0 || r.gen_bool(0.35) {
        return match r.gen_range(0..10) {
            0 => Regex::Epsilon,
            1..=4 => Regex::letter(sigma[0]),
            _ => Regex::letter(*sigma.last().unwrap()),
        };
    }
    match r.gen_range(0..3) {
        0 => Regex::sum(random_regex(r, sigma, depth - 1), random_regex(r, sigma, depth - 1)),
        1 => Regex::concat(random_regex(r, sigma, depth - 1), random_regex(r, sigma, depth - 1)),
        _ => Regex::star(random_regex(r, sigma, depth - 1)),
    }
}

fn random_output(r: &mut impl Rng, gamma: &[char]) -> String {
    let len = r.gen_range(0..=2);
    (0..len).map(|_| *gamma.choose(r).unwrap()).collect()
}

/// A random expression of bounded depth. k-star bodies have depth at most
/// one and contain no further k-star.
pub fn random_rte(r: &mut impl Rng, shape: &Shape, depth: u32) -> Expr {
    if depth == 0 || r.gen_bool(0.25) {
        return match r.gen_range(0..12) {
            0 => Expr::Dup(shape.separator),
            1 => Expr::Rev,
            _ => Expr::base(random_regex(r, &shape.sigma, 2), &random_output(r, &shape.gamma)),
        };
    }
    let d = depth - 1;
    let top = if shape.kstar { 9 } else { 7 };
    let inner = Shape { kstar: false, ..shape.clone() };
    match r.gen_range(0..top) {
        0 => Expr::sum(random_rte(r, shape, d), random_rte(r, shape, d)),
        1 => Expr::cauchy(random_rte(r, shape, d), random_rte(r, shape, d)),
        2 => Expr::cauchy_rev(random_rte(r, shape, d), random_rte(r, shape, d)),
        3 => Expr::star(random_rte(r, shape, d)),
        4 => Expr::star_rev(random_rte(r, shape, d)),
        5 | 6 => Expr::hadamard(random_rte(r, shape, d), random_rte(r, shape, d)),
        7 => Expr::kstar(r.gen_range(2..=3), random_regex(r, &shape.sigma, 2), random_rte(r, &inner, d.min(1))),
        _ => Expr::kstar_rev(r.gen_range(2..=3), random_regex(r, &shape.sigma, 2), random_rte(r, &inner, d.min(1))),
    }
}

/// `n` expressions drawn from `seed`.
pub fn corpus(seed: u64, n: usize, depth: u32, shape: &Shape) -> Vec<Expr> {
    let mut r = rng(seed);
    (0..n).map(|_| random_rte(&mut r, shape, depth)).collect()
}
