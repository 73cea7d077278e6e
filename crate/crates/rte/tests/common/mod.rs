// SPDX-License-Identifier: Apache-2.0
//! Seeded generators shared by the integration tests.
#![allow(dead_code)]

use rte::corpus::Shape;
use rte::expr::{Alphabet, Expr};

pub const SEED: u64 = 0x5eed_2026;

pub fn sigma() -> Alphabet {
    ['a', 'b'].into()
}

pub fn gamma() -> Alphabet {
    ['c', 'd'].into()
}

/// Output alphabet that also covers `dup` and `rev` outputs.
pub fn gamma_all() -> Alphabet {
    ['a', 'b', 'c', 'd', '#'].into()
}

/// Every word over `{a, b}` of length at most `n`.
pub fn words_up_to(n: usize) -> Vec<String> {
    rte::corpus::words_up_to(&sigma(), n)
}

/// A deterministic corpus of `n` expressions. `kstar` enables the k-star forms.
pub fn corpus(seed: u64, n: usize, depth: u32, kstar: bool) -> Vec<Expr> {
    rte::corpus::corpus(seed, n, depth, &Shape { kstar, ..Shape::default() })
}
