// SPDX-License-Identifier: Apache-2.0
//! Regular transducer expressions compiled to one-way parsers and two-way
//! reversible evaluators, with a functionality checker, a uniformizer and a
//! brute-force semantic oracle.

pub mod check;
pub mod config;
pub mod corpus;
pub mod evaluator_build;
pub mod expr;
pub mod machines;
pub mod oracle;
pub mod parser_build;
pub mod pipeline;
pub mod regex;
