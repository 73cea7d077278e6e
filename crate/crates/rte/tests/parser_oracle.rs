// SPDX-License-Identifier: Apache-2.0
mod common;

use common::*;
use rte::expr::label_occurrences;
use rte::machines::{enumerate_outputs_with, letters_of, render_word, EnumLimits};
use rte::oracle::{check_kstar_conditions, oracle_parsings, oracle_udom, OracleBound};
use rte::parser_build::{build_parser, check_parser_invariants};

#[test]
fn parser_outputs_match_oracle_parsings() {
    let mut compared = 0;
    for (n, h) in corpus(SEED, 120, 3, true).into_iter().enumerate() {
        let lh = label_occurrences(&h);
        let p = match build_parser(&lh, &sigma()) {
            Ok(p) => p,
            Err(_) => continue,
        };
        check_parser_invariants(&p).unwrap_or_else(|e| panic!("#{n} {h}: {e}"));
        let limits = EnumLimits { max_eps_run: 40, max_outputs: 512, max_steps: 200_000 };
        for w in words_up_to(4) {
            let got = enumerate_outputs_with(&p, &letters_of(&w), limits);
            let want = oracle_parsings(&lh, &w, OracleBound::default());
            if got.truncated || want.truncated {
                continue;
            }
            compared += 1;
            let g: Vec<String> = got.items.iter().map(|x| render_word(x)).collect();
            let o: Vec<String> = want.items.iter().map(|x| render_word(x)).collect();
            assert_eq!(g, o, "#{n} {h} on {w:?}");
            assert_eq!(g.len() == 1, oracle_udom(&lh, &w), "#{n} {h} on {w:?}");
            for x in &got.items {
                check_kstar_conditions(&lh, x).unwrap_or_else(|e| panic!("#{n} {h} on {w:?}: {e}"));
            }
        }
    }
    assert!(compared > 2000, "only {compared} comparisons");
}
