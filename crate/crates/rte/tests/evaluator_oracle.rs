// SPDX-License-Identifier: Apache-2.0
mod common;

use std::collections::BTreeSet;

use common::*;
use rte::evaluator_build::{build_evaluator, check_evaluator_shape};
use rte::expr::{label_occurrences, LabeledExpr};
use rte::machines::{
    default_budget, enumerate_outputs_with, letters_of, render_word, run_two_way_traced, EnumLimits, RunOutcome,
    TwoWayTransducer,
};
use rte::oracle::{oracle_parsings, oracle_rsem, OracleBound};
use rte::parser_build::build_parser;

fn evaluate(t: &TwoWayTransducer, x: &[rte::machines::Sym]) -> String {
    let (out, trace) = run_two_way_traced(t, x, default_budget(t, x));
    match out {
        RunOutcome::Accept(v) => {
            assert_eq!(trace.first().unwrap().pos, 0);
            assert_eq!(trace.last().unwrap().pos, x.len());
            v
        }
        other => panic!("evaluator did not accept {}: {other:?}", render_word(x)),
    }
}

fn check(n: usize, lh: &LabeledExpr, t: &TwoWayTransducer) -> usize {
    let mut compared = 0;
    let parser = build_parser(lh, &sigma()).unwrap();
    let limits = EnumLimits { max_eps_run: 40, max_outputs: 512, max_steps: 200_000 };
    for w in words_up_to(4) {
        let want = oracle_rsem(lh, &w, OracleBound::default());
        let parsings = oracle_parsings(lh, &w, OracleBound::default());
        let via_oracle: BTreeSet<String> = parsings.items.iter().map(|x| evaluate(t, x)).collect();
        let parsed = enumerate_outputs_with(&parser, &letters_of(&w), limits);
        let via_parser: BTreeSet<String> = parsed.items.iter().map(|x| evaluate(t, x)).collect();
        if !want.truncated && !parsings.truncated {
            assert_eq!(via_oracle, want.items, "#{n} {} on {w:?}", lh.expr());
            compared += 1;
        }
        if !want.truncated && !parsed.truncated {
            assert_eq!(via_parser, want.items, "#{n} {} on {w:?} (parser)", lh.expr());
        }
    }
    compared
}

#[test]
fn evaluators_compute_the_relational_semantics() {
    let mut compared = 0;
    for (n, h) in corpus(SEED ^ 1, 150, 3, true).into_iter().enumerate() {
        let lh = label_occurrences(&h);
        let Ok(t) = build_evaluator(&lh, &sigma()) else { continue };
        assert!(t.is_reversible(), "#{n} {h}");
        check_evaluator_shape(&t, lh.occ).unwrap_or_else(|e| panic!("#{n} {h}: {e}"));
        compared += check(n, &lh, &t);
    }
    assert!(compared > 2500, "only {compared} comparisons");
}
