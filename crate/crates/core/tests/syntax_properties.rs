mod common;

use cascade_core::syntax::{operator_text, parse_expr, parse_operator};
use common::{gen, mixed, names, operator};

#[test]
fn operators_survive_print_and_parse() {
    let vars = names(&["x", "y", "z"]);
    for seed in 0..200 {
        let l = operator(&mut gen(seed), &vars, 2);
        let text = operator_text(&l);
        assert_eq!(parse_operator(&text, &vars).unwrap(), l, "seed {seed}: {text}");
    }
}

#[test]
fn expressions_survive_print_and_parse() {
    let vars = names(&["x", "y"]);
    for seed in 0..200 {
        let e = mixed(&mut gen(seed), &vars);
        let text = e.to_string();
        assert_eq!(parse_expr(&text, &vars).unwrap(), e, "seed {seed}: {text}");
    }
}
