use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dynprop::compiler::{compile_semipositive, sentence_corpus};
use dynprop::engine::{random_database, Executor};
use dynprop::io::{structure_from_json, structure_to_json};
use dynprop::logic::{parse_formula, static_eval, Formula, Term};
use dynprop::structure::{Elem, Modification, Schema};

const VARS: [&str; 3] = ["x", "y", "z"];

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (0..3usize).prop_map(|i| Term::Var(VARS[i].into())),
        (0..3usize).prop_map(|i| Term::App("f".into(), vec![Term::Var(VARS[i].into())])),
    ];
    leaf.prop_recursive(2, 6, 1, |inner| inner.prop_map(|t| Term::App("f".into(), vec![t])))
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        any::<bool>().prop_map(Formula::Bool),
        (term(), term()).prop_map(|(a, b)| Formula::Rel("E".into(), vec![a, b])),
        (term(), term()).prop_map(|(a, b)| Formula::Eq(a, b)),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
            (0..3usize, inner.clone()).prop_map(|(i, f)| Formula::Exists(VARS[i].into(), Box::new(f))),
            (0..3usize, inner).prop_map(|(i, f)| Formula::Forall(VARS[i].into(), Box::new(f))),
        ]
    })
}

fn close(f: Formula) -> Formula {
    VARS.iter().fold(f, |f, v| Formula::Exists(v.to_string(), Box::new(f)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_formulas_parse_back_to_the_same_meaning(f in formula(), seed in any::<u64>()) {
        let text = f.to_string();
        let back = parse_formula(&text).unwrap();
        prop_assert_eq!(back.to_string(), text);
        let schema = Schema::graph().with_function("f", 1);
        let s = random_database(&schema, 3, 0.4, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(static_eval(&s, &close(f)).unwrap(), static_eval(&s, &close(back)).unwrap());
    }

    #[test]
    fn structure_documents_round_trip(seed in any::<u64>(), n in 1..6usize) {
        let schema = Schema::graph().with_relation("U", 1).with_constant("c").with_function("f", 1);
        let s = random_database(&schema, n, 0.3, &mut ChaCha8Rng::seed_from_u64(seed));
        let text = structure_to_json(&s);
        let back = structure_from_json(&text).unwrap();
        prop_assert_eq!(structure_to_json(&back), text);
        prop_assert_eq!(back, s);
    }

    #[test]
    fn compiled_queries_stay_true_under_insertions(
        which in 0..3usize,
        edges in prop::collection::vec((0..5usize, 0..5usize), 0..14),
    ) {
        let corpus = sentence_corpus();
        let (_, f) = &corpus[[0, 2, 5][which]];
        let p = compile_semipositive(f).unwrap();
        let ex = Executor::new(&p).unwrap();
        let g = random_database(&Schema::graph(), 5, 0.0, &mut ChaCha8Rng::seed_from_u64(0));
        let mut state = ex.init(&g).unwrap();
        let mut seen_true = false;
        for (a, b) in edges {
            state = ex.step(&state, &Modification::ins("E", &[Elem::from(a), Elem::from(b)])).unwrap();
            let q = state.query_bit();
            prop_assert!(q || !seen_true, "query dropped back to false");
            prop_assert_eq!(q, static_eval(&state.input(), f).unwrap());
            seen_true |= q;
        }
    }
}
