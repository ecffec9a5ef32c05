use dynprop::engine::builtins::{self, MaxOutdegreeOracle, THREE_CLIQUE};
use dynprop::engine::{difftest, difftest_with, DifftestConfig, RuleBody, UpdateKind};
use dynprop::logic::{parse_formula, Formula};
use dynprop::padding::{difftest_padding, PaddingVariant, SplitDomain};

#[test]
fn three_clique_program_agrees_with_its_sentence() {
    let p = builtins::three_clique();
    let sentence = parse_formula(THREE_CLIQUE).unwrap();
    for n in [3, 4, 5] {
        let report = difftest(&p, &sentence, &DifftestConfig::new(n, 200, 12, 1)).unwrap();
        assert!(report.is_clean(), "{}", report.render());
        assert!(report.positives > 0);
    }
}

#[test]
fn dropping_a_disjunct_is_detected() {
    let mut p = builtins::three_clique();
    let rule = p
        .rules
        .iter_mut()
        .find(|r| r.symbol == "R" && r.on == UpdateKind::ins("E"))
        .unwrap();
    let RuleBody::Formula(Formula::Or(parts)) = &mut rule.body else { panic!() };
    let Formula::And(inner) = &mut parts[1] else { panic!() };
    let Formula::Or(cases) = inner.last_mut().unwrap() else { panic!() };
    cases.remove(0);
    let sentence = parse_formula(THREE_CLIQUE).unwrap();
    let report = difftest(&p, &sentence, &DifftestConfig::new(5, 200, 12, 1)).unwrap();
    assert!(!report.is_clean());
}

#[test]
fn difftest_is_reproducible() {
    let p = builtins::three_clique();
    let sentence = parse_formula(THREE_CLIQUE).unwrap();
    let cfg = DifftestConfig::new(4, 20, 6, 99);
    let a = difftest(&p, &sentence, &cfg).unwrap();
    let b = difftest(&p, &sentence, &cfg).unwrap();
    assert_eq!(a, b);
    let zero = difftest(&p, &sentence, &DifftestConfig::new(4, 20, 0, 99)).unwrap();
    assert_eq!(zero.checks, 20);
}

#[test]
fn max_outdegree_matches_recomputation() {
    let p = builtins::max_outdegree();
    for n in 2..=5 {
        let mut oracle = MaxOutdegreeOracle::new();
        let cfg = DifftestConfig::new(n, 200, 12, 3);
        let report = difftest_with(&p, &mut oracle, &cfg, &|s, _| s.elements().collect()).unwrap();
        assert!(report.is_clean(), "n={n}\n{}", report.render());
        assert!(report.checks > 1000, "n={n}: only {} checks", report.checks);
    }
}

#[test]
fn max_outdegree_as_written_disagrees() {
    let p = builtins::max_outdegree_as_written();
    let mut oracle = MaxOutdegreeOracle::new();
    let cfg = DifftestConfig::new(5, 200, 12, 3);
    let report = difftest_with(&p, &mut oracle, &cfg, &|s, _| s.elements().collect()).unwrap();
    assert!(!report.is_clean());
}

#[test]
fn padding_programs_track_random_properties() {
    for (variant, plus) in [
        (PaddingVariant::Ternary, 2),
        (PaddingVariant::Binary, 2),
        (PaddingVariant::Ternary, 3),
    ] {
        let split = SplitDomain::new(variant, plus).unwrap();
        let report = difftest_padding(split, 11, 100, 10, 5).unwrap();
        assert!(report.is_clean(), "{variant} {plus}\n{}", report.render());
    }
}
