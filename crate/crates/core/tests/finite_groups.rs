mod common;

use std::collections::BTreeSet;

use groupeq::eqlang::{Equation, EquationSystem};
use groupeq::fingroup::{
    build_group, build_group_seeded, centralizer, commutator_subgroup, subgroup_closure, FiniteGroup, Subgroup,
    DEFAULT_SIZE_CAP,
};
use groupeq::solvecount::{
    count_epimorphisms, divisibility_verdicts, enumerate_solutions, CoefficientBinding, Theorem, DEFAULT_EVAL_BUDGET,
};
use groupeq::word::{Letter, Word};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

const SMALL: [&str; 12] = [
    "C1",
    "C2",
    "C5",
    "C6",
    "S3",
    "D4",
    "D5",
    "A4",
    "D6",
    "S4",
    "product(C2,C2)",
    "perm{(1 2 3 4)(5 6 7 8), (1 5 3 7)(2 8 4 6)}",
];

fn group(spec: &str) -> FiniteGroup {
    build_group(spec, DEFAULT_SIZE_CAP).unwrap_or_else(|e| panic!("{spec}: {e}"))
}

fn check_subgroup(g: &FiniteGroup, h: &Subgroup) {
    assert!(h.contains(g.identity()));
    for &a in h.members() {
        assert!(h.contains(g.inv(a)));
        for &b in h.members() {
            assert!(h.contains(g.mul(a, b)));
        }
    }
    assert_eq!(g.order() % h.order(), 0, "Lagrange");
}

#[test]
fn subgroup_constructions_are_sound() {
    for spec in SMALL {
        let g = group(spec);
        let d = commutator_subgroup(&g);
        check_subgroup(&g, &d);
        assert!(d.is_normal_in(&g), "{spec}");
        for a in g.elements() {
            for b in g.elements() {
                assert!(d.contains(g.commutator(a, b)));
            }
        }
        for seeds in [vec![], vec![1 % g.order()], vec![g.order() - 1, g.order() / 2]] {
            let h = subgroup_closure(&g, &seeds);
            check_subgroup(&g, &h);
            let oracle = common::closure(&g, &seeds.iter().copied().collect());
            assert_eq!(h.members().iter().copied().collect::<BTreeSet<_>>(), oracle);

            let c = centralizer(&g, &seeds);
            check_subgroup(&g, &c);
            for x in g.elements() {
                let commutes = seeds.iter().all(|&s| g.mul(x, s) == g.mul(s, x));
                assert_eq!(c.contains(x), commutes, "{spec}");
            }
        }
    }
}

#[test]
fn group_orders() {
    let orders = [1, 2, 5, 6, 6, 8, 10, 12, 12, 24, 4, 8];
    for (spec, n) in SMALL.iter().zip(orders) {
        assert_eq!(group(spec).order(), n, "{spec}");
    }
    let q8 = group(SMALL[11]);
    assert_eq!(q8.elements().filter(|&x| q8.element_order(x) == 2).count(), 1);
    assert_eq!(commutator_subgroup(&group("S4")).order(), 12);
    assert_eq!(commutator_subgroup(&group("C6")).order(), 1);
    assert_eq!(group("product(S3,C2)").order(), 12);
}

#[test]
fn table_files_round_trip() {
    let g = group("D4");
    let dir = std::env::temp_dir().join(format!("groupeq-table-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("d4.txt");
    let mut text = format!("{}\n", g.order());
    for a in g.elements() {
        let row: Vec<String> = g.elements().map(|b| g.mul(a, b).to_string()).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    std::fs::write(&path, text).unwrap();
    let t = build_group_seeded(&format!("table{{{}}}", path.display()), DEFAULT_SIZE_CAP, 3).unwrap();
    assert_eq!(t.order(), 8);
    assert_eq!(commutator_subgroup(&t).order(), 2);
    assert_eq!(common::all_subgroups(&t).len(), common::all_subgroups(&g).len());

    std::fs::write(&path, "2\n0 1\n1 1\n").unwrap();
    assert!(build_group(&format!("table{{{}}}", path.display()), DEFAULT_SIZE_CAP).is_err());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn size_cap_is_an_error() {
    assert!(build_group("S8", 1000).is_err());
    assert!(build_group("product(S4,S4)", 100).is_err());
}

#[test]
fn epimorphisms_match_the_subgroup_lattice() {
    for spec in SMALL {
        let g = group(spec);
        let max_r = if g.order() > 12 { 2 } else { 3 };
        for r in 1..=max_r {
            let (n, v) = count_epimorphisms(r, &g, DEFAULT_EVAL_BUDGET).unwrap();
            assert_eq!(n as i64, common::hall_epimorphisms(&g, r as u32), "{spec}, r = {r}");
            assert_eq!(v.divisor, commutator_subgroup(&g).order() as u64);
            assert!(v.passed, "{spec}, r = {r}: {} does not divide {n}", v.divisor);
        }
    }
}

#[test]
fn epimorphism_examples() {
    assert_eq!(count_epimorphisms(2, &group("S3"), DEFAULT_EVAL_BUDGET).unwrap().0, 18);
    assert_eq!(count_epimorphisms(1, &group("C3"), DEFAULT_EVAL_BUDGET).unwrap().0, 2);
    assert_eq!(
        count_epimorphisms(2, &group("product(C2,C2)"), DEFAULT_EVAL_BUDGET)
            .unwrap()
            .0,
        6
    );
    assert!(count_epimorphisms(0, &group("S3"), DEFAULT_EVAL_BUDGET).is_err());
    assert!(count_epimorphisms(3, &group("S4"), 100).is_err());
}

fn system() -> impl Strategy<Value = EquationSystem> {
    let letter = (0usize..5, prop_oneof![-4i64..=-1, 1i64..=4]).prop_map(|(s, e)| match s {
        0 => Letter::unknown("x", e),
        1 => Letter::unknown("y", e),
        2 => Letter::unknown("z", e),
        3 => Letter::coefficient("a", e),
        _ => Letter::coefficient("b", e),
    });
    let eq = prop::collection::vec(letter, 0..8).prop_map(|l| Equation::new(Word::free_reduce(l)));
    prop::collection::vec(eq, 1..3).prop_map(|eqs| {
        EquationSystem::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec!["a".into(), "b".into()],
            eqs,
        )
    })
}

/// Direct count through `Word::evaluate`.
fn naive_count(sys: &EquationSystem, g: &FiniteGroup, a: usize, b: usize) -> u64 {
    let n = g.order();
    let mut count = 0;
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let assign = |s: &str, _| match s {
                    "x" => Some(x),
                    "y" => Some(y),
                    "z" => Some(z),
                    "a" => Some(a),
                    "b" => Some(b),
                    _ => None,
                };
                if sys
                    .equations()
                    .iter()
                    .all(|e| e.lhs().evaluate(g, assign).unwrap() == g.identity())
                {
                    count += 1;
                }
            }
        }
    }
    count
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 150,
        rng_seed: RngSeed::Fixed(0),
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn counts_and_verdicts(sys in system(), gi in 0usize..5, a in 0usize..24, b in 0usize..24) {
        let g = group(["S3", "D4", "C6", "product(C2,C2)", "perm{(1 2 3 4)(5 6 7 8), (1 5 3 7)(2 8 4 6)}"][gi]);
        let (a, b) = (a % g.order(), b % g.order());
        let binding = CoefficientBinding::new().bind("a", a).bind("b", b);
        let set = enumerate_solutions(&sys, &g, &binding, DEFAULT_EVAL_BUDGET).unwrap();
        let n = set.count() as u64;
        prop_assert_eq!(n, naive_count(&sys, &g, a, b));
        prop_assert!(set.solutions.windows(2).all(|w| w[0] < w[1]), "lexicographic order");

        let permuted = sys.with_unknown_order(vec!["z".into(), "x".into(), "y".into()]);
        prop_assert_eq!(enumerate_solutions(&permuted, &g, &binding, DEFAULT_EVAL_BUDGET).unwrap().count() as u64, n);

        let verdicts = divisibility_verdicts(&sys, &g, &binding, n).unwrap();
        for v in &verdicts {
            prop_assert_eq!(v.passed, n.is_multiple_of(v.divisor));
            prop_assert!(v.holds(), "{} fails: {} does not divide {}", v.theorem, v.divisor, n);
        }
        let applies = |t: Theorem| verdicts.iter().find(|v| v.theorem == t).unwrap().applicable;
        if applies(Theorem::Solomon) {
            prop_assert!(applies(Theorem::Grv));
        }
        if applies(Theorem::Grv) {
            prop_assert!(applies(Theorem::Km));
        }
    }
}

#[test]
fn budget_is_enforced() {
    let sys = EquationSystem::new(vec!["x".into(), "y".into(), "z".into()], vec![], vec![]);
    let g = group("S4");
    assert!(enumerate_solutions(&sys, &g, &CoefficientBinding::new(), 1000).is_err());
    assert_eq!(
        enumerate_solutions(&sys, &g, &CoefficientBinding::new(), DEFAULT_EVAL_BUDGET)
            .unwrap()
            .count(),
        24 * 24 * 24
    );
}
