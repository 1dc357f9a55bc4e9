use groupeq::eqlang::{
    exponent_matrix, parse_document, parse_system, print_document, CoefficientValue, Equation, EquationSystem,
    GeqDocument,
};
use groupeq::fingroup::parse_cycles;
use groupeq::verify::CORPUS;
use groupeq::word::{Letter, LetterKind, Word};
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

const UNKNOWNS: [&str; 3] = ["x", "y", "z"];
const ATOMS: [&str; 2] = ["a", "b"];

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 500,
        rng_seed: RngSeed::Fixed(0),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn word() -> impl Strategy<Value = Word> {
    let letter = (0usize..5, prop_oneof![-9i64..=-1, 1i64..=9]).prop_map(|(s, e)| {
        if s < 3 {
            Letter::unknown(UNKNOWNS[s], e)
        } else {
            Letter::coefficient(ATOMS[s - 3], e)
        }
    });
    prop::collection::vec(letter, 0..10).prop_map(Word::free_reduce)
}

fn cycles() -> impl Strategy<Value = Option<CoefficientValue>> {
    prop_oneof![
        Just(None),
        prop::sample::select(vec!["(1 2)", "(1 2 3)", "(1 3)(2 4)", "(1 4 3 2)"])
            .prop_map(|c| Some(CoefficientValue::Permutation(parse_cycles(c).unwrap()))),
    ]
}

fn document() -> impl Strategy<Value = GeqDocument> {
    (
        prop::collection::vec(word(), 1..4),
        cycles(),
        cycles(),
        Just(UNKNOWNS.map(String::from).to_vec()).prop_shuffle(),
    )
        .prop_map(|(words, va, vb, unknowns)| GeqDocument {
            system: EquationSystem::new(
                unknowns,
                ATOMS.map(String::from).to_vec(),
                words.into_iter().map(Equation::new).collect(),
            ),
            coefficients: vec![("a".into(), va), ("b".into(), vb)],
        })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn print_then_parse_is_identity(doc in document()) {
        let text = print_document(&doc);
        let back = parse_document(&text).map_err(|e| TestCaseError::fail(format!("{text}\n{e}")))?;
        prop_assert_eq!(back, doc);
    }

    #[test]
    fn matrix_entries_are_exponent_sums(doc in document()) {
        let sys = &doc.system;
        let m = exponent_matrix(sys);
        for (i, eq) in sys.equations().iter().enumerate() {
            for (j, u) in sys.unknowns().iter().enumerate() {
                prop_assert_eq!(m.get(i, j), &eq.lhs().exponent_sum(u));
            }
        }
    }

    #[test]
    fn commutators_have_zero_exponent_sums(u in word(), v in word()) {
        let sys = parse_system(&format!("[{u}, {v}] = 1")).unwrap();
        let lhs = sys.equations()[0].lhs();
        for x in UNKNOWNS {
            prop_assert!(lhs.exponent_sum(x).is_zero());
        }
        let expected = u.invert().concat(&v.invert()).concat(&u).concat(&v);
        prop_assert_eq!(lhs, &expected);
    }

    #[test]
    fn right_hand_side_folds_as_v_times_w_inverse(u in word(), v in word()) {
        let sys = parse_system(&format!("{u} = {v}")).unwrap();
        prop_assert_eq!(sys.equations()[0].lhs(), &u.concat(&v.invert()));
    }
}

#[test]
fn corpus_matrices_match_exponent_sums() {
    for e in CORPUS {
        let doc = parse_document(e.source).unwrap();
        let m = exponent_matrix(&doc.system);
        for (i, eq) in doc.system.equations().iter().enumerate() {
            for (j, u) in doc.system.unknowns().iter().enumerate() {
                assert_eq!(m.get(i, j), &eq.lhs().exponent_sum(u), "{}", e.name);
            }
        }
    }
}

#[test]
fn errors_carry_positions() {
    for bad in ["x^ = 1", "[x, y = 1", "x y = ", "x ^ 2 2"] {
        let err = parse_system(bad).unwrap_err();
        assert!(err.to_string().contains(':'), "{bad}: {err}");
    }
    let sys = parse_system("x^-3 @c").unwrap();
    assert_eq!(sys.equations()[0].lhs().letters()[1].kind(), LetterKind::Coefficient);
}
