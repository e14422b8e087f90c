mod common;

use proptest::prelude::*;

use loopcheck::casegen::{generate, Study};
use loopcheck::dsl::{
    parse_ltl, parse_model, parse_requirements, parse_suite, print_model, print_requirements,
    serialize_suite,
};
use loopcheck::engine::{TestCase, TestSuite};
use loopcheck::oracle::{all_columns, random_ltl_text, random_model_text};

use common::{compile, picker, state_atoms};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn model_print_parse_roundtrip(words in prop::collection::vec(any::<u32>(), 128), nondet in 0usize..=2, state in 1usize..=4) {
        let text = random_model_text(&mut picker(words), nondet, state);
        let m = parse_model(&text).unwrap();
        let printed = print_model(&m);
        let again = parse_model(&printed).unwrap();
        prop_assert_eq!(&again, &m);
        prop_assert_eq!(print_model(&again), printed);
    }

    #[test]
    fn requirements_roundtrip(words in prop::collection::vec(any::<u32>(), 64)) {
        let mut pick = picker(words);
        let text = format!(
            "// header\nA expect-pass : {}\nB : {}\nC expect-fail : {}\n",
            random_ltl_text(&mut pick, &["x", "y == 2", "x && y < 3"], 4),
            random_ltl_text(&mut pick, &["x", "y == 2"], 2),
            random_ltl_text(&mut pick, &["!x", "y >= 1"], 3),
        );
        let r = parse_requirements(&text).unwrap();
        let printed = print_requirements(&r);
        prop_assert_eq!(&parse_requirements(&printed).unwrap(), &r);
        prop_assert_eq!(print_requirements(&parse_requirements(&printed).unwrap()), printed);
    }

    #[test]
    fn suite_roundtrip(words in prop::collection::vec(any::<u32>(), 128), tests in 1usize..4) {
        let mut pick = picker(words);
        let m = compile(&random_model_text(&mut pick, 2, 1));
        let cols = all_columns(&m);
        let suite = TestSuite {
            nondet_names: m.nondet_names(),
            tests: (0..tests)
                .map(|i| TestCase::new(format!("t{i}"), (0..=pick(4)).map(|_| cols[pick(cols.len())].clone()).collect()))
                .collect(),
        };
        let text = serialize_suite(&suite, m.model());
        prop_assert!(text.ends_with('\n') && !text.contains(" \n") && !text.contains('\r'));
        prop_assert_eq!(parse_suite(&text, m.model()).unwrap(), suite);
    }

    #[test]
    fn parsers_never_panic(s in "\\PC{0,120}") {
        let _ = parse_model(&s);
        let _ = parse_ltl(&s);
        let _ = parse_requirements(&s);
    }

    #[test]
    fn mutated_models_never_panic(words in prop::collection::vec(any::<u32>(), 128), at in any::<usize>(), junk in "[ -~]{0,3}") {
        let text = random_model_text(&mut picker(words), 1, 2);
        let cut = at % (text.len() + 1);
        let mutated = format!("{}{}{}", &text[..cut], junk, &text[(cut + 1).min(text.len())..]);
        if let Ok(m) = parse_model(&mutated) {
            let _ = loopcheck::ir::CompiledModel::new(&m);
        }
    }
}

#[test]
fn case_studies_are_canonical() {
    for (study, n) in [(Study::Elevator, 3), (Study::Elevator, 7), (Study::Pnp, 2), (Study::Pnp, 4)] {
        let c = generate(study, n).unwrap();
        assert_eq!(print_model(&parse_model(&c.model_text).unwrap()), c.model_text);
        assert_eq!(print_requirements(&parse_requirements(&c.reqs_text).unwrap()), c.reqs_text);
    }
}

#[test]
fn requirements_reading_state_atoms_parse() {
    let m = compile("model A input b : bool = false input c : int 0..2 = 0 plant { } controller { }");
    let atoms = state_atoms(&m);
    assert_eq!(atoms, vec!["b == false", "b == true", "c == 0", "c == 1", "c == 2"]);
}

#[test]
fn syntax_errors_carry_positions() {
    let e = parse_model("model M\ninput x : bool = false\nplant { x = ; }\ncontroller { }").unwrap_err();
    assert_eq!(e.span.line, 3, "{e}");
    let e = parse_ltl("F c == 3").unwrap_err();
    assert!(e.message.contains("temporal operator"), "{e}");
}
