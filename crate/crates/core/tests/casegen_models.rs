use proptest::prelude::*;

use loopcheck::casegen::{generate, header_max_len, Study};
use loopcheck::dsl::{parse_model, parse_requirements};
use loopcheck::engine::{finite_trace, NondetValues};
use loopcheck::ir::{CompiledModel, VarKind};

fn counts(study: Study, n: usize) -> [usize; 3] {
    let m = parse_model(&generate(study, n).unwrap().model_text).unwrap();
    let k = |kind| m.variables.iter().filter(|v| v.kind == kind).count();
    [k(VarKind::Nondeterministic), k(VarKind::Input), k(VarKind::Output)]
}

#[test]
fn variable_counts_match_the_complexity_table() {
    assert_eq!(counts(Study::Elevator, 3), [6, 15, 5]);
    assert_eq!(counts(Study::Elevator, 6), [12, 30, 8]);
    assert_eq!(counts(Study::Elevator, 9), [18, 45, 11]);
    assert_eq!(counts(Study::Elevator, 12), [24, 60, 14]);
    assert_eq!(counts(Study::Elevator, 15), [30, 75, 17]);
    assert_eq!(counts(Study::Pnp, 2), [3, 10, 4]);
    assert_eq!(counts(Study::Pnp, 3), [7, 16, 5]);
    assert_eq!(counts(Study::Pnp, 4), [15, 26, 6]);
}

#[test]
fn every_supported_n_validates_with_expected_bounds() {
    for study in [Study::Elevator, Study::Pnp] {
        let (lo, hi) = study.range();
        for n in lo..=hi {
            let c = generate(study, n).unwrap();
            CompiledModel::new(&parse_model(&c.model_text).unwrap()).unwrap();
            let reqs = parse_requirements(&c.reqs_text).unwrap();
            assert_eq!(header_max_len(&c.model_text), Some(c.max_len));
            let expect = match study {
                Study::Elevator => {
                    assert_eq!((c.max_len, c.k_opt), (3 * n + 6, 3 * n + 5));
                    8 * n
                }
                Study::Pnp => 3 * ((1 << n) - 1) + 3 * (1 << n) - 4,
            };
            assert_eq!(reqs.requirements.len(), expect, "{study}{n}");
        }
        assert!(generate(study, lo - 1).is_err());
        assert!(generate(study, hi + 1).is_err());
    }
    assert_eq!(generate(Study::Pnp, 2).unwrap().max_len, 11);
    assert_eq!(generate(Study::Pnp, 5).unwrap().max_len, 17);
}

fn value(m: &CompiledModel, s: &[i64], name: &str) -> i64 {
    s[m.slot_of(m.var_index(name).unwrap())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// At a batch decision the controller targets the lowest-numbered loaded tray.
    #[test]
    fn pnp_picks_the_lowest_loaded_tray(n in 2usize..=3, arrivals in prop::collection::vec(any::<u8>(), 40)) {
        let c = generate(Study::Pnp, n).unwrap();
        let m = CompiledModel::new(&parse_model(&c.model_text).unwrap()).unwrap();
        let trays = (1usize << n) - 1;
        let cols: Vec<NondetValues> = arrivals
            .iter()
            .map(|a| (0..trays).map(|j| i64::from((a >> j) & 1 == 1 && a % 3 == 0)).collect())
            .collect();
        let trace = finite_trace(&m, &cols).unwrap();
        for s in &trace {
            if value(&m, s, "snap") == 0 || value(&m, s, "target") == 0 {
                continue;
            }
            let target = value(&m, s, "target") as usize;
            for j in 1..target {
                prop_assert_eq!(value(&m, s, &format!("wp.{}", j - 1)), 0);
            }
            prop_assert_eq!(value(&m, s, &format!("wp.{}", target - 1)), 1);
        }
    }

    /// The car never leaves its shaft and doors never open between floors.
    #[test]
    fn elevator_stays_in_bounds(n in 2usize..=4, presses in prop::collection::vec(any::<u16>(), 30)) {
        let c = generate(Study::Elevator, n).unwrap();
        let m = CompiledModel::new(&parse_model(&c.model_text).unwrap()).unwrap();
        let cols: Vec<NondetValues> = presses
            .iter()
            .map(|p| (0..2 * n).map(|i| i64::from((p >> i) & 1 == 1 && p % 5 == 0)).collect())
            .collect();
        let trace = finite_trace(&m, &cols).unwrap();
        for s in &trace {
            let pos = value(&m, s, "elevator_pos");
            prop_assert!((0..=3 * (n as i64 - 1)).contains(&pos));
            if pos % 3 != 0 {
                for i in 0..n {
                    prop_assert_eq!(value(&m, s, &format!("door_closed.{i}")), 1);
                }
            }
        }
    }
}
