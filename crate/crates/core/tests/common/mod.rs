#![allow(dead_code)]

use loopcheck::dsl::{parse_model, parse_requirements, RequirementSet};
use loopcheck::ir::CompiledModel;

/// Turns a proptest-drawn word list into a cyclic choice source.
pub fn picker(words: Vec<u32>) -> impl FnMut(usize) -> usize {
    let mut i = 0;
    move |n| {
        let w = words[i % words.len()] as usize;
        i += 1;
        w % n
    }
}

pub fn compile(text: &str) -> CompiledModel {
    CompiledModel::new(&parse_model(text).unwrap_or_else(|e| panic!("{e}\n{text}")))
        .unwrap_or_else(|e| panic!("{e}\n{text}"))
}

pub fn reqs(text: &str) -> RequirementSet {
    parse_requirements(text).unwrap_or_else(|e| panic!("{e}\n{text}"))
}

/// `var == value` atoms for every non-nondet variable of `model`.
pub fn state_atoms(model: &CompiledModel) -> Vec<String> {
    model
        .model()
        .variables
        .iter()
        .filter(|v| v.kind != loopcheck::ir::VarKind::Nondeterministic)
        .flat_map(|v| {
            v.domain
                .values()
                .map(|x| format!("{} == {}", v.display_name(), x))
                .collect::<Vec<_>>()
        })
        .collect()
}
