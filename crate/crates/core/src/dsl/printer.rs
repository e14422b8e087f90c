use std::fmt::Write as _;

use super::RequirementSet;
use crate::ir::{display_name, element_name, Assignment, ClosedLoopModel, Variable};

fn write_header(out: &mut String, header: &[String]) {
    for line in header {
        if line.is_empty() {
            out.push_str("//\n");
        } else {
            let _ = writeln!(out, "// {line}");
        }
    }
}

/// Length of the array run starting at `vars[0]`: elements `base.0..base.N-1`
/// sharing kind, domain and init.
fn array_run(vars: &[Variable]) -> Option<(String, usize)> {
    let (base, idx) = vars[0].name.rsplit_once('.')?;
    if idx != "0" {
        return None;
    }
    let n = vars
        .iter()
        .enumerate()
        .take_while(|(i, v)| {
            v.name == element_name(base, *i as u64)
                && v.kind == vars[0].kind
                && v.domain == vars[0].domain
                && v.init == vars[0].init
        })
        .count();
    Some((base.to_string(), n))
}

fn write_block(out: &mut String, word: &str, assignments: &[Assignment]) {
    let _ = writeln!(out, "{word} {{");
    for a in assignments {
        let _ = writeln!(out, "  {} = {};", display_name(&a.target), a.rhs);
    }
    out.push_str("}\n");
}

/// Canonical model text. Init values are always written out.
pub fn print_model(model: &ClosedLoopModel) -> String {
    let mut out = String::new();
    write_header(&mut out, &model.header);
    let _ = writeln!(out, "model {}", model.name);
    out.push('\n');
    let mut i = 0;
    while i < model.variables.len() {
        let v = &model.variables[i];
        let (name, n) = match array_run(&model.variables[i..]) {
            Some((base, n)) => (format!("{base}[{n}]"), n),
            None => (v.name.clone(), 1),
        };
        let _ = write!(out, "{} {} : {}", v.kind.keyword(), name, v.domain);
        if let Some(init) = &v.init {
            let _ = write!(out, " = {}", init);
        }
        out.push('\n');
        i += n;
    }
    if !model.variables.is_empty() {
        out.push('\n');
    }
    write_block(&mut out, "plant", &model.plant.assignments);
    out.push('\n');
    write_block(&mut out, "controller", &model.controller.assignments);
    out
}

pub fn print_requirements(reqs: &RequirementSet) -> String {
    let mut out = String::new();
    write_header(&mut out, &reqs.header);
    for r in &reqs.requirements {
        match r.expectation {
            Some(e) => {
                let _ = writeln!(out, "{} {} : {}", r.id, e.keyword(), r.formula);
            }
            None => {
                let _ = writeln!(out, "{} : {}", r.id, r.formula);
            }
        }
    }
    out
}
