use std::collections::HashSet;
use std::fmt::Write as _;

use super::ParseError;
use crate::engine::{TestCase, TestSuite};
use crate::ir::{display_name, ClosedLoopModel, SourceSpan, Variable};

/// Suite text: `suite <names>`, then per test `test <id> length <L>` and `L`
/// comma-separated rows. Bools are written 0/1, enums by label.
pub fn serialize_suite(suite: &TestSuite, model: &ClosedLoopModel) -> String {
    let vars: Vec<&Variable> = model.nondet_variables().collect();
    let mut out = String::from("suite");
    let names: Vec<String> = suite.nondet_names.iter().map(|n| display_name(n)).collect();
    if !names.is_empty() {
        out.push(' ');
        out.push_str(&names.join(","));
    }
    out.push('\n');
    for t in &suite.tests {
        let _ = writeln!(out, "test {} length {}", t.id, t.len());
        for col in &t.columns {
            let row: Vec<String> = col
                .iter()
                .zip(&vars)
                .map(|(c, v)| v.domain.format_code(*c))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
    }
    out
}

pub fn parse_suite(text: &str, model: &ClosedLoopModel) -> Result<TestSuite, ParseError> {
    parse_suite_file("<suite>", text, model)
}

pub fn parse_suite_file(file: &str, text: &str, model: &ClosedLoopModel) -> Result<TestSuite, ParseError> {
    let err = |line: usize, col: usize, msg: String| ParseError::new(SourceSpan::new(file, line, col), msg);
    let vars: Vec<&Variable> = model.nondet_variables().collect();
    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l)).peekable();

    let (_, head) = lines.next().unwrap_or((1, ""));
    let names_text = if head == "suite" {
        ""
    } else if let Some(rest) = head.strip_prefix("suite ") {
        rest
    } else {
        return Err(err(1, 1, "expected `suite` header".into()));
    };
    let names: Vec<&str> = if names_text.is_empty() {
        Vec::new()
    } else {
        names_text.split(',').collect()
    };
    let expected: Vec<String> = vars.iter().map(|v| v.display_name()).collect();
    if names != expected {
        return Err(err(
            1,
            1,
            format!(
                "suite header `{}` does not match model nondet variables `{}`",
                names.join(","),
                expected.join(",")
            ),
        ));
    }

    let mut suite = TestSuite {
        nondet_names: vars.iter().map(|v| v.name.clone()).collect(),
        tests: Vec::new(),
    };
    let mut ids = HashSet::new();
    while let Some((ln, line)) = lines.next() {
        if line.is_empty() && lines.peek().is_none() {
            break;
        }
        let words: Vec<&str> = line.split(' ').collect();
        let (id, len) = match words.as_slice() {
            ["test", id, "length", len] if !id.is_empty() => {
                let len: usize = len
                    .parse()
                    .map_err(|_| err(ln, 1, format!("invalid test length `{len}`")))?;
                (id.to_string(), len)
            }
            _ => return Err(err(ln, 1, "expected `test <id> length <L>`".into())),
        };
        if len == 0 {
            return Err(err(ln, 1, "test length must be at least 1".into()));
        }
        if !ids.insert(id.clone()) {
            return Err(err(ln, 1, format!("duplicate test id `{id}`")));
        }
        let mut columns = Vec::with_capacity(len);
        for _ in 0..len {
            let (rl, row) = match lines.next() {
                Some((rl, row)) if !(row.is_empty() && lines.peek().is_none() && !vars.is_empty()) => (rl, row),
                _ => return Err(err(ln, 1, format!("test `{id}` has fewer than {len} rows"))),
            };
            let cells: Vec<&str> = if vars.is_empty() { Vec::new() } else { row.split(',').collect() };
            if cells.len() != vars.len() || (vars.is_empty() && !row.is_empty()) {
                return Err(err(
                    rl,
                    1,
                    format!("ragged row: expected {} values, found {}", vars.len(), cells.len()),
                ));
            }
            let mut col = Vec::with_capacity(vars.len());
            let mut at = 1;
            for (cell, v) in cells.iter().zip(&vars) {
                let code = v.domain.parse_code(cell).ok_or_else(|| {
                    err(
                        rl,
                        at,
                        format!("value out of domain: `{cell}` for {} : {}", v.display_name(), v.domain),
                    )
                })?;
                col.push(code);
                at += cell.len() + 1;
            }
            columns.push(col);
        }
        suite.tests.push(TestCase::new(id, columns));
    }
    if suite.tests.is_empty() {
        return Err(err(1, 1, "suite has no test cases".into()));
    }
    Ok(suite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_model;

    fn model() -> ClosedLoopModel {
        parse_model("model M nondet u : bool input b : bool plant { b = u; } controller { }").unwrap()
    }

    #[test]
    fn single_test_file_shape() {
        let m = model();
        let suite = TestSuite {
            nondet_names: vec!["u".into()],
            tests: vec![TestCase::new("t0", vec![vec![1]])],
        };
        let text = serialize_suite(&suite, &m);
        assert_eq!(text, "suite u\ntest t0 length 1\n1\n");
        assert_eq!(parse_suite(&text, &m).unwrap(), suite);
    }

    #[test]
    fn rejects_bad_values_and_headers() {
        let m = model();
        let e = parse_suite("suite u\ntest t0 length 1\n2\n", &m).unwrap_err();
        assert!(e.message.starts_with("value out of domain"), "{e}");
        assert_eq!(e.span.line, 3);
        assert!(parse_suite("suite v\ntest t0 length 1\n1\n", &m).is_err());
        assert!(parse_suite("suite u\ntest t0 length 2\n1\n", &m).is_err());
        assert!(parse_suite("suite u\n", &m).is_err());
        assert!(parse_suite("suite u\ntest t0 length 1\n1,0\n", &m).is_err());
    }
}
