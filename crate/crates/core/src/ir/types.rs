use std::fmt;

/// Location in a source file, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub column: usize,
}

impl SourceSpan {
    pub fn new(file: impl Into<String>, line: usize, column: usize) -> Self {
        Self {
            file: file.into(),
            line,
            column,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

/// The five variable kinds of a closed-loop model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Nondeterministic,
    Input,
    Output,
    PlantInternal,
    ControllerInternal,
}

impl VarKind {
    pub const ALL: [VarKind; 5] = [
        VarKind::Nondeterministic,
        VarKind::Input,
        VarKind::Output,
        VarKind::PlantInternal,
        VarKind::ControllerInternal,
    ];

    /// Declaration keyword in the model language.
    pub fn keyword(self) -> &'static str {
        match self {
            VarKind::Nondeterministic => "nondet",
            VarKind::Input => "input",
            VarKind::Output => "output",
            VarKind::PlantInternal => "plantvar",
            VarKind::ControllerInternal => "ctrlvar",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            VarKind::Nondeterministic => "Nondeterministic",
            VarKind::Input => "Input",
            VarKind::Output => "Output",
            VarKind::PlantInternal => "PlantInternal",
            VarKind::ControllerInternal => "ControllerInternal",
        };
        f.write_str(name)
    }
}

/// A concrete value of a variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Label(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Label(l) => f.write_str(l),
        }
    }
}

/// Finite value set of a variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Domain {
    Bool,
    IntRange { lo: i64, hi: i64 },
    Enum { labels: Vec<String> },
}

impl Domain {
    /// Number of values, saturating at `u64::MAX`.
    pub fn size(&self) -> u64 {
        match self {
            Domain::Bool => 2,
            Domain::IntRange { lo, hi } => {
                if hi < lo {
                    0
                } else {
                    (*hi as i128 - *lo as i128 + 1).min(u64::MAX as i128) as u64
                }
            }
            Domain::Enum { labels } => labels.len() as u64,
        }
    }

    /// Lowest and highest internal encoding. Bools encode as 0/1, labels by position.
    pub fn code_range(&self) -> (i64, i64) {
        match self {
            Domain::Bool => (0, 1),
            Domain::IntRange { lo, hi } => (*lo, *hi),
            Domain::Enum { labels } => (0, labels.len() as i64 - 1),
        }
    }

    pub fn contains_code(&self, code: i64) -> bool {
        let (lo, hi) = self.code_range();
        lo <= code && code <= hi
    }

    pub fn encode(&self, value: &Value) -> Option<i64> {
        match (self, value) {
            (Domain::Bool, Value::Bool(b)) => Some(*b as i64),
            (Domain::IntRange { lo, hi }, Value::Int(i)) if lo <= i && i <= hi => Some(*i),
            (Domain::Enum { labels }, Value::Label(l)) => {
                labels.iter().position(|x| x == l).map(|p| p as i64)
            }
            _ => None,
        }
    }

    pub fn decode(&self, code: i64) -> Value {
        match self {
            Domain::Bool => Value::Bool(code != 0),
            Domain::IntRange { .. } => Value::Int(code),
            Domain::Enum { labels } => Value::Label(
                labels
                    .get(code as usize)
                    .cloned()
                    .unwrap_or_else(|| format!("<{code}>")),
            ),
        }
    }

    /// All values in domain order.
    pub fn values(&self) -> impl Iterator<Item = Value> + '_ {
        let (lo, hi) = self.code_range();
        (lo..=hi).map(move |c| self.decode(c))
    }

    /// Renders a code the way the suite and trace formats print it:
    /// bools as 0/1, ints in decimal, enums by label.
    pub fn format_code(&self, code: i64) -> String {
        match self {
            Domain::Bool | Domain::IntRange { .. } => code.to_string(),
            Domain::Enum { .. } => self.decode(code).to_string(),
        }
    }

    /// Inverse of [`Domain::format_code`].
    pub fn parse_code(&self, text: &str) -> Option<i64> {
        match self {
            Domain::Bool => match text {
                "0" => Some(0),
                "1" => Some(1),
                _ => None,
            },
            Domain::IntRange { lo, hi } => text
                .parse::<i64>()
                .ok()
                .filter(|v| lo <= v && v <= hi),
            Domain::Enum { labels } => labels.iter().position(|l| l == text).map(|p| p as i64),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Bool => f.write_str("bool"),
            Domain::IntRange { lo, hi } => write!(f, "int {lo}..{hi}"),
            Domain::Enum { labels } => write!(f, "enum {{ {} }}", labels.join(", ")),
        }
    }
}

/// Equality ignores source spans.
#[derive(Debug, Clone)]
pub struct Variable {
    /// Flattened scalar name; array element `a[2]` is stored as `a.2`.
    pub name: String,
    pub kind: VarKind,
    pub domain: Domain,
    pub init: Option<Value>,
    pub span: Option<SourceSpan>,
}

impl Variable {
    pub fn new(name: impl Into<String>, kind: VarKind, domain: Domain, init: Option<Value>) -> Self {
        Self {
            name: name.into(),
            kind,
            domain,
            init,
            span: None,
        }
    }

    pub fn display_name(&self) -> String {
        display_name(&self.name)
    }
}

/// Source-syntax rendering of a flattened name: `door_open.2` becomes `door_open[2]`.
pub fn display_name(flat: &str) -> String {
    match flat.rsplit_once('.') {
        Some((base, idx)) if !idx.is_empty() && idx.bytes().all(|b| b.is_ascii_digit()) => {
            format!("{base}[{idx}]")
        }
        _ => flat.to_string(),
    }
}

/// Flattened name of an array element.
pub fn element_name(base: &str, index: u64) -> String {
    format!("{base}.{index}")
}

impl PartialEq for Variable {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.kind == other.kind && self.domain == other.domain && self.init == other.init
    }
}

impl Eq for Variable {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_codes_round_trip() {
        let d = Domain::Enum {
            labels: vec!["a".into(), "b".into()],
        };
        assert_eq!(d.encode(&Value::Label("b".into())), Some(1));
        assert_eq!(d.decode(1), Value::Label("b".into()));
        assert_eq!(d.parse_code("a"), Some(0));
        assert_eq!(Domain::Bool.parse_code("2"), None);
        let r = Domain::IntRange { lo: -2, hi: 3 };
        assert_eq!(r.size(), 6);
        assert_eq!(r.parse_code("4"), None);
        assert_eq!(r.values().count(), 6);
    }

    #[test]
    fn flattened_names_display_as_indexing() {
        assert_eq!(display_name("door_open.2"), "door_open[2]");
        assert_eq!(display_name("pos"), "pos");
        assert_eq!(element_name("b", 0), "b.0");
    }
}
