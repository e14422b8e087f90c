//! Parameterized elevator and pick-and-place case studies.
//!
//! Each generator builds model and requirement text, parses it back and
//! returns the canonical printing, so emitted files always round-trip.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dsl::{parse_model, parse_requirements, print_model, print_requirements};

/// Version tag of the requirement formalizations written into headers.
pub const FORMALIZATION: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Study {
    Elevator,
    Pnp,
}

impl Study {
    pub fn name(self) -> &'static str {
        match self {
            Study::Elevator => "elevator",
            Study::Pnp => "pnp",
        }
    }

    /// Supported range of the size parameter.
    pub fn range(self) -> (usize, usize) {
        match self {
            Study::Elevator => (2, 15),
            Study::Pnp => (2, 6),
        }
    }
}

impl fmt::Display for Study {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Study {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "elevator" => Ok(Study::Elevator),
            "pnp" => Ok(Study::Pnp),
            _ => Err(format!("unknown case study `{s}` (expected elevator or pnp)")),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CasegenError {
    #[error("unsupported n={n} for {study} (supported {lo}..={hi})")]
    UnsupportedN {
        study: Study,
        n: usize,
        lo: usize,
        hi: usize,
    },
    #[error("generated {what} does not parse: {message}")]
    Malformed { what: &'static str, message: String },
}

/// Generated model and requirements with the recommended bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseStudy {
    pub study: Study,
    pub n: usize,
    pub model_text: String,
    pub reqs_text: String,
    /// Recommended maximum test length.
    pub max_len: usize,
    pub k_opt: usize,
}

impl CaseStudy {
    /// File stem, e.g. `elevator3`.
    pub fn stem(&self) -> String {
        format!("{}{}", self.study, self.n)
    }
}

pub fn generate(study: Study, n: usize) -> Result<CaseStudy, CasegenError> {
    let (lo, hi) = study.range();
    if n < lo || n > hi {
        return Err(CasegenError::UnsupportedN { study, n, lo, hi });
    }
    let (model, reqs, max_len, k_opt) = match study {
        Study::Elevator => elevator(n),
        Study::Pnp => pnp(n),
    };
    let model = parse_model(&model).map_err(|e| CasegenError::Malformed {
        what: "model",
        message: e.to_string(),
    })?;
    let reqs = parse_requirements(&reqs).map_err(|e| CasegenError::Malformed {
        what: "requirements",
        message: e.to_string(),
    })?;
    Ok(CaseStudy {
        study,
        n,
        model_text: print_model(&model),
        reqs_text: print_requirements(&reqs),
        max_len,
        k_opt,
    })
}

pub fn gen_elevator(n: usize) -> Result<CaseStudy, CasegenError> {
    generate(Study::Elevator, n)
}

pub fn gen_pnp(n: usize) -> Result<CaseStudy, CasegenError> {
    generate(Study::Pnp, n)
}

/// Reads the `max-len=N` token from header comment lines.
pub fn header_max_len(text: &str) -> Option<usize> {
    text.lines()
        .map_while(|l| l.trim_start().strip_prefix("//"))
        .flat_map(str::split_whitespace)
        .find_map(|tok| tok.strip_prefix("max-len=")?.parse().ok())
}

fn join(items: impl IntoIterator<Item = String>, op: &str, empty: &str) -> String {
    let items: Vec<String> = items.into_iter().collect();
    match items.len() {
        0 => empty.to_string(),
        1 => items[0].clone(),
        _ => format!("({})", items.join(&format!(" {op} "))),
    }
}

fn any(items: impl IntoIterator<Item = String>) -> String {
    join(items, "||", "false")
}

fn all(items: impl IntoIterator<Item = String>) -> String {
    join(items, "&&", "true")
}

fn header(out: &mut String, lines: &[String]) {
    for l in lines {
        out.push_str("// ");
        out.push_str(l);
        out.push('\n');
    }
}

fn elevator(n: usize) -> (String, String, usize, usize) {
    let top = 3 * (n - 1);
    let max_len = 3 * n + 6;
    let k_opt = 3 * n + 5;
    let floors = 0..n;
    let req = |f: usize| format!("(button[{f}] || call[{f}])");

    let mut m = String::new();
    header(
        &mut m,
        &[
            format!("elevator case study, n={n} floors, car positions 0..{top}"),
            format!("max-len={max_len} k-opt={k_opt} formalization={FORMALIZATION}"),
        ],
    );
    m.push_str(&format!("model elevator{n}\n"));
    m.push_str(&format!(
        "nondet user_floor_button[{n}] : bool\n\
         nondet user_cabin_button[{n}] : bool\n\
         input on_floor[{n}] : bool = false\n\
         input door_closed[{n}] : bool = false\n\
         input door_open[{n}] : bool = false\n\
         input button[{n}] : bool = false\n\
         input call[{n}] : bool = false\n\
         output up : bool = false\n\
         output down : bool = false\n\
         output open[{n}] : bool = false\n\
         plantvar elevator_pos : int 0..{top} = 0\n\
         plantvar door_state[{n}] : enum {{ d_closed, d_opening, d_open, d_closing }} = d_closed\n\
         ctrlvar floor : int 0..{} = 0\n\
         ctrlvar door_timer : int 0..3 = 0\n",
        n - 1
    ));

    m.push_str("plant {\n");
    m.push_str(&format!(
        "elevator_pos = up && !down ? (elevator_pos < {top} ? elevator_pos + 1 : {top}) : (down && !up ? (elevator_pos > 0 ? elevator_pos - 1 : 0) : elevator_pos);\n"
    ));
    for f in floors.clone() {
        m.push_str(&format!(
            "on_floor[{f}] = elevator_pos == {};\n\
             door_state[{f}] = open[{f}] ? (door_state[{f}] == d_closed || door_state[{f}] == d_closing ? d_opening : d_open) : (door_state[{f}] == d_open || door_state[{f}] == d_opening ? d_closing : d_closed);\n\
             door_closed[{f}] = door_state[{f}] == d_closed;\n\
             door_open[{f}] = door_state[{f}] == d_open;\n\
             button[{f}] = on_floor[{f}] && door_open[{f}] ? false : (user_floor_button[{f}] ? true : button[{f}]);\n\
             call[{f}] = on_floor[{f}] && door_open[{f}] ? false : (user_cabin_button[{f}] ? true : call[{f}]);\n",
            3 * f
        ));
    }
    m.push_str("}\n");

    let at_floor = any(floors.clone().map(|f| format!("on_floor[{f}]")));
    let here = any(floors.clone().map(|f| format!("on_floor[{f}] && {}", req(f))));
    let idle = all(floors
        .clone()
        .map(|f| format!("door_closed[{f}]"))
        .chain(floors.clone().map(|f| format!("!open[{f}]")))
        .chain([format!("!{here}")]));
    let above = any(floors.clone().map(|f| format!("floor < {f} && {}", req(f))));
    let below = any(floors.clone().map(|f| format!("floor > {f} && {}", req(f))));
    let mut track = "floor".to_string();
    for f in floors.clone().rev() {
        track = format!("(on_floor[{f}] ? {f} : {track})");
    }
    m.push_str("controller {\n");
    m.push_str(&format!("floor = {track};\n"));
    for f in floors.clone() {
        m.push_str(&format!(
            "open[{f}] = on_floor[{f}] && (door_open[{f}] ? door_timer < 2 : open[{f}] || {});\n",
            req(f)
        ));
    }
    let any_open = any(floors.clone().map(|f| format!("door_open[{f}]")));
    m.push_str(&format!(
        "door_timer = {any_open} ? (door_timer < 3 ? door_timer + 1 : 3) : 0;\n\
         up = {at_floor} ? {idle} && {above} : up;\n\
         down = {at_floor} ? {idle} && !{above} && {below} : down;\n"
    ));
    m.push_str("}\n");

    let mut r = String::new();
    header(
        &mut r,
        &[
            format!("elevator requirements, n={n}, formalization {FORMALIZATION}"),
            format!("max-len={max_len} k-opt={k_opt}"),
            "ERT_1: between floors every door is closed (ERF_1: open)".into(),
            "ERT_2: a request is served or another floor is requested (ERF_2: always served)".into(),
            "ERT_3: an opened door stays open two more steps, then closes (ERF_3: one step)".into(),
            "ERT_4: a request while closing reopens the door in two steps (ERF_4: one step)".into(),
        ],
    );
    let between = all(floors.clone().map(|f| format!("!on_floor[{f}]")));
    let mut ert = Vec::new();
    let mut erf = Vec::new();
    for i in floors.clone() {
        let id = i + 1;
        let served = format!("on_floor[{i}] && door_open[{i}]");
        let others = any(floors.clone().filter(|&j| j != i).map(req));
        let opens = format!("!door_open[{i}] && X door_open[{i}]");
        let closing = format!(
            "door_open[{i}] && X (!door_open[{i}] && !door_closed[{i}] && {})",
            req(i)
        );
        ert.push(format!("ERT_1_{id} expect-pass : X (G ({between} -> door_closed[{i}]))"));
        ert.push(format!(
            "ERT_2_{id} expect-pass : G ({} -> F (({served}) || {others}))",
            req(i)
        ));
        ert.push(format!(
            "ERT_3_{id} expect-pass : G (({opens}) -> (X X door_open[{i}] && X X X door_open[{i}] && X X X X !door_open[{i}]))"
        ));
        ert.push(format!("ERT_4_{id} expect-pass : G (({closing}) -> X X X door_open[{i}])"));
        erf.push(format!("ERF_1_{id} expect-fail : X (G ({between} -> door_open[{i}]))"));
        erf.push(format!("ERF_2_{id} expect-fail : G ({} -> F ({served}))", req(i)));
        erf.push(format!(
            "ERF_3_{id} expect-fail : G (({opens}) -> (X X door_open[{i}] && X X X !door_open[{i}]))"
        ));
        erf.push(format!("ERF_4_{id} expect-fail : G (({closing}) -> X X door_open[{i}])"));
    }
    for line in ert.iter().chain(&erf) {
        r.push_str(line);
        r.push('\n');
    }
    (m, r, max_len, k_opt)
}

fn pnp(n: usize) -> (String, String, usize, usize) {
    let trays = (1usize << n) - 1;
    let max_len = match n {
        0..=4 => 11,
        5 => 17,
        _ => 23,
    };
    let k_opt = (1 << n) + 12;
    let cyl = 0..n;
    let inputs = 1..=trays;

    let mut m = String::new();
    header(
        &mut m,
        &[
            format!("pick-and-place case study, n={n} horizontal cylinders, {trays} input trays"),
            format!("max-len={max_len} k-opt={k_opt} formalization={FORMALIZATION}"),
            "tray j sits at horizontal offset j; cylinder b spans 0..2^b, so extending".into(),
            "exactly the cylinders of the set bits of j reaches tray j; tray 0 is the output".into(),
        ],
    );
    m.push_str(&format!("model pnp{n}\n"));
    m.push_str(&format!(
        "nondet add_wp[{trays}] : bool\n\
         input wp[{trays}] : bool = false\n\
         input h_retracted[{n}] : bool = true\n\
         input h_extended[{n}] : bool = false\n\
         input v_retracted : bool = true\n\
         input v_extended : bool = false\n\
         input holding : bool = false\n\
         output h_extend[{n}] : bool = false\n\
         output v_extend : bool = false\n\
         output suction : bool = false\n"
    ));
    for b in cyl.clone() {
        m.push_str(&format!("plantvar h_pos_{b} : int 0..{} = 0\n", 1 << b));
    }
    m.push_str(&format!(
        "plantvar x : int 0..{trays} = 0\n\
         plantvar v_pos : int 0..2 = 0\n\
         plantvar picked : bool = false\n\
         ctrlvar phase : enum {{ c_idle, c_move, c_lower, c_lift, c_return, c_drop, c_release, c_rise }} = c_idle\n\
         ctrlvar pending[{trays}] : bool = false\n\
         ctrlvar target : int 0..{trays} = 0\n\
         ctrlvar snap : bool = false\n"
    ));

    // Arrays are zero-based: tray j lives at index j - 1.
    let wp = |j: usize| format!("wp[{}]", j - 1);
    let pending = |j: usize| format!("pending[{}]", j - 1);

    m.push_str("plant {\n");
    for b in cyl.clone() {
        let len = 1 << b;
        m.push_str(&format!(
            "h_pos_{b} = h_extend[{b}] ? (h_pos_{b} < {len} ? h_pos_{b} + 1 : {len}) : (h_pos_{b} > 0 ? h_pos_{b} - 1 : 0);\n"
        ));
    }
    let sum = cyl.clone().map(|b| format!("h_pos_{b}")).collect::<Vec<_>>().join(" + ");
    m.push_str(&format!("x = {sum};\n"));
    m.push_str("v_pos = v_extend ? (v_pos < 2 ? v_pos + 1 : 2) : (v_pos > 0 ? v_pos - 1 : 0);\n");
    let loaded = any(inputs.clone().map(|j| format!("x == {j} && {}", wp(j))));
    m.push_str(&format!("picked = v_pos == 2 && suction && !holding && {loaded};\n"));
    for j in inputs.clone() {
        m.push_str(&format!(
            "{w} = picked && x == {j} ? false : {w} || add_wp[{}];\n",
            j - 1,
            w = wp(j)
        ));
    }
    m.push_str("holding = suction && (holding || picked);\n");
    for b in cyl.clone() {
        m.push_str(&format!(
            "h_retracted[{b}] = h_pos_{b} == 0;\nh_extended[{b}] = h_pos_{b} == {};\n",
            1 << b
        ));
    }
    m.push_str("v_retracted = v_pos == 0;\nv_extended = v_pos == 2;\n}\n");

    let any_pending = any(inputs.clone().map(pending));
    let mut pick = "0".to_string();
    for j in inputs.clone().rev() {
        pick = format!("({} ? {j} : {pick})", pending(j));
    }
    let bit = |b: usize| format!("(target / {}) mod 2 == 1", 1 << b);
    let aligned = all(cyl
        .clone()
        .map(|b| format!("({} ? h_extended[{b}] : h_retracted[{b}])", bit(b))));
    let home = all(cyl.clone().map(|b| format!("h_retracted[{b}]")));
    m.push_str("controller {\n");
    m.push_str(&format!("snap = phase == c_idle && !{any_pending};\n"));
    for j in inputs.clone() {
        m.push_str(&format!(
            "{p} = snap ? {w} : ({p} && !(phase == c_lower && holding && target == {j}));\n",
            p = pending(j),
            w = wp(j)
        ));
    }
    m.push_str(&format!(
        "target = phase == c_idle ? {pick} : target;\n\
         phase = phase == c_idle ? (target != 0 ? c_move : c_idle) :\n\
         phase == c_move ? ({aligned} ? c_lower : c_move) :\n\
         phase == c_lower ? (holding ? c_lift : c_lower) :\n\
         phase == c_lift ? (v_retracted ? c_return : c_lift) :\n\
         phase == c_return ? ({home} ? c_drop : c_return) :\n\
         phase == c_drop ? (v_extended ? c_release : c_drop) :\n\
         phase == c_release ? (holding ? c_release : c_rise) :\n\
         (v_retracted ? c_idle : c_rise);\n"
    ));
    for b in cyl.clone() {
        m.push_str(&format!(
            "h_extend[{b}] = (phase == c_move || phase == c_lower || phase == c_lift) && {};\n",
            bit(b)
        ));
    }
    m.push_str(
        "v_extend = phase == c_lower || phase == c_drop || phase == c_release;\n\
         suction = phase == c_lower || phase == c_lift || phase == c_return || phase == c_drop;\n}\n",
    );

    let mut r = String::new();
    header(
        &mut r,
        &[
            format!("pick-and-place requirements, n={n}, formalization {FORMALIZATION}"),
            format!("max-len={max_len} k-opt={k_opt}"),
            "PRT_1: a workpiece is taken, delivered, then the arm returns home (PRF_1: then moves out again)".into(),
            "PRT_2: an occupied tray is eventually empty (PRF_2: eventually empty for good)".into(),
            "PRT_3: the arm is not lowered over tray j before a workpiece appears there (PRF_3: not aligned at all)".into(),
        ],
    );
    let delivered = "!holding && v_extended && x == 0";
    let some_out = any(cyl.clone().map(|b| format!("h_extended[{b}]")));
    let mut prt = Vec::new();
    let mut prf = Vec::new();
    for j in inputs.clone() {
        let taken = format!("holding && x == {j}");
        let at = format!("x == {j} && v_extended");
        prt.push(format!(
            "PRT_1_{j} expect-pass : G ({} -> F ({taken} && F ({delivered} && F (v_retracted && x == 0))))",
            wp(j)
        ));
        prt.push(format!("PRT_2_{j} expect-pass : G ({} -> F !{})", wp(j), wp(j)));
        prt.push(format!(
            "PRT_3_{j} expect-pass : (!({at}) U {}) || G !({at})",
            wp(j)
        ));
        prf.push(format!(
            "PRF_1_{j} expect-fail : G ({} -> F ({taken} && F ({delivered} && F (v_retracted && {some_out}))))",
            wp(j)
        ));
        prf.push(format!("PRF_2_{j} expect-fail : G ({} -> F (G !{}))", wp(j), wp(j)));
        if j < trays {
            prf.push(format!(
                "PRF_3_{j} expect-fail : (!(x == {j}) U {}) || G !(x == {j})",
                wp(j)
            ));
        }
    }
    for line in prt.iter().chain(&prf) {
        r.push_str(line);
        r.push('\n');
    }
    (m, r, max_len, k_opt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_model;
    use crate::ir::VarKind;

    fn counts(text: &str) -> [usize; 3] {
        let m = parse_model(text).unwrap();
        let k = |kind| m.variables.iter().filter(|v| v.kind == kind).count();
        [k(VarKind::Nondeterministic), k(VarKind::Input), k(VarKind::Output)]
    }

    #[test]
    fn elevator_shape() {
        let c = gen_elevator(3).unwrap();
        assert_eq!(counts(&c.model_text), [6, 15, 5]);
        assert_eq!((c.max_len, c.k_opt), (15, 14));
        assert_eq!(header_max_len(&c.model_text), Some(15));
        let reqs = parse_requirements(&c.reqs_text).unwrap();
        assert_eq!(reqs.requirements.len(), 24);
        assert_eq!(
            reqs.requirements[0].formula.to_string(),
            "X (G (!on_floor[0] && !on_floor[1] && !on_floor[2] -> door_closed[0]))"
        );
    }

    #[test]
    fn pnp_shape() {
        let c = gen_pnp(2).unwrap();
        assert_eq!(counts(&c.model_text), [3, 10, 4]);
        let reqs = parse_requirements(&c.reqs_text).unwrap();
        let prt = reqs.requirements.iter().filter(|r| r.id.starts_with("PRT")).count();
        let prf = reqs.requirements.iter().filter(|r| r.id.starts_with("PRF")).count();
        assert_eq!((prt, prf), (9, 8));
        assert_eq!(gen_pnp(5).unwrap().max_len, 17);
        for n in 2..=5 {
            let r = parse_requirements(&gen_pnp(n).unwrap().reqs_text).unwrap();
            assert_eq!(r.requirements.len(), 3 * ((1 << n) - 1) + 3 * (1 << n) - 4);
        }
    }

    #[test]
    fn bounds_and_errors() {
        assert!(matches!(gen_elevator(1), Err(CasegenError::UnsupportedN { n: 1, .. })));
        assert!(gen_elevator(1).unwrap_err().to_string().contains("unsupported n"));
        assert!(gen_pnp(7).is_err());
        for n in 2..=15 {
            let c = gen_elevator(n).unwrap();
            assert_eq!(parse_requirements(&c.reqs_text).unwrap().requirements.len(), 8 * n);
        }
    }

    #[test]
    fn output_is_canonical() {
        let c = gen_elevator(2).unwrap();
        assert_eq!(print_model(&parse_model(&c.model_text).unwrap()), c.model_text);
        assert_eq!(c.stem(), "elevator2");
    }
}
