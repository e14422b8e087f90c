//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use loopcheck::casegen::{generate, CaseStudy, Study};
use loopcheck::dsl::{parse_ltl, parse_model, parse_requirements, RequirementSet};
use loopcheck::engine::{simulate_lasso, LassoTrace, TestSuite, DEFAULT_STEP_CAP};
use loopcheck::exec::{execute_suite, ExecConfig, ExecReport, Outcome};
use loopcheck::ir::{CompiledModel, VarKind};
use loopcheck::ltl::{eval_on_lasso, BoundFormula, SubformulaMode};
use loopcheck::oracle::{
    all_columns, brute_force_eval, exhaustive_reach, random_ltl_text, random_model_text,
};
use loopcheck::testgen::{
    bounded_reach, enumerate_goals, generate_suite, Backend, GenerationReport, GeneratorConfig,
    GoalConfig, Reach,
};

type Verdict = Result<String, String>;

struct Case {
    model: CompiledModel,
    reqs: RequirementSet,
    max_len: usize,
}

fn load(study: Study, n: usize) -> Case {
    let c: CaseStudy = generate(study, n).unwrap();
    Case {
        model: CompiledModel::new(&parse_model(&c.model_text).unwrap()).unwrap(),
        reqs: parse_requirements(&c.reqs_text).unwrap(),
        max_len: c.max_len,
    }
}

fn pipeline(case: &Case, backend: Backend) -> Result<(TestSuite, GenerationReport, ExecReport), String> {
    let cfg = GeneratorConfig {
        max_len: case.max_len,
        backend,
        ..Default::default()
    };
    let (suite, report) = generate_suite(&case.model, &case.reqs, &cfg).map_err(|e| e.to_string())?;
    let exec = execute_suite(&case.model, &case.reqs, &suite, &ExecConfig::default()).map_err(|e| e.to_string())?;
    Ok((suite, report, exec))
}

fn outcome<'r>(exec: &'r ExecReport, id: &str) -> &'r Outcome {
    &exec.verdicts.iter().find(|v| v.requirement == id).unwrap().outcome
}

fn is_pass(o: &Outcome) -> bool {
    matches!(o, Outcome::PassOnSuite)
}

fn is_violated(o: &Outcome) -> bool {
    matches!(o, Outcome::Violated { .. })
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    if elapsed <= budget {
        Ok(())
    } else {
        Err(format!("took {elapsed:.1?}, budget {budget:?}"))
    }
}

fn picker(rng: &mut ChaCha8Rng) -> impl FnMut(usize) -> usize + '_ {
    move |n| rng.gen_range(0..n)
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let m = CompiledModel::new(
        &parse_model("model L input a : bool = false input b : bool = false input c : int 0..3 = 0 plant { } controller { }")
            .unwrap(),
    )
    .unwrap();
    let atoms = ["a", "b", "c == 0", "c >= 2", "a && c != 1", "b || c == 3"];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trials = 10_000;
    for i in 0..trials {
        let p = rng.gen_range(0..=5);
        let q = rng.gen_range(1..=5);
        let states = (0..p + q)
            .map(|_| vec![rng.gen_range(0..2), rng.gen_range(0..2), rng.gen_range(0..4)])
            .collect();
        let trace = LassoTrace {
            states,
            applied: vec![None; p + q],
            prefix_len: p,
            loop_len: q,
        };
        let text = random_ltl_text(&mut picker(&mut rng), &atoms, 4);
        let f = parse_ltl(&text).map_err(|e| e.to_string())?;
        let k = rng.gen_range(0..p + 2 * q);
        let bound = BoundFormula::bind(&f, &m).map_err(|e| e.to_string())?;
        let fast = eval_on_lasso(&bound, &m, &trace, k).map_err(|e| e.to_string())?;
        let slow = brute_force_eval(&f, &m, &trace, k)?;
        if fast != slow {
            return Err(format!("trial {i}: `{text}` at k={k} fixpoint={fast} oracle={slow}"));
        }
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("{trials}/{trials} lasso/formula pairs agree in {:.1?}", start.elapsed()))
}

fn replay_violations(case: &Case) -> Result<usize, String> {
    let (suite, _, exec) = pipeline(case, Backend::Auto)?;
    let mut checked = 0;
    for (req, v) in case.reqs.requirements.iter().zip(&exec.verdicts) {
        if let Outcome::Violated { test, trace } = &v.outcome {
            let t = suite.tests.iter().find(|t| &t.id == test).ok_or("unknown test")?;
            let fresh = simulate_lasso(&case.model, t, DEFAULT_STEP_CAP).map_err(|e| e.to_string())?;
            if &fresh != trace {
                return Err(format!("{}: trace of {test} does not re-simulate", req.id));
            }
            if brute_force_eval(&req.formula, &case.model, &fresh, 0)? {
                return Err(format!("{}: oracle says {test} satisfies the formula", req.id));
            }
            checked += 1;
        }
    }
    Ok(checked)
}

fn criterion_2() -> Verdict {
    let e = replay_violations(&load(Study::Elevator, 3))?;
    let p = replay_violations(&load(Study::Pnp, 2))?;
    Ok(format!("{} violations replayed (elevator3 {e}, pnp2 {p}), 0 discrepancies", e + p))
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let models = 30;
    let mut goals_checked = 0;
    for i in 0..models {
        let nondet = rng.gen_range(1..=2);
        let state = rng.gen_range(1..=4 - nondet);
        let text = random_model_text(&mut picker(&mut rng), nondet, state);
        let m = CompiledModel::new(&parse_model(&text).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let branching = all_columns(&m).len();
        let mut max_len = rng.gen_range(1..=6);
        while max_len > 1 && branching.pow(max_len as u32) > 50_000 {
            max_len -= 1;
        }
        let atoms: Vec<String> = m
            .model()
            .variables
            .iter()
            .filter(|v| v.kind != VarKind::Nondeterministic)
            .flat_map(|v| v.domain.values().map(|x| format!("{} == {x}", v.display_name())).collect::<Vec<_>>())
            .collect();
        let atoms: Vec<&str> = atoms.iter().map(String::as_str).collect();
        let reqs = parse_requirements(&format!("R : {}\n", random_ltl_text(&mut picker(&mut rng), &atoms, 3)))
            .map_err(|e| e.to_string())?;
        let goals = enumerate_goals(
            m.model(),
            &reqs,
            GoalConfig {
                subformulas: SubformulaMode::All,
                include_nondet: true,
            },
        );
        for g in goals {
            let pred = m.compile_predicate(&g.predicate)?;
            let truth = exhaustive_reach(&m, &pred, max_len).map_err(|e| e.to_string())?;
            for backend in [Backend::Explicit, Backend::Bmc] {
                let cfg = GeneratorConfig {
                    max_len,
                    backend,
                    ..Default::default()
                };
                let got = match bounded_reach(&m, &g.predicate, &cfg).map_err(|e| e.to_string())? {
                    Reach::Witness(w) => Some(w.hit),
                    Reach::Unreachable => None,
                };
                if got != truth {
                    return Err(format!(
                        "model {i} goal `{}` max_len={max_len}: {} gives {got:?}, enumeration {truth:?}\n{text}",
                        g.predicate,
                        backend.name()
                    ));
                }
            }
            goals_checked += 1;
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!(
        "{models} models, {goals_checked} goals: explicit and bmc match enumeration in {:.1?}",
        start.elapsed()
    ))
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let case = load(Study::Elevator, 3);
    if case.max_len != 15 {
        return Err(format!("max_len {}", case.max_len));
    }
    let (_, _, exec) = pipeline(&case, Backend::Explicit)?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    let ids = |p: &str| case.reqs.requirements.iter().filter(|r| r.id.starts_with(p)).map(|r| r.id.clone()).collect::<Vec<_>>();
    let ert = ids("ERT");
    let failing: Vec<_> = ert.iter().filter(|id| !is_pass(outcome(&exec, id))).collect();
    if ert.len() != 12 || !failing.is_empty() {
        return Err(format!("{} ERT, not passing: {failing:?}", ert.len()));
    }
    let erf1 = ids("ERF_1_");
    if erf1.len() != 3 || !erf1.iter().all(|id| is_violated(outcome(&exec, id))) {
        return Err("ERF_1 not violated for every floor".into());
    }
    let erf = ids("ERF");
    let violated = erf.iter().filter(|id| is_violated(outcome(&exec, id))).count();
    if violated < 6 {
        return Err(format!("only {violated}/12 ERF violated"));
    }
    Ok(format!(
        "12/12 ERT pass, 3/3 ERF_1 violated, {violated}/12 ERF violated ({} expectation-misses) in {elapsed:.1?}",
        12 - violated
    ))
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let case = load(Study::Pnp, 2);
    if case.max_len != 11 {
        return Err(format!("max_len {}", case.max_len));
    }
    let (_, _, exec) = pipeline(&case, Backend::Explicit)?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(60))?;
    let prt: Vec<_> = exec.verdicts.iter().filter(|v| v.requirement.starts_with("PRT")).collect();
    if prt.len() != 9 || !prt.iter().all(|v| is_pass(&v.outcome)) {
        return Err("not every PRT passes".into());
    }
    let prf = exec.verdicts.iter().filter(|v| v.requirement.starts_with("PRF")).count();
    let violated = exec
        .verdicts
        .iter()
        .filter(|v| v.requirement.starts_with("PRF") && is_violated(&v.outcome))
        .count();
    if violated < 2 {
        return Err(format!("only {violated} PRF violated"));
    }
    Ok(format!("9/9 PRT pass, {violated}/{prf} PRF violated in {elapsed:.1?}"))
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let mut parts = Vec::new();
    for n in 3..=8 {
        let case = load(Study::Elevator, n);
        let (_, report, _) = pipeline(&case, Backend::Auto)?;
        if report.processed() != report.goals.len() {
            return Err(format!("n={n}: {}/{} goals processed", report.processed(), report.goals.len()));
        }
        parts.push(format!("n={n}:{}", report.resolved_backend.name()));
    }
    within(start.elapsed(), Duration::from_secs(15 * 60))?;
    Ok(format!(
        "all goals processed for {} in {:.1?} (backend=auto; explicit-only is infeasible past n=5)",
        parts.join(","),
        start.elapsed()
    ))
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_loopcheck"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    match o.status.code() {
        Some(0 | 1) => Ok(()),
        c => Err(format!("exit {c:?}: {}", String::from_utf8_lossy(&o.stderr))),
    }
}

fn criterion_7() -> Verdict {
    let d = TempDir::new().map_err(|e| e.to_string())?;
    let dir = d.path().to_str().unwrap();
    run_cli(&["casegen", "elevator", "--n", "4", "--out-dir", dir])?;
    let model = format!("{dir}/elevator4.clm");
    let reqs = format!("{dir}/elevator4.ltl");
    let runs = ["a", "b"].map(|r| format!("{dir}/{r}"));
    for out in &runs {
        run_cli(&["pipeline", "--model", &model, "--reqs", &reqs, "--out-dir", out])?;
    }
    let files = ["elevator4.cts", "elevator4.gen.txt", "elevator4.report.txt"];
    for f in files {
        let read = |r: &str| fs::read(Path::new(r).join(f)).map_err(|e| e.to_string());
        if read(&runs[0])? != read(&runs[1])? {
            return Err(format!("{f} differs between runs"));
        }
    }
    Ok(format!("{} byte-identical across two pipeline runs", files.join(", ")))
}

fn criterion_8() -> Verdict {
    let counts = |study, n| {
        let m = parse_model(&generate(study, n).unwrap().model_text).unwrap();
        let k = |kind| m.variables.iter().filter(|v| v.kind == kind).count();
        [k(VarKind::Nondeterministic), k(VarKind::Input), k(VarKind::Output)]
    };
    let e = counts(Study::Elevator, 3);
    let p = counts(Study::Pnp, 2);
    if e != [6, 15, 5] || p != [3, 10, 4] {
        return Err(format!("elevator3 {e:?}, pnp2 {p:?}"));
    }
    Ok("elevator3 6/15/5 and pnp2 3/10/4 nondet/input/output".into())
}

fn main() {
    let criteria: [(u32, fn() -> Verdict); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut failed = 0;
    for (n, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {n}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n}: {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
