//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use wpcheck::branching::Branching;
use wpcheck::checker::corpus::{
    corpus_check_config, generate_program_corpus, monotonicity_pairs, run_monotonicity, run_suite, seed_from_env,
    CorpusConfig, MonotonicityReport, SuiteReport, DEFAULT_SEED,
};
use wpcheck::checker::{check_simplifier, CheckConfig};
use wpcheck::formula::{alpha_eq, Formula};
use wpcheck::frontend::{load, parse_formula, parse_unit, print_unit, SourceUnit, PAPER_INTRO};
use wpcheck::rws::Rws;
use wpcheck::values::{Domains, Ty};

const INTRO_BUDGET: Duration = Duration::from_secs(5);
const CORPUS_BUDGET: Duration = Duration::from_secs(60);
const CORPUS_SIZE: usize = 500;
const CORPUS_DEPTH: usize = 5;
const POSTS_PER_PROGRAM: usize = 3;
const MONOTONICITY_PAIRS: usize = 200;
const OUTPUT_BOUND: usize = 4;

/// Expected `wp --simplify` output for the introductory example.
const SIMPLIFIED_GOLDEN: &str = "\
(r : Maybe Wr) → r ≡ g pre-state →
    ((j : Wr) → r ≡ just j → (o' : List Wr) → o' ≡ [] →
         (pre-state ≡ pre-state) × (0 ≡ length o'))
    × (r ≡ nothing → (o' : List Wr) → o' ≡ [] →
           (pre-state ≡ pre-state) × (0 ≡ length o'))";

/// The hand-derived obligation for the introductory example, with the
/// input state written `pre-state`.
const DISPLAYED: &str = "\
(r : Maybe Wr) → r ≡ g pre-state →
    ((j : Wr) → r ≡ just j → (r1 : Unit) → r1 ≡ unit →
        (o' : List Wr) → o' ≡ [] → (pre-state ≡ pre-state) × (0 ≡ length o'))
    × (r ≡ nothing → (o' : List Wr) → o' ≡ [] →
        (pre-state ≡ pre-state) × (0 ≡ length o'))";

type Verdict = Result<String, String>;
type Criterion<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn east(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/east").join(rel)
}

fn wpcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wpcheck"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Result<serde_json::Value, String> {
    serde_json::from_slice(&o.stdout).map_err(|e| format!("bad JSON ({e}): {}", stdout(o)))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn intro_path() -> String {
    east("paper_intro.east").to_string_lossy().into_owned()
}

fn criterion_1() -> Verdict {
    let file = intro_path();
    let start = Instant::now();
    let out = wpcheck(&["check", &file, "--spec", "ProgPost", "--mode", "both", "--format", "json"]);
    let took = start.elapsed();
    let j = json(&out)?;
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()))?;
    ensure(j["verdict"] == "pass", || format!("verdict {}", j["verdict"]))?;
    ensure(j["inputs_checked"] == 192 && j["params_checked"] == 64, || {
        format!("{} cases over {} tables", j["inputs_checked"], j["params_checked"])
    })?;
    for mode in ["sufficiency", "necessity"] {
        let o = wpcheck(&["check", &file, "--spec", "ProgPost", "--mode", mode, "--format", "json"]);
        let j = json(&o)?;
        ensure(o.status.code() == Some(0) && j["verdict"] == "pass", || format!("{mode}: {}", stdout(&o)))?;
    }
    ensure(took < INTRO_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("192 cases, 64 tables, both directions pass, {} ms", took.as_millis()))
}

fn intro_domains() -> Domains {
    Domains::new(&["s0", "s1", "s2"], &["e0"], &["w0", "w1", "w2"]).unwrap()
}

fn ends_in_prog_post(f: &Formula) -> bool {
    match f {
        Formula::ForallGuarded { body, .. } | Formula::ForallPlain { body, .. } | Formula::Implies(_, body) => {
            ends_in_prog_post(body)
        }
        Formula::And(xs) => {
            let shown: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
            xs.len() == 2 && shown[0] == "pre-state ≡ pre-state" && shown[1].starts_with("0 ≡ length ")
        }
        _ => false,
    }
}

fn criterion_2() -> Verdict {
    let file = intro_path();
    let out = wpcheck(&["wp", &file, "--spec", "ProgPost", "--simplify"]);
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()))?;
    let text = stdout(&out);
    let first = text.lines().next().unwrap_or("");
    ensure(first.contains("(r : Maybe Wr)"), || format!("first line `{first}`"))?;
    let d = intro_domains();
    let got = parse_formula(&text, &d).map_err(|e| format!("output does not parse back: {e}"))?;
    let golden = parse_formula(SIMPLIFIED_GOLDEN, &d).map_err(|e| e.to_string())?;
    ensure(alpha_eq(&got, &golden), || format!("not alpha-equivalent to the golden:\n{text}"))?;
    match &got {
        Formula::ForallGuarded { ty, guard, body, .. } => {
            ensure(ty == &Ty::maybe(Ty::Wr), || format!("binder type {ty}"))?;
            ensure(guard.rhs.to_string() == "g pre-state", || format!("guard {guard}"))?;
            match &**body {
                Formula::And(cases) if cases.len() == 2 => {
                    ensure(matches!(&cases[0], Formula::ForallGuarded { ty, .. } if ty == &Ty::Wr), || {
                        format!("first conjunct is not the just case: {}", cases[0])
                    })?;
                    ensure(
                        matches!(&cases[1], Formula::Implies(a, _) if a.rhs.to_string() == "nothing"),
                        || format!("second conjunct is not the nothing case: {}", cases[1]),
                    )?;
                    ensure(cases.iter().all(ends_in_prog_post), || "a case does not end in the post atoms".into())?;
                }
                other => return Err(format!("body is not a two-case conjunction: {other}")),
            }
        }
        other => return Err(format!("top connective is not a guarded quantifier: {other}")),
    }
    let raw = stdout(&wpcheck(&["wp", &file, "--spec", "ProgPost"]));
    let raw = parse_formula(&raw, &d).map_err(|e| e.to_string())?;
    let displayed = parse_formula(DISPLAYED, &d).map_err(|e| e.to_string())?;
    ensure(alpha_eq(&raw, &displayed), || format!("unsimplified obligation differs from the displayed one:\n{raw}"))?;
    Ok("guarded ∀ over Maybe Wr, just/nothing cases, golden alpha-equal".into())
}

struct CorpusRun {
    units: Vec<SourceUnit>,
    suite: SuiteReport,
    mono: MonotonicityReport,
    seed: u64,
    total: Duration,
}

fn corpus_run() -> Result<CorpusRun, String> {
    let start = Instant::now();
    let cfg = CorpusConfig {
        seed: seed_from_env(DEFAULT_SEED),
        count: CORPUS_SIZE,
        max_depth: CORPUS_DEPTH,
        posts_per_program: POSTS_PER_PROGRAM,
    };
    let units = generate_program_corpus(&cfg);
    let check = corpus_check_config(OUTPUT_BOUND);
    let suite = run_suite(&units, &check).map_err(|e| e.to_string())?;
    let total = start.elapsed();
    let pairs = monotonicity_pairs(&units, MONOTONICITY_PAIRS);
    let mono = run_monotonicity(&units, &pairs, &check).map_err(|e| e.to_string())?;
    Ok(CorpusRun {
        units,
        suite,
        mono,
        seed: cfg.seed,
        total,
    })
}

fn criterion_3(c: &CorpusRun) -> Verdict {
    let s = &c.suite;
    ensure(c.units.len() == CORPUS_SIZE, || format!("{} programs", c.units.len()))?;
    ensure(c.units.iter().all(|u| u.program.depth() <= CORPUS_DEPTH), || "depth bound exceeded".into())?;
    ensure(s.specs == CORPUS_SIZE * POSTS_PER_PROGRAM, || format!("{} specs", s.specs))?;
    ensure(s.disagreements == 0, || format!("{} disagreements: {:?}", s.disagreements, s.first_failures))?;
    ensure(c.total < CORPUS_BUDGET, || format!("took {:?}", c.total))?;
    Ok(format!(
        "seed {}, {} programs × {} posts, {} cases, 0 disagreements, {} ms",
        c.seed,
        c.units.len(),
        POSTS_PER_PROGRAM,
        s.cases,
        c.total.as_millis()
    ))
}

fn criterion_4(c: &CorpusRun) -> Verdict {
    let s = &c.suite;
    ensure(s.branching_programs > 0, || "no branching programs in the corpus".into())?;
    ensure(s.extension_failures == 0, || format!("{} failures: {:?}", s.extension_failures, s.first_failures))?;
    Ok(format!("{} branching programs, {} cases, 0 counterexamples", s.branching_programs, s.extension_cases))
}

fn criterion_5(c: &CorpusRun) -> Verdict {
    let m = &c.mono;
    ensure(m.pairs == MONOTONICITY_PAIRS, || format!("{} pairs", m.pairs))?;
    ensure(m.failures == 0, || format!("{} counterexamples", m.failures))?;
    Ok(format!("{} pairs, {} cases, 0 counterexamples", m.pairs, m.cases))
}

fn negative(file: &str, spec: &str, theory: &str) -> Result<String, String> {
    let path = east(&format!("fixtures/{file}")).to_string_lossy().into_owned();
    let bad = wpcheck(&["check", &path, "--spec", spec, "--theory", theory, "--format", "json"]);
    let j = json(&bad)?;
    let n = j["counterexamples"].as_array().map_or(0, Vec::len);
    ensure(bad.status.code() == Some(1) && j["verdict"] == "fail" && n > 0, || {
        format!("{file} under {theory}: exit {:?}, {}", bad.status.code(), stdout(&bad))
    })?;
    let good = wpcheck(&["check", &path, "--spec", spec, "--format", "json"]);
    ensure(good.status.code() == Some(0), || format!("{file} fails under the correct theory too"))?;
    Ok(format!("{file}: {n} counterexample(s)"))
}

fn criterion_6() -> Verdict {
    let a = negative("broken_gets.east", "ReadsNewState", "broken-gets")?;
    let b = negative("broken_if.east", "Silent", "broken-if")?;
    Ok(format!("{a}; {b}"))
}

fn criterion_7(c: &CorpusRun) -> Verdict {
    let shipped = ["paper_intro.east", "fixtures/broken_gets.east", "fixtures/broken_if.east"];
    for rel in shipped {
        let text = std::fs::read_to_string(east(rel)).map_err(|e| format!("{rel}: {e}"))?;
        let u = parse_unit(&text).map_err(|e| format!("{rel}: {e}"))?;
        let once = print_unit(&u);
        let again = parse_unit(&once).map_err(|e| format!("{rel} reprinted: {e}"))?;
        ensure(again == u && print_unit(&again) == once, || format!("{rel} is not a print/parse fixpoint"))?;
    }
    let example = wpcheck(&["example", "paper-intro"]);
    ensure(stdout(&example) == PAPER_INTRO, || "`example paper-intro` differs from the shipped file".into())?;
    for u in &c.units {
        ensure(parse_unit(&print_unit(u)).as_ref() == Ok(u), || format!("corpus unit fails to round trip:\n{}", print_unit(u)))?;
    }

    let intro = load(PAPER_INTRO).map_err(|e| e.to_string())?;
    let cfg = CheckConfig::new(intro.domains.clone());
    let t = Branching::new(Rws);
    let p = intro.spec("ProgPost").map_err(|e| e.to_string())?;
    let intro_simp = check_simplifier(&t, &intro.subject(), p, &cfg).map_err(|e| e.to_string())?;
    let cases = intro_simp.cases + c.suite.simplifier_cases + c.mono.simplifier_cases;
    let bad = intro_simp.mismatches.len() + c.suite.simplifier_mismatches + c.mono.simplifier_mismatches;
    ensure(bad == 0, || format!("{bad} simplifier mismatches"))?;
    Ok(format!(
        "{} shipped sources + {} corpus units round trip; simplifier sound on {cases} cases",
        shipped.len(),
        c.units.len()
    ))
}

fn main() {
    let corpus = &corpus_run();
    let on_corpus = |f: fn(&CorpusRun) -> Verdict| move || corpus.as_ref().map_err(Clone::clone).and_then(f);
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("intro example, 192 cases under 5 s", Box::new(criterion_1)),
        ("obligation shape", Box::new(criterion_2)),
        ("three-way agreement on 500 programs", Box::new(on_corpus(criterion_3))),
        ("branching extension agreement", Box::new(on_corpus(criterion_4))),
        ("monotonicity on 200 pairs", Box::new(on_corpus(criterion_5))),
        ("negative controls", Box::new(criterion_6)),
        ("round trip and simplifier soundness", Box::new(on_corpus(criterion_7))),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} [{name}]: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL ({why})", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
