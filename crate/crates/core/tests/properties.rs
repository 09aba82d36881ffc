use proptest::prelude::*;

use wpcheck::ast::run;
use wpcheck::branching::{embed, unextend, Branching};
use wpcheck::checker::corpus::{corpus_check_config, corpus_domains, generate_program_corpus, run_suite, CorpusConfig};
use wpcheck::checker::{
    check_agreement, check_monotonicity, obligation, param_bindings, CheckConfig, Mode, PostPair, Subject,
};
use wpcheck::formula::{alpha_eq, eval_formula, print_formula, simplify, EvalCtx, Formula};
use wpcheck::frontend::{compile_unit, parse_formula, parse_unit, print_unit, Prog, SourceUnit, Spec};
use wpcheck::rws::{Rws, RwsInput};
use wpcheck::values::{name, Env, Name, Ty, Value};

fn corpus(seed: u64, count: usize) -> Vec<SourceUnit> {
    generate_program_corpus(&CorpusConfig {
        seed,
        count,
        max_depth: 5,
        posts_per_program: 3,
    })
}

fn cfg() -> CheckConfig {
    let mut c = corpus_check_config(4);
    c.jobs = Some(1);
    c
}

fn env(parts: &[&[(Name, Value)]]) -> Env {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

fn finite(ty: &Ty) -> bool {
    match ty {
        Ty::Unit | Ty::Bool | Ty::St | Ty::Ev | Ty::Wr => true,
        Ty::Maybe(t) => finite(t),
        Ty::Either(a, b) | Ty::Pair(a, b) => finite(a) && finite(b),
        _ => false,
    }
}

/// Rewrites guarded quantifiers over finite carriers into plain ones with
/// the guard as a hypothesis.
fn unguard(f: &Formula) -> Formula {
    match f {
        Formula::ForallGuarded { var, ty, guard, body } if finite(ty) => {
            Formula::forall(var.clone(), ty.clone(), Formula::implies(guard.clone(), unguard(body)))
        }
        Formula::ForallGuarded { var, ty, guard, body } => {
            Formula::guarded(var.clone(), ty.clone(), guard.clone(), unguard(body))
        }
        Formula::ForallPlain { var, ty, body } => Formula::forall(var.clone(), ty.clone(), unguard(body)),
        Formula::Implies(a, body) => Formula::implies(a.clone(), unguard(body)),
        Formula::And(xs) => Formula::and(xs.iter().map(unguard).collect()),
        other => other.clone(),
    }
}

fn obligations(unit: &SourceUnit) -> Vec<Formula> {
    let c = compile_unit(unit).unwrap();
    let subject = c.subject();
    c.specs
        .iter()
        .map(|(_, p)| obligation(&Branching::new(Rws), &subject, p, &cfg()).unwrap())
        .collect()
}

fn inputs() -> Vec<RwsInput> {
    let d = corpus_domains();
    let mut out = Vec::new();
    for e in d.ev.values() {
        for s in d.st.values() {
            out.push(RwsInput::new(e.clone(), s));
        }
    }
    out
}

fn input_vars(i: &RwsInput) -> Vec<(Name, Value)> {
    vec![(name("pre-env"), i.env.clone()), (name("pre-state"), i.state.clone())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn wp_agrees_with_post_after_run(seed in any::<u64>()) {
        let r = run_suite(&corpus(seed, 4), &cfg()).unwrap();
        prop_assert!(r.passed(), "{:?}", r.first_failures);
        prop_assert_eq!(r.specs, 12);
    }

    #[test]
    fn units_round_trip_through_text(seed in any::<u64>()) {
        for u in corpus(seed, 6) {
            let text = print_unit(&u);
            let back = parse_unit(&text).unwrap();
            prop_assert_eq!(&back, &u);
            prop_assert_eq!(print_unit(&back), text);
        }
    }

    #[test]
    fn same_seed_same_corpus(seed in any::<u64>()) {
        prop_assert_eq!(corpus(seed, 5), corpus(seed, 5));
    }

    #[test]
    fn printed_obligations_parse_back_alpha_equal(seed in any::<u64>()) {
        let d = corpus_domains();
        for u in corpus(seed, 3) {
            for f in obligations(&u) {
                for g in [f.clone(), simplify(&f)] {
                    let text = print_formula(&g);
                    let back = parse_formula(&text, &d).unwrap_or_else(|e| panic!("{e}\n{text}"));
                    prop_assert!(alpha_eq(&back, &g), "{}\n---\n{}", text, back);
                }
            }
        }
    }

    #[test]
    fn guard_substitution_agrees_with_enumeration(seed in any::<u64>()) {
        let c0 = cfg();
        let ctx = EvalCtx::new(&c0.domains, &c0.bounds);
        for u in corpus(seed, 3) {
            let c = compile_unit(&u).unwrap();
            let bindings = param_bindings(&c.subject(), &c0).unwrap();
            for f in obligations(&u) {
                let plain = unguard(&f);
                for b in &bindings {
                    for i in inputs() {
                        let e = env(&[&input_vars(&i), b]);
                        prop_assert_eq!(
                            eval_formula(&f, &e, &ctx).unwrap(),
                            eval_formula(&plain, &e, &ctx).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn output_of_a_bind_is_the_concatenation(seed in any::<u64>()) {
        let units = corpus(seed, 2);
        let (m1, m2) = (units[0].program.clone(), units[1].program.clone());
        let first = SourceUnit { specs: vec![], ..units[0].clone() };
        let second = SourceUnit { program: m2.clone(), specs: vec![], ..units[0].clone() };
        let both = SourceUnit { program: Prog::bind(m1, "_", m2), specs: vec![], ..units[0].clone() };
        let (c1, c2, cb) = (compile_unit(&first).unwrap(), compile_unit(&second).unwrap(), compile_unit(&both).unwrap());
        let t = Branching::new(Rws);
        for b in param_bindings(&cb.subject(), &cfg()).unwrap() {
            for i in inputs() {
                let o1 = run(&t, &c1.program(&b).unwrap(), &i).unwrap();
                let o2 = run(&t, &c2.program(&b).unwrap(), &RwsInput::new(i.env.clone(), o1.state.clone())).unwrap();
                let ob = run(&t, &cb.program(&b).unwrap(), &i).unwrap();
                let mut expected = o1.output.as_list().unwrap().to_vec();
                expected.extend(o2.output.as_list().unwrap().iter().cloned());
                prop_assert_eq!(ob.output, Value::List(expected));
                prop_assert_eq!(ob.state, o2.state);
                prop_assert_eq!(ob.result, o2.result);
            }
        }
    }

    #[test]
    fn embedding_changes_neither_runs_nor_verdicts(seed in any::<u64>()) {
        let c0 = cfg();
        let ctx = EvalCtx::new(&c0.domains, &c0.bounds);
        for u in corpus(seed, 6).into_iter().filter(|u| !u.program.has_branch()) {
            let c = compile_unit(&u).unwrap();
            let (c1, c2) = (c.clone(), c.clone());
            let base: Subject<_> = Subject::new(c.params.clone(), c.result_ty.clone(), move |b| unextend(&c1.program(b)?));
            let embedded: Subject<_> =
                Subject::new(c.params.clone(), c.result_ty.clone(), move |b| Ok(embed(&unextend(&c2.program(b)?)?)));
            let bindings = param_bindings(&base, &c0).unwrap();
            for (_, p) in &c.specs {
                let w_base = obligation(&Rws, &base, p, &c0).unwrap();
                let w_ext = obligation(&Branching::new(Rws), &embedded, p, &c0).unwrap();
                for b in &bindings {
                    let (mb, me) = (base.instantiate(b).unwrap(), embedded.instantiate(b).unwrap());
                    for i in inputs() {
                        prop_assert_eq!(run(&Rws, &mb, &i).unwrap(), run(&Branching::new(Rws), &me, &i).unwrap());
                        let e = env(&[&input_vars(&i), b]);
                        prop_assert_eq!(eval_formula(&w_base, &e, &ctx).unwrap(), eval_formula(&w_ext, &e, &ctx).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn monotonicity_survives_extension(seed in any::<u64>()) {
        for u in corpus(seed, 4).into_iter().filter(|u| !u.program.has_branch()) {
            let c = compile_unit(&u).unwrap();
            let c1 = c.clone();
            let base: Subject<_> = Subject::new(c.params.clone(), c.result_ty.clone(), move |b| unextend(&c1.program(b)?));
            let p = c.compile_spec(&u.specs[0].1).unwrap();
            let q = c.compile_spec(&u.specs[1].1).unwrap();
            let pair = PostPair { stronger: Formula::and(vec![p.clone(), q]), weaker: p };
            prop_assert!(check_monotonicity(&Rws, &base, &pair, &cfg()).unwrap().passed());
            prop_assert!(check_monotonicity(&Branching::new(Rws), &c.subject(), &pair, &cfg()).unwrap().passed());
        }
    }
}

#[test]
fn json_reports_are_byte_identical_with_one_job() {
    let units = corpus(11, 3);
    let render = || {
        units
            .iter()
            .map(|u| {
                let c = compile_unit(u).unwrap();
                let mut r = check_agreement(&Branching::new(Rws), &c.subject(), &c.specs[0].1, Mode::Equivalence, &cfg()).unwrap();
                r.elapsed = Default::default();
                r.to_json_pretty()
            })
            .collect::<Vec<_>>()
    };
    assert_eq!(render(), render());
}

#[test]
fn obligations_are_deterministic() {
    for u in corpus(12, 10) {
        assert_eq!(obligations(&u), obligations(&u));
    }
}

#[test]
fn hand_written_spec_forms_survive_round_trip() {
    let src = "(domain St (s0 s1)) (domain Wr (w0)) (param g (fn St (maybe Wr)))
        (return unit)
        (spec A (and (eq pre-state post-state) (eq 0 (length output))))
        (spec B (implies (eq (apply g pre-state) nothing) (forall (x St) (eq x x))))
        (spec C bottom)
        (spec D top)";
    let u = parse_unit(src).unwrap();
    assert_eq!(parse_unit(&print_unit(&u)).unwrap(), u);
    assert_eq!(u.specs[3].1, Spec::top());
}
