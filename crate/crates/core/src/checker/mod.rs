//! Exhaustive agreement checks between the predicate-transformer and the
//! operational semantics.

pub mod corpus;
mod report;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

pub use report::{CheckReport, Counterexample, Mode, Verdict};

use crate::ast::{post_of_formula, run, wp, EffectTheory, Fresh, Program};
use crate::branching::{unextend, Ext};
use crate::error::{Error, Result};
use crate::formula::{eval_formula, simplify, vars, EvalCtx, Formula};
use crate::values::{enumerate_carrier, enumerate_fn_values, name, Bounds, Domains, Env, Name, Ty, Value};

type Builder<C> = Arc<dyn Fn(&[(Name, Value)]) -> Result<Program<C>> + Send + Sync>;

/// A program family indexed by parameter values.
pub struct Subject<C> {
    pub params: Vec<(Name, Ty)>,
    pub result_ty: Ty,
    build: Builder<C>,
}

impl<C> Clone for Subject<C> {
    fn clone(&self) -> Self {
        Subject {
            params: self.params.clone(),
            result_ty: self.result_ty.clone(),
            build: self.build.clone(),
        }
    }
}

impl<C> Subject<C> {
    pub fn new(
        params: Vec<(Name, Ty)>,
        result_ty: Ty,
        build: impl Fn(&[(Name, Value)]) -> Result<Program<C>> + Send + Sync + 'static,
    ) -> Subject<C> {
        Subject {
            params,
            result_ty,
            build: Arc::new(build),
        }
    }

    /// A closed program.
    pub fn closed(result_ty: Ty, m: Program<C>) -> Subject<C>
    where
        C: Clone + Send + Sync + 'static,
    {
        Subject::new(Vec::new(), result_ty, move |_| Ok(m.clone()))
    }

    pub fn instantiate(&self, binding: &[(Name, Value)]) -> Result<Program<C>> {
        (self.build)(binding)
    }

    /// Every parameter bound to its own symbol.
    pub fn symbolic(&self) -> Result<Program<C>> {
        let binding: Vec<(Name, Value)> = self.params.iter().map(|(n, _)| (n.clone(), Value::Sym(n.clone()))).collect();
        self.instantiate(&binding)
    }
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub domains: Domains,
    pub bounds: Bounds,
    /// `None`: rayon's global pool; `Some(1)`: sequential.
    pub jobs: Option<usize>,
    /// Parameters pinned to one value instead of quantified over.
    pub fixed_params: Vec<(Name, Value)>,
    pub fresh_seed: usize,
}

impl CheckConfig {
    pub fn new(domains: Domains) -> CheckConfig {
        CheckConfig {
            domains,
            bounds: Bounds::default(),
            jobs: None,
            fixed_params: Vec::new(),
            fresh_seed: 0,
        }
    }

    fn ctx(&self) -> EvalCtx<'_> {
        EvalCtx::new(&self.domains, &self.bounds)
    }

    /// Name source that never clashes with parameters, spec variables or atoms.
    pub fn fresh<C>(&self, subject: &Subject<C>) -> Fresh {
        let mut fresh = Fresh::with_seed(self.fresh_seed);
        fresh.reserve(subject.params.iter().map(|(n, _)| n.clone()));
        fresh.reserve(vars::ALL.iter().map(|v| name(v)));
        for d in [&self.domains.st, &self.domains.ev, &self.domains.wr] {
            fresh.reserve(d.atoms.iter().cloned());
        }
        fresh
    }
}

fn param_values(ty: &Ty, cfg: &CheckConfig) -> Result<Vec<Value>> {
    match ty {
        Ty::Fn(dom, cod) => enumerate_fn_values(dom, cod, &cfg.domains, &cfg.bounds),
        other => enumerate_carrier(other, &cfg.domains, &cfg.bounds),
    }
}

/// Cartesian product of parameter values, first parameter slowest.
pub fn param_bindings<C>(subject: &Subject<C>, cfg: &CheckConfig) -> Result<Vec<Vec<(Name, Value)>>> {
    let mut out: Vec<Vec<(Name, Value)>> = vec![Vec::new()];
    for (n, ty) in &subject.params {
        let choices = match cfg.fixed_params.iter().find(|(k, _)| k == n) {
            Some((_, v)) => vec![v.clone()],
            None => param_values(ty, cfg)?,
        };
        let mut next = Vec::with_capacity(out.len() * choices.len());
        for prefix in &out {
            for v in &choices {
                let mut b = prefix.clone();
                b.push((n.clone(), v.clone()));
                next.push(b);
            }
        }
        out = next;
    }
    for (n, _) in &cfg.fixed_params {
        if !subject.params.iter().any(|(k, _)| k == n) {
            return Err(Error::Undeclared {
                kind: "parameter",
                name: n.to_string(),
            });
        }
    }
    Ok(out)
}

/// Runs `per_binding` over every parameter binding, in parallel when
/// configured, and concatenates the results in enumeration order.
fn over_bindings<F>(bindings: &[Vec<(Name, Value)>], cfg: &CheckConfig, per_binding: F) -> Result<Vec<Counterexample>>
where
    F: Fn(&[(Name, Value)]) -> Result<Vec<Counterexample>> + Send + Sync,
{
    let collect = || -> Result<Vec<Counterexample>> {
        let parts: Vec<Result<Vec<Counterexample>>> = bindings.par_iter().map(|b| per_binding(b)).collect();
        let mut out = Vec::new();
        for p in parts {
            out.extend(p?);
        }
        Ok(out)
    };
    match cfg.jobs {
        Some(1) => {
            let mut out = Vec::new();
            for b in bindings {
                out.extend(per_binding(b)?);
            }
            Ok(out)
        }
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Invalid(e.to_string()))?
            .install(collect),
        None => collect(),
    }
}

fn render(binding: &[(Name, Value)]) -> BTreeMap<String, String> {
    binding.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn env_of(parts: &[&[(Name, Value)]]) -> Env {
    parts.iter().flat_map(|p| p.iter().cloned()).collect()
}

/// Symbolic weakest precondition of the subject for a spec formula.
pub fn obligation<T: EffectTheory>(theory: &T, subject: &Subject<T::Cmd>, spec: &Formula, cfg: &CheckConfig) -> Result<Formula> {
    let m = subject.symbolic()?;
    wp(theory, &m, post_of_formula(theory, spec), &theory.symbolic_input(), &mut cfg.fresh(subject))
}

/// Sufficiency, necessity, or both, over every parameter binding and input.
pub fn check_agreement<T: EffectTheory>(
    theory: &T,
    subject: &Subject<T::Cmd>,
    spec: &Formula,
    mode: Mode,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let start = Instant::now();
    let pre = obligation(theory, subject, spec, cfg)?;
    let bindings = param_bindings(subject, cfg)?;
    let inputs = theory.enumerate_inputs(&cfg.domains);
    let ctx = cfg.ctx();
    let cxs = over_bindings(&bindings, cfg, |binding| {
        let m = subject.instantiate(binding)?;
        let mut cxs = Vec::new();
        for i in &inputs {
            let iv = theory.input_vars(i);
            let out = run(theory, &m, i)?;
            let post_ok = eval_formula(spec, &env_of(&[&iv, &theory.output_vars(&out), binding]), &ctx)?;
            let wp_ok = eval_formula(&pre, &env_of(&[&iv, binding]), &ctx)?;
            let bad = match mode {
                Mode::Sufficiency => wp_ok && !post_ok,
                Mode::Necessity => post_ok && !wp_ok,
                _ => wp_ok != post_ok,
            };
            if bad {
                cxs.push(Counterexample {
                    params: render(binding),
                    input: render(&iv),
                    wp: wp_ok,
                    post: post_ok,
                    detail: None,
                });
            }
        }
        Ok(cxs)
    })?;
    Ok(CheckReport::new(mode, bindings.len() * inputs.len(), bindings.len(), cxs, start.elapsed()))
}

pub fn check_sufficiency<T: EffectTheory>(t: &T, s: &Subject<T::Cmd>, p: &Formula, cfg: &CheckConfig) -> Result<CheckReport> {
    check_agreement(t, s, p, Mode::Sufficiency, cfg)
}

pub fn check_necessity<T: EffectTheory>(t: &T, s: &Subject<T::Cmd>, p: &Formula, cfg: &CheckConfig) -> Result<CheckReport> {
    check_agreement(t, s, p, Mode::Necessity, cfg)
}

pub fn check_equivalence<T: EffectTheory>(t: &T, s: &Subject<T::Cmd>, p: &Formula, cfg: &CheckConfig) -> Result<CheckReport> {
    check_agreement(t, s, p, Mode::Equivalence, cfg)
}

/// Cases where an obligation and its simplified form evaluate
/// differently; `wp` holds the original's verdict, `post` the simplified one's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplifierReport {
    pub cases: usize,
    pub mismatches: Vec<Counterexample>,
}

pub fn check_simplifier<T: EffectTheory>(
    theory: &T,
    subject: &Subject<T::Cmd>,
    spec: &Formula,
    cfg: &CheckConfig,
) -> Result<SimplifierReport> {
    let pre = obligation(theory, subject, spec, cfg)?;
    let simple = simplify(&pre);
    let bindings = param_bindings(subject, cfg)?;
    let inputs = theory.enumerate_inputs(&cfg.domains);
    let ctx = cfg.ctx();
    let mismatches = over_bindings(&bindings, cfg, |binding| {
        let mut cxs = Vec::new();
        for i in &inputs {
            let iv = theory.input_vars(i);
            let env = env_of(&[&iv, binding]);
            let raw = eval_formula(&pre, &env, &ctx)?;
            let simplified = eval_formula(&simple, &env, &ctx)?;
            if raw != simplified {
                cxs.push(Counterexample {
                    params: render(binding),
                    input: render(&iv),
                    wp: raw,
                    post: simplified,
                    detail: None,
                });
            }
        }
        Ok(cxs)
    })?;
    Ok(SimplifierReport {
        cases: bindings.len() * inputs.len(),
        mismatches,
    })
}

/// `stronger ⊆ₒ weaker`.
#[derive(Clone, Debug)]
pub struct PostPair {
    pub stronger: Formula,
    pub weaker: Formula,
}

/// Outcome of an entailment check; `witness` is the first binding where
/// the stronger formula holds and the weaker does not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entailment {
    pub holds: bool,
    pub witness: Option<Vec<(Name, Value)>>,
}

/// Checks `p1 ⇒ p2` at every output triple (result, post-state, output),
/// also ranging over whichever of pre-env, pre-state and the parameters
/// occur free.
pub fn entails(p1: &Formula, p2: &Formula, result_ty: &Ty, params: &[(Name, Ty)], cfg: &CheckConfig) -> Result<Entailment> {
    let mut free = p1.free_vars();
    free.extend(p2.free_vars());
    let mut axes: Vec<(Name, Vec<Value>)> = Vec::new();
    let d = &cfg.domains;
    let b = &cfg.bounds;
    for (v, ty) in [(vars::PRE_ENV, Ty::Ev), (vars::PRE_STATE, Ty::St)] {
        if free.contains(v) {
            axes.push((name(v), enumerate_carrier(&ty, d, b)?));
        }
    }
    let results = match enumerate_carrier(result_ty, d, b) {
        Ok(vs) => vs,
        Err(_) if !free.contains(vars::RESULT) => vec![],
        Err(e) => return Err(e),
    };
    if !results.is_empty() {
        axes.push((name(vars::RESULT), results));
    }
    axes.push((name(vars::POST_STATE), enumerate_carrier(&Ty::St, d, b)?));
    axes.push((name(vars::OUTPUT), enumerate_carrier(&Ty::output(), d, b)?));
    for (n, ty) in params {
        if free.contains(n) {
            axes.push((n.clone(), param_values(ty, cfg)?));
        }
    }
    let ctx = cfg.ctx();
    let mut idx = vec![0usize; axes.len()];
    loop {
        let binding: Vec<(Name, Value)> = axes.iter().zip(&idx).map(|((n, vs), &i)| (n.clone(), vs[i].clone())).collect();
        let env: Env = binding.iter().cloned().collect();
        if eval_formula(p1, &env, &ctx)? && !eval_formula(p2, &env, &ctx)? {
            return Ok(Entailment {
                holds: false,
                witness: Some(binding),
            });
        }
        let mut pos = axes.len();
        loop {
            if pos == 0 {
                return Ok(Entailment {
                    holds: true,
                    witness: None,
                });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < axes[pos].1.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Stronger postconditions must give stronger preconditions at every
/// parameter binding and input. A pair that is not ordered is an error.
pub fn check_monotonicity<T: EffectTheory>(
    theory: &T,
    subject: &Subject<T::Cmd>,
    pair: &PostPair,
    cfg: &CheckConfig,
) -> Result<CheckReport> {
    let start = Instant::now();
    let ent = entails(&pair.stronger, &pair.weaker, &subject.result_ty, &subject.params, cfg)?;
    if let Some(w) = ent.witness {
        let shown: Vec<String> = w.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        return Err(Error::NotOrdered(format!("counterexample {}", shown.join(", "))));
    }
    let pre1 = obligation(theory, subject, &pair.stronger, cfg)?;
    let pre2 = obligation(theory, subject, &pair.weaker, cfg)?;
    let bindings = param_bindings(subject, cfg)?;
    let inputs = theory.enumerate_inputs(&cfg.domains);
    let ctx = cfg.ctx();
    let cxs = over_bindings(&bindings, cfg, |binding| {
        let mut cxs = Vec::new();
        for i in &inputs {
            let iv = theory.input_vars(i);
            let env = env_of(&[&iv, binding]);
            let w1 = eval_formula(&pre1, &env, &ctx)?;
            let w2 = eval_formula(&pre2, &env, &ctx)?;
            if w1 && !w2 {
                cxs.push(Counterexample {
                    params: render(binding),
                    input: render(&iv),
                    wp: w1,
                    post: w2,
                    detail: None,
                });
            }
        }
        Ok(cxs)
    })?;
    Ok(CheckReport::new(Mode::Monotonicity, bindings.len() * inputs.len(), bindings.len(), cxs, start.elapsed()))
}

/// Compares the extended theory against its base: at every binding and
/// input, running the program directly must equal running its `unextend`
/// under the base theory, and the extended precondition must hold exactly
/// when the postcondition holds of the base run.
pub fn check_extension_agreement<E, T>(
    extended: &E,
    base: &T,
    subject: &Subject<E::Cmd>,
    spec: &Formula,
    cfg: &CheckConfig,
) -> Result<CheckReport>
where
    T: EffectTheory,
    E: EffectTheory<Cmd = Ext<T::Cmd>, Input = T::Input, Output = T::Output>,
{
    let start = Instant::now();
    let pre = obligation(extended, subject, spec, cfg)?;
    let bindings = param_bindings(subject, cfg)?;
    let inputs = extended.enumerate_inputs(&cfg.domains);
    let ctx = cfg.ctx();
    let cxs = over_bindings(&bindings, cfg, |binding| {
        let m = subject.instantiate(binding)?;
        let mut cxs = Vec::new();
        for i in &inputs {
            let iv = extended.input_vars(i);
            let direct = run(extended, &m, i)?;
            let via_base = run(base, &unextend(&m)?, i)?;
            let post_ok = eval_formula(spec, &env_of(&[&iv, &base.output_vars(&via_base), binding]), &ctx)?;
            let wp_ok = eval_formula(&pre, &env_of(&[&iv, binding]), &ctx)?;
            let detail = (direct != via_base).then(|| format!("extended run {direct:?} differs from base run {via_base:?}"));
            if wp_ok != post_ok || detail.is_some() {
                cxs.push(Counterexample {
                    params: render(binding),
                    input: render(&iv),
                    wp: wp_ok,
                    post: post_ok,
                    detail,
                });
            }
        }
        Ok(cxs)
    })?;
    Ok(CheckReport::new(Mode::Extension, bindings.len() * inputs.len(), bindings.len(), cxs, start.elapsed()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branching::Branching;
    use crate::rws::{paper_intro_prog, prog_post, Rws, RwsCommand};
    use crate::values::Head;

    fn intro_subject() -> Subject<Ext<RwsCommand>> {
        Subject::new(vec![(name("g"), Ty::func(Ty::St, Ty::maybe(Ty::Wr)))], Ty::Unit, |b| {
            Ok(paper_intro_prog(b[0].1.clone()))
        })
    }

    fn small() -> CheckConfig {
        CheckConfig::new(Domains::new(&["s0", "s1"], &["e0"], &["w0"]).unwrap())
    }

    #[test]
    fn intro_sufficiency_eight_cases() {
        let r = check_sufficiency(&Branching::new(Rws), &intro_subject(), &prog_post(), &small()).unwrap();
        assert!(r.passed());
        assert_eq!((r.inputs_checked, r.params_checked), (8, 4));
    }

    #[test]
    fn intro_necessity() {
        let r = check_necessity(&Branching::new(Rws), &intro_subject(), &prog_post(), &small()).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn top_is_necessary_and_sufficient() {
        let s = Subject::closed(Ty::Unit, Program::ret(Value::Unit));
        let r = check_equivalence(&Rws, &s, &Formula::Top, &small()).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn tell_against_empty_output_is_necessary() {
        let m = Program::leaf(RwsCommand::Tell(Value::List(vec![Value::wr("w0")])));
        let p = Formula::atom(Value::Nat(0), Value::Neutral(Head::Length, vec![Value::sym(vars::OUTPUT)]));
        let r = check_necessity(&Rws, &Subject::closed(Ty::Unit, m), &p, &small()).unwrap();
        assert!(r.passed());
    }

    fn len0() -> Formula {
        Formula::atom(Value::Nat(0), Value::Neutral(Head::Length, vec![Value::sym(vars::OUTPUT)]))
    }

    #[test]
    fn entailment_examples() {
        let cfg = small();
        let p = len0();
        let q = Formula::atom(Value::sym(vars::POST_STATE), Value::st("s0"));
        let pq = Formula::and(vec![p.clone(), q.clone()]);
        assert!(entails(&pq, &p, &Ty::Unit, &[], &cfg).unwrap().holds);
        assert!(entails(&p, &p, &Ty::Unit, &[], &cfg).unwrap().holds);
        let e = entails(&p, &q, &Ty::Unit, &[], &cfg).unwrap();
        assert!(!e.holds);
        let w: Vec<String> = e.witness.unwrap().iter().map(|(_, v)| v.to_string()).collect();
        assert_eq!(w, vec!["unit", "s1", "[]"]);
    }

    #[test]
    fn monotonicity_examples() {
        let t = Branching::new(Rws);
        let s = intro_subject();
        let stronger = Formula::and(vec![prog_post(), Formula::atom(Value::sym(vars::RESULT), Value::Unit)]);
        let pair = PostPair {
            stronger,
            weaker: prog_post(),
        };
        assert!(check_monotonicity(&t, &s, &pair, &small()).unwrap().passed());
        let same = PostPair {
            stronger: prog_post(),
            weaker: prog_post(),
        };
        assert!(check_monotonicity(&t, &s, &same, &small()).unwrap().passed());
        let bad = PostPair {
            stronger: len0(),
            weaker: Formula::atom(Value::sym(vars::POST_STATE), Value::st("s0")),
        };
        let err = check_monotonicity(&t, &s, &bad, &small()).unwrap_err();
        assert!(err.to_string().starts_with("pair not ⊆ₒ-ordered"));
    }

    #[test]
    fn extension_agreement_on_intro() {
        let r = check_extension_agreement(&Branching::new(Rws), &Rws, &intro_subject(), &prog_post(), &small()).unwrap();
        assert!(r.passed(), "{}", r.to_text());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let mut cfg = small();
        cfg.jobs = Some(1);
        let a = check_equivalence(&Branching::new(Rws), &intro_subject(), &prog_post(), &cfg).unwrap();
        cfg.jobs = Some(3);
        let b = check_equivalence(&Branching::new(Rws), &intro_subject(), &prog_post(), &cfg).unwrap();
        assert_eq!(a.counterexamples, b.counterexamples);
        assert_eq!(a.inputs_checked, b.inputs_checked);
    }
}
