//! Seeded generation of well-typed programs and postconditions, and the
//! suites that run them through the checker.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    check_agreement, check_extension_agreement, check_monotonicity, check_simplifier, CheckConfig, Counterexample,
    Mode, PostPair,
};
use crate::branching::Branching;
use crate::error::Result;
use crate::formula::vars;
use crate::frontend::{compile_unit, Prog, SourceUnit, Spec};
use crate::rws::Rws;
use crate::values::{name, Carrier, CarrierDecl, Domains, Expr, Head, Name, Ty, Value, WfLit};

pub const DEFAULT_SEED: u64 = 20_240_917;

/// `WPCHECK_SEED` when set and numeric, else `default`.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var("WPCHECK_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    pub max_depth: usize,
    pub posts_per_program: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            seed: DEFAULT_SEED,
            count: 500,
            max_depth: 5,
            posts_per_program: 3,
        }
    }
}

const ST: [&str; 2] = ["s0", "s1"];
const EV: [&str; 2] = ["e0", "e1"];
const WR: [&str; 2] = ["w0", "w1"];

/// Two atoms per carrier.
pub fn corpus_domains() -> Domains {
    Domains::new(&ST, &EV, &WR).expect("corpus carriers are valid")
}

fn result_pool() -> Vec<Ty> {
    vec![
        Ty::Unit,
        Ty::Bool,
        Ty::St,
        Ty::Ev,
        Ty::Wr,
        Ty::maybe(Ty::Wr),
        Ty::either(Ty::Wr, Ty::St),
        Ty::list(Ty::Wr),
        Ty::Nat,
    ]
}

fn param_ty() -> Ty {
    Ty::func(Ty::St, Ty::maybe(Ty::Wr))
}

type Scope = Vec<(Name, Ty)>;

struct Gen {
    rng: ChaCha8Rng,
    next_var: usize,
}

fn lit(v: Value) -> Expr {
    Expr::Lit(v)
}

fn bx(e: Expr) -> Box<Expr> {
    Box::new(e)
}

impl Gen {
    fn fresh(&mut self, hint: &str) -> Name {
        self.next_var += 1;
        name(&format!("{hint}{}", self.next_var))
    }

    fn pick<'a>(&mut self, xs: &'a [&'a str]) -> &'a str {
        xs.choose(&mut self.rng).expect("non-empty")
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn atom(&mut self, c: Carrier) -> Expr {
        let a = match c {
            Carrier::St => self.pick(&ST),
            Carrier::Ev => self.pick(&EV),
            Carrier::Wr => self.pick(&WR),
        };
        lit(c.atom(name(a)))
    }

    fn wr_list(&mut self, scope: &Scope, fuel: usize) -> Expr {
        self.expr(&Ty::list(Ty::Wr), scope, fuel)
    }

    /// A closed-over-`scope` expression of type `ty`.
    fn expr(&mut self, ty: &Ty, scope: &Scope, fuel: usize) -> Expr {
        let vars: Vec<Name> = scope.iter().filter(|(_, t)| t == ty).map(|(n, _)| n.clone()).collect();
        if !vars.is_empty() && self.chance(0.5) {
            return Expr::Var(vars.choose(&mut self.rng).unwrap().clone());
        }
        if fuel > 0 && self.chance(0.08) {
            let c = self.expr(&Ty::Bool, scope, fuel - 1);
            let a = self.expr(ty, scope, fuel - 1);
            let b = self.expr(ty, scope, fuel - 1);
            return Expr::prim(Head::If, vec![c, a, b]);
        }
        let f = fuel.saturating_sub(1);
        match ty {
            Ty::Unit => lit(Value::Unit),
            Ty::Bool => match self.rng.gen_range(0..4) {
                0 if fuel > 0 => {
                    let a = self.expr(&Ty::St, scope, f);
                    Expr::prim(Head::Eq, vec![a, self.expr(&Ty::St, scope, f)])
                }
                1 if fuel > 0 => {
                    let a = self.expr(&Ty::Wr, scope, f);
                    Expr::prim(Head::Eq, vec![a, self.expr(&Ty::Wr, scope, f)])
                }
                _ => lit(Value::Bool(self.chance(0.5))),
            },
            Ty::Nat => {
                if fuel > 0 && self.chance(0.6) {
                    Expr::prim(Head::Length, vec![self.wr_list(scope, f)])
                } else {
                    lit(Value::Nat(self.rng.gen_range(0..3)))
                }
            }
            Ty::St => self.atom(Carrier::St),
            Ty::Ev => self.atom(Carrier::Ev),
            Ty::Wr => self.atom(Carrier::Wr),
            Ty::Maybe(t) => match self.rng.gen_range(0..3) {
                0 => lit(Value::Nothing),
                1 if **t == Ty::Wr => Expr::prim(Head::Apply, vec![Expr::var("g"), self.expr(&Ty::St, scope, f)]),
                _ => Expr::Just(bx(self.expr(t, scope, f))),
            },
            Ty::Either(l, r) => {
                if self.chance(0.5) {
                    Expr::Left(bx(self.expr(l, scope, f)))
                } else {
                    Expr::Right(bx(self.expr(r, scope, f)))
                }
            }
            Ty::List(t) => {
                if fuel > 0 && self.chance(0.25) {
                    let a = self.expr(ty, scope, f);
                    Expr::prim(Head::Append, vec![a, self.expr(ty, scope, f)])
                } else {
                    let n = self.rng.gen_range(0..3);
                    Expr::List((0..n).map(|_| self.expr(t, scope, f)).collect())
                }
            }
            Ty::Pair(a, b) => {
                let x = self.expr(a, scope, f);
                Expr::Pair(bx(x), bx(self.expr(b, scope, f)))
            }
            Ty::WriterFn => match self.rng.gen_range(0..6) {
                0 => Expr::Wf(WfLit::Id),
                1 => Expr::Wf(WfLit::SelfAppend),
                2 => Expr::Wf(WfLit::Const(bx(self.wr_list(scope, f)))),
                3 => Expr::Wf(WfLit::Prepend(bx(self.wr_list(scope, f)))),
                4 => Expr::Wf(WfLit::Append(bx(self.wr_list(scope, f)))),
                _ if fuel > 0 => {
                    let a = self.expr(ty, scope, f);
                    Expr::prim(Head::Compose, vec![a, self.expr(ty, scope, f)])
                }
                _ => Expr::Wf(WfLit::Id),
            },
            Ty::Fn(..) => unreachable!("function-typed expressions are never requested"),
        }
    }

    fn with(scope: &Scope, x: &Name, t: Ty) -> Scope {
        let mut s = scope.clone();
        s.push((x.clone(), t));
        s
    }

    fn leaf(&mut self, ty: &Ty, scope: &Scope) -> Prog {
        let mut kinds = vec![0, 1];
        if *ty == Ty::Unit {
            kinds.extend([2, 2, 3, 3]);
        }
        if *ty == Ty::Ev {
            kinds.extend([4, 4]);
        }
        match *kinds.choose(&mut self.rng).unwrap() {
            0 => Prog::Return(self.expr(ty, scope, 2)),
            1 => {
                let s = self.fresh("u");
                let e = self.expr(ty, &Gen::with(scope, &s, Ty::St), 2);
                Prog::Gets(s, e)
            }
            2 => Prog::Tell(self.wr_list(scope, 1)),
            3 => {
                let s = self.fresh("u");
                let e = self.expr(&Ty::St, &Gen::with(scope, &s, Ty::St), 2);
                Prog::Puts(s, e)
            }
            _ => Prog::Ask,
        }
    }

    /// A program of type `ty` whose depth is at most `depth`.
    fn prog(&mut self, ty: &Ty, depth: usize, scope: &Scope) -> Prog {
        if depth <= 1 || self.chance(0.2) {
            return self.leaf(ty, scope);
        }
        let d = depth - 1;
        let sub = |g: &mut Gen, s: &Scope| Box::new(g.prog(ty, d, s));
        match self.rng.gen_range(0..9) {
            0..=2 => {
                let t = if self.chance(0.4) {
                    [Ty::Unit, Ty::Ev][self.rng.gen_range(0..2)].clone()
                } else {
                    result_pool().choose(&mut self.rng).unwrap().clone()
                };
                let m = Box::new(self.prog(&t, d, scope));
                if self.chance(0.2) {
                    let k = sub(self, scope);
                    Prog::Bind(m, name("_"), k)
                } else {
                    let x = self.fresh("x");
                    let k = sub(self, &Gen::with(scope, &x, t));
                    Prog::Bind(m, x, k)
                }
            }
            3 => {
                let v = self.fresh("v");
                let e = self.expr(&Ty::Ev, &Gen::with(scope, &v, Ty::Ev), 1);
                Prog::Local(v, e, sub(self, scope))
            }
            4 => Prog::Pass(Box::new(self.prog(&Ty::pair(ty.clone(), Ty::WriterFn), d, scope))),
            5 => {
                let c = self.expr(&Ty::Bool, scope, 1);
                let m = sub(self, scope);
                Prog::If(c, m, sub(self, scope))
            }
            6 | 7 => {
                let e = self.expr(&Ty::maybe(Ty::Wr), scope, 1);
                let j = self.fresh("j");
                let m = sub(self, &Gen::with(scope, &j, Ty::Wr));
                Prog::Maybe(e, j, m, sub(self, scope))
            }
            _ => {
                let e = self.expr(&Ty::either(Ty::Wr, Ty::St), scope, 1);
                let l = self.fresh("l");
                let r = self.fresh("r");
                let m = sub(self, &Gen::with(scope, &l, Ty::Wr));
                let m2 = sub(self, &Gen::with(scope, &r, Ty::St));
                Prog::Either(e, l, m, r, m2)
            }
        }
    }

    fn spec_scope(result_ty: &Ty) -> Scope {
        vec![
            (name(vars::PRE_ENV), Ty::Ev),
            (name(vars::PRE_STATE), Ty::St),
            (name(vars::RESULT), result_ty.clone()),
            (name(vars::POST_STATE), Ty::St),
            (name(vars::OUTPUT), Ty::list(Ty::Wr)),
        ]
    }

    fn spec_atom(&mut self, result_ty: &Ty, scope: &Scope) -> Spec {
        let var = |n: &str| Expr::var(n);
        match self.rng.gen_range(0..7) {
            0 => Spec::Eq(var(vars::POST_STATE), var(vars::PRE_STATE)),
            1 => Spec::Eq(var(vars::POST_STATE), self.atom(Carrier::St)),
            2 => Spec::Eq(
                lit(Value::Nat(self.rng.gen_range(0..3))),
                Expr::prim(Head::Length, vec![var(vars::OUTPUT)]),
            ),
            3 => Spec::Eq(var(vars::OUTPUT), self.wr_list(scope, 1)),
            4 | 5 => Spec::Eq(var(vars::RESULT), self.expr(result_ty, scope, 1)),
            _ => {
                let t = [Ty::St, Ty::Wr, Ty::Bool, Ty::maybe(Ty::Wr)].choose(&mut self.rng).unwrap().clone();
                let a = self.expr(&t, scope, 1);
                Spec::Eq(a, self.expr(&t, scope, 1))
            }
        }
    }

    fn spec(&mut self, result_ty: &Ty, scope: &Scope, fuel: usize) -> Spec {
        if fuel == 0 {
            return self.spec_atom(result_ty, scope);
        }
        match self.rng.gen_range(0..6) {
            0 => {
                let a = self.spec(result_ty, scope, fuel - 1);
                Spec::And(vec![a, self.spec(result_ty, scope, fuel - 1)])
            }
            1 => match self.spec_atom(result_ty, scope) {
                Spec::Eq(a, b) => Spec::Implies(a, b, Box::new(self.spec(result_ty, scope, fuel - 1))),
                other => other,
            },
            2 => {
                let y = self.fresh("y");
                let t = [Ty::St, Ty::Wr, Ty::Bool].choose(&mut self.rng).unwrap().clone();
                let inner = Gen::with(scope, &y, t.clone());
                Spec::Forall(y, t, Box::new(self.spec(result_ty, &inner, fuel - 1)))
            }
            _ => self.spec_atom(result_ty, scope),
        }
    }
}

fn decls() -> Vec<CarrierDecl> {
    let d = corpus_domains();
    vec![d.st, d.ev, d.wr]
}

/// `count` units, each declaring `g : St → Maybe Wr`, with programs of
/// depth at most `max_depth` and specs `P0`, `P1`, ...
pub fn generate_program_corpus(cfg: &CorpusConfig) -> Vec<SourceUnit> {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        next_var: 0,
    };
    let params = vec![(name("g"), param_ty())];
    let pool = result_pool();
    (0..cfg.count)
        .map(|_| {
            g.next_var = 0;
            let ty = pool.choose(&mut g.rng).unwrap().clone();
            let depth = g.rng.gen_range(1..=cfg.max_depth.max(1));
            let program = g.prog(&ty, depth, &Vec::new());
            let scope = Gen::spec_scope(&ty);
            let specs = (0..cfg.posts_per_program)
                .map(|i| (name(&format!("P{i}")), g.spec(&ty, &scope, 2)))
                .collect();
            SourceUnit {
                domains: decls(),
                params: params.clone(),
                program,
                specs,
            }
        })
        .collect()
}

/// `(P ∧ Q, P)` pairs drawn from the specs of consecutive units.
pub fn monotonicity_pairs(units: &[SourceUnit], count: usize) -> Vec<(usize, Spec, Spec)> {
    let mut out = Vec::with_capacity(count);
    let mut i = 0;
    while out.len() < count && !units.is_empty() && i < count * 4 {
        let u = &units[i % units.len()];
        let k = u.specs.len();
        if k >= 2 {
            let p = u.specs[i % k].1.clone();
            let q = u.specs[(i + 1) % k].1.clone();
            out.push((i % units.len(), Spec::And(vec![p.clone(), q]), p));
        }
        i += 1;
    }
    out
}

/// Totals from running a corpus through the checker.
#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub programs: usize,
    pub specs: usize,
    pub cases: usize,
    pub disagreements: usize,
    pub branching_programs: usize,
    pub extension_cases: usize,
    pub extension_failures: usize,
    pub simplifier_cases: usize,
    pub simplifier_mismatches: usize,
    #[serde(skip)]
    pub first_failures: Vec<String>,
    #[serde(rename = "elapsed_ms", serialize_with = "millis")]
    pub elapsed: Duration,
}

fn millis<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_u64(d.as_millis() as u64)
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.disagreements == 0 && self.extension_failures == 0 && self.simplifier_mismatches == 0
    }

    fn absorb(&mut self, o: SuiteReport) {
        self.programs += o.programs;
        self.specs += o.specs;
        self.cases += o.cases;
        self.disagreements += o.disagreements;
        self.branching_programs += o.branching_programs;
        self.extension_cases += o.extension_cases;
        self.extension_failures += o.extension_failures;
        self.simplifier_cases += o.simplifier_cases;
        self.simplifier_mismatches += o.simplifier_mismatches;
        if self.first_failures.len() < 10 {
            self.first_failures.extend(o.first_failures);
        }
    }
}

fn note(out: &mut Vec<String>, idx: usize, spec: &Name, what: &str, cx: &[Counterexample]) {
    if let Some(c) = cx.first() {
        out.push(format!("program {idx}, spec {spec}, {what}: {c}"));
    }
}

/// Three-way agreement (wp against post after run) for every unit and
/// spec, extension agreement for units with a branch, and simplifier
/// soundness on every obligation. Units run in parallel, each check
/// sequentially.
pub fn run_suite(units: &[SourceUnit], cfg: &CheckConfig) -> Result<SuiteReport> {
    let start = Instant::now();
    let theory = Branching::new(Rws);
    let mut cfg = cfg.clone();
    cfg.jobs = Some(1);
    let parts: Vec<Result<SuiteReport>> = units
        .par_iter()
        .enumerate()
        .map(|(idx, unit)| {
            let c = compile_unit(unit)?;
            let subject = c.subject();
            let branching = unit.program.has_branch();
            let mut r = SuiteReport {
                programs: 1,
                branching_programs: branching as usize,
                ..SuiteReport::default()
            };
            for (n, spec) in &c.specs {
                let eq = check_agreement(&theory, &subject, spec, Mode::Equivalence, &cfg)?;
                r.specs += 1;
                r.cases += eq.inputs_checked;
                r.disagreements += eq.counterexamples.len();
                note(&mut r.first_failures, idx, n, "wp/post", &eq.counterexamples);
                if branching {
                    let ext = check_extension_agreement(&theory, &Rws, &subject, spec, &cfg)?;
                    r.extension_cases += ext.inputs_checked;
                    r.extension_failures += ext.counterexamples.len();
                    note(&mut r.first_failures, idx, n, "extension", &ext.counterexamples);
                }
                let simp = check_simplifier(&theory, &subject, spec, &cfg)?;
                r.simplifier_cases += simp.cases;
                r.simplifier_mismatches += simp.mismatches.len();
                note(&mut r.first_failures, idx, n, "simplifier", &simp.mismatches);
            }
            Ok(r)
        })
        .collect();
    let mut total = SuiteReport::default();
    for p in parts {
        total.absorb(p?);
    }
    total.elapsed = start.elapsed();
    Ok(total)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct MonotonicityReport {
    pub pairs: usize,
    pub cases: usize,
    pub failures: usize,
    pub simplifier_cases: usize,
    pub simplifier_mismatches: usize,
    #[serde(rename = "elapsed_ms", serialize_with = "millis")]
    pub elapsed: Duration,
}

/// Checks every pair for monotonicity (entailment is verified first by
/// the checker) and the simplifier on both obligations.
pub fn run_monotonicity(units: &[SourceUnit], pairs: &[(usize, Spec, Spec)], cfg: &CheckConfig) -> Result<MonotonicityReport> {
    let start = Instant::now();
    let theory = Branching::new(Rws);
    let mut cfg = cfg.clone();
    cfg.jobs = Some(1);
    let parts: Vec<Result<(usize, usize, usize, usize)>> = pairs
        .par_iter()
        .map(|(idx, strong, weak)| {
            let c = compile_unit(&units[*idx])?;
            let subject = c.subject();
            let pair = PostPair {
                stronger: c.compile_spec(strong)?,
                weaker: c.compile_spec(weak)?,
            };
            let rep = check_monotonicity(&theory, &subject, &pair, &cfg)?;
            let s1 = check_simplifier(&theory, &subject, &pair.stronger, &cfg)?;
            let s2 = check_simplifier(&theory, &subject, &pair.weaker, &cfg)?;
            Ok((
                rep.inputs_checked,
                rep.counterexamples.len(),
                s1.cases + s2.cases,
                s1.mismatches.len() + s2.mismatches.len(),
            ))
        })
        .collect();
    let mut r = MonotonicityReport {
        pairs: pairs.len(),
        ..Default::default()
    };
    for p in parts {
        let (cases, fails, sc, sm) = p?;
        r.cases += cases;
        r.failures += fails;
        r.simplifier_cases += sc;
        r.simplifier_mismatches += sm;
    }
    r.elapsed = start.elapsed();
    Ok(r)
}

/// A checker configuration over [`corpus_domains`] with output lists
/// bounded by `max_list_len`.
pub fn corpus_check_config(max_list_len: usize) -> CheckConfig {
    let mut cfg = CheckConfig::new(corpus_domains());
    cfg.bounds.max_list_len = max_list_len;
    cfg
}
