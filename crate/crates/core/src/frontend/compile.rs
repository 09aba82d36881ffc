use std::sync::Arc;

use crate::ast::Program;
use crate::branching::{BranchCommand, Ext};
use crate::checker::Subject;
use crate::error::{Error, Result};
use crate::formula::{vars, Atom, Formula};
use crate::rws::{Lambda, RwsCommand};
use crate::values::{eval_expr, name, Domains, Env, Expr, Name, Ty, Value};

use super::parse::{effective_domains, parse_unit};
use super::print::expr_sexp;
use super::syntax::{SourceUnit, Spec};
use super::typeck::{typecheck, Core};

/// A type-checked unit, ready to instantiate.
#[derive(Clone)]
pub struct Compiled {
    pub unit: SourceUnit,
    pub domains: Domains,
    pub params: Vec<(Name, Ty)>,
    pub result_ty: Ty,
    pub specs: Vec<(Name, Formula)>,
    core: Arc<Core>,
}

type ExtProgram = Program<Ext<RwsCommand>>;

fn lambda(x: &Name, body: &Expr, env: &Env) -> Lambda {
    let label = format!("λ {x} → {}", expr_sexp(body).pretty(0));
    let (x, body, env) = (x.clone(), body.clone(), env.clone());
    Lambda::new(&label, move |v| eval_expr(&body, &env.with(&x, v.clone())))
}

fn unexpected(form: &str, v: &Value) -> Error {
    if v.is_concrete() {
        Error::Type(format!("{form} on `{v}`"))
    } else {
        Error::Symbolic(format!("{form} on `{v}`"))
    }
}

/// Binder forms become closures over `env`; branches become extended
/// `Op` nodes whose scrutinee is the evaluated expression.
pub fn compile_core(c: &Arc<Core>, env: &Env) -> Result<ExtProgram> {
    let base = Ext::Base;
    Ok(match &**c {
        Core::Return(e) => Program::ret(eval_expr(e, env)?),
        Core::Bind(m, ty, x, k) => {
            let (k, x, env2) = (k.clone(), x.clone(), env.clone());
            Program::bind(compile_core(m, env)?, ty.clone(), move |v| compile_core(&k, &env2.with(&x, v)))
        }
        Core::Gets(x, e) => Program::leaf(base(RwsCommand::Gets(lambda(x, e, env)))),
        Core::Puts(x, e) => Program::leaf(base(RwsCommand::Puts(lambda(x, e, env)))),
        Core::Tell(e) => Program::leaf(base(RwsCommand::Tell(eval_expr(e, env)?))),
        Core::Ask => Program::leaf(base(RwsCommand::Ask)),
        Core::Local(x, e, m) => Program::with_sub(base(RwsCommand::Local(lambda(x, e, env))), compile_core(m, env)?),
        Core::Pass(m) => Program::with_sub(base(RwsCommand::Pass), compile_core(m, env)?),
        Core::If(e, m, m2) => {
            let scrutinee = eval_expr(e, env)?;
            let (m, m2, env) = (m.clone(), m2.clone(), env.clone());
            Program::op(Ext::Branch(BranchCommand::If { scrutinee }), move |v| match v {
                Value::Bool(true) => compile_core(&m, &env),
                Value::Bool(false) => compile_core(&m2, &env),
                other => Err(unexpected("if", &other)),
            })
        }
        Core::Maybe(e, elem_ty, j, m, m2) => {
            let scrutinee = eval_expr(e, env)?;
            let (j, m, m2, env) = (j.clone(), m.clone(), m2.clone(), env.clone());
            let cmd = BranchCommand::Maybe {
                scrutinee,
                elem_ty: elem_ty.clone(),
            };
            Program::op(Ext::Branch(cmd), move |v| match v {
                Value::Just(w) => compile_core(&m, &env.with(&j, *w)),
                Value::Nothing => compile_core(&m2, &env),
                other => Err(unexpected("maybe", &other)),
            })
        }
        Core::Either(e, l_ty, r_ty, l, m, r, m2) => {
            let scrutinee = eval_expr(e, env)?;
            let (l, m, r, m2, env) = (l.clone(), m.clone(), r.clone(), m2.clone(), env.clone());
            let cmd = BranchCommand::Either {
                scrutinee,
                l_ty: l_ty.clone(),
                r_ty: r_ty.clone(),
            };
            Program::op(Ext::Branch(cmd), move |v| match v {
                Value::Left(x) => compile_core(&m, &env.with(&l, *x)),
                Value::Right(x) => compile_core(&m2, &env.with(&r, *x)),
                other => Err(unexpected("either", &other)),
            })
        }
    })
}

/// Specs become formulas over the distinguished variables; parameters
/// and `forall` binders stay symbolic.
pub fn spec_formula(s: &Spec, env: &Env) -> Result<Formula> {
    Ok(match s {
        Spec::Bottom => Formula::Bottom,
        Spec::And(xs) if xs.is_empty() => Formula::Top,
        Spec::And(xs) => Formula::and(xs.iter().map(|x| spec_formula(x, env)).collect::<Result<_>>()?),
        Spec::Eq(a, b) => Formula::atom(eval_expr(a, env)?, eval_expr(b, env)?),
        Spec::Implies(a, b, body) => {
            Formula::implies(Atom::eq(eval_expr(a, env)?, eval_expr(b, env)?), spec_formula(body, env)?)
        }
        Spec::Forall(x, ty, body) => {
            Formula::forall(x.clone(), ty.clone(), spec_formula(body, &env.with(x, Value::Sym(x.clone())))?)
        }
    })
}

fn spec_env(params: &[(Name, Ty)]) -> Env {
    let mut env: Env = params.iter().map(|(n, _)| (n.clone(), Value::Sym(n.clone()))).collect();
    for v in vars::ALL {
        env.push(name(v), Value::sym(v));
    }
    env
}

pub fn compile_unit(unit: &SourceUnit) -> Result<Compiled> {
    let domains = effective_domains(&unit.domains)?;
    let typed = typecheck(unit)?;
    let env = spec_env(&unit.params);
    let specs = unit
        .specs
        .iter()
        .map(|(n, s)| Ok((n.clone(), spec_formula(s, &env)?)))
        .collect::<Result<_>>()?;
    Ok(Compiled {
        unit: unit.clone(),
        domains,
        params: unit.params.clone(),
        result_ty: typed.result_ty,
        specs,
        core: typed.core,
    })
}

/// Parses and compiles `.east` source text.
pub fn load(text: &str) -> Result<Compiled> {
    compile_unit(&parse_unit(text)?)
}

impl Compiled {
    /// The program with parameters bound as given; unbound parameters
    /// stay symbolic.
    pub fn program(&self, binding: &[(Name, Value)]) -> Result<ExtProgram> {
        let mut env = Env::new();
        for (n, _) in &self.params {
            let v = binding
                .iter()
                .find(|(k, _)| k == n)
                .map(|(_, v)| v.clone())
                .unwrap_or_else(|| Value::Sym(n.clone()));
            env.push(n.clone(), v);
        }
        compile_core(&self.core, &env)
    }

    pub fn subject(&self) -> Subject<Ext<RwsCommand>> {
        let me = self.clone();
        Subject::new(self.params.clone(), self.result_ty.clone(), move |b| me.program(b))
    }

    /// A spec that was not part of the unit, over the same parameters.
    pub fn compile_spec(&self, s: &Spec) -> Result<Formula> {
        spec_formula(s, &spec_env(&self.params))
    }

    pub fn spec(&self, n: &str) -> Result<&Formula> {
        self.specs
            .iter()
            .find(|(k, _)| &**k == n)
            .map(|(_, f)| f)
            .ok_or_else(|| Error::UnknownSpec(n.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::run;
    use crate::branching::Branching;
    use crate::rws::{Rws, RwsInput, RwsOutput};

    #[test]
    fn return_unit_runs_anywhere() {
        let c = load("(return unit)").unwrap();
        let m = c.program(&[]).unwrap();
        let t = Branching::new(Rws);
        for s in ["s0", "s1", "s2"] {
            let out = run(&t, &m, &RwsInput::new(Value::ev("e0"), Value::st(s))).unwrap();
            assert_eq!(out, RwsOutput::new(Value::Unit, Value::st(s), Value::nil()));
        }
    }

    #[test]
    fn unknown_spec() {
        let c = load("(return unit)").unwrap();
        assert_eq!(c.spec("P").unwrap_err(), Error::UnknownSpec("P".into()));
    }

    #[test]
    fn empty_conjunction_is_top() {
        let c = load("(return unit) (spec P (and))").unwrap();
        assert_eq!(c.spec("P").unwrap(), &Formula::Top);
    }
}
