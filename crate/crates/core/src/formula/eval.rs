use super::{Atom, Formula};
use crate::error::{Error, Result};
use crate::values::{enumerate_carrier, Bounds, Domains, Env, Name, Ty, Value};

/// Carriers and bounds for `ForallPlain` enumeration.
#[derive(Clone, Copy, Debug)]
pub struct EvalCtx<'a> {
    pub domains: &'a Domains,
    pub bounds: &'a Bounds,
}

impl<'a> EvalCtx<'a> {
    pub fn new(domains: &'a Domains, bounds: &'a Bounds) -> Self {
        EvalCtx { domains, bounds }
    }
}

/// Substitutes `env` into `term` and insists on a concrete result.
pub fn eval_term(term: &Value, env: &Env) -> Result<Value> {
    let v = term.subst(&|n| env.get(n).cloned())?;
    if v.is_concrete() {
        Ok(v)
    } else {
        Err(Error::Symbolic(format!("cannot resolve `{v}`")))
    }
}

pub fn eval_atom(atom: &Atom, env: &Env) -> Result<bool> {
    Ok(eval_term(&atom.lhs, env)? == eval_term(&atom.rhs, env)?)
}

/// Decides `f` under `binding`. Every free variable must be bound and every
/// parameter bound to a table.
pub fn eval_formula(f: &Formula, binding: &Env, ctx: &EvalCtx<'_>) -> Result<bool> {
    let mut env = binding.clone();
    eval(f, &mut env, ctx)
}

fn eval(f: &Formula, env: &mut Env, ctx: &EvalCtx<'_>) -> Result<bool> {
    match f {
        Formula::Top => Ok(true),
        Formula::Bottom => Ok(false),
        Formula::Atom(a) => eval_atom(a, env),
        Formula::And(fs) => {
            for part in fs {
                if !eval(part, env, ctx)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Formula::Implies(hyp, body) => Ok(!eval_atom(hyp, env)? || eval(body, env, ctx)?),
        Formula::ForallGuarded { var, ty, guard, body } => match guard_split(var, guard) {
            Some((pattern, term)) => {
                let target = eval_term(term, env)?;
                match match_pattern(pattern, var, &target, env)? {
                    Match::Bind(v) => with_binding(env, var, v, |env| eval(body, env, ctx)),
                    Match::Mismatch => Ok(true),
                    Match::NotPattern => eval_by_enumeration(var, ty, Some(guard), body, env, ctx),
                }
            }
            None => eval_by_enumeration(var, ty, Some(guard), body, env, ctx),
        },
        Formula::ForallPlain { var, ty, body } => eval_by_enumeration(var, ty, None, body, env, ctx),
    }
}

fn with_binding<T>(env: &mut Env, var: &Name, v: Value, k: impl FnOnce(&mut Env) -> Result<T>) -> Result<T> {
    env.push(var.clone(), v);
    let out = k(env);
    env.pop();
    out
}

fn eval_by_enumeration(
    var: &Name,
    ty: &Ty,
    guard: Option<&Atom>,
    body: &Formula,
    env: &mut Env,
    ctx: &EvalCtx<'_>,
) -> Result<bool> {
    for v in enumerate_carrier(ty, ctx.domains, ctx.bounds)? {
        let holds = with_binding(env, var, v, |env| {
            if let Some(g) = guard {
                if !eval_atom(g, env)? {
                    return Ok(true);
                }
            }
            eval(body, env, ctx)
        })?;
        if !holds {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Splits a guard into (side mentioning `var`, other side).
pub(crate) fn guard_split<'g>(var: &str, guard: &'g Atom) -> Option<(&'g Value, &'g Value)> {
    match (guard.lhs.mentions(var), guard.rhs.mentions(var)) {
        (true, false) => Some((&guard.lhs, &guard.rhs)),
        (false, true) => Some((&guard.rhs, &guard.lhs)),
        _ => None,
    }
}

pub(crate) enum Match {
    Bind(Value),
    Mismatch,
    NotPattern,
}

/// Matches a constructor pattern containing `var` against a concrete value.
/// Parts of the pattern not mentioning `var` are evaluated under `env`.
pub(crate) fn match_pattern(pattern: &Value, var: &str, target: &Value, env: &Env) -> Result<Match> {
    let mut bound = None;
    let m = match_into(pattern, var, target, &mut |t| eval_term(t, env), &mut bound)?;
    Ok(match (m, bound) {
        (Shape::Ok, Some(v)) => Match::Bind(v),
        (Shape::Ok, None) => Match::NotPattern,
        (Shape::Mismatch, _) => Match::Mismatch,
        (Shape::NotPattern, _) => Match::NotPattern,
    })
}

#[derive(PartialEq)]
pub(crate) enum Shape {
    Ok,
    Mismatch,
    NotPattern,
}

/// Structural matcher shared with the simplifier; `resolve` turns
/// `var`-free subpatterns into values (or fails when it cannot).
pub(crate) fn match_into(
    pattern: &Value,
    var: &str,
    target: &Value,
    resolve: &mut dyn FnMut(&Value) -> Result<Value>,
    bound: &mut Option<Value>,
) -> Result<Shape> {
    if let Value::Sym(n) = pattern {
        if &**n == var {
            return Ok(match bound {
                Some(prev) if prev != target => Shape::Mismatch,
                _ => {
                    *bound = Some(target.clone());
                    Shape::Ok
                }
            });
        }
    }
    if !pattern.mentions(var) {
        return Ok(if resolve(pattern)? == *target { Shape::Ok } else { Shape::Mismatch });
    }
    let combine = |shapes: Vec<Shape>| {
        if shapes.contains(&Shape::Mismatch) {
            Shape::Mismatch
        } else if shapes.contains(&Shape::NotPattern) {
            Shape::NotPattern
        } else {
            Shape::Ok
        }
    };
    Ok(match (pattern, target) {
        (Value::Just(p), Value::Just(t)) | (Value::Left(p), Value::Left(t)) | (Value::Right(p), Value::Right(t)) => {
            match_into(p, var, t, resolve, bound)?
        }
        (Value::Just(_) | Value::Left(_) | Value::Right(_), _) => Shape::Mismatch,
        (Value::Pair(p1, p2), Value::Pair(t1, t2)) => combine(vec![
            match_into(p1, var, t1, resolve, bound)?,
            match_into(p2, var, t2, resolve, bound)?,
        ]),
        (Value::Pair(..), _) => Shape::Mismatch,
        (Value::List(ps), Value::List(ts)) => {
            if ps.len() != ts.len() {
                Shape::Mismatch
            } else {
                let mut shapes = Vec::new();
                for (p, t) in ps.iter().zip(ts) {
                    shapes.push(match_into(p, var, t, resolve, bound)?);
                }
                combine(shapes)
            }
        }
        (Value::List(_), _) => Shape::Mismatch,
        _ => Shape::NotPattern,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::sym;
    use crate::values::{name, reduce, Head};

    fn ctx_parts() -> (Domains, Bounds) {
        (Domains::new(&["s0", "s1"], &["e0"], &["w0", "w1"]).unwrap(), Bounds::default())
    }

    #[test]
    fn guarded_substitution() {
        let (d, b) = ctx_parts();
        let ctx = EvalCtx::new(&d, &b);
        let jw0 = Value::just(Value::wr("w0"));
        let f = Formula::guarded(
            name("r"),
            Ty::maybe(Ty::Wr),
            Atom::eq(sym("r"), jw0.clone()),
            Formula::atom(sym("r"), jw0),
        );
        assert!(eval_formula(&f, &Env::new(), &ctx).unwrap());
    }

    #[test]
    fn vacuous_pattern_guard() {
        let (d, b) = ctx_parts();
        let ctx = EvalCtx::new(&d, &b);
        let f = Formula::guarded(
            name("j"),
            Ty::Wr,
            Atom::eq(Value::Nothing, Value::just(sym("j"))),
            Formula::Bottom,
        );
        assert!(eval_formula(&f, &Env::new(), &ctx).unwrap());
    }

    #[test]
    fn plain_forall_enumerates() {
        let (d, b) = ctx_parts();
        let ctx = EvalCtx::new(&d, &b);
        let f = Formula::forall(name("b"), Ty::Bool, Formula::atom(sym("b"), sym("b")));
        assert!(eval_formula(&f, &Env::new(), &ctx).unwrap());
        let g = Formula::forall(name("b"), Ty::Bool, Formula::atom(sym("b"), Value::Bool(true)));
        assert!(!eval_formula(&g, &Env::new(), &ctx).unwrap());
    }

    #[test]
    fn plain_forall_over_functions_is_rejected() {
        let (d, b) = ctx_parts();
        let ctx = EvalCtx::new(&d, &b);
        let f = Formula::forall(name("f"), Ty::WriterFn, Formula::Top);
        assert!(matches!(eval_formula(&f, &Env::new(), &ctx), Err(Error::NonEnumerable(_))));
    }

    #[test]
    fn unresolved_neutral_is_an_error() {
        let (d, b) = ctx_parts();
        let ctx = EvalCtx::new(&d, &b);
        let g_s = reduce(Head::Apply, vec![sym("g"), Value::st("s0")]).unwrap();
        let f = Formula::atom(g_s, Value::Nothing);
        assert!(matches!(eval_formula(&f, &Env::new(), &ctx), Err(Error::Symbolic(_))));
    }

    #[test]
    fn non_pattern_guard_falls_back_to_enumeration() {
        let (d, b) = ctx_parts();
        let ctx = EvalCtx::new(&d, &b);
        // (x : List Wr) → length x ≡ 1 → x ≡ [w0]   is false (x = [w1])
        let len_x = reduce(Head::Length, vec![sym("x")]).unwrap();
        let f = Formula::guarded(
            name("x"),
            Ty::list(Ty::Wr),
            Atom::eq(len_x, Value::Nat(1)),
            Formula::atom(sym("x"), Value::List(vec![Value::wr("w0")])),
        );
        assert!(!eval_formula(&f, &Env::new(), &ctx).unwrap());
    }
}
