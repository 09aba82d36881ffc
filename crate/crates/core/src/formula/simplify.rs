use std::collections::BTreeSet;

use super::eval::{guard_split, match_into, Shape};
use super::{names, Atom, Formula};
use crate::error::Error;
use crate::values::{reduce, Head, Name, Ty, Value};

/// Rewrites `f` into an evaluation-equivalent, smaller formula and then
/// renames bound variables canonically.
pub fn simplify(f: &Formula) -> Formula {
    rename_canonical(&simp(f))
}

fn simp(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Atom(a) => decide(simp_atom(a)),
        Formula::And(parts) => {
            let mut out = Vec::new();
            for p in parts {
                match simp(p) {
                    Formula::Top => {}
                    Formula::Bottom => return Formula::Bottom,
                    Formula::And(inner) => out.extend(inner),
                    other => out.push(other),
                }
            }
            match out.len() {
                0 => Formula::Top,
                1 => out.pop().unwrap(),
                _ => Formula::And(out),
            }
        }
        Formula::Implies(hyp, body) => match decide(simp_atom(hyp)) {
            Formula::Top => simp(body),
            Formula::Bottom => Formula::Top,
            Formula::Atom(hyp) => match simp(body) {
                Formula::Top => Formula::Top,
                body => Formula::implies(hyp, body),
            },
            _ => unreachable!(),
        },
        Formula::ForallGuarded { var, ty, guard, body } => {
            let guard = simp_atom(guard);
            if let Some(resolved) = resolve_guard(var, ty, &guard, body) {
                return resolved;
            }
            match simp(body) {
                Formula::Top => Formula::Top,
                body => Formula::guarded(var.clone(), ty.clone(), guard, body),
            }
        }
        Formula::ForallPlain { var, ty, body } => match simp(body) {
            Formula::Top => Formula::Top,
            body => Formula::forall(var.clone(), ty.clone(), body),
        },
    }
}

/// Substitutes a guarded binder away when the other side of its guard is a
/// literal. Binders over lists are kept: they name writer outputs.
fn resolve_guard(var: &Name, ty: &Ty, guard: &Atom, body: &Formula) -> Option<Formula> {
    if matches!(ty, Ty::List(_)) {
        return None;
    }
    let (pattern, term) = guard_split(var, guard)?;
    if !term.is_concrete() {
        return None;
    }
    let mut bound = None;
    let mut literal = |t: &Value| {
        if t.is_concrete() {
            Ok(t.clone())
        } else {
            Err(Error::Symbolic(t.to_string()))
        }
    };
    match match_into(pattern, var, term, &mut literal, &mut bound) {
        Ok(Shape::Mismatch) => Some(Formula::Top),
        Ok(Shape::Ok) => {
            let v = bound?;
            let body = body.subst(&[(var.clone(), v)]).ok()?;
            Some(simp(&body))
        }
        _ => None,
    }
}

fn decide(a: Atom) -> Formula {
    if a.lhs.is_concrete() && a.rhs.is_concrete() {
        if a.lhs == a.rhs {
            Formula::Top
        } else {
            Formula::Bottom
        }
    } else {
        Formula::Atom(a)
    }
}

fn simp_atom(a: &Atom) -> Atom {
    Atom::eq(simp_term(&a.lhs), simp_term(&a.rhs))
}

fn simp_term(t: &Value) -> Value {
    t.rewrite(&|v| match v {
        Value::Neutral(Head::Append, args) => match (&args[0], &args[1]) {
            (Value::List(xs), other) | (other, Value::List(xs)) if xs.is_empty() => other.clone(),
            _ => Value::Neutral(Head::Append, args),
        },
        Value::Neutral(h, args) => reduce(h, args.clone()).unwrap_or(Value::Neutral(h, args)),
        other => other,
    })
}

/// Renames every binder to the lowest member of its name family that is
/// neither bound above it nor free in the formula.
pub fn rename_canonical(f: &Formula) -> Formula {
    let free = f.free_vars();
    let mut scope: Vec<Name> = Vec::new();
    let mut map: Vec<(Name, Name)> = Vec::new();
    rename(f, &free, &mut scope, &mut map)
}

fn rename(f: &Formula, free: &BTreeSet<Name>, scope: &mut Vec<Name>, map: &mut Vec<(Name, Name)>) -> Formula {
    let atom = |a: &Atom, map: &Vec<(Name, Name)>| rename_atom(a, map);
    match f {
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Atom(a) => Formula::Atom(atom(a, map)),
        Formula::And(parts) => Formula::And(parts.iter().map(|p| rename(p, free, scope, map)).collect()),
        Formula::Implies(h, body) => Formula::implies(atom(h, map), rename(body, free, scope, map)),
        Formula::ForallGuarded { var, ty, guard, body } => {
            let fresh = pick(var, free, scope);
            scope.push(fresh.clone());
            map.push((var.clone(), fresh.clone()));
            let guard = atom(guard, map);
            let body = rename(body, free, scope, map);
            map.pop();
            scope.pop();
            Formula::guarded(fresh, ty.clone(), guard, body)
        }
        Formula::ForallPlain { var, ty, body } => {
            let fresh = pick(var, free, scope);
            scope.push(fresh.clone());
            map.push((var.clone(), fresh.clone()));
            let body = rename(body, free, scope, map);
            map.pop();
            scope.pop();
            Formula::forall(fresh, ty.clone(), body)
        }
    }
}

fn pick(var: &Name, free: &BTreeSet<Name>, scope: &[Name]) -> Name {
    let mut avoid = free.clone();
    avoid.extend(scope.iter().cloned());
    names::next_free(var, &avoid)
}

fn rename_atom(a: &Atom, map: &[(Name, Name)]) -> Atom {
    let lookup = |n: &str| map.iter().rev().find(|(k, _)| &**k == n).map(|(_, v)| Value::Sym(v.clone()));
    // Renaming symbols never changes whether a term reduces.
    a.subst(&lookup).unwrap_or_else(|_| a.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{eval_formula, sym, EvalCtx};
    use crate::values::{name, Bounds, Domains, Env};

    #[test]
    fn and_with_top() {
        let f = Formula::and(vec![Formula::Top, Formula::atom(sym("result"), Value::Unit)]);
        assert_eq!(simplify(&f), Formula::atom(sym("result"), Value::Unit));
    }

    #[test]
    fn append_identity_inside_length() {
        let t = Value::Neutral(Head::Length, vec![Value::Neutral(Head::Append, vec![Value::nil(), sym("o'")])]);
        let f = Formula::atom(Value::Nat(0), t);
        let want = Formula::atom(Value::Nat(0), Value::Neutral(Head::Length, vec![sym("o'")]));
        assert_eq!(simplify(&f), want);
    }

    #[test]
    fn guard_on_literal_is_substituted() {
        let body = Formula::atom(sym("r"), sym("output"));
        let f = Formula::guarded(name("r"), Ty::maybe(Ty::Wr), Atom::eq(sym("r"), Value::Nothing), body);
        assert_eq!(simplify(&f), Formula::atom(Value::Nothing, sym("output")));
    }

    #[test]
    fn unit_alias_disappears_but_list_alias_stays() {
        let inner = Formula::guarded(
            name("o'"),
            Ty::list(Ty::Wr),
            Atom::eq(sym("o'"), Value::nil()),
            Formula::atom(Value::Nat(0), Value::Neutral(Head::Length, vec![sym("o'")])),
        );
        let f = Formula::guarded(name("r1"), Ty::Unit, Atom::eq(sym("r1"), Value::Unit), inner.clone());
        assert_eq!(simplify(&f), inner);
    }

    #[test]
    fn guarded_substitution_is_eval_equivalent() {
        let d = Domains::new(&["s0", "s1"], &["e0"], &["w0"]).unwrap();
        let b = Bounds::default();
        let ctx = EvalCtx::new(&d, &b);
        let f = Formula::guarded(
            name("r"),
            Ty::maybe(Ty::Wr),
            Atom::eq(sym("r"), Value::Nothing),
            Formula::atom(sym("r"), sym("result")),
        );
        let g = simplify(&f);
        for result in [Value::Nothing, Value::just(Value::wr("w0"))] {
            let env: Env = [(name("result"), result)].into_iter().collect();
            assert_eq!(eval_formula(&f, &env, &ctx).unwrap(), eval_formula(&g, &env, &ctx).unwrap());
        }
    }

    #[test]
    fn canonical_renaming_reuses_sibling_names() {
        let leaf = |v: &str| Formula::atom(sym(v), Value::nil());
        let f = Formula::and(vec![
            Formula::guarded(name("o'"), Ty::list(Ty::Wr), Atom::eq(sym("o'"), sym("output")), leaf("o'")),
            Formula::guarded(name("o''"), Ty::list(Ty::Wr), Atom::eq(sym("o''"), sym("output")), leaf("o''")),
        ]);
        let g = rename_canonical(&f);
        match g {
            Formula::And(parts) => assert_eq!(parts[0], parts[1]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn canonical_renaming_avoids_free_names() {
        let f = Formula::guarded(name("r3"), Ty::Wr, Atom::eq(sym("r3"), sym("r")), Formula::atom(sym("r3"), sym("r")));
        match rename_canonical(&f) {
            Formula::ForallGuarded { var, .. } => assert_eq!(&*var, "r1"),
            other => panic!("{other:?}"),
        }
    }
}
