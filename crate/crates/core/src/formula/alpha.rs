use super::{Atom, Formula};
use crate::values::{name, Name, Value};

/// Equality up to consistent renaming of bound variables. Empty and
/// singleton conjunctions compare as `⊤` and as their only component.
pub fn alpha_eq(f1: &Formula, f2: &Formula) -> bool {
    debruijn(f1, &mut Vec::new()) == debruijn(f2, &mut Vec::new())
}

// Bound names become `\0<depth>`, which no parsed or generated identifier
// can collide with.
fn debruijn(f: &Formula, bound: &mut Vec<Name>) -> Formula {
    match f {
        Formula::Top | Formula::Bottom => f.clone(),
        Formula::Atom(a) => Formula::Atom(atom(a, bound)),
        Formula::And(parts) => match parts.as_slice() {
            [] => Formula::Top,
            [one] => debruijn(one, bound),
            _ => Formula::And(parts.iter().map(|p| debruijn(p, bound)).collect()),
        },
        Formula::Implies(h, body) => Formula::implies(atom(h, bound), debruijn(body, bound)),
        Formula::ForallGuarded { var, ty, guard, body } => {
            bound.push(var.clone());
            let out = Formula::guarded(slot(bound.len() - 1), ty.clone(), atom(guard, bound), debruijn(body, bound));
            bound.pop();
            out
        }
        Formula::ForallPlain { var, ty, body } => {
            bound.push(var.clone());
            let out = Formula::forall(slot(bound.len() - 1), ty.clone(), debruijn(body, bound));
            bound.pop();
            out
        }
    }
}

fn slot(i: usize) -> Name {
    name(&format!("\0{i}"))
}

fn atom(a: &Atom, bound: &[Name]) -> Atom {
    let lookup = |n: &str| bound.iter().rposition(|b| &**b == n).map(|i| Value::Sym(slot(i)));
    a.subst(&lookup).unwrap_or_else(|_| a.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::sym;
    use crate::values::Ty;

    fn guarded(v: &str, t: Value) -> Formula {
        Formula::guarded(name(v), Ty::Wr, Atom::eq(sym(v), t), Formula::atom(sym(v), sym("output")))
    }

    #[test]
    fn renamed_binders_are_equal() {
        assert!(alpha_eq(&guarded("r", sym("t")), &guarded("s", sym("t"))));
    }

    #[test]
    fn different_guard_terms_differ() {
        assert!(!alpha_eq(&guarded("r", sym("t")), &guarded("r", sym("u"))));
    }

    #[test]
    fn free_and_bound_do_not_mix() {
        let a = Formula::forall(name("x"), Ty::Wr, Formula::atom(sym("x"), sym("y")));
        let b = Formula::forall(name("y"), Ty::Wr, Formula::atom(sym("y"), sym("y")));
        assert!(!alpha_eq(&a, &b));
    }

    #[test]
    fn trivial_conjunctions() {
        assert!(alpha_eq(&Formula::And(vec![]), &Formula::Top));
        assert!(alpha_eq(&Formula::And(vec![Formula::Bottom]), &Formula::Bottom));
    }
}
