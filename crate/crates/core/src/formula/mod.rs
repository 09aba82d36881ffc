//! First-order obligation language: conjunction, implication, equality
//! atoms and guarded universal quantifiers.

mod alpha;
mod eval;
mod json;
pub mod names;
mod print;
mod simplify;

use std::collections::BTreeSet;
use std::fmt;

pub use alpha::alpha_eq;
pub use eval::{eval_atom, eval_formula, eval_term, EvalCtx};
pub use json::formula_to_json;
pub use print::{print_formula, print_formula_flat};
pub use simplify::{rename_canonical, simplify};

use crate::error::Result;
use crate::values::{Name, Ty, Value};

/// `lhs ≡ rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub lhs: Value,
    pub rhs: Value,
}

impl Atom {
    pub fn eq(lhs: Value, rhs: Value) -> Atom {
        Atom { lhs, rhs }
    }

    pub fn subst(&self, lookup: &dyn Fn(&str) -> Option<Value>) -> Result<Atom> {
        Ok(Atom {
            lhs: self.lhs.subst(lookup)?,
            rhs: self.rhs.subst(lookup)?,
        })
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.lhs.mentions(var) || self.rhs.mentions(var)
    }

    fn free_syms(&self, out: &mut BTreeSet<Name>) {
        self.lhs.free_syms(out);
        self.rhs.free_syms(out);
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ≡ {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bottom,
    Atom(Atom),
    And(Vec<Formula>),
    Implies(Atom, Box<Formula>),
    /// `(var : ty) → guard → body`; the guard mentions `var` once, on one side.
    ForallGuarded {
        var: Name,
        ty: Ty,
        guard: Atom,
        body: Box<Formula>,
    },
    ForallPlain {
        var: Name,
        ty: Ty,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn atom(lhs: Value, rhs: Value) -> Formula {
        Formula::Atom(Atom::eq(lhs, rhs))
    }

    pub fn implies(hyp: Atom, body: Formula) -> Formula {
        Formula::Implies(hyp, Box::new(body))
    }

    pub fn guarded(var: Name, ty: Ty, guard: Atom, body: Formula) -> Formula {
        Formula::ForallGuarded {
            var,
            ty,
            guard,
            body: Box::new(body),
        }
    }

    pub fn forall(var: Name, ty: Ty, body: Formula) -> Formula {
        Formula::ForallPlain {
            var,
            ty,
            body: Box::new(body),
        }
    }

    pub fn and(parts: Vec<Formula>) -> Formula {
        Formula::And(parts)
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Top | Formula::Bottom => {}
            Formula::Atom(a) => a.free_syms(out),
            Formula::And(fs) => fs.iter().for_each(|f| f.collect_free(out)),
            Formula::Implies(a, b) => {
                a.free_syms(out);
                b.collect_free(out);
            }
            Formula::ForallGuarded { var, guard, body, .. } => {
                let mut inner = BTreeSet::new();
                guard.free_syms(&mut inner);
                body.collect_free(&mut inner);
                inner.remove(var);
                out.extend(inner);
            }
            Formula::ForallPlain { var, body, .. } => {
                let mut inner = BTreeSet::new();
                body.collect_free(&mut inner);
                inner.remove(var);
                out.extend(inner);
            }
        }
    }

    /// Number of nodes, atoms included.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Bottom | Formula::Atom(_) => 1,
            Formula::And(fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
            Formula::Implies(_, b) => 2 + b.size(),
            Formula::ForallGuarded { body, .. } => 2 + body.size(),
            Formula::ForallPlain { body, .. } => 1 + body.size(),
        }
    }

    /// Capture-avoiding simultaneous substitution of free symbols.
    pub fn subst(&self, map: &[(Name, Value)]) -> Result<Formula> {
        if map.is_empty() {
            return Ok(self.clone());
        }
        let lookup = |n: &str| map.iter().rev().find(|(k, _)| &**k == n).map(|(_, v)| v.clone());
        Ok(match self {
            Formula::Top => Formula::Top,
            Formula::Bottom => Formula::Bottom,
            Formula::Atom(a) => Formula::Atom(a.subst(&lookup)?),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.subst(map)).collect::<Result<_>>()?),
            Formula::Implies(a, b) => Formula::implies(a.subst(&lookup)?, b.subst(map)?),
            Formula::ForallGuarded { var, ty, guard, body } => {
                let (var, inner) = self.enter_binder(var, map, body)?;
                let guard = guard.subst(&|n: &str| inner.iter().rev().find(|(k, _)| &**k == n).map(|(_, v)| v.clone()))?;
                Formula::guarded(var, ty.clone(), guard, body.subst(&inner)?)
            }
            Formula::ForallPlain { var, ty, body } => {
                let (var, inner) = self.enter_binder(var, map, body)?;
                Formula::forall(var, ty.clone(), body.subst(&inner)?)
            }
        })
    }

    /// Drops `var` from `map` and, if a substituted value would be captured,
    /// renames the binder.
    fn enter_binder(&self, var: &Name, map: &[(Name, Value)], body: &Formula) -> Result<(Name, Vec<(Name, Value)>)> {
        let mut inner: Vec<(Name, Value)> = map.iter().filter(|(k, _)| k != var).cloned().collect();
        if !inner.iter().any(|(_, v)| v.mentions(var)) {
            return Ok((var.clone(), inner));
        }
        let mut avoid = self.free_vars();
        avoid.extend(body.free_vars());
        for (k, v) in &inner {
            avoid.insert(k.clone());
            v.free_syms(&mut avoid);
        }
        let fresh = names::next_free(var, &avoid);
        inner.push((var.clone(), Value::Sym(fresh.clone())));
        Ok((fresh, inner))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

/// Distinguished postcondition variables.
pub mod vars {
    pub const PRE_ENV: &str = "pre-env";
    pub const PRE_STATE: &str = "pre-state";
    pub const RESULT: &str = "result";
    pub const POST_STATE: &str = "post-state";
    pub const OUTPUT: &str = "output";

    pub const ALL: [&str; 5] = [PRE_ENV, PRE_STATE, RESULT, POST_STATE, OUTPUT];
}

#[cfg(test)]
pub(crate) fn sym(s: &str) -> Value {
    Value::sym(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::values::{name, reduce, Head};

    #[test]
    fn substitution_renormalises_neutrals() {
        let len_o = reduce(Head::Length, vec![sym("o")]).unwrap();
        let f = Formula::atom(Value::Nat(0), len_o);
        let g = f.subst(&[(name("o"), Value::nil())]).unwrap();
        assert_eq!(g, Formula::atom(Value::Nat(0), Value::Nat(0)));
    }

    #[test]
    fn substitution_respects_shadowing() {
        let body = Formula::atom(sym("x"), Value::Unit);
        let f = Formula::forall(name("x"), Ty::Unit, body.clone());
        assert_eq!(f.subst(&[(name("x"), Value::Bool(true))]).unwrap(), f);
    }

    #[test]
    fn substitution_avoids_capture() {
        // ∀ y. x ≡ y   with x := y   must not become ∀ y. y ≡ y
        let f = Formula::forall(name("y"), Ty::Wr, Formula::atom(sym("x"), sym("y")));
        let g = f.subst(&[(name("x"), sym("y"))]).unwrap();
        match g {
            Formula::ForallPlain { var, body, .. } => {
                assert_ne!(&*var, "y");
                assert_eq!(*body, Formula::atom(sym("y"), Value::Sym(var)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn free_vars_exclude_binders() {
        let f = Formula::guarded(
            name("r"),
            Ty::maybe(Ty::Wr),
            Atom::eq(sym("r"), sym("g")),
            Formula::atom(sym("r"), sym("pre-state")),
        );
        let fv: Vec<String> = f.free_vars().iter().map(|n| n.to_string()).collect();
        assert_eq!(fv, vec!["g", "pre-state"]);
    }
}
