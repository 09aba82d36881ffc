use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::Ty;
use crate::error::{Error, Result};

/// Identifiers: atom names, variables, parameters.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

/// Runtime data. `Sym` and `Neutral` only arise while computing
/// preconditions symbolically; concrete execution never produces them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Unit,
    Bool(bool),
    Nat(u32),
    Wr(Name),
    St(Name),
    Ev(Name),
    List(Vec<Value>),
    Pair(Box<Value>, Box<Value>),
    Left(Box<Value>),
    Right(Box<Value>),
    Just(Box<Value>),
    Nothing,
    WriterFn(WriterFn),
    Table(Arc<FnTable>),
    Sym(Name),
    Neutral(Head, Vec<Value>),
}

/// Closed grammar of `List Wr → List Wr` functions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum WriterFn {
    Id,
    ConstList(Box<Value>),
    SelfAppend,
    Prepend(Box<Value>),
    Append(Box<Value>),
    /// `Compose(f, g)` applies `g` first.
    Compose(Box<WriterFn>, Box<WriterFn>),
}

/// Elimination forms. A neutral term is one of these applied to arguments
/// that are too symbolic to reduce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Head {
    Apply,
    Length,
    Append,
    Fst,
    Snd,
    Eq,
    If,
    Compose,
}

impl Head {
    pub fn as_str(self) -> &'static str {
        match self {
            Head::Apply => "apply",
            Head::Length => "length",
            Head::Append => "append",
            Head::Fst => "fst",
            Head::Snd => "snd",
            Head::Eq => "eq",
            Head::If => "if",
            Head::Compose => "compose",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Head::Length | Head::Fst | Head::Snd => 1,
            Head::Apply | Head::Append | Head::Eq | Head::Compose => 2,
            Head::If => 3,
        }
    }
}

/// A finite, total function table for a function-typed parameter.
#[derive(Clone, Debug, Eq)]
pub struct FnTable {
    pub domain: Ty,
    pub codomain: Ty,
    pub entries: Vec<(Value, Value)>,
}

impl PartialEq for FnTable {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl std::hash::Hash for FnTable {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.entries.hash(state);
    }
}

impl FnTable {
    pub fn lookup(&self, key: &Value) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

impl Value {
    pub fn sym(s: &str) -> Value {
        Value::Sym(name(s))
    }

    pub fn wr(s: &str) -> Value {
        Value::Wr(name(s))
    }

    pub fn st(s: &str) -> Value {
        Value::St(name(s))
    }

    pub fn ev(s: &str) -> Value {
        Value::Ev(name(s))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn just(v: Value) -> Value {
        Value::Just(Box::new(v))
    }

    pub fn left(v: Value) -> Value {
        Value::Left(Box::new(v))
    }

    pub fn right(v: Value) -> Value {
        Value::Right(Box::new(v))
    }

    pub fn nil() -> Value {
        Value::List(Vec::new())
    }

    fn is_stuck(&self) -> bool {
        matches!(self, Value::Sym(_) | Value::Neutral(..))
    }

    /// True when no `Sym` or `Neutral` occurs anywhere inside.
    pub fn is_concrete(&self) -> bool {
        match self {
            Value::Sym(_) | Value::Neutral(..) => false,
            Value::List(xs) => xs.iter().all(Value::is_concrete),
            Value::Pair(a, b) => a.is_concrete() && b.is_concrete(),
            Value::Left(v) | Value::Right(v) | Value::Just(v) => v.is_concrete(),
            Value::WriterFn(wf) => wf.is_concrete(),
            _ => true,
        }
    }

    pub fn free_syms(&self, out: &mut BTreeSet<Name>) {
        match self {
            Value::Sym(n) => {
                out.insert(n.clone());
            }
            Value::Neutral(_, args) | Value::List(args) => {
                args.iter().for_each(|a| a.free_syms(out));
            }
            Value::Pair(a, b) => {
                a.free_syms(out);
                b.free_syms(out);
            }
            Value::Left(v) | Value::Right(v) | Value::Just(v) => v.free_syms(out),
            Value::WriterFn(wf) => wf.free_syms(out),
            _ => {}
        }
    }

    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Value::Sym(n) => &**n == var,
            Value::Neutral(_, args) | Value::List(args) => args.iter().any(|a| a.mentions(var)),
            Value::Pair(a, b) => a.mentions(var) || b.mentions(var),
            Value::Left(v) | Value::Right(v) | Value::Just(v) => v.mentions(var),
            Value::WriterFn(wf) => {
                let mut s = BTreeSet::new();
                wf.free_syms(&mut s);
                s.iter().any(|n| &**n == var)
            }
            _ => false,
        }
    }

    /// Replaces symbols using `lookup` and re-normalises every neutral term
    /// whose arguments changed.
    pub fn subst(&self, lookup: &dyn Fn(&str) -> Option<Value>) -> Result<Value> {
        Ok(match self {
            Value::Sym(n) => lookup(n).unwrap_or_else(|| self.clone()),
            Value::Neutral(h, args) => {
                let args = args.iter().map(|a| a.subst(lookup)).collect::<Result<Vec<_>>>()?;
                reduce(*h, args)?
            }
            Value::List(xs) => Value::List(xs.iter().map(|a| a.subst(lookup)).collect::<Result<_>>()?),
            Value::Pair(a, b) => Value::pair(a.subst(lookup)?, b.subst(lookup)?),
            Value::Left(v) => Value::left(v.subst(lookup)?),
            Value::Right(v) => Value::right(v.subst(lookup)?),
            Value::Just(v) => Value::just(v.subst(lookup)?),
            Value::WriterFn(wf) => Value::WriterFn(wf.subst(lookup)?),
            _ => self.clone(),
        })
    }

    /// Bottom-up rewrite used by the simplifier; `f` sees each rebuilt node.
    pub fn rewrite(&self, f: &dyn Fn(Value) -> Value) -> Value {
        let rebuilt = match self {
            Value::Neutral(h, args) => {
                Value::Neutral(*h, args.iter().map(|a| a.rewrite(f)).collect())
            }
            Value::List(xs) => Value::List(xs.iter().map(|a| a.rewrite(f)).collect()),
            Value::Pair(a, b) => Value::pair(a.rewrite(f), b.rewrite(f)),
            Value::Left(v) => Value::left(v.rewrite(f)),
            Value::Right(v) => Value::right(v.rewrite(f)),
            Value::Just(v) => Value::just(v.rewrite(f)),
            _ => self.clone(),
        };
        f(rebuilt)
    }

    pub fn as_list(&self) -> Option<&[Value]> {
        match self {
            Value::List(xs) => Some(xs),
            _ => None,
        }
    }
}

impl WriterFn {
    pub fn compose(f: WriterFn, g: WriterFn) -> WriterFn {
        WriterFn::Compose(Box::new(f), Box::new(g))
    }

    fn is_concrete(&self) -> bool {
        match self {
            WriterFn::ConstList(v) | WriterFn::Prepend(v) | WriterFn::Append(v) => v.is_concrete(),
            WriterFn::Compose(f, g) => f.is_concrete() && g.is_concrete(),
            WriterFn::Id | WriterFn::SelfAppend => true,
        }
    }

    fn free_syms(&self, out: &mut BTreeSet<Name>) {
        match self {
            WriterFn::ConstList(v) | WriterFn::Prepend(v) | WriterFn::Append(v) => v.free_syms(out),
            WriterFn::Compose(f, g) => {
                f.free_syms(out);
                g.free_syms(out);
            }
            WriterFn::Id | WriterFn::SelfAppend => {}
        }
    }

    fn subst(&self, lookup: &dyn Fn(&str) -> Option<Value>) -> Result<WriterFn> {
        Ok(match self {
            WriterFn::ConstList(v) => WriterFn::ConstList(Box::new(v.subst(lookup)?)),
            WriterFn::Prepend(v) => WriterFn::Prepend(Box::new(v.subst(lookup)?)),
            WriterFn::Append(v) => WriterFn::Append(Box::new(v.subst(lookup)?)),
            WriterFn::Compose(f, g) => WriterFn::compose(f.subst(lookup)?, g.subst(lookup)?),
            other => other.clone(),
        })
    }

    /// Applies the transformer to a concrete message list.
    pub fn apply_list(&self, xs: &[Value]) -> Result<Vec<Value>> {
        match apply_writer_fn(self, &Value::List(xs.to_vec()))? {
            Value::List(out) => Ok(out),
            other => Err(Error::Symbolic(format!("writer transformer produced `{other}`"))),
        }
    }
}

/// Denotation of the writer-transformer grammar; symbolic inputs give
/// neutral `append` terms.
pub fn apply_writer_fn(wf: &WriterFn, xs: &Value) -> Result<Value> {
    match wf {
        WriterFn::Id => Ok(xs.clone()),
        WriterFn::ConstList(c) => Ok((**c).clone()),
        WriterFn::SelfAppend => reduce(Head::Append, vec![xs.clone(), xs.clone()]),
        WriterFn::Prepend(p) => reduce(Head::Append, vec![(**p).clone(), xs.clone()]),
        WriterFn::Append(a) => reduce(Head::Append, vec![xs.clone(), (**a).clone()]),
        WriterFn::Compose(f, g) => apply_writer_fn(f, &apply_writer_fn(g, xs)?),
    }
}

fn type_error(head: Head, args: &[Value]) -> Error {
    let shown: Vec<String> = args.iter().map(|a| a.to_string()).collect();
    Error::Type(format!("cannot apply `{}` to {}", head.as_str(), shown.join(", ")))
}

/// Structural equality that tolerates symbolic parts: `Some` when decided.
pub fn decide_eq(a: &Value, b: &Value) -> Option<bool> {
    if a.is_stuck() || b.is_stuck() {
        return if a == b { Some(true) } else { None };
    }
    let all = |pairs: Vec<(&Value, &Value)>| {
        let mut undecided = false;
        for (x, y) in pairs {
            match decide_eq(x, y) {
                Some(false) => return Some(false),
                None => undecided = true,
                Some(true) => {}
            }
        }
        if undecided {
            None
        } else {
            Some(true)
        }
    };
    match (a, b) {
        (Value::List(xs), Value::List(ys)) => {
            if xs.len() != ys.len() {
                Some(false)
            } else {
                all(xs.iter().zip(ys).collect())
            }
        }
        (Value::Pair(a1, a2), Value::Pair(b1, b2)) => all(vec![(a1, b1), (a2, b2)]),
        (Value::Left(x), Value::Left(y))
        | (Value::Right(x), Value::Right(y))
        | (Value::Just(x), Value::Just(y)) => decide_eq(x, y),
        _ if a.is_concrete() && b.is_concrete() => Some(a == b),
        (Value::WriterFn(_), _) | (_, Value::WriterFn(_)) => None,
        _ => Some(false),
    }
}

/// Normalises one elimination step. Concrete arguments compute; symbolic
/// ones yield a `Neutral` recording the head and arguments.
pub fn reduce(head: Head, args: Vec<Value>) -> Result<Value> {
    if args.len() != head.arity() {
        return Err(Error::Type(format!(
            "`{}` expects {} arguments, got {}",
            head.as_str(),
            head.arity(),
            args.len()
        )));
    }
    let stuck = || Ok(Value::Neutral(head, args.clone()));
    match head {
        Head::Apply => match (&args[0], &args[1]) {
            (Value::Table(t), x) if x.is_concrete() => t
                .lookup(x)
                .cloned()
                .ok_or_else(|| Error::Type(format!("`{x}` outside the table's domain"))),
            (Value::Table(_), _) => stuck(),
            (Value::WriterFn(wf), xs) => apply_writer_fn(wf, xs),
            (f, _) if f.is_stuck() => stuck(),
            _ => Err(type_error(head, &args)),
        },
        Head::Length => match &args[0] {
            Value::List(xs) => Ok(Value::Nat(xs.len() as u32)),
            v if v.is_stuck() => stuck(),
            _ => Err(type_error(head, &args)),
        },
        Head::Append => match (&args[0], &args[1]) {
            (Value::List(a), Value::List(b)) => {
                let mut out = a.clone();
                out.extend(b.iter().cloned());
                Ok(Value::List(out))
            }
            (a, b) if (a.is_stuck() || a.as_list().is_some()) && (b.is_stuck() || b.as_list().is_some()) => {
                stuck()
            }
            _ => Err(type_error(head, &args)),
        },
        Head::Fst | Head::Snd => match &args[0] {
            Value::Pair(a, b) => Ok(if head == Head::Fst { (**a).clone() } else { (**b).clone() }),
            v if v.is_stuck() => stuck(),
            _ => Err(type_error(head, &args)),
        },
        Head::Eq => match decide_eq(&args[0], &args[1]) {
            Some(b) => Ok(Value::Bool(b)),
            None => stuck(),
        },
        Head::If => match &args[0] {
            Value::Bool(true) => Ok(args[1].clone()),
            Value::Bool(false) => Ok(args[2].clone()),
            v if v.is_stuck() => stuck(),
            _ => Err(type_error(head, &args)),
        },
        Head::Compose => match (&args[0], &args[1]) {
            (Value::WriterFn(f), Value::WriterFn(g)) => {
                Ok(Value::WriterFn(WriterFn::compose(f.clone(), g.clone())))
            }
            (f, g) if f.is_stuck() || g.is_stuck() => stuck(),
            _ => Err(type_error(head, &args)),
        },
    }
}

// Printing precedence: 0 = anywhere, 1 = left operand of `++`,
// 2 = argument of an application.
const PREC_TOP: u8 = 0;
const PREC_APPEND_LHS: u8 = 1;
const PREC_ARG: u8 = 2;

impl Value {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        let app = |f: &mut fmt::Formatter<'_>, head: &str, args: &[&Value]| -> fmt::Result {
            if prec >= PREC_ARG {
                f.write_str("(")?;
            }
            f.write_str(head)?;
            for a in args {
                f.write_str(" ")?;
                a.fmt_prec(f, PREC_ARG)?;
            }
            if prec >= PREC_ARG {
                f.write_str(")")?;
            }
            Ok(())
        };
        match self {
            Value::Unit => f.write_str("unit"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Nat(n) => write!(f, "{n}"),
            Value::Wr(n) | Value::St(n) | Value::Ev(n) | Value::Sym(n) => f.write_str(n),
            Value::Nothing => f.write_str("nothing"),
            Value::List(xs) => {
                f.write_str("[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    x.fmt_prec(f, PREC_TOP)?;
                }
                f.write_str("]")
            }
            Value::Pair(a, b) => {
                f.write_str("(")?;
                a.fmt_prec(f, PREC_TOP)?;
                f.write_str(" , ")?;
                b.fmt_prec(f, PREC_TOP)?;
                f.write_str(")")
            }
            Value::Just(v) => app(f, "just", &[v]),
            Value::Left(v) => app(f, "left", &[v]),
            Value::Right(v) => app(f, "right", &[v]),
            Value::WriterFn(wf) => write!(f, "{wf}"),
            Value::Table(t) => {
                f.write_str("{")?;
                for (i, (k, v)) in t.entries.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    k.fmt_prec(f, PREC_TOP)?;
                    f.write_str(" ↦ ")?;
                    v.fmt_prec(f, PREC_TOP)?;
                }
                f.write_str("}")
            }
            Value::Neutral(head, args) => match head {
                Head::Apply => {
                    if prec >= PREC_ARG {
                        f.write_str("(")?;
                    }
                    args[0].fmt_prec(f, PREC_ARG)?;
                    f.write_str(" ")?;
                    args[1].fmt_prec(f, PREC_ARG)?;
                    if prec >= PREC_ARG {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
                Head::Length | Head::Fst | Head::Snd | Head::Eq => {
                    app(f, head.as_str(), &args.iter().collect::<Vec<_>>())
                }
                Head::Append => {
                    if prec >= PREC_APPEND_LHS {
                        f.write_str("(")?;
                    }
                    args[0].fmt_prec(f, PREC_APPEND_LHS)?;
                    f.write_str(" ++ ")?;
                    args[1].fmt_prec(f, PREC_TOP)?;
                    if prec >= PREC_APPEND_LHS {
                        f.write_str(")")?;
                    }
                    Ok(())
                }
                Head::If => {
                    f.write_str("(if ")?;
                    args[0].fmt_prec(f, PREC_TOP)?;
                    f.write_str(" then ")?;
                    args[1].fmt_prec(f, PREC_TOP)?;
                    f.write_str(" else ")?;
                    args[2].fmt_prec(f, PREC_TOP)?;
                    f.write_str(")")
                }
                Head::Compose => {
                    f.write_str("(")?;
                    args[0].fmt_prec(f, PREC_ARG)?;
                    f.write_str(" ∘ ")?;
                    args[1].fmt_prec(f, PREC_ARG)?;
                    f.write_str(")")
                }
            },
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, PREC_TOP)
    }
}

/// Lambda binder for printing a transformer: `x`, or `x'`, `x''`, ... when
/// the payload already mentions `x`.
fn lambda_var(payload: &Value) -> String {
    let mut v = String::from("x");
    while payload.mentions(&v) {
        v.push('\'');
    }
    v
}

impl fmt::Display for WriterFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WriterFn::Id => f.write_str("(λ x → x)"),
            WriterFn::SelfAppend => f.write_str("(λ x → x ++ x)"),
            WriterFn::ConstList(c) => write!(f, "(λ _ → {c})"),
            WriterFn::Prepend(p) => {
                let x = lambda_var(p);
                f.write_str("(λ ")?;
                f.write_str(&x)?;
                f.write_str(" → ")?;
                p.fmt_prec(f, PREC_APPEND_LHS)?;
                write!(f, " ++ {x})")
            }
            WriterFn::Append(a) => {
                let x = lambda_var(a);
                write!(f, "(λ {x} → {x} ++ ")?;
                a.fmt_prec(f, PREC_TOP)?;
                f.write_str(")")
            }
            WriterFn::Compose(g, h) => write!(f, "({g} ∘ {h})"),
        }
    }
}
