use super::value::{name, reduce, Head, Name, Value, WriterFn};
use crate::error::{Error, Result};

/// Surface expressions: the payload language of commands and the term
/// language of specs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(Name),
    /// `unit`, booleans, naturals, carrier atoms, `nothing`.
    Lit(Value),
    List(Vec<Expr>),
    Just(Box<Expr>),
    Left(Box<Expr>),
    Right(Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    Prim(Head, Vec<Expr>),
    Wf(WfLit),
}

/// Writer-transformer literals; composition goes through [`Head::Compose`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WfLit {
    Id,
    Const(Box<Expr>),
    SelfAppend,
    Prepend(Box<Expr>),
    Append(Box<Expr>),
}

impl Expr {
    pub fn var(s: &str) -> Expr {
        Expr::Var(name(s))
    }

    pub fn prim(head: Head, args: Vec<Expr>) -> Expr {
        Expr::Prim(head, args)
    }

    /// True when some subexpression is a branch-style case analysis
    /// (`if`), used by the corpus generator for coverage accounting.
    pub fn has_if(&self) -> bool {
        match self {
            Expr::Prim(Head::If, _) => true,
            Expr::Prim(_, args) | Expr::List(args) => args.iter().any(Expr::has_if),
            Expr::Just(e) | Expr::Left(e) | Expr::Right(e) => e.has_if(),
            Expr::Pair(a, b) => a.has_if() || b.has_if(),
            _ => false,
        }
    }
}

/// Variable environment, innermost binding last.
#[derive(Clone, Debug, Default)]
pub struct Env {
    vars: Vec<(Name, Value)>,
}

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn with(&self, n: &Name, v: Value) -> Env {
        let mut e = self.clone();
        e.push(n.clone(), v);
        e
    }

    pub fn push(&mut self, n: Name, v: Value) {
        self.vars.push((n, v));
    }

    pub fn pop(&mut self) {
        self.vars.pop();
    }

    pub fn get(&self, n: &str) -> Option<&Value> {
        self.vars.iter().rev().find(|(k, _)| &**k == n).map(|(_, v)| v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Name, Value)> {
        self.vars.iter()
    }
}

impl FromIterator<(Name, Value)> for Env {
    fn from_iter<I: IntoIterator<Item = (Name, Value)>>(iter: I) -> Self {
        Env {
            vars: iter.into_iter().collect(),
        }
    }
}

/// Evaluates `expr` under `env`. Concrete inputs give concrete values;
/// symbolic operands give neutral terms.
pub fn eval_expr(expr: &Expr, env: &Env) -> Result<Value> {
    let boxed = |e: &Expr| eval_expr(e, env).map(Box::new);
    Ok(match expr {
        Expr::Var(n) => env.get(n).cloned().ok_or_else(|| Error::Unbound(n.to_string()))?,
        Expr::Lit(v) => v.clone(),
        Expr::List(items) => Value::List(items.iter().map(|e| eval_expr(e, env)).collect::<Result<_>>()?),
        Expr::Just(e) => Value::Just(boxed(e)?),
        Expr::Left(e) => Value::Left(boxed(e)?),
        Expr::Right(e) => Value::Right(boxed(e)?),
        Expr::Pair(a, b) => Value::Pair(boxed(a)?, boxed(b)?),
        Expr::Prim(head, args) => {
            let args = args.iter().map(|e| eval_expr(e, env)).collect::<Result<Vec<_>>>()?;
            reduce(*head, args)?
        }
        Expr::Wf(lit) => Value::WriterFn(match lit {
            WfLit::Id => WriterFn::Id,
            WfLit::SelfAppend => WriterFn::SelfAppend,
            WfLit::Const(e) => WriterFn::ConstList(boxed(e)?),
            WfLit::Prepend(e) => WriterFn::Prepend(boxed(e)?),
            WfLit::Append(e) => WriterFn::Append(boxed(e)?),
        }),
    })
}
