use crate::values::{Expr, Head, Ty, Value, WfLit, WriterFn};

use super::sexpr::{atom, list, SExp};
use super::syntax::{Prog, SourceUnit, Spec};

fn form(head: &str, args: Vec<SExp>) -> SExp {
    let mut xs = vec![atom(head)];
    xs.extend(args);
    list(xs)
}

fn ty_sexp(t: &Ty) -> SExp {
    atom(&t.to_sexpr())
}

fn writer_sexp(wf: &WriterFn) -> SExp {
    match wf {
        WriterFn::Id => form("wf-id", vec![]),
        WriterFn::SelfAppend => form("wf-self-append", vec![]),
        WriterFn::ConstList(v) => form("wf-const", vec![value_sexp(v)]),
        WriterFn::Prepend(v) => form("wf-prepend", vec![value_sexp(v)]),
        WriterFn::Append(v) => form("wf-append", vec![value_sexp(v)]),
        WriterFn::Compose(f, g) => form("wf-compose", vec![writer_sexp(f), writer_sexp(g)]),
    }
}

/// Concrete values in surface syntax.
pub fn value_sexp(v: &Value) -> SExp {
    match v {
        Value::List(xs) => form("list", xs.iter().map(value_sexp).collect()),
        Value::Pair(a, b) => form("pair", vec![value_sexp(a), value_sexp(b)]),
        Value::Just(x) => form("just", vec![value_sexp(x)]),
        Value::Left(x) => form("left", vec![value_sexp(x)]),
        Value::Right(x) => form("right", vec![value_sexp(x)]),
        Value::WriterFn(wf) => writer_sexp(wf),
        Value::Neutral(h, args) => form(prim_name(*h), args.iter().map(value_sexp).collect()),
        other => atom(&other.to_string()),
    }
}

fn prim_name(h: Head) -> &'static str {
    match h {
        Head::Compose => "wf-compose",
        other => other.as_str(),
    }
}

pub fn expr_sexp(e: &Expr) -> SExp {
    match e {
        Expr::Var(n) => atom(n),
        Expr::Lit(v) => value_sexp(v),
        Expr::List(xs) => form("list", xs.iter().map(expr_sexp).collect()),
        Expr::Just(x) => form("just", vec![expr_sexp(x)]),
        Expr::Left(x) => form("left", vec![expr_sexp(x)]),
        Expr::Right(x) => form("right", vec![expr_sexp(x)]),
        Expr::Pair(a, b) => form("pair", vec![expr_sexp(a), expr_sexp(b)]),
        Expr::Prim(h, args) => form(prim_name(*h), args.iter().map(expr_sexp).collect()),
        Expr::Wf(lit) => match lit {
            WfLit::Id => form("wf-id", vec![]),
            WfLit::SelfAppend => form("wf-self-append", vec![]),
            WfLit::Const(x) => form("wf-const", vec![expr_sexp(x)]),
            WfLit::Prepend(x) => form("wf-prepend", vec![expr_sexp(x)]),
            WfLit::Append(x) => form("wf-append", vec![expr_sexp(x)]),
        },
    }
}

fn lambda(x: &str, e: &Expr) -> SExp {
    form("lambda", vec![list(vec![atom(x)]), expr_sexp(e)])
}

pub fn prog_sexp(p: &Prog) -> SExp {
    match p {
        Prog::Return(e) => form("return", vec![expr_sexp(e)]),
        Prog::Bind(m, x, k) => form("bind", vec![prog_sexp(m), list(vec![atom(x)]), prog_sexp(k)]),
        Prog::Gets(x, e) => form("gets", vec![lambda(x, e)]),
        Prog::Puts(x, e) => form("puts", vec![lambda(x, e)]),
        Prog::Tell(e) => form("tell", vec![expr_sexp(e)]),
        Prog::Ask => form("ask", vec![]),
        Prog::Local(x, e, m) => form("local", vec![lambda(x, e), prog_sexp(m)]),
        Prog::Pass(m) => form("pass", vec![prog_sexp(m)]),
        Prog::If(e, m, m2) => form("if", vec![expr_sexp(e), prog_sexp(m), prog_sexp(m2)]),
        Prog::Maybe(e, j, m, m2) => form(
            "maybe",
            vec![expr_sexp(e), list(vec![atom(j), prog_sexp(m)]), prog_sexp(m2)],
        ),
        Prog::Either(e, l, m, r, m2) => form(
            "either",
            vec![
                expr_sexp(e),
                list(vec![atom(l), prog_sexp(m)]),
                list(vec![atom(r), prog_sexp(m2)]),
            ],
        ),
    }
}

pub fn spec_sexp(s: &Spec) -> SExp {
    match s {
        Spec::And(xs) if xs.is_empty() => atom("top"),
        Spec::And(xs) => form("and", xs.iter().map(spec_sexp).collect()),
        Spec::Bottom => atom("bottom"),
        Spec::Eq(a, b) => form("eq", vec![expr_sexp(a), expr_sexp(b)]),
        Spec::Implies(a, b, body) => form(
            "implies",
            vec![form("eq", vec![expr_sexp(a), expr_sexp(b)]), spec_sexp(body)],
        ),
        Spec::Forall(x, t, body) => form("forall", vec![list(vec![atom(x), ty_sexp(t)]), spec_sexp(body)]),
    }
}

/// Canonical text: domains, parameters, the program, then specs.
pub fn print_unit(u: &SourceUnit) -> String {
    let mut out = String::new();
    for d in &u.domains {
        let atoms = list(d.atoms.iter().map(|a| atom(a)).collect());
        out.push_str(&form("domain", vec![atom(&d.carrier.to_string()), atoms]).pretty(0));
        out.push('\n');
    }
    for (n, t) in &u.params {
        out.push_str(&form("param", vec![atom(n), ty_sexp(t)]).pretty(0));
        out.push('\n');
    }
    if !out.is_empty() {
        out.push('\n');
    }
    out.push_str(&form("program", vec![prog_sexp(&u.program)]).pretty(0));
    out.push('\n');
    if !u.specs.is_empty() {
        out.push('\n');
    }
    for (n, s) in &u.specs {
        out.push_str(&form("spec", vec![atom(n), spec_sexp(s)]).pretty(0));
        out.push('\n');
    }
    out
}
