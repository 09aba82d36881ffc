use crate::error::{Error, Result};
use crate::formula::vars;
use crate::values::{name, Carrier, CarrierDecl, Domains, Expr, Head, Name, Ty, Value, WfLit};

use super::sexpr::{located, read_all, syntax, Pos, SExp};
use super::syntax::{Prog, SourceUnit, Spec};

const LITERALS: [&str; 4] = ["unit", "true", "false", "nothing"];

/// Carriers not declared in a unit get one atom each: `s0`, `e0`, `w0`.
pub fn effective_domains(decls: &[CarrierDecl]) -> Result<Domains> {
    let mut d = Domains::default();
    for decl in decls {
        match decl.carrier {
            Carrier::St => d.st = decl.clone(),
            Carrier::Ev => d.ev = decl.clone(),
            Carrier::Wr => d.wr = decl.clone(),
        }
    }
    d.validate()?;
    Ok(d)
}

pub fn parse_unit(text: &str) -> Result<SourceUnit> {
    let forms = read_all(text)?;
    let mut decls: Vec<CarrierDecl> = Vec::new();
    for f in &forms {
        if f.head() == Some("domain") {
            let decl = parse_domain(f)?;
            if decls.iter().any(|d| d.carrier == decl.carrier) {
                return Err(located(Error::Carrier(format!("{} declared twice", decl.carrier)), f.pos()));
            }
            decls.push(decl);
        }
    }
    let domains = effective_domains(&decls).map_err(|e| located(e, Pos { line: 1, col: 1 }))?;
    let mut p = Parser {
        declared: decls.iter().map(|d| d.carrier).collect(),
        domains,
        params: Vec::new(),
        scope: Vec::new(),
        in_spec: false,
    };
    for f in forms.iter().filter(|f| f.head() == Some("param")) {
        let xs = args(f, "param", 2)?;
        let n = p.binder(&xs[0])?;
        if p.params.iter().any(|(m, _)| *m == n) {
            return Err(located(Error::Invalid(format!("parameter `{n}` declared twice")), f.pos()));
        }
        let ty = p.ty(&xs[1])?;
        p.params.push((n, ty));
    }
    let mut program = None;
    let mut specs: Vec<(Name, Spec)> = Vec::new();
    for f in &forms {
        match f.head() {
            Some("domain") | Some("param") => {}
            Some("spec") => {
                let xs = args(f, "spec", 2)?;
                let n = xs[0].atom().map(name).ok_or_else(|| syntax("expected a spec name", xs[0].pos()))?;
                if specs.iter().any(|(m, _)| *m == n) {
                    return Err(located(Error::Invalid(format!("spec `{n}` declared twice")), f.pos()));
                }
                p.in_spec = true;
                let s = p.spec(&xs[1])?;
                p.in_spec = false;
                specs.push((n, s));
            }
            _ => {
                if program.is_some() {
                    return Err(syntax("more than one program", f.pos()));
                }
                let body = if f.head() == Some("program") { &args(f, "program", 1)?[0] } else { f };
                program = Some(p.prog(body)?);
            }
        }
    }
    let program = program.ok_or_else(|| syntax("missing program", Pos { line: 1, col: 1 }))?;
    Ok(SourceUnit {
        domains: decls,
        params: p.params,
        program,
        specs,
    })
}

fn parse_domain(f: &SExp) -> Result<CarrierDecl> {
    let xs = args(f, "domain", 2)?;
    let cname = xs[0].atom().ok_or_else(|| syntax("expected a carrier name", xs[0].pos()))?;
    let carrier = Carrier::parse(cname).ok_or_else(|| {
        located(
            Error::Undeclared {
                kind: "carrier",
                name: cname.to_string(),
            },
            xs[0].pos(),
        )
    })?;
    let atoms = xs[1].list().ok_or_else(|| syntax("expected an atom list", xs[1].pos()))?;
    let mut names = Vec::new();
    for a in atoms {
        let s = a.atom().ok_or_else(|| syntax("expected an atom", a.pos()))?;
        if !is_identifier(s) {
            return Err(syntax(format!("`{s}` cannot name an atom"), a.pos()));
        }
        names.push(name(s));
    }
    let decl = CarrierDecl { carrier, atoms: names };
    decl.validate().map_err(|e| located(e, f.pos()))?;
    Ok(decl)
}

fn is_identifier(s: &str) -> bool {
    !LITERALS.contains(&s)
        && !s.chars().next().is_some_and(|c| c.is_ascii_digit())
        && s.chars().all(|c| c.is_alphanumeric() || "-_'".contains(c))
}

/// Arguments of `(form a1 .. an)`, checking the count.
fn args<'s>(f: &'s SExp, form: &str, n: usize) -> Result<&'s [SExp]> {
    let xs = &f.list().expect("list form")[1..];
    if xs.len() != n {
        return Err(located(
            Error::Arity {
                form: form.to_string(),
                expected: n.to_string(),
                found: xs.len(),
            },
            f.pos(),
        ));
    }
    Ok(xs)
}

struct Parser {
    declared: Vec<Carrier>,
    domains: Domains,
    params: Vec<(Name, Ty)>,
    scope: Vec<Name>,
    in_spec: bool,
}

impl Parser {
    fn binder(&self, s: &SExp) -> Result<Name> {
        match s.atom() {
            Some(a) if is_identifier(a) => Ok(name(a)),
            Some(a) => Err(syntax(format!("`{a}` cannot be bound"), s.pos())),
            None => Err(syntax("expected a name", s.pos())),
        }
    }

    /// `(x)`, the binder list of `bind` and `lambda`.
    fn binder_list(&self, s: &SExp) -> Result<Name> {
        match s.list() {
            Some([x]) => self.binder(x),
            _ => Err(syntax("expected a single binder in parentheses", s.pos())),
        }
    }

    fn with_bound<T>(&mut self, x: &Name, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.scope.push(x.clone());
        let r = f(self);
        self.scope.pop();
        r
    }

    fn carrier_ty(&self, c: Carrier, pos: Pos) -> Result<Ty> {
        if self.declared.contains(&c) {
            Ok(c.ty())
        } else {
            Err(located(
                Error::Undeclared {
                    kind: "carrier",
                    name: c.to_string(),
                },
                pos,
            ))
        }
    }

    fn ty(&self, s: &SExp) -> Result<Ty> {
        if let Some(a) = s.atom() {
            return match a {
                "unit" => Ok(Ty::Unit),
                "bool" => Ok(Ty::Bool),
                "nat" => Ok(Ty::Nat),
                "wf" => Ok(Ty::WriterFn),
                other => match Carrier::parse(other) {
                    Some(c) => self.carrier_ty(c, s.pos()),
                    None => Err(located(
                        Error::Undeclared {
                            kind: "carrier",
                            name: other.to_string(),
                        },
                        s.pos(),
                    )),
                },
            };
        }
        let head = s.head().ok_or_else(|| syntax("expected a type", s.pos()))?;
        match head {
            "list" => Ok(Ty::list(self.ty(&args(s, head, 1)?[0])?)),
            "maybe" => Ok(Ty::maybe(self.ty(&args(s, head, 1)?[0])?)),
            "either" | "pair" | "fn" => {
                let xs = args(s, head, 2)?;
                let (a, b) = (self.ty(&xs[0])?, self.ty(&xs[1])?);
                Ok(match head {
                    "either" => Ty::either(a, b),
                    "pair" => Ty::pair(a, b),
                    _ => Ty::func(a, b),
                })
            }
            other => Err(located(Error::UnknownForm(other.to_string()), s.pos())),
        }
    }

    fn lambda(&mut self, s: &SExp) -> Result<(Name, Expr)> {
        if s.head() != Some("lambda") {
            return Err(syntax("expected (lambda (x) e)", s.pos()));
        }
        let xs = args(s, "lambda", 2)?;
        let x = self.binder_list(&xs[0])?;
        let body = self.with_bound(&x, |p| p.expr(&xs[1]))?;
        Ok((x, body))
    }

    fn prog(&mut self, s: &SExp) -> Result<Prog> {
        let head = match s.head() {
            Some(h) => h,
            None => return Err(syntax("expected a program form", s.pos())),
        };
        let boxed = |p: &mut Self, s: &SExp| p.prog(s).map(Box::new);
        Ok(match head {
            "return" => Prog::Return(self.expr(&args(s, head, 1)?[0])?),
            "bind" => {
                let xs = args(s, head, 3)?;
                let m = boxed(self, &xs[0])?;
                let x = self.binder_list(&xs[1])?;
                let k = self.with_bound(&x, |p| boxed(p, &xs[2]))?;
                Prog::Bind(m, x, k)
            }
            "gets" | "puts" => {
                let (x, e) = self.lambda(&args(s, head, 1)?[0])?;
                if head == "gets" {
                    Prog::Gets(x, e)
                } else {
                    Prog::Puts(x, e)
                }
            }
            "tell" => Prog::Tell(self.expr(&args(s, head, 1)?[0])?),
            "ask" => {
                args(s, head, 0)?;
                Prog::Ask
            }
            "local" => {
                let xs = args(s, head, 2)?;
                let (x, e) = self.lambda(&xs[0])?;
                Prog::Local(x, e, boxed(self, &xs[1])?)
            }
            "pass" => Prog::Pass(boxed(self, &args(s, head, 1)?[0])?),
            "if" => {
                let xs = args(s, head, 3)?;
                Prog::If(self.expr(&xs[0])?, boxed(self, &xs[1])?, boxed(self, &xs[2])?)
            }
            "maybe" => {
                let xs = args(s, head, 3)?;
                let e = self.expr(&xs[0])?;
                let (j, m) = self.case(&xs[1])?;
                Prog::Maybe(e, j, m, boxed(self, &xs[2])?)
            }
            "either" => {
                let xs = args(s, head, 3)?;
                let e = self.expr(&xs[0])?;
                let (l, m) = self.case(&xs[1])?;
                let (r, m2) = self.case(&xs[2])?;
                Prog::Either(e, l, m, r, m2)
            }
            other => return Err(located(Error::UnknownForm(other.to_string()), s.pos())),
        })
    }

    /// `(x m)`: a branch binding `x` in `m`.
    fn case(&mut self, s: &SExp) -> Result<(Name, Box<Prog>)> {
        match s.list() {
            Some([x, m]) => {
                let x = self.binder(x)?;
                let m = self.with_bound(&x, |p| p.prog(m))?;
                Ok((x, Box::new(m)))
            }
            _ => Err(syntax("expected (x program)", s.pos())),
        }
    }

    fn ident(&self, a: &str, pos: Pos) -> Result<Expr> {
        match a {
            "unit" => return Ok(Expr::Lit(Value::Unit)),
            "true" => return Ok(Expr::Lit(Value::Bool(true))),
            "false" => return Ok(Expr::Lit(Value::Bool(false))),
            "nothing" => return Ok(Expr::Lit(Value::Nothing)),
            _ => {}
        }
        if a.chars().next().is_some_and(|c| c.is_ascii_digit()) {
            return a
                .parse::<u32>()
                .map(|n| Expr::Lit(Value::Nat(n)))
                .map_err(|_| syntax(format!("bad number `{a}`"), pos));
        }
        if self.scope.iter().any(|n| &**n == a) || self.params.iter().any(|(n, _)| &**n == a) {
            return Ok(Expr::var(a));
        }
        if let Some(v) = self.domains.resolve_atom(a) {
            return Ok(Expr::Lit(v));
        }
        if self.in_spec && vars::ALL.contains(&a) {
            return Ok(Expr::var(a));
        }
        Err(located(
            Error::Undeclared {
                kind: "variable",
                name: a.to_string(),
            },
            pos,
        ))
    }

    fn expr(&mut self, s: &SExp) -> Result<Expr> {
        if let Some(a) = s.atom() {
            return self.ident(a, s.pos());
        }
        let head = s.head().ok_or_else(|| syntax("expected an expression", s.pos()))?;
        let sub = |p: &mut Self, n: usize| -> Result<Vec<Expr>> {
            args(s, head, n)?.iter().map(|x| p.expr(x)).collect()
        };
        let one = |mut v: Vec<Expr>| Box::new(v.remove(0));
        Ok(match head {
            "list" => Expr::List(s.list().unwrap()[1..].iter().map(|x| self.expr(x)).collect::<Result<_>>()?),
            "just" => Expr::Just(one(sub(self, 1)?)),
            "left" => Expr::Left(one(sub(self, 1)?)),
            "right" => Expr::Right(one(sub(self, 1)?)),
            "pair" => {
                let mut v = sub(self, 2)?;
                let b = v.pop().unwrap();
                Expr::Pair(one(v), Box::new(b))
            }
            "fst" => Expr::prim(Head::Fst, sub(self, 1)?),
            "snd" => Expr::prim(Head::Snd, sub(self, 1)?),
            "length" => Expr::prim(Head::Length, sub(self, 1)?),
            "append" => Expr::prim(Head::Append, sub(self, 2)?),
            "apply" => Expr::prim(Head::Apply, sub(self, 2)?),
            "eq" => Expr::prim(Head::Eq, sub(self, 2)?),
            "if" => Expr::prim(Head::If, sub(self, 3)?),
            "wf-compose" => Expr::prim(Head::Compose, sub(self, 2)?),
            "wf-id" => {
                sub(self, 0)?;
                Expr::Wf(WfLit::Id)
            }
            "wf-self-append" => {
                sub(self, 0)?;
                Expr::Wf(WfLit::SelfAppend)
            }
            "wf-const" => Expr::Wf(WfLit::Const(one(sub(self, 1)?))),
            "wf-append" => Expr::Wf(WfLit::Append(one(sub(self, 1)?))),
            "wf-prepend" => Expr::Wf(WfLit::Prepend(one(sub(self, 1)?))),
            other => return Err(located(Error::UnknownForm(other.to_string()), s.pos())),
        })
    }

    fn spec(&mut self, s: &SExp) -> Result<Spec> {
        if let Some(a) = s.atom() {
            return match a {
                "top" => Ok(Spec::top()),
                "bottom" => Ok(Spec::Bottom),
                _ => Err(syntax(format!("expected a formula, found `{a}`"), s.pos())),
            };
        }
        let head = s.head().ok_or_else(|| syntax("expected a formula", s.pos()))?;
        Ok(match head {
            "and" => Spec::And(s.list().unwrap()[1..].iter().map(|x| self.spec(x)).collect::<Result<_>>()?),
            "eq" => {
                let xs = args(s, head, 2)?;
                Spec::Eq(self.expr(&xs[0])?, self.expr(&xs[1])?)
            }
            "implies" => {
                let xs = args(s, head, 2)?;
                match self.spec(&xs[0])? {
                    Spec::Eq(a, b) => Spec::Implies(a, b, Box::new(self.spec(&xs[1])?)),
                    _ => return Err(syntax("implication hypothesis must be an (eq a b) atom", xs[0].pos())),
                }
            }
            "forall" => {
                let xs = args(s, head, 2)?;
                let (x, ty) = match xs[0].list() {
                    Some([x, t]) => (self.binder(x)?, self.ty(t)?),
                    _ => return Err(syntax("expected (x type)", xs[0].pos())),
                };
                let body = self.with_bound(&x, |p| p.spec(&xs[1]))?;
                Spec::Forall(x, ty, Box::new(body))
            }
            other => return Err(located(Error::UnknownForm(other.to_string()), s.pos())),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn return_unit() {
        let u = parse_unit("(return unit)").unwrap();
        assert_eq!(u.program, Prog::Return(Expr::Lit(Value::Unit)));
        assert!(u.params.is_empty() && u.specs.is_empty() && u.domains.is_empty());
    }

    #[test]
    fn unbalanced() {
        let e = parse_unit("(bind (gets (lambda (s) s))").unwrap_err();
        assert_eq!(e.to_string(), "unbalanced parenthesis at 1:27");
    }

    #[test]
    fn unknown_form_is_located() {
        let e = parse_unit("(domain St (s0))\n(frob 1)").unwrap_err();
        assert_eq!(e.to_string(), "unknown form `frob` at 2:1");
    }

    #[test]
    fn arity_mismatch() {
        let e = parse_unit("(tell (list) (list))").unwrap_err();
        assert!(matches!(e, Error::Located { ref inner, .. } if matches!(**inner, Error::Arity { .. })));
    }

    #[test]
    fn undeclared_parameter_and_carrier() {
        let e = parse_unit("(gets (lambda (s) (apply g s)))").unwrap_err();
        assert_eq!(e.to_string(), "undeclared variable `g` at 1:26");
        let e = parse_unit("(param g (fn St Wr))\n(return unit)").unwrap_err();
        assert_eq!(e.to_string(), "undeclared carrier `St` at 1:14");
    }

    #[test]
    fn spec_variables_only_in_specs() {
        assert!(parse_unit("(return output)").is_err());
        let u = parse_unit("(return unit)\n(spec P (eq 0 (length output)))").unwrap();
        assert_eq!(u.specs.len(), 1);
    }

    #[test]
    fn top_and_empty_and_coincide() {
        let a = parse_unit("(return unit) (spec P top)").unwrap();
        let b = parse_unit("(return unit) (spec P (and))").unwrap();
        assert_eq!(a, b);
    }
}
