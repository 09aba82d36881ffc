//! Type inference for surface units, and elaboration to a typed core.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::vars;
use crate::values::{Expr, Head, Name, Ty, Value, WfLit, WriterFn};

use super::syntax::{Prog, SourceUnit, Spec};

#[derive(Clone, Debug, PartialEq, Eq)]
enum It {
    Unit,
    Bool,
    Nat,
    Wr,
    St,
    Ev,
    List(Box<It>),
    Pair(Box<It>, Box<It>),
    Either(Box<It>, Box<It>),
    Maybe(Box<It>),
    Fn(Box<It>, Box<It>),
    Meta(usize),
}

fn b(t: It) -> Box<It> {
    Box::new(t)
}

impl It {
    fn list(t: It) -> It {
        It::List(b(t))
    }

    fn wf() -> It {
        It::Fn(b(It::list(It::Wr)), b(It::list(It::Wr)))
    }

    fn from_ty(t: &Ty) -> It {
        match t {
            Ty::Unit => It::Unit,
            Ty::Bool => It::Bool,
            Ty::Nat => It::Nat,
            Ty::Wr => It::Wr,
            Ty::St => It::St,
            Ty::Ev => It::Ev,
            Ty::List(t) => It::list(It::from_ty(t)),
            Ty::Pair(x, y) => It::Pair(b(It::from_ty(x)), b(It::from_ty(y))),
            Ty::Either(x, y) => It::Either(b(It::from_ty(x)), b(It::from_ty(y))),
            Ty::Maybe(t) => It::Maybe(b(It::from_ty(t))),
            Ty::WriterFn => It::wf(),
            Ty::Fn(x, y) => It::Fn(b(It::from_ty(x)), b(It::from_ty(y))),
        }
    }
}

impl It {
    fn arg(&self) -> String {
        match self {
            It::List(_) | It::Maybe(_) | It::Either(..) => format!("({self})"),
            _ => self.to_string(),
        }
    }
}

impl fmt::Display for It {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            It::Meta(n) => write!(f, "?{n}"),
            It::Unit => f.write_str("Unit"),
            It::Bool => f.write_str("Bool"),
            It::Nat => f.write_str("Nat"),
            It::Wr => f.write_str("Wr"),
            It::St => f.write_str("St"),
            It::Ev => f.write_str("Ev"),
            It::List(t) => write!(f, "List {}", t.arg()),
            It::Maybe(t) => write!(f, "Maybe {}", t.arg()),
            It::Pair(x, y) => write!(f, "({x} × {y})"),
            It::Either(x, y) => write!(f, "Either {} {}", x.arg(), y.arg()),
            It::Fn(x, y) => write!(f, "({x} → {y})"),
        }
    }
}

#[derive(Default)]
struct Solver {
    metas: Vec<Option<It>>,
}

impl Solver {
    fn fresh(&mut self) -> It {
        self.metas.push(None);
        It::Meta(self.metas.len() - 1)
    }

    fn shallow(&self, t: &It) -> It {
        let mut t = t.clone();
        while let It::Meta(n) = t {
            match &self.metas[n] {
                Some(u) => t = u.clone(),
                None => break,
            }
        }
        t
    }

    fn zonk(&self, t: &It) -> It {
        match self.shallow(t) {
            It::List(x) => It::List(b(self.zonk(&x))),
            It::Maybe(x) => It::Maybe(b(self.zonk(&x))),
            It::Pair(x, y) => It::Pair(b(self.zonk(&x)), b(self.zonk(&y))),
            It::Either(x, y) => It::Either(b(self.zonk(&x)), b(self.zonk(&y))),
            It::Fn(x, y) => It::Fn(b(self.zonk(&x)), b(self.zonk(&y))),
            other => other,
        }
    }

    /// Unresolved metas default to `Unit`.
    fn resolve(&self, t: &It) -> Ty {
        match self.shallow(t) {
            It::Meta(_) | It::Unit => Ty::Unit,
            It::Bool => Ty::Bool,
            It::Nat => Ty::Nat,
            It::Wr => Ty::Wr,
            It::St => Ty::St,
            It::Ev => Ty::Ev,
            It::List(x) => Ty::list(self.resolve(&x)),
            It::Maybe(x) => Ty::maybe(self.resolve(&x)),
            It::Pair(x, y) => Ty::pair(self.resolve(&x), self.resolve(&y)),
            It::Either(x, y) => Ty::either(self.resolve(&x), self.resolve(&y)),
            It::Fn(x, y) => Ty::func(self.resolve(&x), self.resolve(&y)),
        }
    }

    fn occurs(&self, n: usize, t: &It) -> bool {
        match self.shallow(t) {
            It::Meta(m) => m == n,
            It::List(x) | It::Maybe(x) => self.occurs(n, &x),
            It::Pair(x, y) | It::Either(x, y) | It::Fn(x, y) => self.occurs(n, &x) || self.occurs(n, &y),
            _ => false,
        }
    }

    fn unify(&mut self, a: &It, b: &It, what: &str) -> Result<()> {
        let (x, y) = (self.shallow(a), self.shallow(b));
        let mismatch = |s: &Solver| {
            Error::Type(format!("{what}: expected {}, found {}", s.zonk(&x), s.zonk(&y)))
        };
        match (&x, &y) {
            (It::Meta(m), It::Meta(n)) if m == n => Ok(()),
            (It::Meta(n), t) | (t, It::Meta(n)) => {
                if self.occurs(*n, t) {
                    return Err(mismatch(self));
                }
                self.metas[*n] = Some(t.clone());
                Ok(())
            }
            (It::List(p), It::List(q)) | (It::Maybe(p), It::Maybe(q)) => self.unify(p, q, what),
            (It::Pair(p1, p2), It::Pair(q1, q2))
            | (It::Either(p1, p2), It::Either(q1, q2))
            | (It::Fn(p1, p2), It::Fn(q1, q2)) => {
                self.unify(p1, q1, what).map_err(|_| mismatch(self))?;
                self.unify(p2, q2, what).map_err(|_| mismatch(self))
            }
            _ if x == y => Ok(()),
            _ => Err(mismatch(self)),
        }
    }
}

/// Elaborated program: binder result types are resolved.
#[derive(Debug)]
pub enum Core {
    Return(Expr),
    Bind(Arc<Core>, Ty, Name, Arc<Core>),
    Gets(Name, Expr),
    Puts(Name, Expr),
    Tell(Expr),
    Ask,
    Local(Name, Expr, Arc<Core>),
    Pass(Arc<Core>),
    If(Expr, Arc<Core>, Arc<Core>),
    Maybe(Expr, Ty, Name, Arc<Core>, Arc<Core>),
    Either(Expr, Ty, Ty, Name, Arc<Core>, Name, Arc<Core>),
}

pub struct Typed {
    pub result_ty: Ty,
    pub core: Arc<Core>,
}

struct Infer<'u> {
    solver: Solver,
    params: &'u [(Name, Ty)],
    scope: Vec<(Name, It)>,
    /// Types at `bind`, `maybe` and `either` nodes, in pre-order.
    slots: Vec<It>,
    result: Option<It>,
}

fn value_it(s: &mut Solver, v: &Value) -> Result<It> {
    Ok(match v {
        Value::Unit => It::Unit,
        Value::Bool(_) => It::Bool,
        Value::Nat(_) => It::Nat,
        Value::Wr(_) => It::Wr,
        Value::St(_) => It::St,
        Value::Ev(_) => It::Ev,
        Value::Nothing => It::Maybe(b(s.fresh())),
        Value::Just(x) => It::Maybe(b(value_it(s, x)?)),
        Value::Left(x) => It::Either(b(value_it(s, x)?), b(s.fresh())),
        Value::Right(x) => It::Either(b(s.fresh()), b(value_it(s, x)?)),
        Value::Pair(x, y) => It::Pair(b(value_it(s, x)?), b(value_it(s, y)?)),
        Value::List(xs) => {
            let t = s.fresh();
            for x in xs {
                let u = value_it(s, x)?;
                s.unify(&t, &u, "list element")?;
            }
            It::list(t)
        }
        Value::WriterFn(wf) => {
            writer_it(s, wf)?;
            It::wf()
        }
        Value::Table(t) => It::from_ty(&Ty::func(t.domain.clone(), t.codomain.clone())),
        other => return Err(Error::Type(format!("literal `{other}` in source"))),
    })
}

fn writer_it(s: &mut Solver, wf: &WriterFn) -> Result<()> {
    match wf {
        WriterFn::Id | WriterFn::SelfAppend => Ok(()),
        WriterFn::ConstList(v) | WriterFn::Prepend(v) | WriterFn::Append(v) => {
            let t = value_it(s, v)?;
            s.unify(&It::list(It::Wr), &t, "writer transformer payload")
        }
        WriterFn::Compose(f, g) => {
            writer_it(s, f)?;
            writer_it(s, g)
        }
    }
}

impl Infer<'_> {
    fn lookup(&self, n: &str) -> Result<It> {
        if let Some((_, t)) = self.scope.iter().rev().find(|(k, _)| &**k == n) {
            return Ok(t.clone());
        }
        if let Some((_, t)) = self.params.iter().find(|(k, _)| &**k == n) {
            return Ok(It::from_ty(t));
        }
        if let Some(r) = &self.result {
            match n {
                vars::PRE_ENV => return Ok(It::Ev),
                vars::PRE_STATE | vars::POST_STATE => return Ok(It::St),
                vars::OUTPUT => return Ok(It::list(It::Wr)),
                vars::RESULT => return Ok(r.clone()),
                _ => {}
            }
        }
        Err(Error::Unbound(n.to_string()))
    }

    fn bound<T>(&mut self, x: &Name, t: It, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.scope.push((x.clone(), t));
        let r = f(self);
        self.scope.pop();
        r
    }

    fn expect(&mut self, e: &Expr, t: &It, what: &str) -> Result<()> {
        let u = self.expr(e)?;
        self.solver.unify(t, &u, what)
    }

    fn expr(&mut self, e: &Expr) -> Result<It> {
        Ok(match e {
            Expr::Var(n) => self.lookup(n)?,
            Expr::Lit(v) => value_it(&mut self.solver, v)?,
            Expr::List(xs) => {
                let t = self.solver.fresh();
                for x in xs {
                    self.expect(x, &t, "list element")?;
                }
                It::list(t)
            }
            Expr::Just(x) => It::Maybe(b(self.expr(x)?)),
            Expr::Left(x) => {
                let r = self.solver.fresh();
                It::Either(b(self.expr(x)?), b(r))
            }
            Expr::Right(x) => {
                let l = self.solver.fresh();
                It::Either(b(l), b(self.expr(x)?))
            }
            Expr::Pair(x, y) => It::Pair(b(self.expr(x)?), b(self.expr(y)?)),
            Expr::Wf(lit) => {
                match lit {
                    WfLit::Id | WfLit::SelfAppend => {}
                    WfLit::Const(x) | WfLit::Prepend(x) | WfLit::Append(x) => {
                        self.expect(x, &It::list(It::Wr), "writer transformer payload")?
                    }
                }
                It::wf()
            }
            Expr::Prim(head, args) => {
                let what = head.as_str();
                match head {
                    Head::Apply => {
                        let (dom, cod) = (self.solver.fresh(), self.solver.fresh());
                        self.expect(&args[0], &It::Fn(b(dom.clone()), b(cod.clone())), what)?;
                        self.expect(&args[1], &dom, what)?;
                        cod
                    }
                    Head::Length => {
                        let t = It::list(self.solver.fresh());
                        self.expect(&args[0], &t, what)?;
                        It::Nat
                    }
                    Head::Append => {
                        let t = It::list(self.solver.fresh());
                        self.expect(&args[0], &t, what)?;
                        self.expect(&args[1], &t, what)?;
                        t
                    }
                    Head::Fst | Head::Snd => {
                        let (x, y) = (self.solver.fresh(), self.solver.fresh());
                        self.expect(&args[0], &It::Pair(b(x.clone()), b(y.clone())), what)?;
                        if *head == Head::Fst {
                            x
                        } else {
                            y
                        }
                    }
                    Head::Eq => {
                        let t = self.expr(&args[0])?;
                        self.expect(&args[1], &t, what)?;
                        It::Bool
                    }
                    Head::If => {
                        self.expect(&args[0], &It::Bool, "if condition")?;
                        let t = self.expr(&args[1])?;
                        self.expect(&args[2], &t, "if branches")?;
                        t
                    }
                    Head::Compose => {
                        self.expect(&args[0], &It::wf(), what)?;
                        self.expect(&args[1], &It::wf(), what)?;
                        It::wf()
                    }
                }
            }
        })
    }

    fn prog(&mut self, p: &Prog) -> Result<It> {
        Ok(match p {
            Prog::Return(e) => self.expr(e)?,
            Prog::Bind(m, x, k) => {
                let slot = self.slots.len();
                self.slots.push(It::Unit);
                let tm = self.prog(m)?;
                self.slots[slot] = tm.clone();
                self.bound(x, tm, |s| s.prog(k))?
            }
            Prog::Gets(x, e) => self.bound(x, It::St, |s| s.expr(e))?,
            Prog::Puts(x, e) => {
                self.bound(x, It::St, |s| s.expect(e, &It::St, "puts payload"))?;
                It::Unit
            }
            Prog::Tell(e) => {
                self.expect(e, &It::list(It::Wr), "tell payload")?;
                It::Unit
            }
            Prog::Ask => It::Ev,
            Prog::Local(x, e, m) => {
                self.bound(x, It::Ev, |s| s.expect(e, &It::Ev, "local payload"))?;
                self.prog(m)?
            }
            Prog::Pass(m) => {
                let a = self.solver.fresh();
                let t = self.prog(m)?;
                self.solver.unify(&It::Pair(b(a.clone()), b(It::wf())), &t, "pass body")?;
                a
            }
            Prog::If(e, m, m2) => {
                self.expect(e, &It::Bool, "if scrutinee")?;
                let t = self.prog(m)?;
                let u = self.prog(m2)?;
                self.solver.unify(&t, &u, "if branches")?;
                t
            }
            Prog::Maybe(e, j, m, m2) => {
                let a = self.solver.fresh();
                self.slots.push(a.clone());
                self.expect(e, &It::Maybe(b(a.clone())), "maybe scrutinee")?;
                let t = self.bound(j, a, |s| s.prog(m))?;
                let u = self.prog(m2)?;
                self.solver.unify(&t, &u, "maybe branches")?;
                t
            }
            Prog::Either(e, l, m, r, m2) => {
                let (x, y) = (self.solver.fresh(), self.solver.fresh());
                self.slots.push(It::Either(b(x.clone()), b(y.clone())));
                self.expect(e, &It::Either(b(x.clone()), b(y.clone())), "either scrutinee")?;
                let t = self.bound(l, x, |s| s.prog(m))?;
                let u = self.bound(r, y, |s| s.prog(m2))?;
                self.solver.unify(&t, &u, "either branches")?;
                t
            }
        })
    }

    fn spec(&mut self, s: &Spec) -> Result<()> {
        match s {
            Spec::Bottom => Ok(()),
            Spec::And(xs) => xs.iter().try_for_each(|x| self.spec(x)),
            Spec::Eq(l, r) => {
                let t = self.expr(l)?;
                self.expect(r, &t, "equation")
            }
            Spec::Implies(l, r, body) => {
                let t = self.expr(l)?;
                self.expect(r, &t, "hypothesis")?;
                self.spec(body)
            }
            Spec::Forall(x, ty, body) => self.bound(x, It::from_ty(ty), |st| st.spec(body)),
        }
    }
}

struct Elab<'s> {
    solver: &'s Solver,
    slots: std::vec::IntoIter<It>,
}

impl Elab<'_> {
    fn slot(&mut self) -> It {
        self.slots.next().expect("slot recorded during inference")
    }

    fn prog(&mut self, p: &Prog) -> Arc<Core> {
        Arc::new(match p {
            Prog::Return(e) => Core::Return(e.clone()),
            Prog::Bind(m, x, k) => {
                let ty = self.solver.resolve(&self.slot());
                Core::Bind(self.prog(m), ty, x.clone(), self.prog(k))
            }
            Prog::Gets(x, e) => Core::Gets(x.clone(), e.clone()),
            Prog::Puts(x, e) => Core::Puts(x.clone(), e.clone()),
            Prog::Tell(e) => Core::Tell(e.clone()),
            Prog::Ask => Core::Ask,
            Prog::Local(x, e, m) => Core::Local(x.clone(), e.clone(), self.prog(m)),
            Prog::Pass(m) => Core::Pass(self.prog(m)),
            Prog::If(e, m, m2) => Core::If(e.clone(), self.prog(m), self.prog(m2)),
            Prog::Maybe(e, j, m, m2) => {
                let ty = self.solver.resolve(&self.slot());
                Core::Maybe(e.clone(), ty, j.clone(), self.prog(m), self.prog(m2))
            }
            Prog::Either(e, l, m, r, m2) => {
                let (lt, rt) = match self.solver.resolve(&self.slot()) {
                    Ty::Either(x, y) => (*x, *y),
                    other => unreachable!("either slot resolved to {other}"),
                };
                Core::Either(e.clone(), lt, rt, l.clone(), self.prog(m), r.clone(), self.prog(m2))
            }
        })
    }
}

/// Infers the program's result type, checks every spec against it, and
/// elaborates the program.
pub fn typecheck(unit: &SourceUnit) -> Result<Typed> {
    let mut inf = Infer {
        solver: Solver::default(),
        params: &unit.params,
        scope: Vec::new(),
        slots: Vec::new(),
        result: None,
    };
    let t = inf.prog(&unit.program)?;
    inf.result = Some(t.clone());
    for (n, s) in &unit.specs {
        inf.spec(s).map_err(|e| match e {
            Error::Type(m) => Error::Type(format!("in spec `{n}`: {m}")),
            other => other,
        })?;
    }
    let result_ty = inf.solver.resolve(&t);
    let slots = std::mem::take(&mut inf.slots);
    let mut elab = Elab {
        solver: &inf.solver,
        slots: slots.into_iter(),
    };
    let core = elab.prog(&unit.program);
    Ok(Typed { result_ty, core })
}
