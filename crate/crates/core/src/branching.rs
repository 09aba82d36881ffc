//! Branching commands added to any effect theory: `if`, `either` and
//! `maybe`, with `unextend` erasing them and `embed` going the other way.

use std::sync::Arc;

use crate::ast::{EffectTheory, Fresh, Post, Program, PtFamily, RunSub};
use crate::error::{Error, Result};
use crate::formula::{Atom, Formula};
use crate::values::{Domains, Name, Ty, Value};

pub use crate::checker::check_extension_agreement;

/// Each command's sub-argument is the scrutinee itself; its sub-family
/// dispatches on the constructor.
#[derive(Clone, Debug)]
pub enum BranchCommand {
    If { scrutinee: Value },
    Either { scrutinee: Value, l_ty: Ty, r_ty: Ty },
    Maybe { scrutinee: Value, elem_ty: Ty },
}

impl BranchCommand {
    pub fn scrutinee(&self) -> &Value {
        match self {
            BranchCommand::If { scrutinee }
            | BranchCommand::Either { scrutinee, .. }
            | BranchCommand::Maybe { scrutinee, .. } => scrutinee,
        }
    }

    /// The concrete sub-argument selecting the branch to run.
    pub fn select(&self) -> Result<Value> {
        let v = self.scrutinee();
        let ok = match (self, v) {
            (BranchCommand::If { .. }, Value::Bool(_)) => true,
            (BranchCommand::Either { .. }, Value::Left(_) | Value::Right(_)) => v.is_concrete(),
            (BranchCommand::Maybe { .. }, Value::Just(_) | Value::Nothing) => v.is_concrete(),
            _ => false,
        };
        if ok {
            Ok(v.clone())
        } else if v.is_concrete() {
            Err(Error::Type(format!("cannot branch on `{v}`")))
        } else {
            Err(Error::Symbolic(format!("branch on `{v}`")))
        }
    }
}

/// Commands of the extended theory: the base theory's, or a branch.
#[derive(Clone, Debug)]
pub enum Ext<C> {
    Base(C),
    Branch(BranchCommand),
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Branching<T> {
    pub base: T,
}

impl<T> Branching<T> {
    pub fn new(base: T) -> Branching<T> {
        Branching { base }
    }
}

/// The predicate transformer of a branch command, written against the
/// sub-family `subs`.
pub fn branch_pt<'a, I, O>(
    cmd: &BranchCommand,
    subs: &PtFamily<'a, I, O>,
    post: &Post<'a, O>,
    i: &I,
    fresh: &mut Fresh,
) -> Result<Formula> {
    match cmd {
        BranchCommand::If { scrutinee } => {
            let t = subs(Value::Bool(true), post.clone(), i, fresh)?;
            let f = subs(Value::Bool(false), post.clone(), i, fresh)?;
            Ok(Formula::and(vec![
                Formula::implies(Atom::eq(scrutinee.clone(), Value::Bool(true)), t),
                Formula::implies(Atom::eq(scrutinee.clone(), Value::Bool(false)), f),
            ]))
        }
        BranchCommand::Either { scrutinee, l_ty, r_ty } => {
            let l = fresh.next("l");
            let left = Value::left(Value::Sym(l.clone()));
            let lf = subs(left.clone(), post.clone(), i, fresh)?;
            let r = fresh.next("r");
            let right = Value::right(Value::Sym(r.clone()));
            let rf = subs(right.clone(), post.clone(), i, fresh)?;
            Ok(Formula::and(vec![
                Formula::guarded(l, l_ty.clone(), Atom::eq(scrutinee.clone(), left), lf),
                Formula::guarded(r, r_ty.clone(), Atom::eq(scrutinee.clone(), right), rf),
            ]))
        }
        BranchCommand::Maybe { scrutinee, elem_ty } => {
            let j = fresh.next("j");
            let just = Value::just(Value::Sym(j.clone()));
            let jf = subs(just.clone(), post.clone(), i, fresh)?;
            let nf = subs(Value::Nothing, post.clone(), i, fresh)?;
            Ok(Formula::and(vec![
                Formula::guarded(j, elem_ty.clone(), Atom::eq(scrutinee.clone(), just), jf),
                Formula::implies(Atom::eq(scrutinee.clone(), Value::Nothing), nf),
            ]))
        }
    }
}

impl<T: EffectTheory> EffectTheory for Branching<T> {
    type Cmd = Ext<T::Cmd>;
    type Input = T::Input;
    type Output = T::Output;

    fn name(&self) -> &str {
        "branching"
    }

    fn run_return(&self, v: Value, i: &T::Input) -> Result<T::Output> {
        self.base.run_return(v, i)
    }

    fn run_bind(&self, first: T::Output, i: &T::Input, k: RunSub<'_, T::Input, T::Output>) -> Result<T::Output> {
        self.base.run_bind(first, i, k)
    }

    fn run_command(&self, cmd: &Ext<T::Cmd>, i: &T::Input, run_sub: RunSub<'_, T::Input, T::Output>) -> Result<T::Output> {
        match cmd {
            Ext::Base(c) => self.base.run_command(c, i, run_sub),
            Ext::Branch(b) => run_sub(b.select()?, i),
        }
    }

    fn return_pt<'a>(&'a self, v: Value, post: Post<'a, T::Output>, i: &T::Input, fresh: &mut Fresh) -> Result<Formula> {
        self.base.return_pt(v, post, i, fresh)
    }

    fn bind_pt<'a>(
        &'a self,
        ty: &Ty,
        k: PtFamily<'a, T::Input, T::Output>,
        i: &T::Input,
        post: Post<'a, T::Output>,
    ) -> Post<'a, T::Output> {
        self.base.bind_pt(ty, k, i, post)
    }

    fn op_pt<'a>(
        &'a self,
        cmd: &Ext<T::Cmd>,
        subs: PtFamily<'a, T::Input, T::Output>,
        post: Post<'a, T::Output>,
        i: &T::Input,
        fresh: &mut Fresh,
    ) -> Result<Formula> {
        match cmd {
            Ext::Base(c) => self.base.op_pt(c, subs, post, i, fresh),
            Ext::Branch(b) => branch_pt(b, &subs, &post, i, fresh),
        }
    }

    fn is_branch(&self, cmd: &Ext<T::Cmd>) -> bool {
        matches!(cmd, Ext::Branch(_))
    }

    fn input_vars(&self, i: &T::Input) -> Vec<(Name, Value)> {
        self.base.input_vars(i)
    }

    fn output_vars(&self, o: &T::Output) -> Vec<(Name, Value)> {
        self.base.output_vars(o)
    }

    fn symbolic_input(&self) -> T::Input {
        self.base.symbolic_input()
    }

    fn enumerate_inputs(&self, domains: &Domains) -> Vec<T::Input> {
        self.base.enumerate_inputs(domains)
    }
}

/// Replaces every branch node by the sub-program its scrutinee selects.
/// Continuations are translated lazily, so a scrutinee only has to be
/// concrete once execution reaches it.
pub fn unextend<C: Clone + Send + Sync + 'static>(m: &Program<Ext<C>>) -> Result<Program<C>> {
    match m {
        Program::Return(v) => Ok(Program::Return(v.clone())),
        Program::Bind { m, ty, k } => {
            let k = k.clone();
            Ok(Program::Bind {
                m: Arc::new(unextend(m)?),
                ty: ty.clone(),
                k: Arc::new(move |x| unextend(&k(x)?)),
            })
        }
        Program::Op { cmd: Ext::Base(c), subs } => {
            let subs = subs.clone();
            Ok(Program::Op {
                cmd: c.clone(),
                subs: Arc::new(move |x| unextend(&subs(x)?)),
            })
        }
        Program::Op { cmd: Ext::Branch(b), subs } => unextend(&subs(b.select()?)?),
    }
}

/// Views a base program as a program of the extended theory.
pub fn embed<C: Clone + Send + Sync + 'static>(m: &Program<C>) -> Program<Ext<C>> {
    match m {
        Program::Return(v) => Program::Return(v.clone()),
        Program::Bind { m, ty, k } => {
            let k = k.clone();
            Program::Bind {
                m: Arc::new(embed(m)),
                ty: ty.clone(),
                k: Arc::new(move |x| Ok(embed(&k(x)?))),
            }
        }
        Program::Op { cmd, subs } => {
            let subs = subs.clone();
            Program::Op {
                cmd: Ext::Base(cmd.clone()),
                subs: Arc::new(move |x| Ok(embed(&subs(x)?))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{is_branch_free, post_of_formula, run, wp};
    use crate::formula::{eval_formula, simplify, EvalCtx};
    use crate::rws::{paper_intro_prog, prog_post, Rws, RwsCommand, RwsInput};
    use crate::values::{enumerate_fn_values, Bounds, Env, WriterFn};

    type BProg = Program<Ext<RwsCommand>>;

    fn tell(w: &str) -> BProg {
        Program::leaf(Ext::Base(RwsCommand::Tell(Value::List(vec![Value::wr(w)]))))
    }

    fn if_prog(c: Value) -> BProg {
        Program::op(Ext::Branch(BranchCommand::If { scrutinee: c }), |b| match b {
            Value::Bool(true) => Ok(tell("w0")),
            Value::Bool(false) => Ok(tell("w1")),
            other => Err(Error::Type(other.to_string())),
        })
    }

    fn i0() -> RwsInput {
        RwsInput::new(Value::ev("e0"), Value::st("s0"))
    }

    #[test]
    fn if_selects_branch() {
        let out = run(&Branching::new(Rws), &if_prog(Value::Bool(true)), &i0()).unwrap();
        assert_eq!(out.output, Value::List(vec![Value::wr("w0")]));
        let base = run(&Rws, &unextend(&if_prog(Value::Bool(true))).unwrap(), &i0()).unwrap();
        assert_eq!(base, out);
    }

    #[test]
    fn symbolic_scrutinee_fails_when_forced() {
        let err = unextend(&if_prog(Value::sym("b"))).unwrap_err();
        assert!(matches!(err, Error::Symbolic(_)));
    }

    #[test]
    fn either_and_maybe_bind_payloads() {
        let either: BProg = Program::op(
            Ext::Branch(BranchCommand::Either {
                scrutinee: Value::left(Value::wr("w1")),
                l_ty: Ty::Wr,
                r_ty: Ty::St,
            }),
            |v| match v {
                Value::Left(w) => Ok(Program::leaf(Ext::Base(RwsCommand::Tell(Value::List(vec![*w]))))),
                _ => Ok(Program::ret(Value::Unit)),
            },
        );
        let out = run(&Branching::new(Rws), &either, &i0()).unwrap();
        assert_eq!(out.output, Value::List(vec![Value::wr("w1")]));
    }

    #[test]
    fn literal_if_false_branch_is_vacuous() {
        let d = Domains::new(&["s0"], &["e0"], &["w0", "w1"]).unwrap();
        let b = Bounds::default();
        let ctx = EvalCtx::new(&d, &b);
        let t = Branching::new(Rws);
        let p = Formula::atom(Value::sym("output"), Value::List(vec![Value::wr("w0")]));
        let f = wp(&t, &if_prog(Value::Bool(true)), post_of_formula(&t, &p), &t.symbolic_input(), &mut Fresh::new())
            .unwrap();
        let env: Env = t.input_vars(&i0()).into_iter().collect();
        assert!(eval_formula(&f, &env, &ctx).unwrap());
    }

    #[test]
    fn intro_agrees_with_unextend() {
        let d = Domains::new(&["s0", "s1"], &["e0"], &["w0"]).unwrap();
        let b = Bounds::default();
        let t = Branching::new(Rws);
        let tables = enumerate_fn_values(&Ty::St, &Ty::maybe(Ty::Wr), &d, &b).unwrap();
        assert_eq!(tables.len(), 4);
        for g in tables {
            let m = paper_intro_prog(g);
            for i in t.enumerate_inputs(&d) {
                let ext = run(&t, &m, &i).unwrap();
                assert_eq!(run(&Rws, &unextend(&m).unwrap(), &i).unwrap(), ext);
                assert_eq!(ext.state, i.state);
                assert_eq!(ext.output, Value::nil());
            }
        }
    }

    #[test]
    fn intro_obligation_shape() {
        let t = Branching::new(Rws);
        let m = paper_intro_prog(Value::sym("g"));
        let f = wp(&t, &m, post_of_formula(&t, &prog_post()), &t.symbolic_input(), &mut Fresh::new()).unwrap();
        let text = simplify(&f).to_string();
        assert!(text.starts_with("(r : Maybe Wr) → r ≡ g pre-state →"), "{text}");
    }

    #[test]
    fn branch_freedom() {
        let t = Branching::new(Rws);
        let probes = t.enumerate_inputs(&Domains::default());
        assert!(is_branch_free(&t, &Program::ret(Value::Unit), &probes).unwrap());
        let m = Program::then(tell("w0"), Ty::Unit, Program::ret(Value::Unit));
        assert!(is_branch_free(&t, &m, &probes).unwrap());
        let g = Value::Table(Arc::new(crate::values::FnTable {
            domain: Ty::St,
            codomain: Ty::maybe(Ty::Wr),
            entries: vec![(Value::st("s0"), Value::Nothing)],
        }));
        assert!(!is_branch_free(&t, &paper_intro_prog(g), &probes).unwrap());
    }

    #[test]
    fn embedding_is_neutral() {
        let base = Program::with_sub(
            RwsCommand::Pass,
            Program::then(
                Program::leaf(RwsCommand::Tell(Value::List(vec![Value::wr("w0")]))),
                Ty::Unit,
                Program::ret(Value::pair(Value::Unit, Value::WriterFn(WriterFn::SelfAppend))),
            ),
        );
        let t = Branching::new(Rws);
        assert_eq!(run(&Rws, &base, &i0()).unwrap(), run(&t, &embed(&base), &i0()).unwrap());
    }
}
