//! The reader/writer/state effect theory.

use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use crate::ast::{EffectTheory, Fresh, Post, Program, PtFamily, RunSub};
use crate::branching::{BranchCommand, Ext};
use crate::error::{Error, Result};
use crate::formula::{vars, Atom, Formula};
use crate::values::{apply_writer_fn, name, reduce, Domains, Head, Name, Ty, Value, WriterFn};

/// A packaged unary function over the value universe (`St → A`,
/// `St → St`, `Ev → Ev`). Applied to symbols it yields neutral terms.
#[derive(Clone)]
pub struct Lambda {
    label: Arc<str>,
    f: UnaryFn,
}

type UnaryFn = Arc<dyn Fn(&Value) -> Result<Value> + Send + Sync>;

impl Lambda {
    pub fn new(label: &str, f: impl Fn(&Value) -> Result<Value> + Send + Sync + 'static) -> Lambda {
        Lambda {
            label: Arc::from(label),
            f: Arc::new(f),
        }
    }

    pub fn identity() -> Lambda {
        Lambda::new("λ x → x", |v| Ok(v.clone()))
    }

    pub fn constant(v: Value) -> Lambda {
        Lambda::new(&format!("λ _ → {v}"), move |_| Ok(v.clone()))
    }

    /// `λ s → g s` for a parameter value `g` (table or symbol).
    pub fn apply_param(g: Value) -> Lambda {
        Lambda::new(&format!("λ s → {g} s"), move |s| reduce(Head::Apply, vec![g.clone(), s.clone()]))
    }

    pub fn call(&self, v: &Value) -> Result<Value> {
        (self.f)(v)
    }
}

impl fmt::Debug for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.label)
    }
}

#[derive(Clone, Debug)]
pub enum RwsCommand {
    Gets(Lambda),
    Puts(Lambda),
    Tell(Value),
    Ask,
    /// One sub-program, run with the environment mapped.
    Local(Lambda),
    /// One sub-program returning `(x , f)`; `f` rewrites its output.
    Pass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RwsInput {
    pub env: Value,
    pub state: Value,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RwsOutput {
    pub result: Value,
    pub state: Value,
    pub output: Value,
}

impl RwsInput {
    pub fn new(env: Value, state: Value) -> RwsInput {
        RwsInput { env, state }
    }
}

impl RwsOutput {
    pub fn new(result: Value, state: Value, output: Value) -> RwsOutput {
        RwsOutput { result, state, output }
    }
}

impl fmt::Display for RwsInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} , {})", self.env, self.state)
    }
}

impl fmt::Display for RwsOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} , {} , {})", self.result, self.state, self.output)
    }
}

pub type RwsProgram = Program<RwsCommand>;

#[derive(Clone, Copy, Debug, Default)]
pub struct Rws;

fn concrete(v: Value, what: &str) -> Result<Value> {
    if v.is_concrete() {
        Ok(v)
    } else {
        Err(Error::Symbolic(format!("{what} `{v}`")))
    }
}

fn append(a: &Value, b: &Value) -> Result<Value> {
    reduce(Head::Append, vec![a.clone(), b.clone()])
}

/// `P (x , s , outs ++ o)`.
pub fn rws_bind_post<'a>(outs: Value, post: Post<'a, RwsOutput>) -> Post<'a, RwsOutput> {
    Rc::new(move |o: &RwsOutput, fresh: &mut Fresh| {
        post(&RwsOutput::new(o.result.clone(), o.state.clone(), append(&outs, &o.output)?), fresh)
    })
}

/// `(o' : List Wr) → o' ≡ f o → P (x , s , o')` at output `((x , f) , s , o)`.
pub fn rws_pass_post<'a>(post: Post<'a, RwsOutput>) -> Post<'a, RwsOutput> {
    Rc::new(move |o: &RwsOutput, fresh: &mut Fresh| {
        let x = reduce(Head::Fst, vec![o.result.clone()])?;
        let f = reduce(Head::Snd, vec![o.result.clone()])?;
        let ov = fresh.next("o'");
        let rewritten = reduce(Head::Apply, vec![f, o.output.clone()])?;
        let body = post(&RwsOutput::new(x, o.state.clone(), Value::Sym(ov.clone())), fresh)?;
        Ok(Formula::guarded(ov.clone(), Ty::output(), Atom::eq(Value::Sym(ov), rewritten), body))
    })
}

impl EffectTheory for Rws {
    type Cmd = RwsCommand;
    type Input = RwsInput;
    type Output = RwsOutput;

    fn name(&self) -> &str {
        "rws"
    }

    fn run_return(&self, v: Value, i: &RwsInput) -> Result<RwsOutput> {
        Ok(RwsOutput::new(v, i.state.clone(), Value::nil()))
    }

    fn run_bind(&self, first: RwsOutput, i: &RwsInput, k: RunSub<'_, RwsInput, RwsOutput>) -> Result<RwsOutput> {
        let second = k(first.result, &RwsInput::new(i.env.clone(), first.state))?;
        Ok(RwsOutput::new(second.result, second.state, append(&first.output, &second.output)?))
    }

    fn run_command(&self, cmd: &RwsCommand, i: &RwsInput, run_sub: RunSub<'_, RwsInput, RwsOutput>) -> Result<RwsOutput> {
        let s = &i.state;
        match cmd {
            RwsCommand::Gets(g) => Ok(RwsOutput::new(concrete(g.call(s)?, "gets produced")?, s.clone(), Value::nil())),
            RwsCommand::Puts(p) => Ok(RwsOutput::new(Value::Unit, concrete(p.call(s)?, "puts produced")?, Value::nil())),
            RwsCommand::Tell(ws) => Ok(RwsOutput::new(Value::Unit, s.clone(), concrete(ws.clone(), "tell of")?)),
            RwsCommand::Ask => Ok(RwsOutput::new(i.env.clone(), s.clone(), Value::nil())),
            RwsCommand::Local(l) => {
                let env = concrete(l.call(&i.env)?, "local produced")?;
                run_sub(Value::Unit, &RwsInput::new(env, s.clone()))
            }
            RwsCommand::Pass => {
                let inner = run_sub(Value::Unit, i)?;
                match inner.result {
                    Value::Pair(x, f) => match *f {
                        Value::WriterFn(wf) => {
                            let output = apply_writer_fn(&wf, &inner.output)?;
                            Ok(RwsOutput::new(*x, inner.state, output))
                        }
                        other => Err(Error::Type(format!("pass expects a writer transformer, got `{other}`"))),
                    },
                    other => Err(Error::Type(format!("pass expects a pair, got `{other}`"))),
                }
            }
        }
    }

    fn return_pt<'a>(&'a self, v: Value, post: Post<'a, RwsOutput>, i: &RwsInput, fresh: &mut Fresh) -> Result<Formula> {
        post(&RwsOutput::new(v, i.state.clone(), Value::nil()), fresh)
    }

    fn bind_pt<'a>(
        &'a self,
        ty: &Ty,
        k: PtFamily<'a, RwsInput, RwsOutput>,
        i: &RwsInput,
        post: Post<'a, RwsOutput>,
    ) -> Post<'a, RwsOutput> {
        let ty = ty.clone();
        let env = i.env.clone();
        Rc::new(move |o: &RwsOutput, fresh: &mut Fresh| {
            let r = fresh.next("r");
            let next = RwsInput::new(env.clone(), o.state.clone());
            let body = k(Value::Sym(r.clone()), rws_bind_post(o.output.clone(), post.clone()), &next, fresh)?;
            Ok(Formula::guarded(r.clone(), ty.clone(), Atom::eq(Value::Sym(r), o.result.clone()), body))
        })
    }

    fn op_pt<'a>(
        &'a self,
        cmd: &RwsCommand,
        subs: PtFamily<'a, RwsInput, RwsOutput>,
        post: Post<'a, RwsOutput>,
        i: &RwsInput,
        fresh: &mut Fresh,
    ) -> Result<Formula> {
        let s = &i.state;
        match cmd {
            RwsCommand::Gets(g) => post(&RwsOutput::new(g.call(s)?, s.clone(), Value::nil()), fresh),
            RwsCommand::Puts(p) => post(&RwsOutput::new(Value::Unit, p.call(s)?, Value::nil()), fresh),
            RwsCommand::Tell(ws) => post(&RwsOutput::new(Value::Unit, s.clone(), ws.clone()), fresh),
            RwsCommand::Ask => post(&RwsOutput::new(i.env.clone(), s.clone(), Value::nil()), fresh),
            RwsCommand::Local(l) => subs(Value::Unit, post, &RwsInput::new(l.call(&i.env)?, s.clone()), fresh),
            RwsCommand::Pass => subs(Value::Unit, rws_pass_post(post), i, fresh),
        }
    }

    fn input_vars(&self, i: &RwsInput) -> Vec<(Name, Value)> {
        vec![(name(vars::PRE_ENV), i.env.clone()), (name(vars::PRE_STATE), i.state.clone())]
    }

    fn output_vars(&self, o: &RwsOutput) -> Vec<(Name, Value)> {
        vec![
            (name(vars::RESULT), o.result.clone()),
            (name(vars::POST_STATE), o.state.clone()),
            (name(vars::OUTPUT), o.output.clone()),
        ]
    }

    fn symbolic_input(&self) -> RwsInput {
        RwsInput::new(Value::sym(vars::PRE_ENV), Value::sym(vars::PRE_STATE))
    }

    /// Environment-major, in declaration order.
    fn enumerate_inputs(&self, domains: &Domains) -> Vec<RwsInput> {
        let mut out = Vec::new();
        for e in domains.ev.values() {
            for s in domains.st.values() {
                out.push(RwsInput::new(e.clone(), s));
            }
        }
        out
    }
}

type Extended = Program<Ext<RwsCommand>>;

fn base(cmd: RwsCommand) -> Ext<RwsCommand> {
    Ext::Base(cmd)
}

/// The introductory example: read `g s`; on `just w` emit `[w]` and erase
/// the output, on `nothing` double it (which leaves it empty).
pub fn paper_intro_prog(g: Value) -> Extended {
    let erase = Value::WriterFn(WriterFn::ConstList(Box::new(Value::nil())));
    let double = Value::WriterFn(WriterFn::SelfAppend);
    let inner = Program::bind(
        Program::leaf(base(RwsCommand::Gets(Lambda::apply_param(g)))),
        Ty::maybe(Ty::Wr),
        move |m| {
            let erase = erase.clone();
            let double = double.clone();
            Ok(Program::op(
                Ext::Branch(BranchCommand::Maybe {
                    scrutinee: m,
                    elem_ty: Ty::Wr,
                }),
                move |arg| match arg {
                    Value::Just(w) => Ok(Program::then(
                        Program::leaf(base(RwsCommand::Tell(Value::List(vec![*w])))),
                        Ty::Unit,
                        Program::ret(Value::pair(Value::Unit, erase.clone())),
                    )),
                    Value::Nothing => Ok(Program::ret(Value::pair(Value::Unit, double.clone()))),
                    other => Err(Error::Symbolic(format!("maybe on `{other}`"))),
                },
            ))
        },
    );
    Program::with_sub(base(RwsCommand::Pass), inner)
}

/// `(and (eq pre-state post-state) (eq 0 (length output)))`.
pub fn prog_post() -> Formula {
    Formula::and(vec![
        Formula::atom(Value::sym(vars::PRE_STATE), Value::sym(vars::POST_STATE)),
        Formula::atom(Value::Nat(0), Value::Neutral(Head::Length, vec![Value::sym(vars::OUTPUT)])),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{post_of_formula, run, wp};
    use crate::formula::{eval_formula, EvalCtx};
    use crate::values::{Bounds, Env};

    fn i0() -> RwsInput {
        RwsInput::new(Value::ev("e0"), Value::st("s0"))
    }

    fn tell(ws: &[&str]) -> RwsProgram {
        Program::leaf(RwsCommand::Tell(Value::List(ws.iter().map(|w| Value::wr(w)).collect())))
    }

    #[test]
    fn return_unit() {
        let out = run(&Rws, &Program::ret(Value::Unit), &i0()).unwrap();
        assert_eq!(out, RwsOutput::new(Value::Unit, Value::st("s0"), Value::nil()));
    }

    #[test]
    fn outputs_concatenate() {
        let m = Program::then(tell(&["w0"]), Ty::Unit, tell(&["w0"]));
        let out = run(&Rws, &m, &i0()).unwrap();
        assert_eq!(out.output, Value::List(vec![Value::wr("w0"); 2]));
    }

    #[test]
    fn pass_erasing_what_was_emitted() {
        let erase = Value::WriterFn(WriterFn::ConstList(Box::new(Value::nil())));
        let sub = Program::then(tell(&["w0"]), Ty::Unit, Program::ret(Value::pair(Value::Unit, erase)));
        let m = Program::with_sub(RwsCommand::Pass, sub);
        assert_eq!(run(&Rws, &m, &i0()).unwrap(), RwsOutput::new(Value::Unit, Value::st("s0"), Value::nil()));
    }

    #[test]
    fn pass_self_append_on_empty_output() {
        let sub = Program::ret(Value::pair(Value::wr("w1"), Value::WriterFn(WriterFn::SelfAppend)));
        let m = Program::with_sub(RwsCommand::Pass, sub);
        assert_eq!(run(&Rws, &m, &i0()).unwrap(), RwsOutput::new(Value::wr("w1"), Value::st("s0"), Value::nil()));
    }

    #[test]
    fn gets_identity_wp() {
        let m: RwsProgram = Program::leaf(RwsCommand::Gets(Lambda::identity()));
        let p = Formula::atom(Value::sym(vars::POST_STATE), Value::st("s0"));
        let f = wp(&Rws, &m, post_of_formula(&Rws, &p), &Rws.symbolic_input(), &mut Fresh::new()).unwrap();
        assert_eq!(f, Formula::atom(Value::sym(vars::PRE_STATE), Value::st("s0")));
    }

    #[test]
    fn tell_wp_is_false_for_empty_output_spec() {
        let d = Domains::default();
        let b = Bounds::default();
        let f = wp(&Rws, &tell(&["w0"]), post_of_formula(&Rws, &prog_post()), &Rws.symbolic_input(), &mut Fresh::new())
            .unwrap();
        let env: Env = Rws.input_vars(&RwsInput::new(Value::ev("e0"), Value::st("s0"))).into_iter().collect();
        assert!(!eval_formula(&f, &env, &EvalCtx::new(&d, &b)).unwrap());
    }

    #[test]
    fn bind_wp_aliases_result() {
        // gets id >>= return, against result ≡ s0
        let m: RwsProgram = Program::bind(Program::leaf(RwsCommand::Gets(Lambda::identity())), Ty::St, |x| {
            Ok(Program::ret(x))
        });
        let p = Formula::atom(Value::sym(vars::RESULT), Value::st("s0"));
        let f = wp(&Rws, &m, post_of_formula(&Rws, &p), &Rws.symbolic_input(), &mut Fresh::new()).unwrap();
        assert_eq!(f.to_string(), "(r : St) → r ≡ pre-state → r ≡ s0");
        let d = Domains::new(&["s0", "s1"], &["e0"], &["w0"]).unwrap();
        let b = Bounds::default();
        let ctx = EvalCtx::new(&d, &b);
        for (s, want) in [("s0", true), ("s1", false)] {
            let env: Env = Rws.input_vars(&RwsInput::new(Value::ev("e0"), Value::st(s))).into_iter().collect();
            assert_eq!(eval_formula(&f, &env, &ctx).unwrap(), want);
        }
    }

    #[test]
    fn bind_post_examples() {
        let d = Domains::new(&["s0"], &["e0"], &["w0", "w1"]).unwrap();
        let b = Bounds::default();
        let ctx = EvalCtx::new(&d, &b);
        let at = |outs: Value, p: Formula, o: Value| {
            let post = rws_bind_post(outs, post_of_formula(&Rws, &p));
            let f = post(&RwsOutput::new(Value::Unit, Value::st("s0"), o), &mut Fresh::new()).unwrap();
            eval_formula(&f, &Env::new(), &ctx).unwrap()
        };
        let w = |s: &str| Value::List(vec![Value::wr(s)]);
        let len0 = Formula::atom(Value::Nat(0), Value::Neutral(Head::Length, vec![Value::sym(vars::OUTPUT)]));
        assert!(!at(w("w0"), len0, w("w1")));
        assert!(at(w("w0"), Formula::atom(Value::sym(vars::OUTPUT), w("w0")), Value::nil()));
    }

    #[test]
    fn pass_post_examples() {
        let d = Domains::new(&["s0"], &["e0"], &["w0"]).unwrap();
        let b = Bounds::default();
        let ctx = EvalCtx::new(&d, &b);
        let w0 = Value::List(vec![Value::wr("w0")]);
        let cases = [
            (WriterFn::ConstList(Box::new(Value::nil())), w0.clone(), Value::nil()),
            (WriterFn::Id, Value::nil(), Value::nil()),
            (WriterFn::SelfAppend, w0.clone(), Value::List(vec![Value::wr("w0"); 2])),
        ];
        for (wf, o, expect) in cases {
            let p = Formula::atom(Value::sym(vars::OUTPUT), expect);
            let post = rws_pass_post(post_of_formula(&Rws, &p));
            let res = Value::pair(Value::Unit, Value::WriterFn(wf));
            let f = post(&RwsOutput::new(res, Value::st("s0"), o), &mut Fresh::new()).unwrap();
            assert!(eval_formula(&f, &Env::new(), &ctx).unwrap());
        }
    }
}
