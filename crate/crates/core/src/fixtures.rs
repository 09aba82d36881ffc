//! Deliberately corrupted theories. A correct checker must reject both.


use crate::ast::{EffectTheory, Fresh, Post, PtFamily, RunSub};
use crate::branching::{branch_pt, BranchCommand, Branching, Ext};
use crate::error::Result;
use crate::formula::{vars, Atom, Formula};
use crate::rws::{Rws, RwsCommand, RwsInput, RwsOutput};
use crate::values::{Domains, Name, Ty, Value};

static RWS: Rws = Rws;

/// RWS whose `gets` rule reads the initial state instead of the current one.
#[derive(Clone, Copy, Debug, Default)]
pub struct BrokenGets;

impl EffectTheory for BrokenGets {
    type Cmd = RwsCommand;
    type Input = RwsInput;
    type Output = RwsOutput;

    fn name(&self) -> &str {
        "broken-gets"
    }

    fn run_return(&self, v: Value, i: &RwsInput) -> Result<RwsOutput> {
        RWS.run_return(v, i)
    }

    fn run_bind(&self, first: RwsOutput, i: &RwsInput, k: RunSub<'_, RwsInput, RwsOutput>) -> Result<RwsOutput> {
        RWS.run_bind(first, i, k)
    }

    fn run_command(&self, cmd: &RwsCommand, i: &RwsInput, run_sub: RunSub<'_, RwsInput, RwsOutput>) -> Result<RwsOutput> {
        RWS.run_command(cmd, i, run_sub)
    }

    fn return_pt<'a>(&'a self, v: Value, post: Post<'a, RwsOutput>, i: &RwsInput, fresh: &mut Fresh) -> Result<Formula> {
        RWS.return_pt(v, post, i, fresh)
    }

    fn bind_pt<'a>(
        &'a self,
        ty: &Ty,
        k: PtFamily<'a, RwsInput, RwsOutput>,
        i: &RwsInput,
        post: Post<'a, RwsOutput>,
    ) -> Post<'a, RwsOutput> {
        RWS.bind_pt(ty, k, i, post)
    }

    fn op_pt<'a>(
        &'a self,
        cmd: &RwsCommand,
        subs: PtFamily<'a, RwsInput, RwsOutput>,
        post: Post<'a, RwsOutput>,
        i: &RwsInput,
        fresh: &mut Fresh,
    ) -> Result<Formula> {
        match cmd {
            RwsCommand::Gets(g) => {
                let s0 = Value::sym(vars::PRE_STATE);
                post(&RwsOutput::new(g.call(&s0)?, s0, Value::nil()), fresh)
            }
            other => RWS.op_pt(other, subs, post, i, fresh),
        }
    }

    fn input_vars(&self, i: &RwsInput) -> Vec<(Name, Value)> {
        RWS.input_vars(i)
    }

    fn output_vars(&self, o: &RwsOutput) -> Vec<(Name, Value)> {
        RWS.output_vars(o)
    }

    fn symbolic_input(&self) -> RwsInput {
        RWS.symbolic_input()
    }

    fn enumerate_inputs(&self, domains: &Domains) -> Vec<RwsInput> {
        RWS.enumerate_inputs(domains)
    }
}

/// Branching over RWS whose `if` rule attaches each branch to the other
/// branch's guard.
#[derive(Clone, Copy, Debug, Default)]
pub struct SwappedIf {
    inner: Branching<Rws>,
}

impl EffectTheory for SwappedIf {
    type Cmd = Ext<RwsCommand>;
    type Input = RwsInput;
    type Output = RwsOutput;

    fn name(&self) -> &str {
        "broken-if"
    }

    fn run_return(&self, v: Value, i: &RwsInput) -> Result<RwsOutput> {
        self.inner.run_return(v, i)
    }

    fn run_bind(&self, first: RwsOutput, i: &RwsInput, k: RunSub<'_, RwsInput, RwsOutput>) -> Result<RwsOutput> {
        self.inner.run_bind(first, i, k)
    }

    fn run_command(&self, cmd: &Self::Cmd, i: &RwsInput, run_sub: RunSub<'_, RwsInput, RwsOutput>) -> Result<RwsOutput> {
        self.inner.run_command(cmd, i, run_sub)
    }

    fn return_pt<'a>(&'a self, v: Value, post: Post<'a, RwsOutput>, i: &RwsInput, fresh: &mut Fresh) -> Result<Formula> {
        self.inner.return_pt(v, post, i, fresh)
    }

    fn bind_pt<'a>(
        &'a self,
        ty: &Ty,
        k: PtFamily<'a, RwsInput, RwsOutput>,
        i: &RwsInput,
        post: Post<'a, RwsOutput>,
    ) -> Post<'a, RwsOutput> {
        self.inner.bind_pt(ty, k, i, post)
    }

    fn op_pt<'a>(
        &'a self,
        cmd: &Self::Cmd,
        subs: PtFamily<'a, RwsInput, RwsOutput>,
        post: Post<'a, RwsOutput>,
        i: &RwsInput,
        fresh: &mut Fresh,
    ) -> Result<Formula> {
        match cmd {
            Ext::Branch(BranchCommand::If { scrutinee }) => {
                let t = subs(Value::Bool(true), post.clone(), i, fresh)?;
                let f = subs(Value::Bool(false), post, i, fresh)?;
                Ok(Formula::and(vec![
                    Formula::implies(Atom::eq(scrutinee.clone(), Value::Bool(true)), f),
                    Formula::implies(Atom::eq(scrutinee.clone(), Value::Bool(false)), t),
                ]))
            }
            Ext::Branch(b) => branch_pt(b, &subs, &post, i, fresh),
            base => self.inner.op_pt(base, subs, post, i, fresh),
        }
    }

    fn is_branch(&self, cmd: &Self::Cmd) -> bool {
        self.inner.is_branch(cmd)
    }

    fn input_vars(&self, i: &RwsInput) -> Vec<(Name, Value)> {
        self.inner.input_vars(i)
    }

    fn output_vars(&self, o: &RwsOutput) -> Vec<(Name, Value)> {
        self.inner.output_vars(o)
    }

    fn symbolic_input(&self) -> RwsInput {
        self.inner.symbolic_input()
    }

    fn enumerate_inputs(&self, domains: &Domains) -> Vec<RwsInput> {
        self.inner.enumerate_inputs(domains)
    }
}
