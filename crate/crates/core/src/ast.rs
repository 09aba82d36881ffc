//! Effectful programs as a deep-embedded AST with host-language
//! continuations, the effect-theory interface, the generic interpreter and
//! the generic weakest-precondition recursion.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::names::Family;
use crate::formula::Formula;
use crate::values::{Domains, Name, Ty, Value};

/// Continuations and sub-program families.
pub type Cont<C> = Arc<dyn Fn(Value) -> Result<Program<C>> + Send + Sync>;

pub enum Program<C> {
    Return(Value),
    /// `ty` is the result type of `m`, the type of the value `k` receives.
    Bind { m: Arc<Program<C>>, ty: Ty, k: Cont<C> },
    Op { cmd: C, subs: Cont<C> },
}

impl<C: Clone> Clone for Program<C> {
    fn clone(&self) -> Self {
        match self {
            Program::Return(v) => Program::Return(v.clone()),
            Program::Bind { m, ty, k } => Program::Bind {
                m: m.clone(),
                ty: ty.clone(),
                k: k.clone(),
            },
            Program::Op { cmd, subs } => Program::Op {
                cmd: cmd.clone(),
                subs: subs.clone(),
            },
        }
    }
}

impl<C: fmt::Debug> fmt::Debug for Program<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Program::Return(v) => write!(f, "Return({v})"),
            Program::Bind { m, ty, .. } => write!(f, "Bind({m:?} : {ty}, <k>)"),
            Program::Op { cmd, .. } => write!(f, "Op({cmd:?}, <subs>)"),
        }
    }
}

impl<C> Program<C> {
    pub fn ret(v: Value) -> Program<C> {
        Program::Return(v)
    }

    pub fn bind(m: Program<C>, ty: Ty, k: impl Fn(Value) -> Result<Program<C>> + Send + Sync + 'static) -> Program<C> {
        Program::Bind {
            m: Arc::new(m),
            ty,
            k: Arc::new(k),
        }
    }

    pub fn op(cmd: C, subs: impl Fn(Value) -> Result<Program<C>> + Send + Sync + 'static) -> Program<C> {
        Program::Op {
            cmd,
            subs: Arc::new(subs),
        }
    }

    /// A command with no sub-programs.
    pub fn leaf(cmd: C) -> Program<C> {
        Program::op(cmd, |_| Err(Error::Theory("command has no sub-programs".into())))
    }

    /// A command with one sub-program, reached with sub-argument `unit`.
    pub fn with_sub(cmd: C, sub: Program<C>) -> Program<C>
    where
        C: Clone + Send + Sync + 'static,
    {
        Program::op(cmd, move |_| Ok(sub.clone()))
    }

    /// `m >>= λ _ → m'`.
    pub fn then(m: Program<C>, ty: Ty, next: Program<C>) -> Program<C>
    where
        C: Clone + Send + Sync + 'static,
    {
        Program::bind(m, ty, move |_| Ok(next.clone()))
    }
}

/// Source of bound-variable names. Each family keeps its own counter; the
/// seed offsets every counter, and reserved names are skipped.
#[derive(Clone, Debug, Default)]
pub struct Fresh {
    seed: usize,
    counters: HashMap<String, usize>,
    reserved: BTreeSet<Name>,
}

impl Fresh {
    pub fn new() -> Fresh {
        Fresh::default()
    }

    pub fn with_seed(seed: usize) -> Fresh {
        Fresh {
            seed,
            ..Fresh::default()
        }
    }

    pub fn reserve<I: IntoIterator<Item = Name>>(&mut self, names: I) {
        self.reserved.extend(names);
    }

    /// Next unused member of `hint`'s family.
    pub fn next(&mut self, hint: &str) -> Name {
        let fam = Family::of(hint);
        let counter = self.counters.entry(fam.nth(0).to_string()).or_insert(0);
        loop {
            let candidate = fam.nth(self.seed + *counter);
            *counter += 1;
            if !self.reserved.contains(&candidate) {
                return candidate;
            }
        }
    }
}

/// Postconditions over a theory's outputs.
pub type Post<'a, O> = Rc<dyn Fn(&O, &mut Fresh) -> Result<Formula> + 'a>;

/// The predicate transformer of a continuation or sub-program family:
/// given the argument value, a postcondition and an input, its precondition.
pub type PtFamily<'a, I, O> = Rc<dyn Fn(Value, Post<'a, O>, &I, &mut Fresh) -> Result<Formula> + 'a>;

/// Callback running a sub-program (or continuation) at an argument and input.
pub type RunSub<'r, I, O> = &'r mut dyn FnMut(Value, &I) -> Result<O>;

/// A command set together with its operational and predicate-transformer
/// semantics.
pub trait EffectTheory: Sync {
    type Cmd: Clone + fmt::Debug + Send + Sync + 'static;
    type Input: Clone + fmt::Debug + Send + Sync;
    type Output: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn name(&self) -> &str;

    fn run_return(&self, v: Value, i: &Self::Input) -> Result<Self::Output>;

    /// Sequencing: `first` is the output of the bound program; `k` runs the
    /// continuation.
    fn run_bind(
        &self,
        first: Self::Output,
        i: &Self::Input,
        k: RunSub<'_, Self::Input, Self::Output>,
    ) -> Result<Self::Output>;

    fn run_command(
        &self,
        cmd: &Self::Cmd,
        i: &Self::Input,
        run_sub: RunSub<'_, Self::Input, Self::Output>,
    ) -> Result<Self::Output>;

    fn return_pt<'a>(
        &'a self,
        v: Value,
        post: Post<'a, Self::Output>,
        i: &Self::Input,
        fresh: &mut Fresh,
    ) -> Result<Formula>;

    fn bind_pt<'a>(
        &'a self,
        ty: &Ty,
        k: PtFamily<'a, Self::Input, Self::Output>,
        i: &Self::Input,
        post: Post<'a, Self::Output>,
    ) -> Post<'a, Self::Output>;

    fn op_pt<'a>(
        &'a self,
        cmd: &Self::Cmd,
        subs: PtFamily<'a, Self::Input, Self::Output>,
        post: Post<'a, Self::Output>,
        i: &Self::Input,
        fresh: &mut Fresh,
    ) -> Result<Formula>;

    fn is_branch(&self, _cmd: &Self::Cmd) -> bool {
        false
    }

    /// Values of `pre-env`, `pre-state` for an input.
    fn input_vars(&self, i: &Self::Input) -> Vec<(Name, Value)>;

    /// Values of `result`, `post-state`, `output` for an output.
    fn output_vars(&self, o: &Self::Output) -> Vec<(Name, Value)>;

    /// The input whose components are the symbols `pre-env`, `pre-state`.
    fn symbolic_input(&self) -> Self::Input;

    fn enumerate_inputs(&self, domains: &Domains) -> Vec<Self::Input>;
}

pub fn run<T: EffectTheory>(theory: &T, m: &Program<T::Cmd>, i: &T::Input) -> Result<T::Output> {
    run_observed(theory, m, i, &mut |_| {})
}

/// `run`, reporting every command reached to `observe`.
pub fn run_observed<T: EffectTheory>(
    theory: &T,
    m: &Program<T::Cmd>,
    i: &T::Input,
    observe: &mut dyn FnMut(&T::Cmd),
) -> Result<T::Output> {
    match m {
        Program::Return(v) => {
            if !v.is_concrete() {
                return Err(Error::Symbolic(format!("returned `{v}`")));
            }
            theory.run_return(v.clone(), i)
        }
        Program::Bind { m, k, .. } => {
            let first = run_observed(theory, m, i, observe)?;
            theory.run_bind(first, i, &mut |x, i2| run_observed(theory, &k(x)?, i2, observe))
        }
        Program::Op { cmd, subs } => {
            observe(cmd);
            theory.run_command(cmd, i, &mut |arg, i2| run_observed(theory, &subs(arg)?, i2, observe))
        }
    }
}

/// Weakest precondition of `m` for `post` at (possibly symbolic) input `i`.
pub fn wp<'a, T: EffectTheory>(
    theory: &'a T,
    m: &Program<T::Cmd>,
    post: Post<'a, T::Output>,
    i: &T::Input,
    fresh: &mut Fresh,
) -> Result<Formula> {
    match m {
        Program::Return(v) => theory.return_pt(v.clone(), post, i, fresh),
        Program::Bind { m, ty, k } => {
            let post = theory.bind_pt(ty, family(theory, k.clone()), i, post);
            wp(theory, m, post, i, fresh)
        }
        Program::Op { cmd, subs } => theory.op_pt(cmd, family(theory, subs.clone()), post, i, fresh),
    }
}

fn family<'a, T: EffectTheory>(theory: &'a T, k: Cont<T::Cmd>) -> PtFamily<'a, T::Input, T::Output> {
    Rc::new(move |v, post, i, fresh| wp(theory, &k(v)?, post, i, fresh))
}

/// Turns a formula over the distinguished output variables into a
/// postcondition. `pre-env`/`pre-state` stay symbolic.
pub fn post_of_formula<'a, T: EffectTheory>(theory: &'a T, f: &Formula) -> Post<'a, T::Output> {
    let f = f.clone();
    Rc::new(move |o, _| f.subst(&theory.output_vars(o)))
}

/// True iff no branching command is reached on any probe input.
pub fn is_branch_free<T: EffectTheory>(theory: &T, m: &Program<T::Cmd>, probes: &[T::Input]) -> Result<bool> {
    for i in probes {
        let mut branched = false;
        run_observed(theory, m, i, &mut |c| branched |= theory.is_branch(c))?;
        if branched {
            return Ok(false);
        }
    }
    Ok(true)
}
