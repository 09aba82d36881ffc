use crate::values::{CarrierDecl, Expr, Name, Ty};

/// A parsed `.east` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceUnit {
    pub domains: Vec<CarrierDecl>,
    pub params: Vec<(Name, Ty)>,
    pub program: Prog,
    pub specs: Vec<(Name, Spec)>,
}

/// Surface programs. Binders are plain names; `_` binds nothing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prog {
    Return(Expr),
    Bind(Box<Prog>, Name, Box<Prog>),
    Gets(Name, Expr),
    Puts(Name, Expr),
    Tell(Expr),
    Ask,
    Local(Name, Expr, Box<Prog>),
    Pass(Box<Prog>),
    If(Expr, Box<Prog>, Box<Prog>),
    /// `(maybe e (j m) m')`
    Maybe(Expr, Name, Box<Prog>, Box<Prog>),
    /// `(either e (l m) (r m'))`
    Either(Expr, Name, Box<Prog>, Name, Box<Prog>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Spec {
    /// `(and)` and `top` both parse to the empty conjunction.
    And(Vec<Spec>),
    Implies(Expr, Expr, Box<Spec>),
    Eq(Expr, Expr),
    Forall(Name, Ty, Box<Spec>),
    Bottom,
}

impl Prog {
    pub fn bind(m: Prog, x: &str, k: Prog) -> Prog {
        Prog::Bind(Box::new(m), crate::values::name(x), Box::new(k))
    }

    /// Nesting depth of program forms.
    pub fn depth(&self) -> usize {
        1 + match self {
            Prog::Return(_) | Prog::Gets(..) | Prog::Puts(..) | Prog::Tell(_) | Prog::Ask => 0,
            Prog::Local(_, _, m) | Prog::Pass(m) => m.depth(),
            Prog::Bind(m, _, k) | Prog::If(_, m, k) | Prog::Maybe(_, _, m, k) | Prog::Either(_, _, m, _, k) => {
                m.depth().max(k.depth())
            }
        }
    }

    pub fn has_branch(&self) -> bool {
        match self {
            Prog::If(..) | Prog::Maybe(..) | Prog::Either(..) => true,
            Prog::Bind(m, _, k) => m.has_branch() || k.has_branch(),
            Prog::Local(_, _, m) | Prog::Pass(m) => m.has_branch(),
            _ => false,
        }
    }
}

impl Spec {
    pub fn top() -> Spec {
        Spec::And(Vec::new())
    }
}
