use std::fmt;

/// Type descriptors for the closed value universe.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    Unit,
    Bool,
    Nat,
    Wr,
    St,
    Ev,
    List(Box<Ty>),
    Pair(Box<Ty>, Box<Ty>),
    Either(Box<Ty>, Box<Ty>),
    Maybe(Box<Ty>),
    /// `List Wr → List Wr`, the writer transformers returned to `pass`.
    WriterFn,
    Fn(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn list(t: Ty) -> Ty {
        Ty::List(Box::new(t))
    }

    pub fn maybe(t: Ty) -> Ty {
        Ty::Maybe(Box::new(t))
    }

    pub fn either(l: Ty, r: Ty) -> Ty {
        Ty::Either(Box::new(l), Box::new(r))
    }

    pub fn pair(a: Ty, b: Ty) -> Ty {
        Ty::Pair(Box::new(a), Box::new(b))
    }

    /// Function types; `List Wr → List Wr` collapses to [`Ty::WriterFn`].
    pub fn func(dom: Ty, cod: Ty) -> Ty {
        let wr_list = Ty::list(Ty::Wr);
        if dom == wr_list && cod == wr_list {
            Ty::WriterFn
        } else {
            Ty::Fn(Box::new(dom), Box::new(cod))
        }
    }

    pub fn output() -> Ty {
        Ty::list(Ty::Wr)
    }

    fn is_simple(&self) -> bool {
        matches!(
            self,
            Ty::Unit | Ty::Bool | Ty::Nat | Ty::Wr | Ty::St | Ty::Ev
        )
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // prec 0: anything, 1: operand of ×, 2: argument of a type constructor
        match self {
            Ty::Unit => f.write_str("Unit"),
            Ty::Bool => f.write_str("Bool"),
            Ty::Nat => f.write_str("Nat"),
            Ty::Wr => f.write_str("Wr"),
            Ty::St => f.write_str("St"),
            Ty::Ev => f.write_str("Ev"),
            Ty::List(t) | Ty::Maybe(t) => {
                let name = if matches!(self, Ty::List(_)) { "List" } else { "Maybe" };
                if prec >= 2 {
                    f.write_str("(")?;
                }
                write!(f, "{name} ")?;
                t.fmt_prec(f, 2)?;
                if prec >= 2 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Ty::Either(l, r) => {
                if prec >= 2 {
                    f.write_str("(")?;
                }
                f.write_str("Either ")?;
                l.fmt_prec(f, 2)?;
                f.write_str(" ")?;
                r.fmt_prec(f, 2)?;
                if prec >= 2 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Ty::Pair(a, b) => {
                if prec >= 1 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" × ")?;
                b.fmt_prec(f, 1)?;
                if prec >= 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Ty::WriterFn => f.write_str("(List Wr → List Wr)"),
            Ty::Fn(a, b) => {
                if prec >= 1 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" → ")?;
                b.fmt_prec(f, 0)?;
                if prec >= 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }

    /// Surface (s-expression) spelling, as accepted by the `.east` parser.
    pub fn to_sexpr(&self) -> String {
        match self {
            Ty::Unit => "unit".to_string(),
            Ty::Bool => "bool".to_string(),
            Ty::Nat => "nat".to_string(),
            t if t.is_simple() => t.to_string(),
            Ty::List(t) => format!("(list {})", t.to_sexpr()),
            Ty::Maybe(t) => format!("(maybe {})", t.to_sexpr()),
            Ty::Either(l, r) => format!("(either {} {})", l.to_sexpr(), r.to_sexpr()),
            Ty::Pair(a, b) => format!("(pair {} {})", a.to_sexpr(), b.to_sexpr()),
            Ty::WriterFn => "wf".to_string(),
            Ty::Fn(a, b) => format!("(fn {} {})", a.to_sexpr(), b.to_sexpr()),
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}
