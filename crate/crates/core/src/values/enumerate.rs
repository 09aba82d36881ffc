//! Finite carriers and deterministic enumeration of their values.
//!
//! Order: atoms in declaration order; `false` before `true`; `Nothing`
//! before `Just`; `Left` before `Right`; pairs lexicographically; lists by
//! length, then lexicographically. Function tables vary their last domain
//! entry fastest.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use super::value::{name, FnTable, Name, Value};
use super::Ty;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Carrier {
    St,
    Ev,
    Wr,
}

impl Carrier {
    pub fn atom(self, n: Name) -> Value {
        match self {
            Carrier::St => Value::St(n),
            Carrier::Ev => Value::Ev(n),
            Carrier::Wr => Value::Wr(n),
        }
    }

    pub fn ty(self) -> Ty {
        match self {
            Carrier::St => Ty::St,
            Carrier::Ev => Ty::Ev,
            Carrier::Wr => Ty::Wr,
        }
    }

    pub fn parse(s: &str) -> Option<Carrier> {
        match s {
            "St" => Some(Carrier::St),
            "Ev" => Some(Carrier::Ev),
            "Wr" => Some(Carrier::Wr),
            _ => None,
        }
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.ty(), f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CarrierDecl {
    pub carrier: Carrier,
    pub atoms: Vec<Name>,
}

impl CarrierDecl {
    pub fn new(carrier: Carrier, atoms: &[&str]) -> Result<CarrierDecl> {
        let decl = CarrierDecl {
            carrier,
            atoms: atoms.iter().map(|a| name(a)).collect(),
        };
        decl.validate()?;
        Ok(decl)
    }

    pub fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() {
            return Err(Error::Carrier(format!("{} has no atoms", self.carrier)));
        }
        let mut seen = HashSet::new();
        for a in &self.atoms {
            if !seen.insert(a) {
                return Err(Error::Carrier(format!("duplicate atom `{a}` in {}", self.carrier)));
            }
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<Value> {
        self.atoms.iter().map(|a| self.carrier.atom(a.clone())).collect()
    }
}

/// The three declared carriers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Domains {
    pub st: CarrierDecl,
    pub ev: CarrierDecl,
    pub wr: CarrierDecl,
}

impl Domains {
    pub fn new(st: &[&str], ev: &[&str], wr: &[&str]) -> Result<Domains> {
        let d = Domains {
            st: CarrierDecl::new(Carrier::St, st)?,
            ev: CarrierDecl::new(Carrier::Ev, ev)?,
            wr: CarrierDecl::new(Carrier::Wr, wr)?,
        };
        d.validate()?;
        Ok(d)
    }

    /// Atom names must be unique across all carriers.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for decl in [&self.st, &self.ev, &self.wr] {
            decl.validate()?;
            for a in &decl.atoms {
                if !seen.insert(a.clone()) {
                    return Err(Error::Carrier(format!("atom `{a}` declared in more than one carrier")));
                }
            }
        }
        Ok(())
    }

    pub fn decl(&self, c: Carrier) -> &CarrierDecl {
        match c {
            Carrier::St => &self.st,
            Carrier::Ev => &self.ev,
            Carrier::Wr => &self.wr,
        }
    }

    pub fn resolve_atom(&self, s: &str) -> Option<Value> {
        [&self.st, &self.ev, &self.wr]
            .into_iter()
            .find(|d| d.atoms.iter().any(|a| &**a == s))
            .map(|d| d.carrier.atom(name(s)))
    }
}

impl Default for Domains {
    /// One atom per carrier: `s0`, `e0`, `w0`.
    fn default() -> Self {
        Domains::new(&["s0"], &["e0"], &["w0"]).expect("default carriers are valid")
    }
}

/// Size limits for enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub max_list_len: usize,
    pub nat_max: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_list_len: 4,
            nat_max: 64,
        }
    }
}

/// Every value of `ty` within `bounds`, each exactly once.
pub fn enumerate_carrier(ty: &Ty, domains: &Domains, bounds: &Bounds) -> Result<Vec<Value>> {
    Ok(match ty {
        Ty::Unit => vec![Value::Unit],
        Ty::Bool => vec![Value::Bool(false), Value::Bool(true)],
        Ty::Nat => (0..=bounds.nat_max).map(Value::Nat).collect(),
        Ty::St => domains.st.values(),
        Ty::Ev => domains.ev.values(),
        Ty::Wr => domains.wr.values(),
        Ty::Maybe(t) => {
            let mut out = vec![Value::Nothing];
            out.extend(enumerate_carrier(t, domains, bounds)?.into_iter().map(Value::just));
            out
        }
        Ty::Either(l, r) => {
            let mut out: Vec<Value> = enumerate_carrier(l, domains, bounds)?.into_iter().map(Value::left).collect();
            out.extend(enumerate_carrier(r, domains, bounds)?.into_iter().map(Value::right));
            out
        }
        Ty::Pair(a, b) => {
            let bs = enumerate_carrier(b, domains, bounds)?;
            let mut out = Vec::new();
            for x in enumerate_carrier(a, domains, bounds)? {
                for y in &bs {
                    out.push(Value::pair(x.clone(), y.clone()));
                }
            }
            out
        }
        Ty::List(t) => {
            let elems = enumerate_carrier(t, domains, bounds)?;
            let mut out = vec![Value::nil()];
            let mut layer: Vec<Vec<Value>> = vec![Vec::new()];
            for _ in 0..bounds.max_list_len {
                let mut next = Vec::with_capacity(layer.len() * elems.len());
                for prefix in &layer {
                    for e in &elems {
                        let mut l = prefix.clone();
                        l.push(e.clone());
                        next.push(l);
                    }
                }
                out.extend(next.iter().cloned().map(Value::List));
                layer = next;
            }
            out
        }
        Ty::WriterFn => {
            return Err(Error::NonEnumerable(
                "writer transformers have no finite enumeration".into(),
            ))
        }
        Ty::Fn(..) => {
            return Err(Error::NonEnumerable(format!(
                "function type `{ty}` (declare it as a parameter to quantify over tables)"
            )))
        }
    })
}

/// Closed-form size of [`enumerate_carrier`]'s output.
pub fn carrier_size(ty: &Ty, domains: &Domains, bounds: &Bounds) -> Result<u128> {
    Ok(match ty {
        Ty::Unit => 1,
        Ty::Bool => 2,
        Ty::Nat => bounds.nat_max as u128 + 1,
        Ty::St => domains.st.atoms.len() as u128,
        Ty::Ev => domains.ev.atoms.len() as u128,
        Ty::Wr => domains.wr.atoms.len() as u128,
        Ty::Maybe(t) => 1 + carrier_size(t, domains, bounds)?,
        Ty::Either(l, r) => carrier_size(l, domains, bounds)? + carrier_size(r, domains, bounds)?,
        Ty::Pair(a, b) => carrier_size(a, domains, bounds)? * carrier_size(b, domains, bounds)?,
        Ty::List(t) => {
            let n = carrier_size(t, domains, bounds)?;
            (0..=bounds.max_list_len as u32).map(|k| n.pow(k)).sum()
        }
        Ty::WriterFn | Ty::Fn(..) => return Err(Error::NonEnumerable(ty.to_string())),
    })
}

/// All `|codomain|^|domain|` total tables, each exactly once.
pub fn enumerate_fn_tables(dom: &Ty, cod: &Ty, domains: &Domains, bounds: &Bounds) -> Result<Vec<FnTable>> {
    let keys = enumerate_carrier(dom, domains, bounds)?;
    let vals = enumerate_carrier(cod, domains, bounds)?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; keys.len()];
    loop {
        out.push(FnTable {
            domain: dom.clone(),
            codomain: cod.clone(),
            entries: keys.iter().cloned().zip(idx.iter().map(|&i| vals[i].clone())).collect(),
        });
        // odometer, last position fastest
        let mut pos = keys.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < vals.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Tables wrapped as values, ready to bind to a parameter.
pub fn enumerate_fn_values(dom: &Ty, cod: &Ty, domains: &Domains, bounds: &Bounds) -> Result<Vec<Value>> {
    Ok(enumerate_fn_tables(dom, cod, domains, bounds)?
        .into_iter()
        .map(|t| Value::Table(Arc::new(t)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn doms(st: &[&str], wr: &[&str]) -> Domains {
        Domains::new(st, &["e0"], wr).unwrap()
    }

    #[test]
    fn maybe_wr_has_nothing_first() {
        let d = doms(&["s0"], &["w0"]);
        let vs = enumerate_carrier(&Ty::maybe(Ty::Wr), &d, &Bounds::default()).unwrap();
        assert_eq!(vs, vec![Value::Nothing, Value::just(Value::wr("w0"))]);
    }

    #[test]
    fn bool_false_first() {
        let d = Domains::default();
        assert_eq!(
            enumerate_carrier(&Ty::Bool, &d, &Bounds::default()).unwrap(),
            vec![Value::Bool(false), Value::Bool(true)]
        );
    }

    #[test]
    fn bounded_lists_length_then_lex() {
        let d = doms(&["s0"], &["w0"]);
        let b = Bounds {
            max_list_len: 2,
            ..Bounds::default()
        };
        let vs = enumerate_carrier(&Ty::list(Ty::Wr), &d, &b).unwrap();
        let w0 = Value::wr("w0");
        assert_eq!(
            vs,
            vec![Value::nil(), Value::List(vec![w0.clone()]), Value::List(vec![w0.clone(), w0])]
        );
    }

    // Independent count: brute-force product over the domain.
    fn brute_table_count(dom: usize, cod: usize) -> usize {
        (0..dom).fold(1, |acc, _| acc * cod)
    }

    #[test]
    fn fn_table_counts() {
        let b = Bounds::default();
        let d = doms(&["s0", "s1"], &["w0"]);
        let t = enumerate_fn_tables(&Ty::St, &Ty::maybe(Ty::Wr), &d, &b).unwrap();
        assert_eq!(t.len(), brute_table_count(2, 2));
        assert_eq!(t.len(), 4);

        let d = doms(&["s0"], &["w0"]);
        assert_eq!(enumerate_fn_tables(&Ty::St, &Ty::Bool, &d, &b).unwrap().len(), 2);

        let d = doms(&["s0", "s1", "s2"], &["w0", "w1", "w2"]);
        let t = enumerate_fn_tables(&Ty::St, &Ty::maybe(Ty::Wr), &d, &b).unwrap();
        assert_eq!(t.len(), brute_table_count(3, 4));
        assert_eq!(t.len(), 64);
        let distinct: HashSet<_> = t.iter().map(|t| t.entries.clone()).collect();
        assert_eq!(distinct.len(), 64);
    }

    #[test]
    fn functions_are_not_enumerable() {
        let d = Domains::default();
        let b = Bounds::default();
        assert!(enumerate_carrier(&Ty::WriterFn, &d, &b).is_err());
        assert!(enumerate_carrier(&Ty::func(Ty::St, Ty::St), &d, &b).is_err());
    }

    #[test]
    fn carrier_rejects_duplicates_and_empty() {
        assert!(CarrierDecl::new(Carrier::St, &[]).is_err());
        assert!(CarrierDecl::new(Carrier::St, &["s0", "s0"]).is_err());
        assert!(Domains::new(&["a"], &["a"], &["w0"]).is_err());
    }
}
