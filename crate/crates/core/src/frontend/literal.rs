//! Command-line literals: inputs `(e0 s0)` and parameter tables
//! `s0:just-w0,s1:nothing`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::rws::RwsInput;
use crate::values::{enumerate_carrier, Bounds, Domains, FnTable, Ty, Value};

use super::sexpr::{read_one, SExp};

fn bad(msg: String) -> Error {
    Error::Invalid(msg)
}

fn atom_of(domains: &Domains, s: &str, ty: &Ty) -> Result<Value> {
    let v = match s {
        "unit" => Value::Unit,
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        "nothing" => Value::Nothing,
        n if n.chars().all(|c| c.is_ascii_digit()) && !n.is_empty() => {
            Value::Nat(n.parse().map_err(|_| bad(format!("bad number `{n}`")))?)
        }
        other => domains
            .resolve_atom(other)
            .ok_or_else(|| Error::Undeclared {
                kind: "atom",
                name: other.to_string(),
            })?,
    };
    check(v, ty)
}

fn check(v: Value, ty: &Ty) -> Result<Value> {
    let ok = matches!(
        (&v, ty),
        (Value::Unit, Ty::Unit)
            | (Value::Bool(_), Ty::Bool)
            | (Value::Nat(_), Ty::Nat)
            | (Value::St(_), Ty::St)
            | (Value::Ev(_), Ty::Ev)
            | (Value::Wr(_), Ty::Wr)
            | (Value::Nothing, Ty::Maybe(_))
    );
    if ok {
        Ok(v)
    } else {
        Err(Error::Type(format!("`{v}` is not a {ty}")))
    }
}

/// Values in dash notation: `just-w0`, `left-s1`, `nothing`, `w0`.
pub fn parse_dash_value(text: &str, ty: &Ty, domains: &Domains) -> Result<Value> {
    let (head, rest) = match text.split_once('-') {
        Some((h, r)) if matches!(h, "just" | "left" | "right") => (h, Some(r)),
        _ => (text, None),
    };
    match (head, rest, ty) {
        ("just", Some(r), Ty::Maybe(t)) => Ok(Value::just(parse_dash_value(r, t, domains)?)),
        ("left", Some(r), Ty::Either(l, _)) => Ok(Value::left(parse_dash_value(r, l, domains)?)),
        ("right", Some(r), Ty::Either(_, rt)) => Ok(Value::right(parse_dash_value(r, rt, domains)?)),
        (_, Some(_), _) => Err(Error::Type(format!("`{text}` is not a {ty}"))),
        (a, None, _) => atom_of(domains, a, ty),
    }
}

/// Values in s-expression notation, checked against `ty`.
pub fn parse_sexp_value(s: &SExp, ty: &Ty, domains: &Domains) -> Result<Value> {
    if let Some(a) = s.atom() {
        return atom_of(domains, a, ty);
    }
    let xs = s.list().unwrap_or_default();
    let head = s.head().unwrap_or("");
    let arg = |i: usize, t: &Ty| -> Result<Value> {
        let x = xs.get(i).ok_or_else(|| bad(format!("`{head}` is missing an argument")))?;
        parse_sexp_value(x, t, domains)
    };
    let want = |n: usize| -> Result<()> {
        if xs.len() == n + 1 {
            Ok(())
        } else {
            Err(Error::Arity {
                form: head.to_string(),
                expected: n.to_string(),
                found: xs.len().saturating_sub(1),
            })
        }
    };
    match (head, ty) {
        ("just", Ty::Maybe(t)) => want(1).and_then(|_| Ok(Value::just(arg(1, t)?))),
        ("left", Ty::Either(l, _)) => want(1).and_then(|_| Ok(Value::left(arg(1, l)?))),
        ("right", Ty::Either(_, r)) => want(1).and_then(|_| Ok(Value::right(arg(1, r)?))),
        ("pair", Ty::Pair(a, b)) => want(2).and_then(|_| Ok(Value::pair(arg(1, a)?, arg(2, b)?))),
        ("list", Ty::List(t)) => Ok(Value::List(
            (1..xs.len()).map(|i| arg(i, t)).collect::<Result<_>>()?,
        )),
        _ => Err(Error::Type(format!("cannot read `{head}` form as {ty}"))),
    }
}

/// `(e0 s0)`: environment then state.
pub fn parse_input(text: &str, domains: &Domains) -> Result<RwsInput> {
    let s = read_one(text)?;
    match s.list() {
        Some([e, st]) => Ok(RwsInput::new(
            parse_sexp_value(e, &Ty::Ev, domains)?,
            parse_sexp_value(st, &Ty::St, domains)?,
        )),
        _ => Err(bad(format!("expected an input `(env state)`, found `{}`", text.trim()))),
    }
}

/// A total table for a function-typed parameter, either
/// `k:v,k:v` in dash notation or `((k v) (k v))`.
pub fn parse_table(text: &str, dom: &Ty, cod: &Ty, domains: &Domains, bounds: &Bounds) -> Result<Value> {
    let text = text.trim();
    let mut entries: Vec<(Value, Value)> = Vec::new();
    if text.starts_with('(') {
        let s = read_one(text)?;
        for e in s.list().ok_or_else(|| bad("expected a list of entries".into()))? {
            match e.list() {
                Some([k, v]) => entries.push((parse_sexp_value(k, dom, domains)?, parse_sexp_value(v, cod, domains)?)),
                _ => return Err(bad("table entries are `(key value)` pairs".into())),
            }
        }
    } else {
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once(':').ok_or_else(|| bad(format!("entry `{part}` lacks `:`")))?;
            entries.push((parse_dash_value(k.trim(), dom, domains)?, parse_dash_value(v.trim(), cod, domains)?));
        }
    }
    let keys = enumerate_carrier(dom, domains, bounds)?;
    let mut ordered = Vec::with_capacity(keys.len());
    for k in &keys {
        let mut hits = entries.iter().filter(|(e, _)| e == k);
        let v = hits.next().ok_or_else(|| bad(format!("table has no entry for `{k}`")))?;
        if hits.next().is_some() {
            return Err(bad(format!("table has two entries for `{k}`")));
        }
        ordered.push(v.clone());
    }
    if entries.len() != keys.len() {
        return Err(bad("table has entries outside its domain".into()));
    }
    Ok(Value::Table(Arc::new(FnTable {
        domain: dom.clone(),
        codomain: cod.clone(),
        entries: ordered,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> Domains {
        Domains::new(&["s0", "s1"], &["e0"], &["w0"]).unwrap()
    }

    #[test]
    fn inputs() {
        assert_eq!(parse_input("(e0 s1)", &d()).unwrap(), RwsInput::new(Value::ev("e0"), Value::st("s1")));
        assert!(parse_input("(s1 e0)", &d()).is_err());
        assert!(parse_input("(e0)", &d()).is_err());
    }

    #[test]
    fn dash_and_sexp_tables_agree() {
        let mw = Ty::maybe(Ty::Wr);
        let b = Bounds::default();
        let a = parse_table("s0:just-w0,s1:nothing", &Ty::St, &mw, &d(), &b).unwrap();
        let c = parse_table("((s1 nothing) (s0 (just w0)))", &Ty::St, &mw, &d(), &b).unwrap();
        assert_eq!(a, c);
        assert_eq!(a.to_string(), "{s0 ↦ just w0, s1 ↦ nothing}");
    }

    #[test]
    fn partial_or_ill_typed_tables() {
        let mw = Ty::maybe(Ty::Wr);
        let b = Bounds::default();
        assert!(parse_table("s0:just-w0", &Ty::St, &mw, &d(), &b).is_err());
        assert!(parse_table("s0:w0,s1:nothing", &Ty::St, &mw, &d(), &b).is_err());
        assert!(parse_table("s0:nothing,s0:nothing,s1:nothing", &Ty::St, &mw, &d(), &b).is_err());
    }
}
