//! Reader for the printed obligation notation: `⊤`, `⊥`, `a ≡ b`,
//! `(p) × (q)`, `h → f`, `(x : T) → x ≡ t → f` and `∀ (x : T) → f`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::formula::{Atom, Formula};
use crate::values::{name, Domains, FnTable, Head, Ty, Value, WriterFn};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(u32),
    Sym(&'static str),
}

const SYMBOLS: [&str; 17] = [
    "++", "(", ")", "[", "]", "{", "}", ",", ":", "→", "≡", "×", "∀", "⊤", "⊥", "λ", "∘",
];

fn lex(text: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut rest = text;
    'outer: while let Some(c) = rest.chars().next() {
        if c.is_whitespace() {
            rest = &rest[c.len_utf8()..];
            continue;
        }
        for s in SYMBOLS.iter().chain(["↦"].iter()) {
            if let Some(r) = rest.strip_prefix(s) {
                out.push(Tok::Sym(s));
                rest = r;
                continue 'outer;
            }
        }
        let end = rest
            .char_indices()
            .find(|&(_, c)| !(c.is_alphanumeric() || "-_'".contains(c)))
            .map_or(rest.len(), |(i, _)| i);
        if end == 0 {
            return Err(Error::Invalid(format!("unexpected character `{c}` in formula")));
        }
        let word = &rest[..end];
        if word.chars().all(|c| c.is_ascii_digit()) {
            let n = word.parse().map_err(|_| Error::Invalid(format!("bad number `{word}`")))?;
            out.push(Tok::Num(n));
        } else {
            out.push(Tok::Ident(word.to_string()));
        }
        rest = &rest[end..];
    }
    Ok(out)
}

struct P<'d> {
    toks: Vec<Tok>,
    pos: usize,
    domains: &'d Domains,
}

const KEYWORDS: [&str; 12] = [
    "just", "left", "right", "length", "fst", "snd", "eq", "if", "then", "else", "unit", "nothing",
];

impl P<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn at(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) || matches!(self.peek(), Some(Tok::Ident(t)) if t == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.at(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{s}`")))
        }
    }

    fn error(&self, msg: &str) -> Error {
        let found = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            Some(Tok::Num(n)) => n.to_string(),
            Some(Tok::Sym(s)) => s.to_string(),
            None => "end of input".to_string(),
        };
        Error::Invalid(format!("{msg} at token {} (`{found}`)", self.pos + 1))
    }

    /// Runs `f`, rewinding on failure.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T>) -> Option<T> {
        let save = self.pos;
        match f(self) {
            Ok(v) => Some(v),
            Err(_) => {
                self.pos = save;
                None
            }
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected a name")),
        }
    }

    // formula := ⊤ | ⊥ | binder | atom [→ formula] | conj
    fn formula(&mut self) -> Result<Formula> {
        if self.eat("⊤") {
            return Ok(Formula::Top);
        }
        if self.eat("⊥") {
            return Ok(Formula::Bottom);
        }
        if self.eat("∀") {
            self.expect("(")?;
            let (x, ty) = self.binder_decl()?;
            self.expect("→")?;
            return Ok(Formula::forall(name(&x), ty, self.formula()?));
        }
        if let Some((x, ty)) = self.attempt(|p| {
            p.expect("(")?;
            let d = p.binder_decl()?;
            p.expect("→")?;
            Ok(d)
        }) {
            let guard = self.atom()?;
            self.expect("→")?;
            let body = self.formula()?;
            return Ok(if guard.mentions(&x) {
                Formula::guarded(name(&x), ty, guard, body)
            } else {
                Formula::forall(name(&x), ty, Formula::implies(guard, body))
            });
        }
        if let Some(a) = self.attempt(|p| p.atom()) {
            if self.eat("→") {
                return Ok(Formula::implies(a, self.formula()?));
            }
            return Ok(Formula::Atom(a));
        }
        let mut parts = vec![self.group()?];
        while self.eat("×") {
            parts.push(self.group()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::and(parts) })
    }

    fn group(&mut self) -> Result<Formula> {
        self.expect("(")?;
        let f = self.formula()?;
        self.expect(")")?;
        Ok(f)
    }

    /// `x : T )`, after the opening parenthesis.
    fn binder_decl(&mut self) -> Result<(String, Ty)> {
        let x = self.ident()?;
        self.expect(":")?;
        let ty = self.ty()?;
        self.expect(")")?;
        Ok((x, ty))
    }

    fn atom(&mut self) -> Result<Atom> {
        let l = self.term()?;
        self.expect("≡")?;
        let r = self.term()?;
        Ok(Atom::eq(l, r))
    }

    // ty := prod [→ ty];  prod := tapp [× tapp]
    fn ty(&mut self) -> Result<Ty> {
        let a = self.ty_prod()?;
        if self.eat("→") {
            return Ok(Ty::func(a, self.ty()?));
        }
        Ok(a)
    }

    fn ty_prod(&mut self) -> Result<Ty> {
        let a = self.ty_app()?;
        if self.eat("×") {
            return Ok(Ty::pair(a, self.ty_app()?));
        }
        Ok(a)
    }

    fn ty_app(&mut self) -> Result<Ty> {
        if self.eat("List") {
            return Ok(Ty::list(self.ty_atom()?));
        }
        if self.eat("Maybe") {
            return Ok(Ty::maybe(self.ty_atom()?));
        }
        if self.eat("Either") {
            let l = self.ty_atom()?;
            return Ok(Ty::either(l, self.ty_atom()?));
        }
        self.ty_atom()
    }

    fn ty_atom(&mut self) -> Result<Ty> {
        if self.eat("(") {
            let t = self.ty()?;
            self.expect(")")?;
            return Ok(t);
        }
        let t = match self.peek() {
            Some(Tok::Ident(s)) => match s.as_str() {
                "Unit" => Ty::Unit,
                "Bool" => Ty::Bool,
                "Nat" => Ty::Nat,
                "Wr" => Ty::Wr,
                "St" => Ty::St,
                "Ev" => Ty::Ev,
                _ => return Err(self.error("expected a type")),
            },
            _ => return Err(self.error("expected a type")),
        };
        self.pos += 1;
        Ok(t)
    }

    // term := app [++ term]
    fn term(&mut self) -> Result<Value> {
        let a = self.app()?;
        if self.eat("++") {
            let b = self.term()?;
            return Ok(Value::Neutral(Head::Append, vec![a, b]));
        }
        Ok(a)
    }

    fn app(&mut self) -> Result<Value> {
        for (kw, ctor) in [
            ("just", Value::just as fn(Value) -> Value),
            ("left", Value::left),
            ("right", Value::right),
        ] {
            if self.eat(kw) {
                return Ok(ctor(self.arg()?));
            }
        }
        for (kw, head) in [("length", Head::Length), ("fst", Head::Fst), ("snd", Head::Snd)] {
            if self.eat(kw) {
                return Ok(Value::Neutral(head, vec![self.arg()?]));
            }
        }
        if self.eat("eq") {
            let a = self.arg()?;
            return Ok(Value::Neutral(Head::Eq, vec![a, self.arg()?]));
        }
        let mut f = self.arg()?;
        while let Some(x) = self.attempt(|p| p.arg()) {
            f = Value::Neutral(Head::Apply, vec![f, x]);
        }
        Ok(f)
    }

    fn arg(&mut self) -> Result<Value> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Value::Nat(n))
            }
            Some(Tok::Ident(s)) => {
                let v = match s.as_str() {
                    "unit" => Value::Unit,
                    "true" => Value::Bool(true),
                    "false" => Value::Bool(false),
                    "nothing" => Value::Nothing,
                    kw if KEYWORDS.contains(&kw) => return Err(self.error("unexpected keyword")),
                    other => self.domains.resolve_atom(other).unwrap_or_else(|| Value::sym(other)),
                };
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Sym("[")) => {
                self.pos += 1;
                let mut xs = Vec::new();
                if !self.eat("]") {
                    loop {
                        xs.push(self.term()?);
                        if self.eat("]") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                Ok(Value::List(xs))
            }
            Some(Tok::Sym("{")) => {
                self.pos += 1;
                self.table()
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                self.paren()
            }
            _ => Err(self.error("expected a term")),
        }
    }

    /// After `(`: conditional, lambda, pair, composition or grouping.
    fn paren(&mut self) -> Result<Value> {
        if self.eat("if") {
            let c = self.term()?;
            self.expect("then")?;
            let a = self.term()?;
            self.expect("else")?;
            let b = self.term()?;
            self.expect(")")?;
            return Ok(Value::Neutral(Head::If, vec![c, a, b]));
        }
        if self.eat("λ") {
            let x = if self.eat("_") { None } else { Some(self.ident()?) };
            self.expect("→")?;
            let body = self.term()?;
            self.expect(")")?;
            return Ok(Value::WriterFn(writer_of(x.as_deref(), body).ok_or_else(|| self.error("not a writer transformer"))?));
        }
        let a = self.term()?;
        if self.eat(",") {
            let b = self.term()?;
            self.expect(")")?;
            return Ok(Value::pair(a, b));
        }
        if self.eat("∘") {
            let b = self.term()?;
            self.expect(")")?;
            return Ok(match (a, b) {
                (Value::WriterFn(f), Value::WriterFn(g)) => Value::WriterFn(WriterFn::compose(f, g)),
                (a, b) => Value::Neutral(Head::Compose, vec![a, b]),
            });
        }
        self.expect(")")?;
        Ok(a)
    }

    fn table(&mut self) -> Result<Value> {
        let mut entries = Vec::new();
        if !self.eat("}") {
            loop {
                let k = self.term()?;
                self.expect("↦")?;
                let v = self.term()?;
                entries.push((k, v));
                if self.eat("}") {
                    break;
                }
                self.expect(",")?;
            }
        }
        let guess = |v: Option<&Value>| v.and_then(ty_of_value).unwrap_or(Ty::Unit);
        Ok(Value::Table(Arc::new(FnTable {
            domain: guess(entries.first().map(|(k, _)| k)),
            codomain: guess(entries.iter().map(|(_, v)| v).find(|v| ty_of_value(v).is_some())),
            entries,
        })))
    }
}

/// Best-effort type of a concrete value; `None` when underdetermined.
fn ty_of_value(v: &Value) -> Option<Ty> {
    Some(match v {
        Value::Unit => Ty::Unit,
        Value::Bool(_) => Ty::Bool,
        Value::Nat(_) => Ty::Nat,
        Value::Wr(_) => Ty::Wr,
        Value::St(_) => Ty::St,
        Value::Ev(_) => Ty::Ev,
        Value::Just(x) => Ty::maybe(ty_of_value(x)?),
        Value::Pair(a, b) => Ty::pair(ty_of_value(a)?, ty_of_value(b)?),
        Value::List(xs) => Ty::list(ty_of_value(xs.first()?)?),
        Value::WriterFn(_) => Ty::WriterFn,
        _ => return None,
    })
}

fn writer_of(x: Option<&str>, body: Value) -> Option<WriterFn> {
    let x = match x {
        None => return Some(WriterFn::ConstList(Box::new(body))),
        Some(x) => x,
    };
    let is_x = |v: &Value| matches!(v, Value::Sym(n) if &**n == x);
    match body {
        ref v if is_x(v) => Some(WriterFn::Id),
        Value::Neutral(Head::Append, args) => {
            let (a, b) = (&args[0], &args[1]);
            if is_x(a) && is_x(b) {
                Some(WriterFn::SelfAppend)
            } else if is_x(b) && !a.mentions(x) {
                Some(WriterFn::Prepend(Box::new(a.clone())))
            } else if is_x(a) && !b.mentions(x) {
                Some(WriterFn::Append(Box::new(b.clone())))
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Parses printed obligation notation; identifiers naming declared atoms
/// become atoms, the rest are variables.
pub fn parse_formula(text: &str, domains: &Domains) -> Result<Formula> {
    let mut p = P {
        toks: lex(text)?,
        pos: 0,
        domains,
    };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return Err(p.error("trailing input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{alpha_eq, print_formula, print_formula_flat};

    fn d() -> Domains {
        Domains::new(&["s0", "s1"], &["e0"], &["w0", "w1"]).unwrap()
    }

    fn back(text: &str) -> String {
        print_formula_flat(&parse_formula(text, &d()).unwrap())
    }

    #[test]
    fn constants_and_atoms() {
        assert_eq!(back("⊤"), "⊤");
        assert_eq!(back("0 ≡ length o'"), "0 ≡ length o'");
        assert_eq!(back("g s0 ≡ just w0"), "g s0 ≡ just w0");
        assert_eq!(back("o ++ [w0] ++ o ≡ []"), "o ++ [w0] ++ o ≡ []");
        assert_eq!(back("(o ++ o) ++ o ≡ []"), "(o ++ o) ++ o ≡ []");
    }

    #[test]
    fn binders() {
        let t = "(r : Maybe Wr) → r ≡ g pre-state → (pre-state ≡ pre-state) × (0 ≡ length o')";
        assert_eq!(back(t), t);
        let t = "∀ (b : Bool) → b ≡ true → (x : Unit × (List Wr → List Wr)) → x ≡ (unit , (λ _ → [])) → ⊥";
        assert_eq!(back(t), t);
    }

    #[test]
    fn writer_lambdas_and_tables() {
        for t in [
            "f ≡ (λ x → x)",
            "f ≡ (λ x → x ++ x)",
            "f ≡ (λ x → [w0] ++ x)",
            "f ≡ (λ x → x ++ [w1])",
            "f ≡ ((λ x → x) ∘ (λ _ → []))",
            "{s0 ↦ just w0, s1 ↦ nothing} s ≡ (if b then nothing else just w1)",
        ] {
            assert_eq!(back(t), t);
        }
    }

    #[test]
    fn pretty_output_reads_back() {
        let t = "(r : Maybe Wr) → r ≡ g pre-state → ((j : Wr) → r ≡ just j → (o' : List Wr) → o' ≡ [] → (pre-state ≡ pre-state) × (0 ≡ length o')) × (r ≡ nothing → (o' : List Wr) → o' ≡ [] → (pre-state ≡ pre-state) × (0 ≡ length o'))";
        let f = parse_formula(t, &d()).unwrap();
        let again = parse_formula(&print_formula(&f), &d()).unwrap();
        assert!(alpha_eq(&f, &again));
    }

    #[test]
    fn garbage_is_rejected() {
        assert!(parse_formula("(r : Maybe) → ⊤", &d()).is_err());
        assert!(parse_formula("a ≡", &d()).is_err());
        assert!(parse_formula("⊤ ⊤", &d()).is_err());
    }
}
