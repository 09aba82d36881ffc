use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// S-expression with source positions; `;` starts a line comment.
#[derive(Clone, Debug)]
pub enum SExp {
    Atom(String, Pos),
    List(Vec<SExp>, Pos),
}

impl SExp {
    pub fn pos(&self) -> Pos {
        match self {
            SExp::Atom(_, p) | SExp::List(_, p) => *p,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            SExp::Atom(s, _) => Some(s),
            SExp::List(..) => None,
        }
    }

    pub fn list(&self) -> Option<&[SExp]> {
        match self {
            SExp::List(xs, _) => Some(xs),
            SExp::Atom(..) => None,
        }
    }

    /// Head symbol of a list form.
    pub fn head(&self) -> Option<&str> {
        self.list().and_then(|xs| xs.first()).and_then(SExp::atom)
    }
}

pub fn located(e: Error, p: Pos) -> Error {
    match e {
        Error::Located { .. } | Error::Syntax { .. } => e,
        other => Error::Located {
            inner: Box::new(other),
            line: p.line,
            col: p.col,
        },
    }
}

pub fn syntax(msg: impl Into<String>, p: Pos) -> Error {
    Error::Syntax {
        msg: msg.into(),
        line: p.line,
        col: p.col,
    }
}

/// Reads every top-level form of `text`.
pub fn read_all(text: &str) -> Result<Vec<SExp>> {
    let mut stack: Vec<(Vec<SExp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut line = 1;
    let mut col = 0;
    let mut last = Pos { line: 1, col: 1 };
    let mut chars = text.chars().peekable();
    let mut token = String::new();
    let mut token_pos = last;

    fn flush(token: &mut String, pos: Pos, stack: &mut [(Vec<SExp>, Pos)], top: &mut Vec<SExp>) {
        if token.is_empty() {
            return;
        }
        let atom = SExp::Atom(std::mem::take(token), pos);
        match stack.last_mut() {
            Some((items, _)) => items.push(atom),
            None => top.push(atom),
        }
    }

    while let Some(c) = chars.next() {
        if c == '\n' {
            flush(&mut token, token_pos, &mut stack, &mut top);
            line += 1;
            col = 0;
            continue;
        }
        col += 1;
        let here = Pos { line, col };
        if c.is_whitespace() {
            flush(&mut token, token_pos, &mut stack, &mut top);
            continue;
        }
        if c == ';' {
            flush(&mut token, token_pos, &mut stack, &mut top);
            for c in chars.by_ref() {
                if c == '\n' {
                    line += 1;
                    col = 0;
                    break;
                }
            }
            continue;
        }
        last = here;
        match c {
            '(' => {
                flush(&mut token, token_pos, &mut stack, &mut top);
                stack.push((Vec::new(), here));
            }
            ')' => {
                flush(&mut token, token_pos, &mut stack, &mut top);
                let (items, open) = stack.pop().ok_or_else(|| syntax("unbalanced parenthesis", here))?;
                let list = SExp::List(items, open);
                match stack.last_mut() {
                    Some((items, _)) => items.push(list),
                    None => top.push(list),
                }
            }
            _ => {
                if token.is_empty() {
                    token_pos = here;
                }
                token.push(c);
            }
        }
    }
    flush(&mut token, token_pos, &mut stack, &mut top);
    if !stack.is_empty() {
        return Err(syntax("unbalanced parenthesis", last));
    }
    Ok(top)
}

/// Reads exactly one form.
pub fn read_one(text: &str) -> Result<SExp> {
    let mut forms = read_all(text)?;
    match forms.len() {
        1 => Ok(forms.pop().unwrap()),
        0 => Err(syntax("expected a form", Pos { line: 1, col: 1 })),
        _ => Err(syntax("expected a single form", forms[1].pos())),
    }
}

const WIDTH: usize = 78;

impl SExp {
    fn flat(&self) -> String {
        match self {
            SExp::Atom(s, _) => s.clone(),
            SExp::List(xs, _) => format!("({})", xs.iter().map(SExp::flat).collect::<Vec<_>>().join(" ")),
        }
    }

    /// Canonical layout: flat when it fits, otherwise the head and the
    /// short leading arguments stay on the first line and the rest go on
    /// their own lines, indented by two.
    pub fn pretty(&self, indent: usize) -> String {
        let flat = self.flat();
        let xs = match self {
            SExp::List(xs, _) if indent + flat.chars().count() > WIDTH && xs.len() > 1 => xs,
            _ => return flat,
        };
        let inner = indent + 2;
        let mut out = String::from("(");
        out.push_str(&xs[0].flat());
        let mut col = indent + 1 + xs[0].flat().chars().count();
        let mut rest = xs[1..].iter().peekable();
        while let Some(x) = rest.peek() {
            let f = x.flat();
            let is_last = rest.len() == 1;
            if is_last || col + 1 + f.chars().count() > WIDTH || f.starts_with('(') && f.contains(' ') && f.len() > 24 {
                break;
            }
            out.push(' ');
            out.push_str(&f);
            col += 1 + f.chars().count();
            rest.next();
        }
        for x in rest {
            out.push('\n');
            out.push_str(&" ".repeat(inner));
            out.push_str(&x.pretty(inner));
        }
        out.push(')');
        out
    }
}

pub fn atom(s: &str) -> SExp {
    SExp::Atom(s.to_string(), Pos { line: 0, col: 0 })
}

pub fn list(xs: Vec<SExp>) -> SExp {
    SExp::List(xs, Pos { line: 0, col: 0 })
}
