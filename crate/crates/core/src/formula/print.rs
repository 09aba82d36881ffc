use super::Formula;

const WIDTH: usize = 72;
const STEP: usize = 4;

/// Single-line rendering.
pub fn print_formula_flat(f: &Formula) -> String {
    let mut out = String::new();
    flat(f, &mut out);
    out
}

/// Multi-line rendering, breaking after binder prefixes and before `×`
/// once a line exceeds the target width.
pub fn print_formula(f: &Formula) -> String {
    pretty(f, 0)
}

fn flat(f: &Formula, out: &mut String) {
    match f {
        Formula::Top => out.push('⊤'),
        Formula::Bottom => out.push('⊥'),
        Formula::Atom(a) => out.push_str(&a.to_string()),
        Formula::And(parts) if parts.is_empty() => out.push('⊤'),
        Formula::And(parts) => {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(" × ");
                }
                out.push('(');
                flat(p, out);
                out.push(')');
            }
        }
        _ => {
            let (prefixes, body) = prefix_chain(f);
            for p in prefixes {
                out.push_str(&p);
                out.push(' ');
            }
            flat(body, out);
        }
    }
}

/// Splits leading binders and hypotheses into `… →` chunks.
fn prefix_chain(mut f: &Formula) -> (Vec<String>, &Formula) {
    let mut prefixes = Vec::new();
    loop {
        match f {
            Formula::Implies(h, body) => {
                prefixes.push(format!("{h} →"));
                f = body;
            }
            Formula::ForallGuarded { var, ty, guard, body } => {
                prefixes.push(format!("({var} : {ty}) →"));
                prefixes.push(format!("{guard} →"));
                f = body;
            }
            Formula::ForallPlain { var, ty, body } => {
                prefixes.push(format!("∀ ({var} : {ty}) →"));
                f = body;
            }
            _ => return (prefixes, f),
        }
    }
}

fn width(s: &str) -> usize {
    s.chars().count()
}

fn pretty(f: &Formula, col: usize) -> String {
    let one_line = print_formula_flat(f);
    if col + width(&one_line) <= WIDTH {
        return one_line;
    }
    match f {
        Formula::And(parts) if parts.len() > 1 => {
            let mut out = String::new();
            for (i, p) in parts.iter().enumerate() {
                if i == 0 {
                    out.push('(');
                    out.push_str(&pretty(p, col + 1));
                } else {
                    out.push('\n');
                    out.push_str(&" ".repeat(col));
                    out.push_str("× (");
                    out.push_str(&pretty(p, col + 3));
                }
                out.push(')');
            }
            out
        }
        Formula::Implies(..) | Formula::ForallGuarded { .. } | Formula::ForallPlain { .. } => {
            let (prefixes, body) = prefix_chain(f);
            let inner = col + STEP;
            let mut out = String::new();
            let mut line_len = col;
            for (i, p) in prefixes.iter().enumerate() {
                if i > 0 {
                    if line_len + 1 + width(p) > WIDTH {
                        out.push('\n');
                        out.push_str(&" ".repeat(inner));
                        line_len = inner;
                    } else {
                        out.push(' ');
                        line_len += 1;
                    }
                }
                out.push_str(p);
                line_len += width(p);
            }
            let body_flat = print_formula_flat(body);
            if line_len + 1 + width(&body_flat) <= WIDTH {
                out.push(' ');
                out.push_str(&body_flat);
            } else {
                out.push('\n');
                out.push_str(&" ".repeat(inner));
                out.push_str(&pretty(body, inner));
            }
            out
        }
        _ => one_line,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{sym, Atom};
    use crate::values::{name, Head, Ty, Value};

    #[test]
    fn atoms_and_constants() {
        assert_eq!(print_formula(&Formula::Top), "⊤");
        let f = Formula::atom(Value::Nat(0), Value::Neutral(Head::Length, vec![sym("o'")]));
        assert_eq!(print_formula(&f), "0 ≡ length o'");
    }

    #[test]
    fn guarded_binder_rendering() {
        let g_s = Value::Neutral(Head::Apply, vec![sym("g"), sym("s")]);
        let f = Formula::guarded(
            name("r"),
            Ty::maybe(Ty::Wr),
            Atom::eq(sym("r"), g_s),
            Formula::and(vec![Formula::atom(sym("s"), sym("s")), Formula::Top]),
        );
        assert_eq!(print_formula(&f), "(r : Maybe Wr) → r ≡ g s → (s ≡ s) × (⊤)");
    }

    #[test]
    fn long_formulas_break_lines() {
        let leaf = Formula::atom(sym("pre-state"), sym("post-state"));
        let mut f = leaf;
        for i in 0..6 {
            f = Formula::guarded(name(&format!("r{i}")), Ty::maybe(Ty::Wr), Atom::eq(sym(&format!("r{i}")), sym("result")), f);
        }
        let text = print_formula(&f);
        assert!(text.lines().count() > 1);
        assert!(text.lines().all(|l| l.chars().count() <= WIDTH));
        let squashed: String = text.split_whitespace().collect::<Vec<_>>().join(" ");
        assert_eq!(squashed, print_formula_flat(&f));
    }
}
