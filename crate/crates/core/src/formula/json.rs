use serde_json::{json, Value as Json};

use super::{Atom, Formula};

fn atom(a: &Atom) -> Json {
    json!({ "tag": "eq", "lhs": a.lhs.to_string(), "rhs": a.rhs.to_string() })
}

/// Nested tagged nodes; terms and types are rendered as text.
pub fn formula_to_json(f: &Formula) -> Json {
    match f {
        Formula::Top => json!({ "tag": "top" }),
        Formula::Bottom => json!({ "tag": "bottom" }),
        Formula::Atom(a) => atom(a),
        Formula::And(parts) => json!({ "tag": "and", "parts": parts.iter().map(formula_to_json).collect::<Vec<_>>() }),
        Formula::Implies(h, body) => json!({ "tag": "implies", "hyp": atom(h), "body": formula_to_json(body) }),
        Formula::ForallGuarded { var, ty, guard, body } => json!({
            "tag": "forall_guarded",
            "var": &**var,
            "type": ty.to_string(),
            "guard": atom(guard),
            "body": formula_to_json(body),
        }),
        Formula::ForallPlain { var, ty, body } => json!({
            "tag": "forall",
            "var": &**var,
            "type": ty.to_string(),
            "body": formula_to_json(body),
        }),
    }
}
