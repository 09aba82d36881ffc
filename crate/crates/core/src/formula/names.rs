//! Bound-variable naming: each name belongs to a family (`r`, `r1`, `r2`, …
//! or `o'`, `o''`, …) and families are walked in order.

use std::collections::BTreeSet;

use crate::values::{name, Name};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    base: String,
    primed: bool,
}

impl Family {
    pub fn new(base: &str, primed: bool) -> Family {
        Family {
            base: base.to_string(),
            primed,
        }
    }

    pub fn of(n: &str) -> Family {
        let unprimed = n.trim_end_matches('\'');
        if unprimed.len() < n.len() && !unprimed.is_empty() {
            return Family::new(unprimed, true);
        }
        let base = n.trim_end_matches(|c: char| c.is_ascii_digit());
        if base.is_empty() {
            Family::new(n, false)
        } else {
            Family::new(base, false)
        }
    }

    /// The `i`-th member: `r`, `r1`, `r2`, … or `o'`, `o''`, ….
    pub fn nth(&self, i: usize) -> Name {
        if self.primed {
            name(&format!("{}{}", self.base, "'".repeat(i + 1)))
        } else if i == 0 {
            name(&self.base)
        } else {
            name(&format!("{}{}", self.base, i))
        }
    }
}

/// First member of `n`'s family not in `avoid`.
pub fn next_free(n: &str, avoid: &BTreeSet<Name>) -> Name {
    let fam = Family::of(n);
    (0..)
        .map(|i| fam.nth(i))
        .find(|c| !avoid.contains(c))
        .expect("families are infinite")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families() {
        assert_eq!(&*Family::of("r7").nth(0), "r");
        assert_eq!(&*Family::of("r").nth(2), "r2");
        assert_eq!(&*Family::of("o''").nth(0), "o'");
        assert_eq!(&*Family::of("o'").nth(2), "o'''");
    }

    #[test]
    fn next_free_skips_taken() {
        let avoid: BTreeSet<Name> = ["r", "r1"].iter().map(|s| name(s)).collect();
        assert_eq!(&*next_free("r", &avoid), "r2");
    }
}
