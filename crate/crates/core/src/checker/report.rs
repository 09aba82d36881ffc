use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sufficiency,
    Necessity,
    Equivalence,
    Monotonicity,
    Extension,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sufficiency => "sufficiency",
            Mode::Necessity => "necessity",
            Mode::Equivalence => "equivalence",
            Mode::Monotonicity => "monotonicity",
            Mode::Extension => "extension",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// One violating case. In monotonicity reports `wp` is the verdict of the
/// stronger postcondition's precondition and `post` the weaker one's.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub params: BTreeMap<String, String>,
    pub input: BTreeMap<String, String>,
    pub wp: bool,
    pub post: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |m: &BTreeMap<String, String>| {
            m.iter().map(|(k, v)| format!("{k} = {v}")).collect::<Vec<_>>().join(", ")
        };
        if !self.params.is_empty() {
            write!(f, "{}; ", join(&self.params))?;
        }
        write!(f, "{}: wp = {}, post = {}", join(&self.input), self.wp, self.post)?;
        if let Some(d) = &self.detail {
            write!(f, " ({d})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub mode: Mode,
    /// Parameter bindings times inputs.
    pub inputs_checked: usize,
    pub params_checked: usize,
    pub verdict: Verdict,
    pub counterexamples: Vec<Counterexample>,
    pub elapsed: Duration,
}

#[derive(Serialize)]
struct Json<'a> {
    mode: Mode,
    verdict: Verdict,
    inputs_checked: usize,
    params_checked: usize,
    counterexamples: &'a [Counterexample],
    elapsed_ms: u64,
}

impl CheckReport {
    pub fn new(mode: Mode, inputs: usize, params: usize, counterexamples: Vec<Counterexample>, elapsed: Duration) -> Self {
        let verdict = if counterexamples.is_empty() { Verdict::Pass } else { Verdict::Fail };
        CheckReport {
            mode,
            inputs_checked: inputs,
            params_checked: params,
            verdict,
            counterexamples,
            elapsed,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn json(&self) -> Json<'_> {
        Json {
            mode: self.mode,
            verdict: self.verdict,
            inputs_checked: self.inputs_checked,
            params_checked: self.params_checked,
            counterexamples: &self.counterexamples,
            elapsed_ms: self.elapsed.as_millis() as u64,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.json()).expect("report serialises")
    }

    /// Pretty JSON with fields in schema order.
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.json()).expect("report serialises")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "mode: {}\nverdict: {}\ninputs checked: {}\nparams checked: {}\ncounterexamples: {}\nelapsed: {} ms\n",
            self.mode,
            self.verdict,
            self.inputs_checked,
            self.params_checked,
            self.counterexamples.len(),
            self.elapsed.as_millis()
        );
        for c in &self.counterexamples {
            out.push_str(&format!("  {c}\n"));
        }
        out
    }
}
