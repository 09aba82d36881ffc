use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use wpcheck::ast::{run, EffectTheory};
use wpcheck::branching::{Branching, Ext};
use wpcheck::checker::corpus::{
    corpus_check_config, generate_program_corpus, monotonicity_pairs, run_monotonicity, run_suite, seed_from_env,
    CorpusConfig, DEFAULT_SEED,
};
use wpcheck::checker::{
    check_agreement, check_extension_agreement, check_monotonicity, obligation, CheckConfig, CheckReport, Mode, PostPair,
};
use wpcheck::fixtures::{BrokenGets, SwappedIf};
use wpcheck::formula::{formula_to_json, print_formula, simplify, Formula};
use wpcheck::frontend::{load, parse_dash_value, parse_input, parse_table, parse_unit, print_unit, Compiled, PAPER_INTRO};
use wpcheck::rws::{Rws, RwsCommand, RwsInput, RwsOutput};
use wpcheck::values::{Name, Ty, Value};

#[derive(Parser)]
#[command(name = "wpcheck", version, about = "Weakest-precondition generation and checking for .east programs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoryArg {
    Rws,
    BrokenGets,
    BrokenIf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Sufficiency,
    Necessity,
    Both,
    Monotonicity,
    Extension,
}

#[derive(clap::Args)]
struct Common {
    file: PathBuf,
    /// Theory giving the program its meaning.
    #[arg(long, value_enum, default_value = "rws")]
    theory: TheoryArg,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a program on one input.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "(e0 s0)")]
        input: String,
        /// NAME=TABLE, e.g. g=s0:just-w0,s1:nothing
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Print the precondition of a spec.
    Wp {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        spec: String,
        #[arg(long)]
        simplify: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Check the precondition against the operational semantics.
    Check {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum, default_value = "both")]
        mode: ModeArg,
        /// Weaker spec for monotonicity; defaults to `--spec`.
        #[arg(long)]
        weaker: Option<String>,
        #[arg(long)]
        max_list_len: Option<usize>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long = "param")]
        params: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Report elapsed time as 0.
        #[arg(long)]
        no_timing: bool,
    },
    /// Print the simplified precondition of a spec.
    Simplify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        spec: String,
    },
    /// Write a built-in example source.
    Example {
        #[arg(value_parser = ["paper-intro"])]
        name: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print a source file in canonical layout.
    Fmt { file: PathBuf },
    /// Generate a program corpus and run the agreement suites over it.
    Corpus {
        #[arg(long, default_value_t = 500)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        max_depth: usize,
        #[arg(long, default_value_t = 3)]
        posts: usize,
        /// Defaults to WPCHECK_SEED, then a built-in seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, default_value_t = 4)]
        max_list_len: usize,
        /// Write the generated units here instead of checking them.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

/// Outcome of a command: `true` when everything passed.
type Outcome = Result<bool>;

fn read(path: &Path) -> Result<String> {
    if !path.exists() {
        bail!("file not found: {}", path.display());
    }
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_file(path: &Path) -> Result<Compiled> {
    let text = read(path)?;
    load(&text).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn param_values(c: &Compiled, raw: &[String]) -> Result<Vec<(Name, Value)>> {
    raw.iter()
        .map(|p| {
            let (n, text) = p.split_once('=').ok_or_else(|| anyhow!("--param expects NAME=TABLE, got `{p}`"))?;
            let (name, ty) = c
                .params
                .iter()
                .find(|(k, _)| &**k == n)
                .ok_or_else(|| anyhow!("undeclared parameter `{n}`"))?;
            let v = match ty {
                Ty::Fn(dom, cod) => parse_table(text, dom, cod, &c.domains, &Default::default())?,
                other => parse_dash_value(text, other, &c.domains)?,
            };
            Ok((name.clone(), v))
        })
        .collect()
}

/// Binds the selected theory and the base theory it extends, then evaluates the body.
macro_rules! with_theory {
    ($arg:expr, |$ext:ident, $base:ident| $body:expr) => {
        match $arg {
            TheoryArg::Rws => {
                let ($ext, $base) = (&Branching::new(Rws), &Rws);
                $body
            }
            TheoryArg::BrokenGets => {
                let ($ext, $base) = (&Branching::new(BrokenGets), &BrokenGets);
                $body
            }
            TheoryArg::BrokenIf => {
                let ($ext, $base) = (&SwappedIf::default(), &Rws);
                $body
            }
        }
    };
}

fn spec_obligation<E>(theory: &E, c: &Compiled, spec: &str) -> Result<Formula>
where
    E: EffectTheory<Cmd = Ext<RwsCommand>, Input = RwsInput, Output = RwsOutput>,
{
    let p = c.spec(spec)?;
    Ok(obligation(theory, &c.subject(), p, &CheckConfig::new(c.domains.clone()))?)
}

fn cmd_run(common: &Common, input: &str, params: &[String]) -> Outcome {
    let c = load_file(&common.file)?;
    let binding = param_values(&c, params)?;
    if let Some((n, _)) = c.params.iter().find(|(n, _)| !binding.iter().any(|(k, _)| k == n)) {
        bail!("parameter `{n}` needs a value (--param {n}=TABLE)");
    }
    let i = parse_input(input, &c.domains)?;
    let m = c.program(&binding)?;
    let out = with_theory!(common.theory, |ext, _base| run(ext, &m, &i)?);
    println!("result: {}\nstate: {}\noutput: {}", out.result, out.state, out.output);
    Ok(true)
}

fn cmd_wp(common: &Common, spec: &str, simp: bool, format: Format) -> Outcome {
    let c = load_file(&common.file)?;
    let mut f = with_theory!(common.theory, |ext, _base| spec_obligation(ext, &c, spec)?);
    if simp {
        f = simplify(&f);
    }
    match format {
        Format::Text => println!("{}", print_formula(&f)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&formula_to_json(&f))?),
    }
    Ok(true)
}

fn cmd_simplify(common: &Common, spec: &str) -> Outcome {
    cmd_wp(common, spec, true, Format::Text)
}

struct CheckArgs<'a> {
    spec: &'a str,
    mode: ModeArg,
    weaker: Option<&'a str>,
    cfg: CheckConfig,
}

fn check_with<E, B>(ext: &E, base: &B, c: &Compiled, a: &CheckArgs<'_>) -> Result<CheckReport>
where
    B: EffectTheory<Cmd = RwsCommand, Input = RwsInput, Output = RwsOutput>,
    E: EffectTheory<Cmd = Ext<RwsCommand>, Input = RwsInput, Output = RwsOutput>,
{
    let subject = c.subject();
    let p = c.spec(a.spec)?;
    let r = match a.mode {
        ModeArg::Sufficiency => check_agreement(ext, &subject, p, Mode::Sufficiency, &a.cfg)?,
        ModeArg::Necessity => check_agreement(ext, &subject, p, Mode::Necessity, &a.cfg)?,
        ModeArg::Both => check_agreement(ext, &subject, p, Mode::Equivalence, &a.cfg)?,
        ModeArg::Extension => check_extension_agreement(ext, base, &subject, p, &a.cfg)?,
        ModeArg::Monotonicity => {
            let pair = PostPair {
                stronger: p.clone(),
                weaker: c.spec(a.weaker.unwrap_or(a.spec))?.clone(),
            };
            check_monotonicity(ext, &subject, &pair, &a.cfg)?
        }
    };
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    common: &Common,
    spec: &str,
    mode: ModeArg,
    weaker: Option<&str>,
    max_list_len: Option<usize>,
    jobs: Option<usize>,
    params: &[String],
    format: Format,
    no_timing: bool,
) -> Outcome {
    let c = load_file(&common.file)?;
    let mut cfg = CheckConfig::new(c.domains.clone());
    if let Some(n) = max_list_len {
        cfg.bounds.max_list_len = n;
    }
    cfg.jobs = jobs;
    cfg.fixed_params = param_values(&c, params)?;
    let args = CheckArgs { spec, mode, weaker, cfg };
    let mut report = with_theory!(common.theory, |ext, base| check_with(ext, base, &c, &args)?);
    if no_timing {
        report.elapsed = Default::default();
    }
    match format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => println!("{}", report.to_json_pretty()),
    }
    Ok(report.passed())
}

fn cmd_example(output: Option<&Path>) -> Outcome {
    match output {
        Some(p) => std::fs::write(p, PAPER_INTRO).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{PAPER_INTRO}"),
    }
    Ok(true)
}

fn cmd_fmt(file: &Path) -> Outcome {
    let text = read(file)?;
    let u = parse_unit(&text).map_err(|e| anyhow!("{}: {e}", file.display()))?;
    print!("{}", print_unit(&u));
    Ok(true)
}

fn cmd_corpus(cfg: CorpusConfig, pairs: usize, max_list_len: usize, write: Option<&Path>) -> Outcome {
    let units = generate_program_corpus(&cfg);
    if let Some(dir) = write {
        std::fs::create_dir_all(dir)?;
        for (i, u) in units.iter().enumerate() {
            std::fs::write(dir.join(format!("p{i:04}.east")), print_unit(u))?;
        }
        println!("wrote {} units to {}", units.len(), dir.display());
        return Ok(true);
    }
    let check = corpus_check_config(max_list_len);
    let suite = run_suite(&units, &check)?;
    let mono = run_monotonicity(&units, &monotonicity_pairs(&units, pairs), &check)?;
    println!("seed: {}", cfg.seed);
    println!(
        "agreement: {} programs, {} specs, {} cases, {} disagreements ({} ms)",
        suite.programs,
        suite.specs,
        suite.cases,
        suite.disagreements,
        suite.elapsed.as_millis()
    );
    println!(
        "extension: {} branching programs, {} cases, {} failures",
        suite.branching_programs, suite.extension_cases, suite.extension_failures
    );
    println!(
        "monotonicity: {} pairs, {} cases, {} failures ({} ms)",
        mono.pairs,
        mono.cases,
        mono.failures,
        mono.elapsed.as_millis()
    );
    println!(
        "simplifier: {} cases, {} mismatches",
        suite.simplifier_cases + mono.simplifier_cases,
        suite.simplifier_mismatches + mono.simplifier_mismatches
    );
    for f in &suite.first_failures {
        println!("  {f}");
    }
    Ok(suite.passed() && mono.failures == 0 && mono.simplifier_mismatches == 0)
}

fn dispatch(cli: Cli) -> Outcome {
    match cli.cmd {
        Cmd::Run { common, input, params } => cmd_run(&common, &input, &params),
        Cmd::Wp {
            common,
            spec,
            simplify,
            format,
        } => cmd_wp(&common, &spec, simplify, format),
        Cmd::Check {
            common,
            spec,
            mode,
            weaker,
            max_list_len,
            jobs,
            params,
            format,
            no_timing,
        } => cmd_check(
            &common,
            &spec,
            mode,
            weaker.as_deref(),
            max_list_len,
            jobs,
            &params,
            format,
            no_timing,
        ),
        Cmd::Simplify { common, spec } => cmd_simplify(&common, &spec),
        Cmd::Example { output, .. } => cmd_example(output.as_deref()),
        Cmd::Fmt { file } => cmd_fmt(&file),
        Cmd::Corpus {
            count,
            max_depth,
            posts,
            seed,
            pairs,
            max_list_len,
            write,
        } => cmd_corpus(
            CorpusConfig {
                seed: seed.unwrap_or_else(|| seed_from_env(DEFAULT_SEED)),
                count,
                max_depth,
                posts_per_program: posts,
            },
            pairs,
            max_list_len,
            write.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
