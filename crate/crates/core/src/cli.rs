//! Command line front end. `run` does the work and returns what would be
//! printed, so the binary and the tests share one code path.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::coeff::Ring;
use crate::error::{Error, Result};
use crate::graph::PropElement;
use crate::normalize::{Reducer, Scope};
use crate::simplicial::{coact, sur_coact_on, SimplicialSet};
use crate::steenrod::square_report;
use crate::surjection::Surjection;
use crate::verify::{run_suite, Report, Status, Suite, SuiteOptions};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SEMANTIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "einfty", version, about = "Graph terms of an E-infinity prop on three generators")]
pub struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized suites.
    #[arg(long, env = "EINFTY_SEED", global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rewrite a term to normal form.
    Normalize {
        /// Term JSON file, or `-` for stdin.
        file: PathBuf,
        #[arg(long, default_value = "S")]
        scope: Scope,
        #[arg(long, default_value = "Z")]
        ring: Ring,
        /// Include the rewrite steps.
        #[arg(long)]
        trace: bool,
    },
    /// Apply a (1, m) term or a surjection to a chain.
    Coact {
        #[arg(long, conflicts_with = "surjection", required_unless_present = "surjection")]
        term: Option<PathBuf>,
        /// Values such as "1 2 1".
        #[arg(long)]
        surjection: Option<String>,
        #[command(flatten)]
        space: Space,
        /// A simplex name such as "[0,1,2]", or a chain in JSON.
        #[arg(long)]
        chain: String,
        #[arg(long, default_value = "Z")]
        ring: Ring,
    },
    /// Tabulate Sq^k on mod 2 cohomology.
    Steenrod {
        #[command(flatten)]
        space: Space,
        #[arg(long)]
        square: usize,
    },
    /// Run verification suites; exit 0 iff all pass.
    Verify {
        /// A suite name, or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Comma-separated bounds, meaning depends on the suite.
        #[arg(long, value_delimiter = ',')]
        bound: Option<Vec<usize>>,
        /// Number of random cases for sampling suites.
        #[arg(long)]
        cases: Option<usize>,
    },
}

/// A simplicial set from a file or a standard simplex.
#[derive(Debug, Args)]
pub struct Space {
    /// Simplicial set JSON file, or `-` for stdin.
    #[arg(long, conflicts_with = "simplex", required_unless_present = "simplex")]
    pub sset: Option<PathBuf>,
    /// Use the standard simplex of this dimension.
    #[arg(long)]
    pub simplex: Option<usize>,
}

/// What a command printed and how it exited.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_PARSE, stdout: String::new(), stderr: text }
            } else {
                Outcome { code: EXIT_PASS, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli) {
        Ok((code, stdout)) => Outcome { code, stdout, stderr: String::new() },
        Err(e) => Outcome { code: exit_code(&e), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Io(_) => EXIT_PARSE,
        _ => EXIT_SEMANTIC,
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        return Ok(std::io::read_to_string(std::io::stdin())?);
    }
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = read_input(path)?;
    serde_json::from_str(&text).map_err(|e| Error::parse(format!("{}: {e}", path.display())))
}

fn load_space(space: &Space) -> Result<SimplicialSet> {
    match (&space.sset, space.simplex) {
        (_, Some(d)) => Ok(SimplicialSet::standard(d)),
        (Some(path), None) => SimplicialSet::from_json(&read_json(path)?),
        (None, None) => Err(Error::parse("give --sset or --simplex")),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn execute(cli: &Cli) -> Result<(i32, String)> {
    match &cli.command {
        Command::Normalize { file, scope, ring, trace } => normalize(cli, file, *scope, *ring, *trace),
        Command::Coact { term, surjection, space, chain, ring } => {
            coact_cmd(cli, term.as_deref(), surjection.as_deref(), space, chain, *ring)
        }
        Command::Steenrod { space, square } => steenrod_cmd(cli, space, *square),
        Command::Verify { suite, bound, cases } => verify_cmd(cli, suite, bound.clone(), *cases),
    }
}

fn element_text(x: &PropElement) -> String {
    if x.is_zero() {
        return "0\n".into();
    }
    let mut out = String::new();
    for (g, c) in x.terms() {
        let _ = writeln!(out, "{c}\t{}", g.to_json());
    }
    out
}

fn normalize(cli: &Cli, file: &Path, scope: Scope, ring: Ring, trace: bool) -> Result<(i32, String)> {
    let x = PropElement::from_json(&read_json(file)?, ring)?;
    let mut red = Reducer::new(scope);
    if trace {
        red = red.tracing();
    }
    let nf = red.reduce(&x)?;
    let steps: Vec<Value> = red.trace().iter().map(|s| s.to_json()).collect();
    if cli.json {
        let mut v = json!({"scope": scope.to_string(), "ring": nf.ring().to_string(), "normal_form": nf.to_json()});
        if trace {
            v["trace"] = json!(steps);
        }
        return Ok((EXIT_PASS, pretty(&v)));
    }
    let mut out = element_text(&nf);
    for s in steps {
        let _ = writeln!(out, "{s}");
    }
    Ok((EXIT_PASS, out))
}

fn coact_cmd(
    cli: &Cli,
    term: Option<&Path>,
    surjection: Option<&str>,
    space: &Space,
    chain: &str,
    ring: Ring,
) -> Result<(i32, String)> {
    let x = load_space(space)?;
    let chain_value = serde_json::from_str(chain).unwrap_or_else(|_| Value::String(chain.to_string()));
    let result = match (term, surjection) {
        (_, Some(text)) => {
            let s = Surjection::parse(text)?;
            sur_coact_on(&s, &x, &x.parse_chain(&chain_value, Ring::F2)?)
        }
        (Some(path), None) => {
            let g = PropElement::from_json(&read_json(path)?, ring)?;
            let (n, m) = g.biarity();
            if n != 1 {
                return Err(Error::Biarity(1, m, n, m));
            }
            coact(&g, &x, &x.parse_chain(&chain_value, g.ring())?)?
        }
        (None, None) => return Err(Error::parse("give --term or --surjection")),
    };
    if cli.json {
        return Ok((EXIT_PASS, pretty(&x.chain_to_json(&result))));
    }
    let mut out = String::new();
    for (w, c) in result.iter() {
        let names: Vec<&str> = w.iter().map(|&id| x.name(id)).collect();
        let _ = writeln!(out, "{c}\t{}", names.join(" ⊗ "));
    }
    if out.is_empty() {
        out.push_str("0\n");
    }
    Ok((EXIT_PASS, out))
}

fn steenrod_cmd(cli: &Cli, space: &Space, k: usize) -> Result<(i32, String)> {
    let report = square_report(k, &load_space(space)?)?;
    if cli.json {
        return Ok((EXIT_PASS, pretty(&report)));
    }
    let mut out = String::new();
    let _ = writeln!(out, "ranks {}", report["cohomology"]["ranks"]);
    for t in report["tables"].as_array().into_iter().flatten() {
        let _ = write!(out, "Sq^{k}: H^{} -> H^{}", t["from"], t["to"]);
        let rows = t["matrix"].as_array().map(Vec::as_slice).unwrap_or_default();
        if rows.iter().all(|r| r.as_array().is_none_or(Vec::is_empty)) {
            out.push_str("  (zero space)\n");
            continue;
        }
        out.push('\n');
        for row in rows {
            let cells: Vec<String> = row.as_array().into_iter().flatten().map(Value::to_string).collect();
            let _ = writeln!(out, "  {}", cells.join(" "));
        }
    }
    Ok((EXIT_PASS, out))
}

fn verify_cmd(cli: &Cli, suite: &str, bound: Option<Vec<usize>>, cases: Option<usize>) -> Result<(i32, String)> {
    let suites: Vec<Suite> = if suite.eq_ignore_ascii_case("all") { Suite::ALL.to_vec() } else { vec![suite.parse()?] };
    let opts = SuiteOptions { seed: cli.seed, cases, bound };
    let reports = suites.iter().map(|&s| run_suite(s, &opts)).collect::<Result<Vec<Report>>>()?;
    let code = if reports.iter().all(Report::passed) { EXIT_PASS } else { EXIT_FAIL };
    if cli.json {
        let v = match reports.as_slice() {
            [one] => one.to_json(),
            many => json!(many.iter().map(Report::to_json).collect::<Vec<_>>()),
        };
        return Ok((code, pretty(&v)));
    }
    let mut out = String::new();
    for r in &reports {
        let label = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        let _ = writeln!(out, "{label:<12} {:<16} {} cases, {} counterexamples", r.suite, r.cases, r.counterexamples.len());
    }
    Ok((code, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_exits_cleanly() {
        let o = run(["einfty", "--help"]);
        assert_eq!(o.code, EXIT_PASS);
        assert!(o.stdout.contains("normalize"));
    }

    #[test]
    fn unknown_flag_is_a_parse_error() {
        assert_eq!(run(["einfty", "verify", "--nope"]).code, EXIT_PARSE);
        assert_eq!(run(["einfty", "normalize", "x.json", "--scope", "T"]).code, EXIT_PARSE);
    }

    #[test]
    fn unknown_suite_is_semantic() {
        assert_eq!(run(["einfty", "verify", "--suite", "nope"]).code, EXIT_SEMANTIC);
    }

    #[test]
    fn surjection_coaction_on_an_edge() {
        let o = run(["einfty", "--json", "coact", "--surjection", "1 2", "--simplex", "1", "--chain", "[0,1]"]);
        assert_eq!(o.code, EXIT_PASS, "{}", o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["terms"].as_array().unwrap().len(), 2);
    }
}
