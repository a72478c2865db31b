use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use strata_kit::commands::{execute, schema, Options, SUITES};
use strata_core::json::error_to_json;
use strata_core::tower::default_prec;
use strata_core::Error;

#[derive(Parser)]
#[command(name = "strata-kit", version, about = "Tame local-field and stratum calculus over F_q((t))")]
struct Cli {
    /// Working precision in valuation steps of the top field (at least 8).
    #[arg(long, global = true)]
    prec: Option<i64>,
    /// Seed for fuzzed corpora.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print the input schema of the command instead of running it.
    #[arg(long, global = true)]
    schema: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Input {
    /// Input JSON file; standard input when absent or `-`.
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Canonical digit expansion, optionally after one arithmetic operation.
    Expand(Input),
    /// Standard representative.
    Sr(Input),
    /// The three minimality criteria.
    Minimal(Input),
    /// Howe factorization and its certificate.
    Factorize(Input),
    /// Embeddings into the splitting node.
    Embeddings(Input),
    /// Genericity across one step of a tower.
    Generic(Input),
    /// Stratum skeleton to datum skeleton.
    Stratum2yu(Input),
    /// Datum skeleton to stratum skeleton.
    Yu2stratum(Input),
    /// Group presentations on both sides and their comparison.
    Groups(Input),
    /// Character windows and index identities.
    Indices(Input),
    /// Run differential suites.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: Option<String>,
        /// Include canonical lattice forms.
        #[arg(long)]
        dump: bool,
    },
    /// Seeded corpus of random instances.
    Fuzz {
        /// Number of instances.
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// `betas` for (tower, beta) pairs, `strata` for simple strata.
        #[arg(long, default_value = "betas", value_parser = ["betas", "strata"])]
        kind: String,
    },
}

fn read_input(path: Option<&PathBuf>) -> Result<Value, Error> {
    let text = match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| Error::Schema(format!("{}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::Schema(format!("stdin: {e}")))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("invalid JSON: {e}")))
}

fn emit(v: &Value, code: i32) -> ExitCode {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
    ExitCode::from(code as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, input, suite, dump) = match &cli.cmd {
        Cmd::Expand(i) => ("expand", Some(i), None, false),
        Cmd::Sr(i) => ("sr", Some(i), None, false),
        Cmd::Minimal(i) => ("minimal", Some(i), None, false),
        Cmd::Factorize(i) => ("factorize", Some(i), None, false),
        Cmd::Embeddings(i) => ("embeddings", Some(i), None, false),
        Cmd::Generic(i) => ("generic", Some(i), None, false),
        Cmd::Stratum2yu(i) => ("stratum2yu", Some(i), None, false),
        Cmd::Yu2stratum(i) => ("yu2stratum", Some(i), None, false),
        Cmd::Groups(i) => ("groups", Some(i), None, false),
        Cmd::Indices(i) => ("indices", Some(i), None, false),
        Cmd::Verify { suite, dump } => ("verify", None, suite.clone(), *dump),
        Cmd::Fuzz { .. } => ("fuzz", None, None, false),
    };
    if cli.schema {
        return match schema(name) {
            Ok(v) => emit(&v, 0),
            Err(e) => emit(&error_to_json(&e), e.exit_code()),
        };
    }
    let prec = cli.prec.unwrap_or_else(default_prec);
    if prec < 8 {
        let e = Error::Schema("--prec must be at least 8".into());
        return emit(&error_to_json(&e), e.exit_code());
    }
    let value = match input {
        Some(i) => match read_input(i.input.as_ref()) {
            Ok(v) => v,
            Err(e) => return emit(&error_to_json(&e), e.exit_code()),
        },
        None => match &cli.cmd {
            Cmd::Fuzz { count, kind } => serde_json::json!({"count": count, "kind": kind}),
            _ => Value::Null,
        },
    };
    let opts = Options {
        prec,
        seed: cli.seed,
        suite,
        dump,
    };
    let (out, code) = execute(name, &value, &opts);
    emit(&out, code)
}
