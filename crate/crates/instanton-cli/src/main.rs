use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use instanton::autgrp;
use instanton::darboux;
use instanton::error::Error;
use instanton::hat;
use instanton::io;
use instanton::sample::sample_on_shell;
use instanton::verify::{self, VerifyConfig};
use instanton::C64;

#[derive(Parser)]
#[command(name = "instanton", about = "Instanton moduli space toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed for every randomized routine.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Matrix size k.
    #[arg(long, global = true, default_value_t = 3)]
    k: usize,

    /// Real part of the moment level tau.
    #[arg(long, global = true, default_value_t = 1.0)]
    tau_re: f64,

    /// Imaginary part of the moment level tau.
    #[arg(long, global = true, default_value_t = 0.0)]
    tau_im: f64,

    /// Tolerance override, repeatable: --tol name=value.
    #[arg(long, global = true, value_name = "NAME=VAL")]
    tol: Vec<String>,

    /// Input file (defaults to stdin where a command reads data).
    #[arg(long = "in", global = true, value_name = "FILE")]
    input: Option<String>,

    /// Output file (defaults to stdout).
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Sample an on-shell datum (A, B, i, j).
    Gen,
    /// Run a verification suite over the library.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Eigenvalue coordinates of a matrix pair.
    Coords,
    /// Apply the polynomial flow with the given coefficient lists.
    Flow {
        /// Coefficients of p, constant term first, as re,im pairs: "0.1,0 0,2".
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        p: String,
        /// Coefficients of q, same format.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        q: String,
    },
    /// Move a datum into the locus i2 = j2 = 0, emitting the generator word.
    Normalize,
    /// Embed a k-datum as a (k+1)-datum.
    Embed,
}

fn parse_tols(items: &[String]) -> Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for item in items {
        let (name, val) = item
            .split_once('=')
            .ok_or_else(|| format!("expected NAME=VAL in --tol {item:?}"))?;
        let val: f64 = val
            .parse()
            .map_err(|_| format!("bad tolerance value in --tol {item:?}"))?;
        if !(val > 0.0) {
            return Err(format!("tolerance must be positive in --tol {item:?}"));
        }
        out.insert(name.to_string(), val);
    }
    Ok(out)
}

fn parse_coeffs(s: &str) -> Result<Vec<C64>, String> {
    let mut out = Vec::new();
    for tok in s.split_whitespace() {
        let (re, im) = tok
            .split_once(',')
            .ok_or_else(|| format!("expected re,im in coefficient {tok:?}"))?;
        let re: f64 = re.parse().map_err(|_| format!("bad coefficient {tok:?}"))?;
        let im: f64 = im.parse().map_err(|_| format!("bad coefficient {tok:?}"))?;
        out.push(C64::new(re, im));
    }
    Ok(out)
}

fn read_input(path: &Option<String>) -> Result<Value, Error> {
    let text = match path {
        Some(p) => fs::read_to_string(p)
            .map_err(|e| Error::Invalid(format!("cannot read {p}: {e}")))?,
        None => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Error::Invalid(format!("cannot read stdin: {e}")))?;
            buf
        }
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("input is not JSON: {e}")))
}

fn emit(cli: &Cli, json: &Value, text: String) -> Result<(), Error> {
    let payload = match cli.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(json).unwrap()),
        Format::Text => text,
    };
    match &cli.out {
        Some(p) => fs::write(p, payload)
            .map_err(|e| Error::Invalid(format!("cannot write {p}: {e}"))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::Degenerate(_) | Error::SearchExhausted(_) | Error::OffShell { .. } => {
            ExitCode::from(2)
        }
        Error::Parse(_) | Error::Invalid(_) | Error::Endpoints(_) => ExitCode::from(3),
        _ => ExitCode::from(2),
    }
}

fn run(cli: &Cli, tols: BTreeMap<String, f64>) -> Result<ExitCode, Error> {
    let tau = C64::new(cli.tau_re, cli.tau_im);
    if cli.k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    match &cli.command {
        Command::Gen => {
            let d = sample_on_shell(cli.seed, cli.k, tau);
            let json = io::adhm_to_json(&d);
            let text = format!(
                "k = {}, tau = {} + {}i, residual {:.3e}\n",
                d.k,
                tau.re,
                tau.im,
                instanton::rep::residual_norm(&d)?
            );
            emit(cli, &json, text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite } => {
            let cfg = VerifyConfig {
                seed: cli.seed,
                k: cli.k,
                tau,
                tolerances: tols,
            };
            let reports = verify::run(suite, &cfg)?;
            let json = Value::Array(reports.iter().map(|r| r.to_json()).collect());
            let text = reports.iter().map(|r| r.to_string()).collect::<String>();
            emit(cli, &json, text)?;
            if reports.iter().all(|r| r.passed()) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::Coords => {
            let d = io::adhm_from_json(&read_input(&cli.input)?)?;
            let h = hat::to_hats(&d)?;
            let p = darboux::pi_forward(&h, 1e-8)?;
            let json = io::darboux_to_json(&p);
            let mut text = String::new();
            for (name, vals) in [
                ("lambda", &p.lambda),
                ("mu", &p.mu),
                ("lambdahat", &p.lambdahat),
                ("muhat", &p.muhat),
            ] {
                text.push_str(&format!(
                    "{name}: {}\n",
                    vals.iter()
                        .map(|z| format!("{:+.6e}{:+.6e}i", z.re, z.im))
                        .collect::<Vec<_>>()
                        .join("  ")
                ));
            }
            emit(cli, &json, text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Flow { p, q } => {
            let pc = parse_coeffs(p).map_err(Error::Invalid)?;
            let qc = parse_coeffs(q).map_err(Error::Invalid)?;
            let h = io::hat_from_json(&read_input(&cli.input)?)?;
            let moved = darboux::flow(&h, &pc, &qc);
            let json = io::hat_to_json(&moved);
            let text = format!(
                "flow applied, hat residual {:.3e}\n",
                darboux::hat_residual(&moved)
            );
            emit(cli, &json, text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Normalize => {
            let d = io::adhm_from_json(&read_input(&cli.input)?)?;
            let (word, out) = autgrp::normalize_to_cm(&d, cli.seed)?;
            let json = serde_json::json!({
                "word": io::word_to_json(&word),
                "data": io::adhm_to_json(&out),
            });
            let text = format!(
                "normalized with {} generators, tail norm {:.3e}\n",
                word.len(),
                out.i_col(1).max_abs() + out.j_row(1).max_abs()
            );
            emit(cli, &json, text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Embed => {
            let d = io::adhm_from_json(&read_input(&cli.input)?)?;
            let up = hat::embed(&d, 1e-8)?;
            let json = io::adhm_to_json(&up);
            let text = format!(
                "embedded to k = {}, residual {:.3e}\n",
                up.k,
                instanton::rep::residual_norm(&up)?
            );
            emit(cli, &json, text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tols = match parse_tols(&cli.tol) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(3);
        }
    };
    match run(&cli, tols) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}
