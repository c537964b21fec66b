use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use idealcalc::derivations::norm_estimate;
use idealcalc::sequences::decreasing_rearrangement;
use idealcalc::{DerivationSpec, Error, Matrix, SearchBudget, Sequence, SpaceSpec};
use idealcalc_cli::{run, thread_cap, ConfigError, ExperimentConfig, ExperimentReport, Format};

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(
    name = "idealcalc",
    version,
    about = "Symmetric operator ideals: norms, multipliers, derivations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the check suites listed in a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Report path; the report goes to stdout when neither this nor the
        /// config names one.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = parse_format)]
        format: Option<Format>,
        /// Replaces every suite seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Sequence norm of a finite sequence.
    Norms {
        #[arg(long)]
        space: String,
        /// Comma-separated entries.
        #[arg(long)]
        seq: String,
    },
    /// Norm estimate for the inner derivation of a matrix from I into J.
    Dnorm {
        #[arg(long = "space-i")]
        space_i: String,
        #[arg(long = "space-j")]
        space_j: String,
        /// Plain-text matrix: `n`, then n rows of whitespace-separated `re im` pairs.
        #[arg(long)]
        matrix: PathBuf,
        /// Restarts and steps, as `R,S`.
        #[arg(long)]
        budget: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

enum Failure {
    Config(String),
    Check(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

/// Bad input is a configuration error; anything else a failed computation.
impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Parse(_) => Failure::Config(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = thread_cap().map_err(Failure::from).and_then(|cap| {
        if let Some(n) = cap {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Failure::Config(e.to_string()))?;
        }
        match cli.command {
            Command::Run {
                config,
                out,
                format,
                seed,
            } => cmd_run(config, out, format, seed),
            Command::Norms { space, seq } => cmd_norms(&space, &seq),
            Command::Dnorm {
                space_i,
                space_j,
                matrix,
                budget,
                seed,
            } => cmd_dnorm(&space_i, &space_j, &matrix, budget.as_deref(), seed),
        }
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}

fn cmd_run(
    path: PathBuf,
    out: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
) -> Result<bool, Failure> {
    let mut config = ExperimentConfig::load(&path)?;
    if let Some(s) = seed {
        config = config.with_seed(s);
    }
    let format = format.unwrap_or(config.format);
    let out = out.or_else(|| config.output.clone());
    let report = run(&config);

    let text = report.to_string(format);
    match &out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Config(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    // keep stdout clean for the report when it is going there
    let mut table: Box<dyn Write> = if out.is_some() {
        Box::new(std::io::stdout())
    } else {
        Box::new(std::io::stderr())
    };
    let _ = write_table(&mut table, &report);
    Ok(report.all_pass())
}

fn write_table(w: &mut dyn Write, report: &ExperimentReport) -> std::io::Result<()> {
    let mut per: BTreeMap<&str, (usize, usize, f64)> = BTreeMap::new();
    for r in &report.records {
        let e = per.entry(r.suite.as_str()).or_insert((0, 0, 0.0));
        e.0 += 1;
        e.1 += r.pass as usize;
        e.2 = e.2.max(-r.margin);
    }
    writeln!(
        w,
        "{:<32} {:>8} {:>8} {:>14}",
        "suite", "checks", "passed", "max-violation"
    )?;
    for (suite, (total, passed, viol)) in per {
        let viol = viol + 0.0;
        writeln!(w, "{suite:<32} {total:>8} {passed:>8} {viol:>14.3e}")?;
    }
    let s = &report.summary;
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    writeln!(
        w,
        "total={} passed={} max-violation={:.3e} timestamp={stamp}",
        s.total, s.passed, s.max_violation
    )
}

fn cmd_norms(space: &str, seq: &str) -> Result<bool, Failure> {
    let e: SpaceSpec = space.parse()?;
    let entries = seq
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Config(format!("not a number: `{t}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let xi = Sequence::new(entries)?;
    let value = e.norm(&xi)?;
    let out = serde_json::json!({
        "space": e.to_string(),
        "rearranged": decreasing_rearrangement(&xi).as_slice(),
        "seq_norm": value,
        "concavity_modulus": e.concavity_modulus(),
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&out).expect("plain values")
    );
    Ok(true)
}

fn cmd_dnorm(
    space_i: &str,
    space_j: &str,
    matrix: &PathBuf,
    budget: Option<&str>,
    seed: Option<u64>,
) -> Result<bool, Failure> {
    let i: SpaceSpec = space_i.parse()?;
    let j: SpaceSpec = space_j.parse()?;
    let text = std::fs::read_to_string(matrix)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", matrix.display())))?;
    let a = Matrix::parse_text(&text)?;
    let default = SearchBudget::default();
    let mut b = match budget {
        None => default,
        Some(spec) => {
            let (r, s) = spec
                .split_once(',')
                .ok_or_else(|| Failure::Config(format!("budget must be R,S, got `{spec}`")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::Config(format!("budget must be R,S, got `{spec}`")))
            };
            SearchBudget::new(parse(r)?, parse(s)?, default.seed())?
        }
    };
    if let Some(s) = seed {
        b = b.with_seed(s);
    }
    let report = norm_estimate(&DerivationSpec::new(a), &i, &j, &b)?;
    let record = report.record(&i, &j, b.seed());
    println!(
        "{}",
        serde_json::to_string_pretty(&record).expect("plain values")
    );
    Ok(record.pass)
}
