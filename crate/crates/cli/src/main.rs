//! `cyclo`: generate cyclotomic sequences, predict and measure their linear
//! complexity, and run verification grids.
//!
//! Exit codes: 0 success, 1 measured disagreement or identity failure,
//! 2 parameter error, 3 closed-form hypothesis violated.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use cyclotomic_lc::lc::{self, LcReport, Methods, Prediction, RootSweep};
use cyclotomic_lc::number_theory::{is_wieferich, odd_primes_up_to, wieferich_primes};
use cyclotomic_lc::{
    BinarySequence, CyclotomicParams, Cyclotomy, FieldCtx, Limits, SequenceFormat,
};
use rayon::prelude::*;
use serde::Serialize;

const EXIT_DISAGREE: u8 = 1;
const EXIT_PARAM: u8 = 2;
const EXIT_HYPOTHESIS: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "cyclo", version, about)]
struct Cli {
    /// Largest admissible period p^n.
    #[arg(long, global = true, env = "CYCLO_CAP_PERIOD", default_value_t = Limits::DEFAULT_PERIOD_CAP)]
    period_cap: u64,

    /// Largest admissible extension degree k of GF(2^k).
    #[arg(long, global = true, env = "CYCLO_CAP_DEGREE", default_value_t = Limits::DEFAULT_DEGREE_CAP)]
    degree_cap: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write one period of the sequence.
    Generate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = SeqFormat::Bits)]
        format: SeqFormat,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also dump every class and both characteristic sets as JSON.
        #[arg(long)]
        classes: Option<PathBuf>,
    },
    /// Closed-form linear complexity.
    Predict {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
    /// Measure linear complexity and compare with the closed form.
    Measure {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        /// Evaluate one root per Frobenius orbit instead of every root.
        #[arg(long)]
        orbits: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
    /// Measure every parameter set in a grid.
    Verify {
        #[arg(long)]
        p_max: u64,
        #[arg(long, default_value_t = 1)]
        n_max: u32,
        /// Sweep every b in [0, d_n) instead of {0, 1, d_n/2}.
        #[arg(long)]
        all_b: bool,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
    },
    /// Check the class-sum identities at roots of unity.
    Identities {
        #[command(flatten)]
        params: ParamArgs,
        /// Families with more cases than this are sampled.
        #[arg(long, default_value_t = 200_000)]
        budget: u64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
        format: ReportFormat,
    },
    /// List Wieferich primes up to a bound.
    Wieferich {
        #[arg(long)]
        limit: u64,
    },
}

#[derive(Args, Debug)]
struct ParamArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    e: u64,
    #[arg(long, default_value_t = 0)]
    b: u64,
    /// Primitive root modulo p^2, or `auto` for the smallest one.
    #[arg(long, default_value = "auto")]
    g: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SeqFormat {
    Bits,
    Hex,
    Csv,
    Json,
}

impl From<SeqFormat> for SequenceFormat {
    fn from(f: SeqFormat) -> Self {
        match f {
            SeqFormat::Bits => SequenceFormat::Bits,
            SeqFormat::Hex => SequenceFormat::Hex,
            SeqFormat::Csv => SequenceFormat::Csv,
            SeqFormat::Json => SequenceFormat::Json,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Bm,
    Gcd,
    Roots,
    All,
}

impl Method {
    fn methods(self, orbits: bool) -> Methods {
        let sweep = if orbits {
            RootSweep::Orbits
        } else {
            RootSweep::Full
        };
        let none = Methods {
            sweep,
            ..Methods::NONE
        };
        match self {
            Self::Bm => Methods { bm: true, ..none },
            Self::Gcd => Methods { gcd: true, ..none },
            Self::Roots => Methods {
                roots: true,
                ..none
            },
            Self::All => Methods {
                sweep,
                ..Methods::ALL
            },
        }
    }
}

/// A failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<cyclotomic_lc::Error> for Failure {
    fn from(e: cyclotomic_lc::Error) -> Self {
        Self::new(EXIT_PARAM, e.to_string())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Self::new(EXIT_PARAM, format!("{e:#}"))
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Self::new(EXIT_PARAM, e.to_string())
    }
}

impl ParamArgs {
    fn resolve(&self) -> Result<CyclotomicParams, Failure> {
        let params = if self.g == "auto" {
            CyclotomicParams::new(self.p, self.n, self.e, self.b)?
        } else {
            let g: u64 = self.g.parse().map_err(|_| {
                Failure::new(
                    EXIT_PARAM,
                    format!("--g must be an integer or `auto`, got {:?}", self.g),
                )
            })?;
            CyclotomicParams::with_generator(self.p, self.n, self.e, self.b, g)?
        };
        Ok(params)
    }
}

fn emit_reports(
    out: &mut impl Write,
    reports: &[LcReport],
    format: ReportFormat,
) -> io::Result<()> {
    match format {
        ReportFormat::Csv => {
            writeln!(out, "{}", LcReport::CSV_HEADER)?;
            for r in reports {
                writeln!(out, "{}", r.to_csv_row())?;
            }
        }
        ReportFormat::Json => {
            let text = if let [single] = reports {
                serde_json::to_string_pretty(single)
            } else {
                serde_json::to_string_pretty(reports)
            };
            writeln!(out, "{}", text.map_err(io::Error::other)?)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct GridSummary<'a> {
    rows: &'a [LcReport],
    skipped_wieferich: &'a [u64],
    all_agree: bool,
}

fn grid(
    p_max: u64,
    n_max: u32,
    all_b: bool,
    limits: &Limits,
) -> Result<(Vec<CyclotomicParams>, Vec<u64>), Failure> {
    let mut params = Vec::new();
    let mut skipped = Vec::new();
    for p in odd_primes_up_to(p_max) {
        if is_wieferich(p)? {
            skipped.push(p);
            continue;
        }
        let mut f = 2;
        while f < p {
            if (p - 1) % f == 0 {
                let e = (p - 1) / f;
                for n in 1..=n_max {
                    match p.checked_pow(n) {
                        Some(pn) if pn <= limits.period_cap => {}
                        _ => break,
                    }
                    let base = CyclotomicParams::new(p, n, e, 0)?;
                    let d = base.d(n);
                    let mut bs: Vec<u64> = if all_b {
                        (0..d).collect()
                    } else {
                        vec![0, 1, d / 2]
                    };
                    bs.sort_unstable();
                    bs.dedup();
                    for b in bs {
                        params.push(base.with_offset(b)?);
                    }
                }
            }
            f *= 2;
        }
    }
    Ok((params, skipped))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let limits = Limits {
        period_cap: cli.period_cap,
        degree_cap: cli.degree_cap,
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();

    match cli.command {
        Command::Generate {
            params,
            format,
            out: path,
            classes,
        } => {
            let params = params.resolve()?;
            let cyc = Cyclotomy::new(params, &limits)?;
            let seq = BinarySequence::from_cyclotomy(&cyc);
            let text = seq.encode(format.into());
            match path {
                Some(path) => {
                    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
                }
                None => out.write_all(text.as_bytes())?,
            }
            if let Some(path) = classes {
                let dump = serde_json::to_string_pretty(&cyc.dump()).map_err(io::Error::other)?;
                fs::write(&path, dump + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            eprintln!("N={} weight={} {}", seq.period(), seq.weight(), params);
            Ok(0)
        }
        Command::Predict { params, format } => {
            let params = params.resolve()?;
            if let Prediction::NotApplicable { .. } = lc::predict_lc(&params) {
                return Err(Failure::new(
                    EXIT_HYPOTHESIS,
                    format!(
                        "theorem hypothesis violated: {} is a Wieferich prime (2^(p-1) = 1 mod p^2)",
                        params.p()
                    ),
                ));
            }
            let report = lc::measure(&params, Methods::NONE, &limits)?;
            emit_reports(&mut out, &[report], format)?;
            Ok(0)
        }
        Command::Measure {
            params,
            method,
            orbits,
            format,
        } => {
            let params = params.resolve()?;
            let report = lc::measure(&params, method.methods(orbits), &limits)?;
            emit_reports(&mut out, std::slice::from_ref(&report), format)?;
            if report.agree {
                Ok(0)
            } else {
                eprintln!("disagreement: {}", report.to_csv_row());
                Ok(EXIT_DISAGREE)
            }
        }
        Command::Verify {
            p_max,
            n_max,
            all_b,
            format,
        } => {
            let (grid, skipped) = grid(p_max, n_max, all_b, &limits)?;
            for p in &skipped {
                eprintln!("skipping Wieferich prime p={p}");
            }
            if grid.is_empty() {
                eprintln!("no parameters in range");
            }
            let mut rows = grid
                .par_iter()
                .map(|params| lc::measure(params, Methods::ALL, &limits))
                .collect::<Result<Vec<_>, _>>()?;
            rows.sort_by_key(|r| (r.params.p, r.params.e, r.params.n, r.params.b));
            let all_agree = rows.iter().all(|r| r.agree);
            match format {
                ReportFormat::Csv => emit_reports(&mut out, &rows, format)?,
                ReportFormat::Json => {
                    let summary = GridSummary {
                        rows: &rows,
                        skipped_wieferich: &skipped,
                        all_agree,
                    };
                    let text = serde_json::to_string_pretty(&summary).map_err(io::Error::other)?;
                    writeln!(out, "{text}")?;
                }
            }
            let bad = rows.iter().filter(|r| !r.agree).count();
            eprintln!("{} rows, {} disagreements", rows.len(), bad);
            Ok(if all_agree { 0 } else { EXIT_DISAGREE })
        }
        Command::Identities {
            params,
            budget,
            format,
        } => {
            let params = params.resolve()?;
            let cyc = Cyclotomy::new(params, &limits)?;
            let ctx = FieldCtx::new(params.p(), params.n(), &limits)?;
            let report = lc::verify_identities_for(&cyc, &ctx, budget)?;
            match format {
                ReportFormat::Json => {
                    let text = serde_json::to_string_pretty(&report).map_err(io::Error::other)?;
                    writeln!(out, "{text}")?;
                }
                ReportFormat::Csv => {
                    writeln!(out, "identity,checked,failures,exhaustive,first_failure")?;
                    for r in &report.results {
                        writeln!(
                            out,
                            "{},{},{},{},{}",
                            r.identity,
                            r.checked,
                            r.failures,
                            r.exhaustive,
                            r.first_failure.as_deref().unwrap_or("")
                        )?;
                    }
                }
            }
            Ok(if report.all_passed() {
                0
            } else {
                EXIT_DISAGREE
            })
        }
        Command::Wieferich { limit } => {
            for p in wieferich_primes(limit)? {
                writeln!(out, "{p}")?;
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
