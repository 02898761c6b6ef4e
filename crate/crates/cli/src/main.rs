mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qzeta::continuation::Method;
use serde::Serialize;

/// q-analogues of multiple zeta values and polylogarithms: evaluation,
/// residues, q→1 limits and identity checks.
#[derive(Parser)]
#[command(name = "qzeta", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Global {
    /// Working precision in decimal digits.
    #[arg(long, global = true, env = "QZETA_PREC", default_value_t = 40)]
    pub prec: u32,
    /// Series truncation tolerance [default: 10^-prec].
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the random cases of verification suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Direct,
    Continued,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Direct => Method::Direct,
            MethodArg::Continued => Method::Continued,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Closed,
    Numeric,
    Both,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate ζ_q(s) or, with --polylog, Li_{q;n}(z).
    Eval {
        /// Comma list; entries real or re+imi.
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        #[arg(long, default_value = "0.5")]
        q: String,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
        #[arg(long)]
        polylog: bool,
        #[arg(long)]
        n: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
    },
    /// Residue of ζ_q in the last variable at an integer pole.
    Residue {
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value = "0.5")]
        q: String,
        #[arg(long, value_enum, default_value_t = Mode::Closed)]
        mode: Mode,
    },
    /// q↑1 limit by extrapolation on q_j = 1 - 2^-j.
    Limit {
        /// zeta:<s-list> | residue:<point> | value:<point>[:R]
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        /// Number of ladder points.
        #[arg(long, default_value_t = 8)]
        levels: u32,
    },
    /// Run an identity-verification suite.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Poles and indeterminacies of the double zeta function at integer points.
    Table {
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        #[arg(long, default_value_t = 4)]
        nmax: u32,
        /// Also list the q-side closed forms at this q.
        #[arg(long)]
        q: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum Suite {
    /// ζ_q(w1)ζ_q(w2) against the q-stuffle expansion.
    SeriesShuffle {
        #[arg(long, allow_hyphen_values = true)]
        w1: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        w2: Option<String>,
        #[arg(long, default_value = "0.5")]
        q: String,
        #[arg(long, default_value_t = 3)]
        cases: usize,
    },
    /// ζ_q(m)ζ_q(n) = A_q(m,n) + A_q(n,m) + B_q(m,n).
    IntegralShuffle {
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, default_value = "0.5")]
        q: String,
        #[arg(long, default_value_t = 3)]
        cases: usize,
    },
    /// q-derivatives of q-polylogarithms.
    Qdiff {
        #[arg(long)]
        n: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        /// 1-based variable index [default: all].
        #[arg(long)]
        j: Option<usize>,
        #[arg(long, default_value = "0.7")]
        q: String,
        #[arg(long, default_value_t = 5)]
        cases: usize,
    },
    /// ∫_0^x D_q f d_qt = f(x) - f(0).
    Qftc {
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, default_value = "0.6")]
        q: String,
        #[arg(long, default_value_t = 6)]
        cases: usize,
    },
    /// Product of two Jackson iterated integrals against their q-shuffle.
    QshuffleLemma {
        /// Poles of the first word (0 stands for d_qt/t).
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
        #[arg(long, default_value = "1")]
        upper: String,
        #[arg(long, default_value = "0.7")]
        q: String,
        #[arg(long, default_value_t = 4)]
        cases: usize,
    },
    /// Li_{q;γ}(q^{e+γ}) against its reduction to ζ_q values.
    LemmaLiShift {
        #[arg(long)]
        e: Option<u32>,
        #[arg(long)]
        gamma: Option<u32>,
        #[arg(long, default_value = "0.5")]
        q: String,
        #[arg(long, default_value_t = 4)]
        cases: usize,
    },
}

fn emit(g: &Global, r: &report::Report) -> std::io::Result<()> {
    let text = match g.format {
        Format::Json => r.to_json(),
        Format::Table => r.to_table(),
    };
    match &g.out {
        Some(path) => std::fs::write(path, text + "\n"),
        None => {
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other,
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let g = cli.global.clone();
    match commands::run(cli.global, cli.command) {
        Ok(r) => match emit(&g, &r) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("qzeta: cannot write report: {e}");
                ExitCode::from(1)
            }
        },
        Err(f) => {
            if let Some(r) = &f.report {
                let _ = emit(&g, r);
            }
            eprintln!("qzeta: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
