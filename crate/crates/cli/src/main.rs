//! `qverify`: batch verification of q-series identities.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qverify", version, about = "Exact coefficient checks for q-series identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// One JSON document per line.
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify identities from `.qid` files and/or the built-in catalog.
    Verify {
        files: Vec<PathBuf>,
        /// Catalog key, or `all` for the default suite. Repeatable.
        #[arg(long = "catalog")]
        catalog: Vec<String>,
        #[arg(long, default_value_t = 32)]
        order: i64,
        /// Catalog parameters, e.g. `k=3,i=2`.
        #[arg(long = "param", value_delimiter = ',')]
        params: Vec<String>,
        /// Coefficients `z^k` with `|k| <= K` are compared for extract identities.
        #[arg(long, default_value_t = 4)]
        zwindow: i64,
        /// Override the support enumeration cap; also admits indefinite bilateral forms.
        #[arg(long = "shell-cap")]
        shell_cap: Option<i64>,
        /// Include both expanded sides in the report.
        #[arg(long)]
        transcript: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Expand an expression to a truncated series.
    Expand {
        expr: String,
        #[arg(long, default_value_t = 32)]
        order: i64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Replay both evaluations of the contour integral for the bilateral double sum.
    ProveMain {
        #[arg(long, default_value_t = 24)]
        order: i64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// List catalog entries.
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify { files, catalog, order, params, zwindow, shell_cap, transcript, format } => {
            let req = commands::VerifyRequest { files, catalog, order, params, zwindow, shell_cap, transcript };
            commands::verify(&req, format == Format::Json)
        }
        Command::Expand { expr, order, format } => commands::expand(&expr, order, format == Format::Json),
        Command::ProveMain { order, format } => commands::prove_main(order, format == Format::Json),
        Command::List { format } => commands::list(format == Format::Json),
    };
    ExitCode::from(code)
}
