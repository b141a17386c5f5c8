use std::io::{IsTerminal, Write};
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use upo::cli::{self, Command, Options};

/// Lint and inspect ontologies of fictional, prescribed, simulated and future entities.
#[derive(Parser)]
#[command(name = "upo", version)]
struct Args {
    /// Do not load the built-in upper-level prelude.
    #[arg(long, global = true)]
    no_prelude: bool,
    /// Print the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse, lint and ground every ICE in a document.
    Check { path: PathBuf },
    /// Print the grounding tree of one ICE.
    Trace { path: PathBuf, ice: String },
    /// Record that an individual was built from a blueprint.
    Realize {
        path: PathBuf,
        blueprint: String,
        individual: String,
        /// Where to write the updated document.
        #[arg(long)]
        out: PathBuf,
    },
    /// Resolve a "this"/"next" temporal expression at an utterance time.
    Resolve {
        path: PathBuf,
        ice: String,
        /// Utterance instant, `YYYY-MM-DDThh:mm:ss` in UTC.
        #[arg(long)]
        at: String,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let command = match args.command {
        Cmd::Check { path } => Command::Check { path },
        Cmd::Trace { path, ice } => Command::Trace { path, ice },
        Cmd::Realize {
            path,
            blueprint,
            individual,
            out,
        } => Command::Realize {
            path,
            blueprint,
            individual,
            out,
        },
        Cmd::Resolve { path, ice, at } => Command::Resolve { path, ice, at },
    };
    let options = Options {
        prelude: !args.no_prelude,
        json: args.json,
        color: !args.json && std::env::var_os("UPO_NO_COLOR").is_none() && std::io::stdout().is_terminal(),
    };

    panic::set_hook(Box::new(|_| {}));
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| cli::run(&command, options))).unwrap_or_else(|payload| {
        let message = payload
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| payload.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".to_owned());
        cli::crash_outcome(&command, options, &message)
    });

    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(outcome.exit_code())
}
