use std::io::{self, BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use ctxcalc::stream::DEFAULT_BUDGET;
use ctxcalc_cli::{Mode, Session};

/// Evaluates context, context-set and stream expressions interactively or
/// from a script.
#[derive(Debug, Parser)]
#[command(name = "ctxcalc", version)]
struct Args {
    /// Seed for the choice operator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print one JSON record per result.
    #[arg(long)]
    json: bool,
    /// Run the commands in this file, then exit.
    #[arg(long)]
    script: Option<PathBuf>,
    /// Demand budget of each stream query.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mode = if args.json { Mode::Json } else { Mode::Plain };
    let mut session = Session::new(args.seed).with_budget(args.budget).with_mode(mode);
    match &args.script {
        Some(path) => script(&mut session, path),
        None => repl(&mut session),
    }
}

fn script(session: &mut Session, path: &Path) -> ExitCode {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match session.run_script(path, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn repl(session: &mut Session) -> ExitCode {
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut out = io::stdout();
    let mut line = String::new();
    loop {
        if interactive {
            print!("> ");
            let _ = out.flush();
        }
        line.clear();
        match stdin.lock().read_line(&mut line) {
            Ok(0) => return ExitCode::SUCCESS,
            Ok(_) => {}
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        }
        match session.run_command(&line) {
            Ok(reply) => {
                for l in &reply.lines {
                    println!("{l}");
                }
                if reply.quit {
                    return ExitCode::SUCCESS;
                }
            }
            Err(e) => eprintln!("error: {e}"),
        }
    }
}
