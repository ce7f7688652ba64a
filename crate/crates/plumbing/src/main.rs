use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use plumbing::cli::{config_from_cli, config_from_replay, run, Cli, OutputFormat, RunConfig, Sinks};
use plumbing::Error;

fn execute(cli: &Cli) -> Result<bool, Error> {
    let (cfg, sinks, format): (RunConfig, Sinks, OutputFormat) = match (&cli.replay, &cli.command) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.clone(), source })?;
            (config_from_replay(&text)?, Sinks::default(), OutputFormat::Json)
        }
        (None, Some(cmd)) => {
            let (c, s) = config_from_cli(cmd)?;
            (c, s, cli.format)
        }
        (Some(_), Some(_)) => return Err(Error::Usage("--replay takes no subcommand".into())),
        (None, None) => return Err(Error::Usage("a subcommand or --replay is required".into())),
    };
    let pool = plumbing::parallel::pool(cli.jobs);
    let out = pool.install(|| run(&cfg, &sinks))?;
    let text = match format {
        OutputFormat::Json => out.document(&cfg)?,
        OutputFormat::Human => out.human.clone(),
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(text.as_bytes());
    Ok(out.success)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
