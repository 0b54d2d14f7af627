use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hypotest::cli::{exit_code, parse_config, run};
use hypotest::Error;

/// Error-exponent regions and scheme simulations for distributed hypothesis testing.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the config's `output`, else `.`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (falls back to HYPOTEST_THREADS).
    #[arg(long, env = "HYPOTEST_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let result = (|| -> hypotest::Result<String> {
        if let Some(t) = args.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        }
        let text = std::fs::read_to_string(&args.config)?;
        let mut config = parse_config(&text)?;
        if let Some(s) = args.seed {
            config.seed = s;
        }
        let a = run(&config, args.out.as_deref())?;
        Ok(format!(
            "{}\nwrote {} and {}",
            a.summary,
            a.csv.display(),
            a.meta.display()
        ))
    })();
    match result {
        Ok(msg) => {
            println!("{msg}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
