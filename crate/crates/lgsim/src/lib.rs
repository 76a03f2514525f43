//! Command-line front end for `lgsim-core`: configuration, experiment
//! orchestration and result records.

// `!(x > y)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod record;
pub mod units;

use clap::Parser;
use cli::Cli;
use config::FileConfig;
use error::CliError;
use record::{Format, Provenance, ResultRecord};
use std::ffi::OsString;
use std::io::Write;

pub const SEED_ENV: &str = "LGSIM_SEED";

/// Seed from flag, config, environment, or entropy, in that order. The flag
/// says whether it came from entropy.
fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<(u64, bool), CliError> {
    if let Some(s) = flag.or(file) {
        return Ok((s, false));
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(|s| (s, false)).map_err(|_| {
            error::usage(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))
        }),
        Err(_) => Ok((rand::random(), true)),
    }
}

/// `SOURCE_DATE_EPOCH` when set. Otherwise seeded runs carry no timestamp,
/// keeping their output byte-identical, and entropy runs record the clock.
fn timestamp(entropy: bool) -> Option<u64> {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse().ok())
    {
        return Some(t);
    }
    entropy.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    })
}

pub fn build_record(
    cli: &Cli,
) -> Result<(ResultRecord, Format, Option<std::path::PathBuf>), CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let (seed, entropy) = resolve_seed(cli.seed, file.seed)?;
    let format = cli.format.or(file.format).unwrap_or(Format::Json);
    let output = cli.output.clone().or(file.output.clone());
    let ctx = commands::Context { file, seed };
    let (command, inputs, outputs) = commands::execute(&cli.command, &ctx)?;
    let record = ResultRecord {
        command,
        inputs,
        outputs,
        provenance: Provenance {
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: timestamp(entropy),
        },
    };
    Ok((record, format, output))
}

/// Parses `args`, runs the command and writes the record. Returns the
/// process exit code; diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return 1;
            }
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    let result = build_record(&cli).and_then(|(record, format, output)| match output {
        Some(path) => {
            let mut file = std::fs::File::create(&path).map_err(|source| CliError::Io {
                context: format!("creating {}", path.display()),
                source,
            })?;
            record.write(format, &mut file)
        }
        None => record.write(format, stdout),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
