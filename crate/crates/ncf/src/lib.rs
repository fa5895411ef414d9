//! Command-line front end for `ncf-core`.
//!
//! Exit codes: 0 success, 2 usage or invalid input, 3 precision exhausted,
//! 4 numerical non-convergence, 1 I/O failure.

pub mod cli;
mod commands;
pub mod formats;

use std::ffi::OsString;
use std::io::{self, Write};

use clap::Parser;
use ncf_core::expansion::PrecisionPolicy;
use ncf_core::NcfParams;

use cli::{Cli, Global};
use formats::Format;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] ncf_core::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(ncf_core::Error::PrecisionExhausted(_)) => EXIT_PRECISION,
            CliError::Core(ncf_core::Error::NonConvergence(_)) => EXIT_NONCONVERGENCE,
            CliError::Core(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

pub const PRECISION_ENV: &str = "NCF_PRECISION";
pub const DEFAULT_PRECISION: u32 = 256;
const MIN_PRECISION: u32 = 64;

pub type CliResult<T> = Result<T, CliError>;

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    n: Option<u64>,
    pub format: Format,
    pub policy: PrecisionPolicy,
    pub seed: u64,
    pub grid: usize,
}

impl Context {
    fn from_global(g: &Global) -> CliResult<Self> {
        let precision = match g.precision {
            Some(bits) => bits,
            None => precision_from_env()?,
        };
        Ok(Self {
            n: g.n,
            format: g.format,
            policy: PrecisionPolicy { initial_bits: precision, max_bits: g.max_precision.max(precision) },
            seed: g.seed,
            grid: g.grid,
        })
    }

    pub fn params(&self) -> CliResult<NcfParams> {
        let n = self.n.ok_or_else(|| CliError::Usage("--n is required".into()))?;
        Ok(NcfParams::new(n)?)
    }
}

/// `NCF_PRECISION`, or the default precision when it is unset.
fn precision_from_env() -> CliResult<u32> {
    let Some(raw) = std::env::var_os(PRECISION_ENV) else {
        return Ok(DEFAULT_PRECISION);
    };
    raw.to_str()
        .and_then(|s| s.trim().parse::<u32>().ok())
        .filter(|&bits| bits >= MIN_PRECISION)
        .ok_or_else(|| {
            CliError::Usage(format!("{PRECISION_ENV}={raw:?} is not a precision of at least {MIN_PRECISION} bits"))
        })
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let result = Context::from_global(&cli.global)
        .and_then(|ctx| commands::dispatch(&cli.command, &ctx, out, err))
        .and_then(|()| Ok(out.flush()?));
    match result {
        Ok(()) => EXIT_OK,
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
