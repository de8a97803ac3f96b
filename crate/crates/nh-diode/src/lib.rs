//! Command-line front end for `nh-diode-core`: configuration, parallel
//! sweeps and CSV/JSON output.

pub mod angle;
pub mod cli;
pub mod commands;
pub mod config;
pub mod output;

use anyhow::Result;

use cli::{Cli, Command};
use config::{OutputOptions, UsageError};
use output::{Report, Status};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NO_HITS: u8 = 1;
pub const EXIT_IDENTITY_BREACH: u8 = 2;
pub const EXIT_BOUNDARY_CONTACT: u8 = 3;
pub const EXIT_SINGULAR: u8 = 4;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 64;

/// Resolves a parsed command line into its report and output options.
pub fn execute(cli: &Cli) -> Result<(Report, OutputOptions)> {
    let (common, job): (_, Box<dyn Fn() -> Result<Report> + Send + Sync>) = match &cli.command {
        Command::Amplitudes(a) => {
            let f = a.common.file()?;
            let c = a.resolve(&f)?;
            (a.common.resolve(&f)?, Box::new(move || commands::amplitudes::run(&c)))
        }
        Command::Fig3(a) => {
            let f = a.common.file()?;
            let c = a.resolve(&f)?;
            (a.common.resolve(&f)?, Box::new(move || commands::fig3::run(&c)))
        }
        Command::SingularityScan(a) => {
            let f = a.common.file()?;
            let c = a.resolve(&f)?;
            (a.common.resolve(&f)?, Box::new(move || commands::scan::run(&c)))
        }
        Command::Audit(a) => {
            let f = a.common.file()?;
            let c = a.resolve(&f)?;
            (a.common.resolve(&f)?, Box::new(move || commands::audit::run(&c)))
        }
        Command::Evolve(a) => {
            let f = a.common.file()?;
            let c = a.resolve(&f)?;
            (a.common.resolve(&f)?, Box::new(move || commands::evolve::run(&c)))
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.threads {
        pool = pool.num_threads(n);
    }
    let report = pool.build()?.install(job)?;
    Ok((report, common))
}

/// Runs and writes; returns the status of a completed run.
pub fn run(cli: &Cli) -> Result<Status> {
    let (report, opts) = execute(cli)?;
    output::write_report(&report, &opts)?;
    Ok(report.status)
}

/// Exit code for a failed run.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<nh_diode_core::Error>() {
        Some(nh_diode_core::Error::BoundaryContact { .. }) => EXIT_BOUNDARY_CONTACT,
        Some(nh_diode_core::Error::SingularDenominator { .. } | nh_diode_core::Error::SingularSystem { .. }) => {
            EXIT_SINGULAR
        }
        Some(
            nh_diode_core::Error::InvalidParameter(_)
            | nh_diode_core::Error::PacketTooWide
            | nh_diode_core::Error::DimensionCap { .. },
        ) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}
