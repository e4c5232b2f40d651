//! `largespin` command-line front end.
//!
//! Spins are given as the integer `--two-j` (J = two_j/2). Exit status is 0 on
//! success, 2 for invalid arguments and 3 for numerical failures.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use commands::*;
use output::Report;

#[derive(Parser, Debug)]
#[command(name = "largespin", version, about = "Tunneling spectra of a large spin in a symmetric crystal field")]
struct Cli {
    #[command(flatten)]
    out: OutArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Site configurations.
    Geometry {
        #[command(subcommand)]
        cmd: GeometryCmd,
    },
    /// Effective N-site tunneling Hamiltonians.
    Effective {
        #[command(subcommand)]
        cmd: EffectiveCmd,
    },
    /// Double-group decomposition of the site representation.
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Full (2J+1)-dimensional cubic crystal field.
    Exact {
        #[command(subcommand)]
        cmd: ExactCmd,
    },
    /// WKB actions.
    Wkb {
        #[command(subcommand)]
        cmd: WkbCmd,
    },
    /// Thermodynamics.
    Thermo {
        #[command(subcommand)]
        cmd: ThermoCmd,
    },
    /// Time evolution.
    Dynamics {
        #[command(subcommand)]
        cmd: DynamicsCmd,
    },
    /// Order-of-magnitude estimators (CGS inputs).
    Estimate {
        #[command(subcommand)]
        cmd: EstimateCmd,
    },
}

#[derive(Subcommand, Debug)]
enum GeometryCmd {
    /// Vertices, edges and plaquettes of a configuration.
    Dump(GeometryDump),
}

#[derive(Subcommand, Debug)]
enum EffectiveCmd {
    /// Levels of one effective Hamiltonian, checked against the closed form where one exists.
    Spectrum(EffectiveSpectrum),
    /// Zero-field spectra for 2J = 0..=two_j.
    Sweep(EffectiveSweep),
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    /// Irrep multiplicities.
    Decompose(GroupDecompose),
}

#[derive(Subcommand, Debug)]
enum ExactCmd {
    /// Eigenvalues and multiplets at one angle.
    Spectrum(ExactSpectrum),
    /// Ground-multiplet statistics over a φ grid.
    Sweep(ExactSweep),
}

#[derive(Subcommand, Debug)]
enum WkbCmd {
    /// Action per unit J between neighbouring 6-fold minima.
    COfU(WkbCOfU),
}

#[derive(Subcommand, Debug)]
enum ThermoCmd {
    /// Zero-field susceptibility curve.
    Chi(ThermoChi),
}

#[derive(Subcommand, Debug)]
enum DynamicsCmd {
    /// M(t) after release from one site.
    Oscillate(DynamicsOscillate),
}

#[derive(Subcommand, Debug)]
enum EstimateCmd {
    /// Phonon relaxation time.
    Tau(EstimateTau),
    /// Dipolar line broadening.
    Dipolar(EstimateDipolar),
}

enum Failure {
    Lib(largespin::Error),
    Io(std::io::Error),
}

fn params<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

fn run_cmd(cmd: &Cmd) -> largespin::Result<(Report, Value)> {
    Ok(match cmd {
        Cmd::Geometry { cmd: GeometryCmd::Dump(a) } => (geometry_dump(a)?, params(a)),
        Cmd::Effective { cmd: EffectiveCmd::Spectrum(a) } => (effective_spectrum(a)?, params(a)),
        Cmd::Effective { cmd: EffectiveCmd::Sweep(a) } => (effective_sweep(a)?, params(a)),
        Cmd::Group { cmd: GroupCmd::Decompose(a) } => (group_decompose(a)?, params(a)),
        Cmd::Exact { cmd: ExactCmd::Spectrum(a) } => (exact_spectrum(a)?, params(a)),
        Cmd::Exact { cmd: ExactCmd::Sweep(a) } => (exact_sweep(a)?, params(a)),
        Cmd::Wkb { cmd: WkbCmd::COfU(a) } => (wkb_c_of_u(a)?, params(a)),
        Cmd::Thermo { cmd: ThermoCmd::Chi(a) } => (thermo_chi(a)?, params(a)),
        Cmd::Dynamics { cmd: DynamicsCmd::Oscillate(a) } => (dynamics_oscillate(a)?, params(a)),
        Cmd::Estimate { cmd: EstimateCmd::Tau(a) } => (estimate_tau(a)?, params(a)),
        Cmd::Estimate { cmd: EstimateCmd::Dipolar(a) } => (estimate_dipolar(a)?, params(a)),
    })
}

fn run(cli: &Cli, argv: &[String]) -> Result<(), Failure> {
    let (report, mut parameters) = run_cmd(&cli.cmd).map_err(Failure::Lib)?;
    parameters["format"] = params(&cli.out.format);
    let bytes = report.render(cli.out.format).map_err(Failure::Io)?;
    output::emit(&bytes, cli.out.out.as_deref(), argv, parameters).map_err(Failure::Io)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("largespin: {e}");
            ExitCode::from(if e.is_user_input() { 2 } else { 3 })
        }
        Err(Failure::Io(e)) => {
            eprintln!("largespin: cannot write output: {e}");
            ExitCode::from(2)
        }
    }
}
