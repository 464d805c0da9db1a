//! Command-line experiment runner for trapped-ion rotation fidelity.
//!
//! Modes: `sweep` (one parameter set), `fig2` and `fig3` (figure presets),
//! `converge` (truncation study) and `dump` (matrix export). Results go to a
//! CSV file or standard output behind a `#` header holding the resolved
//! configuration.

pub mod config;
pub mod error;
pub mod output;
pub mod sweep;

use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Arg, ArgAction, Command};

pub use config::{parse_config, resolve, InitialState, Mode, PurePhases, RunConfig, Truncation};
pub use error::{CliError, CliResult};
pub use sweep::{converge, run_sweep, ConvergeReport, CurveSpec, Row};

fn help_for(key: &str) -> &'static str {
    match key {
        "mode" => "sweep | fig2 | fig3 | converge | dump",
        "theta-points" => "number of pulse areas on the grid [64]",
        "theta-min" => "first pulse area; accepts multiples of pi such as pi/2 [0]",
        "theta-max" => "last pulse area, inclusive [2pi]",
        "eta-ld" => "comma-separated Lamb-Dicke parameters [0.1]",
        "rabi" => "Rabi frequency in units of the trap frequency [100]",
        "detuning" => "drive detuning in units of the trap frequency [0]",
        "t-ratio" => "comma-separated k_B T / hbar omega values for thermal states",
        "initial-state" => "ground | spread | custom | thermal | thermal-pure [ground]",
        "amplitudes" => "comma-separated complex motional amplitudes for custom",
        "alpha" => "ground qubit amplitude, e.g. 0.6 or 0.6+0.8i [1/sqrt 2]",
        "beta" => "excited qubit amplitude [1/sqrt 2]",
        "n-max" => "highest trap level kept, or auto [auto]",
        "auto-truncation" => "pick n-max from the initial state and eta-ld",
        "seed" => "seed for random motional phases [0]",
        "pure-phases" => "zero | random phases of the thermal-pure state [zero]",
        "output" => "CSV path; - or absent writes to standard output",
        _ => "",
    }
}

/// Argument parser. Values stay strings so that number validation and exit
/// codes are handled by the config layer.
pub fn command() -> Command {
    let mut cmd = Command::new("trapfid")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Rotation fidelity of a trapped-ion qubit under motional decoherence")
        .arg(
            Arg::new("config")
                .long("config")
                .short('c')
                .value_name("FILE")
                .help("key = value file; flags override it"),
        );
    for key in config::KEYS {
        let arg = Arg::new(key).long(key).help(help_for(key));
        cmd = cmd.arg(if key == "auto-truncation" {
            arg.action(ArgAction::SetTrue)
        } else {
            arg.value_name("VALUE").allow_hyphen_values(true)
        });
    }
    cmd
}

/// Parse `args` (program name first), run the selected mode and write the
/// result. Help and version text go to `stdout` as well.
pub fn run_from_args<I, T>(args: I, stdout: &mut impl Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    write!(stdout, "{}", e.render())?;
                    Ok(())
                }
                ErrorKind::UnknownArgument => Err(CliError::UnknownKey(
                    e.get(clap::error::ContextKind::InvalidArg)
                        .map(|v| v.to_string())
                        .unwrap_or_else(|| e.to_string()),
                )),
                ErrorKind::InvalidValue | ErrorKind::NoEquals => {
                    Err(CliError::malformed("flag", "", e.render().to_string().trim().to_string()))
                }
                _ => Err(CliError::Config(e.render().to_string().trim().to_string())),
            }
        }
    };
    let mut flags = Vec::new();
    for key in config::KEYS {
        if key == "auto-truncation" {
            if matches.get_flag(key) {
                flags.push((key.to_string(), "true".to_string()));
            }
        } else if let Some(v) = matches.get_one::<String>(key) {
            flags.push((key.to_string(), v.clone()));
        }
    }
    let file = matches.get_one::<String>("config").map(PathBuf::from);
    let cfg = parse_config(&flags, file.as_deref())?;
    let bytes = render(&cfg)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, bytes)?,
        None => stdout.write_all(&bytes)?,
    }
    Ok(())
}

/// Run the configured mode and return the full output text.
pub fn render(cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    match cfg.mode {
        Mode::Sweep | Mode::Fig2 | Mode::Fig3 => output::write_sweep(cfg, &run_sweep(cfg)?, &mut buf)?,
        Mode::Converge => output::write_converge(cfg, &converge(cfg)?, &mut buf)?,
        Mode::Dump => output::write_dump(cfg, &mut buf)?,
    }
    Ok(buf)
}
