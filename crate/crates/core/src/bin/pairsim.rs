use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pairsim::scenario::{
    exit_code, parse_scenario, render, run_spec, selfcheck_rows, OutputFormat, Row, ScenarioSpec,
    DEFAULT_TOLERANCE, EXIT_USAGE,
};

#[derive(Parser)]
#[command(
    name = "pairsim",
    version,
    about = "Exact predictions for photon-pair polarization experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Table format; overrides the scenario's `output` directive.
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,

    /// Write the table here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Largest |value − closed_form| accepted before exiting with status 2.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE, allow_negative_numbers = true)]
    tolerance: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario file.
    Run {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate a scenario given as flags.
    Scan {
        /// fig1, pdc, fig2, fig3, cascade, chsh or same-channel.
        #[arg(long)]
        experiment: String,
        /// circular_pair, psi_e, psi_u or psi_u_prime.
        #[arg(long)]
        state: Option<String>,
        /// Fixed angle, degrees.
        #[arg(long = "angle", value_name = "NAME=DEG")]
        angles: Vec<String>,
        /// Swept angle, degrees.
        #[arg(long, value_name = "NAME:FROM:TO:STEP")]
        scan: Option<String>,
        /// Beam directive arguments, e.g. "1 plane 9.42 0".
        #[arg(long = "beam", value_name = "BEAM", allow_hyphen_values = true)]
        beams: Vec<String>,
        /// Four complex couplings, e.g. "1 0 0 1".
        #[arg(long, allow_hyphen_values = true)]
        geometry: Option<String>,
        /// Channel (1 or 2) for same-channel.
        #[arg(long)]
        channel: Option<u8>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// CHSH value for a source state (analyzer angles in degrees).
    Chsh {
        #[arg(long, default_value = "circular_pair")]
        state: String,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        a_prime: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        b: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        b_prime: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        geometry: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the built-in acceptance table.
    Selfcheck {
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn scan_text(
    experiment: &str,
    state: Option<&str>,
    angles: &[String],
    scan: Option<&str>,
    beams: &[String],
    geometry: Option<&str>,
    channel: Option<u8>,
) -> Result<String, String> {
    let mut text = format!("experiment {experiment}\n");
    if let Some(s) = state {
        text.push_str(&format!("state {s}\n"));
    }
    for a in angles {
        let (name, deg) = a
            .split_once('=')
            .ok_or_else(|| format!("--angle expects NAME=DEG, got `{a}`"))?;
        text.push_str(&format!("angle {name} {deg}\n"));
    }
    if let Some(s) = scan {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(format!("--scan expects NAME:FROM:TO:STEP, got `{s}`"));
        }
        text.push_str(&format!("scan {}\n", parts.join(" ")));
    }
    for b in beams {
        text.push_str(&format!("beam {b}\n"));
    }
    if let Some(g) = geometry {
        text.push_str(&format!("geometry {g}\n"));
    }
    if let Some(c) = channel {
        text.push_str(&format!("channel {c}\n"));
    }
    Ok(text)
}

fn emit(rows: &[Row], format: OutputFormat, output: &OutputArgs) -> Result<i32, String> {
    let table = render(rows, format);
    match &output.out {
        Some(path) => {
            fs::write(path, table).map_err(|e| format!("cannot write {}: {e}", path.display()))?
        }
        None => print!("{table}"),
    }
    Ok(exit_code(rows, output.tolerance))
}

fn run_scenario(spec: ScenarioSpec, output: &OutputArgs) -> Result<i32, String> {
    let format = match &output.format {
        Some(f) => f.parse().map_err(|e: String| e)?,
        None => spec.output,
    };
    let rows = run_spec(&spec).map_err(|e| e.to_string())?;
    emit(&rows, format, output)
}

fn parse(text: &str, origin: &str) -> Result<ScenarioSpec, String> {
    parse_scenario(text).map_err(|e| format!("{origin}: {e}"))
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Run { file, output } => {
            let text = fs::read_to_string(&file)
                .map_err(|e| format!("cannot read {}: {e}", file.display()))?;
            run_scenario(parse(&text, &file.display().to_string())?, &output)
        }
        Command::Scan {
            experiment,
            state,
            angles,
            scan,
            beams,
            geometry,
            channel,
            output,
        } => {
            let text = scan_text(
                &experiment,
                state.as_deref(),
                &angles,
                scan.as_deref(),
                &beams,
                geometry.as_deref(),
                channel,
            )?;
            run_scenario(parse(&text, "flags")?, &output)
        }
        Command::Chsh {
            state,
            a,
            a_prime,
            b,
            b_prime,
            geometry,
            output,
        } => {
            let angles: Vec<String> = [
                ("a", a),
                ("a_prime", a_prime),
                ("b", b),
                ("b_prime", b_prime),
            ]
            .into_iter()
            .filter_map(|(n, v)| v.map(|v| format!("{n}={v}")))
            .collect();
            let text = scan_text(
                "chsh",
                Some(&state),
                &angles,
                None,
                &[],
                geometry.as_deref(),
                None,
            )?;
            run_scenario(parse(&text, "flags")?, &output)
        }
        Command::Selfcheck { output } => {
            let rows = selfcheck_rows().map_err(|e| e.to_string())?;
            let format = match &output.format {
                Some(f) => f.parse().map_err(|e: String| e)?,
                None => OutputFormat::Csv,
            };
            emit(&rows, format, &output)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap reports usage errors with 2, which is reserved for mismatches here
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
