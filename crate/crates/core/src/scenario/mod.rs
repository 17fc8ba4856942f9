//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! state psi_u
//! experiment fig2
//! angle theta3 0
//! scan theta4 0 180 5
//! output csv
//! ```
//!
//! Directives: `state <kind>`, `experiment <name>`, `angle <name> <deg>`,
//! `scan <name> <from> <to> <step>` (degrees), `beam <1|2> plane <tilt> [phase]`,
//! `beam <1|2> gaussian <tilt> <width> [phase]`, `beam <1|2> off`,
//! `geometry <g11> <g12> <g21> <g22>` (complex as `re+imi`), `channel <1|2>`,
//! `output <csv|json>`. Tilt is in radians per unit length, phases in degrees.

mod report;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

use crate::detection::{default_beams, BeamProfile, Grid};
use crate::error::Error;
use crate::experiments::{AngleGrid, Angles, CascadeGeometry, CorrelationSetup, Experiment};
use crate::fock::StateKind;

pub use report::{
    exit_code, format_number, render, run_spec, selfcheck_rows, Row, DEFAULT_TOLERANCE,
    EXIT_MISMATCH, EXIT_OK, EXIT_USAGE,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error(transparent)]
    Eval(#[from] Error),
}

fn parse_err(line: usize, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse {
        line,
        message: message.into(),
    }
}

fn invalid(message: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation(message.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Fig1,
    Pdc,
    Fig2,
    Fig3,
    Cascade,
    Chsh,
    SameChannel,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Fig1,
        ExperimentKind::Pdc,
        ExperimentKind::Fig2,
        ExperimentKind::Fig3,
        ExperimentKind::Cascade,
        ExperimentKind::Chsh,
        ExperimentKind::SameChannel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Fig1 => "fig1",
            ExperimentKind::Pdc => "pdc",
            ExperimentKind::Fig2 => "fig2",
            ExperimentKind::Fig3 => "fig3",
            ExperimentKind::Cascade => "cascade",
            ExperimentKind::Chsh => "chsh",
            ExperimentKind::SameChannel => "same-channel",
        }
    }

    fn default_state(self) -> StateKind {
        match self {
            ExperimentKind::Fig1 | ExperimentKind::Chsh => StateKind::CircularPair,
            ExperimentKind::Cascade => StateKind::PsiUPrime,
            _ => StateKind::PsiU,
        }
    }

    fn allows_state(self, state: StateKind) -> bool {
        use StateKind::*;
        match self {
            ExperimentKind::Fig1 => state == CircularPair,
            ExperimentKind::Pdc | ExperimentKind::Fig2 | ExperimentKind::Fig3 => {
                matches!(state, PsiE | PsiU)
            }
            ExperimentKind::Cascade => state == PsiUPrime,
            ExperimentKind::Chsh => true,
            ExperimentKind::SameChannel => state != PsiUPrime,
        }
    }

    fn uses_geometry(self, state: StateKind) -> bool {
        self == ExperimentKind::Cascade
            || (self == ExperimentKind::Chsh && state == StateKind::PsiUPrime)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = ExperimentKind::ALL.iter().map(|k| k.name()).collect();
                format!(
                    "unknown experiment `{s}`, expected one of {}",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!(
                "unknown output format `{other}`, expected csv or json"
            )),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

/// Beam as written in a scenario file: phase in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamSpec {
    Off,
    Plane {
        tilt: f64,
        phase_deg: f64,
    },
    Gaussian {
        tilt: f64,
        width: f64,
        phase_deg: f64,
    },
}

impl BeamSpec {
    pub fn profile(&self) -> BeamProfile {
        match *self {
            BeamSpec::Off => BeamProfile::plane_wave(0.0).with_amplitude(0.0),
            BeamSpec::Plane { tilt, phase_deg } => {
                BeamProfile::plane_wave(tilt).with_phase(phase_deg.to_radians())
            }
            BeamSpec::Gaussian {
                tilt,
                width,
                phase_deg,
            } => BeamProfile::gaussian(tilt, width).with_phase(phase_deg.to_radians()),
        }
    }

    fn defaults() -> [BeamSpec; 2] {
        default_beams().map(|b| BeamSpec::Plane {
            tilt: b.tilt,
            phase_deg: b.phase_offset.to_degrees(),
        })
    }
}

impl fmt::Display for BeamSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BeamSpec::Off => f.write_str("off"),
            BeamSpec::Plane { tilt, phase_deg } => write!(f, "plane {tilt} {phase_deg}"),
            BeamSpec::Gaussian {
                tilt,
                width,
                phase_deg,
            } => write!(f, "gaussian {tilt} {width} {phase_deg}"),
        }
    }
}

/// Swept angle, degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpec {
    pub variable: String,
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl ScanSpec {
    pub fn grid_degrees(&self) -> AngleGrid {
        AngleGrid::new(self.from, self.to, self.step)
    }

    pub fn grid_radians(&self) -> AngleGrid {
        AngleGrid::new(
            self.from.to_radians(),
            self.to.to_radians(),
            self.step.to_radians(),
        )
    }
}

/// A fully validated scenario. Angles are kept in degrees as written.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub experiment: ExperimentKind,
    pub state: StateKind,
    pub angles: BTreeMap<String, f64>,
    pub scan: Option<ScanSpec>,
    pub beams: [BeamSpec; 2],
    pub geometry: CascadeGeometry,
    pub channel: u8,
    pub output: OutputFormat,
}

impl ScenarioSpec {
    /// Defaults for everything but the experiment.
    pub fn new(experiment: ExperimentKind) -> Self {
        ScenarioSpec {
            experiment,
            state: experiment.default_state(),
            angles: BTreeMap::new(),
            scan: None,
            beams: BeamSpec::defaults(),
            geometry: CascadeGeometry::default(),
            channel: 1,
            output: OutputFormat::Csv,
        }
    }

    pub fn to_experiment(&self) -> Experiment {
        match self.experiment {
            ExperimentKind::Fig1 => Experiment::Fig1,
            ExperimentKind::Pdc => Experiment::Pdc(self.state),
            ExperimentKind::Fig2 => Experiment::Fig2(self.state),
            ExperimentKind::Fig3 => Experiment::Fig3 {
                state: self.state,
                beams: self.beams.map(|b| b.profile()),
                grid: Grid::default(),
            },
            ExperimentKind::Cascade => Experiment::Cascade(self.geometry),
            ExperimentKind::Chsh => Experiment::Chsh(match self.state {
                StateKind::PsiUPrime => CorrelationSetup::Cascade(self.geometry),
                s => CorrelationSetup::for_state(s),
            }),
            ExperimentKind::SameChannel => Experiment::SameChannel {
                state: self.state,
                channel: self.channel,
            },
        }
    }

    /// Fixed angles converted to radians.
    pub fn angles_radians(&self) -> Angles {
        self.angles
            .iter()
            .map(|(n, d)| (n.clone(), d.to_radians()))
            .collect()
    }

    /// Canonical scenario text; parsing it yields an equal spec.
    pub fn to_text(&self) -> String {
        let mut out = format!("experiment {}\nstate {}\n", self.experiment, self.state);
        for (name, deg) in &self.angles {
            out.push_str(&format!("angle {name} {deg}\n"));
        }
        if let Some(s) = &self.scan {
            out.push_str(&format!(
                "scan {} {} {} {}\n",
                s.variable, s.from, s.to, s.step
            ));
        }
        if self.experiment == ExperimentKind::Fig3 {
            for (i, b) in self.beams.iter().enumerate() {
                out.push_str(&format!("beam {} {b}\n", i + 1));
            }
        }
        if self.experiment.uses_geometry(self.state) {
            let g = &self.geometry;
            out.push_str(&format!(
                "geometry {} {} {} {}\n",
                format_complex(g.g11),
                format_complex(g.g12),
                format_complex(g.g21),
                format_complex(g.g22)
            ));
        }
        if self.experiment == ExperimentKind::SameChannel {
            out.push_str(&format!("channel {}\n", self.channel));
        }
        out.push_str(&format!("output {}\n", self.output));
        out
    }
}

impl FromStr for ScenarioSpec {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, ScenarioError> {
        parse_scenario(s)
    }
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses `re`, `re+imi`, `re-imi`, `imi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let finite = |x: f64| x.is_finite().then_some(x);
    let Some(body) = s.strip_suffix('i') else {
        return s
            .parse::<f64>()
            .ok()
            .and_then(finite)
            .map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (finite(body[..k].parse().ok()?)?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => finite(x.parse().ok()?)?,
    };
    Some(Complex64::new(re, im))
}

fn number(line: usize, token: &str, what: &str) -> Result<f64, ScenarioError> {
    token
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| {
            parse_err(
                line,
                format!("expected {what} (a finite number), found `{token}`"),
            )
        })
}

fn arity(
    line: usize,
    key: &str,
    args: &[&str],
    min: usize,
    max: usize,
    usage: &str,
) -> Result<(), ScenarioError> {
    if args.len() < min || args.len() > max {
        return Err(parse_err(line, format!("`{key}` expects: {key} {usage}")));
    }
    Ok(())
}

fn set_once<T>(
    slot: &mut Option<(usize, T)>,
    line: usize,
    key: &str,
    value: T,
) -> Result<(), ScenarioError> {
    if let Some((first, _)) = slot {
        return Err(invalid(format!(
            "line {line}: duplicate `{key}` (first given on line {first})"
        )));
    }
    *slot = Some((line, value));
    Ok(())
}

fn parse_beam(line: usize, args: &[&str]) -> Result<(usize, BeamSpec), ScenarioError> {
    let usage = "<1|2> plane <tilt> [phase] | <1|2> gaussian <tilt> <width> [phase] | <1|2> off";
    arity(line, "beam", args, 2, 5, usage)?;
    let index = match args[0] {
        "1" => 0,
        "2" => 1,
        other => {
            return Err(parse_err(
                line,
                format!("expected beam index 1 or 2, found `{other}`"),
            ))
        }
    };
    let rest = &args[2..];
    let spec = match args[1] {
        "off" => {
            arity(line, "beam", rest, 0, 0, usage)?;
            BeamSpec::Off
        }
        "plane" => {
            arity(line, "beam", rest, 1, 2, usage)?;
            BeamSpec::Plane {
                tilt: number(line, rest[0], "tilt")?,
                phase_deg: rest
                    .get(1)
                    .map(|p| number(line, p, "phase"))
                    .transpose()?
                    .unwrap_or(0.0),
            }
        }
        "gaussian" => {
            arity(line, "beam", rest, 2, 3, usage)?;
            let width = number(line, rest[1], "width")?;
            if width <= 0.0 {
                return Err(invalid(format!(
                    "line {line}: gaussian width must be > 0, got {width}"
                )));
            }
            BeamSpec::Gaussian {
                tilt: number(line, rest[0], "tilt")?,
                width,
                phase_deg: rest
                    .get(2)
                    .map(|p| number(line, p, "phase"))
                    .transpose()?
                    .unwrap_or(0.0),
            }
        }
        other => {
            return Err(parse_err(
                line,
                format!("expected beam kind plane, gaussian or off, found `{other}`"),
            ))
        }
    };
    Ok((index, spec))
}

/// Parses and validates a scenario. Syntax problems are [`ScenarioError::Parse`]
/// with a 1-based line number; semantic ones are [`ScenarioError::Validation`].
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec, ScenarioError> {
    let mut experiment = None;
    let mut state = None;
    let mut output = None;
    let mut scan = None;
    let mut geometry = None;
    let mut channel = None;
    let mut beams: [Option<(usize, BeamSpec)>; 2] = [None, None];
    let mut angles: Vec<(usize, String, f64)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let key = tokens.next().expect("non-empty line");
        let args: Vec<&str> = tokens.collect();
        match key {
            "experiment" => {
                arity(line, key, &args, 1, 1, "<name>")?;
                let kind = args[0].parse::<ExperimentKind>().map_err(|m| parse_err(line, m))?;
                set_once(&mut experiment, line, key, kind)?;
            }
            "state" => {
                arity(line, key, &args, 1, 1, "<kind>")?;
                let kind = args[0]
                    .parse::<StateKind>()
                    .map_err(|e| parse_err(line, format!("{e}, expected circular_pair, psi_e, psi_u or psi_u_prime")))?;
                set_once(&mut state, line, key, kind)?;
            }
            "output" => {
                arity(line, key, &args, 1, 1, "<csv|json>")?;
                let fmt = args[0].parse::<OutputFormat>().map_err(|m| parse_err(line, m))?;
                set_once(&mut output, line, key, fmt)?;
            }
            "angle" => {
                arity(line, key, &args, 2, 2, "<name> <degrees>")?;
                let deg = number(line, args[1], "an angle in degrees")?;
                if let Some((first, ..)) = angles.iter().find(|(_, n, _)| n == args[0]) {
                    return Err(invalid(format!(
                        "line {line}: angle `{}` already set on line {first}",
                        args[0]
                    )));
                }
                angles.push((line, args[0].to_string(), deg));
            }
            "scan" => {
                arity(line, key, &args, 4, 4, "<name> <from> <to> <step>")?;
                let s = ScanSpec {
                    variable: args[0].to_string(),
                    from: number(line, args[1], "scan start in degrees")?,
                    to: number(line, args[2], "scan end in degrees")?,
                    step: number(line, args[3], "scan step in degrees")?,
                };
                if s.step <= 0.0 {
                    return Err(invalid(format!("line {line}: scan step must be > 0, got {}", s.step)));
                }
                if s.to < s.from {
                    return Err(invalid(format!(
                        "line {line}: empty scan range {} .. {}",
                        s.from, s.to
                    )));
                }
                set_once(&mut scan, line, key, s)?;
            }
            "beam" => {
                let (i, b) = parse_beam(line, &args)?;
                set_once(&mut beams[i], line, "beam", b)?;
            }
            "geometry" => {
                arity(line, key, &args, 4, 4, "<g11> <g12> <g21> <g22>")?;
                let mut g = [Complex64::new(0.0, 0.0); 4];
                for (slot, tok) in g.iter_mut().zip(&args) {
                    *slot = parse_complex(tok).ok_or_else(|| {
                        parse_err(line, format!("expected a complex number like 1+0.5i, found `{tok}`"))
                    })?;
                }
                let geom = CascadeGeometry {
                    g11: g[0],
                    g12: g[1],
                    g21: g[2],
                    g22: g[3],
                };
                set_once(&mut geometry, line, key, geom)?;
            }
            "channel" => {
                arity(line, key, &args, 1, 1, "<1|2>")?;
                let ch = match args[0] {
                    "1" => 1,
                    "2" => 2,
                    other => return Err(parse_err(line, format!("expected channel 1 or 2, found `{other}`"))),
                };
                set_once(&mut channel, line, key, ch)?;
            }
            other => {
                return Err(parse_err(
                    line,
                    format!(
                        "unknown directive `{other}`, expected one of state, experiment, angle, scan, beam, geometry, channel, output"
                    ),
                ))
            }
        }
    }

    let (_, kind) = experiment.ok_or_else(|| invalid("missing `experiment` directive"))?;
    let mut spec = ScenarioSpec::new(kind);

    if let Some((line, s)) = state {
        if !kind.allows_state(s) {
            return Err(invalid(format!(
                "line {line}: experiment {kind} does not accept state {s}"
            )));
        }
        spec.state = s;
    }
    if let Some((_, o)) = output {
        spec.output = o;
    }

    let exp = spec.to_experiment();
    for (line, name, deg) in angles {
        exp.check_angle(&name)
            .map_err(|e| invalid(format!("line {line}: {e}")))?;
        spec.angles.insert(name, deg);
    }
    if let Some((line, s)) = scan {
        exp.check_angle(&s.variable)
            .map_err(|e| invalid(format!("line {line}: {e}")))?;
        if spec.angles.contains_key(&s.variable) {
            return Err(invalid(format!(
                "line {line}: `{}` is both fixed and scanned",
                s.variable
            )));
        }
        spec.scan = Some(s);
    }
    for (i, b) in beams.into_iter().enumerate() {
        if let Some((line, b)) = b {
            if kind != ExperimentKind::Fig3 {
                return Err(invalid(format!("line {line}: `beam` only applies to fig3")));
            }
            spec.beams[i] = b;
        }
    }
    if let Some((line, g)) = geometry {
        if !kind.uses_geometry(spec.state) {
            return Err(invalid(format!(
                "line {line}: `geometry` only applies to cascade and chsh with psi_u_prime"
            )));
        }
        spec.geometry = g;
    }
    if let Some((line, ch)) = channel {
        if kind != ExperimentKind::SameChannel {
            return Err(invalid(format!(
                "line {line}: `channel` only applies to same-channel"
            )));
        }
        spec.channel = ch;
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fig1_scan_spec() {
        let spec = parse_scenario("experiment fig1\nangle theta1 0\nscan theta2 0 180 5").unwrap();
        assert_eq!(spec.experiment, ExperimentKind::Fig1);
        assert_eq!(spec.state, StateKind::CircularPair);
        assert_eq!(
            spec.scan.as_ref().unwrap().grid_degrees().len().unwrap(),
            37
        );
        assert_eq!(spec.angles["theta1"], 0.0);
    }

    #[test]
    fn state_and_comments() {
        let text = "# discriminator\nstate psi_e\nexperiment fig2   # split channel 2\n\nangle theta3 10\n";
        let spec = parse_scenario(text).unwrap();
        assert_eq!(spec.experiment, ExperimentKind::Fig2);
        assert_eq!(spec.state, StateKind::PsiE);
    }

    #[test]
    fn bad_number_reports_line() {
        match parse_scenario("experiment fig1\nangle theta1 banana") {
            Err(ScenarioError::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains("banana"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_errors() {
        for (text, line) in [
            ("experiment fig9", 1),
            ("experiment fig1\nfrobnicate 3", 2),
            ("experiment fig1\nstate psi_q", 2),
            ("experiment fig1\noutput xml", 2),
            ("experiment fig1\nscan theta2 0 180", 2),
            ("experiment fig3\nbeam 3 plane 1", 2),
            ("experiment fig3\nbeam 1 wobble 1", 2),
            ("experiment cascade\ngeometry 1 0 0 x", 2),
            ("experiment fig1\nangle theta1 inf", 2),
        ] {
            match parse_scenario(text) {
                Err(ScenarioError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn validation_errors() {
        for text in [
            "state psi_e",
            "experiment fig3\nbeam 1 gaussian 1 0",
            "experiment fig3\nbeam 1 gaussian 1 -2 0",
            "experiment fig1\nstate psi_e",
            "experiment cascade\nstate psi_u",
            "experiment fig1\nangle theta3 10",
            "experiment fig1\nscan theta2 0 180 0",
            "experiment fig1\nscan theta2 180 0 5",
            "experiment fig1\nangle theta2 0\nscan theta2 0 180 5",
            "experiment fig1\nexperiment fig1",
            "experiment fig1\nangle theta1 0\nangle theta1 5",
            "experiment fig1\nbeam 1 off",
            "experiment pdc\ngeometry 1 1 1 1",
            "experiment fig2\nchannel 2",
            "experiment fig3\nscan theta1 0 10 1",
        ] {
            assert!(
                matches!(parse_scenario(text), Err(ScenarioError::Validation(_))),
                "{text}: {:?}",
                parse_scenario(text)
            );
        }
    }

    #[test]
    fn complex_literals() {
        let c = |re, im| Some(Complex64::new(re, im));
        assert_eq!(parse_complex("1"), c(1.0, 0.0));
        assert_eq!(parse_complex("0.5+0.25i"), c(0.5, 0.25));
        assert_eq!(parse_complex("-1-2i"), c(-1.0, -2.0));
        assert_eq!(parse_complex("2i"), c(0.0, 2.0));
        assert_eq!(parse_complex("-i"), c(0.0, -1.0));
        assert_eq!(parse_complex("i"), c(0.0, 1.0));
        assert_eq!(parse_complex("1e-3+2e-1i"), c(1e-3, 2e-1));
        assert_eq!(parse_complex("-1e+2-3E-2i"), c(-100.0, -0.03));
        assert_eq!(parse_complex("1+"), None);
        assert_eq!(parse_complex("abc"), None);
        assert_eq!(parse_complex("NaN"), None);
    }

    #[test]
    fn to_text_round_trips_defaults() {
        for kind in ExperimentKind::ALL {
            let spec = ScenarioSpec::new(kind);
            assert_eq!(parse_scenario(&spec.to_text()).unwrap(), spec, "{kind}");
        }
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-720.0..720.0f64, (-50i32..50).prop_map(|k| k as f64 * 7.5)]
    }

    fn complex() -> impl Strategy<Value = Complex64> {
        (-3.0..3.0f64, prop_oneof![Just(0.0), -3.0..3.0f64])
            .prop_map(|(re, im)| Complex64::new(re, im))
    }

    fn beam() -> impl Strategy<Value = BeamSpec> {
        prop_oneof![
            Just(BeamSpec::Off),
            (finite(), finite()).prop_map(|(tilt, phase_deg)| BeamSpec::Plane { tilt, phase_deg }),
            (finite(), 0.01..10.0f64, finite()).prop_map(|(tilt, width, phase_deg)| {
                BeamSpec::Gaussian {
                    tilt,
                    width,
                    phase_deg,
                }
            }),
        ]
    }

    fn spec() -> impl Strategy<Value = ScenarioSpec> {
        (
            0usize..ExperimentKind::ALL.len(),
            0usize..4,
            proptest::collection::vec(finite(), 4),
            proptest::option::of((0usize..4, finite(), 0.0..400.0f64, 0.5..30.0f64)),
            (beam(), beam()),
            proptest::collection::vec(complex(), 4),
            1u8..=2,
            any::<bool>(),
        )
            .prop_filter_map(
                "state must suit experiment",
                |(e, s, angle_vals, scan, beams, g, channel, json)| {
                    let kind = ExperimentKind::ALL[e];
                    let state = StateKind::ALL[s];
                    if !kind.allows_state(state) {
                        return None;
                    }
                    let mut spec = ScenarioSpec::new(kind);
                    spec.state = state;
                    let names = spec.to_experiment().angle_names();
                    let scanned = scan.and_then(|(i, from, span, step)| {
                        (!names.is_empty()).then(|| ScanSpec {
                            variable: names[i % names.len()].to_string(),
                            from,
                            to: from + span,
                            step,
                        })
                    });
                    for (name, v) in names.iter().zip(angle_vals) {
                        if scanned.as_ref().is_none_or(|s| s.variable != *name) {
                            spec.angles.insert(name.to_string(), v);
                        }
                    }
                    spec.scan = scanned;
                    if kind == ExperimentKind::Fig3 {
                        spec.beams = [beams.0, beams.1];
                    }
                    if kind.uses_geometry(state) {
                        spec.geometry = CascadeGeometry {
                            g11: g[0],
                            g12: g[1],
                            g21: g[2],
                            g22: g[3],
                        };
                    }
                    if kind == ExperimentKind::SameChannel {
                        spec.channel = channel;
                    }
                    if json {
                        spec.output = OutputFormat::Json;
                    }
                    Some(spec)
                },
            )
    }

    proptest! {
        #[test]
        fn format_then_parse_is_identity(spec in spec()) {
            let text = spec.to_text();
            let back = parse_scenario(&text).unwrap();
            prop_assert_eq!(back, spec);
        }

        #[test]
        fn complex_format_round_trips(z in complex()) {
            prop_assert_eq!(parse_complex(&format_complex(z)), Some(z));
        }
    }
}
