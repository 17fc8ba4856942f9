//! End-to-end setups: the split circular pair, the two PDC pair models, the
//! cascade pair, the channel-splitting discriminator, the two-beam
//! interference test, and CHSH combinations built on top of them.
//!
//! Every observable carries its analytic prediction when one is known, so a
//! caller can check the engine against it.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::detection::{
    coincidence_rate, conditional_state, cross_channel_rate, default_beams, intensity_map,
    same_channel_double_rate, singles_rate, visibility, BeamKind, BeamProfile, Grid,
};
use crate::error::{Error, Result};
use crate::fock::{
    composite_annihilators, named_state, Frequency, LinearForm, ModeId, Polarization, StateKind,
    ZERO_EPS,
};
use crate::jones::{beamsplitter_5050, hwp, ChannelField};

pub const UNITS: &str = "dimensionless rate (B = 1)";

/// Angle assignments in radians, keyed by angle name.
pub type Angles = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub observable: &'static str,
    /// Angles in radians.
    pub params: Vec<(String, f64)>,
    pub value: f64,
    pub closed_form: Option<f64>,
}

impl ScenarioResult {
    pub fn abs_error(&self) -> Option<f64> {
        self.closed_form.map(|c| (self.value - c).abs())
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Beam splitter followed by a half-wave plate at 0 in the reflected
/// channel 1 and one at π/4 in the transmitted channel 2. `source` arrives on
/// channel 2; channel 1's input port is empty.
pub fn fig1_optics(source: &ChannelField) -> Result<(ChannelField, ChannelField)> {
    let (ch2, ch1) = beamsplitter_5050(&source.clone().with_channel(2), &ChannelField::vacuum(1))?;
    Ok((ch1.apply_jones(&hwp(0.0)), ch2.apply_jones(&hwp(FRAC_PI_4))))
}

/// Channel fields for the circular pair after the split-and-rotate optics.
pub fn fig1_fields() -> (ChannelField, ChannelField) {
    fig1_optics(&ChannelField::source(2)).expect("distinct channel tags")
}

/// Channel fields seen by the detectors for the two PDC pair models.
///
/// `PsiE` uses the free fields of channels 1 and 2. `PsiU` uses the
/// composite modes b_1, b_2 routed through the same optics as the circular
/// pair, expressed over the channel modes.
pub fn pdc_fields(kind: StateKind) -> Result<(ChannelField, ChannelField)> {
    match kind {
        StateKind::PsiE => Ok((ChannelField::source(1), ChannelField::source(2))),
        StateKind::PsiU => {
            let [b1, b2] = composite_annihilators();
            fig1_optics(&ChannelField::new(2, b1, b2))
        }
        other => Err(Error::UnsupportedState {
            experiment: "pdc",
            state: other.to_string(),
        }),
    }
}

/// Geometry-dependent couplings of the two cascade frequencies into the
/// two channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeGeometry {
    pub g11: Complex64,
    pub g12: Complex64,
    pub g21: Complex64,
    pub g22: Complex64,
}

impl Default for CascadeGeometry {
    fn default() -> Self {
        let one = Complex64::new(1.0, 0.0);
        CascadeGeometry {
            g11: one,
            g12: one,
            g21: one,
            g22: one,
        }
    }
}

fn spectral_field(frequency: Frequency) -> (LinearForm, LinearForm) {
    (
        LinearForm::mode(ModeId::spectral(frequency, Polarization::V)),
        LinearForm::mode(ModeId::spectral(frequency, Polarization::H)),
    )
}

pub fn cascade_fields(geom: &CascadeGeometry) -> (ChannelField, ChannelField) {
    let (v1, h1) = spectral_field(Frequency::Omega1);
    let (v2, h2) = spectral_field(Frequency::Omega2);
    let mix = |channel, a: Complex64, b: Complex64| {
        ChannelField::new(channel, v1.combine(a, &v2, b), h1.combine(a, &h2, b))
    };
    (mix(1, geom.g11, geom.g12), mix(2, geom.g21, geom.g22))
}

/// Channel fields used for photon-counting questions about a source state.
pub fn channel_fields(kind: StateKind) -> (ChannelField, ChannelField) {
    match kind {
        StateKind::CircularPair => fig1_fields(),
        StateKind::PsiE | StateKind::PsiU => pdc_fields(kind).expect("pdc state"),
        StateKind::PsiUPrime => cascade_fields(&CascadeGeometry::default()),
    }
}

fn sin2(d: f64) -> f64 {
    d.sin().powi(2)
}

fn cos2(d: f64) -> f64 {
    d.cos().powi(2)
}

fn params(pairs: &[(&str, f64)]) -> Vec<(String, f64)> {
    pairs.iter().map(|(n, v)| (n.to_string(), *v)).collect()
}

pub fn fig1_coincidence(theta1: f64, theta2: f64) -> ScenarioResult {
    let psi = named_state(StateKind::CircularPair);
    let (ch1, ch2) = fig1_fields();
    let value = coincidence_rate(&psi, &ch1.polarizer(theta1), &ch2.polarizer(theta2));
    ScenarioResult {
        observable: "coincidence",
        params: params(&[("theta1", theta1), ("theta2", theta2)]),
        value,
        closed_form: Some(0.25 * sin2(theta1 - theta2)),
    }
}

/// Singles rate at detector 1 of the state left after detector 1 already
/// absorbed one photon. The second detection uses the unit-normalized
/// analyzer operator.
pub fn fig1_conditional_check(theta1: f64, normalized: bool) -> Result<f64> {
    let psi = named_state(StateKind::CircularPair);
    let (ch1, _) = fig1_fields();
    let detector = ch1.polarizer(theta1);
    let prime = conditional_state(&psi, &detector, normalized)?;
    let bare = detector.scale_real(1.0 / detector.weight().sqrt());
    Ok(singles_rate(&prime, &bare))
}

pub fn pdc_coincidence(kind: StateKind, theta1: f64, theta2: f64) -> Result<ScenarioResult> {
    let (ch1, ch2) = pdc_fields(kind)?;
    let psi = named_state(kind);
    let value = coincidence_rate(&psi, &ch1.polarizer(theta1), &ch2.polarizer(theta2));
    let scale = if kind == StateKind::PsiE { 0.5 } else { 0.25 };
    Ok(ScenarioResult {
        observable: "coincidence",
        params: params(&[("theta1", theta1), ("theta2", theta2)]),
        value,
        closed_form: Some(scale * sin2(theta1 - theta2)),
    })
}

/// Channel 2 split again into channels 3 and 4, analyzers at `theta3`,
/// `theta4`, coincidences between 3 and 4.
pub fn fig2_split_coincidence(kind: StateKind, theta3: f64, theta4: f64) -> Result<ScenarioResult> {
    let (_, ch2) = pdc_fields(kind).map_err(|_| Error::UnsupportedState {
        experiment: "fig2",
        state: kind.to_string(),
    })?;
    let (ch3, ch4) = beamsplitter_5050(&ch2.with_channel(3), &ChannelField::vacuum(4))?;
    let psi = named_state(kind);
    let value = coincidence_rate(&psi, &ch3.polarizer(theta3), &ch4.polarizer(theta4));
    let closed = match kind {
        StateKind::PsiU => cos2(theta3 - theta4) / 16.0,
        _ => 0.0,
    };
    Ok(ScenarioResult {
        observable: "split_coincidence",
        params: params(&[("theta3", theta3), ("theta4", theta4)]),
        value,
        closed_form: Some(closed),
    })
}

/// Detector operators of the two overlapped beams in the interference test.
///
/// Channel 1 passes a horizontal analyzer and a half-wave plate that turns it
/// vertical, channel 2 a vertical analyzer; each beam then takes a mirror.
pub fn fig3_forms(kind: StateKind) -> Result<[LinearForm; 2]> {
    let (ch1, ch2) = pdc_fields(kind).map_err(|_| Error::UnsupportedState {
        experiment: "fig3",
        state: kind.to_string(),
    })?;
    let beam1 = ChannelField::polarized(1, &ch1.polarizer(FRAC_PI_2), FRAC_PI_2)
        .apply_jones(&hwp(FRAC_PI_4))
        .mirror();
    let beam2 = ChannelField::polarized(2, &ch2.polarizer(0.0), 0.0).mirror();
    Ok([
        beam1.v().scale(beam1.phase()),
        beam2.v().scale(beam2.phase()),
    ])
}

fn is_dark(b: &BeamProfile) -> bool {
    b.amplitude == 0.0
}

fn fig3_closed_form(kind: StateKind, beams: &[BeamProfile; 2], grid: &Grid) -> Option<f64> {
    let plane = |b: &BeamProfile| b.kind == BeamKind::PlaneWave;
    if beams.iter().any(is_dark) && beams.iter().all(|b| plane(b) || is_dark(b)) {
        return Some(0.0);
    }
    match kind {
        StateKind::PsiE if beams.iter().all(plane) => Some(0.0),
        StateKind::PsiU if *beams == default_beams() && *grid == Grid::default() => Some(1.0),
        _ => None,
    }
}

pub fn fig3_visibility(
    kind: StateKind,
    beams: [BeamProfile; 2],
    grid: Grid,
) -> Result<ScenarioResult> {
    let [f1, f2] = fig3_forms(kind)?;
    let psi = named_state(kind);
    let map = intensity_map(&psi, [&f1, &f2], beams, grid)?;
    Ok(ScenarioResult {
        observable: "visibility",
        params: Vec::new(),
        value: visibility(&map)?,
        closed_form: fig3_closed_form(kind, &beams, &grid),
    })
}

/// Coincidences between ω1 in channel 1 and ω2 in channel 2.
pub fn cascade_coincidence(geom: &CascadeGeometry, theta1: f64, theta2: f64) -> ScenarioResult {
    let (ch1, ch2) = cascade_fields(geom);
    let l1 = ch1
        .polarizer(theta1)
        .restrict(|m| m.frequency() == Some(Frequency::Omega1));
    let l2 = ch2
        .polarizer(theta2)
        .restrict(|m| m.frequency() == Some(Frequency::Omega2));
    let psi = named_state(StateKind::PsiUPrime);
    let g = (geom.g11 * geom.g22).norm_sqr();
    ScenarioResult {
        observable: "coincidence",
        params: params(&[("theta1", theta1), ("theta2", theta2)]),
        value: coincidence_rate(&psi, &l1, &l2),
        closed_form: Some(0.5 * g * cos2(theta1 - theta2)),
    }
}

fn counting_fields(
    kind: StateKind,
    experiment: &'static str,
) -> Result<(ChannelField, ChannelField)> {
    match kind {
        StateKind::PsiUPrime => Err(Error::UnsupportedState {
            experiment,
            state: kind.to_string(),
        }),
        _ => Ok(channel_fields(kind)),
    }
}

/// Probability that both photons of the pair end up in `channel` (1 or 2).
///
/// Only the beam-splitter and PDC setups conserve photon number across the
/// two channels; the cascade couplings do not, so it is rejected.
pub fn same_channel_probability(kind: StateKind, channel: u8) -> Result<f64> {
    let (ch1, ch2) = counting_fields(kind, "same-channel")?;
    let field = match channel {
        1 => ch1,
        2 => ch2,
        other => return Err(Error::UnknownChannel(other)),
    };
    Ok(same_channel_double_rate(&named_state(kind), &field) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeProbabilities {
    pub both_first: f64,
    pub both_second: f64,
    pub split: f64,
}

impl OutcomeProbabilities {
    pub fn total(&self) -> f64 {
        self.both_first + self.both_second + self.split
    }
}

/// Where the two photons go: both in channel 1, both in 2, or one each.
pub fn outcome_probabilities(kind: StateKind) -> Result<OutcomeProbabilities> {
    let (ch1, ch2) = counting_fields(kind, "same-channel")?;
    let psi = named_state(kind);
    Ok(OutcomeProbabilities {
        both_first: same_channel_double_rate(&psi, &ch1) / 2.0,
        both_second: same_channel_double_rate(&psi, &ch2) / 2.0,
        split: cross_channel_rate(&psi, &ch1, &ch2),
    })
}

/// A two-analyzer coincidence setup usable for correlation estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrelationSetup {
    Fig1,
    Pdc(StateKind),
    Cascade(CascadeGeometry),
}

impl CorrelationSetup {
    pub fn for_state(kind: StateKind) -> Self {
        match kind {
            StateKind::CircularPair => CorrelationSetup::Fig1,
            StateKind::PsiE | StateKind::PsiU => CorrelationSetup::Pdc(kind),
            StateKind::PsiUPrime => CorrelationSetup::Cascade(CascadeGeometry::default()),
        }
    }

    pub fn state(&self) -> StateKind {
        match self {
            CorrelationSetup::Fig1 => StateKind::CircularPair,
            CorrelationSetup::Pdc(k) => *k,
            CorrelationSetup::Cascade(_) => StateKind::PsiUPrime,
        }
    }

    pub fn rate(&self, theta1: f64, theta2: f64) -> Result<f64> {
        Ok(match self {
            CorrelationSetup::Fig1 => fig1_coincidence(theta1, theta2).value,
            CorrelationSetup::Pdc(k) => pdc_coincidence(*k, theta1, theta2)?.value,
            CorrelationSetup::Cascade(g) => cascade_coincidence(g, theta1, theta2).value,
        })
    }

    /// Analytic correlation: `−cos 2Δ` for the sin² setups, `+cos 2Δ` for the cascade.
    pub fn closed_form_e(&self, theta1: f64, theta2: f64) -> Option<f64> {
        let c = (2.0 * (theta1 - theta2)).cos();
        match self {
            CorrelationSetup::Cascade(g) if (g.g11 * g.g22).norm_sqr() <= ZERO_EPS => None,
            CorrelationSetup::Cascade(_) => Some(c),
            _ => Some(-c),
        }
    }
}

/// Ratio estimator over the four analyzer settings `θ`, `θ + π/2`.
pub fn correlation_e(setup: &CorrelationSetup, theta1: f64, theta2: f64) -> Result<f64> {
    let (p1, p2) = (theta1 + FRAC_PI_2, theta2 + FRAC_PI_2);
    let same = setup.rate(theta1, theta2)? + setup.rate(p1, p2)?;
    let cross = setup.rate(theta1, p2)? + setup.rate(p1, theta2)?;
    let total = same + cross;
    if total < ZERO_EPS {
        return Err(Error::DarkDenominator { total });
    }
    Ok((same - cross) / total)
}

/// Analyzer settings of a CHSH combination, radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshAngles {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
}

impl Default for ChshAngles {
    fn default() -> Self {
        ChshAngles {
            a: 0.0,
            a_prime: PI / 4.0,
            b: PI / 8.0,
            b_prime: 3.0 * PI / 8.0,
        }
    }
}

fn chsh_combine(mut e: impl FnMut(f64, f64) -> Result<f64>, x: &ChshAngles) -> Result<f64> {
    Ok(e(x.a, x.b)? - e(x.a, x.b_prime)? + e(x.a_prime, x.b)? + e(x.a_prime, x.b_prime)?)
}

/// `S = E(a,b) − E(a,b') + E(a',b) + E(a',b')`.
pub fn chsh_s(setup: &CorrelationSetup, angles: &ChshAngles) -> Result<f64> {
    chsh_combine(|t1, t2| correlation_e(setup, t1, t2), angles)
}

pub fn chsh_closed_form(setup: &CorrelationSetup, angles: &ChshAngles) -> Option<f64> {
    chsh_combine(
        |t1, t2| setup.closed_form_e(t1, t2).ok_or(Error::AllDark),
        angles,
    )
    .ok()
}

/// A named experiment with everything but its analyzer angles fixed.
#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Fig1,
    Pdc(StateKind),
    Fig2(StateKind),
    Fig3 {
        state: StateKind,
        beams: [BeamProfile; 2],
        grid: Grid,
    },
    Cascade(CascadeGeometry),
    Chsh(CorrelationSetup),
    SameChannel {
        state: StateKind,
        channel: u8,
    },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Pdc(_) => "pdc",
            Experiment::Fig2(_) => "fig2",
            Experiment::Fig3 { .. } => "fig3",
            Experiment::Cascade(_) => "cascade",
            Experiment::Chsh(_) => "chsh",
            Experiment::SameChannel { .. } => "same-channel",
        }
    }

    pub fn angle_names(&self) -> &'static [&'static str] {
        match self {
            Experiment::Fig1 | Experiment::Pdc(_) | Experiment::Cascade(_) => &["theta1", "theta2"],
            Experiment::Fig2(_) => &["theta3", "theta4"],
            Experiment::Chsh(_) => &["a", "a_prime", "b", "b_prime"],
            Experiment::Fig3 { .. } | Experiment::SameChannel { .. } => &[],
        }
    }

    /// Radians. Zero except the canonical CHSH settings.
    pub fn default_angle(&self, name: &str) -> f64 {
        let chsh = ChshAngles::default();
        match (self, name) {
            (Experiment::Chsh(_), "a_prime") => chsh.a_prime,
            (Experiment::Chsh(_), "b") => chsh.b,
            (Experiment::Chsh(_), "b_prime") => chsh.b_prime,
            _ => 0.0,
        }
    }

    pub fn check_angle(&self, name: &str) -> Result<()> {
        if self.angle_names().contains(&name) {
            Ok(())
        } else {
            Err(Error::UnknownAngle {
                experiment: self.name(),
                name: name.to_string(),
            })
        }
    }

    pub fn evaluate(&self, angles: &Angles) -> Result<ScenarioResult> {
        for name in angles.keys() {
            self.check_angle(name)?;
        }
        let get = |name: &str| {
            angles
                .get(name)
                .copied()
                .unwrap_or_else(|| self.default_angle(name))
        };
        match self {
            Experiment::Fig1 => Ok(fig1_coincidence(get("theta1"), get("theta2"))),
            Experiment::Pdc(k) => pdc_coincidence(*k, get("theta1"), get("theta2")),
            Experiment::Fig2(k) => fig2_split_coincidence(*k, get("theta3"), get("theta4")),
            Experiment::Fig3 { state, beams, grid } => fig3_visibility(*state, *beams, *grid),
            Experiment::Cascade(g) => Ok(cascade_coincidence(g, get("theta1"), get("theta2"))),
            Experiment::Chsh(setup) => {
                let x = ChshAngles {
                    a: get("a"),
                    a_prime: get("a_prime"),
                    b: get("b"),
                    b_prime: get("b_prime"),
                };
                Ok(ScenarioResult {
                    observable: "S",
                    params: params(&[
                        ("a", x.a),
                        ("a_prime", x.a_prime),
                        ("b", x.b),
                        ("b_prime", x.b_prime),
                    ]),
                    value: chsh_s(setup, &x)?,
                    closed_form: chsh_closed_form(setup, &x),
                })
            }
            Experiment::SameChannel { state, channel } => {
                let closed = match state {
                    StateKind::PsiE => Some(0.0),
                    StateKind::PsiU | StateKind::CircularPair => Some(0.25),
                    StateKind::PsiUPrime => None,
                };
                Ok(ScenarioResult {
                    observable: "same_channel_probability",
                    params: Vec::new(),
                    value: same_channel_probability(*state, *channel)?,
                    closed_form: closed,
                })
            }
        }
    }
}

/// Inclusive arithmetic progression `from, from + step, …, ≤ to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleGrid {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl AngleGrid {
    pub fn new(from: f64, to: f64, step: f64) -> Self {
        AngleGrid { from, to, step }
    }

    pub fn len(&self) -> Result<usize> {
        if !(self.from.is_finite() && self.to.is_finite() && self.step.is_finite()) {
            return Err(Error::MalformedGrid("non-finite scan bounds".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::MalformedGrid(format!(
                "scan step must be > 0, got {}",
                self.step
            )));
        }
        if self.to < self.from {
            return Err(Error::MalformedGrid(format!(
                "empty scan range [{}, {}]",
                self.from, self.to
            )));
        }
        // slack absorbs rounding when the range is an exact multiple of the step
        Ok(((self.to - self.from) / self.step + 1e-9).floor() as usize + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len().map_or(true, |n| n == 0)
    }

    pub fn points(&self) -> Result<Vec<f64>> {
        let n = self.len()?;
        Ok((0..n).map(|i| self.from + i as f64 * self.step).collect())
    }
}

/// Evaluates `experiment` with `variable` swept over `grid` and the other
/// angles taken from `fixed`. Rows come back in grid order.
pub fn angle_scan(
    experiment: &Experiment,
    fixed: &Angles,
    variable: &str,
    grid: &AngleGrid,
) -> Result<Vec<ScenarioResult>> {
    experiment.check_angle(variable)?;
    let points = grid.points()?;
    points
        .par_iter()
        .map(|&x| {
            let mut angles = fixed.clone();
            angles.insert(variable.to_string(), x);
            experiment.evaluate(&angles)
        })
        .collect()
}
