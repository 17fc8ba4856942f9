//! Result tables, their CSV/JSON rendering, and the built-in self-check.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;

use super::{OutputFormat, ScenarioError, ScenarioSpec};
use crate::detection::{default_beams, Grid};
use crate::experiments::{
    angle_scan, cascade_coincidence, chsh_s, fig1_coincidence, fig1_conditional_check,
    fig2_split_coincidence, fig3_visibility, outcome_probabilities, pdc_coincidence,
    same_channel_probability, CascadeGeometry, ChshAngles, CorrelationSetup, ScenarioResult,
};
use crate::fock::{
    add, form_commutator, inner, named_state, pair_creation_forms, FockKet, StateKind,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MISMATCH: i32 = 2;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// One output line.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub param: String,
    pub value: f64,
    pub closed_form: Option<f64>,
}

impl Row {
    pub fn new(param: impl Into<String>, value: f64, closed_form: Option<f64>) -> Self {
        Row {
            param: param.into(),
            value,
            closed_form,
        }
    }

    pub fn abs_error(&self) -> Option<f64> {
        self.closed_form.map(|c| (self.value - c).abs())
    }
}

/// `%.12g`-style formatting with `.` as the decimal separator.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        trim_fraction(format!("{:.*}", (11 - exp) as usize, x))
    } else {
        format!("{}e{exp}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt_number(x: Option<f64>) -> String {
    x.map(format_number).unwrap_or_default()
}

#[derive(Serialize)]
struct JsonRow<'a> {
    param: &'a str,
    value: f64,
    closed_form: Option<f64>,
    abs_error: Option<f64>,
}

pub fn render(rows: &[Row], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("param,value,closed_form,abs_error\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    r.param,
                    format_number(r.value),
                    opt_number(r.closed_form),
                    opt_number(r.abs_error())
                ));
            }
            out
        }
        OutputFormat::Json => {
            let json: Vec<_> = rows
                .iter()
                .map(|r| JsonRow {
                    param: &r.param,
                    value: r.value,
                    closed_form: r.closed_form,
                    abs_error: r.abs_error(),
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&json).expect("plain data serializes");
            s.push('\n');
            s
        }
    }
}

/// [`EXIT_MISMATCH`] if any row strays from its closed form by more than
/// `tolerance` (or is NaN), otherwise [`EXIT_OK`].
pub fn exit_code(rows: &[Row], tolerance: f64) -> i32 {
    let bad = rows
        .iter()
        .filter_map(Row::abs_error)
        .any(|e| e.is_nan() || e > tolerance);
    if bad {
        EXIT_MISMATCH
    } else {
        EXIT_OK
    }
}

fn scan_label(variable: &str, radians: f64) -> String {
    format!("{variable}={}", format_number(radians.to_degrees()))
}

/// Evaluates a scenario into table rows.
pub fn run_spec(spec: &ScenarioSpec) -> Result<Vec<Row>, ScenarioError> {
    let experiment = spec.to_experiment();
    let fixed = spec.angles_radians();
    let to_row = |label: String, r: ScenarioResult| Row::new(label, r.value, r.closed_form);
    match &spec.scan {
        Some(scan) => {
            let results = angle_scan(&experiment, &fixed, &scan.variable, &scan.grid_radians())?;
            Ok(results
                .into_iter()
                .map(|r| {
                    let x = r.param(&scan.variable).expect("scanned angle recorded");
                    to_row(scan_label(&scan.variable, x), r)
                })
                .collect())
        }
        None => {
            let r = experiment.evaluate(&fixed)?;
            Ok(vec![to_row(r.observable.to_string(), r)])
        }
    }
}

/// 73 equally spaced angle differences covering one full turn.
fn delta_grid() -> impl Iterator<Item = f64> {
    (0..73).map(|k| -PI + k as f64 * (2.0 * PI / 72.0))
}

fn max_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |m, x| {
        if x.abs() > m || x.is_nan() {
            x.abs()
        } else {
            m
        }
    })
}

fn max_amplitude_gap(a: &FockKet, b: &FockKet) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    max_abs(add(a, b, one, -one).iter().map(|(_, x)| x.norm()))
}

/// The acceptance table: one or more rows per criterion, each comparing an
/// engine value against its analytic target.
pub fn selfcheck_rows() -> Result<Vec<Row>, ScenarioError> {
    let mut rows = Vec::new();
    let base = 0.3;

    // 1: sin² law behind the splitter
    rows.push(Row::new(
        "c1:fig1_max_abs_error_73pt",
        max_abs(delta_grid().map(|d| {
            fig1_coincidence(base + d, base)
                .abs_error()
                .unwrap_or(f64::NAN)
        })),
        Some(0.0),
    ));
    rows.push(Row::new(
        "c1:fig1_theta1=0_theta2=90",
        fig1_coincidence(0.0, FRAC_PI_2).value,
        Some(0.25),
    ));

    // 2: conditional singles rate
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let worst = (1..=16)
        .map(|k| {
            let th = ((k as f64 * golden).fract() * 2.0 - 1.0) * PI;
            fig1_conditional_check(th, false).map(|v| v - 0.5)
        })
        .collect::<Result<Vec<_>, _>>()?;
    rows.push(Row::new(
        "c2:conditional_max_dev_16pt",
        max_abs(worst.into_iter()),
        Some(0.0),
    ));
    rows.push(Row::new(
        "c2:conditional_theta1=60",
        fig1_conditional_check(PI / 3.0, false)?,
        Some(0.5),
    ));

    // 3: identical PDC shapes, different constants
    let mut shape_gap: f64 = 0.0;
    for d in delta_grid() {
        let e = pdc_coincidence(StateKind::PsiE, base + d, base)?.value / 0.5;
        let u = pdc_coincidence(StateKind::PsiU, base + d, base)?.value / 0.25;
        shape_gap = shape_gap.max((e - u).abs());
    }
    rows.push(Row::new("c3:pdc_shape_gap_73pt", shape_gap, Some(0.0)));
    rows.push(Row::new(
        "c3:pdc_psi_e_max",
        pdc_coincidence(StateKind::PsiE, 0.0, FRAC_PI_2)?.value,
        Some(0.5),
    ));
    rows.push(Row::new(
        "c3:pdc_psi_u_max",
        pdc_coincidence(StateKind::PsiU, 0.0, FRAC_PI_2)?.value,
        Some(0.25),
    ));

    // 4: cascade cos² law
    let g = CascadeGeometry::default();
    rows.push(Row::new(
        "c4:cascade_max_abs_error_73pt",
        max_abs(delta_grid().map(|d| {
            cascade_coincidence(&g, base + d, base)
                .abs_error()
                .unwrap_or(f64::NAN)
        })),
        Some(0.0),
    ));
    rows.push(Row::new(
        "c4:cascade_theta1=0_theta2=0",
        cascade_coincidence(&g, 0.0, 0.0).value,
        Some(0.5),
    ));

    // 5: channel-splitting discriminator
    let mut err_u: f64 = 0.0;
    let mut max_e: f64 = 0.0;
    for d in delta_grid() {
        err_u = err_u.max(
            fig2_split_coincidence(StateKind::PsiU, base + d, base)?
                .abs_error()
                .unwrap_or(f64::NAN),
        );
        max_e = max_e.max(
            fig2_split_coincidence(StateKind::PsiE, base + d, base)?
                .value
                .abs(),
        );
    }
    rows.push(Row::new(
        "c5:fig2_psi_u_max_abs_error_73pt",
        err_u,
        Some(0.0),
    ));
    rows.push(Row::new("c5:fig2_psi_e_max_rate_73pt", max_e, Some(0.0)));
    rows.push(Row::new(
        "c5:fig2_psi_u_theta3=0_theta4=0",
        fig2_split_coincidence(StateKind::PsiU, 0.0, 0.0)?.value,
        Some(1.0 / 16.0),
    ));

    // 6: interference dichotomy
    for (kind, target) in [(StateKind::PsiU, 1.0), (StateKind::PsiE, 0.0)] {
        let v = fig3_visibility(kind, default_beams(), Grid::default())?.value;
        rows.push(Row::new(format!("c6:visibility_{kind}"), v, Some(target)));
    }

    // 7: decomposition of psi_u
    let psi_e = named_state(StateKind::PsiE);
    let psi_u = named_state(StateKind::PsiU);
    let overlap = inner(&psi_e, &psi_u);
    rows.push(Row::new(
        "c7:inner_psi_e_psi_u_re",
        overlap.re,
        Some(FRAC_1_SQRT_2),
    ));
    rows.push(Row::new("c7:inner_psi_e_psi_u_im", overlap.im, Some(0.0)));
    let rest = add(
        &psi_u,
        &psi_e,
        Complex64::new(1.0, 0.0),
        Complex64::new(-FRAC_1_SQRT_2, 0.0),
    );
    rows.push(Row::new(
        "c7:norm2_same_channel_part",
        rest.norm2(),
        Some(0.5),
    ));

    // 8: product form of psi_u
    let [a, b] = pair_creation_forms();
    let built = FockKet::vacuum()
        .apply_form_dagger(&b)
        .apply_form_dagger(&a);
    rows.push(Row::new(
        "c8:factorization_max_gap",
        max_amplitude_gap(&built, &psi_u),
        Some(0.0),
    ));
    rows.push(Row::new(
        "c8:commutator_ab",
        form_commutator(&a.conj(), &b.conj()).norm(),
        Some(0.0),
    ));

    // 9: CHSH at canonical settings
    let angles = ChshAngles::default();
    let mut s_values = Vec::new();
    for kind in [StateKind::CircularPair, StateKind::PsiE, StateKind::PsiU] {
        let s = chsh_s(&CorrelationSetup::for_state(kind), &angles)?;
        rows.push(Row::new(
            format!("c9:abs_S_{kind}"),
            s.abs(),
            Some(2.0 * SQRT_2),
        ));
        s_values.push(s);
    }
    rows.push(Row::new(
        "c9:S_psi_e_minus_psi_u",
        s_values[1] - s_values[2],
        Some(0.0),
    ));

    // 10: where the photons go
    for kind in [StateKind::PsiU, StateKind::PsiE] {
        let target = if kind == StateKind::PsiU { 0.25 } else { 0.0 };
        for ch in [1, 2] {
            rows.push(Row::new(
                format!("c10:both_in_channel{ch}_{kind}"),
                same_channel_probability(kind, ch)?,
                Some(target),
            ));
        }
    }
    rows.push(Row::new(
        "c10:outcome_total_circular_pair",
        outcome_probabilities(StateKind::CircularPair)?.total(),
        Some(1.0),
    ));
    Ok(rows)
}
