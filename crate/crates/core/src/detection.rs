//! Detection rates as normally ordered expectations.
//!
//! All rates here are un-normalized moments (⟨L†L⟩, ⟨L1†L2†L2L1⟩, …).
//! Converting them to event probabilities needs the photon number, which is
//! the caller's business.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{normal_ordered_expectation, FockKet, LinearForm, ZERO_EPS};
use crate::jones::ChannelField;

/// `⟨L†L⟩`.
pub fn singles_rate(ket: &FockKet, form: &LinearForm) -> f64 {
    ket.apply_form(form).norm2()
}

/// `⟨L1†L2†L2L1⟩`.
pub fn coincidence_rate(ket: &FockKet, first: &LinearForm, second: &LinearForm) -> f64 {
    normal_ordered_expectation(ket, &[first.clone(), second.clone()])
}

/// State left behind after `form` removes a photon. Un-normalized unless asked.
pub fn conditional_state(ket: &FockKet, form: &LinearForm, normalized: bool) -> Result<FockKet> {
    let out = ket.apply_form(form);
    if normalized {
        out.normalize()
    } else {
        Ok(out)
    }
}

/// Ordered sum `Σ_{p,p'} ⟨Lp†Lp'†Lp'Lp⟩` over the channel's v and h components,
/// i.e. the second factorial moment of the channel's photon number.
pub fn same_channel_double_rate(ket: &FockKet, field: &ChannelField) -> f64 {
    let (v, h) = field.components();
    let parts = [v, h];
    let mut total = 0.0;
    for p in &parts {
        let once = ket.apply_form(p);
        for q in &parts {
            total += once.apply_form(q).norm2();
        }
    }
    total
}

/// `Σ_{p,q} ⟨L1p†L2q†L2qL1p⟩`: one photon in each of two channels.
pub fn cross_channel_rate(ket: &FockKet, first: &ChannelField, second: &ChannelField) -> f64 {
    let (v1, h1) = first.components();
    let (v2, h2) = second.components();
    let mut total = 0.0;
    for p in [&v1, &h1] {
        let once = ket.apply_form(p);
        for q in [&v2, &h2] {
            total += once.apply_form(q).norm2();
        }
    }
    total
}

/// `⟨L†L⟩` for the superposed field `L = Σ amp_i · L_i`.
pub fn intensity_at(ket: &FockKet, contributions: &[(LinearForm, Complex64)]) -> f64 {
    let total = contributions
        .iter()
        .fold(LinearForm::zero(), |acc, (form, amp)| {
            acc.combine(Complex64::new(1.0, 0.0), form, *amp)
        });
    singles_rate(ket, &total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeamKind {
    PlaneWave,
    Gaussian { width: f64 },
}

/// Transverse amplitude profile `f(x, y)` of a beam at the detector plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamProfile {
    pub kind: BeamKind,
    /// Transverse wavevector along x, radians per unit length.
    pub tilt: f64,
    pub phase_offset: f64,
    pub amplitude: f64,
}

impl BeamProfile {
    pub fn plane_wave(tilt: f64) -> Self {
        BeamProfile {
            kind: BeamKind::PlaneWave,
            tilt,
            phase_offset: 0.0,
            amplitude: 1.0,
        }
    }

    pub fn gaussian(tilt: f64, width: f64) -> Self {
        BeamProfile {
            kind: BeamKind::Gaussian { width },
            ..Self::plane_wave(tilt)
        }
    }

    pub fn with_phase(mut self, phase_offset: f64) -> Self {
        self.phase_offset = phase_offset;
        self
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::MalformedGrid(format!(
                "beam amplitude must be finite and ≥ 0, got {}",
                self.amplitude
            )));
        }
        if let BeamKind::Gaussian { width } = self.kind {
            if !(width > 0.0 && width.is_finite()) {
                return Err(Error::MalformedGrid(format!(
                    "gaussian width must be > 0, got {width}"
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        let envelope = match self.kind {
            BeamKind::PlaneWave => 1.0,
            BeamKind::Gaussian { width } => (-(x * x + y * y) / (width * width)).exp(),
        };
        Complex64::from_polar(self.amplitude * envelope, self.tilt * x + self.phase_offset)
    }
}

/// Default beam pair: equal plane waves with opposite tilts, giving six
/// fringes across the default grid.
pub fn default_beams() -> [BeamProfile; 2] {
    let k = 3.0 * std::f64::consts::PI;
    [BeamProfile::plane_wave(k), BeamProfile::plane_wave(-k)]
}

/// Rectangular sampling lattice, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_range: (f64, f64),
    pub nx: usize,
    pub y_range: (f64, f64),
    pub ny: usize,
}

impl Grid {
    pub fn line(x_min: f64, x_max: f64, nx: usize) -> Self {
        Grid {
            x_range: (x_min, x_max),
            nx,
            y_range: (0.0, 0.0),
            ny: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::MalformedGrid("grid has no points".into()));
        }
        for (lo, hi) in [self.x_range, self.y_range] {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::MalformedGrid(format!("bad range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coord((lo, hi): (f64, f64), n: usize, i: usize) -> f64 {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    /// Point `k` in row-major order (x fastest).
    pub fn point(&self, k: usize) -> (f64, f64) {
        let (ix, iy) = (k % self.nx, k / self.nx);
        (
            Self::coord(self.x_range, self.nx, ix),
            Self::coord(self.y_range, self.ny, iy),
        )
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid::line(-1.0, 1.0, 101)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntensityMap {
    pub grid: Grid,
    /// Row-major, x fastest.
    pub values: Vec<f64>,
    pub beams: [BeamProfile; 2],
}

/// Single-detector counting rate over the grid for two overlapping beams whose
/// detector operators are `forms`.
pub fn intensity_map(
    ket: &FockKet,
    forms: [&LinearForm; 2],
    beams: [BeamProfile; 2],
    grid: Grid,
) -> Result<IntensityMap> {
    grid.validate()?;
    for b in &beams {
        b.validate()?;
    }
    let values = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (x, y) = grid.point(k);
            let contributions = [
                (forms[0].clone(), beams[0].eval(x, y)),
                (forms[1].clone(), beams[1].eval(x, y)),
            ];
            intensity_at(ket, &contributions)
        })
        .collect();
    Ok(IntensityMap {
        grid,
        values,
        beams,
    })
}

/// `(max − min)/(max + min)`.
pub fn visibility(map: &IntensityMap) -> Result<f64> {
    if map.values.len() < 2 {
        return Err(Error::MalformedGrid(
            "visibility needs at least two samples".into(),
        ));
    }
    let max = map.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = map.values.iter().copied().fold(f64::INFINITY, f64::min);
    if max + min <= ZERO_EPS {
        return Err(Error::AllDark);
    }
    Ok(((max - min) / (max + min)).clamp(0.0, 1.0))
}
