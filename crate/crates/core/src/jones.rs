//! Heisenberg-picture propagation of the positive-frequency field.
//!
//! A [`ChannelField`] holds the vertical and horizontal components of the
//! field in one channel as linear forms over source-mode annihilators. Lossless
//! elements mix the two components with a [`JonesMatrix`]; an analyzer reduces
//! the field to the single detector operator it transmits.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{LinearForm, ModeId, Polarization};

/// 2×2 complex matrix acting on the (v, h) column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JonesMatrix {
    m: [[Complex64; 2]; 2],
}

impl JonesMatrix {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        JonesMatrix { m }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        JonesMatrix::new([[one, zero], [zero, one]])
    }

    /// Ideal half-wave plate with its axis at `axis_angle` from vertical.
    pub fn hwp(axis_angle: f64) -> Self {
        let (s, c) = (2.0 * axis_angle).sin_cos();
        let s = Complex64::new(s, 0.0);
        let c = Complex64::new(c, 0.0);
        JonesMatrix::new([[c, s], [s, -c]])
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        JonesMatrix::new([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_deviation(&self, other: &JonesMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (*self * self.adjoint()).max_deviation(&JonesMatrix::identity()) <= tol
    }
}

impl std::ops::Mul for JonesMatrix {
    type Output = JonesMatrix;
    fn mul(self, rhs: JonesMatrix) -> JonesMatrix {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = self.m[r][0] * rhs.m[0][c] + self.m[r][1] * rhs.m[1][c];
            }
        }
        JonesMatrix::new(out)
    }
}

pub fn hwp(axis_angle: f64) -> JonesMatrix {
    JonesMatrix::hwp(axis_angle)
}

/// Positive-frequency field in one channel: `phase · (L_v e_v + L_h e_h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelField {
    v: LinearForm,
    h: LinearForm,
    channel: u8,
    phase: Complex64,
}

impl ChannelField {
    pub fn new(channel: u8, v: LinearForm, h: LinearForm) -> Self {
        ChannelField {
            v,
            h,
            channel,
            phase: Complex64::new(1.0, 0.0),
        }
    }

    /// Unpopulated input port.
    pub fn vacuum(channel: u8) -> Self {
        Self::new(channel, LinearForm::zero(), LinearForm::zero())
    }

    /// Free field of the channel's own modes, `b_v e_v + b_h e_h`.
    pub fn source(channel: u8) -> Self {
        Self::new(
            channel,
            LinearForm::mode(ModeId::beam(channel, Polarization::V)),
            LinearForm::mode(ModeId::beam(channel, Polarization::H)),
        )
    }

    /// Field carrying `form` linearly polarized along `angle` (from vertical).
    pub fn polarized(channel: u8, form: &LinearForm, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(channel, form.scale_real(c), form.scale_real(s))
    }

    pub fn channel(&self) -> u8 {
        self.channel
    }

    pub fn with_channel(mut self, channel: u8) -> Self {
        self.channel = channel;
        self
    }

    pub fn phase(&self) -> Complex64 {
        self.phase
    }

    /// Components with the propagation phase folded in.
    pub fn components(&self) -> (LinearForm, LinearForm) {
        (self.v.scale(self.phase), self.h.scale(self.phase))
    }

    /// Raw components, without the propagation phase.
    pub fn v(&self) -> &LinearForm {
        &self.v
    }

    pub fn h(&self) -> &LinearForm {
        &self.h
    }

    /// Σ|c|² over both components.
    pub fn weight(&self) -> f64 {
        (self.v.weight() + self.h.weight()) * self.phase.norm_sqr()
    }

    pub fn apply_jones(&self, jones: &JonesMatrix) -> Self {
        let v = self
            .v
            .combine(jones.entry(0, 0), &self.h, jones.entry(0, 1));
        let h = self
            .v
            .combine(jones.entry(1, 0), &self.h, jones.entry(1, 1));
        ChannelField {
            v,
            h,
            channel: self.channel,
            phase: self.phase,
        }
    }

    pub fn phase_shift(&self, phi: f64) -> Self {
        let mut out = self.clone();
        out.phase *= Complex64::from_polar(1.0, phi);
        out
    }

    pub fn mirror(&self) -> Self {
        let mut out = self.clone();
        out.phase = -out.phase;
        out
    }

    /// Detector operator behind an ideal linear analyzer at `angle`.
    pub fn polarizer(&self, angle: f64) -> LinearForm {
        let (s, c) = angle.sin_cos();
        self.v
            .combine(Complex64::new(c, 0.0), &self.h, Complex64::new(s, 0.0))
            .scale(self.phase)
    }
}

pub fn apply_jones(field: &ChannelField, jones: &JonesMatrix) -> ChannelField {
    field.apply_jones(jones)
}

pub fn polarizer(field: &ChannelField, angle: f64) -> LinearForm {
    field.polarizer(angle)
}

pub fn phase_shift(field: &ChannelField, phi: f64) -> ChannelField {
    field.phase_shift(phi)
}

pub fn mirror(field: &ChannelField) -> ChannelField {
    field.mirror()
}

/// Lossless 50:50 splitter: outputs `(a + b)/√2` tagged with `a`'s channel and
/// `(a − b)/√2` tagged with `b`'s channel. Propagation phases are folded into
/// the outputs.
pub fn beamsplitter_5050(
    a: &ChannelField,
    b: &ChannelField,
) -> Result<(ChannelField, ChannelField)> {
    if a.channel == b.channel {
        return Err(Error::ChannelClash(a.channel));
    }
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let (av, ah) = a.components();
    let (bv, bh) = b.components();
    let sum = ChannelField::new(a.channel, av.combine(s, &bv, s), ah.combine(s, &bh, s));
    let diff = ChannelField::new(b.channel, av.combine(s, &bv, -s), ah.combine(s, &bh, -s));
    Ok((sum, diff))
}
