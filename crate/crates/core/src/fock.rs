//! Sparse Fock-space algebra over labelled bosonic modes.
//!
//! A [`FockKet`] stores number-basis amplitudes, i.e. the √n! ladder factors
//! are already folded in: `b†b†|0⟩` is stored as amplitude √2 on `|2⟩`.
//! A [`LinearForm`] is the annihilator `Σ c_m b_m`; its adjoint is obtained
//! with [`LinearForm::conj`] and applied with [`FockKet::apply_form_dagger`].

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitudes and coefficients at or below this modulus are dropped.
pub const PRUNE_EPS: f64 = 1e-14;

/// Squared norms at or below this are treated as the zero vector.
pub const ZERO_EPS: f64 = 1e-12;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    V,
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Frequency {
    Omega1,
    Omega2,
}

/// Label of a single bosonic mode.
///
/// Equality is structural. The derived ordering is the canonical one used for
/// occupation keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ModeId {
    /// A travelling mode in a channel, with an optional frequency tag.
    Beam {
        channel: u8,
        polarization: Polarization,
        frequency: Option<Frequency>,
    },
    /// An abstract composite mode (b_1, b_2 of the un-entangled PDC pair).
    Composite(u8),
}

impl ModeId {
    pub const fn beam(channel: u8, polarization: Polarization) -> Self {
        ModeId::Beam {
            channel,
            polarization,
            frequency: None,
        }
    }

    /// Frequency-tagged mode of the cascade source. Channel 0 marks "at the source".
    pub const fn spectral(frequency: Frequency, polarization: Polarization) -> Self {
        ModeId::Beam {
            channel: 0,
            polarization,
            frequency: Some(frequency),
        }
    }

    pub const fn composite(index: u8) -> Self {
        ModeId::Composite(index)
    }

    pub fn channel(&self) -> Option<u8> {
        match self {
            ModeId::Beam { channel, .. } => Some(*channel),
            ModeId::Composite(_) => None,
        }
    }

    pub fn polarization(&self) -> Option<Polarization> {
        match self {
            ModeId::Beam { polarization, .. } => Some(*polarization),
            ModeId::Composite(_) => None,
        }
    }

    pub fn frequency(&self) -> Option<Frequency> {
        match self {
            ModeId::Beam { frequency, .. } => *frequency,
            ModeId::Composite(_) => None,
        }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeId::Beam {
                channel,
                polarization,
                frequency,
            } => {
                let p = match polarization {
                    Polarization::V => 'v',
                    Polarization::H => 'h',
                };
                match frequency {
                    Some(Frequency::Omega1) => write!(f, "w1{p}")?,
                    Some(Frequency::Omega2) => write!(f, "w2{p}")?,
                    None => write!(f, "{p}")?,
                }
                if *channel != 0 {
                    write!(f, "{channel}")?;
                }
                Ok(())
            }
            ModeId::Composite(k) => write!(f, "b{k}"),
        }
    }
}

/// Photon counts per mode, zero entries omitted, sorted by mode.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(Vec<(ModeId, u32)>);

impl Occupation {
    pub fn vacuum() -> Self {
        Occupation(Vec::new())
    }

    /// Builds the canonical form; repeated modes are summed.
    pub fn from_counts<It: IntoIterator<Item = (ModeId, u32)>>(counts: It) -> Self {
        let mut map: BTreeMap<ModeId, u32> = BTreeMap::new();
        for (m, n) in counts {
            *map.entry(m).or_default() += n;
        }
        Occupation(map.into_iter().filter(|&(_, n)| n > 0).collect())
    }

    pub fn count(&self, mode: ModeId) -> u32 {
        self.0
            .binary_search_by(|(m, _)| m.cmp(&mode))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|(_, n)| n).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeId, u32)> + '_ {
        self.0.iter().copied()
    }

    fn raised(&self, mode: ModeId) -> Occupation {
        let mut v = self.0.clone();
        match v.binary_search_by(|(m, _)| m.cmp(&mode)) {
            Ok(i) => v[i].1 += 1,
            Err(i) => v.insert(i, (mode, 1)),
        }
        Occupation(v)
    }

    fn lowered(&self, mode: ModeId) -> Option<Occupation> {
        let i = self.0.binary_search_by(|(m, _)| m.cmp(&mode)).ok()?;
        let mut v = self.0.clone();
        if v[i].1 == 1 {
            v.remove(i);
        } else {
            v[i].1 -= 1;
        }
        Some(Occupation(v))
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (k, (m, n)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}:{n}")?;
        }
        f.write_str("⟩")
    }
}

/// Complex linear combination `Σ c_m b_m` of mode annihilators.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearForm {
    coeffs: BTreeMap<ModeId, Complex64>,
}

impl LinearForm {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The bare annihilator of `mode`.
    pub fn mode(mode: ModeId) -> Self {
        Self::term(mode, Complex64::new(1.0, 0.0))
    }

    pub fn term(mode: ModeId, coeff: Complex64) -> Self {
        Self::from_terms([(mode, coeff)])
    }

    pub fn from_terms<It: IntoIterator<Item = (ModeId, Complex64)>>(terms: It) -> Self {
        let mut coeffs: BTreeMap<ModeId, Complex64> = BTreeMap::new();
        for (m, c) in terms {
            *coeffs.entry(m).or_default() += c;
        }
        coeffs.retain(|_, c| c.norm() > PRUNE_EPS);
        LinearForm { coeffs }
    }

    pub fn coeff(&self, mode: ModeId) -> Complex64 {
        self.coeffs.get(&mode).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeId, Complex64)> + '_ {
        self.coeffs.iter().map(|(m, c)| (*m, *c))
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeId> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Complex-conjugated coefficients.
    pub fn conj(&self) -> Self {
        LinearForm {
            coeffs: self.coeffs.iter().map(|(m, c)| (*m, c.conj())).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_terms(self.iter().map(|(m, c)| (m, c * factor)))
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// `α·self + β·other`.
    pub fn combine(&self, alpha: Complex64, other: &LinearForm, beta: Complex64) -> Self {
        Self::from_terms(
            self.iter()
                .map(|(m, c)| (m, alpha * c))
                .chain(other.iter().map(|(m, c)| (m, beta * c))),
        )
    }

    /// Keeps only the modes accepted by `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(ModeId) -> bool) -> Self {
        LinearForm {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| keep(**m))
                .map(|(m, c)| (*m, *c))
                .collect(),
        }
    }

    /// Σ|c_m|².
    pub fn weight(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>() + 0.0
    }
}

impl std::ops::Add for &LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        let one = Complex64::new(1.0, 0.0);
        self.combine(one, rhs, one)
    }
}

impl std::ops::Sub for &LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        self.combine(Complex64::new(1.0, 0.0), rhs, Complex64::new(-1.0, 0.0))
    }
}

impl std::ops::Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        self.scale_real(-1.0)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i)·b_{m}", c.re, c.im)?;
        }
        Ok(())
    }
}

/// Sparse ket in the number basis.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FockKet {
    amps: BTreeMap<Occupation, Complex64>,
}

impl FockKet {
    pub fn zero() -> Self {
        Self::default()
    }

    /// |0⟩.
    pub fn vacuum() -> Self {
        Self::number_state(Occupation::vacuum())
    }

    pub fn number_state(occupation: Occupation) -> Self {
        Self::from_terms([(occupation, Complex64::new(1.0, 0.0))])
    }

    /// Sums amplitudes of repeated occupations, then prunes.
    pub fn from_terms<It: IntoIterator<Item = (Occupation, Complex64)>>(terms: It) -> Self {
        let mut amps: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (occ, a) in terms {
            *amps.entry(occ).or_default() += a;
        }
        amps.retain(|_, a| a.norm() > PRUNE_EPS);
        FockKet { amps }
    }

    pub fn amplitude(&self, occupation: &Occupation) -> Complex64 {
        self.amps.get(occupation).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, Complex64)> + '_ {
        self.amps.iter().map(|(o, a)| (o, *a))
    }

    pub fn num_terms(&self) -> usize {
        self.amps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    /// Largest total photon number in the support.
    pub fn max_photons(&self) -> u32 {
        self.amps.keys().map(Occupation::total).max().unwrap_or(0)
    }

    /// `b†_m |self⟩`.
    pub fn create(&self, mode: ModeId) -> Self {
        Self::from_terms(self.amps.iter().map(|(occ, a)| {
            let n = occ.count(mode) as f64;
            (occ.raised(mode), a * (n + 1.0).sqrt())
        }))
    }

    /// `b_m |self⟩`.
    pub fn annihilate(&self, mode: ModeId) -> Self {
        Self::from_terms(self.amps.iter().filter_map(|(occ, a)| {
            let n = occ.count(mode) as f64;
            occ.lowered(mode).map(|lower| (lower, a * n.sqrt()))
        }))
    }

    /// `(Σ c_m b_m) |self⟩`.
    pub fn apply_form(&self, form: &LinearForm) -> Self {
        Self::from_terms(form.iter().flat_map(|(mode, c)| {
            self.amps.iter().filter_map(move |(occ, a)| {
                let n = occ.count(mode) as f64;
                occ.lowered(mode).map(|lower| (lower, c * a * n.sqrt()))
            })
        }))
    }

    /// `(Σ c_m b†_m) |self⟩`, coefficients taken as given.
    pub fn apply_form_dagger(&self, form: &LinearForm) -> Self {
        Self::from_terms(form.iter().flat_map(|(mode, c)| {
            self.amps.iter().map(move |(occ, a)| {
                let n = occ.count(mode) as f64;
                (occ.raised(mode), c * a * (n + 1.0).sqrt())
            })
        }))
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &FockKet) -> Complex64 {
        let (small, large, swap) = if self.num_terms() <= other.num_terms() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let sum: Complex64 = small
            .amps
            .iter()
            .filter_map(|(occ, a)| large.amps.get(occ).map(|b| a.conj() * b))
            .sum();
        if swap {
            sum.conj()
        } else {
            sum
        }
    }

    pub fn norm2(&self) -> f64 {
        // + 0.0 turns the empty sum's -0.0 into 0.0
        self.amps.values().map(|a| a.norm_sqr()).sum::<f64>() + 0.0
    }

    pub fn normalize(&self) -> Result<Self> {
        let n2 = self.norm2();
        if n2 <= ZERO_EPS {
            return Err(Error::ZeroState { norm2: n2 });
        }
        Ok(self.scale_real(1.0 / n2.sqrt()))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::from_terms(self.amps.iter().map(|(o, a)| (o.clone(), a * factor)))
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }
}

impl fmt::Display for FockKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (k, (occ, a)) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i){occ}", a.re, a.im)?;
        }
        Ok(())
    }
}

pub fn inner(a: &FockKet, b: &FockKet) -> Complex64 {
    a.inner(b)
}

/// `α|a⟩ + β|b⟩`.
pub fn add(a: &FockKet, b: &FockKet, alpha: Complex64, beta: Complex64) -> FockKet {
    FockKet::from_terms(
        a.iter()
            .map(|(o, x)| (o.clone(), alpha * x))
            .chain(b.iter().map(|(o, x)| (o.clone(), beta * x))),
    )
}

/// `⟨ψ| L_1† … L_k† L_k … L_1 |ψ⟩`: the squared norm after applying
/// `forms[0]` first. Annihilators commute, so the order of `forms` is irrelevant.
pub fn normal_ordered_expectation(ket: &FockKet, forms: &[LinearForm]) -> f64 {
    forms
        .iter()
        .fold(ket.clone(), |k, form| k.apply_form(form))
        .norm2()
}

/// `[Σ f_m b_m, Σ conj(g_m) b†_m] = Σ f_m conj(g_m)`.
pub fn form_commutator(f: &LinearForm, g: &LinearForm) -> Complex64 {
    f.iter().map(|(m, c)| c * g.coeff(m).conj()).sum()
}

/// Two-photon source states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StateKind {
    /// One left- and one right-circular photon in a single beam.
    CircularPair,
    /// Singlet-like pair across channels 1 and 2.
    PsiE,
    /// Product of two composite-mode photons spread over both channels.
    PsiU,
    /// Polarization-correlated cascade pair at two frequencies.
    PsiUPrime,
}

impl StateKind {
    pub const ALL: [StateKind; 4] = [
        StateKind::CircularPair,
        StateKind::PsiE,
        StateKind::PsiU,
        StateKind::PsiUPrime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StateKind::CircularPair => "circular_pair",
            StateKind::PsiE => "psi_e",
            StateKind::PsiU => "psi_u",
            StateKind::PsiUPrime => "psi_u_prime",
        }
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownStateKind(s.to_string()))
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Creation-side coefficients of the composite modes in terms of the
/// channel modes: `b†_1 = (b†_v1 + b†_h2)/√2`, `b†_2 = (b†_v2 − b†_h1)/√2`.
pub fn composite_creation_forms() -> [LinearForm; 2] {
    use Polarization::{H, V};
    let s = FRAC_1_SQRT_2;
    [
        LinearForm::from_terms([
            (ModeId::beam(1, V), c(s, 0.0)),
            (ModeId::beam(2, H), c(s, 0.0)),
        ]),
        LinearForm::from_terms([
            (ModeId::beam(2, V), c(s, 0.0)),
            (ModeId::beam(1, H), c(-s, 0.0)),
        ]),
    ]
}

/// Annihilators `b_1`, `b_2` of the composite modes over the channel modes.
pub fn composite_annihilators() -> [LinearForm; 2] {
    composite_creation_forms().map(|f| f.conj())
}

/// Creation-side coefficients of `b†_a = (b†_1 + i b†_2)/√2` and
/// `b†_b = (b†_1 − i b†_2)/√2`, over the channel modes.
pub fn pair_creation_forms() -> [LinearForm; 2] {
    let [b1, b2] = composite_creation_forms();
    let s = c(FRAC_1_SQRT_2, 0.0);
    [b1.combine(s, &b2, s * I), b1.combine(s, &b2, -s * I)]
}

/// `½(b†_1 b†_1 + b†_2 b†_2)|0⟩` written on the abstract composite modes.
pub fn psi_u_composite() -> FockKet {
    let half = c(0.5, 0.0);
    let b1 = ModeId::composite(1);
    let b2 = ModeId::composite(2);
    let vac = FockKet::vacuum();
    add(
        &vac.create(b1).create(b1),
        &vac.create(b2).create(b2),
        half,
        half,
    )
}

/// The unit-norm two-photon source state of the given kind.
pub fn named_state(kind: StateKind) -> FockKet {
    use Frequency::{Omega1, Omega2};
    use Polarization::{H, V};
    let vac = FockKet::vacuum();
    let one = c(1.0, 0.0);
    match kind {
        // ½(b†_v b†_v + b†_h b†_h)|0⟩ on the incoming beam (channel 2)
        StateKind::CircularPair => {
            let v = ModeId::beam(2, V);
            let h = ModeId::beam(2, H);
            add(
                &vac.create(v).create(v),
                &vac.create(h).create(h),
                c(0.5, 0.0),
                c(0.5, 0.0),
            )
        }
        // (b†_v1 b†_h2 − b†_v2 b†_h1)|0⟩/√2
        StateKind::PsiE => add(
            &vac.create(ModeId::beam(1, V)).create(ModeId::beam(2, H)),
            &vac.create(ModeId::beam(2, V)).create(ModeId::beam(1, H)),
            c(FRAC_1_SQRT_2, 0.0),
            c(-FRAC_1_SQRT_2, 0.0),
        ),
        // ½(b†_1 b†_1 + b†_2 b†_2)|0⟩ with composites over channel modes
        StateKind::PsiU => {
            let [b1, b2] = composite_creation_forms();
            add(
                &vac.apply_form_dagger(&b1).apply_form_dagger(&b1),
                &vac.apply_form_dagger(&b2).apply_form_dagger(&b2),
                c(0.5, 0.0),
                c(0.5, 0.0),
            )
        }
        // (b†_ω1h b†_ω2h + b†_ω1v b†_ω2v)|0⟩/√2
        StateKind::PsiUPrime => add(
            &vac.create(ModeId::spectral(Omega1, H))
                .create(ModeId::spectral(Omega2, H)),
            &vac.create(ModeId::spectral(Omega1, V))
                .create(ModeId::spectral(Omega2, V)),
            one * FRAC_1_SQRT_2,
            one * FRAC_1_SQRT_2,
        ),
    }
}
