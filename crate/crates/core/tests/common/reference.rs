//! Reference states and detector operators written out by hand in the
//! number basis, independent of the engine's optics.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use pairsim::{LinearForm, ModeId, Polarization::*};

use super::{c, DenseSpace, C};

pub fn v(ch: u8) -> ModeId {
    ModeId::beam(ch, V)
}

pub fn h(ch: u8) -> ModeId {
    ModeId::beam(ch, H)
}

pub fn form(terms: &[(ModeId, f64)]) -> LinearForm {
    LinearForm::from_terms(terms.iter().map(|(m, x)| (*m, c(*x, 0.0))))
}

pub fn pdc_space() -> DenseSpace {
    DenseSpace::new(vec![v(1), h(1), v(2), h(2)], 2)
}

pub fn dense_psi_e(space: &DenseSpace) -> Vec<C> {
    let mut psi = vec![C::default(); space.dim()];
    psi[space.index_of_modes(&[(v(1), 1), (h(2), 1)])] = c(FRAC_1_SQRT_2, 0.0);
    psi[space.index_of_modes(&[(v(2), 1), (h(1), 1)])] = c(-FRAC_1_SQRT_2, 0.0);
    psi
}

/// ψ_u = ψ_e/√2 + ¼ Σ_m b†_m b†_m |0⟩, with b†b†|0⟩ = √2 |2⟩.
pub fn dense_psi_u(space: &DenseSpace) -> Vec<C> {
    let mut psi: Vec<C> = dense_psi_e(space)
        .iter()
        .map(|x| x * FRAC_1_SQRT_2)
        .collect();
    for m in [v(1), h(1), v(2), h(2)] {
        psi[space.index_of_modes(&[(m, 2)])] = c(SQRT_2 / 4.0, 0.0);
    }
    psi
}

/// b_1 = (b_v1 + b_h2)/√2, b_2 = (b_v2 − b_h1)/√2.
pub fn b1() -> LinearForm {
    form(&[(v(1), FRAC_1_SQRT_2), (h(2), FRAC_1_SQRT_2)])
}

pub fn b2() -> LinearForm {
    form(&[(v(2), FRAC_1_SQRT_2), (h(1), -FRAC_1_SQRT_2)])
}

/// Channel-1 analyzer for ψ_u: (b_1 cosθ − b_2 sinθ)/√2.
pub fn psi_u_detector1(th: f64) -> LinearForm {
    b1().combine(
        c(th.cos() * FRAC_1_SQRT_2, 0.0),
        &b2(),
        c(-th.sin() * FRAC_1_SQRT_2, 0.0),
    )
}

/// Channel-2 analyzer for ψ_u: (b_2 cosθ + b_1 sinθ)/√2.
pub fn psi_u_detector2(th: f64) -> LinearForm {
    b2().combine(
        c(th.cos() * FRAC_1_SQRT_2, 0.0),
        &b1(),
        c(th.sin() * FRAC_1_SQRT_2, 0.0),
    )
}
