//! Dense brute-force reference for small Fock spaces.
//!
//! Enumerates every occupation vector with at most `max_photons` photons over
//! a fixed list of modes and builds explicit ladder matrices. Shares nothing
//! with the sparse engine beyond the mode labels and the ket/form containers
//! used to move data in and out.
#![allow(dead_code)]

pub mod reference;

use std::collections::HashMap;

use num_complex::Complex64;
use pairsim::{FockKet, LinearForm, ModeId, Occupation};
use rand::rngs::StdRng;
use rand::Rng;

pub type C = Complex64;
pub type Matrix = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub struct DenseSpace {
    pub modes: Vec<ModeId>,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

fn enumerate(n_modes: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() == n_modes {
        out.push(prefix.clone());
        return;
    }
    for k in 0..=budget {
        prefix.push(k);
        enumerate(n_modes, budget - k, prefix, out);
        prefix.pop();
    }
}

impl DenseSpace {
    pub fn new(modes: Vec<ModeId>, max_photons: u32) -> Self {
        let mut basis = Vec::new();
        enumerate(modes.len(), max_photons, &mut Vec::new(), &mut basis);
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), i))
            .collect();
        DenseSpace {
            modes,
            basis,
            index,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn counts(&self, i: usize) -> &[u32] {
        &self.basis[i]
    }

    fn mode_index(&self, m: ModeId) -> usize {
        self.modes
            .iter()
            .position(|x| *x == m)
            .unwrap_or_else(|| panic!("mode {m} outside the dense space"))
    }

    pub fn occupation(&self, i: usize) -> Occupation {
        Occupation::from_counts(
            self.modes
                .iter()
                .copied()
                .zip(self.basis[i].iter().copied()),
        )
    }

    pub fn index_of(&self, counts: &[u32]) -> usize {
        self.index[counts]
    }

    /// Index of the state with the given photons placed on modes.
    pub fn index_of_modes(&self, photons: &[(ModeId, u32)]) -> usize {
        let mut counts = vec![0; self.modes.len()];
        for (m, n) in photons {
            counts[self.mode_index(*m)] += n;
        }
        self.index_of(&counts)
    }

    pub fn dense_of(&self, ket: &FockKet) -> Vec<C> {
        let mut v = vec![C::default(); self.dim()];
        for (occ, a) in ket.iter() {
            let mut counts = vec![0u32; self.modes.len()];
            for (m, n) in occ.iter() {
                counts[self.mode_index(m)] = n;
            }
            v[self.index_of(&counts)] += a;
        }
        v
    }

    pub fn to_ket(&self, v: &[C]) -> FockKet {
        FockKet::from_terms(v.iter().enumerate().map(|(i, a)| (self.occupation(i), *a)))
    }

    /// Matrix of b_m; photons beyond the cutoff are never produced by it.
    pub fn annihilator(&self, mode: ModeId) -> Matrix {
        let k = self.mode_index(mode);
        let d = self.dim();
        let mut a = vec![vec![C::default(); d]; d];
        for (j, counts) in self.basis.iter().enumerate() {
            let n = counts[k];
            if n > 0 {
                let mut lower = counts.clone();
                lower[k] -= 1;
                a[self.index_of(&lower)][j] = c((n as f64).sqrt(), 0.0);
            }
        }
        a
    }

    pub fn form_matrix(&self, form: &LinearForm) -> Matrix {
        let d = self.dim();
        let mut out = vec![vec![C::default(); d]; d];
        for (m, coef) in form.iter() {
            let a = self.annihilator(m);
            for i in 0..d {
                for j in 0..d {
                    out[i][j] += coef * a[i][j];
                }
            }
        }
        out
    }

    /// Σ c_m b†_m, coefficients as given.
    pub fn creation_matrix(&self, form: &LinearForm) -> Matrix {
        transpose(&self.form_matrix(form))
    }

    /// ⟨ψ| L_1†…L_k† L_k…L_1 |ψ⟩ as an explicit matrix element.
    pub fn expectation(&self, psi: &[C], forms: &[LinearForm]) -> f64 {
        let d = self.dim();
        let mut m = identity(d);
        for f in forms {
            m = matmul(&self.form_matrix(f), &m);
        }
        let op = matmul(&adjoint(&m), &m);
        let v = matvec(&op, psi);
        let val = inner(psi, &v);
        assert!(
            val.im.abs() < 1e-12,
            "hermitian expectation has imaginary part {}",
            val.im
        );
        val.re
    }
}

pub fn identity(d: usize) -> Matrix {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { c(1.0, 0.0) } else { C::default() })
                .collect()
        })
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    let d = a.len();
    (0..d).map(|i| (0..d).map(|j| a[j][i]).collect()).collect()
}

pub fn adjoint(a: &Matrix) -> Matrix {
    let d = a.len();
    (0..d)
        .map(|i| (0..d).map(|j| a[j][i].conj()).collect())
        .collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let d = a.len();
    let mut out = vec![vec![C::default(); d]; d];
    for i in 0..d {
        for k in 0..d {
            let x = a[i][k];
            if x == C::default() {
                continue;
            }
            for j in 0..d {
                out[i][j] += x * b[k][j];
            }
        }
    }
    out
}

pub fn matvec(a: &Matrix, v: &[C]) -> Vec<C> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm2(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

pub fn max_gap(a: &[C], b: &[C]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Eight distinct labels drawn from every ModeId variant.
pub fn mode_pool() -> Vec<ModeId> {
    use pairsim::{Frequency, Polarization::*};
    vec![
        ModeId::beam(1, V),
        ModeId::beam(1, H),
        ModeId::beam(2, V),
        ModeId::beam(2, H),
        ModeId::spectral(Frequency::Omega1, V),
        ModeId::spectral(Frequency::Omega2, H),
        ModeId::composite(1),
        ModeId::composite(2),
    ]
}

pub fn random_c(rng: &mut StdRng) -> C {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random unit-norm state with exactly `photons` photons over `space`.
pub fn random_state(space: &DenseSpace, photons: u32, rng: &mut StdRng) -> Vec<C> {
    let mut v: Vec<C> = (0..space.dim())
        .map(|i| {
            if space.counts(i).iter().sum::<u32>() == photons && rng.gen_bool(0.7) {
                random_c(rng)
            } else {
                C::default()
            }
        })
        .collect();
    let n = norm2(&v).sqrt();
    if n == 0.0 {
        let i = (0..space.dim())
            .find(|&i| space.counts(i).iter().sum::<u32>() == photons)
            .unwrap();
        v[i] = c(1.0, 0.0);
    } else {
        v.iter_mut().for_each(|x| *x /= n);
    }
    v
}

pub fn random_form(modes: &[ModeId], rng: &mut StdRng) -> LinearForm {
    let mut terms = Vec::new();
    for m in modes {
        if rng.gen_bool(0.6) {
            terms.push((*m, random_c(rng)));
        }
    }
    LinearForm::from_terms(terms)
}

/// Random subset of the pool with between 2 and 8 modes.
pub fn random_modes(rng: &mut StdRng) -> Vec<ModeId> {
    let pool = mode_pool();
    let n = rng.gen_range(2..=pool.len());
    let mut picked: Vec<ModeId> = pool;
    for i in (1..picked.len()).rev() {
        let j = rng.gen_range(0..=i);
        picked.swap(i, j);
    }
    picked.truncate(n);
    picked
}

/// Σ over `first` × `second` of ⟨L_q† L_p† L_p L_q⟩: the unordered-pair
/// second moment of the photon numbers carried by two sets of components.
pub fn pair_moment(
    space: &DenseSpace,
    psi: &[C],
    first: &[LinearForm],
    second: &[LinearForm],
) -> f64 {
    let mut total = 0.0;
    for p in first {
        for q in second {
            total += space.expectation(psi, &[p.clone(), q.clone()]);
        }
    }
    total
}
