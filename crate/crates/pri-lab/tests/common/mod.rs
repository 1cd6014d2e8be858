#![allow(dead_code)]

use pri_lab::haar::ginibre;
use pri_lab::qcore::linalg::{outer, CMatrix, C64};
use pri_lab::qcore::{DensityMatrix, PureState};
use pri_lab::rng::from_seed;

/// Full-rank random density matrix `G G† / Tr(G G†)`.
pub fn random_density(d: usize, seed: u64) -> DensityMatrix {
    let g = ginibre(d, d, &mut from_seed(seed));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    DensityMatrix::new(rho / tr).unwrap()
}

/// Random density of rank `r`.
pub fn random_density_rank(d: usize, r: usize, seed: u64) -> DensityMatrix {
    let g = ginibre(d, r, &mut from_seed(seed));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    DensityMatrix::new(rho / tr).unwrap()
}

pub fn random_matrix(d: usize, seed: u64) -> CMatrix {
    ginibre(d, d, &mut from_seed(seed))
}

pub fn pure_matrix(p: &PureState) -> CMatrix {
    outer(p.amplitudes())
}

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}
