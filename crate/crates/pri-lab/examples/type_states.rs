//! Type states, the symmetric projector, and the reference state ρ_uni.
//!
//!     cargo run --example type_states

use itertools::Itertools;
use pri_lab::qcore::linalg::{max_abs_diff, outer, CMatrix};
use pri_lab::symtypes::{
    binomial, rho_uni, sym_projector, type_of, type_state, type_state_vec, TypeVector,
};

fn main() -> pri_lab::error::Result<()> {
    // |type_T> for T = {0: 2, 1: 1} over an alphabet of 2
    let ty = TypeVector::new(2, &[(0, 2), (1, 1)])?;
    let psi = type_state(&ty)?;
    println!(
        "type {:?} has {} arrangements",
        ty.entries(),
        ty.arrangements().len()
    );
    for (k, a) in psi
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 1e-12)
    {
        println!("  |{k:03b}> {:.4}", a.re);
    }

    // the projectors onto all size-t types add up to the symmetric projector
    let (alphabet, t) = (3usize, 3usize);
    let dim = alphabet.pow(t as u32);
    let mut acc = CMatrix::zeros(dim, dim);
    let mut count = 0;
    for v in (0..alphabet).combinations_with_replacement(t) {
        acc += outer(&type_state_vec(&type_of(&v, alphabet)?)?);
        count += 1;
    }
    let gap = max_abs_diff(&acc, &sym_projector(alphabet, t)?);
    println!(
        "{count} types = binom(N+t-1, t) = {}; |sum - Pi_sym|_max = {gap:.1e}",
        binomial(alphabet + t - 1, t)
    );

    // ρ_uni on n + m = 2 qubits, one block of t = 2 distinct elements
    let rho = rho_uni(2, 1, 2)?;
    let tr: f64 = rho.matrix().trace().re;
    println!("rho_uni(2, 1, 2): dim {}, trace {tr:.3}", rho.dim());
    Ok(())
}
