//! Haar sampling and the almost-invariance deficit TD(ρ, E_U[U^{⊗t} ρ U^{†⊗t}]).
//!
//!     cargo run --release --example haar_invariance

use pri_lab::haar::{
    almost_invariance_deficit, haar_orthogonal_columns_vs_iid,
    haar_orthogonal_columns_vs_iid_exact, sample_haar_unitary,
};
use pri_lab::qcore::linalg::{max_abs_diff, CMatrix};
use pri_lab::qcore::ops::trace_distance_raw;
use pri_lab::qcore::{DensityMatrix, RegisterLayout};
use pri_lab::rng::from_seed;
use pri_lab::symtypes::rho_uni;

fn main() -> pri_lab::error::Result<()> {
    let u = sample_haar_unitary(4, &mut from_seed(1))?;
    let m = u.matrix();
    let dev = max_abs_diff(&(m.adjoint() * m), &CMatrix::identity(4, 4));
    println!("Haar U on 2 qubits, |U^dag U - I|_max = {dev:.1e}");

    let samples = 2048;
    let t = 2;
    // nm = 4 takes about a minute on one core
    for nm in 2..=3 {
        let layout = RegisterLayout::blocks(t, 1 << nm)?;
        let rho = rho_uni(nm, 1, t)?;
        let est = almost_invariance_deficit(rho.matrix(), &layout, samples, 7)?;
        println!(
            "nm = {nm}: deficit(rho_uni) = {:.4} ± {:.4}  (s²t²/2^nm = {:.4})",
            est.value,
            est.stderr,
            4.0 / (1 << nm) as f64
        );
    }
    let mixed = DensityMatrix::maximally_mixed(4)?;
    let layout = RegisterLayout::blocks(2, 4)?;
    let est = almost_invariance_deficit(mixed.matrix(), &layout, 256, 7)?;
    println!("maximally mixed control: {:.1e}", est.value);

    // s orthogonal Haar columns vs s independent Haar states; exact value 1/(2d) at s = 2, t = 1
    let r = haar_orthogonal_columns_vs_iid(2, 2, 1, samples, 3)?;
    let (orth, iid) = haar_orthogonal_columns_vs_iid_exact(2, 2, 1)?;
    println!(
        "orthogonal vs iid: {:.4} ± {:.4} sampled, {:.4} exact",
        r.td.value,
        r.td.stderr,
        trace_distance_raw(&orth, &iid)?
    );
    Ok(())
}
