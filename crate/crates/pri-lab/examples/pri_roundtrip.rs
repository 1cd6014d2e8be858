//! Build a PRI from explicit tables, apply it, invert it, and dump its
//! matrices in the QMAT format.
//!
//!     cargo run --example pri_roundtrip

use pri_lab::pri::{pri_apply_pure, pri_dilation, pri_invert, pri_isometry, PriSpec};
use pri_lab::qcore::qmat::{read_qmat, write_qmat};
use pri_lab::qcore::{trace_distance, PureState};
use pri_lab::rng::from_seed;

fn main() -> pri_lab::error::Result<()> {
    let (n, m, p) = (2, 1, 8);
    let spec = PriSpec::sample(n, m, p, &mut from_seed(2024))?;
    println!("spec:\n{}", spec.to_json()?);

    let g = pri_isometry(&spec)?;
    println!(
        "G is {}x{}, |G^dag G - I|_max = {:.2e}",
        g.d_out(),
        g.d_in(),
        g.deviation()
    );

    // G|x> = 2^{-m/2} sum_z w^{f(x,z)} |pi(x,z)>
    let x = PureState::basis(n, 3)?;
    let y = pri_apply_pure(&spec, &x, 1, 0)?;
    for (k, a) in y
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > 1e-12)
    {
        println!("  <{k:03b}|G|11> = {:+.4} {:+.4}i", a.re, a.im);
    }

    let back = pri_invert(&spec, &y.to_density())?;
    println!(
        "TD(Inv(G|x>), |x>) = {:.2e}",
        trace_distance(&back, &x.to_density())?
    );

    // keyed backends are seeded stand-ins that resolve to the same kind of tables
    let keyed = PriSpec::keyed(n, m, p, 1, 2)?;
    println!(
        "keyed deviation = {:.2e}",
        pri_isometry(&keyed)?.deviation()
    );

    let mut buf = Vec::new();
    write_qmat(&mut buf, pri_dilation(&spec)?.matrix())?;
    let u = read_qmat(buf.as_slice())?;
    println!(
        "dilation dumped: {} bytes, {}x{}",
        buf.len(),
        u.nrows(),
        u.ncols()
    );
    Ok(())
}
