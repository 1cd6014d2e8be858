//! Multi-copy encryption with a per-message PRI key and PRFSG outputs.
//!
//!     cargo run --example encryption

use pri_lab::apps::{dec, enc, multi_copy_distinguishing_td, prfsg_state, EncScheme};
use pri_lab::haar::sample_haar_state;
use pri_lab::pri::PriSpec;
use pri_lab::qcore::{trace_distance, PureState};
use pri_lab::rng::from_seed;

fn main() -> pri_lab::error::Result<()> {
    let scheme = EncScheme::new(2, 2, 8, 0xfeed);
    let mut rng = from_seed(9);
    let msg = sample_haar_state(4, &mut rng)?;
    let ct = enc(&scheme, &msg, 3, &mut rng)?;
    let out = dec(&scheme, &ct)?;
    println!(
        "3 copies, range weight {:.6}, ok = {}",
        out.range_weight, out.ok
    );
    for c in &out.copies {
        println!(
            "  TD(copy, msg) = {:.1e}",
            trace_distance(c, &msg.to_density())?
        );
    }

    let mut bad = ct.clone();
    bad.wrapped_key ^= 1;
    println!("flipped key bit: ok = {}", dec(&scheme, &bad)?.ok);

    // key-averaged distance between two messages' t-copy ciphertexts
    let zero = PureState::basis(1, 0)?;
    let plus = PureState::plus(1)?;
    for m in 2..=4 {
        println!(
            "m = {m}: TD(E|0>^2, E|+>^2) = {:.4}",
            multi_copy_distinguishing_td(1, m, 8, 2, &zero, &plus)?
        );
    }

    let spec = PriSpec::sample(2, 1, 8, &mut rng)?;
    let a = prfsg_state(&spec, 0)?;
    let b = prfsg_state(&spec, 1)?;
    println!(
        "PRFSG outputs on distinct inputs: |<G0|G1>| = {:.1e}",
        a.inner(&b).norm()
    );
    Ok(())
}
