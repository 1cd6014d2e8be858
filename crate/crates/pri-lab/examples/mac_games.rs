//! The three MAC forgery games against the built-in adversaries.
//!
//!     cargo run --release --example mac_games

use pri_lab::apps::{mac_sign, mac_verify, play, Adversary, ForgeryGame, GameVariant, MacScheme};
use pri_lab::qcore::{trace_distance, PureState};
use pri_lab::rng::from_seed;

fn main() -> pri_lab::error::Result<()> {
    let scheme = MacScheme::haar(2, 2, &mut from_seed(1))?;
    let msg = PureState::plus(2)?;
    let tag = mac_sign(&scheme, &msg)?;
    let back = mac_verify(&scheme, &tag.to_density())?;
    println!(
        "honest tag verifies: TD = {:.1e}",
        trace_distance(&back, &msg.to_density())?
    );

    let games = [
        (GameVariant::PermTest, 4, 1, 3),
        (GameVariant::ManyCopies, 3, 1, 4),
        (GameVariant::Uncompute, 3, 2, 1),
    ];
    for (variant, n, m, t) in games {
        for adversary in [
            Adversary::RandomOrthogonal,
            Adversary::Replay,
            Adversary::FreshSignature,
        ] {
            let mut g = ForgeryGame::new(variant, n, m, t);
            g.adversary = adversary;
            let r = play(&g, 2000, 5, None)?;
            println!(
                "{variant:?} n={n} m={m} t={t} {:<17} win {:.3} [{:.3}, {:.3}]  E[accept] {:.4}  reference {:.4}",
                adversary.label(),
                r.win_rate,
                r.ci_low,
                r.ci_high,
                r.mean_accept,
                r.reference_bound
            );
        }
    }
    Ok(())
}
