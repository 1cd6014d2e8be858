//! Forgery-game statistics against closed forms for the built-in adversaries.
//!
//! For adversary (a) with a Haar signer and one query, the verified forgery is
//! a random state of the complement of `|ψ_1, 0^m>` after the dilation is
//! undone, so `E[f] = 2^m / (2^{n+m} - 1)` exactly.

use pri_lab::apps::{play, Adversary, ForgeryGame, GameReport, GameVariant, SignerMode};

fn expected_fidelity(n: usize, m: usize, q: usize) -> f64 {
    (1usize << m) as f64 / ((1usize << (n + m)) - q) as f64
}

fn game(variant: GameVariant, n: usize, m: usize, t: usize) -> ForgeryGame {
    ForgeryGame::new(variant, n, m, t)
}

fn within(r: &GameReport, want: f64, sigmas: f64) -> bool {
    (r.mean_accept - want).abs() <= sigmas * r.mean_accept_stderr
}

#[test]
fn perm_test_acceptance_matches_closed_form() {
    let (n, m, t) = (4, 1, 3);
    let r = play(&game(GameVariant::PermTest, n, m, t), 4000, 11, None).unwrap();
    let f = expected_fidelity(n, m, 1);
    let want = (1.0 + t as f64 * f) / (t as f64 + 1.0);
    assert!((want - 0.298_387).abs() < 1e-6);
    assert!(
        within(&r, want, 4.0),
        "{} vs {want} ± {}",
        r.mean_accept,
        r.mean_accept_stderr
    );
    assert!((r.mean_fidelity - f).abs() < 0.01);
    assert_eq!(r.discarded, 0);
}

#[test]
fn swap_success_sits_in_the_markov_window() {
    // n + m >= 5, at least 10^4 trials
    let (n, m) = (4, 1);
    let r = play(&game(GameVariant::ManyCopies, n, m, 1), 10_000, 12, None).unwrap();
    let swap_success = 0.5 * (1.0 + r.mean_fidelity);
    assert!(swap_success >= 0.5);
    assert!(
        swap_success <= 0.5 + 10.0 * expected_fidelity(n, m, 1),
        "{swap_success}"
    );
}

#[test]
fn many_copies_win_rate_decreases_with_t() {
    let rates: Vec<GameReport> = (1..=4)
        .map(|t| play(&game(GameVariant::ManyCopies, 3, 1, t), 3000, 13, None).unwrap())
        .collect();
    for w in rates.windows(2) {
        // non-increasing up to interval overlap
        assert!(
            w[1].ci_low <= w[0].ci_high,
            "{} then {}",
            w[0].win_rate,
            w[1].win_rate
        );
        assert!(w[1].mean_accept < w[0].mean_accept);
    }
    let t4 = &rates[3];
    assert!(t4.win_rate <= 0.6f64.powi(4) + 0.05);
}

#[test]
fn pri_and_haar_signers_agree() {
    for variant in [GameVariant::PermTest, GameVariant::Uncompute] {
        let mut g = game(variant, 3, 1, 2);
        let haar = play(&g, 3000, 14, None).unwrap();
        g.signer = SignerMode::Pri;
        let pri = play(&g, 3000, 15, None).unwrap();
        let gap = (haar.mean_accept - pri.mean_accept).abs();
        let se = haar.mean_accept_stderr.hypot(pri.mean_accept_stderr);
        assert!(
            gap <= 4.0 * se,
            "{variant:?}: haar {} pri {} (se {se})",
            haar.mean_accept,
            pri.mean_accept
        );
        assert!(haar.ci_low <= pri.ci_high && pri.ci_low <= haar.ci_high);
    }
}

#[test]
fn replay_gives_the_orthogonal_rates() {
    let t = 3;
    let mut g = game(GameVariant::ManyCopies, 3, 1, t);
    g.adversary = Adversary::Replay;
    let r = play(&g, 2000, 16, None).unwrap();
    assert!((r.mean_accept - 0.5f64.powi(t as i32)).abs() < 1e-12);
    g.variant = GameVariant::PermTest;
    let r = play(&g, 2000, 16, None).unwrap();
    assert!((r.mean_accept - 1.0 / (t as f64 + 1.0)).abs() < 1e-12);
}

#[test]
fn fresh_signature_adversary_is_no_better_than_random() {
    let (n, m) = (3, 1);
    let mut g = game(GameVariant::Uncompute, n, m, 1);
    g.adversary = Adversary::FreshSignature;
    let r = play(&g, 3000, 17, None).unwrap();
    assert!(
        r.mean_accept <= expected_fidelity(n, m, 1) + 4.0 * r.mean_accept_stderr,
        "{}",
        r.mean_accept
    );
}

#[test]
fn games_are_deterministic_per_seed() {
    let g = game(GameVariant::PermTest, 2, 1, 2);
    let a = play(&g, 500, 99, None).unwrap().without_timing();
    let b = play(&g, 500, 99, None).unwrap().without_timing();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}
