//! Forgery games against the MAC. Each trial draws a fresh key, `q` Haar
//! message queries and a forgery from one of the built-in adversaries,
//! then runs the game's verification test. Trials record both the exact
//! acceptance probability and a sampled outcome.
//!
//! The adversaries are concrete strategies, so observed win rates are
//! lower-bound demonstrations of the security statements, not proofs.

use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::haar::sample_haar_state;
use crate::mc::{mean_stderr, wilson_interval};
use crate::qcore::dims::default_modulus;
use crate::qcore::linalg::{outer, CVector, C64};
use crate::rng::{streams, substream};

use super::mac::{MacScheme, SignerMode};

/// Residual norm below which an orthogonalized forgery is discarded.
pub const DISCARD_NORM: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameVariant {
    /// `t` tag copies, each verified and SWAP-tested against the message.
    ManyCopies,
    /// One verified tag permutation-tested with `t` message copies.
    PermTest,
    /// Verify, undo the message preparation, measure `|0^n>`.
    Uncompute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adversary {
    /// Random message orthogonal to the queries, random tag orthogonal to the queried tags.
    RandomOrthogonal,
    /// Random orthogonal message with the first queried tag replayed.
    Replay,
    /// Signs the forgery with an independently drawn key of the same kind,
    /// then projects out the queried tags.
    FreshSignature,
    /// Control: resubmits the first query with its genuine tag.
    Honest,
}

impl Adversary {
    pub fn label(self) -> &'static str {
        match self {
            Adversary::RandomOrthogonal => "random_orthogonal",
            Adversary::Replay => "replay",
            Adversary::FreshSignature => "fresh_signature",
            Adversary::Honest => "honest",
        }
    }
}

impl FromStr for GameVariant {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "many-copies" => Ok(GameVariant::ManyCopies),
            "perm-test" => Ok(GameVariant::PermTest),
            "uncompute" => Ok(GameVariant::Uncompute),
            _ => Err(LabError::Unknown(format!("no game named '{s}'"))),
        }
    }
}

impl FromStr for Adversary {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "a" | "random_orthogonal" => Ok(Adversary::RandomOrthogonal),
            "b" | "replay" => Ok(Adversary::Replay),
            "c" | "fresh_signature" => Ok(Adversary::FreshSignature),
            "honest" => Ok(Adversary::Honest),
            _ => Err(LabError::Unknown(format!("no adversary named '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForgeryGame {
    pub variant: GameVariant,
    pub n: usize,
    pub m: usize,
    pub t: usize,
    /// Number of signing queries.
    pub q: usize,
    pub adversary: Adversary,
    pub signer: SignerMode,
    /// Phase modulus for PRI keys.
    pub p: u64,
}

impl ForgeryGame {
    /// Defaults: Haar signer, adversary (a), one query.
    pub fn new(variant: GameVariant, n: usize, m: usize, t: usize) -> Self {
        ForgeryGame {
            variant,
            n,
            m,
            t,
            q: 1,
            adversary: Adversary::RandomOrthogonal,
            signer: SignerMode::Haar,
            p: default_modulus(t.max(1)),
        }
    }

    /// The reference value the win rate is compared with.
    pub fn reference_bound(&self) -> f64 {
        match self.variant {
            GameVariant::ManyCopies => 0.6f64.powi(self.t as i32),
            GameVariant::PermTest => 1.0 / (self.t as f64 + 1.0),
            GameVariant::Uncompute => {
                (1usize << self.m) as f64 / ((1usize << (self.n + self.m)) as f64 - self.q as f64)
            }
        }
    }

    /// Largest win rate still consistent with the reference: an additive
    /// 0.05 for the SWAP and permutation tests, a factor of 3 for uncompute.
    pub fn pass_threshold(&self) -> f64 {
        match self.variant {
            GameVariant::ManyCopies | GameVariant::PermTest => self.reference_bound() + 0.05,
            GameVariant::Uncompute => 3.0 * self.reference_bound(),
        }
    }

    fn validate(&self) -> Result<()> {
        let d = 1usize << self.n;
        if self.t == 0 {
            return Err(LabError::Invalid("games need t >= 1".into()));
        }
        if self.q + 1 > d && self.adversary != Adversary::Honest {
            return Err(LabError::Infeasible(format!(
                "no message orthogonal to q = {} queries in dimension {d}",
                self.q
            )));
        }
        if self.q == 0 && matches!(self.adversary, Adversary::Replay | Adversary::Honest) {
            return Err(LabError::Invalid(
                "replay and honest adversaries need at least one query".into(),
            ));
        }
        crate::qcore::check_cap(self.n + self.m, crate::qcore::StorageKind::Pure)
    }
}

/// One line of the optional JSON-lines transcript.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub forgery_kind: String,
    pub test_outcomes: Vec<bool>,
    pub win: bool,
}

#[derive(Clone, Debug)]
struct Trial {
    discarded: bool,
    fidelity: f64,
    accept: f64,
    outcomes: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub game: ForgeryGame,
    pub trials: usize,
    pub discarded: usize,
    pub wins: usize,
    /// Sampled win rate with its Wilson interval.
    pub win_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Mean of the exact per-trial acceptance probabilities.
    pub mean_accept: f64,
    pub mean_accept_stderr: f64,
    /// Mean `<ψ*| Ver(φ*) |ψ*>`.
    pub mean_fidelity: f64,
    pub reference_bound: f64,
    pub seed: u64,
    pub runtime_ms: u64,
}

impl GameReport {
    /// The Wilson interval reaches down to the pass threshold.
    pub fn passed(&self) -> bool {
        self.ci_low <= self.game.pass_threshold()
    }

    pub fn without_timing(mut self) -> Self {
        self.runtime_ms = 0;
        self
    }
}

/// Gram–Schmidt of `v` against orthonormal `basis`; `None` if too little remains.
fn orthogonalize(mut v: CVector, basis: &[CVector]) -> Option<CVector> {
    for b in basis {
        let c = b.dotc(&v);
        v -= b * c;
    }
    let norm = v.norm();
    (norm >= DISCARD_NORM).then(|| v / C64::new(norm, 0.0))
}

fn orthonormal(vs: &[CVector]) -> Vec<CVector> {
    let mut out: Vec<CVector> = Vec::with_capacity(vs.len());
    for v in vs {
        if let Some(u) = orthogonalize(v.clone(), &out) {
            out.push(u);
        }
    }
    out
}

fn play_trial(game: &ForgeryGame, seed: u64, trial: usize) -> Result<Trial> {
    let mut rng = substream(seed, streams::GAME, trial as u64);
    let (d_in, d_out) = (1usize << game.n, 1usize << (game.n + game.m));
    let scheme = MacScheme::sample(game.signer, game.n, game.m, game.p, &mut rng)?;
    let sign = scheme.signer().matrix();
    let queries: Vec<CVector> = (0..game.q)
        .map(|_| Ok(sample_haar_state(d_in, &mut rng)?.amplitudes().clone()))
        .collect::<Result<_>>()?;
    let tags: Vec<CVector> = queries.iter().map(|psi| sign * psi).collect();
    let discard = Trial {
        discarded: true,
        fidelity: 0.0,
        accept: 0.0,
        outcomes: vec![],
    };

    let (msg, tag) = if game.adversary == Adversary::Honest {
        (queries[0].clone(), tags[0].clone())
    } else {
        let msg_basis = orthonormal(&queries);
        let Some(msg) = orthogonalize(
            sample_haar_state(d_in, &mut rng)?.amplitudes().clone(),
            &msg_basis,
        ) else {
            return Ok(discard);
        };
        let tag_basis = orthonormal(&tags);
        let tag = match game.adversary {
            Adversary::RandomOrthogonal => orthogonalize(
                sample_haar_state(d_out, &mut rng)?.amplitudes().clone(),
                &tag_basis,
            ),
            Adversary::Replay => Some(tags[0].clone()),
            Adversary::FreshSignature => {
                let other = MacScheme::sample(game.signer, game.n, game.m, game.p, &mut rng)?;
                orthogonalize(other.signer().matrix() * &msg, &tag_basis)
            }
            Adversary::Honest => unreachable!("handled above"),
        };
        let Some(tag) = tag else { return Ok(discard) };
        (msg, tag)
    };

    let verified = scheme.verifier().apply(&outer(&tag))?;
    let fidelity = msg.dotc(&(&verified * &msg)).re.clamp(0.0, 1.0);
    let t = game.t as f64;
    let (accept, outcomes) = match game.variant {
        GameVariant::ManyCopies => {
            let swap = (1.0 + fidelity) / 2.0;
            (
                swap.powi(game.t as i32),
                (0..game.t).map(|_| rng.random::<f64>() < swap).collect(),
            )
        }
        GameVariant::PermTest => {
            let p = (1.0 + t * fidelity) / (t + 1.0);
            (p, vec![rng.random::<f64>() < p])
        }
        GameVariant::Uncompute => (fidelity, vec![rng.random::<f64>() < fidelity]),
    };
    Ok(Trial {
        discarded: false,
        fidelity,
        accept,
        outcomes,
    })
}

/// Plays `trials` independent rounds. Results depend only on `seed`;
/// the transcript, if any, is written in trial order.
pub fn play(
    game: &ForgeryGame,
    trials: usize,
    seed: u64,
    transcript: Option<&mut dyn Write>,
) -> Result<GameReport> {
    game.validate()?;
    if trials == 0 {
        return Err(LabError::Invalid("games need at least one trial".into()));
    }
    let start = std::time::Instant::now();
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|k| play_trial(game, seed, k))
        .collect::<Result<_>>()?;
    if let Some(w) = transcript {
        for (k, r) in results.iter().enumerate().filter(|(_, r)| !r.discarded) {
            let rec = TrialRecord {
                trial: k,
                forgery_kind: game.adversary.label().to_string(),
                test_outcomes: r.outcomes.clone(),
                win: r.outcomes.iter().all(|&o| o),
            };
            serde_json::to_writer(&mut *w, &rec)?;
            writeln!(w)?;
        }
    }
    let kept: Vec<&Trial> = results.iter().filter(|r| !r.discarded).collect();
    if kept.is_empty() {
        return Err(LabError::Infeasible("every trial was discarded".into()));
    }
    let wins = kept
        .iter()
        .filter(|r| r.outcomes.iter().all(|&o| o))
        .count();
    let (ci_low, ci_high) = wilson_interval(wins, kept.len());
    let accepts: Vec<f64> = kept.iter().map(|r| r.accept).collect();
    let (mean_accept, mean_accept_stderr) = mean_stderr(&accepts);
    let mean_fidelity = kept.iter().map(|r| r.fidelity).sum::<f64>() / kept.len() as f64;
    Ok(GameReport {
        game: *game,
        trials: kept.len(),
        discarded: trials - kept.len(),
        wins,
        win_rate: wins as f64 / kept.len() as f64,
        ci_low,
        ci_high,
        mean_accept,
        mean_accept_stderr,
        mean_fidelity,
        reference_bound: game.reference_bound(),
        seed,
        runtime_ms: start.elapsed().as_millis() as u64,
    })
}

pub fn play_many_copies_game(game: &ForgeryGame, trials: usize, seed: u64) -> Result<GameReport> {
    expect_variant(game, GameVariant::ManyCopies)?;
    play(game, trials, seed, None)
}

pub fn play_perm_test_game(game: &ForgeryGame, trials: usize, seed: u64) -> Result<GameReport> {
    expect_variant(game, GameVariant::PermTest)?;
    play(game, trials, seed, None)
}

pub fn play_uncompute_game(game: &ForgeryGame, trials: usize, seed: u64) -> Result<GameReport> {
    expect_variant(game, GameVariant::Uncompute)?;
    play(game, trials, seed, None)
}

fn expect_variant(game: &ForgeryGame, v: GameVariant) -> Result<()> {
    if game.variant != v {
        return Err(LabError::Invalid(format!(
            "expected a {v:?} game, got {:?}",
            game.variant
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn honest_control_wins_uncompute() {
        let mut g = ForgeryGame::new(GameVariant::Uncompute, 2, 2, 1);
        g.adversary = Adversary::Honest;
        let r = play(&g, 200, 1, None).unwrap();
        assert!((r.mean_accept - 1.0).abs() < 1e-10);
        assert_eq!(r.wins, 200);
    }

    #[test]
    fn uncompute_matches_expected_fidelity() {
        // E f = 2^m / (2^{n+m} - q) for a uniformly random tag orthogonal to the queried ones
        let g = ForgeryGame::new(GameVariant::Uncompute, 3, 2, 1);
        let r = play(&g, 4000, 2, None).unwrap();
        let want = 4.0 / 31.0;
        assert!(
            (r.mean_accept - want).abs() < 4.0 * r.mean_accept_stderr,
            "{} vs {want}",
            r.mean_accept
        );
        assert!(r.ci_low <= r.win_rate && r.win_rate <= r.ci_high);
    }

    #[test]
    fn replay_gives_orthogonal_verify_output() {
        let mut g = ForgeryGame::new(GameVariant::PermTest, 3, 2, 3);
        g.adversary = Adversary::Replay;
        let r = play(&g, 300, 3, None).unwrap();
        assert!(r.mean_fidelity < 1e-10);
        assert!((r.mean_accept - 0.25).abs() < 1e-10);
    }

    #[test]
    fn transcript_lines_and_determinism() {
        let mut g = ForgeryGame::new(GameVariant::ManyCopies, 2, 1, 2);
        g.signer = SignerMode::Pri;
        let mut buf: Vec<u8> = Vec::new();
        let a = play(&g, 50, 9, Some(&mut buf)).unwrap().without_timing();
        let b = play(&g, 50, 9, None).unwrap().without_timing();
        assert_eq!(a, b);
        let lines: Vec<TrialRecord> = String::from_utf8(buf)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), a.trials);
        assert!(lines
            .iter()
            .all(|r| r.test_outcomes.len() == 2 && r.win == r.test_outcomes.iter().all(|&o| o)));
        assert_eq!(lines.iter().filter(|r| r.win).count(), a.wins);
    }

    #[test]
    fn infeasible_and_named_variants() {
        let mut g = ForgeryGame::new(GameVariant::ManyCopies, 1, 1, 1);
        g.q = 2;
        assert!(matches!(
            play(&g, 10, 1, None),
            Err(LabError::Infeasible(_))
        ));
        assert_eq!(
            "perm-test".parse::<GameVariant>().unwrap(),
            GameVariant::PermTest
        );
        assert_eq!("b".parse::<Adversary>().unwrap(), Adversary::Replay);
        assert!("nope".parse::<GameVariant>().is_err());
    }
}
