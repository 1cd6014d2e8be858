use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::apps::{ForgeryGame, GameVariant};
use crate::error::{LabError, Result};
use crate::verify::{ExperimentConfig, ExperimentName};

pub const SCHEMA_VERSION: u32 = 1;

/// A replayable record of every command a CLI invocation ran. Seeds are
/// always stored explicitly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub created_at: String,
    pub commands: Vec<ManifestCommand>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ManifestCommand {
    Verify {
        name: ExperimentName,
        config: ExperimentConfig,
        seed: u64,
        sweep: bool,
        anchor: String,
    },
    Game {
        name: GameVariant,
        config: ForgeryGame,
        trials: usize,
        seed: u64,
        anchor: String,
    },
}

impl RunManifest {
    pub fn new(commands: Vec<ManifestCommand>) -> Self {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            created_at: chrono::Utc::now().to_rfc3339(),
            commands,
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let m: RunManifest = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(LabError::Invalid(format!(
                "manifest schema {} is not {SCHEMA_VERSION}",
                m.schema_version
            )));
        }
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

/// The statement an experiment checks, as shown by `--list`.
pub fn experiment_anchor(e: ExperimentName) -> String {
    let bound = if e.is_exact_zero() {
        "exactly 0".to_string()
    } else {
        format!("O({})", e.bound_expr())
    };
    format!("{}: {}; bound {}", e.as_str(), e.summary(), bound)
}

pub fn game_anchor(v: GameVariant) -> String {
    match v {
        GameVariant::ManyCopies => {
            "many-copies: t verified tags each SWAP-tested; win rate at most 0.6^t".into()
        }
        GameVariant::PermTest => {
            "perm-test: one verified tag against t message copies; win rate at most 1/(t+1)".into()
        }
        GameVariant::Uncompute => {
            "uncompute: verify then undo the message; win rate at most 2^m/(2^(n+m) - q)".into()
        }
    }
}

pub fn game_name(v: GameVariant) -> &'static str {
    match v {
        GameVariant::ManyCopies => "many-copies",
        GameVariant::PermTest => "perm-test",
        GameVariant::Uncompute => "uncompute",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_both_kinds() {
        let m = RunManifest::new(vec![
            ManifestCommand::Verify {
                name: ExperimentName::TdisInfo,
                config: ExperimentName::TdisInfo.default_config(),
                seed: 7,
                sweep: true,
                anchor: experiment_anchor(ExperimentName::TdisInfo),
            },
            ManifestCommand::Game {
                name: GameVariant::PermTest,
                config: ForgeryGame::new(GameVariant::PermTest, 4, 1, 3),
                trials: 100,
                seed: 1,
                anchor: game_anchor(GameVariant::PermTest),
            },
        ]);
        let js = serde_json::to_string(&m).unwrap();
        assert!(js.contains("\"kind\":\"verify\""));
        assert_eq!(serde_json::from_str::<RunManifest>(&js).unwrap(), m);
    }

    #[test]
    fn every_anchor_names_its_experiment() {
        for e in ExperimentName::ALL {
            assert!(experiment_anchor(e).starts_with(e.as_str()));
        }
    }
}
