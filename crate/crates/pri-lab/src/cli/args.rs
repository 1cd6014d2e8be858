use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "pri-lab",
    version,
    about = "Simulate pseudorandom isometries and check their security statements at desk scale"
)]
pub struct Cli {
    /// List every registered experiment and game with the statement it checks.
    #[arg(long)]
    pub list: bool,

    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment (or `all`) and emit its report.
    Verify(VerifyArgs),
    /// Play a MAC forgery game.
    Game(GameArgs),
    /// Apply, invert or dump a PRI given as a JSON spec.
    #[command(subcommand)]
    Pri(PriCommand),
    /// Re-run every command recorded in a manifest.
    Rerun {
        manifest: PathBuf,
        /// Combined report file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        timing: bool,
    },
}

/// Dimension flags; unset flags keep the command's defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct DimFlags {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub p: Option<u64>,
    /// Total `n + m`. Sets `m = nm - n` when `--n` is given, else `n = nm - m`.
    #[arg(long)]
    pub nm: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputFlags {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Keep wall-clock runtimes in reports (they are zeroed by default so
    /// reruns are byte-identical).
    #[arg(long)]
    pub timing: bool,
    /// Also write a manifest recording every command run.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Experiment name or alias (see --list), or `all`.
    pub name: String,
    /// Run the default ladders instead of a single point.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long)]
    pub samples: Option<usize>,
    #[command(flatten)]
    pub dims: DimFlags,
    #[command(flatten)]
    pub out: OutputFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignerArg {
    Haar,
    Pri,
}

#[derive(Debug, Args)]
pub struct GameArgs {
    /// many-copies, perm-test or uncompute.
    pub variant: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = SignerArg::Haar)]
    pub signer: SignerArg,
    /// a (random orthogonal), b (replay), c (fresh signature) or honest.
    #[arg(long, default_value = "a")]
    pub adversary: String,
    /// JSON-lines transcript, one record per kept trial.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    #[command(flatten)]
    pub dims: DimFlags,
    #[command(flatten)]
    pub out: OutputFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DumpWhat {
    Isometry,
    Dilation,
}

#[derive(Debug, Subcommand)]
pub enum PriCommand {
    /// `(I_ell ⊗ G^{⊗q})` on an input state; prints amplitudes or writes QMAT.
    Apply {
        #[arg(long)]
        spec: PathBuf,
        /// zeros, plus, basis:K, or a QMAT file (column vector or density matrix).
        #[arg(long, default_value = "zeros")]
        input: String,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 0)]
        ell: usize,
        /// QMAT output file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Inverse channel on an `n + m`-qubit tag read from a QMAT file.
    Invert {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes the isometry or its dilation as a QMAT file.
    Dump {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = DumpWhat::Isometry)]
        what: DumpWhat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draws a spec: explicit uniform tables, or the seeded stand-in backends with --keyed.
    Keygen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        p: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        keyed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}
