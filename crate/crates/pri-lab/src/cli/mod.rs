//! Command-line front end. Every command resolves to a list of manifest
//! entries first, so a `--manifest` file replays exactly what ran.

pub mod args;
pub mod manifest;
pub mod output;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::Path;

use clap::error::ErrorKind;
use clap::Parser;
use rand::Rng;

use crate::apps::{play, Adversary, ForgeryGame, GameVariant, SignerMode};
use crate::error::{LabError, Result};
use crate::pri::{
    pri_apply_matrix, pri_apply_pure, pri_dilation, pri_invert, pri_isometry, PriSpec,
};
use crate::qcore::qmat::{read_qmat, write_qmat};
use crate::qcore::{default_modulus, CMatrix, CVector, DensityMatrix, PureState};
use crate::rng::from_seed;
use crate::verify::{self, ExperimentConfig, ExperimentName};

pub use args::{Cli, Command, DimFlags, Format, OutputFlags, PriCommand};
pub use manifest::{experiment_anchor, game_anchor, ManifestCommand, RunManifest};
pub use output::Outcome;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Amplitudes below this are left out of listings.
const LIST_EPS: f64 = 1e-12;

pub fn exit_code(err: &LabError) -> i32 {
    match err {
        LabError::Cap { .. } => EXIT_CAP,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Errors go to stderr.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.unwrap_or(0))
        .build()
        .map_err(|e| LabError::Invalid(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: Cli) -> Result<i32> {
    if cli.list {
        print!("{}", list_text());
        return Ok(EXIT_PASS);
    }
    match cli.command {
        None => Err(LabError::Invalid("no command given; see --help".into())),
        Some(Command::Verify(a)) => {
            let cmds = verify_commands(&a.name, a.sweep, a.samples, &a.dims, a.out.seed)?;
            let single = a.name != "all" && !a.sweep;
            finish(cmds, single, &a.out, a.name == "all")
        }
        Some(Command::Game(a)) => {
            let cmd = game_command(
                &a.variant,
                a.trials,
                a.signer,
                &a.adversary,
                &a.dims,
                a.out.seed,
            )?;
            match &a.transcript {
                Some(path) => {
                    let outcome = run_game_with_transcript(&cmd, path)?.strip_timing(a.out.timing);
                    write_outputs(vec![cmd], vec![outcome], true, &a.out, false)
                }
                None => finish(vec![cmd], true, &a.out, false),
            }
        }
        Some(Command::Pri(p)) => run_pri(p),
        Some(Command::Rerun {
            manifest,
            out,
            format,
            timing,
        }) => {
            let m = RunManifest::read(&manifest)?;
            let flags = OutputFlags {
                seed: 0,
                out,
                format,
                timing,
                manifest: None,
            };
            finish(m.commands, false, &flags, true)
        }
    }
}

/// Every experiment and game with the statement it checks.
pub fn list_text() -> String {
    let mut s = String::from("experiments:\n");
    for e in ExperimentName::ALL {
        let _ = writeln!(
            s,
            "  {:<18} {:<18} {}",
            e.as_str(),
            e.alias(),
            experiment_anchor(e)
        );
    }
    s += "games:\n";
    for v in [
        GameVariant::ManyCopies,
        GameVariant::PermTest,
        GameVariant::Uncompute,
    ] {
        let _ = writeln!(s, "  {}", game_anchor(v));
    }
    s
}

/// Applies dimension flags on top of `cfg`.
fn apply_dims(mut cfg: ExperimentConfig, d: &DimFlags) -> Result<ExperimentConfig> {
    let (n, m) = resolve_nm(cfg.n, cfg.m, d)?;
    cfg.n = n;
    cfg.m = m;
    cfg.s = d.s.unwrap_or(cfg.s);
    cfg.t = d.t.unwrap_or(cfg.t);
    cfg.q = d.q.unwrap_or(cfg.q);
    cfg.p = d.p.unwrap_or(cfg.p);
    Ok(cfg)
}

fn resolve_nm(n0: usize, m0: usize, d: &DimFlags) -> Result<(usize, usize)> {
    let (n, m) = (d.n.unwrap_or(n0), d.m.unwrap_or(m0));
    let Some(nm) = d.nm else { return Ok((n, m)) };
    if d.n.is_some() && d.m.is_some() && n + m != nm {
        return Err(LabError::Invalid(format!(
            "--nm {nm} disagrees with --n {n} --m {m}"
        )));
    }
    if d.n.is_some() {
        let m = nm
            .checked_sub(n)
            .ok_or_else(|| LabError::Invalid(format!("--nm {nm} is smaller than --n {n}")))?;
        Ok((n, m))
    } else {
        let n = nm
            .checked_sub(m)
            .ok_or_else(|| LabError::Invalid(format!("--nm {nm} is smaller than --m {m}")))?;
        Ok((n, m))
    }
}

fn verify_commands(
    name: &str,
    sweep: bool,
    samples: Option<usize>,
    dims: &DimFlags,
    seed: u64,
) -> Result<Vec<ManifestCommand>> {
    let names: Vec<ExperimentName> = if name.eq_ignore_ascii_case("all") {
        ExperimentName::ALL.to_vec()
    } else {
        vec![name.parse()?]
    };
    names
        .into_iter()
        .map(|e| {
            let mut config = apply_dims(e.default_config(), dims)?;
            config.samples = samples.unwrap_or(config.samples);
            Ok(ManifestCommand::Verify {
                name: e,
                config,
                seed,
                sweep,
                anchor: experiment_anchor(e),
            })
        })
        .collect()
}

/// Game defaults: `n = 3`, `m = 1`, `t = 3`, one query.
fn game_command(
    variant: &str,
    trials: usize,
    signer: args::SignerArg,
    adversary: &str,
    d: &DimFlags,
    seed: u64,
) -> Result<ManifestCommand> {
    let v: GameVariant = variant.parse()?;
    let (n, m) = resolve_nm(3, 1, d)?;
    if d.s.is_some() {
        return Err(LabError::Invalid("games take no --s".into()));
    }
    let t = d.t.unwrap_or(3);
    let mut game = ForgeryGame::new(v, n, m, t);
    game.q = d.q.unwrap_or(1);
    game.adversary = adversary.parse::<Adversary>()?;
    game.signer = match signer {
        args::SignerArg::Haar => SignerMode::Haar,
        args::SignerArg::Pri => SignerMode::Pri,
    };
    game.p = d.p.unwrap_or(default_modulus(t.max(1)));
    Ok(ManifestCommand::Game {
        name: v,
        config: game,
        trials,
        seed,
        anchor: game_anchor(v),
    })
}

/// Runs one manifest entry; sweeps expand to one outcome per ladder.
pub fn execute(cmd: &ManifestCommand) -> Result<Vec<Outcome>> {
    match cmd {
        ManifestCommand::Verify {
            name,
            config,
            seed,
            sweep: false,
            ..
        } => Ok(vec![Outcome::Point(verify::run(*name, config, *seed)?)]),
        ManifestCommand::Verify {
            name,
            config,
            seed,
            sweep: true,
            ..
        } => Ok(verify::run_sweeps(*name, config, *seed)?
            .into_iter()
            .map(Outcome::Sweep)
            .collect()),
        ManifestCommand::Game {
            config,
            trials,
            seed,
            ..
        } => Ok(vec![Outcome::Game(play(config, *trials, *seed, None)?)]),
    }
}

fn run_game_with_transcript(cmd: &ManifestCommand, path: &Path) -> Result<Outcome> {
    let ManifestCommand::Game {
        config,
        trials,
        seed,
        ..
    } = cmd
    else {
        return Err(LabError::Invalid(
            "transcripts are only written for games".into(),
        ));
    };
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    let report = play(config, *trials, *seed, Some(&mut w))?;
    std::io::Write::flush(&mut w)?;
    Ok(Outcome::Game(report))
}

fn finish(
    cmds: Vec<ManifestCommand>,
    single: bool,
    flags: &OutputFlags,
    table: bool,
) -> Result<i32> {
    let mut outcomes = Vec::new();
    for c in &cmds {
        outcomes.extend(
            execute(c)?
                .into_iter()
                .map(|o| o.strip_timing(flags.timing)),
        );
    }
    write_outputs(cmds, outcomes, single, flags, table)
}

fn write_outputs(
    cmds: Vec<ManifestCommand>,
    outcomes: Vec<Outcome>,
    single: bool,
    flags: &OutputFlags,
    table: bool,
) -> Result<i32> {
    let bytes = output::render(&outcomes, single, flags.format)?;
    output::emit(&bytes, flags.out.as_deref())?;
    if table {
        eprint!("{}", output::summary_table(&outcomes));
    }
    if let Some(path) = &flags.manifest {
        RunManifest::new(cmds).write(path)?;
    }
    Ok(if outcomes.iter().all(Outcome::passed) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    })
}

fn read_spec(path: &Path) -> Result<PriSpec> {
    PriSpec::from_json(&std::fs::read_to_string(path)?)
}

/// `zeros`, `plus` and `basis:K` name pure states on `qubits` qubits;
/// anything else is a QMAT file holding a column vector or a square matrix.
fn parse_input(input: &str, qubits: usize) -> Result<CMatrix> {
    let pure = match input {
        "zeros" => Some(PureState::basis(qubits, 0)?),
        "plus" => Some(PureState::plus(qubits)?),
        s => match s.strip_prefix("basis:") {
            Some(k) => {
                let k: usize = k
                    .parse()
                    .map_err(|_| LabError::Invalid(format!("bad basis index in '{s}'")))?;
                Some(PureState::basis(qubits, k)?)
            }
            None => None,
        },
    };
    match pure {
        Some(p) => Ok(CMatrix::from_column_slice(
            p.dim(),
            1,
            p.amplitudes().as_slice(),
        )),
        None => read_qmat(std::io::BufReader::new(std::fs::File::open(input)?)),
    }
}

fn write_or_list(mat: &CMatrix, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_qmat(std::io::BufWriter::new(std::fs::File::create(path)?), mat),
        None => {
            print!("{}", listing(mat));
            Ok(())
        }
    }
}

/// Nonzero entries, one per line: `|bits> re im` for vectors and
/// `row col re im` for matrices.
pub fn listing(mat: &CMatrix) -> String {
    let mut s = String::new();
    let bits = crate::qcore::dims::ceil_log2(mat.nrows());
    if mat.ncols() == 1 {
        for (i, a) in mat
            .column(0)
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > LIST_EPS)
        {
            let _ = writeln!(
                s,
                "|{:0width$b}> {:+.12e} {:+.12e}",
                i,
                a.re,
                a.im,
                width = bits.max(1)
            );
        }
    } else {
        for r in 0..mat.nrows() {
            for c in 0..mat.ncols() {
                let a = mat[(r, c)];
                if a.norm() > LIST_EPS {
                    let _ = writeln!(s, "{r} {c} {:+.12e} {:+.12e}", a.re, a.im);
                }
            }
        }
    }
    s
}

fn run_pri(cmd: PriCommand) -> Result<i32> {
    match cmd {
        PriCommand::Apply {
            spec,
            input,
            q,
            ell,
            out,
        } => {
            let spec = read_spec(&spec)?;
            let x = parse_input(&input, ell + q * spec.n)?;
            let y = if x.ncols() == 1 {
                let psi = PureState::new(CVector::from_column_slice(x.as_slice()))?;
                let out = pri_apply_pure(&spec, &psi, q, ell)?;
                CMatrix::from_column_slice(out.dim(), 1, out.amplitudes().as_slice())
            } else {
                pri_apply_matrix(&spec, &DensityMatrix::new(x)?.into_matrix(), q, ell)?
            };
            write_or_list(&y, out.as_deref())?;
        }
        PriCommand::Invert { spec, input, out } => {
            let spec = read_spec(&spec)?;
            let x = read_qmat(std::io::BufReader::new(std::fs::File::open(&input)?))?;
            let rho = if x.ncols() == 1 {
                PureState::new(CVector::from_column_slice(x.as_slice()))?.to_density()
            } else {
                DensityMatrix::new(x)?
            };
            write_or_list(pri_invert(&spec, &rho)?.matrix(), out.as_deref())?;
        }
        PriCommand::Dump { spec, what, out } => {
            let spec = read_spec(&spec)?;
            let mat = match what {
                args::DumpWhat::Isometry => pri_isometry(&spec)?.into_matrix(),
                args::DumpWhat::Dilation => pri_dilation(&spec)?.into_matrix(),
            };
            write_qmat(std::io::BufWriter::new(std::fs::File::create(out)?), &mat)?;
        }
        PriCommand::Keygen {
            n,
            m,
            p,
            seed,
            keyed,
            out,
        } => {
            let mut rng = from_seed(seed);
            let spec = if keyed {
                let (k1, k2) = (rng.random(), rng.random());
                PriSpec::keyed(n, m, p, k1, k2)?
            } else {
                PriSpec::sample(n, m, p, &mut rng)?
            };
            let js = spec.to_json()? + "\n";
            match out {
                Some(path) => std::fs::write(path, js)?,
                None => print!("{js}"),
            }
        }
    }
    Ok(EXIT_PASS)
}
