//! Named experiments that measure each security statement as a trace
//! distance (or an exact zero) and check it against a bound with a fitted
//! constant.
//!
//! An `O(expr)` bound is read as follows: `C` is fitted on the first
//! rung of the experiment's ladder, and every point must satisfy
//! `measured <= 2·C·expr + 3·stderr`. A sweep additionally requires the
//! constants implied by its last two rungs to agree within a factor of
//! two, which catches a wrong exponent.

pub mod lemmas;
pub mod registry;
pub mod report;

use std::time::Instant;

use serde_json::json;

use crate::error::Result;

pub use lemmas::Measurement;
pub use registry::{ExperimentName, Sweep};
pub use report::{
    ExperimentConfig, ExperimentReport, SweepParam, SweepReport, EXACT_ZERO_TOL, NUMERIC_FLOOR,
};

/// Runs the measurement only, without any bound.
pub fn measure(name: ExperimentName, cfg: &ExperimentConfig, seed: u64) -> Result<Measurement> {
    match name {
        ExperimentName::TdisInfo => lemmas::tdis_info(cfg, seed),
        ExperimentName::OuterCompQuery => lemmas::outer_comp_query(cfg, seed),
        ExperimentName::MulticopyInfo => lemmas::multicopy_info(cfg, seed),
        ExperimentName::TuniInfo => lemmas::tuni_info(cfg, seed),
        ExperimentName::HaarInfo => lemmas::haar_info(cfg, seed),
        ExperimentName::TuniInvar => lemmas::tuni_invar(cfg, seed),
        ExperimentName::TuniHaarDis => lemmas::tuni_haar_dis(cfg, seed),
        ExperimentName::HaarPerpToIid => lemmas::haar_perp_to_iid(cfg, seed),
        ExperimentName::LengthExtension => lemmas::length_extension(cfg, seed),
        ExperimentName::PriImpliesPrsg => lemmas::pri_implies_prsg(cfg, seed),
    }
}

fn timed(name: ExperimentName, cfg: &ExperimentConfig, seed: u64) -> Result<(Measurement, u64)> {
    let start = Instant::now();
    let meas = measure(name, cfg, seed)?;
    Ok((meas, start.elapsed().as_millis() as u64))
}

fn assemble(
    name: ExperimentName,
    cfg: ExperimentConfig,
    seed: u64,
    meas: Measurement,
    runtime_ms: u64,
    fitted_c: Option<f64>,
) -> ExperimentReport {
    let bound_value = match fitted_c {
        Some(c) => report::fitted_bound(c, name.bound_value(&cfg)),
        None => EXACT_ZERO_TOL,
    };
    ExperimentReport {
        name,
        config: cfg,
        measured: meas.estimate.value,
        stderr: meas.estimate.stderr,
        bound_expr: name.bound_expr().to_string(),
        bound_value,
        fitted_c,
        seed,
        runtime_ms,
        samples: meas.estimate.samples,
        details: meas.details,
    }
}

/// One configuration. `C` is calibrated on the first rung of the primary
/// ladder with the remaining parameters taken from `cfg`.
pub fn run(name: ExperimentName, cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentReport> {
    let (meas, ms) = timed(name, cfg, seed)?;
    if name.is_exact_zero() {
        return Ok(assemble(name, *cfg, seed, meas, ms, None));
    }
    let sweep = &name.sweeps()[0];
    let calib_cfg = sweep.apply(*cfg, 0);
    let calib = if calib_cfg == *cfg {
        meas.estimate
    } else {
        measure(name, &calib_cfg, seed)?.estimate
    };
    let c = report::implied_constant(calib.value, name.bound_value(&calib_cfg));
    let mut rep = assemble(name, *cfg, seed, meas, ms, Some(c));
    if let serde_json::Value::Object(map) = &mut rep.details {
        map.insert(
            "calibration".into(),
            json!({ "config": calib_cfg, "measured": calib.value, "stderr": calib.stderr }),
        );
    }
    Ok(rep)
}

/// Runs every rung of `sweep` on top of `base`.
pub fn run_sweep(
    name: ExperimentName,
    sweep: &Sweep,
    base: &ExperimentConfig,
    seed: u64,
) -> Result<SweepReport> {
    let mut measured = Vec::with_capacity(sweep.rungs.len());
    for k in 0..sweep.rungs.len() {
        let cfg = sweep.apply(*base, k);
        let (meas, ms) = timed(name, &cfg, seed)?;
        measured.push((cfg, meas, ms));
    }
    let implied: Vec<f64> = measured
        .iter()
        .map(|(cfg, meas, _)| report::implied_constant(meas.estimate.value, name.bound_value(cfg)))
        .collect();
    let (fitted_c, tail_c) = if name.is_exact_zero() {
        (None, None)
    } else {
        let k = implied.len();
        (
            Some(implied[0]),
            (k >= 2).then(|| (implied[k - 2], implied[k - 1])),
        )
    };
    let points = measured
        .into_iter()
        .map(|(cfg, meas, ms)| assemble(name, cfg, seed, meas, ms, fitted_c))
        .collect();
    Ok(SweepReport {
        name,
        param: sweep.params.clone(),
        points,
        fitted_c,
        tail_c,
    })
}

/// All default ladders of one experiment.
pub fn run_sweeps(
    name: ExperimentName,
    base: &ExperimentConfig,
    seed: u64,
) -> Result<Vec<SweepReport>> {
    name.sweeps()
        .iter()
        .map(|sw| run_sweep(name, sw, base, seed))
        .collect()
}

pub fn run_tdis(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentReport> {
    run(ExperimentName::TdisInfo, cfg, seed)
}

pub fn run_outer_zero(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentReport> {
    run(ExperimentName::OuterCompQuery, cfg, seed)
}

pub fn run_multicopy(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentReport> {
    run(ExperimentName::MulticopyInfo, cfg, seed)
}

pub fn run_tuni_info(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentReport> {
    run(ExperimentName::TuniInfo, cfg, seed)
}

pub fn run_haar_info(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentReport> {
    run(ExperimentName::HaarInfo, cfg, seed)
}

/// The almost-invariance deficit; the exact distance to the i.i.d. Haar
/// reference is reported in the details and as its own experiment.
pub fn run_invariance_suite(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentReport> {
    run(ExperimentName::TuniInvar, cfg, seed)
}

pub fn run_length_extension(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentReport> {
    run(ExperimentName::LengthExtension, cfg, seed)
}

pub fn run_prsg_from_pri(cfg: &ExperimentConfig, seed: u64) -> Result<ExperimentReport> {
    run(ExperimentName::PriImpliesPrsg, cfg, seed)
}
