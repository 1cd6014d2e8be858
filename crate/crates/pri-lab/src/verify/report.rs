use serde::{Deserialize, Serialize, Serializer};

use crate::mc::DEFAULT_SAMPLES;
use crate::qcore::dims::default_modulus;

use super::registry::ExperimentName;

/// Tolerance for experiments whose conclusion is an exact zero.
pub const EXACT_ZERO_TOL: f64 = 1e-12;
/// Added to fitted bounds so an exactly computed zero is not failed by rounding.
pub const NUMERIC_FLOOR: f64 = 1e-10;

/// Dimensions and sampler parameters of one experiment run. `p = 0` asks
/// for the default modulus, the smallest power of two above twice the
/// number of twirled blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub s: usize,
    pub t: usize,
    pub q: usize,
    pub p: u64,
    pub samples: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 1,
            m: 1,
            s: 1,
            t: 1,
            q: 1,
            p: 0,
            samples: DEFAULT_SAMPLES,
        }
    }
}

impl ExperimentConfig {
    pub fn modulus(&self, blocks: usize) -> u64 {
        if self.p == 0 {
            default_modulus(blocks)
        } else {
            self.p
        }
    }

    pub fn get(&self, param: SweepParam) -> usize {
        match param {
            SweepParam::N => self.n,
            SweepParam::M => self.m,
            SweepParam::S => self.s,
            SweepParam::T => self.t,
            SweepParam::Q => self.q,
        }
    }

    pub fn with(mut self, param: SweepParam, value: usize) -> Self {
        match param {
            SweepParam::N => self.n = value,
            SweepParam::M => self.m = value,
            SweepParam::S => self.s = value,
            SweepParam::T => self.t = value,
            SweepParam::Q => self.q = value,
        }
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    N,
    M,
    S,
    T,
    Q,
}

/// One measured point. The verdict is recomputed from the numbers each
/// time it is read or serialized.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct ExperimentReport {
    pub name: ExperimentName,
    pub config: ExperimentConfig,
    pub measured: f64,
    pub stderr: f64,
    pub bound_expr: String,
    pub bound_value: f64,
    #[serde(rename = "fitted_C")]
    pub fitted_c: Option<f64>,
    pub seed: u64,
    pub runtime_ms: u64,
    pub samples: usize,
    #[serde(default)]
    pub details: serde_json::Value,
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        self.measured <= self.bound_value + 3.0 * self.stderr
    }

    pub fn without_timing(mut self) -> Self {
        self.runtime_ms = 0;
        self
    }
}

fn verdict_str(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

impl Serialize for ExperimentReport {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            name: ExperimentName,
            config: &'a ExperimentConfig,
            measured: f64,
            stderr: f64,
            bound_expr: &'a str,
            bound_value: f64,
            #[serde(rename = "fitted_C")]
            fitted_c: Option<f64>,
            verdict: &'static str,
            seed: u64,
            runtime_ms: u64,
            samples: usize,
            details: &'a serde_json::Value,
        }
        Wire {
            name: self.name,
            config: &self.config,
            measured: self.measured,
            stderr: self.stderr,
            bound_expr: &self.bound_expr,
            bound_value: self.bound_value,
            fitted_c: self.fitted_c,
            verdict: verdict_str(self.passed()),
            seed: self.seed,
            runtime_ms: self.runtime_ms,
            samples: self.samples,
            details: &self.details,
        }
        .serialize(ser)
    }
}

/// A ladder of points sharing one fitted constant.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct SweepReport {
    pub name: ExperimentName,
    pub param: Vec<SweepParam>,
    pub points: Vec<ExperimentReport>,
    #[serde(rename = "fitted_C")]
    pub fitted_c: Option<f64>,
    /// `C` implied by each of the last two points.
    pub tail_c: Option<(f64, f64)>,
}

impl SweepReport {
    /// The last two points imply constants within a factor of two, or
    /// both sit at the noise level.
    pub fn stable(&self) -> bool {
        let Some((a, b)) = self.tail_c else {
            return true;
        };
        let k = self.points.len();
        if k < 2 {
            return true;
        }
        let noise = |r: &ExperimentReport| r.measured <= 3.0 * r.stderr + NUMERIC_FLOOR;
        if noise(&self.points[k - 1]) && noise(&self.points[k - 2]) {
            return true;
        }
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        lo > 0.0 && hi <= 2.0 * lo
    }

    pub fn passed(&self) -> bool {
        self.stable() && self.points.iter().all(ExperimentReport::passed)
    }

    pub fn without_timing(mut self) -> Self {
        self.points = self
            .points
            .into_iter()
            .map(ExperimentReport::without_timing)
            .collect();
        self
    }
}

impl Serialize for SweepReport {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            name: ExperimentName,
            param: &'a [SweepParam],
            #[serde(rename = "fitted_C")]
            fitted_c: Option<f64>,
            tail_c: Option<(f64, f64)>,
            stable: bool,
            verdict: &'static str,
            points: &'a [ExperimentReport],
        }
        Wire {
            name: self.name,
            param: &self.param,
            fitted_c: self.fitted_c,
            tail_c: self.tail_c,
            stable: self.stable(),
            verdict: verdict_str(self.passed()),
            points: &self.points,
        }
        .serialize(ser)
    }
}

/// `C = measured / expr` at a calibration point; zero when `expr` vanishes.
pub fn implied_constant(measured: f64, expr: f64) -> f64 {
    if expr > 0.0 {
        measured / expr
    } else {
        0.0
    }
}

/// `2·C·expr` plus the rounding floor.
pub fn fitted_bound(c: f64, expr: f64) -> f64 {
    2.0 * c * expr + NUMERIC_FLOOR
}
