use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::LabError;
use crate::symtypes::factorial;

use super::report::{ExperimentConfig, SweepParam};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentName {
    TdisInfo,
    OuterCompQuery,
    MulticopyInfo,
    TuniInfo,
    HaarInfo,
    TuniInvar,
    TuniHaarDis,
    HaarPerpToIid,
    LengthExtension,
    PriImpliesPrsg,
}

/// A ladder: each rung assigns a value to every parameter in `params`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sweep {
    pub params: Vec<SweepParam>,
    pub rungs: Vec<Vec<usize>>,
}

impl Sweep {
    pub fn one(param: SweepParam, values: &[usize]) -> Self {
        Sweep {
            params: vec![param],
            rungs: values.iter().map(|&v| vec![v]).collect(),
        }
    }

    pub fn apply(&self, base: ExperimentConfig, rung: usize) -> ExperimentConfig {
        self.params
            .iter()
            .zip(&self.rungs[rung])
            .fold(base, |c, (&p, &v)| c.with(p, v))
    }
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 10] = [
        ExperimentName::TdisInfo,
        ExperimentName::OuterCompQuery,
        ExperimentName::MulticopyInfo,
        ExperimentName::TuniInfo,
        ExperimentName::HaarInfo,
        ExperimentName::TuniInvar,
        ExperimentName::TuniHaarDis,
        ExperimentName::HaarPerpToIid,
        ExperimentName::LengthExtension,
        ExperimentName::PriImpliesPrsg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentName::TdisInfo => "tdis_info",
            ExperimentName::OuterCompQuery => "outer_comp_query",
            ExperimentName::MulticopyInfo => "multicopy_info",
            ExperimentName::TuniInfo => "tuni_info",
            ExperimentName::HaarInfo => "haar_info",
            ExperimentName::TuniInvar => "tuni_invar",
            ExperimentName::TuniHaarDis => "tuni_haar_dis",
            ExperimentName::HaarPerpToIid => "haar_perp_to_iid",
            ExperimentName::LengthExtension => "length_extension",
            ExperimentName::PriImpliesPrsg => "pri_implies_prsg",
        }
    }

    /// Short command-line name.
    pub fn alias(self) -> &'static str {
        match self {
            ExperimentName::TdisInfo => "tdis",
            ExperimentName::OuterCompQuery => "outer-zero",
            ExperimentName::MulticopyInfo => "multicopy",
            ExperimentName::TuniInfo => "tuni",
            ExperimentName::HaarInfo => "haar",
            ExperimentName::TuniInvar => "invariance",
            ExperimentName::TuniHaarDis => "haar-dis",
            ExperimentName::HaarPerpToIid => "perp-iid",
            ExperimentName::LengthExtension => "length-extension",
            ExperimentName::PriImpliesPrsg => "prsg",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            ExperimentName::TdisInfo => "twirled distinct-type family vs rho_uni",
            ExperimentName::OuterCompQuery => "cross-type outer products are annihilated",
            ExperimentName::MulticopyInfo => "q copies of one pure state vs rho_uni(1, q)",
            ExperimentName::TuniInfo => "unique 2t-types, half kept as side information",
            ExperimentName::HaarInfo => "Haar inputs with t kept and t queried copies",
            ExperimentName::TuniInvar => "Haar-twirl deficit of rho_uni",
            ExperimentName::TuniHaarDis => "rho_uni vs i.i.d. Haar t-copies",
            ExperimentName::HaarPerpToIid => "orthogonal Haar columns vs i.i.d. Haar states",
            ExperimentName::LengthExtension => {
                "Haar isometry on half of a Haar state vs a longer Haar state"
            }
            ExperimentName::PriImpliesPrsg => "PRI on fixed inputs vs Haar copies",
        }
    }

    /// Exact-zero experiments are checked against a fixed tolerance, not a fit.
    pub fn is_exact_zero(self) -> bool {
        self == ExperimentName::OuterCompQuery
    }

    pub fn bound_expr(self) -> &'static str {
        match self {
            ExperimentName::TdisInfo | ExperimentName::TuniInfo => "s*t^2/2^m",
            ExperimentName::OuterCompQuery => "0",
            ExperimentName::MulticopyInfo => "q^2/2^m",
            ExperimentName::HaarInfo => "s^2*t^2/2^n + s*t^2/2^m",
            ExperimentName::TuniInvar | ExperimentName::TuniHaarDis => "s^2*t^2/2^(n+m)",
            ExperimentName::HaarPerpToIid => "s^2*t/2^n",
            ExperimentName::LengthExtension => "t!*t^2/2^(n+m) + t^2/2^n",
            ExperimentName::PriImpliesPrsg => "q^2*t/2^(n+m)",
        }
    }

    /// The bound expression evaluated at `c` (without the constant).
    pub fn bound_value(self, c: &ExperimentConfig) -> f64 {
        let (s, t, q) = (c.s as f64, c.t as f64, c.q as f64);
        let p2 = |k: usize| 2f64.powi(k as i32);
        match self {
            ExperimentName::TdisInfo | ExperimentName::TuniInfo => s * t * t / p2(c.m),
            ExperimentName::OuterCompQuery => 0.0,
            ExperimentName::MulticopyInfo => q * q / p2(c.m),
            ExperimentName::HaarInfo => s * s * t * t / p2(c.n) + s * t * t / p2(c.m),
            ExperimentName::TuniInvar | ExperimentName::TuniHaarDis => {
                s * s * t * t / p2(c.n + c.m)
            }
            ExperimentName::HaarPerpToIid => s * s * t / p2(c.n),
            ExperimentName::LengthExtension => {
                factorial(c.t) * t * t / p2(c.n + c.m) + t * t / p2(c.n)
            }
            ExperimentName::PriImpliesPrsg => q * q * t / p2(c.n + c.m),
        }
    }

    pub fn default_config(self) -> ExperimentConfig {
        let d = ExperimentConfig::default();
        match self {
            ExperimentName::TdisInfo => ExperimentConfig {
                n: 1,
                m: 2,
                s: 1,
                t: 2,
                q: 2,
                ..d
            },
            ExperimentName::OuterCompQuery => ExperimentConfig {
                n: 1,
                m: 1,
                s: 1,
                t: 2,
                q: 2,
                p: 8,
                ..d
            },
            ExperimentName::MulticopyInfo => ExperimentConfig {
                n: 1,
                m: 2,
                s: 1,
                t: 2,
                q: 2,
                ..d
            },
            ExperimentName::TuniInfo => ExperimentConfig {
                n: 2,
                m: 2,
                s: 1,
                t: 1,
                q: 1,
                ..d
            },
            ExperimentName::HaarInfo => ExperimentConfig {
                n: 2,
                m: 2,
                s: 1,
                t: 1,
                q: 1,
                ..d
            },
            ExperimentName::TuniInvar | ExperimentName::TuniHaarDis => ExperimentConfig {
                n: 1,
                m: 1,
                s: 1,
                t: 2,
                q: 2,
                ..d
            },
            ExperimentName::HaarPerpToIid => ExperimentConfig {
                n: 2,
                m: 0,
                s: 2,
                t: 1,
                q: 2,
                ..d
            },
            ExperimentName::LengthExtension => ExperimentConfig {
                n: 2,
                m: 1,
                s: 1,
                t: 2,
                q: 2,
                ..d
            },
            ExperimentName::PriImpliesPrsg => ExperimentConfig {
                n: 1,
                m: 1,
                s: 1,
                t: 1,
                q: 2,
                ..d
            },
        }
    }

    /// Default ladders; the first rung calibrates `C`.
    pub fn sweeps(self) -> Vec<Sweep> {
        use SweepParam::*;
        match self {
            ExperimentName::TdisInfo | ExperimentName::MulticopyInfo => {
                vec![Sweep::one(M, &[2, 3, 4])]
            }
            ExperimentName::OuterCompQuery
            | ExperimentName::TuniInfo
            | ExperimentName::TuniInvar
            | ExperimentName::TuniHaarDis
            | ExperimentName::PriImpliesPrsg => vec![Sweep::one(M, &[1, 2, 3])],
            ExperimentName::HaarInfo => vec![Sweep::one(M, &[1, 2, 3]), Sweep::one(N, &[1, 2, 3])],
            ExperimentName::HaarPerpToIid => vec![Sweep::one(N, &[2, 3, 4])],
            // decreasing bound expression; the distance grows with m at fixed n
            // toward the collision term, so m = 1 rungs are not used to calibrate
            ExperimentName::LengthExtension => {
                vec![Sweep {
                    params: vec![N, M],
                    rungs: vec![vec![1, 2], vec![1, 3], vec![2, 1]],
                }]
            }
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        ExperimentName::ALL
            .into_iter()
            .find(|e| e.as_str() == norm || e.alias().replace('-', "_") == norm)
            .ok_or_else(|| LabError::Unknown(format!("no experiment named '{s}'")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for e in ExperimentName::ALL {
            assert_eq!(e.as_str().parse::<ExperimentName>().unwrap(), e);
            assert_eq!(e.alias().parse::<ExperimentName>().unwrap(), e);
            let js = serde_json::to_string(&e).unwrap();
            assert_eq!(js, format!("\"{}\"", e.as_str()));
            for sw in e.sweeps() {
                assert!(sw.rungs.len() >= 3 && sw.rungs.iter().all(|r| r.len() == sw.params.len()));
            }
        }
        assert!("nope".parse::<ExperimentName>().is_err());
    }

    #[test]
    fn bound_expressions() {
        let c = ExperimentName::TdisInfo.default_config();
        assert_eq!(
            ExperimentName::TdisInfo.bound_value(&c.with(SweepParam::M, 4)),
            4.0 / 16.0
        );
        let le = ExperimentName::LengthExtension.default_config();
        assert_eq!(
            ExperimentName::LengthExtension.bound_value(&le),
            8.0 / 8.0 + 4.0 / 4.0
        );
    }
}
