//! Plain-text experiment configuration: `key = value` per line, `#` comments.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::bourgain::estimates::EstimateId;
use crate::diagnostics::ScheduleParams;
use crate::error::{Error, Result};
use crate::solver::NlsParams;
use crate::spectral::{check_exp_guard, GridSpec};

use super::profiles::DataProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    RadiusDecay,
    Conservation,
    EstimateSuite,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::RadiusDecay => "radius_decay",
            ExperimentKind::Conservation => "conservation",
            ExperimentKind::EstimateSuite => "estimate_suite",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "radius_decay" => Ok(ExperimentKind::RadiusDecay),
            "conservation" => Ok(ExperimentKind::Conservation),
            "estimate_suite" => Ok(ExperimentKind::EstimateSuite),
            _ => Err(format!("unknown experiment `{s}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodKind {
    SplitStep,
    Picard,
}

impl MethodKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MethodKind::SplitStep => "splitstep",
            MethodKind::Picard => "picard",
        }
    }
}

impl FromStr for MethodKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "splitstep" => Ok(MethodKind::SplitStep),
            "picard" => Ok(MethodKind::Picard),
            _ => Err(format!("unknown method `{s}` (expected splitstep or picard)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub dim: usize,
    pub n: usize,
    pub box_len: f64,
    pub p: u32,
    pub sigma0: f64,
    pub t_final: f64,
    pub dt: f64,
    pub method: MethodKind,
    pub data_profile: DataProfile,
    pub sigma_list: Vec<f64>,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub c0: f64,
    pub c_p: f64,
    pub eps: f64,
    /// Monte-Carlo samples per estimate and resolution.
    pub samples: usize,
    /// Worker threads; 0 lets the pool decide.
    pub workers: usize,
    /// Solver steps between recorded samples.
    pub stride: usize,
    /// Conjugated factors of the multilinear products; defaults to odd positions.
    pub conj_pattern: Option<Vec<bool>>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: ExperimentKind::RadiusDecay,
            dim: 1,
            n: 1024,
            box_len: 80.0,
            p: 5,
            sigma0: 0.5,
            t_final: 10.0,
            dt: 1e-3,
            method: MethodKind::SplitStep,
            data_profile: DataProfile::Sech,
            sigma_list: vec![1e-4, 1e-3, 1e-2],
            seed: 0,
            out_dir: PathBuf::from("results"),
            c0: 1.0,
            c_p: 1.0,
            eps: 0.0,
            samples: 100,
            workers: 0,
            stride: 100,
            conj_pattern: None,
        }
    }
}

const KEYS: [&str; 20] = [
    "experiment",
    "dim",
    "n",
    "box_len",
    "p",
    "sigma0",
    "T",
    "dt",
    "method",
    "data_profile",
    "sigma_list",
    "seed",
    "out_dir",
    "c0",
    "C_p",
    "eps",
    "samples",
    "workers",
    "stride",
    "conj_pattern",
];

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| Error::Config {
        line,
        message: format!("bad value `{value}` for `{key}`: {e}"),
    })
}

fn parse_list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let inner = value.trim().trim_start_matches('[').trim_end_matches(']');
    if inner.trim().is_empty() {
        return Ok(Vec::new());
    }
    inner.split(',').map(|v| parse_value(line, key, v.trim())).collect()
}

fn parse_flags(line: usize, value: &str) -> Result<Vec<bool>> {
    parse_list::<String>(line, "conj_pattern", value)?
        .iter()
        .map(|v| match v.as_str() {
            "0" | "false" => Ok(false),
            "1" | "true" => Ok(true),
            _ => Err(Error::Config { line, message: format!("bad conj_pattern entry `{v}` (expected 0 or 1)") }),
        })
        .collect()
}

impl ExperimentConfig {
    /// Parses and validates a configuration; keys not given keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            cfg.set(line, key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        match key {
            "experiment" => self.experiment = parse_value(line, key, value)?,
            "dim" => self.dim = parse_value(line, key, value)?,
            "n" => self.n = parse_value(line, key, value)?,
            "box_len" => self.box_len = parse_value(line, key, value)?,
            "p" => self.p = parse_value(line, key, value)?,
            "sigma0" => self.sigma0 = parse_value(line, key, value)?,
            "T" => self.t_final = parse_value(line, key, value)?,
            "dt" => self.dt = parse_value(line, key, value)?,
            "method" => self.method = parse_value(line, key, value)?,
            "data_profile" => self.data_profile = parse_value(line, key, value)?,
            "sigma_list" => self.sigma_list = parse_list(line, key, value)?,
            "seed" => self.seed = parse_value(line, key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "c0" => self.c0 = parse_value(line, key, value)?,
            "C_p" => self.c_p = parse_value(line, key, value)?,
            "eps" => self.eps = parse_value(line, key, value)?,
            "samples" => self.samples = parse_value(line, key, value)?,
            "workers" => self.workers = parse_value(line, key, value)?,
            "stride" => self.stride = parse_value(line, key, value)?,
            "conj_pattern" => self.conj_pattern = Some(parse_flags(line, value)?),
            _ => return Err(Error::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Every key in a fixed order with shortest round-trip floats.
    pub fn to_canonical(&self) -> String {
        let floats = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        for key in KEYS {
            let value = match key {
                "experiment" => self.experiment.as_str().to_string(),
                "dim" => self.dim.to_string(),
                "n" => self.n.to_string(),
                "box_len" => format!("{:?}", self.box_len),
                "p" => self.p.to_string(),
                "sigma0" => format!("{:?}", self.sigma0),
                "T" => format!("{:?}", self.t_final),
                "dt" => format!("{:?}", self.dt),
                "method" => self.method.as_str().to_string(),
                "data_profile" => self.data_profile.to_string(),
                "sigma_list" => format!("[{}]", floats(&self.sigma_list)),
                "seed" => self.seed.to_string(),
                "out_dir" => self.out_dir.display().to_string(),
                "c0" => format!("{:?}", self.c0),
                "C_p" => format!("{:?}", self.c_p),
                "eps" => format!("{:?}", self.eps),
                "samples" => self.samples.to_string(),
                "workers" => self.workers.to_string(),
                "stride" => self.stride.to_string(),
                "conj_pattern" => match &self.conj_pattern {
                    Some(flags) => format!(
                        "[{}]",
                        flags.iter().map(|f| if *f { "1" } else { "0" }).collect::<Vec<_>>().join(", ")
                    ),
                    None => continue,
                },
                _ => unreachable!(),
            };
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.dim, self.n, self.box_len)
    }

    pub fn nls(&self) -> Result<NlsParams> {
        NlsParams::new(self.p)
    }

    pub fn schedule(&self) -> Result<ScheduleParams> {
        ScheduleParams::new(self.c0, self.c_p, self.eps)
    }

    pub fn conj_pattern(&self) -> Vec<bool> {
        self.conj_pattern
            .clone()
            .unwrap_or_else(|| crate::bourgain::estimates::default_conj_pattern(self.p))
    }

    /// Re-checks every precondition the experiment relies on.
    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Err(Error::Config { line: 0, message });
        let grid = self.grid()?;
        let nls = self.nls()?;
        self.schedule()?;
        if !(self.sigma0 >= 0.0) {
            return bad(format!("sigma0 must be >= 0, got {}", self.sigma0));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("T must be > 0, got {}", self.t_final));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if self.stride == 0 {
            return bad("stride must be positive".into());
        }
        if let Some(flags) = &self.conj_pattern {
            if flags.len() != nls.p() as usize {
                return Err(Error::ArityMismatch {
                    id: "conj_pattern".into(),
                    expected: nls.p() as usize,
                    got: flags.len(),
                });
            }
        }
        match self.experiment {
            ExperimentKind::RadiusDecay => {
                check_exp_guard(self.sigma0, grid.max_l1_frequency())?;
            }
            ExperimentKind::Conservation => {
                let positive: Vec<f64> = self.sigma_list.iter().copied().filter(|s| *s > 0.0).collect();
                if positive.len() != self.sigma_list.len() || positive.len() < 3 {
                    return bad("conservation needs at least three positive sigma values".into());
                }
                let lo = positive.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = positive.iter().copied().fold(0.0, f64::max);
                if hi / lo < 100.0 * (1.0 - 1e-12) {
                    return bad(format!("sigma_list must span two decades, got [{lo}, {hi}]"));
                }
                check_exp_guard(hi, grid.max_l1_frequency())?;
            }
            ExperimentKind::EstimateSuite => {
                if self.samples < 100 {
                    return bad(format!("estimate_suite needs at least 100 samples, got {}", self.samples));
                }
                if !(self.sigma0 > 0.0) {
                    return bad("estimate_suite uses sigma0 > 0 as the Gevrey strip width".into());
                }
                for id in EstimateId::ALL {
                    let probe = GridSpec::new(id.dim(), 2 * self.n, self.box_len)?;
                    let padded = (self.p as usize * probe.n()).next_power_of_two();
                    let fine = GridSpec::new(id.dim(), padded, self.box_len)?;
                    check_exp_guard(self.sigma0, fine.max_l1_frequency())?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# almost conservation on sech data
experiment = conservation
n = 512
box_len = 40
sigma_list = 1e-4, 1e-3, 1e-2   # two decades
c0 = 200
";

    #[test]
    fn parse_and_canonical_roundtrip() {
        let cfg = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.experiment, ExperimentKind::Conservation);
        assert_eq!(cfg.n, 512);
        assert_eq!(cfg.sigma_list, vec![1e-4, 1e-3, 1e-2]);
        let canon = cfg.to_canonical();
        let again = ExperimentConfig::parse(&canon).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_canonical(), canon);
        assert!(canon.contains("sigma_list = [0.0001, 0.001, 0.01]"));
        assert!(canon.starts_with("experiment = conservation\n"));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::parse("experiment = radius_decay\nsigma_zero = 1\n").unwrap_err();
        match err {
            Error::UnknownKey(k) => assert_eq!(k, "sigma_zero"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(ExperimentConfig::parse("n = 100").is_err());
        assert!(ExperimentConfig::parse("p = 4").is_err());
        assert!(ExperimentConfig::parse("dim = 3").is_err());
        assert!(ExperimentConfig::parse("method = rk4").is_err());
        assert!(ExperimentConfig::parse("no equals sign").is_err());
        assert!(ExperimentConfig::parse("experiment = conservation\nsigma_list = 1e-3, 2e-3, 5e-3").is_err());
        assert!(ExperimentConfig::parse("experiment = estimate_suite\nsamples = 10\nsigma0 = 0.1\nn = 64\nbox_len = 6.283185307179586").is_err());
        let err = ExperimentConfig::parse("conj_pattern = 0, 1, 0").unwrap_err();
        assert!(matches!(err, Error::ArityMismatch { expected: 5, got: 3, .. }));
    }

    #[test]
    fn conj_pattern_and_profiles_parse() {
        let cfg = ExperimentConfig::parse("conj_pattern = [1, 0, 1, 0, 1]\ndata_profile = random_gevrey(0.4, 7)").unwrap();
        assert_eq!(cfg.conj_pattern(), vec![true, false, true, false, true]);
        assert_eq!(cfg.data_profile, DataProfile::RandomGevrey { sigma: 0.4, seed: 7 });
        let again = ExperimentConfig::parse(&cfg.to_canonical()).unwrap();
        assert_eq!(again, cfg);
    }
}
