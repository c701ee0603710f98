//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # reference inverter experiment
//! model = inverter
//! filter = both
//! seed = 42
//! inverter.v_low = 0.8
//! scenario.profile = 0:1, 0.05:1, 0.06:0.5, 0.12:0.5, 0.13:1, 0.2:1
//! noise.r = 1.6e-5, 1.6e-5, 1e-4, 1e-4
//! ```
//!
//! Every key is optional; unknown and repeated keys are errors.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::estimation::NoiseModel;
use crate::power::{InverterScenario, SmibParams, VoltageProfile, DEFAULT_SEED};
use crate::{Error, Result, State};

pub const SEED_ENV: &str = "HDS_SEED";
pub const DEFAULT_NEAR_SWITCH_WINDOW: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Inverter,
    Smib,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FilterChoice {
    Hybrid,
    Continuous,
    Both,
}

impl FilterChoice {
    pub fn runs_hybrid(self) -> bool {
        matches!(self, FilterChoice::Hybrid | FilterChoice::Both)
    }

    pub fn runs_continuous(self) -> bool {
        matches!(self, FilterChoice::Continuous | FilterChoice::Both)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Inverter => "inverter",
            ModelKind::Smib => "smib",
        })
    }
}

impl fmt::Display for FilterChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterChoice::Hybrid => "hybrid",
            FilterChoice::Continuous => "continuous",
            FilterChoice::Both => "both",
        })
    }
}

/// SMIB simulation and safety-check settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SmibSetup {
    pub params: SmibParams,
    pub delta0: f64,
    pub omega0: f64,
    pub horizon: f64,
    pub dt: f64,
    /// Number of sampled initial conditions for `verify`.
    pub samples: usize,
    pub delta_range: (f64, f64),
    pub omega_range: (f64, f64),
}

impl Default for SmibSetup {
    fn default() -> Self {
        Self {
            params: SmibParams::default(),
            delta0: 0.2,
            omega0: 0.0,
            horizon: 2.0,
            dt: 1e-3,
            samples: 50,
            delta_range: (0.15, 0.25),
            omega_range: (-0.1, 0.1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub filter: FilterChoice,
    /// Seed from the file; see [`resolve_seed`] for precedence.
    pub seed: Option<u64>,
    /// Half-width of the window around each switching instant.
    pub near_switch_window: f64,
    pub out_dir: Option<PathBuf>,
    /// Inverter scenario; its `seed` is overwritten by the resolved seed.
    pub inverter: InverterScenario,
    pub smib: SmibSetup,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Inverter,
            filter: FilterChoice::Both,
            seed: None,
            near_switch_window: DEFAULT_NEAR_SWITCH_WINDOW,
            out_dir: None,
            inverter: InverterScenario::reference(DEFAULT_SEED),
            smib: SmibSetup::default(),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x = f64::from_str(v).map_err(|_| Error::Config(format!("{key}: expected a number, got `{v}`")))?;
    if !x.is_finite() {
        return Err(Error::Config(format!("{key}: value must be finite")));
    }
    Ok(x)
}

fn parse_positive(key: &str, v: &str) -> Result<f64> {
    let x = parse_f64(key, v)?;
    if x <= 0.0 {
        return Err(Error::Config(format!("{key}: must be positive, got {x}")));
    }
    Ok(x)
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_f64(key, s.trim())).collect()
}

fn parse_pair(key: &str, v: &str) -> Result<(f64, f64)> {
    match parse_list(key, v)?.as_slice() {
        &[a, b] if a <= b => Ok((a, b)),
        _ => Err(Error::Config(format!("{key}: expected `lo, hi` with lo <= hi"))),
    }
}

/// One value broadcasts to all four states.
fn parse_diag(key: &str, v: &str) -> Result<Vec<f64>> {
    let xs = parse_list(key, v)?;
    let xs = match xs.len() {
        1 => vec![xs[0]; 4],
        4 => xs,
        n => return Err(Error::Config(format!("{key}: expected 1 or 4 values, got {n}"))),
    };
    if xs.iter().any(|x| *x < 0.0) {
        return Err(Error::Config(format!("{key}: variances must be non-negative")));
    }
    Ok(xs)
}

fn parse_profile(key: &str, v: &str) -> Result<VoltageProfile> {
    let points = v
        .split(',')
        .map(|pair| {
            let (t, x) = pair
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("{key}: expected `t:v` pairs, got `{}`", pair.trim())))?;
            Ok((parse_f64(key, t.trim())?, parse_f64(key, x.trim())?))
        })
        .collect::<Result<Vec<_>>>()?;
    VoltageProfile::new(points).map_err(|e| Error::Config(format!("{key}: {e}")))
}

fn join(xs: impl IntoIterator<Item = f64>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn diag(m: &crate::Matrix) -> Vec<f64> {
    m.diagonal().iter().copied().collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen: Vec<String> = Vec::new();
        let mut q = diag(&cfg.inverter.noise.process);
        let mut r = diag(&cfg.inverter.noise.measurement);
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if seen.iter().any(|k| k == key) {
                return Err(Error::Config(format!("line {}: `{key}` given twice", n + 1)));
            }
            seen.push(key.to_string());
            match key {
                "noise.q" => q = parse_diag(key, value)?,
                "noise.r" => r = parse_diag(key, value)?,
                _ => cfg.set(key, value).map_err(|e| match e {
                    Error::Config(m) => Error::Config(format!("line {}: {m}", n + 1)),
                    other => other,
                })?,
            }
        }
        cfg.inverter.noise = NoiseModel::diagonal(&q, &r).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "model" => {
                self.model = match v {
                    "inverter" => ModelKind::Inverter,
                    "smib" => ModelKind::Smib,
                    _ => return Err(Error::Config(format!("model: expected inverter or smib, got `{v}`"))),
                }
            }
            "filter" => {
                self.filter = <FilterChoice as clap::ValueEnum>::from_str(v, false)
                    .map_err(|_| Error::Config(format!("filter: expected hybrid, continuous or both, got `{v}`")))?
            }
            "seed" => {
                self.seed = Some(v.parse().map_err(|_| Error::Config(format!("seed: expected an unsigned integer, got `{v}`")))?)
            }
            "near_switch_window" => self.near_switch_window = parse_positive(key, v)?,
            "out" => self.out_dir = Some(PathBuf::from(v)),
            "scenario.horizon" => self.inverter.horizon = parse_positive(key, v)?,
            "scenario.dt" => self.inverter.dt = parse_positive(key, v)?,
            "scenario.profile" => self.inverter.profile = parse_profile(key, v)?,
            "scenario.initial" => {
                let xs = parse_list(key, v)?;
                if xs.len() != 4 {
                    return Err(Error::Config(format!("{key}: expected 4 values")));
                }
                self.inverter.initial = State::from_vec(xs);
            }
            "noise.p0" => self.inverter.initial_variance = parse_positive(key, v)?,
            "inverter.l_pu" => self.inverter.params.l_pu = parse_positive(key, v)?,
            "inverter.r_pu" => self.inverter.params.r_pu = parse_positive(key, v)?,
            "inverter.omega" => self.inverter.params.omega = parse_f64(key, v)?,
            "inverter.v_ref" => self.inverter.params.v_ref = parse_f64(key, v)?,
            "inverter.i_lim" => self.inverter.params.i_lim = parse_positive(key, v)?,
            "inverter.v_low" => self.inverter.params.v_low = parse_f64(key, v)?,
            "inverter.v_high" => self.inverter.params.v_high = parse_f64(key, v)?,
            "inverter.k" => self.inverter.params.k = parse_positive(key, v)?,
            "inverter.v_th" => self.inverter.params.v_th = parse_f64(key, v)?,
            "inverter.tau_v" => self.inverter.params.tau_v = parse_positive(key, v)?,
            "inverter.tau_i" => self.inverter.params.tau_i = parse_positive(key, v)?,
            "smib.inertia" => self.smib.params.inertia = parse_positive(key, v)?,
            "smib.damping" => self.smib.params.damping = parse_f64(key, v)?,
            "smib.mechanical_power" => self.smib.params.mechanical_power = parse_f64(key, v)?,
            "smib.emf" => self.smib.params.emf = parse_positive(key, v)?,
            "smib.bus_voltage" => self.smib.params.bus_voltage = parse_positive(key, v)?,
            "smib.reactance_line1" => self.smib.params.reactance_line1 = parse_positive(key, v)?,
            "smib.reactance_line2" => self.smib.params.reactance_line2 = parse_positive(key, v)?,
            "smib.i_max" => self.smib.params.i_max = parse_f64(key, v)?,
            "smib.p_min" => self.smib.params.p_min = parse_f64(key, v)?,
            "smib.p_max" => self.smib.params.p_max = parse_f64(key, v)?,
            "smib.forced_trip" => {
                self.smib.params.forced_trip = if v == "none" { None } else { Some(parse_f64(key, v)?) }
            }
            "smib.delta0" => self.smib.delta0 = parse_f64(key, v)?,
            "smib.omega0" => self.smib.omega0 = parse_f64(key, v)?,
            "smib.horizon" => self.smib.horizon = parse_positive(key, v)?,
            "smib.dt" => self.smib.dt = parse_positive(key, v)?,
            "verify.samples" => {
                self.smib.samples = v
                    .parse()
                    .ok()
                    .filter(|n| *n > 0)
                    .ok_or_else(|| Error::Config(format!("{key}: expected a positive integer, got `{v}`")))?
            }
            "verify.delta_range" => self.smib.delta_range = parse_pair(key, v)?,
            "verify.omega_range" => self.smib.omega_range = parse_pair(key, v)?,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let wrap = |e: Error| Error::Config(e.to_string());
        self.inverter.validate().map_err(wrap)?;
        self.smib.params.validate().map_err(wrap)?;
        if !(self.near_switch_window > 0.0) {
            return Err(Error::Config("near_switch_window must be positive".into()));
        }
        Ok(())
    }

    /// Every resolved setting as `(key, value)`, in a form [`Self::parse`]
    /// accepts back.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let p = &self.inverter.params;
        let s = &self.smib;
        let sp = &s.params;
        let mut out = vec![
            ("model", self.model.to_string()),
            ("filter", self.filter.to_string()),
        ];
        if let Some(seed) = self.seed {
            out.push(("seed", seed.to_string()));
        }
        out.push(("near_switch_window", self.near_switch_window.to_string()));
        if let Some(dir) = &self.out_dir {
            out.push(("out", dir.display().to_string()));
        }
        out.extend([
            ("scenario.horizon", self.inverter.horizon.to_string()),
            ("scenario.dt", self.inverter.dt.to_string()),
            (
                "scenario.profile",
                self.inverter
                    .profile
                    .points()
                    .iter()
                    .map(|(t, v)| format!("{t}:{v}"))
                    .collect::<Vec<_>>()
                    .join(", "),
            ),
            ("scenario.initial", join(self.inverter.initial.iter().copied())),
            ("noise.p0", self.inverter.initial_variance.to_string()),
            ("noise.q", join(diag(&self.inverter.noise.process))),
            ("noise.r", join(diag(&self.inverter.noise.measurement))),
            ("inverter.l_pu", p.l_pu.to_string()),
            ("inverter.r_pu", p.r_pu.to_string()),
            ("inverter.omega", p.omega.to_string()),
            ("inverter.v_ref", p.v_ref.to_string()),
            ("inverter.i_lim", p.i_lim.to_string()),
            ("inverter.v_low", p.v_low.to_string()),
            ("inverter.v_high", p.v_high.to_string()),
            ("inverter.k", p.k.to_string()),
            ("inverter.v_th", p.v_th.to_string()),
            ("inverter.tau_v", p.tau_v.to_string()),
            ("inverter.tau_i", p.tau_i.to_string()),
            ("smib.inertia", sp.inertia.to_string()),
            ("smib.damping", sp.damping.to_string()),
            ("smib.mechanical_power", sp.mechanical_power.to_string()),
            ("smib.emf", sp.emf.to_string()),
            ("smib.bus_voltage", sp.bus_voltage.to_string()),
            ("smib.reactance_line1", sp.reactance_line1.to_string()),
            ("smib.reactance_line2", sp.reactance_line2.to_string()),
            ("smib.i_max", sp.i_max.to_string()),
            ("smib.p_min", sp.p_min.to_string()),
            ("smib.p_max", sp.p_max.to_string()),
            ("smib.forced_trip", sp.forced_trip.map_or("none".into(), |t| t.to_string())),
            ("smib.delta0", s.delta0.to_string()),
            ("smib.omega0", s.omega0.to_string()),
            ("smib.horizon", s.horizon.to_string()),
            ("smib.dt", s.dt.to_string()),
            ("verify.samples", s.samples.to_string()),
            ("verify.delta_range", join([s.delta_range.0, s.delta_range.1])),
            ("verify.omega_range", join([s.omega_range.0, s.omega_range.1])),
        ]);
        out
    }

    pub fn to_text(&self) -> String {
        self.entries().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Seed precedence: command-line flag, then config file, then the
/// `HDS_SEED` environment value, then 42.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>, env: Option<&str>) -> Result<u64> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV}: expected an unsigned integer, got `{v}`"))),
        None => Ok(DEFAULT_SEED),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_reference_defaults() {
        let c = ExperimentConfig::parse("# nothing\n\n").unwrap();
        assert_eq!(c.model, ModelKind::Inverter);
        assert_eq!(c.filter, FilterChoice::Both);
        assert_eq!(c.inverter.params.v_low, 0.8);
        assert_eq!(c.inverter.noise.measurement[(2, 2)], 1e-4);
        assert_eq!(c.near_switch_window, 5e-3);
    }

    #[test]
    fn sections_and_comments() {
        let c = ExperimentConfig::parse(
            "model = smib  # swing\nsmib.i_max = 0.5\nnoise.r = 0\nscenario.profile = 0:1, 1:0.5\nseed=7\n",
        )
        .unwrap();
        assert_eq!(c.model, ModelKind::Smib);
        assert_eq!(c.smib.params.i_max, 0.5);
        assert_eq!(c.inverter.noise.measurement, crate::Matrix::zeros(4, 4));
        assert_eq!(c.inverter.profile.at(0.5), 0.75);
        assert_eq!(c.seed, Some(7));
    }

    #[test]
    fn rejects_unknown_repeated_and_malformed() {
        let err = ExperimentConfig::parse("inverter.v_lo = 0.8").unwrap_err().to_string();
        assert!(err.contains("unknown key `inverter.v_lo`"), "{err}");
        assert!(ExperimentConfig::parse("seed = 1\nseed = 2").is_err());
        assert!(ExperimentConfig::parse("scenario.dt").is_err());
        assert!(ExperimentConfig::parse("scenario.dt = -1").is_err());
        assert!(ExperimentConfig::parse("inverter.v_low = 0.95").is_err());
        assert!(ExperimentConfig::parse("noise.q = 1, 2").is_err());
    }

    #[test]
    fn entries_round_trip() {
        let c = ExperimentConfig::parse("inverter.k = 5000\nsmib.forced_trip = 0.1\nseed = 9\nout = res").unwrap();
        let again = ExperimentConfig::parse(&c.to_text()).unwrap();
        assert_eq!(again.to_text(), c.to_text());
        assert_eq!(again.inverter.params, c.inverter.params);
        assert_eq!(again.smib, c.smib);
    }

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(1), Some(2), Some("3")).unwrap(), 1);
        assert_eq!(resolve_seed(None, Some(2), Some("3")).unwrap(), 2);
        assert_eq!(resolve_seed(None, None, Some("3")).unwrap(), 3);
        assert_eq!(resolve_seed(None, None, None).unwrap(), 42);
        assert!(resolve_seed(None, None, Some("x")).is_err());
    }
}
