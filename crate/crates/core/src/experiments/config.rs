//! Flat `key = value` experiment configuration.
//!
//! Entries are separated by newlines or commas; `#` starts a comment and
//! `[section]` headers are accepted but carry no meaning, since every key
//! lives in one namespace.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hamiltonians::{AnnealSchedule, ProblemKind, DEFAULT_DELTA};
use crate::integrator::IntegratorOptions;
use crate::open_dynamics::{GammaMode, SpectralDensity};
use crate::spin_algebra::{Axis, CollectiveBasis};

pub const DEFAULT_ALPHA: f64 = 100.0;
pub const DEFAULT_T_ANNEAL: f64 = 1000.0;
pub const DEFAULT_POINTS: usize = 101;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Spectrum,
    Closed,
    Open,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Closed => "closed",
            Mode::Open => "open",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    Redfield,
    Gksl,
}

impl NoiseKind {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::Redfield => "redfield",
            NoiseKind::Gksl => "gksl",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n_qubits: usize,
    pub problem: ProblemKind,
    pub alpha: f64,
    pub t_anneal: f64,
    /// Grid size of a spectrum sweep.
    pub n_points: usize,
    /// Samples of a trajectory.
    pub n_samples: usize,
    pub noise: NoiseKind,
    /// Redfield coupling `A = Σσ_axis`.
    pub coupling: Axis,
    pub eta: f64,
    pub t_env: Option<f64>,
    pub omega_c: f64,
    pub epsilon: f64,
    pub gamma_mode: GammaMode,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub output: Option<PathBuf>,
}

pub const KEYS: &[&str] = &[
    "mode",
    "n_qubits",
    "problem",
    "delta",
    "alpha",
    "t_anneal",
    "n_points",
    "n_samples",
    "noise",
    "coupling",
    "eta",
    "t_env",
    "omega_c",
    "epsilon",
    "gamma_mode",
    "rtol",
    "atol",
    "max_steps",
    "output",
];

impl ExperimentConfig {
    /// A configuration with every optional field at its default.
    pub fn new(mode: Mode, n_qubits: usize, problem: ProblemKind) -> Self {
        let opts = IntegratorOptions::default();
        Self {
            mode,
            n_qubits,
            problem,
            alpha: DEFAULT_ALPHA,
            t_anneal: DEFAULT_T_ANNEAL,
            n_points: DEFAULT_POINTS,
            n_samples: DEFAULT_POINTS,
            noise: NoiseKind::None,
            coupling: Axis::Y,
            eta: SpectralDensity::DEFAULT_ETA,
            t_env: None,
            omega_c: SpectralDensity::DEFAULT_OMEGA_C,
            epsilon: SpectralDensity::DEFAULT_EPSILON,
            gamma_mode: GammaMode::Kms,
            rtol: opts.rtol,
            atol: opts.atol,
            max_steps: opts.max_steps,
            output: None,
        }
    }

    /// Builds a configuration from ordered pairs; later pairs override
    /// earlier ones.
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut values: Vec<(String, String)> = Vec::new();
        for (k, v) in pairs {
            let key = k.as_ref().trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::UnknownKey(key));
            }
            let value = v.as_ref().trim().to_string();
            match values.iter_mut().find(|(k, _)| *k == key) {
                Some(slot) => slot.1 = value,
                None => values.push((key, value)),
            }
        }
        let get = |key: &str| values.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let require = |key: &str| get(key).ok_or_else(|| Error::MissingField(key.into()));

        let mode = match require("mode")? {
            "spectrum" => Mode::Spectrum,
            "closed" => Mode::Closed,
            "open" => Mode::Open,
            other => return Err(choice("mode", other, "spectrum, closed, open")),
        };
        let n_qubits: usize = number("n_qubits", require("n_qubits")?)?;
        let delta = get("delta")
            .map(|v| number::<f64>("delta", v))
            .transpose()?
            .unwrap_or(DEFAULT_DELTA);
        let problem = match require("problem")? {
            "ising" => ProblemKind::IsingFc,
            "xxz" => ProblemKind::XxzFc { delta },
            other => return Err(choice("problem", other, "ising, xxz")),
        };

        let mut cfg = Self::new(mode, n_qubits, problem);
        if let Some(v) = get("alpha") {
            cfg.alpha = number("alpha", v)?;
        }
        if let Some(v) = get("t_anneal") {
            cfg.t_anneal = number("t_anneal", v)?;
        }
        if let Some(v) = get("n_points") {
            cfg.n_points = number("n_points", v)?;
        }
        if let Some(v) = get("n_samples") {
            cfg.n_samples = number("n_samples", v)?;
        }
        if let Some(v) = get("noise") {
            cfg.noise = match v {
                "none" => NoiseKind::None,
                "redfield" => NoiseKind::Redfield,
                "gksl" => NoiseKind::Gksl,
                other => return Err(choice("noise", other, "none, redfield, gksl")),
            };
        }
        if let Some(v) = get("coupling") {
            cfg.coupling = match v {
                "x" => Axis::X,
                "y" => Axis::Y,
                "z" => Axis::Z,
                other => return Err(choice("coupling", other, "x, y, z")),
            };
        }
        if let Some(v) = get("eta") {
            cfg.eta = number("eta", v)?;
        }
        if let Some(v) = get("t_env") {
            cfg.t_env = Some(number("t_env", v)?);
        }
        if let Some(v) = get("omega_c") {
            cfg.omega_c = number("omega_c", v)?;
        }
        if let Some(v) = get("epsilon") {
            cfg.epsilon = number("epsilon", v)?;
        }
        if let Some(v) = get("gamma_mode") {
            cfg.gamma_mode = match v {
                "kms" => GammaMode::Kms,
                "literal" => GammaMode::Literal,
                other => return Err(choice("gamma_mode", other, "kms, literal")),
            };
        }
        if let Some(v) = get("rtol") {
            cfg.rtol = number("rtol", v)?;
        }
        if let Some(v) = get("atol") {
            cfg.atol = number("atol", v)?;
        }
        if let Some(v) = get("max_steps") {
            cfg.max_steps = number("max_steps", v)?;
        }
        if let Some(v) = get("output") {
            cfg.output = Some(PathBuf::from(v));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Range checks; each failure names the offending key.
    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, reason: String| {
            Err(Error::InvalidValue {
                key: key.into(),
                reason,
            })
        };
        if self.n_qubits == 0 {
            return bad("n_qubits", "must be at least 1".into());
        }
        if let ProblemKind::XxzFc { delta } = self.problem {
            if !delta.is_finite() {
                return bad("delta", format!("must be finite, got {delta}"));
            }
        }
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return bad("alpha", format!("must be non-negative, got {}", self.alpha));
        }
        if !(self.t_anneal > 0.0) || !self.t_anneal.is_finite() {
            return bad("t_anneal", format!("must be positive, got {}", self.t_anneal));
        }
        if self.n_points < 2 {
            return bad("n_points", format!("need at least 2, got {}", self.n_points));
        }
        if self.n_samples < 2 {
            return bad("n_samples", format!("need at least 2, got {}", self.n_samples));
        }
        if !(self.rtol > 0.0) {
            return bad("rtol", format!("must be positive, got {}", self.rtol));
        }
        if !(self.atol > 0.0) {
            return bad("atol", format!("must be positive, got {}", self.atol));
        }
        if self.max_steps == 0 {
            return bad("max_steps", "must be positive".into());
        }
        if self.mode == Mode::Open {
            if self.noise == NoiseKind::None {
                return bad("noise", "open mode requires redfield or gksl".into());
            }
            if self.t_env.is_none() {
                return Err(Error::MissingField("t_env".into()));
            }
            self.spectral_density()?;
        }
        Ok(())
    }

    pub fn basis(&self) -> Result<CollectiveBasis> {
        CollectiveBasis::new(self.n_qubits)
    }

    pub fn schedule(&self) -> Result<AnnealSchedule> {
        AnnealSchedule::new(self.basis()?, self.t_anneal, self.alpha, self.problem)
    }

    pub fn integrator(&self) -> IntegratorOptions {
        IntegratorOptions {
            max_steps: self.max_steps,
            ..IntegratorOptions::with_tolerances(self.rtol, self.atol)
        }
    }

    pub fn spectral_density(&self) -> Result<SpectralDensity> {
        let t_env = self.t_env.ok_or_else(|| Error::MissingField("t_env".into()))?;
        SpectralDensity::new(self.eta, t_env, self.omega_c, self.epsilon, self.gamma_mode)
    }

    /// Equivalent `key = value` document.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("mode".to_string(), self.mode.name().to_string()),
            ("n_qubits".into(), self.n_qubits.to_string()),
            ("problem".into(), self.problem.name().to_string()),
        ];
        if let ProblemKind::XxzFc { delta } = self.problem {
            out.push(("delta".into(), delta.to_string()));
        }
        out.push(("alpha".into(), self.alpha.to_string()));
        out.push(("t_anneal".into(), self.t_anneal.to_string()));
        out.push(("n_points".into(), self.n_points.to_string()));
        out.push(("n_samples".into(), self.n_samples.to_string()));
        out.push(("noise".into(), self.noise.name().to_string()));
        let axis = match self.coupling {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        };
        out.push(("coupling".into(), axis.to_string()));
        out.push(("eta".into(), self.eta.to_string()));
        if let Some(t) = self.t_env {
            out.push(("t_env".into(), t.to_string()));
        }
        out.push(("omega_c".into(), self.omega_c.to_string()));
        out.push(("epsilon".into(), self.epsilon.to_string()));
        out.push(("gamma_mode".into(), self.gamma_mode.name().to_string()));
        out.push(("rtol".into(), self.rtol.to_string()));
        out.push(("atol".into(), self.atol.to_string()));
        out.push(("max_steps".into(), self.max_steps.to_string()));
        if let Some(p) = &self.output {
            out.push(("output".into(), p.display().to_string()));
        }
        out
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.to_pairs() {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_config(s)
    }
}

fn number<T: FromStr>(key: &str, text: &str) -> Result<T> {
    text.parse().map_err(|_| Error::InvalidValue {
        key: key.into(),
        reason: format!("cannot parse `{text}` as a number"),
    })
}

fn choice(key: &str, got: &str, valid: &str) -> Error {
    Error::InvalidValue {
        key: key.into(),
        reason: format!("`{got}` is not one of {valid}"),
    }
}

/// Splits a document into `(key, value)` pairs in order of appearance.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        for entry in line.split(',') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let (k, v) = entry.split_once('=').ok_or_else(|| Error::Malformed {
                line: lineno + 1,
                text: raw.to_string(),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(Error::Malformed {
                    line: lineno + 1,
                    text: raw.to_string(),
                });
            }
            out.push((k.to_string(), v.to_string()));
        }
    }
    Ok(out)
}

/// Parses and validates a configuration document, filling defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    ExperimentConfig::from_pairs(parse_pairs(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_spectrum_config_gets_defaults() {
        let cfg = parse_config("mode=spectrum, n_qubits=2, problem=ising, alpha=0").unwrap();
        assert_eq!(cfg.mode, Mode::Spectrum);
        assert_eq!(cfg.alpha, 0.0);
        assert_eq!(cfg.t_anneal, 1000.0);
        assert_eq!(cfg.eta, 0.1);
        assert_eq!(cfg.omega_c, 20.0);
        assert_eq!(cfg.epsilon, 1e-7);
        assert_eq!(cfg.n_points, 101);
    }

    #[test]
    fn xxz_defaults_delta() {
        let cfg = parse_config("mode = closed\nn_qubits = 2\nproblem = xxz\n").unwrap();
        assert_eq!(cfg.problem, ProblemKind::XxzFc { delta: 1.5 });
        let cfg = parse_config("mode=closed,n_qubits=2,problem=xxz,delta=2").unwrap();
        assert_eq!(cfg.problem, ProblemKind::XxzFc { delta: 2.0 });
    }

    #[test]
    fn errors_name_the_key() {
        let err = parse_config("mode=spectrum, n_qubits=2, problem=ising, alpha=-1").unwrap_err();
        assert!(err.to_string().contains("alpha"), "{err}");
        let err = parse_config("mode=spectrum, n_qubits=2, problem=ising, colour=red").unwrap_err();
        assert!(matches!(err, Error::UnknownKey(ref k) if k == "colour"));
        let err = parse_config("mode=spectrum, problem=ising").unwrap_err();
        assert!(err.to_string().contains("n_qubits"), "{err}");
        let err = parse_config("mode=open, n_qubits=2, problem=ising, t_env=1").unwrap_err();
        assert!(err.to_string().contains("noise"), "{err}");
        let err = parse_config("mode=open, n_qubits=2, problem=ising, noise=gksl").unwrap_err();
        assert!(err.to_string().contains("t_env"), "{err}");
        let err = parse_config("mode=closed, n_qubits=two, problem=ising").unwrap_err();
        assert!(err.to_string().contains("n_qubits"), "{err}");
        assert!(matches!(parse_config("mode closed"), Err(Error::Malformed { line: 1, .. })));
    }

    #[test]
    fn later_values_override_and_kebab_keys_work() {
        let mut pairs = parse_pairs("[run]\nmode=open\nn_qubits=2\nproblem=ising\nnoise=redfield\nt_env=1 # cold").unwrap();
        pairs.push(("t-env".into(), "10".into()));
        let cfg = ExperimentConfig::from_pairs(pairs).unwrap();
        assert_eq!(cfg.t_env, Some(10.0));
    }

    #[test]
    fn display_round_trips() {
        let cfg = parse_config("mode=open,n_qubits=3,problem=xxz,noise=gksl,t_env=0.1,gamma_mode=literal,output=a.csv").unwrap();
        assert_eq!(parse_config(&cfg.to_string()).unwrap(), cfg);
    }
}
