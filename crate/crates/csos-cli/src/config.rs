//! Flat `key = value` experiment configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use csos::C64;
use serde::Serialize;

use crate::registry;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Qarith,
    Weights,
    Yangbaxter,
    #[serde(rename = "appendixC")]
    AppendixC,
    Serre,
    Loop,
    Spectrum,
    Functional,
    Degeneracy,
    Curve,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Qarith,
        Suite::Weights,
        Suite::Yangbaxter,
        Suite::AppendixC,
        Suite::Serre,
        Suite::Loop,
        Suite::Spectrum,
        Suite::Functional,
        Suite::Degeneracy,
        Suite::Curve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Qarith => "qarith",
            Suite::Weights => "weights",
            Suite::Yangbaxter => "yangbaxter",
            Suite::AppendixC => "appendixC",
            Suite::Serre => "serre",
            Suite::Loop => "loop",
            Suite::Spectrum => "spectrum",
            Suite::Functional => "functional",
            Suite::Degeneracy => "degeneracy",
            Suite::Curve => "curve",
        }
    }

    /// Fixed RNG stream, independent of which suites are selected.
    pub fn stream(self) -> u64 {
        Suite::ALL.iter().position(|&s| s == self).unwrap() as u64 + 1
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown suite '{s}'"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    #[serde(rename = "N")]
    pub n: usize,
    pub j: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub ell_list: Vec<usize>,
    #[serde(rename = "Q_list")]
    pub q_list: Vec<usize>,
    pub kprime: f64,
    /// (re, im)
    pub mu_seed: (f64, f64),
    pub tol: BTreeMap<String, f64>,
    pub eps_schedule: (f64, f64),
    pub rng_seed: u64,
    pub suites: Vec<Suite>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    Syntax { line: usize, msg: String },
    Invalid(String),
    /// dimension cap; exit code 3
    Cap(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax { line, msg } => write!(f, "line {line}: {msg}"),
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
            ConfigError::Cap(m) => write!(f, "resource cap: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ConfigError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ConfigError::Cap(_) => 3,
            _ => 2,
        }
    }
}

fn list<T: FromStr>(v: &str) -> Result<Vec<T>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| format!("bad list element '{s}'")))
        .collect()
}

fn scalar<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse::<T>().map_err(|_| format!("cannot parse '{v}'"))
}

pub const MAX_N: usize = 6;
pub const DIM_CAP: usize = 4096;
pub const CURVE_DIM_CAP: usize = 1000;

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { line: i + 1, msg: "expected key = value".into() });
            };
            let k = k.trim().to_string();
            if k.is_empty() {
                return Err(ConfigError::Syntax { line: i + 1, msg: "empty key".into() });
            }
            if kv.insert(k.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(ConfigError::Syntax { line: i + 1, msg: format!("duplicate key '{k}'") });
            }
        }
        let syn = |line: usize| move |msg: String| ConfigError::Syntax { line, msg };
        let mut take = |key: &str| kv.remove(key);
        let req = |v: Option<(usize, String)>, key: &str| {
            v.ok_or_else(|| ConfigError::Invalid(format!("missing required key '{key}'")))
        };
        let (ln, v) = req(take("N"), "N")?;
        let n: usize = scalar(&v).map_err(syn(ln))?;
        let (ln, v) = req(take("j"), "j")?;
        let j: usize = scalar(&v).map_err(syn(ln))?;
        let (ln, v) = req(take("L"), "L")?;
        let l: usize = scalar(&v).map_err(syn(ln))?;
        let ell_list = match take("ell_list") {
            Some((ln, v)) => list(&v).map_err(syn(ln))?,
            None => (1..n.max(2)).collect(),
        };
        let q_list = match take("Q_list") {
            Some((ln, v)) => list(&v).map_err(syn(ln))?,
            None => (0..n).collect(),
        };
        let kprime = match take("kprime") {
            Some((ln, v)) => scalar(&v).map_err(syn(ln))?,
            None => 0.6,
        };
        let mu: C64 = match take("mu_seed") {
            Some((ln, v)) => v.replace(' ', "").parse::<C64>().map_err(|_| syn(ln)(format!("bad complex '{v}'")))?,
            None => C64::new(0.7, 0.3),
        };
        let eps_schedule = match take("eps_schedule") {
            Some((ln, v)) => {
                let e: Vec<f64> = list(&v).map_err(syn(ln))?;
                if e.len() != 2 {
                    return Err(syn(ln)("eps_schedule needs two radii".into()));
                }
                (e[0], e[1])
            }
            None => (0.01, 0.005),
        };
        let rng_seed = match take("rng_seed") {
            Some((ln, v)) => scalar(&v).map_err(syn(ln))?,
            None => 0,
        };
        let suites = match take("suites") {
            Some((ln, v)) => list::<String>(&v)
                .map_err(syn(ln))?
                .iter()
                .map(|s| s.parse::<Suite>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(syn(ln))?,
            None => Suite::ALL.to_vec(),
        };
        let mut tol = BTreeMap::new();
        for (k, (ln, v)) in std::mem::take(&mut kv) {
            let Some(name) = k.strip_prefix("tol.") else {
                return Err(ConfigError::Syntax { line: ln, msg: format!("unknown key '{k}'") });
            };
            if registry::lookup(name).is_none() {
                return Err(ConfigError::Syntax { line: ln, msg: format!("no identity '{name}' for tolerance override") });
            }
            tol.insert(name.to_string(), scalar::<f64>(&v).map_err(syn(ln))?);
        }
        let cfg = ExperimentConfig {
            n,
            j,
            l,
            ell_list,
            q_list,
            kprime,
            mu_seed: (mu.re, mu.im),
            tol,
            eps_schedule,
            rng_seed,
            suites,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        let (n, j, l) = (self.n, self.j, self.l);
        if !(2 <= j && j <= n && n <= MAX_N) {
            return bad(format!("need 2 <= j <= N <= {MAX_N}, got N={n} j={j}"));
        }
        if l == 0 {
            return bad("L must be positive".into());
        }
        if self.ell_list.is_empty() || self.ell_list.iter().any(|&e| e == 0 || e >= n) {
            return bad(format!("ell_list entries must lie in 1..{}", n - 1));
        }
        if self.q_list.is_empty() || self.q_list.iter().any(|&q| q >= n) {
            return bad(format!("Q_list entries must lie in 0..{}", n - 1));
        }
        let kp = self.kprime;
        if !kp.is_finite() || kp == 0.0 || (kp.abs() - 1.0).abs() < 1e-12 {
            return bad("kprime must be finite, nonzero and not ±1".into());
        }
        let (mr, mi) = self.mu_seed;
        if !(mr.is_finite() && mi.is_finite()) || mr.hypot(mi) == 0.0 {
            return bad("mu_seed must be finite and nonzero".into());
        }
        let (r1, r2) = self.eps_schedule;
        if !(r1 > 0.0 && r2 > 0.0 && r1 != r2 && r1 < 0.5 && r2 < 0.5) {
            return bad("eps_schedule needs two distinct radii in (0, 0.5)".into());
        }
        if self.tol.values().any(|&t| !(t > 0.0 && t.is_finite())) {
            return bad("tolerances must be positive".into());
        }
        if self.suites.is_empty() {
            return bad("no suites selected".into());
        }
        let dim = (j as f64).powi(l as i32);
        if dim > DIM_CAP as f64 {
            return Err(ConfigError::Cap(format!("j^L = {dim} exceeds {DIM_CAP}")));
        }
        if self.suites.contains(&Suite::Curve) && (n as f64).powi(l as i32) > CURVE_DIM_CAP as f64 {
            return Err(ConfigError::Cap(format!("N^L exceeds {CURVE_DIM_CAP} with the curve suite")));
        }
        Ok(())
    }

    pub fn mu(&self) -> C64 {
        C64::new(self.mu_seed.0, self.mu_seed.1)
    }

    pub fn tol_for(&self, key: &str, default: f64) -> f64 {
        self.tol.get(key).copied().unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_defaults() {
        let c = ExperimentConfig::parse("N = 3\nj = 2\nL = 3\n").unwrap();
        assert_eq!(c.q_list, vec![0, 1, 2]);
        assert_eq!(c.ell_list, vec![1, 2]);
        assert_eq!(c.suites.len(), 10);
    }

    #[test]
    fn full_grammar() {
        let text = "# demo\nN=4\nj=3\nL=2\nell_list = 1,3\nQ_list=0, 2\nkprime=0.4\nmu_seed = 0.8-0.2i\n\
                    eps_schedule = 0.02, 0.01\nrng_seed = 99\nsuites = serre, Degeneracy\ntol.tauY = 1e-8\n";
        let c = ExperimentConfig::parse(text).unwrap();
        assert_eq!(c.mu_seed, (0.8, -0.2));
        assert_eq!(c.suites, vec![Suite::Serre, Suite::Degeneracy]);
        assert_eq!(c.tol_for("tauY", 1.0), 1e-8);
    }

    #[test]
    fn rejections() {
        let e = |s: &str| ExperimentConfig::parse(s).unwrap_err();
        assert_eq!(e("N=3\nj=4\nL=2").exit_code(), 2);
        assert_eq!(e("N=3\nj=2\nL=3\nfoo=1").exit_code(), 2);
        assert_eq!(e("N=3\nj=2\nL 3").exit_code(), 2);
        assert_eq!(e("N=3\nj=2\nL=3\ntol.nonsense=1").exit_code(), 2);
        assert_eq!(e("N=3\nj=2\nL=13").exit_code(), 3);
        assert_eq!(e("N=3\nj=2\nL=7\nsuites=curve").exit_code(), 3);
        assert!(ExperimentConfig::parse("N=3\nj=2\nL=7\nsuites=spectrum").is_ok());
    }
}
