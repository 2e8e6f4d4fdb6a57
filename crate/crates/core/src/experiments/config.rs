use crate::agflow::MinimizeConfig;
use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// The experiment catalogue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum ExperimentId {
    E0,
    E1,
    E2,
    E3,
    E4,
    E5,
    E6,
    E7,
    E8,
    E9,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 10] = [
        Self::E0,
        Self::E1,
        Self::E2,
        Self::E3,
        Self::E4,
        Self::E5,
        Self::E6,
        Self::E7,
        Self::E8,
        Self::E9,
    ];

    pub fn title(&self) -> &'static str {
        match self {
            Self::E0 => "infrastructure",
            Self::E1 => "Xi closed form",
            Self::E2 => "coercivity",
            Self::E3 => "entropy round trip",
            Self::E4 => "smooth-solution chain rule",
            Self::E5 => "wall production",
            Self::E6 => "compensation identity",
            Self::E7 => "scaling law",
            Self::E8 => "Besov exponents",
            Self::E9 => "disk continuation",
        }
    }

    /// Wall-clock budget in seconds.
    pub fn runtime_limit(&self) -> f64 {
        match self {
            Self::E1 | Self::E2 => 10.0,
            Self::E3 => 5.0,
            Self::E4 | Self::E5 | Self::E7 => 60.0,
            Self::E6 => 600.0,
            Self::E8 => 300.0,
            Self::E9 => 1800.0,
            Self::E0 => 60.0,
        }
    }

    /// Grid sizes used when the config does not override them.
    pub fn default_grids(&self) -> Vec<usize> {
        match self {
            Self::E0 => vec![64],
            Self::E1 | Self::E2 | Self::E3 => vec![],
            Self::E4 => vec![128, 256, 512, 1024],
            Self::E5 => vec![8],
            Self::E6 => vec![128, 256, 512],
            Self::E7 | Self::E8 => vec![512],
            Self::E9 => vec![256],
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|e| e.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// Parameters of one experiment run; flat `key = value` on disk.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub id: ExperimentId,
    /// Grid sizes (cells per side); the meaning of each rung is per experiment.
    pub grids: Vec<usize>,
    /// Angular nodes per spatial cell count in E6 (`Ns = ns_factor · n`).
    pub ns_factor: usize,
    pub gamma: f64,
    pub entropies: Vec<String>,
    pub domain: String,
    pub minimize: MinimizeConfig,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(id: ExperimentId) -> Self {
        Self {
            id,
            grids: id.default_grids(),
            ns_factor: 2,
            gamma: 3.0,
            entropies: vec!["id".into(), "jk1".into(), "jk2".into()],
            domain: "disk".into(),
            minimize: MinimizeConfig::default(),
            output: None,
        }
    }

    pub const KEYS: [&'static str; 15] = [
        "id",
        "grid",
        "ns_factor",
        "gamma",
        "entropies",
        "domain",
        "eps_start",
        "eps_factor",
        "eps_count",
        "max_iter",
        "grad_tol",
        "memory",
        "noise",
        "seed",
        "output",
    ];

    /// Applies one `key = value` pair.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let num = |v: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| Error::Config(format!("`{key}`: `{v}` is not a number")))
        };
        let int = |v: &str| -> Result<usize> {
            v.parse::<usize>().map_err(|_| Error::Config(format!("`{key}`: `{v}` is not a count")))
        };
        match key.trim() {
            "id" => self.id = v.parse()?,
            "grid" => self.grids = v.split(',').map(|s| int(s.trim())).collect::<Result<_>>()?,
            "ns_factor" => self.ns_factor = int(v)?,
            "gamma" => self.gamma = num(v)?,
            "entropies" => {
                self.entropies = v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
            }
            "domain" => self.domain = v.to_string(),
            "eps_start" => self.minimize.eps_start = num(v)?,
            "eps_factor" => self.minimize.eps_factor = num(v)?,
            "eps_count" => self.minimize.eps_count = int(v)?,
            "max_iter" => self.minimize.max_iter = int(v)?,
            "grad_tol" => self.minimize.grad_tol = num(v)?,
            "memory" => self.minimize.memory = int(v)?,
            "noise" => self.minimize.noise = num(v)?,
            "seed" => self.minimize.seed = v.parse().map_err(|_| Error::Config(format!("bad seed `{v}`")))?,
            "output" => self.output = Some(PathBuf::from(v)),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Parses a flat `key = value` file; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut id = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            if k.trim() == "id" {
                id = Some(v.parse::<ExperimentId>()?);
            } else {
                pairs.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        let mut cfg = Self::new(id.ok_or_else(|| Error::Config("missing `id`".into()))?);
        for (k, v) in pairs {
            cfg.set(&k, &v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Flat `key = value` rendering accepted by [`Self::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.inputs() {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    /// All inputs as strings, for reports.
    pub fn inputs(&self) -> BTreeMap<String, String> {
        let m = &self.minimize;
        let join = |v: &[usize]| v.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",");
        let mut map = BTreeMap::new();
        map.insert("id".into(), self.id.to_string());
        map.insert("grid".into(), join(&self.grids));
        map.insert("ns_factor".into(), self.ns_factor.to_string());
        map.insert("gamma".into(), self.gamma.to_string());
        map.insert("entropies".into(), self.entropies.join(","));
        map.insert("domain".into(), self.domain.clone());
        map.insert("eps_start".into(), m.eps_start.to_string());
        map.insert("eps_factor".into(), m.eps_factor.to_string());
        map.insert("eps_count".into(), m.eps_count.to_string());
        map.insert("max_iter".into(), m.max_iter.to_string());
        map.insert("grad_tol".into(), m.grad_tol.to_string());
        map.insert("memory".into(), m.memory.to_string());
        map.insert("noise".into(), m.noise.to_string());
        map.insert("seed".into(), m.seed.to_string());
        if let Some(o) = &self.output {
            map.insert("output".into(), o.display().to_string());
        }
        map
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&n) = self.grids.iter().find(|&&n| n < 8) {
            return Err(Error::Config(format!("grid size {n} is below the minimum of 8 cells")));
        }
        if self.id.default_grids().len() > 1 && self.grids.len() < 2 {
            return Err(Error::Config(format!("{} needs at least two grid rungs", self.id)));
        }
        if self.ns_factor == 0 {
            return Err(Error::Config("ns_factor must be positive".into()));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Config("gamma must be positive".into()));
        }
        if self.entropies.is_empty() {
            return Err(Error::Config("no entropies given".into()));
        }
        for name in &self.entropies {
            crate::entropy::Entropy::from_name(name, 1.0)?;
        }
        crate::agflow::DomainKind::from_name(&self.domain)?;
        self.minimize.validate()?;
        if let Some(out) = &self.output {
            let parent = out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            if !parent.is_dir() {
                return Err(Error::Config(format!("output parent `{}` does not exist", parent.display())));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut c = ExperimentConfig::new(ExperimentId::E9);
        c.set("eps_count", "3").unwrap();
        c.set("grid", "64").unwrap();
        let back = ExperimentConfig::parse(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn tiny_grid_is_rejected() {
        assert!(ExperimentConfig::parse("id = E9\ngrid = 2\n").is_err());
        assert!(ExperimentConfig::parse("grid = 64\n").is_err());
        assert!(ExperimentConfig::parse("id = E4\ngrid = 64\n").is_err());
        assert!(ExperimentConfig::parse("id = E1\ncolour = red\n").is_err());
    }
}
