//! Experiment configuration: defaults, flat `key = value` files and overrides.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use graphband_core::policy::PolicyKind;

use crate::error::io_err;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphName {
    Complete,
    CliqueGroup,
    Star,
    Random,
    Pool,
}

impl GraphName {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphName::Complete => "complete",
            GraphName::CliqueGroup => "clique_group",
            GraphName::Star => "star",
            GraphName::Random => "random",
            GraphName::Pool => "pool",
        }
    }
}

impl FromStr for GraphName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "complete" => Ok(GraphName::Complete),
            "clique_group" | "clique" | "cliques" => Ok(GraphName::CliqueGroup),
            "star" | "ktree" | "k_tree" => Ok(GraphName::Star),
            "random" => Ok(GraphName::Random),
            "pool" | "flixster" => Ok(GraphName::Pool),
            _ => Err(Error::Config(format!("unknown graph kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub horizon: usize,
    pub repeats: usize,
    pub d: usize,
    pub class_size: usize,
    pub action_count: usize,
    pub graph: GraphName,
    pub cliques: usize,
    pub density: f64,
    pub resample: bool,
    /// Edge list a pool is sampled from.
    pub edges: Option<PathBuf>,
    /// Previously saved pool; takes precedence over `edges`.
    pub pool_dir: Option<PathBuf>,
    pub pool_size: usize,
    /// Must match `action_count` when given.
    pub subgraph_size: Option<usize>,
    pub policies: Vec<PolicyKind>,
    pub eta: f64,
    pub delta: f64,
    pub use_lp: bool,
    pub noise_sigma: f64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Graph name used in output files; derived from the graph kind when unset.
    pub label: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            horizon: 2048,
            repeats: 40,
            d: 10,
            class_size: 50,
            action_count: 20,
            graph: GraphName::CliqueGroup,
            cliques: 5,
            density: 0.1,
            resample: true,
            edges: None,
            pool_dir: None,
            pool_size: 100,
            subgraph_size: None,
            policies: vec![PolicyKind::AdaCbg],
            eta: 1.0,
            delta: 0.1,
            use_lp: true,
            noise_sigma: 1.0,
            seed: 0,
            out: None,
            label: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("invalid value {value:?} for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::Config(format!("invalid value {value:?} for `{key}`"))),
    }
}

pub fn parse_policies(value: &str) -> Result<Vec<PolicyKind>> {
    let mut out = Vec::new();
    for name in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let kind: PolicyKind = name.parse().map_err(|_| Error::Config(format!("unknown policy {name:?}")))?;
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    if out.is_empty() {
        return Err(Error::Config("no policy given".into()));
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Sets one field by its config-file key. Dashes and underscores are
    /// interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "T" | "t" | "horizon" => self.horizon = parse_value(key, value)?,
            "repeats" => self.repeats = parse_value(key, value)?,
            "d" => self.d = parse_value(key, value)?,
            "class_size" => self.class_size = parse_value(key, value)?,
            "actions" | "action_count" | "K" => self.action_count = parse_value(key, value)?,
            "graph" => self.graph = value.parse()?,
            "cliques" => self.cliques = parse_value(key, value)?,
            "density" => self.density = parse_value(key, value)?,
            "resample" => self.resample = parse_bool(key, value)?,
            "edges" => self.edges = Some(PathBuf::from(value)),
            "pool_dir" => self.pool_dir = Some(PathBuf::from(value)),
            "pool_size" => self.pool_size = parse_value(key, value)?,
            "subgraph_size" => self.subgraph_size = Some(parse_value(key, value)?),
            "policy" | "policies" => self.policies = parse_policies(value)?,
            "eta" => self.eta = parse_value(key, value)?,
            "delta" => self.delta = parse_value(key, value)?,
            "use_lp" => self.use_lp = parse_bool(key, value)?,
            "sigma" | "noise_sigma" => self.noise_sigma = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "label" => self.label = Some(value.to_owned()),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, path: &Path, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let wrap = |message: String| Error::Parse { path: path.to_owned(), line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| wrap(format!("expected `key = value`, got {line:?}")))?;
            self.set(key, value).map_err(|e| wrap(e.to_string()))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        self.apply_text(path, &text)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_owned()));
        if self.horizon == 0 {
            return fail("T must be positive");
        }
        if self.repeats == 0 {
            return fail("repeats must be at least 1");
        }
        if self.d == 0 || self.class_size == 0 || self.action_count == 0 {
            return fail("d, class_size and actions must be positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return fail("delta must lie in (0, 1)");
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return fail("eta must be positive");
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return fail("sigma must be non-negative");
        }
        if self.policies.is_empty() {
            return fail("no policy given");
        }
        if let Some(n) = self.subgraph_size.filter(|&n| n != self.action_count) {
            return Err(Error::Config(format!("subgraph_size {n} must equal the action count {}", self.action_count)));
        }
        match self.graph {
            GraphName::CliqueGroup if self.cliques == 0 || self.cliques > self.action_count => fail("cliques must be in 1..=actions"),
            GraphName::Star if self.action_count < 2 => fail("star graphs need at least two actions"),
            GraphName::Random if !(self.density >= 0.0 && self.density.is_finite()) => fail("density must be non-negative"),
            GraphName::Pool if self.edges.is_none() && self.pool_dir.is_none() => fail("pool graphs need `edges` or `pool_dir`"),
            GraphName::Pool if self.pool_dir.is_none() && self.pool_size == 0 => fail("pool_size must be positive"),
            _ => Ok(()),
        }
    }

    /// Graph name used in output file names.
    pub fn graph_label(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match self.graph {
            GraphName::Star => "Ktree".into(),
            GraphName::Pool => "Flixster".into(),
            g => g.as_str().into(),
        }
    }
}

/// Renders the resolved configuration in the file format it was read from.
impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let policies: Vec<&str> = self.policies.iter().map(|p| p.name()).collect();
        writeln!(f, "T = {}", self.horizon)?;
        writeln!(f, "repeats = {}", self.repeats)?;
        writeln!(f, "d = {}", self.d)?;
        writeln!(f, "class_size = {}", self.class_size)?;
        writeln!(f, "actions = {}", self.action_count)?;
        writeln!(f, "graph = {}", self.graph.as_str())?;
        match self.graph {
            GraphName::CliqueGroup => writeln!(f, "cliques = {}", self.cliques)?,
            GraphName::Random => writeln!(f, "density = {}", self.density)?,
            GraphName::Pool => {
                if let Some(p) = &self.pool_dir {
                    writeln!(f, "pool_dir = {}", p.display())?;
                }
                if let Some(p) = &self.edges {
                    writeln!(f, "edges = {}", p.display())?;
                }
                writeln!(f, "pool_size = {}", self.pool_size)?;
                if let Some(n) = self.subgraph_size {
                    writeln!(f, "subgraph_size = {n}")?;
                }
            }
            _ => {}
        }
        writeln!(f, "resample = {}", self.resample)?;
        writeln!(f, "policy = {}", policies.join(","))?;
        writeln!(f, "eta = {}", self.eta)?;
        writeln!(f, "delta = {}", self.delta)?;
        writeln!(f, "use_lp = {}", self.use_lp)?;
        writeln!(f, "sigma = {}", self.noise_sigma)?;
        writeln!(f, "seed = {}", self.seed)?;
        if let Some(o) = &self.out {
            writeln!(f, "out = {}", o.display())?;
        }
        if let Some(l) = &self.label {
            writeln!(f, "label = {l}")?;
        }
        Ok(())
    }
}
