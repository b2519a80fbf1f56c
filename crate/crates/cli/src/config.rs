//! Flat `key = value` run configuration with command-line overrides.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use bcs_gap::gap_solver::GapConfig;
use bcs_gap::potential::{PotentialKind, RadialPotential};
use bcs_gap::sweep::SweepConfig;
use bcs_gap::tc_solver::TcConfig;

/// A problem with the configuration or its inputs (exit code 2).
#[derive(Debug)]
pub struct ConfigError(pub anyhow::Error);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub const KEYS: &[&str] = &[
    "potential",
    "g",
    "range",
    "table",
    "kinds",
    "mu",
    "kappa",
    "nodes_per_decade",
    "central_nodes",
    "outer_nodes",
    "near_density",
    "outer_density",
    "s_min_factor",
    "s_min_floor",
    "lambda_factor",
    "max_outer_width",
    "gap_tol",
    "gap_max_iter",
    "theta",
    "anderson_depth",
    "gate_floor",
    "power_tol",
    "power_max_iter",
    "tc_rel_width",
    "bracket_factor",
    "admissibility_tol",
    "assume_rearrangement",
    "l_max",
    "out",
    "workers",
];

#[derive(Debug, Clone)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub g: f64,
    pub range: f64,
    pub table: Option<PathBuf>,
}

impl PotentialSpec {
    pub fn build(&self) -> Result<RadialPotential> {
        let v = match (&self.table, self.kind) {
            (Some(path), _) => RadialPotential::from_table_file(path, self.g)?,
            (None, PotentialKind::Tabulated) => bail!("potential = tabulated needs a `table` path"),
            (None, kind) => RadialPotential::builtin_kind(kind, self.g)?,
        };
        Ok(v.with_range(self.range)?)
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    /// Potentials used by `verify`.
    pub kinds: Vec<PotentialKind>,
    pub mus: Vec<f64>,
    pub kappas: Vec<f64>,
    pub gap: GapConfig,
    pub tc: TcConfig,
    pub admissibility_tol: f64,
    pub assume_rearrangement: bool,
    pub l_max: usize,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            potential: PotentialSpec {
                kind: PotentialKind::Gaussian,
                g: 30.0,
                range: 1.0,
                table: None,
            },
            kinds: vec![
                PotentialKind::Gaussian,
                PotentialKind::Lorentzian,
                PotentialKind::Yukawa,
            ],
            mus: vec![50.0, 100.0, 200.0, 400.0],
            kappas: vec![0.0, 0.5, 1.0, 2.0],
            gap: GapConfig::default(),
            tc: TcConfig::default(),
            admissibility_tol: 1e-12,
            assume_rearrangement: false,
            l_max: bcs_gap::fermi_ops::DEFAULT_L_MAX,
            out: None,
            workers: None,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| anyhow!("{key}: cannot parse '{value}': {e}"))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => bail!("{key}: expected a boolean, got '{other}'"),
    }
}

impl RunConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let grid = &mut self.gap.grid;
        match key {
            "potential" => self.potential.kind = parse(key, value)?,
            "g" => self.potential.g = parse(key, value)?,
            "range" => self.potential.range = parse(key, value)?,
            "table" => {
                self.potential.table = Some(PathBuf::from(value.trim()));
                self.potential.kind = PotentialKind::Tabulated;
            }
            "kinds" => self.kinds = parse_list(key, value)?,
            "mu" => self.mus = parse_list(key, value)?,
            "kappa" => self.kappas = parse_list(key, value)?,
            "nodes_per_decade" => grid.nodes_per_decade = parse(key, value)?,
            "central_nodes" => grid.central_nodes = parse(key, value)?,
            "outer_nodes" => grid.outer_nodes = parse(key, value)?,
            "near_density" => grid.near_density = parse(key, value)?,
            "outer_density" => grid.outer_density = parse(key, value)?,
            "s_min_factor" => grid.s_min_factor = parse(key, value)?,
            "s_min_floor" => grid.s_min_floor = parse(key, value)?,
            "lambda_factor" => grid.lambda_factor = parse(key, value)?,
            "max_outer_width" => grid.max_outer_width = parse(key, value)?,
            "gap_tol" => self.gap.tol = parse(key, value)?,
            "gap_max_iter" => self.gap.max_iter = parse(key, value)?,
            "theta" => self.gap.theta = parse(key, value)?,
            "anderson_depth" => self.gap.anderson_depth = parse(key, value)?,
            "gate_floor" => {
                self.gap.gate_floor = parse(key, value)?;
                self.tc.gate_floor = self.gap.gate_floor;
            }
            "power_tol" => self.tc.power_tol = parse(key, value)?,
            "power_max_iter" => self.tc.power_max_iter = parse(key, value)?,
            "tc_rel_width" => self.tc.rel_width = parse(key, value)?,
            "bracket_factor" => self.tc.bracket_factor = parse(key, value)?,
            "admissibility_tol" => self.admissibility_tol = parse(key, value)?,
            "assume_rearrangement" => self.assume_rearrangement = parse_bool(key, value)?,
            "l_max" => self.l_max = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "workers" => self.workers = Some(parse(key, value)?),
            _ => bail!("unknown key '{key}' (known keys: {})", KEYS.join(", ")),
        }
        Ok(())
    }

    /// Applies a `key = value` text; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", i + 1))?;
            self.set(key.trim(), value).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        self.apply_text(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.mus.is_empty() {
            bail!("mu list is empty");
        }
        if self.mus.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            bail!("every mu must be positive and finite");
        }
        if self.mus.windows(2).any(|w| w[1] <= w[0]) {
            bail!("mu list must be strictly increasing");
        }
        if self.kappas.is_empty() || self.kappas.iter().any(|&k| !(k >= 0.0) || !k.is_finite()) {
            bail!("kappa list must be non-empty with finite values >= 0");
        }
        if self.kinds.is_empty() || self.kinds.contains(&PotentialKind::Tabulated) {
            bail!("kinds must list built-in potentials");
        }
        let tolerances = [
            ("gap_tol", self.gap.tol),
            ("gate_floor", self.gap.gate_floor),
            ("power_tol", self.tc.power_tol),
            ("tc_rel_width", self.tc.rel_width),
            ("admissibility_tol", self.admissibility_tol),
            ("theta", self.gap.theta),
            ("near_density", self.gap.grid.near_density),
            ("outer_density", self.gap.grid.outer_density),
            ("s_min_factor", self.gap.grid.s_min_factor),
            ("s_min_floor", self.gap.grid.s_min_floor),
            ("lambda_factor", self.gap.grid.lambda_factor),
            ("max_outer_width", self.gap.grid.max_outer_width),
        ];
        for (key, value) in tolerances {
            if !(value > 0.0) || !value.is_finite() {
                bail!("{key} must be positive, got {value}");
            }
        }
        if !(self.tc.bracket_factor > 1.0) {
            bail!("bracket_factor must exceed 1");
        }
        if self.workers == Some(0) {
            bail!("workers must be at least 1");
        }
        Ok(())
    }

    pub fn sweep_config(&self) -> SweepConfig {
        let mut tc = self.tc;
        tc.grid = self.gap.grid;
        SweepConfig {
            gap: self.gap,
            tc,
            kappas: self.kappas.clone(),
        }
    }

    /// Nodes of every panel halved.
    pub fn coarsen(&mut self) {
        self.gap.grid = self.gap.grid.scaled(0.5);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_text() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\npotential = yukawa\ng=12.5\nmu = 10, 20 40\n\nkappa = 1 # trailing\n")
            .unwrap();
        assert_eq!(c.potential.kind, PotentialKind::Yukawa);
        assert_eq!(c.potential.g, 12.5);
        assert_eq!(c.mus, vec![10.0, 20.0, 40.0]);
        assert_eq!(c.kappas, vec![1.0]);
        c.validate().unwrap();
    }

    #[test]
    fn reports_line_numbers_and_unknown_keys() {
        let mut c = RunConfig::default();
        let e = c.apply_text("g = 1\nbogus = 3\n").unwrap_err();
        assert!(format!("{e:#}").contains("line 2"));
        let e = c.apply_text("g = 1\nno equals sign\n").unwrap_err();
        assert!(format!("{e:#}").contains("line 2"));
    }

    #[test]
    fn validation() {
        let mut c = RunConfig::default();
        c.mus.clear();
        assert!(c.validate().is_err());
        c.mus = vec![100.0, 50.0];
        assert!(c.validate().is_err());
        c.mus = vec![50.0];
        c.gap.tol = 0.0;
        assert!(c.validate().is_err());
    }
}
