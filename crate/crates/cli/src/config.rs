//! Run settings: built-in defaults, then a flat `key = value` file, then flags.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use boundary_ising_core::boundary::Branch;
use boundary_ising_core::formfactor::MAX_ORDER;
use boundary_ising_core::painleve::SolverConfig;
use boundary_ising_core::specfun::GLAISHER;

use crate::CliError;

/// Output grid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// `Branch` as spelled on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BranchArg(pub Branch);

impl FromStr for GridKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "log" => Ok(GridKind::Log),
            "linear" => Ok(GridKind::Linear),
            _ => Err(format!("unknown grid '{s}' (expected log or linear)")),
        }
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}' (expected csv or json)")),
        }
    }
}

impl FromStr for BranchArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "stable" => Ok(BranchArg(Branch::Stable)),
            "metastable" => Ok(BranchArg(Branch::Metastable)),
            "highT" => Ok(BranchArg(Branch::HighTFixed)),
            _ => Err(format!("unknown branch '{s}' (expected stable, metastable or highT)")),
        }
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridKind::Log => "log",
            GridKind::Linear => "linear",
        })
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Partially specified settings; one layer of the precedence stack.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub lambda: Option<f64>,
    pub branch: Option<BranchArg>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub grid: Option<GridKind>,
    pub r_max: Option<f64>,
    pub t0: Option<f64>,
    pub tol: Option<f64>,
    pub kmax: Option<usize>,
    pub nodes: Option<usize>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub mass: Option<f64>,
    pub quick: Option<bool>,
    pub r: Option<f64>,
    pub t: Option<f64>,
    pub glaisher: Option<f64>,
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Usage(format!("config line {line}: bad value for '{key}': {e}")))
}

impl Overrides {
    /// Parses `key = value` lines; `#` starts a comment, keys accept `-` or `_`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {line}: expected key = value")))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "lambda" => o.lambda = Some(parse_value(&key, value, line)?),
                "branch" => o.branch = Some(parse_value(&key, value, line)?),
                "t_min" => o.t_min = Some(parse_value(&key, value, line)?),
                "t_max" => o.t_max = Some(parse_value(&key, value, line)?),
                "points" => o.points = Some(parse_value(&key, value, line)?),
                "grid" => o.grid = Some(parse_value(&key, value, line)?),
                "r_max" => o.r_max = Some(parse_value(&key, value, line)?),
                "t0" => o.t0 = Some(parse_value(&key, value, line)?),
                "tol" => o.tol = Some(parse_value(&key, value, line)?),
                "kmax" => o.kmax = Some(parse_value(&key, value, line)?),
                "nodes" => o.nodes = Some(parse_value(&key, value, line)?),
                "format" => o.format = Some(parse_value(&key, value, line)?),
                "output" => o.output = Some(PathBuf::from(value)),
                "mass" => o.mass = Some(parse_value(&key, value, line)?),
                "quick" => o.quick = Some(parse_value(&key, value, line)?),
                "r" => o.r = Some(parse_value(&key, value, line)?),
                "t" => o.t = Some(parse_value(&key, value, line)?),
                _ => return Err(CliError::Usage(format!("config line {line}: unknown key '{key}'"))),
            }
        }
        Ok(o)
    }

    /// `self` with every field set in `over` replaced.
    pub fn layered(self, over: Overrides) -> Overrides {
        Overrides {
            lambda: over.lambda.or(self.lambda),
            branch: over.branch.or(self.branch),
            t_min: over.t_min.or(self.t_min),
            t_max: over.t_max.or(self.t_max),
            points: over.points.or(self.points),
            grid: over.grid.or(self.grid),
            r_max: over.r_max.or(self.r_max),
            t0: over.t0.or(self.t0),
            tol: over.tol.or(self.tol),
            kmax: over.kmax.or(self.kmax),
            nodes: over.nodes.or(self.nodes),
            format: over.format.or(self.format),
            output: over.output.or(self.output),
            mass: over.mass.or(self.mass),
            quick: over.quick.or(self.quick),
            r: over.r.or(self.r),
            t: over.t.or(self.t),
            glaisher: over.glaisher.or(self.glaisher),
        }
    }
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub lambda: Option<f64>,
    pub branch: Branch,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub grid: GridKind,
    pub r_max: f64,
    pub t0: f64,
    pub tol: f64,
    pub kmax: usize,
    pub nodes: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub mass: Option<f64>,
    pub quick: bool,
    pub r: Option<f64>,
    pub t: Option<f64>,
    pub glaisher: f64,
}

impl Default for Settings {
    fn default() -> Self {
        let cfg = SolverConfig::default();
        Self {
            lambda: None,
            branch: Branch::Stable,
            t_min: cfg.t_min,
            t_max: 10.0,
            points: 100,
            grid: GridKind::Log,
            r_max: cfg.r_max,
            t0: cfg.t0,
            tol: cfg.rel_tol,
            kmax: 3,
            nodes: cfg.ff_nodes,
            format: Format::Csv,
            output: None,
            mass: None,
            quick: false,
            r: None,
            t: None,
            glaisher: GLAISHER,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl Settings {
    /// Defaults, overridden by `file`, overridden by `flags`.
    pub fn resolve(file: Overrides, flags: Overrides) -> Result<Self, CliError> {
        let o = file.layered(flags);
        let d = Settings::default();
        let s = Settings {
            lambda: o.lambda,
            branch: o.branch.map(|b| b.0).unwrap_or(d.branch),
            t_min: o.t_min.unwrap_or(d.t_min),
            t_max: o.t_max.unwrap_or(d.t_max),
            points: o.points.unwrap_or(d.points),
            grid: o.grid.unwrap_or(d.grid),
            r_max: o.r_max.unwrap_or(d.r_max),
            t0: o.t0.unwrap_or(d.t0),
            tol: o.tol.unwrap_or(d.tol),
            kmax: o.kmax.unwrap_or(d.kmax),
            nodes: o.nodes.unwrap_or(d.nodes),
            format: o.format.unwrap_or(d.format),
            output: o.output,
            mass: o.mass,
            quick: o.quick.unwrap_or(d.quick),
            r: o.r,
            t: o.t,
            glaisher: o.glaisher.unwrap_or(d.glaisher),
        };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<(), CliError> {
        if let Some(l) = self.lambda {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(usage("--lambda must be non-negative and finite"));
            }
        }
        if !(self.t_min > 0.0 && self.t_min.is_finite()) {
            return Err(usage("--t-min must be positive"));
        }
        if !(self.t_max > self.t_min && self.t_max.is_finite()) {
            return Err(usage("--t-min must be smaller than --t-max"));
        }
        if self.points < 2 {
            return Err(usage("--points must be at least 2"));
        }
        if !(1..=MAX_ORDER).contains(&self.kmax) {
            return Err(usage(format!("--kmax must lie in 1..={MAX_ORDER}")));
        }
        if !(self.tol > 0.0 && self.tol < 1e-3) {
            return Err(usage("--tol must lie in (0, 1e-3)"));
        }
        if let Some(m) = self.mass {
            if !(m > 0.0 && m.is_finite()) {
                return Err(usage("--mass must be positive"));
            }
        }
        self.solver_config()?;
        Ok(())
    }

    /// Solver policy; the table reaches down to the smaller of `1e-3` and `--t-min`.
    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        let base = SolverConfig::default();
        let cfg = SolverConfig {
            r_max: self.r_max,
            t_min: base.t_min.min(self.t_min),
            rel_tol: self.tol,
            abs_tol: self.tol * (base.abs_tol / base.rel_tol),
            t0: self.t0,
            ff_nodes: self.nodes,
            glaisher: self.glaisher,
            ..base
        };
        cfg.validate().map_err(|e| usage(e.to_string()))?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = Overrides::parse("# comment\nlambda = 2\nt-max=5 # trailing\npoints = 7\n").unwrap();
        let flags = Overrides { lambda: Some(3.0), ..Overrides::default() };
        let s = Settings::resolve(file, flags).unwrap();
        assert_eq!(s.lambda, Some(3.0));
        assert_eq!(s.t_max, 5.0);
        assert_eq!(s.points, 7);
        assert_eq!(s.t_min, 1e-3);
    }

    #[test]
    fn bad_files_rejected() {
        assert!(Overrides::parse("nonsense").is_err());
        assert!(Overrides::parse("colour = red").is_err());
        assert!(Overrides::parse("points = many").is_err());
        assert!(Overrides::parse("branch = sideways").is_err());
    }

    #[test]
    fn invalid_settings_are_usage_errors() {
        let bad = |o: Overrides| matches!(Settings::resolve(Overrides::default(), o), Err(CliError::Usage(_)));
        assert!(bad(Overrides { lambda: Some(-1.0), ..Default::default() }));
        assert!(bad(Overrides { t_min: Some(2.0), t_max: Some(1.0), ..Default::default() }));
        assert!(bad(Overrides { points: Some(1), ..Default::default() }));
        assert!(bad(Overrides { r_max: Some(5.0), ..Default::default() }));
        assert!(bad(Overrides { kmax: Some(5), ..Default::default() }));
    }

    #[test]
    fn small_t_min_extends_table() {
        let s = Settings::resolve(Overrides::default(), Overrides { t_min: Some(1e-4), ..Default::default() }).unwrap();
        assert_eq!(s.solver_config().unwrap().t_min, 1e-4);
    }
}
