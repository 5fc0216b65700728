//! Flat `section.key = value` configuration files.
//!
//! Lines are `key = value`; `#` starts a comment. Every key has a default,
//! most of them depending on the experiment. Parsing never stops at the first
//! problem: all errors are collected with their line numbers.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use micropolar::continuum::{ConstantsLedger, QuadratureSpec};
use micropolar::datagen::{Coupling, DataKind, DataSpec};
use micropolar::solver::SolverConfig;
use micropolar::{GridSpec, MaterialParams};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SymbolCheck,
    LinearDecay,
    ProfileError,
    Enstrophy,
    Splitting,
    NonlinearRun,
    GenData,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Self::SymbolCheck,
        Self::LinearDecay,
        Self::ProfileError,
        Self::Enstrophy,
        Self::Splitting,
        Self::NonlinearRun,
        Self::GenData,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::SymbolCheck => "symbol-check",
            Self::LinearDecay => "linear-decay",
            Self::ProfileError => "profile-error",
            Self::Enstrophy => "enstrophy",
            Self::Splitting => "splitting",
            Self::NonlinearRun => "nonlinear-run",
            Self::GenData => "gen-data",
        }
    }

    /// Experiments that run on the torus rather than on ℝ³.
    pub fn is_torus(self) -> bool {
        matches!(self, Self::NonlinearRun | Self::GenData)
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|e| e.name()).collect();
            format!("unknown experiment '{s}' (expected one of {})", names.join(", "))
        })
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Log-spaced sample times `start ..= end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

/// Torus discretisation; `snapshot_every = 0` disables snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusSection {
    pub n: usize,
    pub box_length: f64,
    pub n_cut: usize,
    pub epsilon: f64,
    pub dt: f64,
    pub t_end: f64,
    pub record_every: usize,
    pub snapshot_every: usize,
    pub nonlinear: bool,
}

impl TorusSection {
    pub fn grid(&self) -> micropolar::Result<GridSpec> {
        GridSpec::new(self.n, self.box_length)
    }

    pub fn solver_config(&self, params: MaterialParams) -> micropolar::Result<SolverConfig> {
        let mut cfg = SolverConfig::new(self.grid()?, params, self.dt, self.t_end);
        cfg.n_cut = self.n_cut;
        cfg.epsilon = self.epsilon;
        cfg.record_every = self.record_every;
        cfg.snapshot_every = (self.snapshot_every > 0).then_some(self.snapshot_every);
        cfg.nonlinear = self.nonlinear;
        Ok(cfg)
    }
}

/// Tolerances of the built-in assertions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checks {
    pub draws: usize,
    pub symbol_tol: f64,
    pub slope_tol_u: f64,
    pub slope_tol_w: f64,
    pub enstrophy_tol: f64,
    pub balance_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub params: MaterialParams,
    pub data: DataSpec,
    pub quad: QuadratureSpec,
    pub times: TimeGrid,
    pub solver: TorusSection,
    pub checks: Checks,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigError {
    /// 1-based line, or 0 for errors not tied to a line.
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

/// Every accepted key, in emission order.
pub const KEYS: &[&str] = &[
    "experiment",
    "seed",
    "out_dir",
    "params.mu",
    "params.chi",
    "params.gamma",
    "params.kappa",
    "data.kind",
    "data.q",
    "data.sigma",
    "data.amplitude",
    "data.w_amplitude",
    "data.seed",
    "data.coupling",
    "times.start",
    "times.end",
    "times.count",
    "quad.r_min",
    "quad.r_max",
    "quad.n_radial",
    "quad.n_angular",
    "quad.tol",
    "solver.n",
    "solver.box_length",
    "solver.n_cut",
    "solver.epsilon",
    "solver.dt",
    "solver.t_end",
    "solver.record_every",
    "solver.snapshot_every",
    "solver.nonlinear",
    "checks.draws",
    "checks.symbol_tol",
    "checks.slope_tol_u",
    "checks.slope_tol_w",
    "checks.enstrophy_tol",
    "checks.balance_tol",
];

struct Entry {
    line: usize,
    value: String,
}

struct Loader {
    entries: BTreeMap<String, Entry>,
    errors: Vec<ConfigError>,
}

type Rule<T> = fn(&T) -> Option<&'static str>;

fn positive(v: &f64) -> Option<&'static str> {
    (!(v.is_finite() && *v > 0.0)).then_some("must be > 0")
}

fn non_negative(v: &f64) -> Option<&'static str> {
    (!(v.is_finite() && *v >= 0.0)).then_some("must be >= 0")
}

fn at_least_one(v: &usize) -> Option<&'static str> {
    (*v == 0).then_some("must be >= 1")
}

fn any<T>(_: &T) -> Option<&'static str> {
    None
}

trait ConfigValue: Sized {
    const EXPECTED: &'static str;
    fn parse(s: &str) -> Option<Self>;
}

impl ConfigValue for f64 {
    const EXPECTED: &'static str = "a number";
    fn parse(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl ConfigValue for usize {
    const EXPECTED: &'static str = "a non-negative integer";
    fn parse(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl ConfigValue for u64 {
    const EXPECTED: &'static str = "a non-negative integer";
    fn parse(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl ConfigValue for bool {
    const EXPECTED: &'static str = "true or false";
    fn parse(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl ConfigValue for PathBuf {
    const EXPECTED: &'static str = "a path";
    fn parse(s: &str) -> Option<Self> {
        (!s.is_empty()).then(|| PathBuf::from(s))
    }
}

impl ConfigValue for DataKind {
    const EXPECTED: &'static str = "torus-random or continuum-profile";
    fn parse(s: &str) -> Option<Self> {
        match s {
            "torus-random" => Some(DataKind::TorusRandom),
            "continuum-profile" => Some(DataKind::ContinuumProfile),
            _ => None,
        }
    }
}

impl ConfigValue for Coupling {
    const EXPECTED: &'static str = "independent or u0-equals-minus-half-curl-w0";
    fn parse(s: &str) -> Option<Self> {
        match s {
            "independent" => Some(Coupling::Independent),
            "u0-equals-minus-half-curl-w0" => Some(Coupling::U0EqualsMinusHalfCurlW0),
            _ => None,
        }
    }
}

fn kind_name(k: DataKind) -> &'static str {
    match k {
        DataKind::TorusRandom => "torus-random",
        DataKind::ContinuumProfile => "continuum-profile",
    }
}

fn coupling_name(c: Coupling) -> &'static str {
    match c {
        Coupling::Independent => "independent",
        Coupling::U0EqualsMinusHalfCurlW0 => "u0-equals-minus-half-curl-w0",
    }
}

impl Loader {
    fn new(text: &str) -> Self {
        let mut l = Loader {
            entries: BTreeMap::new(),
            errors: Vec::new(),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                l.error(line, format!("expected `key = value`, got '{body}'"));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                l.error(line, format!("unknown key '{key}'"));
                continue;
            }
            if let Some(prev) = l.entries.get(key) {
                let msg = format!("duplicate key '{key}' (first set on line {})", prev.line);
                l.error(line, msg);
                continue;
            }
            l.entries.insert(
                key.to_string(),
                Entry {
                    line,
                    value: value.to_string(),
                },
            );
        }
        l
    }

    fn error(&mut self, line: usize, message: String) {
        self.errors.push(ConfigError { line, message });
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.line)
    }

    fn get<T: ConfigValue>(&mut self, key: &str, default: T, rule: Rule<T>) -> T {
        let Some(entry) = self.entries.get(key) else {
            return default;
        };
        let (line, raw) = (entry.line, entry.value.clone());
        let Some(v) = T::parse(&raw) else {
            self.error(line, format!("{key}: expected {}, got '{raw}'", T::EXPECTED));
            return default;
        };
        if let Some(msg) = rule(&v) {
            let short = key.rsplit('.').next().unwrap_or(key);
            self.error(line, format!("{short} {msg}, got {raw}"));
            return default;
        }
        v
    }
}

/// Parses a configuration file.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, Vec<ConfigError>> {
    parse_config_with(text, &[])
}

/// Parses `text` with `overrides` taking precedence over the file. An
/// `experiment` override must agree with the file when both are present.
pub fn parse_config_with(text: &str, overrides: &[(&str, String)]) -> Result<ExperimentConfig, Vec<ConfigError>> {
    let mut l = Loader::new(text);
    for (key, value) in overrides {
        if !KEYS.contains(key) {
            l.error(0, format!("unknown override key '{key}'"));
            continue;
        }
        if *key == "experiment" {
            if let Some(e) = l.entries.get("experiment") {
                if e.value != *value {
                    let msg = format!(
                        "experiment '{}' in the file does not match '{value}' on the command line",
                        e.value
                    );
                    let line = e.line;
                    l.error(line, msg);
                    continue;
                }
            }
        }
        l.entries.insert(
            key.to_string(),
            Entry {
                line: 0,
                value: value.clone(),
            },
        );
    }

    let experiment = match l.entries.get("experiment") {
        None => {
            l.error(0, "experiment is required".into());
            Experiment::SymbolCheck
        }
        Some(e) => {
            let (line, raw) = (e.line, e.value.clone());
            raw.parse().unwrap_or_else(|msg| {
                l.error(line, msg);
                Experiment::SymbolCheck
            })
        }
    };
    let torus = experiment.is_torus();

    let seed = l.get("seed", 0u64, any);
    let out_dir = l.get("out_dir", PathBuf::from("out"), any);

    let d = if torus { 0.1 } else { 1.0 };
    let dz = if torus { 0.1 } else { 0.0 };
    let params = MaterialParams {
        mu: l.get("params.mu", d, positive),
        chi: l.get("params.chi", d, positive),
        gamma: l.get("params.gamma", dz, non_negative),
        kappa: l.get("params.kappa", dz, non_negative),
    };

    let base = if torus {
        DataSpec {
            kind: DataKind::TorusRandom,
            q: 1.0,
            sigma: 2.0,
            amplitude: 0.05,
            w_amplitude: 0.05,
            ..DataSpec::default()
        }
    } else {
        DataSpec::default()
    };
    let data = DataSpec {
        kind: l.get("data.kind", base.kind, any),
        q: l.get("data.q", base.q, |q| (!(q.is_finite() && *q >= -1.0)).then_some("must be >= -1")),
        sigma: l.get("data.sigma", base.sigma, positive),
        amplitude: l.get("data.amplitude", base.amplitude, non_negative),
        w_amplitude: l.get("data.w_amplitude", base.w_amplitude, non_negative),
        seed: l.get("data.seed", seed, any),
        coupling: l.get("data.coupling", base.coupling, any),
    };
    let wants_torus = if torus { DataKind::TorusRandom } else { DataKind::ContinuumProfile };
    if experiment != Experiment::SymbolCheck && data.kind != wants_torus {
        let line = l.line_of("data.kind");
        l.error(
            line,
            format!("{experiment} needs data.kind = {}", kind_name(wants_torus)),
        );
    }

    let (t0, t1, tc) = match experiment {
        Experiment::ProfileError => (10.0, 1e3, 9),
        Experiment::Enstrophy => (1.0, 2.0, 2),
        Experiment::Splitting => {
            let t0 = ConstantsLedger::new(&params).map_or(1.0, |c| c.t0);
            (t0, 100.0 * t0, 5)
        }
        _ => (1e2, 1e4, 9),
    };
    let times = TimeGrid {
        start: l.get("times.start", t0, non_negative),
        end: l.get("times.end", t1, non_negative),
        count: l.get("times.count", tc, at_least_one),
    };
    if times.end < times.start {
        let line = l.line_of("times.end");
        l.error(line, format!("times.end must be >= times.start, got {} < {}", times.end, times.start));
    }
    match experiment {
        Experiment::LinearDecay | Experiment::ProfileError => {
            if times.start < 1.0 {
                let line = l.line_of("times.start");
                l.error(line, format!("start must be >= 1 for {experiment}, got {}", times.start));
            }
            if times.count < 3 {
                let line = l.line_of("times.count");
                l.error(line, format!("count must be >= 3 to fit a slope, got {}", times.count));
            }
        }
        Experiment::Enstrophy if times.end <= times.start => {
            let line = l.line_of("times.end");
            l.error(line, "enstrophy needs times.end > times.start".into());
        }
        _ => {}
    }

    let dq = QuadratureSpec::for_window(data.sigma, times.end);
    let quad = QuadratureSpec {
        r_min: l.get("quad.r_min", dq.r_min, positive),
        r_max: l.get("quad.r_max", dq.r_max, positive),
        n_radial: l.get("quad.n_radial", dq.n_radial, at_least_one),
        n_angular: l.get("quad.n_angular", dq.n_angular, at_least_one),
        tol: l.get("quad.tol", dq.tol, positive),
    };
    if let Err(e) = quad.validate() {
        let line = ["quad.r_min", "quad.r_max", "quad.n_radial", "quad.n_angular"]
            .iter()
            .map(|k| l.line_of(k))
            .find(|&n| n > 0)
            .unwrap_or(0);
        l.error(line, e.to_string());
    }

    let n = l.get("solver.n", 16usize, |n| (*n < 4 || n % 2 == 1).then_some("must be even and >= 4"));
    let solver = TorusSection {
        n,
        box_length: l.get("solver.box_length", 2.0 * std::f64::consts::PI, positive),
        n_cut: l.get("solver.n_cut", n / 3, any),
        epsilon: l.get("solver.epsilon", 0.0, non_negative),
        dt: l.get("solver.dt", 0.01, positive),
        t_end: l.get("solver.t_end", 1.0, positive),
        record_every: l.get("solver.record_every", 1usize, at_least_one),
        snapshot_every: l.get("solver.snapshot_every", 0usize, any),
        nonlinear: l.get("solver.nonlinear", true, any),
    };
    if torus && l.errors.is_empty() {
        if let Err(e) = solver.solver_config(params).and_then(|c| c.validate()) {
            let line = ["solver.n_cut", "solver.t_end", "solver.dt", "solver.record_every"]
                .iter()
                .map(|k| l.line_of(k))
                .find(|&n| n > 0)
                .unwrap_or(0);
            l.error(line, e.to_string());
        }
        let steps = solver.solver_config(params).map(|c| c.steps()).unwrap_or(1);
        if solver.snapshot_every > 0 && !steps.is_multiple_of(solver.snapshot_every) {
            let line = l.line_of("solver.snapshot_every");
            l.error(line, format!("snapshot_every must divide the step count {steps}"));
        }
    }

    let checks = Checks {
        draws: l.get("checks.draws", 1000usize, at_least_one),
        symbol_tol: l.get("checks.symbol_tol", 1e-8, positive),
        slope_tol_u: l.get("checks.slope_tol_u", 0.10, positive),
        slope_tol_w: l.get("checks.slope_tol_w", 0.15, positive),
        enstrophy_tol: l.get("checks.enstrophy_tol", 1e-6, positive),
        balance_tol: l.get("checks.balance_tol", 1e-4, positive),
    };

    if !l.errors.is_empty() {
        let mut errors = l.errors;
        errors.sort_by_key(|e| e.line);
        return Err(errors);
    }
    Ok(ExperimentConfig {
        experiment,
        seed,
        out_dir,
        params,
        data,
        quad,
        times,
        solver,
        checks,
    })
}

impl ExperimentConfig {
    /// Every key with its effective value, in a form [`parse_config`]
    /// reads back to an identical config.
    pub fn to_config_string(&self) -> String {
        let f = |v: f64| format!("{v:?}");
        let (p, d, q, t, s, c) = (&self.params, &self.data, &self.quad, &self.times, &self.solver, &self.checks);
        let values: Vec<(&str, String)> = vec![
            ("experiment", self.experiment.to_string()),
            ("seed", self.seed.to_string()),
            ("out_dir", self.out_dir.display().to_string()),
            ("params.mu", f(p.mu)),
            ("params.chi", f(p.chi)),
            ("params.gamma", f(p.gamma)),
            ("params.kappa", f(p.kappa)),
            ("data.kind", kind_name(d.kind).into()),
            ("data.q", f(d.q)),
            ("data.sigma", f(d.sigma)),
            ("data.amplitude", f(d.amplitude)),
            ("data.w_amplitude", f(d.w_amplitude)),
            ("data.seed", d.seed.to_string()),
            ("data.coupling", coupling_name(d.coupling).into()),
            ("times.start", f(t.start)),
            ("times.end", f(t.end)),
            ("times.count", t.count.to_string()),
            ("quad.r_min", f(q.r_min)),
            ("quad.r_max", f(q.r_max)),
            ("quad.n_radial", q.n_radial.to_string()),
            ("quad.n_angular", q.n_angular.to_string()),
            ("quad.tol", f(q.tol)),
            ("solver.n", s.n.to_string()),
            ("solver.box_length", f(s.box_length)),
            ("solver.n_cut", s.n_cut.to_string()),
            ("solver.epsilon", f(s.epsilon)),
            ("solver.dt", f(s.dt)),
            ("solver.t_end", f(s.t_end)),
            ("solver.record_every", s.record_every.to_string()),
            ("solver.snapshot_every", s.snapshot_every.to_string()),
            ("solver.nonlinear", s.nonlinear.to_string()),
            ("checks.draws", c.draws.to_string()),
            ("checks.symbol_tol", f(c.symbol_tol)),
            ("checks.slope_tol_u", f(c.slope_tol_u)),
            ("checks.slope_tol_w", f(c.slope_tol_w)),
            ("checks.enstrophy_tol", f(c.enstrophy_tol)),
            ("checks.balance_tol", f(c.balance_tol)),
        ];
        debug_assert_eq!(values.len(), KEYS.len());
        let mut out = String::from("# effective configuration\n");
        let mut section = "";
        for (k, v) in values {
            let sec = k.split_once('.').map_or("", |(s, _)| s);
            if sec != section {
                out.push('\n');
                section = sec;
            }
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config("experiment = symbol-check\n").unwrap();
        assert_eq!(cfg.experiment, Experiment::SymbolCheck);
        assert_eq!(cfg.checks.draws, 1000);
        assert_eq!(cfg.params.mu, 1.0);
    }

    #[test]
    fn constraint_errors_carry_lines() {
        let text = "experiment = linear-decay\n# comment\nparams.chi = -1\n";
        let errs = parse_config(text).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, 3);
        assert!(errs[0].message.contains("chi must be > 0"), "{}", errs[0].message);
    }

    #[test]
    fn collects_every_error() {
        let text = "experiment = enstrophy\nparams.mu = abc\nbogus.key = 1\ndata.sigma = 0\nno equals sign\n";
        let errs = parse_config(text).unwrap_err();
        let lines: Vec<usize> = errs.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![2, 3, 4, 5]);
        assert!(errs[1].message.contains("unknown key"));
    }

    #[test]
    fn round_trip_is_identity() {
        for e in Experiment::ALL {
            let text = format!("experiment = {e}\nseed = 17 # trailing comment\nparams.gamma = 0.3\n");
            let cfg = parse_config(&text).unwrap();
            let emitted = cfg.to_config_string();
            assert_eq!(parse_config(&emitted).unwrap(), cfg, "{e}");
        }
    }

    #[test]
    fn overrides_win_and_experiment_must_agree() {
        let text = "experiment = splitting\nseed = 1\n";
        let cfg = parse_config_with(text, &[("seed", "9".into())]).unwrap();
        assert_eq!((cfg.seed, cfg.data.seed), (9, 9));
        let errs = parse_config_with(text, &[("experiment", "enstrophy".into())]).unwrap_err();
        assert_eq!(errs[0].line, 1);
    }

    #[test]
    fn torus_settings_are_cross_checked() {
        let errs = parse_config("experiment = nonlinear-run\nsolver.dt = 0.3\n").unwrap_err();
        assert!(errs[0].message.contains("whole number of steps"));
        assert!(parse_config("experiment = gen-data\nsolver.n = 15\n").is_err());
        assert!(parse_config("experiment = linear-decay\ndata.kind = torus-random\n").is_err());
    }
}
