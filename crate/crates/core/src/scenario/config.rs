//! Scenario configuration files.
//!
//! A config is a TOML document with a top-level `scenario` and `output`, a
//! `[grid]` table and a `[solver]` table:
//!
//! ```toml
//! scenario = "fig4"
//! output = "out/fig4"
//!
//! [grid]
//! L = [6, 8, 10, 12]
//! M = "L/2"                  # integer or "L/n"; a list scans several rules
//! phi = [0.5]
//! deltaL = ["0.5*JL"]        # number, "c*JL" or "c*JR"
//! deltaR = [0.0, "0.5*JR"]
//!
//! [solver]
//! dense_cap = 4096
//! ```
//!
//! Every key is optional except `scenario`; missing keys take the scenario's
//! defaults. Unknown keys are errors, and all problems are reported together.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use toml::{Table, Value};

use crate::basis::MAX_SITES;
use crate::error::{Error, Result};
use crate::params::{Boundary, ModelParams};
use crate::spectra::{SteadyOptions, MAX_DENSE_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    Fig2,
    Fig3a,
    Fig3b,
    Fig4,
    Verify,
    BaeScan,
    Custom,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::Fig2,
        ScenarioKind::Fig3a,
        ScenarioKind::Fig3b,
        ScenarioKind::Fig4,
        ScenarioKind::Verify,
        ScenarioKind::BaeScan,
        ScenarioKind::Custom,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Fig2 => "fig2",
            ScenarioKind::Fig3a => "fig3a",
            ScenarioKind::Fig3b => "fig3b",
            ScenarioKind::Fig4 => "fig4",
            ScenarioKind::Verify => "verify",
            ScenarioKind::BaeScan => "bae-scan",
            ScenarioKind::Custom => "custom",
        }
    }

    /// Only these two let the config choose boundary modes.
    pub fn takes_bc(self) -> bool {
        matches!(self, ScenarioKind::BaeScan | ScenarioKind::Custom)
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown scenario `{s}`")))
    }
}

/// Number of up-spins as a function of `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MRule {
    Fixed(usize),
    /// `L / n`, which must divide exactly.
    Fraction(usize),
}

impl MRule {
    pub fn eval(self, l: usize) -> std::result::Result<usize, String> {
        match self {
            MRule::Fixed(m) if m <= l => Ok(m),
            MRule::Fixed(m) => Err(format!("M = {m} exceeds L = {l}")),
            MRule::Fraction(n) if l % n == 0 => Ok(l / n),
            MRule::Fraction(n) => Err(format!("M rule \"L/{n}\" is not an integer at L = {l}")),
        }
    }

    fn to_value(self) -> Value {
        match self {
            MRule::Fixed(m) => Value::Integer(m as i64),
            MRule::Fraction(n) => Value::String(format!("L/{n}")),
        }
    }

    fn from_value(v: &Value) -> std::result::Result<Self, String> {
        match v {
            Value::Integer(m) if *m >= 0 => Ok(MRule::Fixed(*m as usize)),
            Value::String(s) => {
                let rest = s
                    .trim()
                    .strip_prefix('L')
                    .map(str::trim)
                    .and_then(|r| r.strip_prefix('/'));
                match rest.map(|r| r.trim().parse::<usize>()) {
                    Some(Ok(n)) if n > 0 => Ok(MRule::Fraction(n)),
                    _ => Err(format!("M rule `{s}` is neither an integer nor \"L/n\"")),
                }
            }
            other => Err(format!("M rule {other} is neither an integer nor \"L/n\"")),
        }
    }
}

/// Boundary coupling, absolute or relative to one of the bulk rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeltaRule {
    Value(f64),
    /// `c · J_L`.
    Left(f64),
    /// `c · J_R`.
    Right(f64),
}

impl DeltaRule {
    pub fn eval(self, j: f64, phi: f64) -> f64 {
        match self {
            DeltaRule::Value(v) => v,
            DeltaRule::Left(c) => c * j * (-phi).exp(),
            DeltaRule::Right(c) => c * j * phi.exp(),
        }
    }

    fn to_value(self) -> Value {
        match self {
            DeltaRule::Value(v) => Value::Float(v),
            DeltaRule::Left(c) => Value::String(format!("{c:?}*JL")),
            DeltaRule::Right(c) => Value::String(format!("{c:?}*JR")),
        }
    }

    fn from_value(v: &Value) -> std::result::Result<Self, String> {
        match v {
            Value::Integer(i) => Ok(DeltaRule::Value(*i as f64)),
            Value::Float(f) => Ok(DeltaRule::Value(*f)),
            Value::String(s) => s.parse(),
            other => Err(format!(
                "boundary coupling {other} is neither a number nor \"c*JL\" / \"c*JR\""
            )),
        }
    }
}

impl FromStr for DeltaRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let t: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect::<String>()
            .replace("J_", "J");
        let bad = || format!("boundary coupling `{s}` is neither a number nor \"c*JL\" / \"c*JR\"");
        if let Ok(v) = t.parse::<f64>() {
            return Ok(DeltaRule::Value(v));
        }
        let (coef, rate) = match t.rsplit_once('*') {
            Some((c, r)) => (c.parse::<f64>().map_err(|_| bad())?, r),
            None => (1.0, t.as_str()),
        };
        match rate {
            "JL" => Ok(DeltaRule::Left(coef)),
            "JR" => Ok(DeltaRule::Right(coef)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub l: Vec<usize>,
    pub m: Vec<MRule>,
    pub phi: Vec<f64>,
    pub delta_l: Vec<DeltaRule>,
    pub delta_r: Vec<DeltaRule>,
    pub bc: Vec<Boundary>,
    pub j: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub steady_tolerance: f64,
    pub steady_target: f64,
    pub max_iterations: usize,
    pub restart: usize,
    pub dense_cap: usize,
    pub newton_tolerance: f64,
    pub root_accept: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SteadyOptions::default();
        SolverConfig {
            steady_tolerance: s.tolerance,
            steady_target: s.target,
            max_iterations: s.max_iterations,
            restart: s.restart,
            dense_cap: MAX_DENSE_DIM,
            newton_tolerance: 1e-13,
            root_accept: 1e-10,
        }
    }
}

impl SolverConfig {
    pub fn steady_options(&self) -> SteadyOptions {
        SteadyOptions {
            tolerance: self.steady_tolerance,
            target: self.steady_target,
            max_iterations: self.max_iterations,
            restart: self.restart,
            ..SteadyOptions::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub output: PathBuf,
    pub grid: Grid,
    pub solver: SolverConfig,
}

fn floats(v: &[f64]) -> Vec<f64> {
    v.to_vec()
}

impl ScenarioConfig {
    /// Defaults of `kind`, writing to `out/<kind>`.
    pub fn defaults(kind: ScenarioKind) -> Self {
        use DeltaRule::*;
        let zero = vec![Value(0.0)];
        let (l, m, phi, dl, dr, bc) = match kind {
            ScenarioKind::Verify => (
                vec![4],
                vec![MRule::Fixed(0)],
                vec![0.5],
                zero.clone(),
                zero,
                vec![Boundary::Periodic],
            ),
            ScenarioKind::Fig2 => (
                vec![12],
                vec![MRule::Fraction(2)],
                floats(&[0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.5, 2.0]),
                zero.clone(),
                zero,
                vec![Boundary::Open],
            ),
            ScenarioKind::Fig3a => (
                vec![8, 10, 12, 14, 16],
                vec![MRule::Fraction(2)],
                vec![0.5],
                vec![Left(0.5)],
                zero,
                vec![Boundary::Generalized],
            ),
            ScenarioKind::Fig3b => (
                vec![8, 12, 16],
                vec![MRule::Fraction(4)],
                vec![0.5],
                vec![Left(0.5)],
                zero,
                vec![Boundary::Generalized],
            ),
            ScenarioKind::Fig4 => (
                vec![6, 8, 10, 12],
                vec![MRule::Fraction(2)],
                vec![0.5],
                vec![Left(0.5)],
                vec![Value(0.0), Right(0.5)],
                vec![Boundary::Generalized],
            ),
            ScenarioKind::BaeScan => (
                vec![4, 5, 6, 7, 8],
                vec![MRule::Fixed(1), MRule::Fixed(2)],
                vec![0.5],
                vec![Left(0.5)],
                vec![Right(0.5)],
                Boundary::ALL.to_vec(),
            ),
            ScenarioKind::Custom => (
                vec![6],
                vec![MRule::Fraction(2)],
                vec![0.5],
                zero.clone(),
                zero,
                vec![Boundary::Open],
            ),
        };
        ScenarioConfig {
            scenario: kind,
            output: PathBuf::from("out").join(kind.as_str()),
            grid: Grid {
                l,
                m,
                phi,
                delta_l: dl,
                delta_r: dr,
                bc,
                j: 1.0,
            },
            solver: SolverConfig::default(),
        }
    }

    /// Every chain of the grid, in a fixed order: `L`, then `M` rule, `φ`,
    /// `δ_L`, `δ_R` and boundary mode. Open chains ignore the couplings, and
    /// duplicates are dropped.
    pub fn points(&self) -> Result<Vec<ModelParams>> {
        let g = &self.grid;
        let mut out: Vec<ModelParams> = Vec::new();
        for &l in &g.l {
            for &rule in &g.m {
                let m = rule.eval(l).map_err(|e| Error::Config(vec![e]))?;
                for &phi in &g.phi {
                    for &dl in &g.delta_l {
                        for &dr in &g.delta_r {
                            for &bc in &g.bc {
                                let mut p = ModelParams::new(l, m, bc).with_j(g.j).with_phi(phi);
                                if bc == Boundary::Generalized {
                                    p = p.with_deltas(dl.eval(g.j, phi), dr.eval(g.j, phi));
                                }
                                if !out.contains(&p) {
                                    out.push(p);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        let errors = self.problems();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors))
        }
    }

    fn problems(&self) -> Vec<String> {
        let g = &self.grid;
        let mut errs = Vec::new();
        for (name, empty) in [
            ("grid.L", g.l.is_empty()),
            ("grid.M", g.m.is_empty()),
            ("grid.phi", g.phi.is_empty()),
            ("grid.deltaL", g.delta_l.is_empty()),
            ("grid.deltaR", g.delta_r.is_empty()),
            ("grid.bc", g.bc.is_empty()),
        ] {
            if empty {
                errs.push(format!("{name} is empty"));
            }
        }
        for &l in &g.l {
            if !(2..=MAX_SITES).contains(&l) {
                errs.push(format!("grid.L: L = {l} outside 2..={MAX_SITES}"));
            }
            for rule in &g.m {
                if let Err(e) = rule.eval(l) {
                    errs.push(format!("grid.M: {e}"));
                }
            }
        }
        for &phi in &g.phi {
            if !phi.is_finite() {
                errs.push(format!("grid.phi: {phi} is not finite"));
            }
        }
        if self.scenario == ScenarioKind::BaeScan {
            for &l in &g.l {
                for m in g.m.iter().filter_map(|r| r.eval(l).ok()) {
                    if !(1..=2).contains(&m) {
                        errs.push(format!(
                            "grid.M: root scans cover M = 1 and 2, not {m} (L = {l})"
                        ));
                    }
                }
            }
            if g.bc.contains(&Boundary::Generalized) {
                for r in &g.delta_r {
                    if g.phi.iter().any(|&phi| !(r.eval(g.j, phi) > 0.0)) {
                        errs.push(format!(
                            "grid.deltaR: generalized root scans need deltaR > 0, got {r:?}"
                        ));
                    }
                }
            }
        }
        if !(g.j.is_finite() && g.j > 0.0) {
            errs.push(format!("grid.J: {} must be positive", g.j));
        }
        for (name, rules) in [("deltaL", &g.delta_l), ("deltaR", &g.delta_r)] {
            for r in rules {
                let bad = match *r {
                    DeltaRule::Value(v) | DeltaRule::Left(v) | DeltaRule::Right(v) => {
                        !(v.is_finite() && v >= 0.0)
                    }
                };
                if bad {
                    errs.push(format!("grid.{name}: {r:?} must be finite and >= 0"));
                }
            }
        }
        let s = &self.solver;
        for (name, v) in [
            ("steady_tolerance", s.steady_tolerance),
            ("steady_target", s.steady_target),
            ("newton_tolerance", s.newton_tolerance),
            ("root_accept", s.root_accept),
        ] {
            if !(v.is_finite() && v > 0.0) {
                errs.push(format!("solver.{name}: {v} must be positive"));
            }
        }
        if s.max_iterations == 0 {
            errs.push("solver.max_iterations must be positive".into());
        }
        if s.restart == 0 {
            errs.push("solver.restart must be positive".into());
        }
        if s.dense_cap == 0 || s.dense_cap > MAX_DENSE_DIM {
            errs.push(format!(
                "solver.dense_cap: {} outside 1..={MAX_DENSE_DIM}",
                s.dense_cap
            ));
        }
        if self.output.as_os_str().is_empty() {
            errs.push("output is empty".into());
        }
        errs
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(vec![e.message().to_string()]))?;
        let mut errs = Vec::new();
        let kind = match table.get("scenario") {
            Some(Value::String(s)) => match s.parse::<ScenarioKind>() {
                Ok(k) => k,
                Err(e) => return Err(Error::Config(vec![format!("scenario: {e}")])),
            },
            Some(other) => {
                return Err(Error::Config(vec![format!(
                    "scenario: expected a string, got {other}"
                )]))
            }
            None => return Err(Error::Config(vec!["scenario is required".into()])),
        };
        let mut cfg = ScenarioConfig::defaults(kind);
        for (key, value) in &table {
            match key.as_str() {
                "scenario" => {}
                "output" => match value {
                    Value::String(s) => cfg.output = PathBuf::from(s),
                    other => errs.push(format!("output: expected a string, got {other}")),
                },
                "grid" => match value {
                    Value::Table(t) => read_grid(t, &mut cfg.grid, kind, &mut errs),
                    _ => errs.push("grid: expected a table".into()),
                },
                "solver" => match value {
                    Value::Table(t) => read_solver(t, &mut cfg.solver, &mut errs),
                    _ => errs.push("solver: expected a table".into()),
                },
                other => errs.push(format!("unknown key `{other}`")),
            }
        }
        if errs.is_empty() {
            errs = cfg.problems();
        }
        if errs.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Config(errs))
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
        Self::from_toml_str(&text)
    }

    /// Canonical TOML form with every default spelled out.
    pub fn to_toml_string(&self) -> String {
        let g = &self.grid;
        let mut grid = Table::new();
        grid.insert(
            "L".into(),
            Value::Array(g.l.iter().map(|&l| Value::Integer(l as i64)).collect()),
        );
        grid.insert(
            "M".into(),
            Value::Array(g.m.iter().map(|r| r.to_value()).collect()),
        );
        grid.insert(
            "phi".into(),
            Value::Array(g.phi.iter().map(|&p| Value::Float(p)).collect()),
        );
        grid.insert(
            "deltaL".into(),
            Value::Array(g.delta_l.iter().map(|r| r.to_value()).collect()),
        );
        grid.insert(
            "deltaR".into(),
            Value::Array(g.delta_r.iter().map(|r| r.to_value()).collect()),
        );
        if self.scenario.takes_bc() {
            grid.insert(
                "bc".into(),
                Value::Array(
                    g.bc.iter()
                        .map(|b| Value::String(b.as_str().into()))
                        .collect(),
                ),
            );
        }
        grid.insert("J".into(), Value::Float(g.j));
        let s = &self.solver;
        let mut solver = Table::new();
        solver.insert("steady_tolerance".into(), Value::Float(s.steady_tolerance));
        solver.insert("steady_target".into(), Value::Float(s.steady_target));
        solver.insert(
            "max_iterations".into(),
            Value::Integer(s.max_iterations as i64),
        );
        solver.insert("restart".into(), Value::Integer(s.restart as i64));
        solver.insert("dense_cap".into(), Value::Integer(s.dense_cap as i64));
        solver.insert("newton_tolerance".into(), Value::Float(s.newton_tolerance));
        solver.insert("root_accept".into(), Value::Float(s.root_accept));
        let mut top = Table::new();
        top.insert(
            "scenario".into(),
            Value::String(self.scenario.as_str().into()),
        );
        top.insert(
            "output".into(),
            Value::String(self.output.to_string_lossy().into_owned()),
        );
        top.insert("grid".into(), Value::Table(grid));
        top.insert("solver".into(), Value::Table(solver));
        toml::to_string(&top).expect("tables of plain values always serialize")
    }
}

/// A scalar or an array, each element converted by `f`.
fn list<T>(
    key: &str,
    v: &Value,
    f: impl Fn(&Value) -> std::result::Result<T, String>,
    errs: &mut Vec<String>,
) -> Vec<T> {
    let items: Vec<&Value> = match v {
        Value::Array(a) => a.iter().collect(),
        single => vec![single],
    };
    let mut out = Vec::new();
    for item in items {
        match f(item) {
            Ok(x) => out.push(x),
            Err(e) => errs.push(format!("grid.{key}: {e}")),
        }
    }
    out
}

fn as_f64(v: &Value) -> std::result::Result<f64, String> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        other => Err(format!("expected a number, got {other}")),
    }
}

fn as_usize(v: &Value) -> std::result::Result<usize, String> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        other => Err(format!("expected a nonnegative integer, got {other}")),
    }
}

fn read_grid(t: &Table, g: &mut Grid, kind: ScenarioKind, errs: &mut Vec<String>) {
    for (key, v) in t {
        match key.as_str() {
            "L" => g.l = list(key, v, as_usize, errs),
            "M" => g.m = list(key, v, MRule::from_value, errs),
            "phi" => g.phi = list(key, v, as_f64, errs),
            "deltaL" => g.delta_l = list(key, v, DeltaRule::from_value, errs),
            "deltaR" => g.delta_r = list(key, v, DeltaRule::from_value, errs),
            "J" => match as_f64(v) {
                Ok(j) => g.j = j,
                Err(e) => errs.push(format!("grid.J: {e}")),
            },
            "bc" if kind.takes_bc() => {
                g.bc = list(
                    key,
                    v,
                    |x| match x {
                        Value::String(s) => s.parse::<Boundary>().map_err(|e| e.to_string()),
                        other => Err(format!("expected a boundary name, got {other}")),
                    },
                    errs,
                )
            }
            "bc" => errs.push(format!(
                "grid.bc: the {kind} scenario fixes its boundary modes"
            )),
            other => errs.push(format!("unknown key `grid.{other}`")),
        }
    }
}

fn read_solver(t: &Table, s: &mut SolverConfig, errs: &mut Vec<String>) {
    for (key, v) in t {
        let r = match key.as_str() {
            "steady_tolerance" => as_f64(v).map(|x| s.steady_tolerance = x),
            "steady_target" => as_f64(v).map(|x| s.steady_target = x),
            "max_iterations" => as_usize(v).map(|x| s.max_iterations = x),
            "restart" => as_usize(v).map(|x| s.restart = x),
            "dense_cap" => as_usize(v).map(|x| s.dense_cap = x),
            "newton_tolerance" => as_f64(v).map(|x| s.newton_tolerance = x),
            "root_accept" => as_f64(v).map(|x| s.root_accept = x),
            other => Err(format!("unknown key `solver.{other}`")),
        };
        if let Err(e) = r {
            errs.push(if e.starts_with("unknown") {
                e
            } else {
                format!("solver.{key}: {e}")
            });
        }
    }
}
