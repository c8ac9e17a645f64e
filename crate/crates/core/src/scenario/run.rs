//! Scenario execution and artifact output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use super::config::{ScenarioConfig, ScenarioKind};
use crate::basis::{binomial, build_sector, SectorBasis};
use crate::bethe::{match_levels, scan_roots, write_roots_csv, NewtonOptions, RootOptions};
use crate::error::{Error, Result};
use crate::liouvillian::build_effective_liouvillian;
use crate::observables::{
    density_profile, imbalance_deviation, linear_fit, mean_imbalance, mean_imbalance_biorthogonal,
    steady_state_of, write_profile_csv, write_scalar_csv, ObservableRecord, ScalarRow, Weighting,
};
use crate::params::{Boundary, ModelParams};
use crate::spectra::{
    dense_spectrum, mean_level_energy, normalized_mean_energy, write_spectrum_csv,
    write_steady_csv, SpectrumResult,
};
use crate::verify::verify_suite;

/// Environment variable holding the worker count; unset means one per core.
pub const WORKERS_ENV: &str = "LIOUSKIN_WORKERS";

/// Weighting used for eigenstate observables, recorded in every manifest.
pub const WEIGHTING_NOTE: &str =
    "eigenstate profiles use right-eigenvector amplitude squared (L2 normalized); biorthogonal means are reported alongside";

#[derive(Clone, Debug, PartialEq)]
pub struct FileRecord {
    pub name: String,
    /// Data rows, excluding the header.
    pub rows: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub scenario: ScenarioKind,
    pub files: Vec<FileRecord>,
    pub notes: Vec<String>,
    /// Grid points replaced to stay under the dense cap.
    pub substitutions: Vec<String>,
    pub failed_checks: Vec<String>,
}

impl Manifest {
    pub fn to_toml_string(&self, cfg: &ScenarioConfig) -> String {
        let strings =
            |v: &[String]| Value::Array(v.iter().map(|s| Value::String(s.clone())).collect());
        let mut top = Table::new();
        top.insert(
            "scenario".into(),
            Value::String(self.scenario.as_str().into()),
        );
        let status = if self.failed_checks.is_empty() {
            "ok"
        } else {
            "checks_failed"
        };
        top.insert("status".into(), Value::String(status.into()));
        top.insert(
            "crate_version".into(),
            Value::String(env!("CARGO_PKG_VERSION").into()),
        );
        top.insert("weighting".into(), Value::String(WEIGHTING_NOTE.into()));
        top.insert("notes".into(), strings(&self.notes));
        top.insert("substitutions".into(), strings(&self.substitutions));
        top.insert("failed_checks".into(), strings(&self.failed_checks));
        let s = &cfg.solver;
        let mut solver = Table::new();
        solver.insert(
            "steady_method".into(),
            Value::String("restarted GMRES, symmetric Gauss-Seidel preconditioned".into()),
        );
        solver.insert("steady_tolerance".into(), Value::Float(s.steady_tolerance));
        solver.insert("dense_cap".into(), Value::Integer(s.dense_cap as i64));
        solver.insert("newton_tolerance".into(), Value::Float(s.newton_tolerance));
        solver.insert("root_accept".into(), Value::Float(s.root_accept));
        top.insert("solver".into(), Value::Table(solver));
        let files = self
            .files
            .iter()
            .map(|f| {
                let mut t = Table::new();
                t.insert("name".into(), Value::String(f.name.clone()));
                t.insert("rows".into(), Value::Integer(f.rows as i64));
                t.insert("sha256".into(), Value::String(f.sha256.clone()));
                Value::Table(t)
            })
            .collect();
        top.insert("files".into(), Value::Array(files));
        toml::to_string(&top).expect("tables of plain values always serialize")
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub output: PathBuf,
    pub manifest: Manifest,
}

impl RunOutcome {
    /// 0 when every check passed, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.manifest.failed_checks.is_empty() {
            0
        } else {
            2
        }
    }
}

/// In-memory artifacts, written in one go once every grid point succeeded.
#[derive(Default)]
struct Artifacts {
    files: BTreeMap<String, Vec<u8>>,
    notes: Vec<String>,
    substitutions: Vec<String>,
    failed_checks: Vec<String>,
}

impl Artifacts {
    fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.insert(name.into(), bytes);
    }
}

fn tagged<T>(operation: &str, p: &ModelParams, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Scenario {
        operation: operation.into(),
        params: describe(p),
        source: Box::new(e),
    })
}

fn describe(p: &ModelParams) -> String {
    format!(
        "bc={} L={} M={} J={} phi={} deltaL={} deltaR={}",
        p.bc, p.l, p.m, p.j, p.phi, p.delta_l, p.delta_r
    )
}

fn workers() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::Config(vec![format!(
                "{WORKERS_ENV} = `{v}` is not a positive integer"
            )])),
        },
    }
}

/// Run `cfg` and publish its artifacts into `cfg.output`.
///
/// Outputs are staged in a sibling temporary directory and moved into place
/// only after every grid point succeeded, so a failed run leaves nothing
/// behind and a rerun replaces the previous directory whole.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers()?)
        .build()
        .map_err(|e| Error::Numeric(format!("cannot start workers: {e}")))?;
    let mut art = pool.install(|| compute(cfg))?;
    art.add("config.toml", cfg.to_toml_string().into_bytes());

    let files: Vec<FileRecord> = art
        .files
        .iter()
        .map(|(name, bytes)| FileRecord {
            name: name.clone(),
            rows: bytes
                .iter()
                .filter(|&&b| b == b'\n')
                .count()
                .saturating_sub(usize::from(name.ends_with(".csv"))),
            sha256: Sha256::digest(bytes)
                .iter()
                .fold(String::new(), |mut s, b| {
                    let _ = write!(s, "{b:02x}");
                    s
                }),
        })
        .collect();
    let manifest = Manifest {
        scenario: cfg.scenario,
        files,
        notes: art.notes,
        substitutions: art.substitutions,
        failed_checks: art.failed_checks,
    };
    art.files.insert(
        "manifest.toml".into(),
        manifest.to_toml_string(cfg).into_bytes(),
    );
    publish(&cfg.output, &art.files)?;
    Ok(RunOutcome {
        output: cfg.output.clone(),
        manifest,
    })
}

fn publish(target: &Path, files: &BTreeMap<String, Vec<u8>>) -> Result<()> {
    let parent = match target.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent)?;
    let stage = tempfile::Builder::new()
        .prefix(".liouskin-stage-")
        .tempdir_in(&parent)?;
    for (name, bytes) in files {
        let path = stage.path().join(name);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, bytes)?;
    }
    let staged = stage.keep();
    let retired = if target.exists() {
        let old = tempfile::Builder::new()
            .prefix(".liouskin-old-")
            .tempdir_in(&parent)?
            .keep();
        fs::remove_dir(&old)?;
        fs::rename(target, &old)?;
        Some(old)
    } else {
        None
    };
    if let Err(e) = fs::rename(&staged, target) {
        if let Some(old) = &retired {
            let _ = fs::rename(old, target);
        }
        let _ = fs::remove_dir_all(&staged);
        return Err(e.into());
    }
    if let Some(old) = retired {
        fs::remove_dir_all(old)?;
    }
    Ok(())
}

fn compute(cfg: &ScenarioConfig) -> Result<Artifacts> {
    let mut art = Artifacts::default();
    match cfg.scenario {
        ScenarioKind::Verify => run_verify(cfg, &mut art)?,
        ScenarioKind::Fig2 => run_fig2(cfg, &mut art)?,
        ScenarioKind::Fig3a => run_fig3a(cfg, &mut art)?,
        ScenarioKind::Fig3b => run_fig3b(cfg, &mut art)?,
        ScenarioKind::Fig4 => run_fig4(cfg, &mut art)?,
        ScenarioKind::BaeScan => run_bae_scan(cfg, &mut art)?,
        ScenarioKind::Custom => run_custom(cfg, &mut art)?,
    }
    Ok(art)
}

fn csv(f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn run_verify(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let max_l = cfg.grid.l.iter().copied().max().unwrap_or(4);
    let checks = verify_suite(max_l);
    let mut out = String::from("check,passed,metric,threshold,detail\n");
    for c in &checks {
        let _ = writeln!(
            out,
            "{},{},{:.16e},{:.16e},\"{}\"",
            c.name,
            c.passed,
            c.metric,
            c.threshold,
            c.detail.replace('"', "'")
        );
        if !c.passed {
            art.failed_checks.push(c.to_string());
        }
    }
    art.add("verify.csv", out.into_bytes());
    art.notes.push(format!(
        "suite sized by L <= {max_l}; superoperator checks stop at L = {}",
        max_l.clamp(2, 4)
    ));
    Ok(())
}

/// Replace lengths whose dense sector exceeds the cap by the largest smaller
/// length that fits, keeping every `M` rule integral.
fn dense_scaled(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<ScenarioConfig> {
    let cap = cfg.solver.dense_cap as u64;
    let fits = |l: usize| {
        cfg.grid
            .m
            .iter()
            .all(|r| r.eval(l).map(|m| binomial(l, m) <= cap).unwrap_or(false))
    };
    let mut scaled = cfg.clone();
    let mut ls = Vec::new();
    for &l in &cfg.grid.l {
        if fits(l) {
            if !ls.contains(&l) {
                ls.push(l);
            }
            continue;
        }
        match (2..l)
            .rev()
            .find(|&s| fits(s) && !ls.contains(&s) && !cfg.grid.l.contains(&s))
        {
            Some(s) => {
                art.substitutions
                    .push(format!("L = {l} -> L = {s}: dense sector above cap {cap}"));
                ls.push(s);
            }
            None => {
                return Err(Error::Capacity {
                    what: "dense sector dimension",
                    value: binomial(l, l / 2),
                    limit: cap,
                });
            }
        }
    }
    scaled.grid.l = ls;
    Ok(scaled)
}

fn open_twin(p: &ModelParams) -> ModelParams {
    ModelParams {
        bc: Boundary::Open,
        delta_l: 0.0,
        delta_r: 0.0,
        ..p.clone()
    }
}

fn sparse_note(cfg: &ScenarioConfig, art: &mut Artifacts, reference: usize) {
    if !cfg.grid.l.contains(&reference) {
        art.notes.push(format!(
            "desk scale: reference length L = {reference} is reachable on the sparse steady-state path by listing it in grid.L"
        ));
    }
}

fn run_fig2(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let opts = cfg.solver.steady_options();
    let points: Vec<ModelParams> = cfg.points()?.into_iter().map(|p| open_twin(&p)).collect();
    let records: Vec<ObservableRecord> = points
        .par_iter()
        .map(|p| tagged("steady_state", p, ObservableRecord::steady(p, &opts)))
        .collect::<Result<_>>()?;
    let rows: Vec<ScalarRow> = records
        .iter()
        .map(|r| ScalarRow::new(&r.params, "imbalance", r.imbalance))
        .collect();
    art.add("profiles.csv", csv(|w| write_profile_csv(&records, w))?);
    art.add("imbalance.csv", csv(|w| write_scalar_csv(&rows, w))?);
    sparse_note(cfg, art, 20);
    Ok(())
}

/// Fit rows `quantity,x,group,slope,intercept,r,n`, one per group of points
/// that differ only in `L`.
fn fits(quantity: &str, x_name: &str, rows: &[(ModelParams, f64, f64)]) -> String {
    let mut groups: Vec<(String, Vec<f64>, Vec<f64>)> = Vec::new();
    for (p, x, y) in rows {
        let key = format!(
            "bc={} phi={:e} deltaL/J_L={:e} deltaR/J_R={:e} M/L={:e}",
            p.bc,
            p.phi,
            p.delta_l / p.j_left(),
            p.delta_r / p.j_right(),
            p.m as f64 / p.l as f64
        );
        match groups.iter_mut().find(|g| g.0 == key) {
            Some(g) => {
                g.1.push(*x);
                g.2.push(*y);
            }
            None => groups.push((key, vec![*x], vec![*y])),
        }
    }
    let mut out = String::from("quantity,x,group,slope,intercept,r,n\n");
    for (key, xs, ys) in groups {
        if let Ok(f) = linear_fit(&xs, &ys) {
            let _ = writeln!(
                out,
                "{quantity},{x_name},{key},{:.16e},{:.16e},{:.16e},{}",
                f.slope,
                f.intercept,
                f.r,
                xs.len()
            );
        }
    }
    out
}

fn run_fig3a(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let opts = cfg.solver.steady_options();
    let points = cfg.points()?;
    let devs: Vec<f64> = points
        .par_iter()
        .map(|p| {
            tagged(
                "imbalance_deviation",
                p,
                imbalance_deviation(p, &open_twin(p), &opts),
            )
        })
        .collect::<Result<_>>()?;
    let rows: Vec<ScalarRow> = points
        .iter()
        .zip(&devs)
        .map(|(p, &d)| ScalarRow::new(p, "imbalance_deviation", d))
        .collect();
    art.add("deviation.csv", csv(|w| write_scalar_csv(&rows, w))?);
    let fit_rows: Vec<(ModelParams, f64, f64)> = points
        .iter()
        .zip(&devs)
        .filter(|(_, d)| **d != 0.0)
        .map(|(p, d)| (p.clone(), p.l as f64, d.abs().ln()))
        .collect();
    art.add(
        "fit.csv",
        fits("ln_abs_imbalance_deviation", "L", &fit_rows).into_bytes(),
    );
    Ok(())
}

fn spectrum(p: &ModelParams, vectors: bool) -> Result<(SectorBasis, SpectrumResult)> {
    let basis = build_sector(p.l, p.m)?;
    let op = build_effective_liouvillian(p, &basis)?;
    let spec = dense_spectrum(&op, vectors)?.with_params(p.clone());
    Ok((basis, spec))
}

fn run_fig3b(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let cfg = dense_scaled(cfg, art)?;
    let points = cfg.points()?;
    let diffs: Vec<f64> = points
        .par_iter()
        .map(|p| {
            let (_, g) = tagged("dense_spectrum", p, spectrum(p, false))?;
            let o = open_twin(p);
            let (_, b) = tagged("dense_spectrum", &o, spectrum(&o, false))?;
            tagged(
                "mean_level_energy",
                p,
                Ok(mean_level_energy(&g)? - mean_level_energy(&b)?),
            )
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (p, &d) in points.iter().zip(&diffs) {
        rows.push(ScalarRow::new(p, "mean_energy_difference", d));
        rows.push(ScalarRow::new(
            p,
            "mean_energy_difference_times_L",
            d * p.l as f64,
        ));
    }
    art.add("energy.csv", csv(|w| write_scalar_csv(&rows, w))?);
    let fit_rows: Vec<(ModelParams, f64, f64)> = points
        .iter()
        .zip(&diffs)
        .map(|(p, &d)| (p.clone(), 1.0 / p.l as f64, d))
        .collect();
    art.add(
        "fit.csv",
        fits("mean_energy_difference", "1/L", &fit_rows).into_bytes(),
    );
    art.notes.push(
        "mean energies are per-level means of (E - E_min)/(E_max - E_min) over real parts".into(),
    );
    Ok(())
}

fn log_ratio(profile: &[f64]) -> f64 {
    profile[profile.len() - 1].ln() - profile[0].ln()
}

fn run_fig4(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let cfg = dense_scaled(cfg, art)?;
    let opts = cfg.solver.steady_options();
    let points = cfg.points()?;
    let results: Vec<(ObservableRecord, f64)> = points
        .par_iter()
        .map(|p| {
            let (basis, spec) = tagged("dense_spectrum", p, spectrum(p, true))?;
            let right = tagged("mean_imbalance", p, mean_imbalance(&spec, &basis))?;
            let bi = tagged(
                "mean_imbalance_biorthogonal",
                p,
                mean_imbalance_biorthogonal(&spec, &basis),
            )?;
            let rec = tagged("steady_state", p, ObservableRecord::steady(p, &opts))?
                .with_mean_imbalance(right);
            Ok((rec, bi))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut fit_rows = Vec::new();
    for (rec, bi) in &results {
        rows.extend(rec.scalars());
        let lr = log_ratio(&rec.density_profile);
        rows.push(ScalarRow::new(&rec.params, "log_ratio_LR", lr));
        rows.push(ScalarRow::new(
            &rec.params,
            "mean_imbalance_biorthogonal",
            *bi,
        ));
        fit_rows.push((rec.params.clone(), rec.params.l as f64, lr));
    }
    let records: Vec<ObservableRecord> = results.into_iter().map(|r| r.0).collect();
    art.add("profiles.csv", csv(|w| write_profile_csv(&records, w))?);
    art.add("scalars.csv", csv(|w| write_scalar_csv(&rows, w))?);
    art.add("fit.csv", fits("log_ratio_LR", "L", &fit_rows).into_bytes());
    Ok(())
}

fn root_options(cfg: &ScenarioConfig) -> RootOptions {
    RootOptions {
        newton: NewtonOptions {
            tol: cfg.solver.newton_tolerance,
            ..NewtonOptions::default()
        },
        accept: cfg.solver.root_accept,
        ..RootOptions::default()
    }
}

fn run_bae_scan(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let opts = root_options(cfg);
    let cap = cfg.solver.dense_cap as u64;
    let points = cfg.points()?;
    let results = points
        .par_iter()
        .map(|p| {
            let roots = tagged("scan_roots", p, scan_roots(p, &opts))?;
            let mut rows = vec![ScalarRow::new(p, "roots", roots.len() as f64)];
            if binomial(p.l, p.m) <= cap {
                let (_, spec) = tagged("dense_spectrum", p, spectrum(p, false))?;
                let energies: Vec<C64> = roots.iter().map(|r| r.energy).collect();
                let cov = match_levels(&energies, &spec.eigenvalues, f64::INFINITY);
                rows.push(ScalarRow::new(p, "dim", cov.dim as f64));
                rows.push(ScalarRow::new(p, "matched", cov.matched as f64));
                rows.push(ScalarRow::new(p, "coverage", cov.fraction()));
                rows.push(ScalarRow::new(p, "max_energy_error", cov.max_error()));
            }
            Ok((roots, rows))
        })
        .collect::<Result<Vec<_>>>()?;
    let all_roots: Vec<_> = results.iter().flat_map(|r| r.0.iter().cloned()).collect();
    let rows: Vec<ScalarRow> = results.into_iter().flat_map(|r| r.1).collect();
    art.add("roots.csv", csv(|w| write_roots_csv(&all_roots, w))?);
    art.add("coverage.csv", csv(|w| write_scalar_csv(&rows, w))?);
    art.notes.push("coverage matches root energies greedily to dense eigenvalues; max_energy_error is the worst pair".into());
    Ok(())
}

fn point_stem(k: usize, p: &ModelParams) -> String {
    format!("{k:03}_{}_L{}_M{}", p.bc, p.l, p.m)
}

fn run_custom(cfg: &ScenarioConfig, art: &mut Artifacts) -> Result<()> {
    let opts = cfg.solver.steady_options();
    let cap = cfg.solver.dense_cap as u64;
    let points = cfg.points()?;
    type PointOut = (ObservableRecord, Vec<ScalarRow>, Vec<u8>, Option<Vec<u8>>);
    let results: Vec<PointOut> = points
        .par_iter()
        .map(|p| {
            let (basis, steady) = tagged("steady_state", p, steady_state_of(p, &opts))?;
            let profile = density_profile(&steady.probabilities, &basis, Weighting::Probability)?;
            let mut rec = tagged(
                "observables",
                p,
                ObservableRecord::from_profile(p, profile, "steady"),
            )?;
            let steady_csv = csv(|w| write_steady_csv(&steady, &basis, w))?;
            let mut extra = vec![ScalarRow::new(p, "steady_residual", steady.residual)];
            let mut spec_csv = None;
            if binomial(p.l, p.m) <= cap {
                let (basis, spec) = tagged("dense_spectrum", p, spectrum(p, true))?;
                rec = rec.with_mean_imbalance(tagged(
                    "mean_imbalance",
                    p,
                    mean_imbalance(&spec, &basis),
                )?);
                extra.push(ScalarRow::new(
                    p,
                    "mean_imbalance_biorthogonal",
                    mean_imbalance_biorthogonal(&spec, &basis)?,
                ));
                if let Ok(e) = normalized_mean_energy(&spec) {
                    extra.push(ScalarRow::new(p, "normalized_mean_energy", e));
                }
                spec_csv = Some(csv(|w| write_spectrum_csv(&spec, w))?);
            }
            Ok((rec, extra, steady_csv, spec_csv))
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (k, (rec, extra, steady_csv, spec_csv)) in results.into_iter().enumerate() {
        let stem = point_stem(k, &rec.params);
        art.add(format!("steady/{stem}.csv"), steady_csv);
        if let Some(s) = spec_csv {
            art.add(format!("spectra/{stem}.csv"), s);
        }
        rows.extend(rec.scalars());
        rows.extend(extra);
        records.push(rec);
    }
    art.add("profiles.csv", csv(|w| write_profile_csv(&records, w))?);
    art.add("scalars.csv", csv(|w| write_scalar_csv(&rows, w))?);
    art.notes
        .push("per-point files are numbered in grid order".into());
    Ok(())
}
