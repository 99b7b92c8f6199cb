//! Experiment drivers behind the command-line tool: the manufactured
//! convergence study, solitary-wave propagation, the peakon limit study and
//! single custom runs, plus CSV/JSON output.

mod config;

use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

pub use config::{
    ExperimentKind, InitialCondition, MeshSection, Overrides, OutputSection, PeakonSection, ProblemSection,
    RunConfig, SolitonSection, StabPreset, TimeSection, OUTPUT_ROOT_ENV,
};

use crate::error::{Error, Result};
use crate::hdg::{Discretization, FieldState, ProblemConfig, TraceState};
use crate::mesh_basis::{build_mesh, eval_field, l2_error, l2_project, BasisSpec, FieldCoeffs, Mesh};
use crate::profiles::{
    oh_exact, peakon_initial_state, petviashvili_solve, profile_to_initial, ManufacturedCase, SolitaryProfile,
};
use crate::time_stepper::{run_from_state, run_simulation, DiagnosticsRecord, Observer, ThetaConfig};

/// Evaluation points per element in snapshot files.
pub const SAMPLES_PER_ELEMENT: usize = 8;

/// One CSV file: header line plus preformatted rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub file_name: String,
    pub header: String,
    pub rows: Vec<String>,
}

impl CsvTable {
    pub fn new(file_name: impl Into<String>, header: &str) -> CsvTable {
        CsvTable {
            file_name: file_name.into(),
            header: header.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, fields: &[String]) {
        self.rows.push(fields.join(","));
    }

    pub fn render(&self) -> String {
        let mut s = String::with_capacity(32 * (self.rows.len() + 1));
        s.push_str(&self.header);
        s.push('\n');
        for r in &self.rows {
            s.push_str(r);
            s.push('\n');
        }
        s
    }
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

/// Everything a run produces; written by [`emit_outputs`].
#[derive(Debug, Clone)]
pub struct ExperimentResults {
    pub config: RunConfig,
    pub tables: Vec<CsvTable>,
    pub summary: Value,
    /// Cases that failed while the rest of the run continued.
    pub failures: Vec<String>,
}

impl ExperimentResults {
    pub fn empty(config: RunConfig) -> ExperimentResults {
        ExperimentResults {
            config,
            tables: Vec::new(),
            summary: Value::Null,
            failures: Vec::new(),
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    library_version: &'static str,
    config: &'a RunConfig,
    files: Vec<&'a str>,
    summary: &'a Value,
    failures: &'a [String],
}

/// Writes every table plus `manifest.json` into `dir` (created if missing).
pub fn emit_outputs(results: &ExperimentResults, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for t in &results.tables {
        let path = dir.join(&t.file_name);
        std::fs::write(&path, t.render()).map_err(|e| Error::io(&path, e))?;
    }
    let manifest = Manifest {
        library_version: env!("CARGO_PKG_VERSION"),
        config: &results.config,
        files: results.tables.iter().map(|t| t.file_name.as_str()).collect(),
        summary: &results.summary,
        failures: &results.failures,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

/// Re-reads the configuration stored in a manifest.
pub fn config_from_manifest(text: &str) -> Result<RunConfig> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::config("<manifest>", e.to_string()))?;
    let cfg = v
        .get("config")
        .ok_or_else(|| Error::config("<manifest>", "missing `config`"))?;
    RunConfig::from_json_str(&cfg.to_string())
}

/// Progress sink; receives one line per finished case.
pub type Progress<'a> = &'a mut dyn FnMut(&str);

/// Runs the experiment selected by `cfg.kind`.
pub fn run_experiment(cfg: &RunConfig, progress: Progress<'_>) -> Result<ExperimentResults> {
    match cfg.kind {
        ExperimentKind::Convergence => run_convergence(cfg, progress).map(|(_, r)| r),
        ExperimentKind::Soliton => run_soliton(cfg, progress).map(|(_, r)| r),
        ExperimentKind::PeakonLimit => run_peakon_limit(cfg, progress).map(|(_, r)| r),
        ExperimentKind::Custom => run_custom(cfg, progress),
    }
}

// ---------- sampling and observers ----------

/// `SAMPLES_PER_ELEMENT` cell-centred points per element; globally equispaced
/// on a uniform mesh.
pub fn sample_field(u: &FieldCoeffs, mesh: &Mesh) -> Vec<(f64, f64)> {
    let m = SAMPLES_PER_ELEMENT;
    let mut out = Vec::with_capacity(mesh.n_elements() * m);
    for e in 0..mesh.n_elements() {
        for i in 0..m {
            let xi = -1.0 + (2 * i + 1) as f64 / m as f64;
            let val = eval_field(u, e, xi).expect("sample point inside the element");
            out.push((mesh.map_to_physical(e, xi), val));
        }
    }
    out
}

fn snapshot_table(name: String, samples: &[(f64, f64)]) -> CsvTable {
    let mut t = CsvTable::new(name, "x,u");
    for &(x, u) in samples {
        t.push(&[num(x), num(u)]);
    }
    t
}

fn diagnostics_table(name: String, diags: &[DiagnosticsRecord]) -> CsvTable {
    let mut t = CsvTable::new(name, "step,time,energy,mass,newton_iters");
    for d in diags {
        t.push(&[
            d.step.to_string(),
            num(d.time),
            num(d.energy),
            num(d.mass),
            d.newton_iterations.to_string(),
        ]);
    }
    t
}

fn time_tag(t: f64) -> String {
    format!("{t:.3}")
}

/// Collects `u` at the steps nearest to the requested times.
struct SnapshotObserver<'a> {
    targets: Vec<(f64, usize)>,
    mesh: &'a Mesh,
    taken: Vec<(f64, Vec<(f64, f64)>)>,
}

impl<'a> SnapshotObserver<'a> {
    fn new(times: &[f64], cfg: &ThetaConfig, mesh: &'a Mesh) -> Self {
        let dt = cfg.effective_dt();
        let n = cfg.n_steps();
        let targets = times
            .iter()
            .map(|&t| (t, ((t / dt).round() as usize).min(n)))
            .collect();
        SnapshotObserver {
            targets,
            mesh,
            taken: Vec::new(),
        }
    }
}

impl Observer for SnapshotObserver<'_> {
    fn observe(&mut self, step: usize, state: &FieldState, _: &TraceState, _: &DiagnosticsRecord) -> Result<()> {
        for &(t, s) in &self.targets {
            if s == step {
                self.taken.push((t, sample_field(&state.u, self.mesh)));
            }
        }
        Ok(())
    }
}

fn discretization(cfg: &RunConfig, problem: ProblemConfig, k: usize, ne: usize) -> Result<Discretization> {
    let p = &cfg.problem;
    let mesh = build_mesh(p.x_left, p.x_right, ne, problem.regime.is_periodic())?;
    let mut stab = cfg.stabilization;
    if cfg.kind == ExperimentKind::PeakonLimit {
        // couplings follow the per-case beta
        let base = crate::hdg::StabParams::standard(problem.beta, problem.gamma);
        stab.tau_vq = base.tau_vq;
        stab.tau_qv = base.tau_qv;
    }
    Discretization::new(mesh, BasisSpec::new(k)?, problem, stab)
}

// ---------- convergence ----------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub k: usize,
    pub elements: usize,
    pub error: Option<f64>,
    pub rate: Option<f64>,
    pub dt: f64,
    pub steps: usize,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

/// `log(e_prev/e) / log(N/N_prev)` between successive entries (`log2` of the
/// error ratio under uniform doubling). `None` where either error is missing.
pub fn observed_rates(errors: &[Option<f64>], elements: &[usize]) -> Vec<Option<f64>> {
    (0..errors.len())
        .map(|i| {
            if i == 0 {
                return None;
            }
            match (errors[i - 1], errors[i]) {
                (Some(a), Some(b)) if a > 0.0 && b > 0.0 => {
                    let r = elements[i] as f64 / elements[i - 1] as f64;
                    Some((a / b).ln() / r.ln())
                }
                _ => None,
            }
        })
        .collect()
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> CsvTable {
        let mut t = CsvTable::new("convergence.csv", "k,Ne,error,rate");
        for r in &self.rows {
            t.push(&[
                r.k.to_string(),
                r.elements.to_string(),
                r.error.map(num).unwrap_or_else(|| "nan".into()),
                r.rate.map(num).unwrap_or_default(),
            ]);
        }
        t
    }

    pub fn row(&self, k: usize, elements: usize) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.k == k && r.elements == elements)
    }
}

/// One manufactured-solution run; returns the L2 error of `u` at the final time.
pub fn manufactured_error(
    case: ManufacturedCase,
    k: usize,
    elements: usize,
    stab: crate::hdg::StabParams,
    theta: &ThetaConfig,
) -> Result<(f64, Vec<DiagnosticsRecord>)> {
    let (a, b) = crate::profiles::MANUFACTURED_DOMAIN;
    let mesh = build_mesh(a, b, elements, false)?;
    let disc = Discretization::new(mesh, BasisSpec::new(k)?, case.problem()?, stab)?;
    let u0 = l2_project(|x| case.u(x, 0.0), &disc.mesh, &disc.basis);
    let out = run_simulation(&disc, &u0, theta, &mut [])?;
    let t = out.state.time;
    let err = l2_error(&out.state.u, |x| case.u(x, t), &disc.mesh, &disc.basis, 2 * (k + 3))?;
    Ok((err, out.diagnostics))
}

pub fn run_convergence(cfg: &RunConfig, progress: Progress<'_>) -> Result<(ConvergenceTable, ExperimentResults)> {
    let p = &cfg.problem;
    let case = ManufacturedCase {
        alpha: p.alpha,
        beta: p.beta,
        gamma: p.gamma,
    };
    let mut results = ExperimentResults::empty(cfg.clone());
    let mut rows = Vec::new();
    for &k in &cfg.mesh.degrees {
        let mut errors = Vec::new();
        let mut pending = Vec::new();
        for &ne in &cfg.mesh.elements {
            let h = (p.x_right - p.x_left) / ne as f64;
            let theta = cfg.time.theta_config(h, k)?;
            let (error, failure) = match manufactured_error(case, k, ne, cfg.stabilization, &theta) {
                Ok((e, diags)) => {
                    results
                        .tables
                        .push(diagnostics_table(format!("diagnostics_k{k}_Ne{ne}.csv"), &diags));
                    progress(&format!("k={k} Ne={ne}: error {e:.4e}"));
                    (Some(e), None)
                }
                Err(e) => {
                    let msg = format!("k={k} Ne={ne}: {e}");
                    progress(&msg);
                    results.failures.push(msg.clone());
                    (None, Some(e.to_string()))
                }
            };
            errors.push(error);
            pending.push(ConvergenceRow {
                k,
                elements: ne,
                error,
                rate: None,
                dt: theta.effective_dt(),
                steps: theta.n_steps(),
                failure,
            });
        }
        for (row, rate) in pending.iter_mut().zip(observed_rates(&errors, &cfg.mesh.elements)) {
            row.rate = rate;
        }
        rows.extend(pending);
    }
    let table = ConvergenceTable { rows };
    results.tables.insert(0, table.to_csv());
    results.summary = json!({ "rows": table.rows });
    Ok((table, results))
}

// ---------- solitary wave ----------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolitonSummary {
    pub profile_iterations: usize,
    pub profile_residual: f64,
    pub profile_norm: f64,
    /// `(t, ||u_h - u_ref||, relative to ||U||)` at every snapshot.
    pub shape_errors: Vec<(f64, f64, f64)>,
    /// `(t, crest position unwrapped, |u| at the crest)` at every step.
    pub peak_track: Vec<(f64, f64, f64)>,
    /// Least-squares slope of the unwrapped crest positions.
    pub peak_speed: f64,
    pub final_relative_shape_error: f64,
}

/// Crest of sampled data on a periodic equispaced grid, refined by a parabola
/// through the largest `|u|` sample and its neighbours.
pub fn locate_crest(samples: &[(f64, f64)], length: f64) -> (f64, f64) {
    let n = samples.len();
    let (j, _) = samples
        .iter()
        .enumerate()
        .fold((0, -1.0), |(bj, bv), (j, s)| if s.1.abs() > bv { (j, s.1.abs()) } else { (bj, bv) });
    let f = |i: usize| samples[i].1.abs();
    let (fm, f0, fp) = (f((j + n - 1) % n), f(j), f((j + 1) % n));
    let dx = length / n as f64;
    let denom = fm - 2.0 * f0 + fp;
    let shift = if denom < 0.0 { 0.5 * (fm - fp) / denom } else { 0.0 };
    let peak = f0 - 0.25 * (fm - fp) * shift;
    (samples[j].0 + shift * dx, peak)
}

/// Slope of the least-squares line through `(t, x)`.
pub fn regression_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mt, mx) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(t, x)| (a + t / n, b + x / n));
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, x) in points {
        sxy += (t - mt) * (x - mx);
        sxx += (t - mt) * (t - mt);
    }
    sxy / sxx
}

pub fn run_soliton(cfg: &RunConfig, progress: Progress<'_>) -> Result<(SolitonSummary, ExperimentResults)> {
    let params = cfg.solitary_params();
    let profile = petviashvili_solve(&params, &cfg.soliton.petviashvili)?;
    progress(&format!(
        "profile: {} iterations, residual {:.3e}",
        profile.iterations, profile.residual
    ));
    let k = cfg.mesh.degrees[0];
    let ne = cfg.mesh.elements[0];
    let disc = discretization(cfg, cfg.problem_config(cfg.problem.beta)?, k, ne)?;
    let h = disc.mesh.h();
    let theta = cfg.time.theta_config(h, k)?;
    let u0 = profile_to_initial(&profile, cfg.soliton.x0, &disc.mesh, &disc.basis)?;

    let length = params.length;
    let crest0 = profile.peak_position();
    let x0 = cfg.soliton.x0;
    let c_w = params.c_w;
    let reference = |t: f64| {
        let p: &SolitaryProfile = &profile;
        move |x: f64| p.eval(x - x0 + crest0 - c_w * t)
    };

    let mut snaps = SnapshotObserver::new(&cfg.output.snapshot_times, &theta, &disc.mesh);
    let snap_steps: Vec<usize> = snaps.targets.iter().map(|&(_, s)| s).collect();
    let norm_u = l2_project(|x| profile.eval(x), &disc.mesh, &disc.basis).norm(&disc.mesh);
    let mut track: Vec<(f64, f64, f64)> = Vec::new();
    let mut shape_errors = Vec::new();
    let mesh = disc.mesh.clone();
    let basis = disc.basis.clone();
    let mut tracker = |step: usize, st: &FieldState, _: &TraceState, d: &DiagnosticsRecord| -> Result<()> {
        let (x, a) = locate_crest(&sample_field(&st.u, &mesh), length);
        let x = match track.last() {
            Some(&(_, prev, _)) => x + length * ((prev - x) / length).round(),
            None => x,
        };
        track.push((d.time, x, a));
        if snap_steps.contains(&step) {
            let e = l2_error(&st.u, reference(d.time), &mesh, &basis, 2 * (k + 3))?;
            shape_errors.push((d.time, e, e / norm_u));
        }
        Ok(())
    };
    let out = run_simulation(&disc, &u0, &theta, &mut [&mut snaps, &mut tracker])?;

    let mut results = ExperimentResults::empty(cfg.clone());
    let mut profile_csv = CsvTable::new("profile.csv", "x,U");
    for (x, u) in profile.grid.iter().zip(&profile.values) {
        profile_csv.push(&[num(*x), num(*u)]);
    }
    results.tables.push(profile_csv);
    let mut err_csv = CsvTable::new("shape_error.csv", "time,shape_error,relative");
    for &(t, e, rel) in &shape_errors {
        err_csv.push(&[num(t), num(e), num(rel)]);
    }
    for (t, samples) in &snaps.taken {
        results
            .tables
            .push(snapshot_table(format!("snapshot_t{}.csv", time_tag(*t)), samples));
    }
    let t_end = out.state.time;
    let final_err = l2_error(&out.state.u, reference(t_end), &disc.mesh, &disc.basis, 2 * (k + 3))?;
    let r = reference(t_end);
    let ref_samples: Vec<(f64, f64)> = sample_field(&out.state.u, &disc.mesh)
        .into_iter()
        .map(|(x, _)| (x, r(x)))
        .collect();
    results
        .tables
        .push(snapshot_table(format!("reference_t{}.csv", time_tag(t_end)), &ref_samples));
    results.tables.push(err_csv);
    let mut peak_csv = CsvTable::new("peak_track.csv", "time,position,amplitude");
    for &(t, x, a) in &track {
        peak_csv.push(&[num(t), num(x), num(a)]);
    }
    results.tables.push(peak_csv);
    results.tables.push(diagnostics_table("diagnostics.csv".into(), &out.diagnostics));

    let speed = regression_slope(&track.iter().map(|&(t, x, _)| (t, x)).collect::<Vec<_>>());
    let summary = SolitonSummary {
        profile_iterations: profile.iterations,
        profile_residual: profile.residual,
        profile_norm: norm_u,
        shape_errors,
        peak_track: track,
        peak_speed: speed,
        final_relative_shape_error: final_err / norm_u,
    };
    progress(&format!(
        "T={t_end}: shape error {:.3}% of ||U||, crest speed {speed:.5}",
        100.0 * summary.final_relative_shape_error
    ));
    results.summary = json!({
        "profile_iterations": summary.profile_iterations,
        "profile_residual": summary.profile_residual,
        "profile_norm": summary.profile_norm,
        "final_relative_shape_error": summary.final_relative_shape_error,
        "peak_speed": summary.peak_speed,
        "shape_errors": summary.shape_errors,
    });
    Ok((summary, results))
}

// ---------- peakon limit ----------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakonRow {
    pub beta: f64,
    pub distance: Option<f64>,
    pub failure: Option<String>,
}

/// Outcome of one peakon run.
#[derive(Debug, Clone)]
pub struct PeakonRun {
    /// `||u_h^beta(T) - u_OH(T)||`.
    pub distance: f64,
    pub diagnostics: Vec<DiagnosticsRecord>,
    /// Sampled `u` at the configured snapshot times.
    pub snapshots: Vec<(f64, Vec<(f64, f64)>)>,
}

/// Runs the peakon at dispersion `beta` from the closed-form initial data.
pub fn peakon_distance(cfg: &RunConfig, beta: f64) -> Result<PeakonRun> {
    let k = cfg.mesh.degrees[0];
    let ne = cfg.mesh.elements[0];
    let disc = discretization(cfg, cfg.problem_config(beta)?, k, ne)?;
    let theta = cfg.time.theta_config(disc.mesh.h(), k)?;
    let (state, traces) = peakon_initial_state(&disc)?;
    let mut snaps = SnapshotObserver::new(&cfg.output.snapshot_times, &theta, &disc.mesh);
    let out = run_from_state(&disc, state, traces, &theta, &mut [&mut snaps])?;
    let t = out.state.time;
    let distance = l2_error(&out.state.u, |x| oh_exact(x, t), &disc.mesh, &disc.basis, 2 * (k + 3))?;
    Ok(PeakonRun {
        distance,
        diagnostics: out.diagnostics,
        snapshots: snaps.taken,
    })
}

pub fn run_peakon_limit(cfg: &RunConfig, progress: Progress<'_>) -> Result<(Vec<PeakonRow>, ExperimentResults)> {
    let mut results = ExperimentResults::empty(cfg.clone());
    let mut rows = Vec::new();
    let mut table = CsvTable::new("peakon_limit.csv", "beta,distance");
    let t_final = cfg.time.t_final;
    for &beta in &cfg.peakon.betas {
        let tag = format!("{beta:e}");
        match peakon_distance(cfg, beta) {
            Ok(run) => {
                let d = run.distance;
                progress(&format!("beta={tag}: distance {d:.4e}"));
                table.push(&[num(beta), num(d)]);
                for (t, samples) in &run.snapshots {
                    results
                        .tables
                        .push(snapshot_table(format!("snapshot_beta{tag}_t{}.csv", time_tag(*t)), samples));
                }
                results
                    .tables
                    .push(diagnostics_table(format!("diagnostics_beta{tag}.csv"), &run.diagnostics));
                rows.push(PeakonRow {
                    beta,
                    distance: Some(d),
                    failure: None,
                });
            }
            Err(e) => {
                let msg = format!("beta={tag}: {e}");
                progress(&msg);
                results.failures.push(msg);
                table.push(&[num(beta), "nan".into()]);
                rows.push(PeakonRow {
                    beta,
                    distance: None,
                    failure: Some(e.to_string()),
                });
            }
        }
    }
    let mesh = build_mesh(0.0, 1.0, cfg.mesh.elements[0], true)?;
    let mut exact = CsvTable::new(format!("reference_t{}.csv", time_tag(t_final)), "x,u");
    for (x, _) in sample_field(&FieldCoeffs::zeros(mesh.n_elements(), 1), &mesh) {
        exact.push(&[num(x), num(oh_exact(x, t_final))]);
    }
    results.tables.insert(0, table);
    results.tables.push(exact);
    results.summary = json!({ "rows": rows });
    Ok((rows, results))
}

// ---------- custom ----------

pub fn run_custom(cfg: &RunConfig, progress: Progress<'_>) -> Result<ExperimentResults> {
    let p = &cfg.problem;
    let k = cfg.mesh.degrees[0];
    let ne = cfg.mesh.elements[0];
    let case = ManufacturedCase {
        alpha: p.alpha,
        beta: p.beta,
        gamma: p.gamma,
    };
    let problem = match p.initial {
        InitialCondition::Manufactured => case.problem()?,
        _ => cfg.problem_config(p.beta)?,
    };
    let disc = discretization(cfg, problem, k, ne)?;
    let theta = cfg.time.theta_config(disc.mesh.h(), k)?;
    let mut snaps = SnapshotObserver::new(&cfg.output.snapshot_times, &theta, &disc.mesh);
    let out = match p.initial {
        InitialCondition::Peakon => {
            let (s, tr) = peakon_initial_state(&disc)?;
            run_from_state(&disc, s, tr, &theta, &mut [&mut snaps])?
        }
        InitialCondition::Manufactured => {
            let u0 = l2_project(|x| case.u(x, 0.0), &disc.mesh, &disc.basis);
            run_simulation(&disc, &u0, &theta, &mut [&mut snaps])?
        }
        InitialCondition::Sine { amplitude, mode } => {
            let len = p.x_right - p.x_left;
            let w = 2.0 * std::f64::consts::PI * mode as f64 / len;
            let u0 = l2_project(|x| amplitude * (w * (x - p.x_left)).sin(), &disc.mesh, &disc.basis);
            run_simulation(&disc, &u0, &theta, &mut [&mut snaps])?
        }
    };
    let t = out.state.time;
    let error = match p.initial {
        InitialCondition::Manufactured => Some(l2_error(&out.state.u, |x| case.u(x, t), &disc.mesh, &disc.basis, 2 * (k + 3))?),
        InitialCondition::Peakon => Some(l2_error(&out.state.u, |x| oh_exact(x, t), &disc.mesh, &disc.basis, 2 * (k + 3))?),
        InitialCondition::Sine { .. } => None,
    };
    let mut results = ExperimentResults::empty(cfg.clone());
    for (ts, samples) in &snaps.taken {
        results
            .tables
            .push(snapshot_table(format!("snapshot_t{}.csv", time_tag(*ts)), samples));
    }
    results.tables.push(diagnostics_table("diagnostics.csv".into(), &out.diagnostics));
    let last = out.diagnostics.last().expect("initial record");
    progress(&format!("T={t}: {} steps, energy {:.6e}", out.steps, last.energy));
    results.summary = json!({
        "steps": out.steps,
        "dt": out.dt,
        "final_energy": last.energy,
        "final_mass": last.mass,
        "error_vs_exact": error,
    });
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_are_log2_of_ratios() {
        let errs = [Some(1.0), Some(0.25), Some(0.03), None, Some(1e-3)];
        let ne = [2, 4, 8, 16, 32];
        let r = observed_rates(&errs, &ne);
        assert_eq!(r[0], None);
        assert!((r[1].unwrap() - 2.0).abs() < 1e-12);
        assert!((r[2].unwrap() - (0.25f64 / 0.03).log2()).abs() < 1e-12);
        assert_eq!(r[3], None);
        assert_eq!(r[4], None);
    }

    #[test]
    fn crest_refinement_recovers_parabola_vertex() {
        let n = 64;
        let length = 8.0;
        let samples: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let x = (i as f64 + 0.5) * length / n as f64;
                (x, 3.0 - 0.01 * (x - 2.03).powi(2))
            })
            .collect();
        let (x, a) = locate_crest(&samples, length);
        assert!((x - 2.03).abs() < 1e-12 && (a - 3.0).abs() < 1e-12);
    }

    #[test]
    fn slope_of_line() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 1.5 - 0.75 * i as f64)).collect();
        assert!((regression_slope(&pts) + 0.75).abs() < 1e-14);
    }

    #[test]
    fn samples_are_equispaced() {
        let mesh = build_mesh(0.0, 1.0, 4, true).unwrap();
        let s = sample_field(&FieldCoeffs::zeros(4, 2), &mesh);
        assert_eq!(s.len(), 32);
        for (i, (x, _)) in s.iter().enumerate() {
            assert!((x - (i as f64 + 0.5) / 32.0).abs() < 1e-15);
        }
    }

    #[test]
    fn empty_results_write_manifest_only() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig::default_for(ExperimentKind::Custom, &Overrides::default()).unwrap();
        emit_outputs(&ExperimentResults::empty(cfg.clone()), dir.path()).unwrap();
        let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names, vec![std::ffi::OsString::from("manifest.json")]);
        let text = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        assert_eq!(config_from_manifest(&text).unwrap(), cfg);
    }
}
