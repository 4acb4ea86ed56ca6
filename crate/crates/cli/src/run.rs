//! Scenario execution: turns a resolved config into output files plus a
//! manifest. Computation happens in parallel; files are written afterwards in
//! a fixed order.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chirality_core::bath::KernelQuadrature;
use chirality_core::dynamics::{self, propagate_with, schedule_from_table, tabulate_kernels};
use chirality_core::microscopic::{self, MicroscopicError};
use chirality_core::observables::{self, bloch_to_state, pointer_scan_with, theta_grid, ObservableError, PointerScanOptions};
use chirality_core::{
    BathConfig, BlochState, ChiralQubitParams, DensityMatrix2, DynamicsError, EffectiveError, PointerMeasure,
    PropagationOptions, SpectralDensity, TrimerParams,
};
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::config::{ConfigError, Scenario, ScenarioConfig, SpectralKind};
use crate::output::{self, Series};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{context}: {message}")]
    Numerical { context: String, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical { .. } => 3,
            RunError::Io { .. } => 4,
        }
    }

    fn numerical(context: &str, e: impl std::fmt::Display) -> Self {
        RunError::Numerical {
            context: context.to_string(),
            message: e.to_string(),
        }
    }
}

macro_rules! numerical_from {
    ($($t:ty),*) => {$(
        impl From<$t> for RunError {
            fn from(e: $t) -> Self {
                RunError::numerical("numerical error", e)
            }
        }
    )*};
}
numerical_from!(DynamicsError, ObservableError, EffectiveError, MicroscopicError, chirality_core::BathError);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

/// Everything a run produces, before anything touches the disk.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub files: Vec<OutputFile>,
    pub points: Vec<Value>,
    pub warnings: Vec<String>,
}

/// Largest rise of `p` above its running minimum.
pub fn revival_amplitude(p: &[f64]) -> f64 {
    let mut low = f64::INFINITY;
    let mut best = 0.0_f64;
    for &v in p {
        low = low.min(v);
        best = best.max(v - low);
    }
    best
}

/// Number of sign changes, ignoring exact zeros.
pub fn sign_changes(v: &[f64]) -> usize {
    let signs: Vec<bool> = v.iter().filter(|x| **x != 0.0).map(|x| *x > 0.0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Trapezoid average of `y` over the span of `t`.
pub fn time_average(t: &[f64], y: &[f64]) -> f64 {
    let span = t[t.len() - 1] - t[0];
    if span <= 0.0 {
        return y[0];
    }
    let area: f64 = t.windows(2).zip(y.windows(2)).map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1])).sum();
    area / span
}

pub fn spectral_density(cfg: &ScenarioConfig) -> SpectralDensity {
    match cfg.spectral {
        SpectralKind::Lorentzian => SpectralDensity::Lorentzian {
            alpha: cfg.alpha,
            lambda: cfg.lambda,
            omega0: cfg.omega0,
        },
        SpectralKind::Ohmic => SpectralDensity::Ohmic {
            gamma_rate: cfg.ohmic_gamma,
            omega_c: cfg.ohmic_cutoff,
        },
        // `cavity_g` is given in units of the cavity frequency.
        SpectralKind::Cavity => SpectralDensity::cavity_from_coupling(cfg.cavity_g * cfg.omega0, cfg.cavity_gamma, cfg.omega0),
    }
}

pub fn bath_config(cfg: &ScenarioConfig, temperature: f64) -> BathConfig {
    BathConfig {
        spectral: spectral_density(cfg),
        temperature: temperature * cfg.temperature_scale,
        quadrature: KernelQuadrature {
            window_multiplier: cfg.window_multiplier,
            abs_tol: cfg.quad_abs_tol,
            rel_tol: cfg.quad_rel_tol,
            ..KernelQuadrature::default()
        },
    }
}

pub fn qubit_params(cfg: &ScenarioConfig, ratio: f64, detuning: f64) -> Result<ChiralQubitParams, EffectiveError> {
    ChiralQubitParams::from_ratios(cfg.omega_s, ratio, cfg.omega0 - detuning)
}

pub fn propagation_options(cfg: &ScenarioConfig) -> PropagationOptions {
    PropagationOptions {
        include_nonsecular: cfg.nonsecular,
        abs_tol: cfg.abs_tol,
        rel_tol: cfg.rel_tol,
        kernel_resolution: cfg.kernel_resolution,
        ..PropagationOptions::default()
    }
}

fn tag(x: f64) -> String {
    crate::config::fmt_num(x)
}

fn point_label(ratio: f64, detuning: f64, temperature: f64) -> String {
    format!("r{}_d{}_T{}", tag(ratio), tag(detuning), tag(temperature))
}

/// Which fig2 sweep values come straight from figure captions.
pub fn sweep_role(ratio: f64) -> &'static str {
    if ratio == 0.4 || ratio == 0.9 {
        "anchored"
    } else {
        "interpolant"
    }
}

fn params_record(p: &ChiralQubitParams) -> Value {
    json!({
        "omega": p.omega,
        "omega_so": p.omega_so,
        "delta_so": p.delta_so,
        "omega_s": p.omega_s,
        "drive_coupling": p.d * p.eps,
        "delta_plus": p.delta_plus,
        "delta_minus": p.delta_minus,
        "delta_zero": p.delta_zero,
    })
}

fn bath_record(cfg: &ScenarioConfig, b: &BathConfig) -> Value {
    let mut m = Map::new();
    m.insert("temperature_absolute".into(), json!(b.temperature));
    match b.spectral {
        SpectralDensity::Lorentzian { alpha, lambda, omega0 } => {
            m.insert("alpha".into(), json!(alpha));
            m.insert("lambda".into(), json!(lambda));
            m.insert("omega0".into(), json!(omega0));
        }
        SpectralDensity::Ohmic { gamma_rate, omega_c } => {
            m.insert("ohmic_gamma".into(), json!(gamma_rate));
            m.insert("ohmic_cutoff".into(), json!(omega_c));
        }
        SpectralDensity::CavityEffective { alpha, omega0, gamma_rate } => {
            m.insert("alpha_effective".into(), json!(alpha));
            m.insert("cavity_coupling".into(), json!(cfg.cavity_g * omega0));
            m.insert("omega0".into(), json!(omega0));
            m.insert("cavity_gamma".into(), json!(gamma_rate));
        }
    }
    Value::Object(m)
}

struct Point {
    ratio: f64,
    detuning: f64,
    temperature: f64,
}

fn grid_points(cfg: &ScenarioConfig) -> Vec<Point> {
    let mut out = Vec::new();
    for &ratio in &cfg.delta_ratio {
        for &detuning in &cfg.detuning {
            for &temperature in &cfg.temperature {
                out.push(Point { ratio, detuning, temperature });
            }
        }
    }
    out
}

struct JobOutput {
    files: Vec<OutputFile>,
    record: Value,
    warnings: Vec<String>,
}

fn file(name: impl Into<String>, contents: String) -> OutputFile {
    OutputFile { name: name.into(), contents }
}

type Tables = BTreeMap<(u64, u64), chirality_core::KernelTable>;

/// One kernel table per `(detuning, temperature)`; every ratio shares it.
fn kernel_tables(cfg: &ScenarioConfig) -> Result<Tables, RunError> {
    let mut keys: Vec<(f64, f64)> = Vec::new();
    for &d in &cfg.detuning {
        for &t in &cfg.temperature {
            if !keys.contains(&(d, t)) {
                keys.push((d, t));
            }
        }
    }
    let ratio = cfg.delta_ratio[0];
    let times = cfg.time_grid();
    let opts = propagation_options(cfg);
    keys.par_iter()
        .map(|&(d, t)| {
            let context = format!("kernels d{}_T{}", tag(d), tag(t));
            let params = qubit_params(cfg, ratio, d).map_err(|e| RunError::numerical(&context, e))?;
            let bath = bath_config(cfg, t);
            bath.validate().map_err(|e| RunError::numerical(&context, e))?;
            let table =
                tabulate_kernels(&bath, &params, &times, cfg.t_max, &opts).map_err(|e| RunError::numerical(&context, e))?;
            Ok(((d.to_bits(), t.to_bits()), table))
        })
        .collect()
}

/// Computes every output of `cfg` without writing anything.
pub fn compute(cfg: &ScenarioConfig) -> Result<RunOutput, RunError> {
    let tables = match cfg.scenario {
        Scenario::Fig1 => Tables::new(),
        _ => kernel_tables(cfg)?,
    };
    let jobs: Vec<JobOutput> = match cfg.scenario {
        Scenario::Fig1 => cfg
            .d_over_j
            .par_iter()
            .map(|&r| spectrum_job(cfg, r))
            .collect::<Result<_, _>>()?,
        Scenario::Fig2 | Scenario::Fig4 | Scenario::Custom => grid_points(cfg)
            .par_iter()
            .map(|p| trajectory_job(cfg, p, &tables))
            .collect::<Result<_, _>>()?,
        Scenario::Fig3 => grid_points(cfg)
            .par_iter()
            .map(|p| kernel_job(cfg, p, &tables))
            .collect::<Result<_, _>>()?,
        Scenario::Fig5a | Scenario::Fig5b | Scenario::Fig6 => grid_points(cfg)
            .par_iter()
            .map(|p| pointer_job(cfg, p, &tables, cfg.scenario != Scenario::Fig6))
            .collect::<Result<_, _>>()?,
    };

    let mut files = Vec::new();
    let mut points = Vec::new();
    let mut warnings = Vec::new();
    for j in jobs {
        files.extend(j.files);
        points.push(j.record);
        for w in j.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    match cfg.scenario {
        Scenario::Fig6 => files.push(pointer_summary(&points)),
        Scenario::Fig2 | Scenario::Fig4 | Scenario::Custom => {
            if cfg.svg {
                files.push(polarization_overview(cfg, &files));
            }
        }
        _ => {}
    }
    Ok(RunOutput { files, points, warnings })
}

fn spectrum_job(cfg: &ScenarioConfig, ratio: f64) -> Result<JobOutput, RunError> {
    let tp = TrimerParams::from_ratio(cfg.exchange, ratio);
    let spec = microscopic::diagonalize(&tp)?;
    let eff = microscopic::derive_effective(&tp)?;
    let mult = microscopic::multiplicities(&spec.eigenvalues, cfg.exchange);
    let name = format!("spectrum_dj{}.csv", tag(ratio));
    let mut files = vec![file(&name, output::spectrum_csv(&spec.eigenvalues))];
    if cfg.svg {
        let idx: Vec<f64> = (0..spec.eigenvalues.len()).map(|k| k as f64).collect();
        let svg = output::line_plot(
            &format!("levels, D/J = {ratio}"),
            "index",
            "energy / J",
            &[Series { label: "E".into(), x: &idx, y: &spec.eigenvalues }],
        );
        files.push(file(name.replace(".csv", ".svg"), svg));
    }
    Ok(JobOutput {
        files,
        record: json!({
            "d_over_j": ratio,
            "exchange": cfg.exchange,
            "file": name,
            "multiplicities": mult,
            "omega_so": eff.omega_so,
            "doublet_offset": eff.offset,
            "projection_off_diagonal": eff.off_diagonal,
            "degenerate": eff.degenerate,
        }),
        warnings: vec![],
    })
}

struct Prepared {
    params: ChiralQubitParams,
    bath: BathConfig,
    times: Vec<f64>,
    schedule: chirality_core::RateSchedule,
    table: chirality_core::KernelTable,
    opts: PropagationOptions,
}

fn prepare(cfg: &ScenarioConfig, p: &Point, tables: &Tables) -> Result<Prepared, RunError> {
    let context = point_label(p.ratio, p.detuning, p.temperature);
    let params = qubit_params(cfg, p.ratio, p.detuning).map_err(|e| RunError::numerical(&context, e))?;
    let bath = bath_config(cfg, p.temperature);
    let table = tables[&(p.detuning.to_bits(), p.temperature.to_bits())].clone();
    let (schedule, table) = schedule_from_table(table, &params).map_err(|e| RunError::numerical(&context, e))?;
    Ok(Prepared {
        params,
        bath,
        times: cfg.time_grid(),
        schedule,
        table,
        opts: propagation_options(cfg),
    })
}

fn base_record(cfg: &ScenarioConfig, p: &Point, prep: &Prepared) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("delta_ratio".into(), json!(p.ratio));
    m.insert("detuning".into(), json!(p.detuning));
    m.insert("temperature".into(), json!(p.temperature));
    m.insert("params".into(), params_record(&prep.params));
    m.insert("bath".into(), bath_record(cfg, &prep.bath));
    m.insert(
        "kernels".into(),
        json!({
            "grid_points": prep.table.times.len(),
            "integrand_evaluations": prep.table.evaluations,
            "max_error_estimate": prep.table.error.iter().cloned().fold(0.0, f64::max),
        }),
    );
    m
}

fn trajectory_record(traj: &chirality_core::Trajectory) -> Value {
    json!({
        "accepted_steps": traj.accepted_steps,
        "rejected_steps": traj.rejected_steps,
        "max_trace_error": traj.max_trace_error(),
        "max_hermiticity_error": traj.max_hermiticity_error(),
        "min_eigenvalue": traj.min_eigenvalue(),
        "positivity_violations": traj.violations.len(),
    })
}

fn trajectory_job(cfg: &ScenarioConfig, p: &Point, tables: &Tables) -> Result<JobOutput, RunError> {
    let prep = prepare(cfg, p, tables)?;
    let label = point_label(p.ratio, p.detuning, p.temperature);
    let traj = propagate_with(&DensityMatrix2::up(), &prep.schedule, prep.params.omega_s, &prep.times, &prep.opts)
        .map_err(|e| RunError::numerical(&label, e))?;
    let name = format!("trajectory_{label}.csv");
    let mut files = vec![file(&name, output::trajectory_csv(&traj))];
    if cfg.svg {
        let svg = output::line_plot(
            &label,
            "t",
            "P",
            &[Series { label: "P".into(), x: &traj.times, y: &traj.polarization }],
        );
        files.push(file(name.replace(".csv", ".svg"), svg));
    }
    let mut rec = base_record(cfg, p, &prep);
    rec.insert("file".into(), json!(name));
    rec.insert("trajectory".into(), trajectory_record(&traj));
    rec.insert("mean_polarization".into(), json!(time_average(&traj.times, &traj.polarization)));
    rec.insert("revival_amplitude".into(), json!(revival_amplitude(&traj.polarization)));
    if cfg.scenario == Scenario::Fig2 {
        rec.insert("sweep_role".into(), json!(sweep_role(p.ratio)));
    }
    Ok(JobOutput {
        files,
        record: Value::Object(rec),
        warnings: prep.bath.warnings(&prep.params),
    })
}

fn kernel_job(cfg: &ScenarioConfig, p: &Point, tables: &Tables) -> Result<JobOutput, RunError> {
    let prep = prepare(cfg, p, tables)?;
    let label = point_label(p.ratio, p.detuning, p.temperature);
    let name = format!("kernels_{label}.csv");
    let mut files = vec![file(&name, output::kernel_csv(&prep.table, &prep.times))];
    let rates = prep.table.rates.as_ref().expect("rates filled by schedule_from_table");
    if cfg.svg {
        let svg = output::line_plot(
            &label,
            "t",
            "rate",
            &[
                Series { label: "gamma+".into(), x: &prep.table.times, y: &rates.plus },
                Series { label: "gamma-".into(), x: &prep.table.times, y: &rates.minus },
            ],
        );
        files.push(file(name.replace(".csv", ".svg"), svg));
    }
    let mut rec = base_record(cfg, p, &prep);
    rec.insert("file".into(), json!(name));
    rec.insert(
        "sign_changes".into(),
        json!({"gamma_plus": sign_changes(&rates.plus), "gamma_minus": sign_changes(&rates.minus)}),
    );
    Ok(JobOutput {
        files,
        record: Value::Object(rec),
        warnings: prep.bath.warnings(&prep.params),
    })
}

fn pointer_job(cfg: &ScenarioConfig, p: &Point, tables: &Tables, curves: bool) -> Result<JobOutput, RunError> {
    let prep = prepare(cfg, p, tables)?;
    let label = point_label(p.ratio, p.detuning, p.temperature);
    let measure = PointerMeasure::parse(&cfg.pointer_measure).expect("validated measure");
    let phi_grid: Vec<f64> = (0..cfg.phi_points)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / cfg.phi_points as f64)
        .collect();
    let scan_opts = PointerScanOptions {
        theta_grid: theta_grid(cfg.theta_points),
        phi_grid,
        measure,
        times: prep.times.clone(),
        propagation: prep.opts,
    };
    let scan = pointer_scan_with(&prep.schedule, &prep.params, &scan_opts).map_err(|e| RunError::numerical(&label, e))?;
    let name = format!("scan_{label}.csv");
    let mut files = vec![file(&name, output::scan_csv(&scan))];
    if cfg.svg {
        let th: Vec<f64> = scan.states.iter().map(|b| b.theta).collect();
        let svg = output::line_plot(
            &label,
            "theta",
            measure.label(),
            &[Series { label: "score".into(), x: &th, y: &scan.scores }],
        );
        files.push(file(name.replace(".csv", ".svg"), svg));
    }

    let mut curve_records = Vec::new();
    if curves {
        let trajs = cfg
            .curve_thetas
            .par_iter()
            .map(|&frac| {
                let b = BlochState::new(frac * std::f64::consts::PI, 0.0);
                propagate_with(&bloch_to_state(&b), &prep.schedule, prep.params.omega_s, &prep.times, &prep.opts)
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| RunError::numerical(&label, e))?;
        let mut series_names = Vec::new();
        for (&frac, traj) in cfg.curve_thetas.iter().zip(&trajs) {
            let cname = format!("entropy_{label}_th{}.csv", tag(frac));
            files.push(file(&cname, output::trajectory_csv(traj)));
            curve_records.push(json!({
                "theta_over_pi": frac,
                "file": cname,
                "mean_entropy": time_average(&traj.times, &traj.entropy),
                "trajectory": trajectory_record(traj),
            }));
            series_names.push(format!("theta = {frac} pi"));
        }
        if cfg.svg {
            let series: Vec<Series<'_>> = trajs
                .iter()
                .zip(series_names)
                .map(|(t, label)| Series { label, x: &t.times, y: &t.entropy })
                .collect();
            let svg = output::line_plot(&label, "t", "E", &series);
            files.push(file(format!("entropy_{label}.svg"), svg));
        }
    }

    let best = observables::argmin_with_ties(&scan.scores).expect("nonempty scan");
    let mut rec = base_record(cfg, p, &prep);
    rec.insert("file".into(), json!(name));
    rec.insert(
        "pointer".into(),
        json!({
            "theta_p": scan.theta_p,
            "phi_p": scan.phi_p,
            "score": scan.scores[best],
            "horizon": scan.horizon,
            "measure": measure.label(),
        }),
    );
    if curves {
        rec.insert("entropy_curves".into(), Value::Array(curve_records));
    }
    Ok(JobOutput {
        files,
        record: Value::Object(rec),
        warnings: prep.bath.warnings(&prep.params),
    })
}

fn pointer_summary(points: &[Value]) -> OutputFile {
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|r| {
            let f = |v: &Value| v.as_f64().unwrap_or(f64::NAN);
            vec![
                f(&r["delta_ratio"]),
                f(&r["detuning"]),
                f(&r["temperature"]),
                f(&r["pointer"]["theta_p"]),
                f(&r["pointer"]["phi_p"]),
                f(&r["pointer"]["score"]),
            ]
        })
        .collect();
    file(
        "pointer.csv",
        output::table_csv("delta_ratio,detuning,temperature,theta_p,phi_p,score", &rows),
    )
}

fn polarization_overview(cfg: &ScenarioConfig, files: &[OutputFile]) -> OutputFile {
    let parsed: Vec<(String, Vec<f64>, Vec<f64>)> = files
        .iter()
        .filter(|f| f.name.ends_with(".csv"))
        .map(|f| {
            let (mut t, mut p) = (Vec::new(), Vec::new());
            for line in f.contents.lines().skip(1) {
                let mut cells = line.split(',');
                t.push(cells.next().and_then(|c| c.parse().ok()).unwrap_or(f64::NAN));
                p.push(cells.next().and_then(|c| c.parse().ok()).unwrap_or(f64::NAN));
            }
            (f.name.trim_start_matches("trajectory_").trim_end_matches(".csv").to_string(), t, p)
        })
        .collect();
    let series: Vec<Series<'_>> = parsed
        .iter()
        .map(|(l, t, p)| Series { label: l.clone(), x: t, y: p })
        .collect();
    file("polarization.svg", output::line_plot(cfg.scenario.id(), "t", "P", &series))
}

/// Manifest for a finished computation. Keys are sorted; there are no
/// timestamps, so identical configs give identical manifests.
pub fn manifest(cfg: &ScenarioConfig, out: &RunOutput) -> Value {
    let config: Map<String, Value> = cfg.to_pairs().into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let files: Map<String, Value> = out
        .files
        .iter()
        .map(|f| (f.name.clone(), json!(output::sha256_hex(f.contents.as_bytes()))))
        .collect();
    let q = KernelQuadrature::default();
    json!({
        "tool": {"name": "chirality", "version": env!("CARGO_PKG_VERSION")},
        "scenario": cfg.scenario.id(),
        "config": config,
        "units": {
            "base_unit": cfg.base_unit.id(),
            "temperature": format!("multiples of temperature_scale = {} base units", cfg.temperature_scale),
            "drive_frequency": "omega = omega0 - detuning",
        },
        "numerics": {
            "kernel_quadrature": {
                "rule": "adaptive Gauss-Kronrod (10, 21)",
                "rule_points": 21,
                "abs_tol": cfg.quad_abs_tol,
                "rel_tol": cfg.quad_rel_tol,
                "window_multiplier": cfg.window_multiplier,
                "max_intervals": q.max_intervals,
            },
            "integrator": {
                "method": "Dormand-Prince 5(4), rotating frame",
                "abs_tol": cfg.abs_tol,
                "rel_tol": cfg.rel_tol,
                "kernel_resolution": cfg.kernel_resolution,
                "nonsecular": cfg.nonsecular,
            },
            "positivity_tolerance": dynamics::DEFAULT_POSITIVITY_TOLERANCE,
        },
        "points": out.points,
        "warnings": out.warnings,
        "files": files,
    })
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub warnings: Vec<String>,
}

fn write(path: &Path, contents: &[u8]) -> Result<(), RunError> {
    fs::write(path, contents).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

/// Computes `cfg` and writes its files, `manifest.json` and `resolved.cfg`
/// into `out_dir`.
pub fn run_scenario(cfg: &ScenarioConfig, out_dir: &Path) -> Result<RunReport, RunError> {
    let out = compute(cfg)?;
    fs::create_dir_all(out_dir).map_err(|source| RunError::Io { path: out_dir.to_path_buf(), source })?;
    let mut names = Vec::new();
    for f in &out.files {
        write(&out_dir.join(&f.name), f.contents.as_bytes())?;
        names.push(f.name.clone());
    }
    let mut m = serde_json::to_string_pretty(&manifest(cfg, &out)).expect("manifest serializes");
    m.push('\n');
    write(&out_dir.join("manifest.json"), m.as_bytes())?;
    write(&out_dir.join("resolved.cfg"), cfg.to_text().as_bytes())?;
    names.push("manifest.json".into());
    names.push("resolved.cfg".into());
    Ok(RunReport {
        out_dir: out_dir.to_path_buf(),
        files: names,
        warnings: out.warnings,
    })
}
