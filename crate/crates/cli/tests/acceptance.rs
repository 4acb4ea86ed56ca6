//! Acceptance suite. Every criterion prints one PASS/FAIL line; the test fails
//! at the end if any criterion did. Expected values come from closed forms and
//! independent computations written here, not from the library under test.
//!
//!     cargo test --release -p chirality-cli --test acceptance -- --nocapture

use std::cell::Cell;
use std::collections::BTreeMap;
use std::f64::consts::{LN_2, PI};
use std::process::Command;
use std::time::Instant;

use chirality_cli::config::{resolve, Scenario, ScenarioConfig};
use chirality_cli::run::{self, RunOutput};
use chirality_core::bath::compute_kernels;
use chirality_core::dynamics::{
    analytic_polarization, build_schedule, nonsecular_term, propagate_with, schedule_from_table, tabulate_kernels, Weights,
};
use chirality_core::effective::Op2;
use chirality_core::microscopic;
use chirality_core::observables::{bloch_to_state, theta_grid};
use chirality_core::oracle::{self, InitialState};
use chirality_core::{
    BathConfig, BlochState, ChiralQubitParams, DensityMatrix2, KernelTable, RateSchedule, SpectralDensity, Trajectory,
    TrimerParams,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config as PtConfig, TestRunner};
use serde_json::Value;

struct Ledger {
    rows: Vec<(u32, &'static str, bool)>,
}

impl Ledger {
    fn record(&mut self, id: u32, name: &'static str, pass: bool, detail: String) {
        println!("[{}] {id:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
        self.rows.push((id, name, pass));
    }
}

fn defaults(s: Scenario) -> ScenarioConfig {
    resolve("", Some(s), &[]).unwrap()
}

fn csv_rows(contents: &str) -> Vec<Vec<f64>> {
    contents
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

fn column(rows: &[Vec<f64>], k: usize) -> Vec<f64> {
    rows.iter().map(|r| r[k]).collect()
}

fn csv_file<'a>(out: &'a RunOutput, name: &str) -> &'a str {
    &out.files.iter().find(|f| f.name == name).unwrap_or_else(|| panic!("missing {name}")).contents
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn lorentzian_j(alpha: f64, lambda: f64, omega0: f64, w: f64) -> f64 {
    alpha * alpha * lambda * lambda / (2.0 * PI * ((w - omega0).powi(2) + lambda * lambda))
}

fn bose(w: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        0.0
    } else {
        1.0 / ((w / temperature).exp() - 1.0)
    }
}

/// `Re int_0^t ds (a^2 lambda / 2) e^{-lambda s} cos(delta s)`: full-line
/// Lorentzian emission kernel at T = 0.
fn lorentz_emission_re(alpha: f64, lambda: f64, delta: f64, t: f64) -> f64 {
    let e = (-lambda * t).exp();
    0.5 * alpha * alpha * lambda * (lambda - e * (lambda * (delta * t).cos() - delta * (delta * t).sin()))
        / (lambda * lambda + delta * delta)
}

/// Entropy from a 2x2 Hermitian matrix given by its real diagonal and the
/// upper off-diagonal element.
fn entropy_of(r00: f64, r11: f64, r01: Complex64) -> (f64, f64) {
    let mean = 0.5 * (r00 + r11);
    let half = (0.25 * (r00 - r11).powi(2) + r01.norm_sqr()).sqrt();
    let (lo, hi) = (mean - half, mean + half);
    let h = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    (h(lo) + h(hi), lo)
}

fn peak_to_peak(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    max - min
}

fn trajectory_records(out: &RunOutput) -> Vec<Value> {
    let mut v = Vec::new();
    for p in &out.points {
        if let Some(t) = p.get("trajectory") {
            v.push(t.clone());
        }
        if let Some(Value::Array(curves)) = p.get("entropy_curves") {
            v.extend(curves.iter().map(|c| c["trajectory"].clone()));
        }
    }
    v
}

#[derive(Default)]
struct Conservation {
    trace: f64,
    hermiticity: f64,
    min_eigenvalue: f64,
    violations: usize,
    trajectories: usize,
}

impl Conservation {
    fn absorb_record(&mut self, r: &Value) {
        self.trace = self.trace.max(r["max_trace_error"].as_f64().unwrap());
        self.hermiticity = self.hermiticity.max(r["max_hermiticity_error"].as_f64().unwrap());
        self.min_eigenvalue = self.min_eigenvalue.min(r["min_eigenvalue"].as_f64().unwrap());
        self.violations += r["positivity_violations"].as_u64().unwrap() as usize;
        self.trajectories += 1;
    }

    fn absorb(&mut self, t: &Trajectory) {
        for s in &t.states {
            let m = s.matrix();
            self.trace = self.trace.max((m[(0, 0)].re + m[(1, 1)].re - 1.0).abs().max(m[(0, 0)].im.abs() + m[(1, 1)].im.abs()));
            self.hermiticity = self.hermiticity.max((m[(0, 1)] - m[(1, 0)].conj()).norm());
            let (_, lo) = entropy_of(m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
            self.min_eigenvalue = self.min_eigenvalue.min(lo);
        }
        self.violations += t.violations.len();
        self.trajectories += 1;
    }
}

fn fig2_setup(cfg: &ScenarioConfig, ratio: f64) -> (ChiralQubitParams, BathConfig, Vec<f64>) {
    let params = run::qubit_params(cfg, ratio, cfg.detuning[0]).unwrap();
    (params, run::bath_config(cfg, cfg.temperature[0]), cfg.time_grid())
}

#[test]
fn acceptance_criteria() {
    let mut ledger = Ledger { rows: Vec::new() };
    let mut conservation = Conservation::default();

    let fig2 = defaults(Scenario::Fig2);
    let fig3 = defaults(Scenario::Fig3);

    // 1. Closed-form polarization against the integrated density matrix.
    {
        let start = Instant::now();
        let mut worst = 0.0_f64;
        let opts = run::propagation_options(&fig2);
        let (first, bath, times) = fig2_setup(&fig2, fig2.delta_ratio[0]);
        let table = tabulate_kernels(&bath, &first, &times, fig2.t_max, &opts).unwrap();
        for &ratio in &fig2.delta_ratio {
            let (params, _, _) = fig2_setup(&fig2, ratio);
            let (schedule, _) = schedule_from_table(table.clone(), &params).unwrap();
            let traj = propagate_with(&DensityMatrix2::up(), &schedule, params.omega_s, &times, &opts).unwrap();
            let ode: Vec<f64> = traj.states.iter().map(|s| s.matrix()[(0, 0)].re - s.matrix()[(1, 1)].re).collect();
            let closed = analytic_polarization(&schedule, &times).unwrap();
            worst = worst.max(sup_diff(&ode, &closed));
            conservation.absorb(&traj);
        }
        let secs = start.elapsed().as_secs_f64();
        ledger.record(
            1,
            "analytic vs ODE polarization (fig2)",
            worst < 1e-6 && secs < 5.0,
            format!("sup |dP| = {worst:.2e} (< 1e-6), {secs:.2} s (< 5 s)"),
        );
    }

    // 2. T = 0 Lorentzian emission kernels against their closed form.
    {
        let start = Instant::now();
        let (alpha, lambda, omega0) = (1.0, 1.0, 120.0);
        let spectral = SpectralDensity::Lorentzian { alpha, lambda, omega0 };
        let times: Vec<f64> = (0..=400).map(|k| 0.05 * k as f64).collect();
        let mut worst = 0.0_f64;
        let mut deltas = Vec::new();
        for detuning in [0.0, 0.1, 10.0] {
            let params = ChiralQubitParams::from_ratios(100.0, 0.4, omega0 - detuning).unwrap();
            let table = compute_kernels(&BathConfig::new(spectral, 0.0), &params, &times).unwrap();
            for (l, sign) in [(0usize, 0.0), (1, 1.0), (2, -1.0)] {
                let delta = omega0 - (params.omega + sign * params.omega_s);
                deltas.push(delta);
                let exact: Vec<f64> = times.iter().map(|&t| lorentz_emission_re(alpha, lambda, delta, t)).collect();
                let got: Vec<f64> = table.gamma_prime[l].iter().map(|z| z.re).collect();
                let scale = exact.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                worst = worst.max(sup_diff(&got, &exact) / scale);
            }
        }
        deltas.sort_by(f64::total_cmp);
        let secs = start.elapsed().as_secs_f64();
        ledger.record(
            2,
            "closed-form Lorentzian kernel",
            worst < 1e-8 && secs < 10.0,
            format!(
                "max rel err {worst:.2e} (< 1e-8, relative to the kernel's sup over lambda t in [0, 20]) for delta/lambda in {:?}, {secs:.2} s",
                deltas.iter().map(|d| (d * 10.0).round() / 10.0).collect::<Vec<_>>()
            ),
        );
    }

    // 3. Markov limit of the emission kernels at lambda t = 20.
    {
        let mut worst = 0.0_f64;
        let mut alpha2 = 1.0;
        let configs: Vec<(f64, f64)> = std::iter::once((fig2.detuning[0], fig2.temperature[0]))
            .chain(fig3.detuning.iter().flat_map(|&d| fig3.temperature.iter().map(move |&t| (d, t))))
            .collect();
        for &(detuning, temperature) in &configs {
            let params = run::qubit_params(&fig3, 0.4, detuning).unwrap();
            let bath = run::bath_config(&fig3, temperature);
            let SpectralDensity::Lorentzian { alpha, lambda, omega0 } = bath.spectral else { unreachable!() };
            alpha2 = alpha * alpha;
            let table = compute_kernels(&bath, &params, &[0.0, 20.0]).unwrap();
            for (l, sign) in [(0usize, 0.0), (1, 1.0), (2, -1.0)] {
                let w = params.omega + sign * params.omega_s;
                let markov = PI * lorentzian_j(alpha, lambda, omega0, w) * (bose(w, bath.temperature) + 1.0);
                worst = worst.max((table.gamma_prime[l][1].re - markov).abs());
            }
        }
        ledger.record(
            3,
            "Markov limit of Re Gamma'",
            worst < 1e-3 * alpha2,
            format!("max |Re G'(20) - pi J (n+1)| = {worst:.2e} (< {:.0e}) over {} configs", 1e-3 * alpha2, configs.len()),
        );
    }

    // Fig. 3 data, used by 4 and 5.
    let start = Instant::now();
    let fig3_out = run::compute(&fig3).unwrap();
    let fig3_secs = start.elapsed().as_secs_f64();

    // 4. Absorption kernels at T = 0 are exactly zero.
    {
        let mut nonzero = 0usize;
        let mut checked = 0usize;
        for &detuning in &fig3.detuning {
            let params = run::qubit_params(&fig3, 0.4, detuning).unwrap();
            let bath = run::bath_config(&fig3, 0.0);
            let table = compute_kernels(&bath, &params, &fig3.time_grid()).unwrap();
            for g in &table.gamma {
                checked += g.len();
                nonzero += g.iter().filter(|z| z.re.to_bits() != 0 || z.im.to_bits() != 0).count();
            }
        }
        ledger.record(
            4,
            "T = 0 absorption kernels vanish",
            nonzero == 0 && checked > 0,
            format!("{nonzero} of {checked} entries not bitwise +0.0"),
        );
    }

    // 5. Shape of the rates in Fig. 3.
    {
        let rates = |d: &str, t: &str| {
            let rows = csv_rows(csv_file(&fig3_out, &format!("kernels_r0.4_d{d}_T{t}.csv")));
            (column(&rows, 14), column(&rows, 15))
        };
        let (p0, m0) = rates("0.1", "0");
        let (p1, m1) = rates("0.1", "1");
        let crossings = [&p0, &m0, &p1, &m1].map(|v| run::sign_changes(v));
        let amp0 = peak_to_peak(&p0).max(peak_to_peak(&m0));
        let amp1 = peak_to_peak(&p1).max(peak_to_peak(&m1));
        let amp_up = peak_to_peak(&p1) > peak_to_peak(&p0) && peak_to_peak(&m1) > peak_to_peak(&m0);
        let (dp0, dm0) = rates("10", "0");
        let (dp1, dm1) = rates("10", "1");
        let rel = |a: &[f64], b: &[f64]| sup_diff(a, b) / a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let detuned = rel(&dp0, &dp1).max(rel(&dm0, &dm1));
        let pass = crossings.iter().all(|&c| c >= 1) && amp_up && detuned < 0.05 && fig3_secs < 30.0;
        ledger.record(
            5,
            "Fig. 3 rate shapes",
            pass,
            format!(
                "near-resonant sign changes {crossings:?} (>= 1 each); peak-to-peak T=1 {amp1:.4e} vs T=0 {amp0:.4e} (larger for both rates: {amp_up}); detuned max rel T-difference {:.2}% (< 5%); {fig3_secs:.1} s",
                100.0 * detuned
            ),
        );
    }

    // 6. Fig. 2 ordering and revivals.
    let fig2_out = run::compute(&fig2).unwrap();
    for r in trajectory_records(&fig2_out) {
        conservation.absorb_record(&r);
    }
    let fig2_curves: Vec<(f64, Vec<f64>, Vec<f64>)> = fig2
        .delta_ratio
        .iter()
        .map(|&r| {
            let rows = csv_rows(csv_file(&fig2_out, &format!("trajectory_r{r}_d0.1_T1.csv")));
            (r, column(&rows, 0), column(&rows, 1))
        })
        .collect();
    let revival = |p: &[f64]| {
        let mut low = f64::INFINITY;
        p.iter().fold(0.0_f64, |best, &v| {
            low = low.min(v);
            best.max(v - low)
        })
    };
    {
        let means: Vec<f64> = fig2_curves
            .iter()
            .map(|(_, t, p)| {
                let n = t.iter().filter(|&&x| x <= 1.0 + 1e-12).count();
                run::time_average(&t[..n], &p[..n])
            })
            .collect();
        let decreasing = means.windows(2).all(|w| w[1] < w[0]);
        let revivals: Vec<f64> = fig2_curves.iter().map(|(_, _, p)| revival(p)).collect();
        let all_revive = revivals.iter().all(|&a| a > 1e-8);
        ledger.record(
            6,
            "Fig. 2 ordering and revivals",
            decreasing && all_revive,
            format!(
                "mean P on [0,1] for ratios {:?}: {:?} (strictly decreasing: {decreasing}); revival amplitudes {:?} (> 1e-8)",
                fig2.delta_ratio,
                means.iter().map(|m| format!("{m:.8}")).collect::<Vec<_>>(),
                revivals.iter().map(|a| format!("{a:.2e}")).collect::<Vec<_>>()
            ),
        );
    }

    // 7. Secular approximation and the transcription of the non-secular term.
    {
        let mut worst = 0.0_f64;
        for &ratio in &fig2.delta_ratio {
            let (params, bath, times) = fig2_setup(&fig2, ratio);
            let opts = run::propagation_options(&fig2);
            let (schedule, _) = build_schedule(&bath, &params, &times, fig2.t_max, &opts).unwrap();
            let sec = propagate_with(&DensityMatrix2::up(), &schedule, params.omega_s, &times, &opts).unwrap();
            let full_opts = chirality_core::PropagationOptions { include_nonsecular: true, ..opts };
            let full = propagate_with(&DensityMatrix2::up(), &schedule, params.omega_s, &times, &full_opts).unwrap();
            worst = worst.max(sup_diff(&sec.polarization, &full.polarization));
            conservation.absorb(&full);
        }
        let mut runner = TestRunner::new(PtConfig { cases: 512, ..PtConfig::default() });
        let c = || -1.0..1.0f64;
        let strategy = (
            (c(), c(), c()),
            proptest::array::uniform6(c()),
            proptest::array::uniform6(c()),
            -0.99..0.99f64,
        );
        let max_herm = Cell::new(0.0_f64);
        let max_trace = Cell::new(0.0_f64);
        let checked = runner.run(&strategy, |((a, x, y), g, gp, ratio)| {
            let off = Complex64::new(x, y);
            let rho = Op2::new(Complex64::new(0.5 + a, 0.0), off, off.conj(), Complex64::new(0.5 - a, 0.0));
            let gamma = [0, 1, 2].map(|k| Complex64::new(g[2 * k], g[2 * k + 1]));
            let gamma_prime = [0, 1, 2].map(|k| Complex64::new(gp[2 * k], gp[2 * k + 1]));
            let params = ChiralQubitParams::from_ratios(100.0, ratio, 119.9).unwrap();
            let out = nonsecular_term(&rho, &gamma, &gamma_prime, &Weights::from_params(&params));
            let herm = (out - out.adjoint()).iter().fold(0.0_f64, |m, z| m.max(z.norm()));
            let tr = (out[(0, 0)] + out[(1, 1)]).norm();
            max_herm.set(max_herm.get().max(herm));
            max_trace.set(max_trace.get().max(tr));
            prop_assert!(herm <= 1e-10 && tr <= 1e-10);
            Ok(())
        });
        let (max_herm, max_trace) = (max_herm.get(), max_trace.get());
        let pass = worst <= 0.05 && checked.is_ok();
        ledger.record(
            7,
            "secular validity and non-secular term",
            pass,
            format!(
                "sup |P_sec - P_nonsec| = {worst:.2e} (<= 0.05); 512 random inputs: max |X - X^+| = {max_herm:.1e}, max |tr X| = {max_trace:.1e} (<= 1e-10)"
            ),
        );
    }

    // 8. Entropy range and pointer states.
    {
        let fig5a = run::compute(&defaults(Scenario::Fig5a)).unwrap();
        let fig5b = run::compute(&defaults(Scenario::Fig5b)).unwrap();
        let fig6_cfg = defaults(Scenario::Fig6);
        let fig6 = run::compute(&fig6_cfg).unwrap();
        for out in [&fig5a, &fig5b] {
            for r in trajectory_records(out) {
                conservation.absorb_record(&r);
            }
        }

        // Entropy recomputed from the written density matrices.
        let (mut e_min, mut e_max, mut e_mismatch, mut rows_checked) = (f64::INFINITY, 0.0_f64, 0.0_f64, 0usize);
        for out in [&fig5a, &fig5b] {
            for f in out.files.iter().filter(|f| f.name.starts_with("entropy_") && f.name.ends_with(".csv")) {
                for r in csv_rows(&f.contents) {
                    let (e, _) = entropy_of(r[3], r[4], Complex64::new(r[5], r[6]));
                    e_min = e_min.min(r[2]);
                    e_max = e_max.max(r[2]);
                    e_mismatch = e_mismatch.max((e - r[2]).abs());
                    rows_checked += 1;
                }
            }
        }
        let in_range = e_min >= 0.0 && e_max <= LN_2 && e_mismatch < 1e-9;

        let theta_p = |out: &RunOutput| -> Vec<(f64, f64)> {
            out.points
                .iter()
                .map(|p| (p["detuning"].as_f64().unwrap(), p["pointer"]["theta_p"].as_f64().unwrap()))
                .collect()
        };
        let fig5a_theta = theta_p(&fig5a);
        let fig5a_ok = fig5a_theta.iter().all(|&(_, th)| th == PI);
        let step = PI / (fig6_cfg.theta_points - 1) as f64;
        let fig6_theta = theta_p(&fig6);
        let far = fig6_theta.iter().find(|(d, _)| *d == 10.0).unwrap().1;
        let fig6_ok = (far - PI).abs() <= step + 1e-12;

        let s0 = column(&csv_rows(csv_file(&fig5a, "scan_r0.9_d0.1_T0.csv")), 2);
        let s1 = column(&csv_rows(csv_file(&fig5b, "scan_r0.9_d0.1_T1.csv")), 2);
        let warmer = s0.iter().zip(&s1).filter(|(a, b)| b >= a).count();
        let mean0 = s0.iter().sum::<f64>() / s0.len() as f64;
        let mean1 = s1.iter().sum::<f64>() / s1.len() as f64;
        let thermal_ok = warmer == s0.len() && mean1 > mean0;

        let fig6_all: Vec<String> = fig6_theta.iter().map(|(d, th)| format!("{d}:{:.4}pi", th / PI)).collect();
        ledger.record(
            8,
            "entropy range and pointer states",
            in_range && fig5a_ok && fig6_ok && thermal_ok,
            format!(
                "E in [{e_min:.2e}, {e_max:.4}] (within [0, ln2]), recomputed from rho to {e_mismatch:.1e} over {rows_checked} rows; \
                 fig5a theta_p = {:?} (pi); fig6 theta_p by detuning {fig6_all:?} (d=10 within {step:.4} of pi); \
                 mean E T=1 >= T=0 at {warmer}/{} thetas, averages {mean1:.4e} vs {mean0:.4e}",
                fig5a_theta.iter().map(|(d, th)| format!("{d}:{:.4}pi", th / PI)).collect::<Vec<_>>(),
                s0.len()
            ),
        );

        // Scan states are not part of the manifests; check them directly.
        let params = run::qubit_params(&fig6_cfg, 0.9, 10.0).unwrap();
        let bath = run::bath_config(&fig6_cfg, 1.0);
        let times = fig6_cfg.time_grid();
        let opts = run::propagation_options(&fig6_cfg);
        let (schedule, _) = build_schedule(&bath, &params, &times, fig6_cfg.t_max, &opts).unwrap();
        for th in theta_grid(fig6_cfg.theta_points) {
            let traj = propagate_with(&bloch_to_state(&BlochState::new(th, 0.0)), &schedule, params.omega_s, &times, &opts).unwrap();
            conservation.absorb(&traj);
        }
    }

    // 9. Exact dynamics of a discretized bath against TCL2.
    {
        let start = Instant::now();
        let alpha = 0.1f64.sqrt();
        let omega_s = 100.0;
        let times: Vec<f64> = (0..=100).map(|k| 0.005 * k as f64).collect();
        let opts = chirality_core::PropagationOptions::default();
        let mut continuum = 0.0_f64;
        let mut lines = Vec::new();
        for ratio in [0.4, 0.9] {
            let spectral = SpectralDensity::Lorentzian { alpha, lambda: 1.0, omega0: 120.0 };
            let params = ChiralQubitParams::from_ratios(omega_s, ratio, 119.9).unwrap();
            let modes = oracle::discretize(&spectral, 4, oracle::default_window(&spectral), 2).unwrap();
            let exact = oracle::exact_evolve(&params, &modes, &times, InitialState::DressedUp).unwrap();
            let (schedule, _) = build_schedule(&BathConfig::new(spectral, 0.0), &params, &times, 0.5, &opts).unwrap();
            let tcl = propagate_with(&DensityMatrix2::up(), &schedule, omega_s, &times, &opts).unwrap();
            let d = sup_diff(&exact.polarization, &tcl.polarization);
            continuum = continuum.max(d);
            lines.push(format!("ratio {ratio}: {d:.1e}"));
        }

        // Same modes on both sides, centred so the emission channel is resonant:
        // the discrepancy must be small against the decay itself, and the
        // linear-weight alternative must not fit.
        let mut certified = true;
        let mut cert = Vec::new();
        for ratio in [0.4, 0.9] {
            let spectral = SpectralDensity::Lorentzian { alpha, lambda: 1.0, omega0: 219.9 };
            let params = ChiralQubitParams::from_ratios(omega_s, ratio, 119.9).unwrap();
            let modes = oracle::discretize(&spectral, 4, oracle::default_window(&spectral), 2).unwrap();
            let exact = oracle::exact_evolve(&params, &modes, &times, InitialState::DressedUp).unwrap();
            let grid = chirality_core::dynamics::kernel_grid(&times, 0.5, 1e-3);
            let table = oracle::discrete_kernels(&params, &modes, &grid);
            let squared = RateSchedule::from_kernels(&table, &params).unwrap();
            let p_sq = propagate_with(&DensityMatrix2::up(), &squared, omega_s, &times, &opts).unwrap().polarization;
            let linear = linear_weight_schedule(&table, &params);
            let p_lin = propagate_with(&DensityMatrix2::up(), &linear, omega_s, &times, &opts).unwrap().polarization;
            let decay = 1.0 - exact.polarization.iter().cloned().fold(f64::INFINITY, f64::min);
            let (d_sq, d_lin) = (sup_diff(&exact.polarization, &p_sq), sup_diff(&exact.polarization, &p_lin));
            certified &= d_sq < 0.05 * decay && d_lin > 10.0 * d_sq;
            cert.push(format!("ratio {ratio}: squared {d_sq:.1e}, linear {d_lin:.1e}, decay {decay:.1e}"));
        }
        let secs = start.elapsed().as_secs_f64();
        ledger.record(
            9,
            "oracle equivalence (N=4, n_max=2, T=0)",
            continuum < 5e-3 && certified && secs < 120.0,
            format!(
                "continuum TCL2 vs exact sup |dP| [{}] (< 5e-3); same-mode weight check [{}] (squared < 5% of decay, linear > 10x squared); {secs:.1} s",
                lines.join(", "),
                cert.join("; ")
            ),
        );
    }

    // 10. Microscopic trimer.
    {
        let j = 1.0;
        let levels0 = microscopic::diagonalize(&TrimerParams::isotropic(j, 0.0)).unwrap().eigenvalues;
        let ours0 = trimer_levels(j, 0.0);
        let gap = levels0[4] - levels0[3];
        let gap_ok = ((gap - 1.5 * j) / (1.5 * j)).abs() < 1e-12;
        let ground4 = (levels0[3] - levels0[0]).abs() < 1e-12 && levels0[4] - levels0[3] > 0.1;
        let spectra_agree = sup_diff(&levels0, &ours0) < 1e-12;

        let d = 0.1 * j;
        let eff = microscopic::derive_effective(&TrimerParams::isotropic(j, d)).unwrap();
        let (proj, chir) = doublet_projection(j, d);
        let ws = (proj[(0, 0)] - proj[(1, 1)]).re;
        let off = proj[(0, 1)].norm().max(proj[(1, 0)].norm());
        let proj_ok = off < 1e-10 && (ws - eff.omega_so).abs() < 1e-12 && chir && eff.off_diagonal < 1e-10;

        let fig1 = run::compute(&defaults(Scenario::Fig1)).unwrap();
        let levels = column(&csv_rows(csv_file(&fig1, "spectrum_dj0.1.csv")), 1);
        let levels01 = trimer_levels(j, d);
        let csv_ok = levels.len() == 8 && sup_diff(&levels, &levels01) < 1e-12;
        ledger.record(
            10,
            "microscopic trimer",
            gap_ok && ground4 && spectra_agree && proj_ok && csv_ok,
            format!(
                "D=0 gap {gap:.15} (3J/2), ground multiplet 4-fold: {ground4}; D/J=0.1 doublet projection off-diagonal {off:.1e}, \
                 splitting {ws:.12} vs library {:.12}; level CSV has {} rows matching an independent diagonalization: {csv_ok}",
                eff.omega_so,
                levels.len()
            ),
        );
    }

    // 11. Cavity-filtered bath suppresses revivals.
    {
        let fig4 = run::compute(&defaults(Scenario::Fig4)).unwrap();
        for r in trajectory_records(&fig4) {
            conservation.absorb_record(&r);
        }
        let rows = csv_rows(csv_file(&fig4, "trajectory_r0.4_d0.1_T1.csv"));
        let a4 = revival(&column(&rows, 1));
        let baseline: BTreeMap<String, f64> = fig2_curves.iter().map(|(r, _, p)| (r.to_string(), revival(p))).collect();
        let smaller = baseline.values().all(|&b| a4 < b);
        ledger.record(
            11,
            "Fig. 4 suppressed revivals",
            smaller,
            format!("fig4 revival amplitude {a4:.2e} vs fig2 baseline {baseline:?}"),
        );
    }

    // 12. Conservation over every propagated state.
    {
        for name in [Scenario::Custom] {
            let out = run::compute(&defaults(name)).unwrap();
            for r in trajectory_records(&out) {
                conservation.absorb_record(&r);
            }
        }
        let c = &conservation;
        let pass = c.trace <= 1e-10 && c.hermiticity <= 1e-12 && c.min_eigenvalue >= -1e-4;
        ledger.record(
            12,
            "conservation suite",
            pass,
            format!(
                "{} trajectories: max trace error {:.1e} (<= 1e-10), max Hermiticity error {:.1e} (<= 1e-12), min eigenvalue {:.1e} (>= -1e-4), {} positivity violations reported",
                c.trajectories, c.trace, c.hermiticity, c.min_eigenvalue, c.violations
            ),
        );
    }

    // 13. Byte-identical reruns through the binary.
    {
        let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
        let mut ok = true;
        for d in &dirs {
            let status = Command::new(env!("CARGO_BIN_EXE_chirality"))
                .args(["run", "fig2", "--out"])
                .arg(d.path())
                .output()
                .unwrap();
            ok &= status.status.success();
        }
        let listing = |d: &tempfile::TempDir| -> BTreeMap<String, Vec<u8>> {
            std::fs::read_dir(d.path())
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
                })
                .collect()
        };
        let (a, b) = (listing(&dirs[0]), listing(&dirs[1]));
        let csvs = a.keys().filter(|k| k.ends_with(".csv")).count();
        let same = a == b;
        ledger.record(
            13,
            "determinism of run fig2",
            ok && same && csvs == fig2.delta_ratio.len(),
            format!("{} files ({csvs} CSV) per run, byte-identical: {same}", a.len()),
        );
    }

    let failed: Vec<String> = ledger.rows.iter().filter(|r| !r.2).map(|r| format!("{} {}", r.0, r.1)).collect();
    println!("{} of {} criteria pass", ledger.rows.len() - failed.len(), ledger.rows.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

/// Rates with `delta` in place of `delta^2`.
fn linear_weight_schedule(table: &KernelTable, params: &ChiralQubitParams) -> RateSchedule {
    let (d0, dp, dm) = (params.delta_zero, params.delta_plus, params.delta_minus);
    let n = table.times.len();
    let (mut z, mut p, mut m) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for k in 0..n {
        let g = |l: usize| table.gamma[l][k].re;
        let gp = |l: usize| table.gamma_prime[l][k].re;
        z.push(2.0 * d0 * (g(0) + gp(0)));
        p.push(2.0 * dp * g(1) + 2.0 * dm * gp(2));
        m.push(2.0 * dm * g(2) + 2.0 * dp * gp(1));
    }
    RateSchedule::from_rates(&table.times, &z, &p, &m).unwrap()
}

type CM = DMatrix<Complex64>;

/// Spin-1/2 operators on site `i` of three, built from Pauli matrices.
fn site_spin(i: usize) -> [CM; 3] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let pauli = [
        CM::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        CM::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        CM::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
    ];
    pauli.map(|p| {
        let mut out = CM::identity(1, 1);
        for k in 0..3 {
            let f = if k == i { p.clone() * c(0.5, 0.0) } else { CM::identity(2, 2) };
            out = out.kronecker(&f);
        }
        out
    })
}

fn trimer_hamiltonian(j: f64, d: f64) -> CM {
    let s = [site_spin(0), site_spin(1), site_spin(2)];
    let mut h = CM::zeros(8, 8);
    for i in 0..3 {
        let k = (i + 1) % 3;
        for a in 0..3 {
            h += &s[i][a] * &s[k][a] * Complex64::new(j, 0.0);
        }
        // z-component of s_i x s_k
        h += (&s[i][0] * &s[k][1] - &s[i][1] * &s[k][0]) * Complex64::new(d, 0.0);
    }
    h
}

fn trimer_levels(j: f64, d: f64) -> Vec<f64> {
    let mut v: Vec<f64> = trimer_hamiltonian(j, d).symmetric_eigen().eigenvalues.iter().cloned().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `H` projected on the `S_z = 1/2` eigenstates of the chirality operator,
/// ordered `(chi = +1, chi = -1)`, and whether those eigenvalues are +-1.
fn doublet_projection(j: f64, d: f64) -> (CM, bool) {
    let s = [site_spin(0), site_spin(1), site_spin(2)];
    let cross = |a: &[CM; 3], b: &[CM; 3]| {
        [
            &a[1] * &b[2] - &a[2] * &b[1],
            &a[2] * &b[0] - &a[0] * &b[2],
            &a[0] * &b[1] - &a[1] * &b[0],
        ]
    };
    let x = cross(&s[1], &s[2]);
    let cz = (&s[0][0] * &x[0] + &s[0][1] * &x[1] + &s[0][2] * &x[2]) * Complex64::new(4.0 / 3f64.sqrt(), 0.0);
    let sz = &s[0][2] + &s[1][2] + &s[2][2];
    // Restrict to S_z = +1/2 and diagonalize C_z there.
    let idx: Vec<usize> = (0..8).filter(|&k| (sz[(k, k)].re - 0.5).abs() < 1e-12).collect();
    let block = CM::from_fn(3, 3, |a, b| cz[(idx[a], idx[b])]);
    let eig = block.symmetric_eigen();
    let pick = |target: f64| {
        let k = (0..3).min_by(|&a, &b| (eig.eigenvalues[a] - target).abs().total_cmp(&(eig.eigenvalues[b] - target).abs())).unwrap();
        let mut v = nalgebra::DVector::<Complex64>::zeros(8);
        for (r, &i) in idx.iter().enumerate() {
            v[i] = eig.eigenvectors[(r, k)];
        }
        (v, eig.eigenvalues[k])
    };
    let (plus, ep) = pick(1.0);
    let (minus, em) = pick(-1.0);
    let h = trimer_hamiltonian(j, d);
    let basis = [plus, minus];
    let proj = CM::from_fn(2, 2, |a, b| (basis[a].adjoint() * &h * &basis[b])[(0, 0)]);
    (proj, (ep - 1.0).abs() < 1e-12 && (em + 1.0).abs() < 1e-12)
}
