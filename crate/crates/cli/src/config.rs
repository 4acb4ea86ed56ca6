//! Key-value scenario configuration.
//!
//! A config file is a list of `key = value` lines; `#` starts a comment. Lists
//! are comma separated. Every key has a per-scenario default, so a file only
//! needs `scenario = ...` plus whatever it changes. `--set key=value` on the
//! command line is applied after the file.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Scenario {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
    Fig6,
    Custom,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::Fig1,
        Scenario::Fig2,
        Scenario::Fig3,
        Scenario::Fig4,
        Scenario::Fig5a,
        Scenario::Fig5b,
        Scenario::Fig6,
        Scenario::Custom,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Scenario::Fig1 => "fig1",
            Scenario::Fig2 => "fig2",
            Scenario::Fig3 => "fig3",
            Scenario::Fig4 => "fig4",
            Scenario::Fig5a => "fig5a",
            Scenario::Fig5b => "fig5b",
            Scenario::Fig6 => "fig6",
            Scenario::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|sc| sc.id() == s)
    }

    pub fn summary(self) -> &'static str {
        match self {
            Scenario::Fig1 => "trimer levels and the chirality-doublet splitting for D/J = 0 and 0.1",
            Scenario::Fig2 => "polarization P(t) for a sweep of Delta_so/omega_s at T = 1",
            Scenario::Fig3 => "memory kernels and rates gamma_+-(t) near resonance and detuned, T = 0 and 1",
            Scenario::Fig4 => "polarization for the cavity-filtered bath (gamma = 0.1, g = 0.01 omega0)",
            Scenario::Fig5a => "entropy E(t) and pointer scan over theta at T = 0",
            Scenario::Fig5b => "entropy E(t) and pointer scan over theta at T = 1",
            Scenario::Fig6 => "pointer angle theta_p against detuning at T = 1",
            Scenario::Custom => "single or swept trajectories with every key user supplied",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseUnit {
    Lambda,
    Omega0,
}

impl BaseUnit {
    pub fn id(self) -> &'static str {
        match self {
            BaseUnit::Lambda => "lambda",
            BaseUnit::Omega0 => "omega0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralKind {
    Lorentzian,
    Ohmic,
    Cavity,
}

impl SpectralKind {
    pub fn id(self) -> &'static str {
        match self {
            SpectralKind::Lorentzian => "lorentzian",
            SpectralKind::Ohmic => "ohmic",
            SpectralKind::Cavity => "cavity",
        }
    }
}

/// Fully resolved scenario settings. Frequencies and times are in the base
/// unit; temperatures are multiples of `temperature_scale` base units.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub base_unit: BaseUnit,
    pub spectral: SpectralKind,
    pub omega_s: f64,
    /// Lorentzian center or cavity mode frequency.
    pub omega0: f64,
    /// `omega0 - omega`, one run per value.
    pub detuning: Vec<f64>,
    /// `Delta_so / omega_s`, one run per value.
    pub delta_ratio: Vec<f64>,
    pub temperature: Vec<f64>,
    pub temperature_scale: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub cavity_gamma: f64,
    pub cavity_g: f64,
    pub ohmic_gamma: f64,
    pub ohmic_cutoff: f64,
    pub exchange: f64,
    pub d_over_j: Vec<f64>,
    pub t_max: f64,
    pub dt: f64,
    pub theta_points: usize,
    pub phi_points: usize,
    pub pointer_measure: String,
    /// Initial angles (fractions of pi) for the entropy curves.
    pub curve_thetas: Vec<f64>,
    pub nonsecular: bool,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub kernel_resolution: f64,
    pub quad_abs_tol: f64,
    pub quad_rel_tol: f64,
    pub window_multiplier: f64,
    pub output_dir: String,
    pub svg: bool,
}

/// One problem with a config, anchored to where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub origin: Origin,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Origin {
    Line(usize),
    Override(usize),
    Config,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.origin {
            Origin::Line(n) => write!(f, "line {n}: {}", self.message),
            Origin::Override(n) => write!(f, "--set #{n}: {}", self.message),
            Origin::Config => write!(f, "config: {}", self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
pub struct ConfigError(pub Vec<Diagnostic>);

const KEYS: &[&str] = &[
    "scenario",
    "base_unit",
    "spectral",
    "omega_s",
    "omega0",
    "detuning",
    "delta_ratio",
    "temperature",
    "temperature_scale",
    "alpha",
    "lambda",
    "cavity_gamma",
    "cavity_g",
    "ohmic_gamma",
    "ohmic_cutoff",
    "exchange",
    "d_over_j",
    "t_max",
    "dt",
    "theta_points",
    "phi_points",
    "pointer_measure",
    "curve_thetas",
    "nonsecular",
    "abs_tol",
    "rel_tol",
    "kernel_resolution",
    "quad_abs_tol",
    "quad_rel_tol",
    "window_multiplier",
    "output_dir",
    "svg",
];

pub fn known_keys() -> &'static [&'static str] {
    KEYS
}

/// Defaults for `scenario`, as `key = value` text.
pub fn defaults(scenario: Scenario) -> BTreeMap<&'static str, String> {
    let mut m: BTreeMap<&'static str, String> = [
        ("base_unit", "lambda"),
        ("spectral", "lorentzian"),
        ("omega_s", "100"),
        ("omega0", "120"),
        ("detuning", "0.1"),
        ("delta_ratio", "0.4"),
        ("temperature", "1"),
        ("temperature_scale", "20"),
        ("alpha", "1"),
        ("lambda", "1"),
        ("cavity_gamma", "0.1"),
        ("cavity_g", "0.01"),
        ("ohmic_gamma", "0.01"),
        ("ohmic_cutoff", "10"),
        ("exchange", "1"),
        ("d_over_j", "0.1"),
        ("t_max", "2"),
        ("dt", "0.01"),
        ("theta_points", "61"),
        ("phi_points", "1"),
        ("pointer_measure", "mean"),
        ("curve_thetas", "0, 0.25, 0.5, 0.75, 1"),
        ("nonsecular", "false"),
        ("abs_tol", "1e-11"),
        ("rel_tol", "1e-10"),
        ("kernel_resolution", "0.1"),
        ("quad_abs_tol", "1e-12"),
        ("quad_rel_tol", "1e-11"),
        ("window_multiplier", "50"),
        ("svg", "false"),
    ]
    .into_iter()
    .map(|(k, v)| (k, v.to_string()))
    .collect();
    let mut set = |k: &'static str, v: &str| {
        m.insert(k, v.to_string());
    };
    match scenario {
        Scenario::Fig1 => set("d_over_j", "0, 0.1"),
        Scenario::Fig2 => set("delta_ratio", "0.1, 0.4, 0.7, 0.9"),
        Scenario::Fig3 => {
            set("detuning", "0.1, 10");
            set("temperature", "0, 1");
        }
        Scenario::Fig4 => {
            set("base_unit", "omega0");
            set("spectral", "cavity");
            set("omega0", "1");
        }
        Scenario::Fig5a | Scenario::Fig5b => {
            set("delta_ratio", "0.9");
            set("detuning", "0.1, 10");
            set("temperature", if scenario == Scenario::Fig5a { "0" } else { "1" });
        }
        Scenario::Fig6 => {
            set("delta_ratio", "0.9");
            set("detuning", "0.1, 0.5, 1, 2, 5, 10");
        }
        Scenario::Custom => {}
    }
    m.insert("output_dir", format!("out/{}", scenario.id()));
    m
}

struct Entry {
    value: String,
    origin: Origin,
}

fn parse_lines(text: &str, origin: impl Fn(usize) -> Origin, out: &mut BTreeMap<String, Entry>, diags: &mut Vec<Diagnostic>) {
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let here = origin(i + 1);
        let Some((k, v)) = line.split_once('=') else {
            diags.push(Diagnostic {
                origin: here,
                message: format!("expected `key = value`, found `{line}`"),
            });
            continue;
        };
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            diags.push(Diagnostic {
                origin: here,
                message: format!("unknown key `{k}`"),
            });
            continue;
        }
        if let Some(prev) = out.get(k) {
            if matches!(prev.origin, Origin::Line(_)) && matches!(here, Origin::Line(_)) {
                let message = if prev.value == v {
                    format!("`{k}` given twice")
                } else {
                    format!("`{k}` contradicts an earlier value `{}`", prev.value)
                };
                diags.push(Diagnostic { origin: here, message });
                continue;
            }
        }
        out.insert(k.to_string(), Entry { value: v.to_string(), origin: here });
    }
}

/// Parses a config file (possibly empty) plus overrides. `scenario` names a
/// built-in scenario when the file does not.
pub fn resolve(text: &str, scenario: Option<Scenario>, overrides: &[String]) -> Result<ScenarioConfig, ConfigError> {
    let mut diags = Vec::new();
    let mut entries = BTreeMap::new();
    parse_lines(text, Origin::Line, &mut entries, &mut diags);
    for (n, o) in overrides.iter().enumerate() {
        let mut one = BTreeMap::new();
        parse_lines(o, |_| Origin::Override(n + 1), &mut one, &mut diags);
        entries.extend(one);
    }

    let scenario = match entries.get("scenario") {
        Some(e) => match Scenario::parse(&e.value) {
            Some(s) => {
                if let Some(named) = scenario {
                    if named != s {
                        diags.push(Diagnostic {
                            origin: e.origin.clone(),
                            message: format!("scenario `{}` contradicts `{}`", s.id(), named.id()),
                        });
                    }
                }
                s
            }
            None => {
                diags.push(Diagnostic {
                    origin: e.origin.clone(),
                    message: format!("unknown scenario `{}`", e.value),
                });
                return Err(ConfigError(diags));
            }
        },
        None => match scenario {
            Some(s) => s,
            None => {
                diags.push(Diagnostic {
                    origin: Origin::Config,
                    message: "missing `scenario` key".into(),
                });
                return Err(ConfigError(diags));
            }
        },
    };

    let defaults = defaults(scenario);
    let mut r = Reader { entries: &entries, defaults: &defaults, diags: &mut diags };
    let base_unit = r.choice("base_unit", &[("lambda", BaseUnit::Lambda), ("omega0", BaseUnit::Omega0)]);
    let spectral = r.choice(
        "spectral",
        &[
            ("lorentzian", SpectralKind::Lorentzian),
            ("ohmic", SpectralKind::Ohmic),
            ("cavity", SpectralKind::Cavity),
        ],
    );
    let cfg = ScenarioConfig {
        scenario,
        base_unit: base_unit.unwrap_or(BaseUnit::Lambda),
        spectral: spectral.unwrap_or(SpectralKind::Lorentzian),
        omega_s: r.positive("omega_s"),
        omega0: r.positive("omega0"),
        detuning: r.list("detuning", |_| None),
        delta_ratio: r.list("delta_ratio", |v| (!(-1.0..=1.0).contains(&v)).then_some("must lie in [-1, 1]")),
        temperature: r.list("temperature", |v| (v < 0.0).then_some("temperature must be >= 0")),
        temperature_scale: r.positive("temperature_scale"),
        alpha: r.nonnegative("alpha"),
        lambda: r.positive("lambda"),
        cavity_gamma: r.positive("cavity_gamma"),
        cavity_g: r.nonnegative("cavity_g"),
        ohmic_gamma: r.nonnegative("ohmic_gamma"),
        ohmic_cutoff: r.positive("ohmic_cutoff"),
        exchange: r.positive("exchange"),
        d_over_j: r.list("d_over_j", |_| None),
        t_max: r.positive("t_max"),
        dt: r.positive("dt"),
        theta_points: r.count("theta_points"),
        phi_points: r.count("phi_points"),
        pointer_measure: r.string("pointer_measure"),
        curve_thetas: r.list("curve_thetas", |v| (!(0.0..=1.0).contains(&v)).then_some("must lie in [0, 1]")),
        nonsecular: r.flag("nonsecular"),
        abs_tol: r.positive("abs_tol"),
        rel_tol: r.positive("rel_tol"),
        kernel_resolution: r.positive("kernel_resolution"),
        quad_abs_tol: r.positive("quad_abs_tol"),
        quad_rel_tol: r.positive("quad_rel_tol"),
        window_multiplier: r.positive("window_multiplier"),
        output_dir: r.string("output_dir"),
        svg: r.flag("svg"),
    };

    let unit_origin = r.origin("base_unit");
    let need = match cfg.spectral {
        SpectralKind::Lorentzian => Some(BaseUnit::Lambda),
        SpectralKind::Cavity => Some(BaseUnit::Omega0),
        SpectralKind::Ohmic => None,
    };
    if let (Some(need), Some(have)) = (need, base_unit) {
        if need != have {
            r.diags.push(Diagnostic {
                origin: unit_origin,
                message: format!(
                    "base unit `{}` contradicts the {} bath, which is measured in `{}`",
                    have.id(),
                    cfg.spectral.id(),
                    need.id()
                ),
            });
        }
    }
    if cfg.base_unit == BaseUnit::Lambda && cfg.spectral == SpectralKind::Lorentzian && cfg.lambda != 1.0 {
        r.diags.push(Diagnostic {
            origin: r.origin("lambda"),
            message: "lambda is the base unit here and must be 1".into(),
        });
    }
    if cfg.dt > cfg.t_max {
        r.diags.push(Diagnostic {
            origin: r.origin("dt"),
            message: "dt exceeds t_max".into(),
        });
    }
    if chirality_core::PointerMeasure::parse(&cfg.pointer_measure).is_none() {
        r.diags.push(Diagnostic {
            origin: r.origin("pointer_measure"),
            message: format!("pointer_measure must be mean, max or final, found `{}`", cfg.pointer_measure),
        });
    }
    if diags.is_empty() {
        Ok(cfg)
    } else {
        diags.sort_by(|a, b| a.origin.cmp(&b.origin));
        Err(ConfigError(diags))
    }
}

struct Reader<'a> {
    entries: &'a BTreeMap<String, Entry>,
    defaults: &'a BTreeMap<&'static str, String>,
    diags: &'a mut Vec<Diagnostic>,
}

impl Reader<'_> {
    fn raw(&self, key: &str) -> (String, Origin) {
        match self.entries.get(key) {
            Some(e) => (e.value.clone(), e.origin.clone()),
            None => (self.defaults.get(key).cloned().unwrap_or_default(), Origin::Config),
        }
    }

    fn origin(&self, key: &str) -> Origin {
        self.raw(key).1
    }

    fn fail(&mut self, origin: Origin, key: &str, message: impl fmt::Display) {
        self.diags.push(Diagnostic {
            origin,
            message: format!("`{key}`: {message}"),
        });
    }

    fn number(&mut self, key: &str) -> f64 {
        let (v, o) = self.raw(key);
        match v.parse::<f64>() {
            Ok(x) if x.is_finite() => x,
            _ => {
                self.fail(o, key, format!("expected a finite number, found `{v}`"));
                f64::NAN
            }
        }
    }

    fn positive(&mut self, key: &str) -> f64 {
        let x = self.number(key);
        if !x.is_nan() && x <= 0.0 {
            self.fail(self.origin(key), key, "must be positive");
        }
        x
    }

    fn nonnegative(&mut self, key: &str) -> f64 {
        let x = self.number(key);
        if !x.is_nan() && x < 0.0 {
            self.fail(self.origin(key), key, "must be >= 0");
        }
        x
    }

    fn count(&mut self, key: &str) -> usize {
        let (v, o) = self.raw(key);
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => n,
            _ => {
                self.fail(o, key, format!("expected a positive integer, found `{v}`"));
                1
            }
        }
    }

    fn flag(&mut self, key: &str) -> bool {
        let (v, o) = self.raw(key);
        match v.as_str() {
            "true" => true,
            "false" => false,
            _ => {
                self.fail(o, key, format!("expected true or false, found `{v}`"));
                false
            }
        }
    }

    fn string(&mut self, key: &str) -> String {
        let (v, o) = self.raw(key);
        if v.is_empty() {
            self.fail(o, key, "must not be empty");
        }
        v
    }

    fn choice<T: Copy>(&mut self, key: &str, options: &[(&str, T)]) -> Option<T> {
        let (v, o) = self.raw(key);
        let found = options.iter().find(|(name, _)| *name == v).map(|(_, t)| *t);
        if found.is_none() {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            self.fail(o, key, format!("expected one of {}, found `{v}`", names.join(", ")));
        }
        found
    }

    fn list(&mut self, key: &str, check: impl Fn(f64) -> Option<&'static str>) -> Vec<f64> {
        let (v, o) = self.raw(key);
        let mut out = Vec::new();
        for item in v.split(',').map(str::trim) {
            match item.parse::<f64>() {
                Ok(x) if x.is_finite() => {
                    if let Some(msg) = check(x) {
                        self.fail(o.clone(), key, format!("{x}: {msg}"));
                    }
                    out.push(x);
                }
                _ => self.fail(o.clone(), key, format!("expected a number, found `{item}`")),
            }
        }
        out
    }
}

/// Shortest round-trip text for `x`, without a trailing `.0`.
pub fn fmt_num(x: f64) -> String {
    let s = format!("{x:?}");
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(", ")
}

impl ScenarioConfig {
    /// Canonical `key = value` dump; parsing it back gives the same config.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("scenario", self.scenario.id().into()),
            ("base_unit", self.base_unit.id().into()),
            ("spectral", self.spectral.id().into()),
            ("omega_s", fmt_num(self.omega_s)),
            ("omega0", fmt_num(self.omega0)),
            ("detuning", fmt_list(&self.detuning)),
            ("delta_ratio", fmt_list(&self.delta_ratio)),
            ("temperature", fmt_list(&self.temperature)),
            ("temperature_scale", fmt_num(self.temperature_scale)),
            ("alpha", fmt_num(self.alpha)),
            ("lambda", fmt_num(self.lambda)),
            ("cavity_gamma", fmt_num(self.cavity_gamma)),
            ("cavity_g", fmt_num(self.cavity_g)),
            ("ohmic_gamma", fmt_num(self.ohmic_gamma)),
            ("ohmic_cutoff", fmt_num(self.ohmic_cutoff)),
            ("exchange", fmt_num(self.exchange)),
            ("d_over_j", fmt_list(&self.d_over_j)),
            ("t_max", fmt_num(self.t_max)),
            ("dt", fmt_num(self.dt)),
            ("theta_points", self.theta_points.to_string()),
            ("phi_points", self.phi_points.to_string()),
            ("pointer_measure", self.pointer_measure.clone()),
            ("curve_thetas", fmt_list(&self.curve_thetas)),
            ("nonsecular", self.nonsecular.to_string()),
            ("abs_tol", fmt_num(self.abs_tol)),
            ("rel_tol", fmt_num(self.rel_tol)),
            ("kernel_resolution", fmt_num(self.kernel_resolution)),
            ("quad_abs_tol", fmt_num(self.quad_abs_tol)),
            ("quad_rel_tol", fmt_num(self.quad_rel_tol)),
            ("window_multiplier", fmt_num(self.window_multiplier)),
            ("output_dir", self.output_dir.clone()),
            ("svg", self.svg.to_string()),
        ]
    }

    pub fn to_text(&self) -> String {
        self.to_pairs().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Output time grid `0, dt, ..., t_max` (the last point is exactly `t_max`).
    pub fn time_grid(&self) -> Vec<f64> {
        let n = (self.t_max / self.dt).round().max(1.0) as usize;
        (0..=n).map(|k| self.t_max * k as f64 / n as f64).collect()
    }
}
