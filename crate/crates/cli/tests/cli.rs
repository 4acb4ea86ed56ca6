use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn chirality(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chirality")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_cfg(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn list_scenarios_names_every_figure() {
    let o = chirality(&["list-scenarios"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for id in ["fig1", "fig2", "fig3", "fig4", "fig5a", "fig5b", "fig6", "custom"] {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id} missing from\n{text}");
    }
}

#[test]
fn validate_echoes_resolved_fig2_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_cfg(dir.path(), "# caption values\nscenario = fig2\n");
    let o = chirality(&["validate", &path]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for line in [
        "omega_s = 100",
        "detuning = 0.1",
        "temperature = 1",
        "delta_ratio = 0.1, 0.4, 0.7, 0.9",
        "base_unit = lambda",
    ] {
        assert!(text.contains(line), "missing `{line}` in\n{text}");
    }
}

#[test]
fn validate_reports_every_problem_with_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_cfg(
        dir.path(),
        "scenario = fig2\nbase_unit = omega0\ntemperature = -1\nfrobnicate = 2\n",
    );
    let o = chirality(&["validate", &path]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 2") && err.contains("contradicts"), "{err}");
    assert!(err.contains("line 3") && err.contains("temperature"), "{err}");
    assert!(err.contains("line 4") && err.contains("unknown key"), "{err}");
}

#[test]
fn set_overrides_are_validated_too() {
    let o = chirality(&["run", "custom", "--set", "dt=abc", "--out", "/nonexistent/never"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--set #1"));
}

#[test]
fn missing_config_file_is_an_io_error() {
    let o = chirality(&["validate", "/nonexistent/run.cfg"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn uncoupled_custom_run_keeps_full_polarization() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = chirality(&[
        "run",
        "custom",
        "--set",
        "alpha=0",
        "--set",
        "t_max=0.5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("trajectory_r0.4_d0.1_T1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,P,E,re_rho00,re_rho11,re_rho01,im_rho01,gamma_z,gamma_plus,gamma_minus"
    );
    let mut rows = 0;
    for l in lines {
        let cells: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[1], 1.0, "P at t = {}", cells[0]);
        assert_eq!(cells[2], 0.0);
        rows += 1;
    }
    assert_eq!(rows, 51);
}

#[test]
fn manifest_records_inputs_and_checksums() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = chirality(&["run", "custom", "--set", "t_max=0.2", "--svg", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["scenario"], "custom");
    assert_eq!(m["config"]["t_max"], "0.2");
    let p = &m["points"][0]["params"];
    let (omega, omega_so) = (p["omega"].as_f64().unwrap(), p["omega_so"].as_f64().unwrap());
    assert!((omega - 119.9).abs() < 1e-12);
    assert!((omega_so - omega - 40.0).abs() < 1e-9);
    let files = m["files"].as_object().unwrap();
    assert!(files.keys().any(|k| k.ends_with(".svg")));
    for (name, sum) in files {
        let bytes = fs::read(out.join(name)).unwrap();
        assert_eq!(sum.as_str().unwrap(), chirality_cli::output::sha256_hex(&bytes));
    }
    let resolved = fs::read_to_string(out.join("resolved.cfg")).unwrap();
    let again = chirality_cli::config::resolve(&resolved, None, &[]).unwrap();
    assert_eq!(again.t_max, 0.2);
}

#[test]
fn fig3_writes_four_kernel_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = chirality(&["run", "fig3", "--set", "t_max=0.5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut names: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "kernels_r0.4_d0.1_T0.csv",
            "kernels_r0.4_d0.1_T1.csv",
            "kernels_r0.4_d10_T0.csv",
            "kernels_r0.4_d10_T1.csv"
        ]
    );
}

#[test]
fn thread_count_does_not_change_outputs() {
    let cfg = chirality_cli::config::resolve("", Some(chirality_cli::Scenario::Fig2), &["t_max=0.3".into()]).unwrap();
    let run_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| chirality_cli::compute(&cfg).unwrap())
    };
    let (one, four) = (run_with(1), run_with(4));
    assert_eq!(one.files, four.files);
    assert_eq!(one.points, four.points);
}
