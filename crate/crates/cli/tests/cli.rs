use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command as Process;

use resex_cli::table::Table;
use resex_cli::{
    execute, Cli, CliError, Experiment, Format, ParamValue, Scale, ScenarioConfig, Sweep,
};
use resex_core::scheduling::schedule_zx;

fn cli(command: resex_cli::Command, out: &Path, config: Option<&Path>) -> Cli {
    Cli {
        command,
        config: config.map(Path::to_path_buf),
        seed: None,
        svg: false,
        evaluator: None,
        out: Some(out.to_string_lossy().into_owned()),
    }
}

fn write_config(dir: &Path, cfg: &ScenarioConfig) -> std::path::PathBuf {
    let path = dir.join("scenario.toml");
    fs::write(&path, cfg.to_text(Format::Toml).unwrap()).unwrap();
    path
}

fn scenario(e: Experiment, params: &[(&str, ParamValue)], sweep: Option<Sweep>) -> ScenarioConfig {
    let mut c = ScenarioConfig::default_for(e);
    c.params = params.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<BTreeMap<_, _>>();
    c.sweep = sweep;
    c
}

fn sweep(field: &str, start: f64, stop: f64, points: usize, scale: Scale) -> Option<Sweep> {
    Some(Sweep {
        field: field.into(),
        start,
        stop,
        points,
        scale,
    })
}

fn read(path: &Path) -> Table {
    Table::from_csv(&fs::read_to_string(path).unwrap()).unwrap()
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn col(t: &Table, name: &str) -> Vec<f64> {
    t.numbers(name).unwrap_or_else(|| panic!("no column {name} in {:?}", t.header))
}

#[test]
fn dqd_coefficients_and_markers() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let files = execute(&cli(resex_cli::Command::DqdCoeffs, &out, None)).unwrap();
    assert_eq!(files.len(), 2);
    let t = read(&dir.path().join("c.csv"));
    assert_eq!(t.header, ["t_s", "abs_YI", "abs_IY", "abs_XX", "abs_YY", "abs_ZZ", "abs_II"]);
    assert!((max(&col(&t, "abs_ZZ")) - 0.0995).abs() < 5e-4);
    assert!((max(&col(&t, "abs_IY")) - 0.995).abs() < 5e-4);
    let m = read(&dir.path().join("c_markers.csv"));
    let ts = col(&m, "t_s");
    assert!((ts[0] - 2.0 * std::f64::consts::PI / 2e6).abs() < 1e-18);
    assert!((ts[1] - std::f64::consts::PI / 2e6f64.hypot(0.2e6)).abs() < 1e-18);

    let cfg = scenario(Experiment::DqdCoeffs, &[("j", ParamValue::Number(0.0))], None);
    let path = write_config(dir.path(), &cfg);
    execute(&cli(resex_cli::Command::DqdCoeffs, &out, Some(&path))).unwrap();
    assert!(col(&read(&dir.path().join("c.csv")), "abs_ZZ").iter().all(|v| *v == 0.0));
}

#[test]
fn dqd_coefficients_against_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let mut cfg = scenario(
        Experiment::DqdCoeffs,
        &[],
        sweep("t", 0.0, 3.1e-6, 6, Scale::Linear),
    );
    cfg.oracle_dt = Some(1e-12);
    let path = write_config(dir.path(), &cfg);
    let mut c = cli(resex_cli::Command::DqdCoeffs, &out, Some(&path));
    c.evaluator = Some(resex_cli::EvaluatorChoice::Oracle);
    execute(&c).unwrap();
    let t = read(&dir.path().join("o.csv"));
    for w in ["YI", "IY", "XX", "YY", "ZZ", "II"] {
        let a = col(&t, &format!("abs_{w}"));
        let o = col(&t, &format!("abs_{w}_oracle"));
        let dev = a.iter().zip(&o).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(dev <= 5e-3, "{w}: {dev}");
    }
}

#[test]
fn dqd_fidelity_scan() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f");
    let mut cfg = scenario(Experiment::DqdFid, &[], sweep("j", 1e5, 1e7, 5, Scale::Log));
    cfg.noise = Some(resex_core::noise::NoiseSpec {
        samples: 2000,
        ..Default::default()
    });
    let path = write_config(dir.path(), &cfg);
    execute(&cli(resex_cli::Command::DqdFid, &out, Some(&path))).unwrap();
    let t = read(&dir.path().join("f.csv"));
    assert!(col(&t, "infid_zx").iter().all(|v| *v <= 1e-9));
    let floor = col(&t, "mc_zx");
    let (lo, hi) = (floor.iter().copied().fold(1.0, f64::min), max(&floor));
    assert!(lo > 0.0 && hi / lo < 2.0, "{floor:?}");
    let single = col(&t, "infid_iy_B1e7");
    assert!(single.windows(2).all(|w| w[1] > w[0]), "{single:?}");
    // The single-drive error is dominated by the exchange, not the noise.
    let noisy = col(&t, "mc_iy_B1e7");
    assert!((noisy[4] - single[4]).abs() < 0.05 * single[4]);
}

#[test]
fn seeds_come_from_flag_then_environment_then_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = scenario(Experiment::DqdFid, &[], sweep("j", 1e6, 1e7, 2, Scale::Log));
    cfg.noise = Some(resex_core::noise::NoiseSpec {
        samples: 50,
        ..Default::default()
    });
    let path = write_config(dir.path(), &cfg);
    let bin = env!("CARGO_BIN_EXE_resex");
    let run = |name: &str, seed: Option<&str>, env: Option<&str>| -> String {
        let out = dir.path().join(name);
        let mut p = Process::new(bin);
        p.args(["dqd-fid", "--config"]).arg(&path).arg("--out").arg(&out);
        p.env_remove("RESEX_SEED");
        if let Some(s) = seed {
            p.args(["--seed", s]);
        }
        if let Some(e) = env {
            p.env("RESEX_SEED", e);
        }
        assert!(p.status().unwrap().success());
        fs::read_to_string(out.with_extension("csv")).unwrap()
    };
    let base = run("a", None, None);
    assert_eq!(base, run("b", None, None), "reruns must be byte-identical");
    let flag = run("c", Some("11"), None);
    assert_ne!(base, flag);
    assert_eq!(flag, run("d", None, Some("11")));
    assert_eq!(flag, run("e", Some("11"), Some("12")));
}

#[test]
fn middle_site_y_gate() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("y");
    let cfg = scenario(
        Experiment::ChainY,
        &[("j0_list", ParamValue::List(vec![0.0, 1e6])), ("t_points", ParamValue::Number(51.0))],
        sweep("j0", 1e3, 1e6, 4, Scale::Log),
    );
    let path = write_config(dir.path(), &cfg);
    execute(&cli(resex_cli::Command::ChainY, &out, Some(&path))).unwrap();
    let m = read(&dir.path().join("y_markers.csv"));
    let (t, infid) = (col(&m, "t_opt_s"), col(&m, "infid_opt"));
    assert!(infid[0] < 1e-12);
    assert!((t[1] - 0.627e-6).abs() < 0.01 * 0.627e-6, "{}", t[1]);
    assert!((1.0 - infid[1] - 0.9825).abs() < 5e-4);
    let o = read(&dir.path().join("y_optimum.csv"));
    let per_b: Vec<Vec<f64>> = ["1e6", "1e7", "1e8"]
        .iter()
        .map(|b| col(&o, &format!("infid_opt_B{b}")))
        .collect();
    for ((lo, mid), hi) in per_b[0].iter().zip(&per_b[1]).zip(&per_b[2]) {
        assert!(lo > mid && mid > hi);
    }
    assert!(per_b[2][0] < 1e-9);
    assert_eq!(read(&dir.path().join("y_time.csv")).rows.len(), 51);
}

#[test]
fn simultaneous_y_gates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let cfg = scenario(Experiment::ChainSimul, &[], sweep("j0", 0.0, 1e6, 3, Scale::Linear));
    let path = write_config(dir.path(), &cfg);
    execute(&cli(resex_cli::Command::ChainSimul, &out, Some(&path))).unwrap();
    let t = read(&dir.path().join("s.csv"));
    for n in [3, 5, 7] {
        let iyi = col(&t, &format!("F_IYI_N{n}"));
        let yyy = col(&t, &format!("F_YYY_N{n}"));
        let seq = col(&t, &format!("F_YIYxIYI_N{n}"));
        assert!((iyi[0] - 1.0).abs() < 1e-9 && (yyy[0] - 1.0).abs() < 1e-9 && (seq[0] - 1.0).abs() < 1e-9);
        for i in 1..3 {
            assert!(iyi[i] >= yyy[i] - 1e-12, "N = {n}");
            if n == 3 {
                assert!((iyi[i] - seq[i]).abs() < 1e-12);
            } else {
                assert!(yyy[i] >= seq[i], "N = {n}");
            }
        }
    }
    let t7 = col(&t, "t_YYY_N7_s")[2];
    assert!((t7 - 0.624e-6).abs() < 0.01 * 0.624e-6, "{t7}");
}

#[test]
fn long_chains_need_an_explicit_limit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario(Experiment::ChainSimul, &[("n_list", ParamValue::List(vec![9.0]))], None);
    let path = write_config(dir.path(), &cfg);
    let err = execute(&cli(resex_cli::Command::ChainSimul, &dir.path().join("x"), Some(&path))).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(err.to_string().contains("max_n"));
}

#[test]
fn swap_block() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w");
    let cfg = scenario(
        Experiment::Swap,
        &[
            ("dbz", ParamValue::Number(0.0)),
            ("j0_list", ParamValue::List(vec![0.0])),
            ("t_points", ParamValue::Number(5.0)),
            ("t_max_rel", ParamValue::Number(2.0)),
        ],
        sweep("j0", 0.0, 5e7, 3, Scale::Linear),
    );
    let path = write_config(dir.path(), &cfg);
    execute(&cli(resex_cli::Command::Swap, &out, Some(&path))).unwrap();
    // Samples at 0, pi/2J, pi/J, ...: the middle one is the SWAP time.
    let t = read(&dir.path().join("w_time.csv"));
    assert!((col(&t, "F_numeric_J00e0")[2] - 1.0).abs() < 1e-12);
    assert!((col(&t, "F_closed_J00e0")[2] - 1.0).abs() < 1e-12);
    let j = read(&dir.path().join("w_j0.csv"));
    let (num, derived) = (col(&j, "F_numeric"), col(&j, "F_derived"));
    for (a, b) in num.iter().zip(&derived) {
        assert!((a - b).abs() < 1e-9);
    }
    assert!(num[2] < num[0]);

    // With the default gradient the errors come from the swapped pair.
    execute(&cli(resex_cli::Command::Swap, &out, None)).unwrap();
    let e = read(&dir.path().join("w_errors.csv"));
    let words = e.texts("word").unwrap();
    let (a, b) = (col(&e, "abs_c_J"), col(&e, "abs_c_2J"));
    let mut order: Vec<usize> = (1..words.len()).collect();
    order.sort_by(|x, y| a[*y].total_cmp(&a[*x]));
    let mut top: Vec<&str> = order[..5].iter().map(|i| words[*i].as_str()).collect();
    top.sort_unstable();
    assert_eq!(top, ["IXXI", "IXYI", "IYXI", "IYYI", "IZZI"]);
    for i in 1..words.len() {
        if a[i] > 1e-10 {
            assert!(b[i] < a[i], "{}", words[i]);
        }
    }
}

#[test]
fn reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    execute(&cli(resex_cli::Command::Report, &out, None)).unwrap();
    let m = read(&dir.path().join("r_matrices.csv"));
    assert_eq!(m.rows.len(), 3 * 256);
    let rows = m.texts("row").unwrap();
    let cols = m.texts("col").unwrap();
    assert_eq!(&rows[..2], ["II", "II"]);
    assert_eq!(&cols[..5], ["II", "IX", "IY", "IZ", "XI"]);
    let kinds = m.texts("matrix").unwrap();
    let vals = col(&m, "value");
    let errgen_max = kinds
        .iter()
        .zip(&vals)
        .filter(|(k, _)| *k == "errgen")
        .fold(0.0f64, |acc, (_, v)| acc.max(v.abs()));
    assert!(errgen_max > 1e-3);
    let s = read(&dir.path().join("r_summary.csv"));
    let v = col(&s, "value");
    assert!(v[1] >= v[0] && v[0] > 0.99);

    // An exact schedule given inline has a vanishing error generator.
    let mut cfg = ScenarioConfig::default_for(Experiment::Report);
    cfg.schedule = Some(schedule_zx(1e6, 0, 0).unwrap());
    let path = write_config(dir.path(), &cfg);
    execute(&cli(resex_cli::Command::Report, &out, Some(&path))).unwrap();
    let m = read(&dir.path().join("r_matrices.csv"));
    let kinds = m.texts("matrix").unwrap();
    let vals = col(&m, "value");
    let free = kinds
        .iter()
        .zip(&vals)
        .filter(|(k, _)| *k == "errgen")
        .fold(0.0f64, |acc, (_, v)| acc.max(v.abs()));
    assert!(free < 1e-9, "{free}");
}

#[test]
fn every_builtin_gate_reports() {
    for gate in resex_cli::experiments::GATES {
        let dir = tempfile::tempdir().unwrap();
        let cfg = scenario(Experiment::Report, &[("gate", ParamValue::Text(gate.to_string()))], None);
        let path = write_config(dir.path(), &cfg);
        execute(&cli(resex_cli::Command::Report, &dir.path().join("g"), Some(&path)))
            .unwrap_or_else(|e| panic!("{gate}: {e}"));
        let s = read(&dir.path().join("g_summary.csv"));
        let v = col(&s, "value");
        assert!(v[1] >= v[0] - 1e-12, "{gate}");
        // The three-step gate is only right up to diagonal phase corrections,
        // which the bound ignores and the fidelity does not.
        let score = if *gate == "three-step" { v[1] } else { v[0] };
        assert!(score > 0.99, "{gate}: {v:?}");
    }
}

#[test]
fn config_round_trips() {
    let mut cfg = scenario(
        Experiment::Report,
        &[("b", ParamValue::Number(1.5e6)), ("gate", ParamValue::Text("zx".into()))],
        None,
    );
    cfg.schedule = Some(schedule_zx(1e6, 1, 0).unwrap());
    cfg.oracle_dt = Some(1e-11);
    let mut fid = scenario(Experiment::DqdFid, &[("b_list", ParamValue::List(vec![1e7, 3e7]))], sweep("j", 1e5, 1e7, 3, Scale::Log));
    fid.noise = Some(resex_core::noise::NoiseSpec::default());
    for c in [cfg, fid] {
        for f in [Format::Toml, Format::Json] {
            let text = c.to_text(f).unwrap();
            let once = ScenarioConfig::parse(&text, f).unwrap();
            assert_eq!(once, c);
            let twice = ScenarioConfig::parse(&once.to_text(f).unwrap(), f).unwrap();
            assert_eq!(twice, once);
            assert_eq!(once.to_text(f).unwrap(), text);
        }
    }
}

#[test]
fn svg_is_drawn_from_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p");
    let mut c = cli(resex_cli::Command::DqdCoeffs, &out, None);
    c.svg = true;
    let files = execute(&c).unwrap();
    assert!(files.iter().any(|f| f.extension().is_some_and(|e| e == "svg")));
    let svg = fs::read_to_string(dir.path().join("p.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<path"));
    // Rendering the written CSV again gives the same picture.
    let t = read(&dir.path().join("p.csv"));
    let m = read(&dir.path().join("p_markers.csv"));
    let again = resex_cli::svg::line_plot(
        &t,
        &resex_cli::svg::LinePlot {
            title: "Pauli coefficients of the two-drive propagator".into(),
            x: "t_s".into(),
            ys: t.header[1..].to_vec(),
            markers: m.texts("marker").unwrap().into_iter().zip(col(&m, "t_s")).collect(),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(again, svg);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_resex");
    let status = |args: &[&str], cfg: Option<&str>| -> i32 {
        let mut p = Process::new(bin);
        p.args(args).arg("--out").arg(dir.path().join("e"));
        if let Some(text) = cfg {
            let path = dir.path().join("bad.toml");
            fs::write(&path, text).unwrap();
            p.arg("--config").arg(path);
        }
        p.output().unwrap().status.code().unwrap()
    };
    assert_eq!(status(&["swap"], Some("experiment = \"swap\"\noutput = \"x\"\n[params]\nj = 1e9\nt_points = 3\n")), 0);
    assert_eq!(status(&["swap"], Some("experiment = \"swap\"\n")), 2);
    assert_eq!(status(&["swap"], Some("experiment = \"chain-y\"\noutput = \"x\"\n")), 2);
    assert_eq!(status(&["swap"], Some("experiment = \"swap\"\noutput = \"x\"\n[params]\nj = -1\n")), 2);
    assert_eq!(status(&["swap"], Some("experiment = \"swap\"\noutput = \"x\"\n[sweep]\nfield = \"t\"\nstart = 0\nstop = 1\npoints = 1\n")), 2);
    // Drive 2 far off resonance: the two-drive propagator refuses it.
    assert_eq!(
        status(&["dqd-coeffs"], Some("experiment = \"dqd-coeffs\"\noutput = \"x\"\n[params]\nomega2 = 1e9\n")),
        3
    );
    let mut p = Process::new(bin);
    p.args(["swap", "--out", "/proc/forbidden/x"]);
    assert_eq!(p.output().unwrap().status.code().unwrap(), 2);
}

#[test]
fn config_errors_are_listed_together() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(
        &path,
        "experiment = \"chain-y\"\noutput = \"x\"\n[params]\nb = 0\nfoo = 1\n[sweep]\nfield = \"j\"\nstart = 1\nstop = 2\npoints = 1\n",
    )
    .unwrap();
    let err = execute(&cli(resex_cli::Command::ChainY, &dir.path().join("x"), Some(&path))).unwrap_err();
    let CliError::Config(list) = &err else {
        panic!("{err}")
    };
    assert!(list.len() >= 4, "{list:#?}");
}
