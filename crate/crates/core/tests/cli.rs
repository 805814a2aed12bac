use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gevrey-nls"))
}

const CONSERVATION: &str = "\
experiment = conservation
n = 128
box_len = 30
sigma_list = 1e-4, 1e-3, 1e-2
c0 = 5
";

#[test]
fn run_writes_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cons.cfg");
    fs::write(&cfg, CONSERVATION).unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--p", "3", "--dt", "1e-3", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());

    let csv = fs::read_to_string(out.join("conservation.csv")).unwrap();
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "sigma,delta,sup_drift_A,mass_drift,energy_drift");
    assert_eq!(body.len(), 5);
    assert!(csv.contains("# config: p = 3"));
    assert!(csv.contains("# config: dt = 0.001"));

    let gp = fs::read_to_string(out.join("conservation.gp")).unwrap();
    assert!(gp.contains("data = 'conservation.csv'"));
    assert!(gp.contains("set logscale xy"));
}

#[test]
fn bad_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");

    fs::write(&cfg, "experiment = conservation\nsigma_lst = 1e-3\n").unwrap();
    let out = bin().args(["run", "--config"]).arg(&cfg).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma_lst"));

    fs::write(&cfg, CONSERVATION).unwrap();
    let out = bin().args(["run", "--config"]).arg(&cfg).args(["--method", "rk4"]).output().unwrap();
    assert!(!out.status.success());

    let out = bin().args(["run", "--config"]).arg(dir.path().join("missing.cfg")).output().unwrap();
    assert!(!out.status.success());
}
