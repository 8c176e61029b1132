use std::fs;

use parity_anneal::experiments::{preset, run_experiment, run_figure, Mode};

#[test]
fn fig3_ends_on_the_excited_branch() {
    let cfgs = preset("fig3").unwrap();
    let closed = cfgs.iter().find(|c| c.mode == Mode::Closed).unwrap();
    let table = run_experiment(closed).unwrap();
    let energy = table.numbers("energy").unwrap();
    assert!((energy.last().unwrap() - 2.0).abs() < 1e-3, "{:?}", energy.last());
    assert!(table.numbers("fidelity_ground").unwrap().last().unwrap() < &1e-6);
    let parity = table.numbers("parity").unwrap();
    assert!(parity.iter().all(|p| (p - 1.0).abs() < 1e-6));

    let spectrum = cfgs.iter().find(|c| c.mode == Mode::Spectrum).unwrap();
    let table = run_experiment(spectrum).unwrap();
    assert!(table.numbers("level_0").unwrap().last().unwrap().abs() < 1e-12);
    let sectors = table.texts("sector_0").unwrap();
    assert_eq!(sectors.first().map(String::as_str), Some("1"));
    assert_eq!(sectors.last().map(String::as_str), Some("-1"));
}

#[test]
fn gksl_cold_run_misses_the_ground_state() {
    let cfgs = preset("figB-ising").unwrap();
    let cold = cfgs.iter().find(|c| c.t_env == Some(0.1)).unwrap();
    let table = run_experiment(cold).unwrap();
    let gp = *table.numbers("ground_population").unwrap().last().unwrap();
    assert!(gp < 0.5, "{gp}");
    assert!(table.numbers("min_eig").unwrap().iter().all(|&m| m >= -1e-8));
    assert!(table.numbers("trace_error").unwrap().iter().all(|&e| e < 1e-6));
}

#[test]
fn figure_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = run_figure("fig5", a.path()).unwrap();
    let second = run_figure("fig5", b.path()).unwrap();
    assert_eq!(first.len(), 3);
    for (x, y) in first.iter().zip(&second) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
}

#[test]
fn multi_temperature_files_embed_t_env() {
    let names: Vec<String> = preset("fig4")
        .unwrap()
        .iter()
        .map(|c| c.output.as_ref().unwrap().display().to_string())
        .collect();
    assert_eq!(names, ["fig4_tenv1.csv", "fig4_tenv10.csv", "fig4_tenv100.csv"]);
}
