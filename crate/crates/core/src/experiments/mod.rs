//! Experiment harness: configuration, figure presets, execution and CSV
//! output.

pub mod config;
pub mod presets;

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;

use crate::closed_dynamics::{evolve_closed, initial_ground_state};
use crate::error::{Error, Result};
use crate::open_dynamics::{
    evolve_adiabatic_me, evolve_gksl, initial_ground_projector, GkslModel, NoiseSpec,
    OpenTrajectory, RedfieldModel,
};
use crate::spectrum::sweep_spectrum;
use crate::spin_algebra::{magnetization_operator, Axis};

pub use config::{parse_config, ExperimentConfig, Mode, NoiseKind};
pub use presets::{figure_ids, preset, FIGURES};

/// Environment variable overriding the directory that relative output paths
/// resolve against.
pub const OUTPUT_DIR_ENV: &str = "PARITY_ANNEAL_OUTPUT_DIR";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Rows keyed by the schedule fraction `s` in the first column.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric values of one column.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.column(name)?;
        self.rows.iter().map(|r| r[c].as_f64()).collect()
    }

    pub fn texts(&self, name: &str) -> Option<Vec<String>> {
        let c = self.column(name)?;
        Some(self.rows.iter().map(|r| r[c].render()).collect())
    }

    pub fn last(&self, name: &str) -> Option<&Cell> {
        let c = self.column(name)?;
        self.rows.last().map(|r| &r[c])
    }
}

/// Runs one configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let schedule = cfg.schedule()?;
    match cfg.mode {
        Mode::Spectrum => {
            let sweep = sweep_spectrum(&schedule, cfg.n_points)?;
            let dim = schedule.basis().dim();
            let mut header = vec!["s".to_string()];
            header.extend((0..dim).map(|j| format!("level_{j}")));
            header.extend((0..dim).map(|j| format!("sector_{j}")));
            let mut table = ResultTable::new(header);
            for snap in &sweep.snapshots {
                let mut row = vec![Cell::Num(snap.s)];
                row.extend(snap.eigenvalues.iter().map(|&e| Cell::Num(e)));
                row.extend(snap.sectors.iter().map(|s| Cell::Text(s.to_string())));
                table.rows.push(row);
            }
            Ok(table)
        }
        Mode::Closed => {
            let psi0 = initial_ground_state(&schedule)?;
            let traj = evolve_closed(&schedule, &psi0, &cfg.integrator(), cfg.n_samples)?;
            let half_integer = !schedule.basis().has_integer_spin();
            let mut table = ResultTable::new(["s", "energy", "parity", "fidelity_ground"]);
            for i in 0..traj.times.len() {
                let k = traj.parity[i];
                // half-integer spin puts the parity on the imaginary axis
                let parity = if half_integer { k.im } else { k.re };
                table.rows.push(vec![
                    Cell::Num(traj.times[i] / cfg.t_anneal),
                    Cell::Num(traj.energy[i]),
                    Cell::Num(parity),
                    Cell::Num(traj.fidelity_ground[i]),
                ]);
            }
            Ok(table)
        }
        Mode::Open => {
            let traj = run_open(cfg)?;
            let mut table =
                ResultTable::new(["s", "energy", "ground_population", "trace_error", "min_eig"]);
            for i in 0..traj.times.len() {
                table.rows.push(vec![
                    Cell::Num(traj.times[i] / cfg.t_anneal),
                    Cell::Num(traj.energy[i]),
                    Cell::Num(traj.ground_population[i]),
                    Cell::Num(traj.trace_error[i]),
                    Cell::Num(traj.min_eigenvalue[i]),
                ]);
            }
            Ok(table)
        }
    }
}

/// The open-system trajectory behind an `open` configuration.
pub fn run_open(cfg: &ExperimentConfig) -> Result<OpenTrajectory> {
    let schedule = cfg.schedule()?;
    let rho0 = initial_ground_projector(&schedule)?;
    let t_env = cfg.t_env.ok_or_else(|| Error::MissingField("t_env".into()))?;
    match cfg.noise {
        NoiseKind::Redfield => {
            let a = magnetization_operator(schedule.basis(), cfg.coupling);
            let noise = if cfg.coupling == Axis::X {
                warn!("coupling along x commutes with the parity; the bath cannot break the symmetry");
                NoiseSpec::allow_symmetric(a)?
            } else {
                NoiseSpec::new(a)?
            };
            let model = RedfieldModel::new(noise, cfg.spectral_density()?);
            evolve_adiabatic_me(&schedule, &rho0, &model, &cfg.integrator(), cfg.n_samples)
        }
        NoiseKind::Gksl => {
            let model = GkslModel::new(cfg.eta, t_env)?;
            evolve_gksl(&schedule, &rho0, &model, &cfg.integrator(), cfg.n_samples)
        }
        NoiseKind::None => Err(Error::InvalidValue {
            key: "noise".into(),
            reason: "open mode requires redfield or gksl".into(),
        }),
    }
}

/// Directory relative output paths resolve against.
pub fn output_dir() -> PathBuf {
    std::env::var_os(OUTPUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Where a configuration's CSV goes, falling back to `<mode>.csv`.
pub fn output_path(cfg: &ExperimentConfig, dir: &Path) -> PathBuf {
    let name = cfg
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.mode.name())));
    if name.is_absolute() {
        name
    } else {
        dir.join(name)
    }
}

/// Header row, then one line per row; LF endings, 17 significant digits.
pub fn write_csv(table: &ResultTable, path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(render_csv(table).as_bytes())?;
    w.flush()?;
    Ok(())
}

pub fn render_csv(table: &ResultTable) -> String {
    let mut out = table.header.join(",");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Cell::render).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Inverse of [`write_csv`]: numeric-looking cells become numbers.
pub fn read_csv(path: &Path) -> Result<ResultTable> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Malformed {
            line: 1,
            text: "missing header".into(),
        })?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut table = ResultTable {
        header,
        rows: Vec::new(),
    };
    for line in lines {
        let row = line
            .split(',')
            .map(|c| match c {
                "1" | "-1" | "i" | "-i" => Cell::Text(c.to_string()),
                _ => c.parse().map(Cell::Num).unwrap_or_else(|_| Cell::Text(c.to_string())),
            })
            .collect();
        table.rows.push(row);
    }
    Ok(table)
}

/// Runs every member of a figure preset concurrently and writes their CSVs
/// under `dir`. Returns the written paths in preset order.
pub fn run_figure(id: &str, dir: &Path) -> Result<Vec<PathBuf>> {
    let configs = preset(id)?;
    // every run finishes before the first failure is reported
    let results: Vec<Result<PathBuf>> = configs
        .par_iter()
        .map(|cfg| {
            let table = run_experiment(cfg)?;
            let path = output_path(cfg, dir);
            write_csv(&table, &path)?;
            info!("wrote {}", path.display());
            Ok(path)
        })
        .collect();
    let mut paths = Vec::with_capacity(results.len());
    let mut first_err = None;
    for (cfg, r) in configs.iter().zip(results) {
        match r {
            Ok(p) => paths.push(p),
            Err(e) => {
                warn!("{}: {e}", output_path(cfg, dir).display());
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(paths),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.csv");
        write_csv(&ResultTable::new(["s", "energy"]), &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "s,energy\n");
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = ResultTable::new(["s", "x", "sector_0"]);
        let values = [0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789, f64::MIN_POSITIVE];
        for v in values {
            t.rows.push(vec![Cell::Num(v), Cell::Num(-v * 7.0), Cell::Text("-i".into())]);
        }
        write_csv(&t, &path).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back, t);
        let text = fs::read_to_string(&path).unwrap();
        assert!(!text.contains('\r'));
    }

    #[test]
    fn fig2_spectrum_has_constant_minus_sector() {
        let cfg = &preset("fig2").unwrap()[0];
        let table = run_experiment(cfg).unwrap();
        assert_eq!(table.rows.len(), 101);
        assert!(table.texts("sector_0").unwrap().iter().all(|s| s == "-1"));
        assert_eq!(table.header.len(), 1 + 3 + 3);
    }

    #[test]
    fn output_paths_resolve_against_dir() {
        let mut cfg = ExperimentConfig::new(Mode::Closed, 2, crate::ProblemKind::IsingFc);
        assert_eq!(output_path(&cfg, Path::new("out")), PathBuf::from("out/closed.csv"));
        cfg.output = Some(PathBuf::from("/abs/x.csv"));
        assert_eq!(output_path(&cfg, Path::new("out")), PathBuf::from("/abs/x.csv"));
    }
}
