//! Frozen configurations reproducing each published figure.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::hamiltonians::ProblemKind;

use super::config::{ExperimentConfig, Mode, NoiseKind};

/// Figure ids with a one-line description, in display order.
pub const FIGURES: &[(&str, &str)] = &[
    ("fig2", "Ising, transverse driver only: spectrum without a sector crossing"),
    ("fig3", "Ising, alpha = 100: closed evolution stranded by the crossing, with spectrum"),
    ("fig4", "Ising, alpha = 100: Redfield bath at T_env = 1, 10, 100"),
    ("fig5", "XXZ (Delta = 1.5): spectra at alpha = 0 and 100, closed evolution at alpha = 100"),
    ("fig6", "XXZ, alpha = 100: Redfield bath at T_env = 1, 10, 100"),
    ("figB-ising", "Ising, alpha = 100: GKSL bath at T_env = 0.1, 1, 10, 100, 1000"),
    ("figB-xxz", "XXZ, alpha = 100: GKSL bath at T_env = 0.1, 1, 10, 100, 1000"),
    ("figC-ising", "Ising, S = 3: Redfield bath at T_env = 1, 10, 100 plus closed evolution"),
    ("figC-xxz", "XXZ, S = 3: Redfield bath at T_env = 10, 1000 plus closed evolution"),
];

pub fn figure_ids() -> impl Iterator<Item = &'static str> {
    FIGURES.iter().map(|(id, _)| *id)
}

fn base(mode: Mode, n: usize, problem: ProblemKind, alpha: f64, file: String) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(mode, n, problem);
    c.alpha = alpha;
    c.output = Some(PathBuf::from(file));
    c
}

fn open_set(
    id: &str,
    n: usize,
    problem: ProblemKind,
    noise: NoiseKind,
    temps: &[f64],
) -> Vec<ExperimentConfig> {
    temps
        .iter()
        .map(|&t| {
            let mut c = base(Mode::Open, n, problem, 100.0, format!("{id}_tenv{t}.csv"));
            c.noise = noise;
            c.t_env = Some(t);
            c
        })
        .collect()
}

/// Member configurations of a figure, each with its own output file name.
pub fn preset(id: &str) -> Result<Vec<ExperimentConfig>> {
    let ising = ProblemKind::IsingFc;
    let xxz = ProblemKind::xxz_default();
    let out = match id {
        "fig2" => vec![base(Mode::Spectrum, 2, ising, 0.0, "fig2_spectrum.csv".into())],
        "fig3" => vec![
            base(Mode::Closed, 2, ising, 100.0, "fig3_closed.csv".into()),
            base(Mode::Spectrum, 2, ising, 100.0, "fig3_spectrum.csv".into()),
        ],
        "fig4" => open_set(id, 2, ising, NoiseKind::Redfield, &[1.0, 10.0, 100.0]),
        "fig5" => vec![
            base(Mode::Spectrum, 2, xxz, 0.0, "fig5_spectrum_alpha0.csv".into()),
            base(Mode::Spectrum, 2, xxz, 100.0, "fig5_spectrum_alpha100.csv".into()),
            base(Mode::Closed, 2, xxz, 100.0, "fig5_closed.csv".into()),
        ],
        "fig6" => open_set(id, 2, xxz, NoiseKind::Redfield, &[1.0, 10.0, 100.0]),
        "figB-ising" => open_set(id, 2, ising, NoiseKind::Gksl, &[0.1, 1.0, 10.0, 100.0, 1000.0]),
        "figB-xxz" => open_set(id, 2, xxz, NoiseKind::Gksl, &[0.1, 1.0, 10.0, 100.0, 1000.0]),
        "figC-ising" => {
            let mut v = open_set(id, 6, ising, NoiseKind::Redfield, &[1.0, 10.0, 100.0]);
            v.push(base(Mode::Closed, 6, ising, 100.0, "figC-ising_closed.csv".into()));
            v.push(base(Mode::Spectrum, 6, ising, 100.0, "figC-ising_spectrum.csv".into()));
            v
        }
        "figC-xxz" => {
            let mut v = open_set(id, 6, xxz, NoiseKind::Redfield, &[10.0, 1000.0]);
            v.push(base(Mode::Closed, 6, xxz, 100.0, "figC-xxz_closed.csv".into()));
            v.push(base(Mode::Spectrum, 6, xxz, 100.0, "figC-xxz_spectrum.csv".into()));
            v
        }
        other => {
            return Err(Error::UnknownFigure {
                id: other.to_string(),
                valid: figure_ids().collect::<Vec<_>>().join(", "),
            })
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_figure_has_a_valid_preset() {
        for id in figure_ids() {
            let cfgs = preset(id).unwrap();
            assert!(!cfgs.is_empty());
            for c in &cfgs {
                c.validate().unwrap();
            }
            let mut names: Vec<_> = cfgs.iter().map(|c| c.output.clone().unwrap()).collect();
            names.sort();
            names.dedup();
            assert_eq!(names.len(), cfgs.len(), "{id}: output names collide");
        }
    }

    #[test]
    fn caption_parameters() {
        let f3 = preset("fig3").unwrap();
        assert_eq!(f3[0].mode, Mode::Closed);
        assert_eq!((f3[0].n_qubits, f3[0].alpha, f3[0].t_anneal), (2, 100.0, 1000.0));
        let f4 = preset("fig4").unwrap();
        let temps: Vec<_> = f4.iter().map(|c| c.t_env.unwrap()).collect();
        assert_eq!(temps, vec![1.0, 10.0, 100.0]);
        assert!(f4.iter().all(|c| c.noise == NoiseKind::Redfield && c.eta == 0.1));
        assert_eq!(f4[0].output.as_deref(), Some(std::path::Path::new("fig4_tenv1.csv")));
        let fc = preset("figC-ising").unwrap();
        assert!(fc.iter().all(|c| c.n_qubits == 6));
        assert!(fc.iter().any(|c| c.mode == Mode::Closed));
        let fx = preset("figC-xxz").unwrap();
        let temps: Vec<_> = fx.iter().filter_map(|c| c.t_env).collect();
        assert_eq!(temps, vec![10.0, 1000.0]);
    }

    #[test]
    fn unknown_id_lists_valid_ones() {
        let err = preset("fig99").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("fig99") && msg.contains("figB-xxz"), "{msg}");
    }
}
