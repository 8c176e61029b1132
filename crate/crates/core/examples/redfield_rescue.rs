//! Redfield bath coupled through `M_y` relaxes the state across the
//! sector boundary. Coupling through `M_x` cannot.

use parity_anneal::open_dynamics::{
    evolve_adiabatic_me, initial_ground_projector, GammaMode, NoiseSpec, RedfieldModel,
    SpectralDensity,
};
use parity_anneal::spin_algebra::magnetization_operator;
use parity_anneal::{AnnealSchedule, Axis, CollectiveBasis, IntegratorOptions, ProblemKind};

fn main() -> parity_anneal::Result<()> {
    let basis = CollectiveBasis::new(2)?;
    let schedule = AnnealSchedule::new(basis, 1000.0, 100.0, ProblemKind::IsingFc)?;
    let rho0 = initial_ground_projector(&schedule)?;
    for (axis, t_env) in [(Axis::Y, 1.0), (Axis::Y, 10.0), (Axis::Y, 100.0), (Axis::X, 1.0)] {
        let noise = NoiseSpec::allow_symmetric(magnetization_operator(basis, axis))?;
        let bath = SpectralDensity::with_defaults(t_env, GammaMode::Kms)?;
        let model = RedfieldModel::new(noise, bath);
        let tr = evolve_adiabatic_me(&schedule, &rho0, &model, &IntegratorOptions::default(), 51)?;
        println!(
            "A=M_{axis:?} T_env={t_env:<5} ground population {:.4}  energy {:.4}  min eig {:.2e}",
            tr.final_ground_population(),
            tr.final_energy(),
            tr.min_min_eigenvalue()
        );
    }
    Ok(())
}
