//! Collective amplitude damping in Lindblad form, with and without the
//! coherent part of the generator.

use parity_anneal::open_dynamics::{evolve_gksl, initial_ground_projector, GkslModel};
use parity_anneal::{AnnealSchedule, CollectiveBasis, IntegratorOptions, ProblemKind};

fn main() -> parity_anneal::Result<()> {
    let basis = CollectiveBasis::new(2)?;
    let schedule = AnnealSchedule::new(basis, 1000.0, 100.0, ProblemKind::IsingFc)?;
    let rho0 = initial_ground_projector(&schedule)?;
    for coherent in [true, false] {
        for t_env in [0.1, 1.0, 10.0, 100.0, 1000.0] {
            let mut model = GkslModel::new(0.1, t_env)?;
            model.coherent = coherent;
            let tr = evolve_gksl(&schedule, &rho0, &model, &IntegratorOptions::default(), 51)?;
            let rho = tr.final_state();
            println!(
                "coherent={coherent:<5} T_env={t_env:<6} ground {:.4}  all-down {:.4}  purity {:.4}",
                tr.final_ground_population(),
                rho.population_of_m(-1.0).unwrap_or(f64::NAN),
                rho.purity()
            );
        }
    }
    Ok(())
}
