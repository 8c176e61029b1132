//! Closed-system anneal: slower is not better once the ground state
//! changes parity sector.

use parity_anneal::closed_dynamics::{evolve_closed, initial_ground_state};
use parity_anneal::{AnnealSchedule, CollectiveBasis, IntegratorOptions, ProblemKind};

fn main() -> parity_anneal::Result<()> {
    let basis = CollectiveBasis::new(2)?;
    println!("{:>7} {:>8} {:>14} {:>12}", "alpha", "T", "fidelity", "energy");
    for alpha in [0.0, 100.0] {
        for t in [1e1, 1e2, 1e3, 1e4] {
            let schedule = AnnealSchedule::new(basis, t, alpha, ProblemKind::IsingFc)?;
            let psi0 = initial_ground_state(&schedule)?;
            let tr = evolve_closed(&schedule, &psi0, &IntegratorOptions::default(), 11)?;
            println!("{alpha:>7} {t:>8} {:>14.6e} {:>12.6}", tr.final_fidelity(), tr.final_energy());
        }
    }
    Ok(())
}
