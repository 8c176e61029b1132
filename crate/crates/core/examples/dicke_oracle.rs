//! Checks the symmetric-subspace propagation against the full 2^N register.

use parity_anneal::closed_dynamics::{evolve_closed, evolve_full_space_oracle, initial_ground_state};
use parity_anneal::{AnnealSchedule, CollectiveBasis, IntegratorOptions, ProblemKind};

fn main() -> parity_anneal::Result<()> {
    let opts = IntegratorOptions::default();
    for n in 1..=4 {
        for alpha in [0.0, 100.0] {
            let schedule = AnnealSchedule::new(CollectiveBasis::new(n)?, 100.0, alpha, ProblemKind::IsingFc)?;
            let dicke = evolve_closed(&schedule, &initial_ground_state(&schedule)?, &opts, 101)?;
            let full = evolve_full_space_oracle(&schedule, &opts, 101)?;
            let dev = dicke
                .energy
                .iter()
                .zip(&full.energy)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let leak = full.symmetric_weight.iter().map(|w| 1.0 - w).fold(0.0, f64::max);
            println!("N={n} alpha={alpha:<5} max |dE| {dev:.2e}  leakage {leak:.1e}");
        }
    }
    Ok(())
}
