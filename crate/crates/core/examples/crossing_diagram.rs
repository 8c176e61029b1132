//! Ground-state parity along the anneal, with and without the XX term.
//!
//! ```text
//! cargo run --example crossing_diagram -- 6
//! ```

use parity_anneal::spectrum::{detect_ground_crossing, sweep_spectrum};
use parity_anneal::{AnnealSchedule, CollectiveBasis, ProblemKind};

fn main() -> parity_anneal::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(2);
    let basis = CollectiveBasis::new(n)?;
    for problem in [ProblemKind::IsingFc, ProblemKind::xxz_default()] {
        for alpha in [0.0, 100.0] {
            let schedule = AnnealSchedule::new(basis, 1000.0, alpha, problem)?;
            let sweep = sweep_spectrum(&schedule, 201)?;
            let crossings = detect_ground_crossing(&sweep)?;
            println!("{basis} {} alpha={alpha}: {} crossing(s)", problem.name(), crossings.len());
            for c in &crossings {
                println!(
                    "  ground sector {} -> {} in s = [{:.6}, {:.6}]",
                    c.sector_before, c.sector_after, c.s_lo, c.s_hi
                );
            }
        }
    }
    Ok(())
}
