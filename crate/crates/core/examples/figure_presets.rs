//! Runs a figure preset into a directory and prints the files written.
//!
//! ```text
//! cargo run --release --example figure_presets -- fig3 out/
//! ```

use std::path::PathBuf;

use parity_anneal::experiments::{figure_ids, preset, run_figure};

fn main() -> parity_anneal::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut args = std::env::args().skip(1);
    let Some(id) = args.next() else {
        for id in figure_ids() {
            println!("{id}: {} run(s)", preset(id)?.len());
        }
        return Ok(());
    };
    let dir = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    for cfg in preset(&id)? {
        println!("--\n{cfg}");
    }
    for path in run_figure(&id, &dir)? {
        println!("{}", path.display());
    }
    Ok(())
}
