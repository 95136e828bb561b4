//! The data-emitting subcommands.

use std::io::Write;
use std::path::Path;

use serde_json::json;

use qfound::qshje::{
    default_energy_step, floyd_trajectory, qshje_residual, reduced_action_from_pair,
    write_action_csv, write_trajectory_csv,
};
use qfound::schrodinger1d::{find_eigenvalues, solution_pair, Potential};

use crate::config::{Purpose, RunConfig};
use crate::{CliError, Format};

pub fn spectrum(
    cfg: &RunConfig,
    pot: &Potential,
    (e_min, e_max): (f64, f64),
    count: usize,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let grid = cfg.grid_for(pot, Purpose::Spectrum)?;
    let found = find_eigenvalues(pot, &grid, e_min, e_max, count)?;
    match format {
        Format::Csv => {
            writeln!(out, "n,energy,nodes")?;
            for (n, (e, nodes)) in found.energies.iter().zip(&found.node_counts).enumerate() {
                writeln!(out, "{n},{e},{nodes}")?;
            }
        }
        Format::Json => {
            let rows: Vec<_> = found
                .energies
                .iter()
                .zip(&found.node_counts)
                .enumerate()
                .map(|(n, (e, nodes))| json!({"n": n, "energy": e, "nodes": nodes}))
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
        }
    }
    eprintln!(
        "spectrum: {} level(s) in [{e_min}, {e_max}] on [{}, {}] x {}",
        found.len(),
        grid.q_min(),
        grid.q_max(),
        grid.len()
    );
    Ok(())
}

pub fn trajectory(
    cfg: &RunConfig,
    pot: &Potential,
    energy: f64,
    energy_step: Option<f64>,
    format: Format,
    action_out: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let grid = cfg.grid_for(pot, Purpose::Trajectory)?;
    let de = energy_step.unwrap_or_else(|| default_energy_step(energy));
    let traj = floyd_trajectory(pot, energy, &grid, de)?;
    let pair = solution_pair(pot, energy, &grid)?;
    let action = reduced_action_from_pair(&pair, pot.hbar)?;
    let residual = qshje_residual(&action, pot)?;

    match format {
        Format::Csv => write_trajectory_csv(&mut *out, &traj)?,
        Format::Json => {
            let rows: Vec<_> = traj
                .samples
                .iter()
                .map(|s| json!({"t": s.t, "q": s.q, "p": s.p}))
                .collect();
            writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
        }
    }
    if let Some(path) = action_out {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        write_action_csv(&mut file, &action, pot)?;
        file.flush()?;
    }
    let tol = cfg.tolerances.get("residual");
    eprintln!(
        "trajectory: {} samples, E = {energy}, dE = {de:e}; QSHJE residual {residual:.3e} ({} tolerance {tol:e}); min|p| {:.3e}",
        traj.samples.len(),
        if residual < tol { "within" } else { "ABOVE" },
        action.min_abs_momentum()
    );
    Ok(())
}
