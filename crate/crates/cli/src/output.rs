//! CSV and VTK writers. Floats use 17 significant digits so output is
//! exact and byte-stable across runs.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use maxwell_newmark::fem::{BoxGrid, FemSnapshot};
use maxwell_newmark::{DissipationRow, EnergyLedger, Trajectory};

use crate::error::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

/// Writes `header` then one comma-joined line per row.
pub fn write_csv<I>(path: &Path, header: &str, rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut out = create(path)?;
    let write = || -> std::io::Result<()> {
        writeln!(out, "{header}")?;
        for row in rows {
            writeln!(out, "{}", row.join(","))?;
        }
        out.flush()
    };
    write().map_err(|e| CliError::io(path, e))
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let cells = traj.states.first().map_or(0, |s| s.cell_forces.len());
    let mut header = String::from("t,r,v,a");
    for p in 1..=cells {
        let _ = write!(header, ",f_{p}");
    }
    let rows = traj.states.iter().map(|s| {
        let mut row = vec![num(s.time), num(s.displacement), num(s.velocity), num(s.acceleration)];
        row.extend(s.cell_forces.iter().map(|&f| num(f)));
        row
    });
    write_csv(path, &header, rows)
}

pub fn write_energy(path: &Path, ledger: &EnergyLedger) -> Result<(), CliError> {
    let rows = ledger
        .entries
        .iter()
        .map(|e| vec![num(e.time), num(e.internal), num(e.dissipated), num(e.work), num(e.artificial)]);
    write_csv(path, "t,E_int,D_d,W_d,Delta_d", rows)
}

pub fn write_report(path: &Path, rows: &[DissipationRow]) -> Result<(), CliError> {
    let rows = rows
        .iter()
        .map(|r| vec![num(r.dt), num(r.artificial_ratio), num(r.dissipation_ratio)]);
    write_csv(path, "dt,delta_ratio,D_over_W", rows)
}

pub fn write_probe(path: &Path, times: &[f64], history: &[[f64; 3]]) -> Result<(), CliError> {
    let rows = times
        .iter()
        .zip(history)
        .map(|(&t, u)| vec![num(t), num(u[0]), num(u[1]), num(u[2])]);
    write_csv(path, "t,ux,uy,uz", rows)
}

/// Legacy ASCII VTK structured grid with nodal displacement and the
/// element-averaged total stress as a symmetric tensor.
pub fn write_vtk(path: &Path, grid: &BoxGrid, snapshot: &FemSnapshot) -> Result<(), CliError> {
    let mut out = create(path)?;
    let [nx, ny, nz] = grid.nodes_per_axis();
    let nodes = grid.node_count();
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "# vtk DataFile Version 3.0")?;
        writeln!(out, "maxwell-newmark step {} t={}", snapshot.step, num(snapshot.time))?;
        writeln!(out, "ASCII")?;
        writeln!(out, "DATASET STRUCTURED_GRID")?;
        writeln!(out, "DIMENSIONS {nx} {ny} {nz}")?;
        writeln!(out, "POINTS {nodes} double")?;
        for n in 0..nodes {
            let x = grid.node_position(n);
            writeln!(out, "{} {} {}", num(x[0]), num(x[1]), num(x[2]))?;
        }
        writeln!(out, "POINT_DATA {nodes}")?;
        writeln!(out, "VECTORS displacement double")?;
        for u in snapshot.displacement.chunks_exact(3) {
            writeln!(out, "{} {} {}", num(u[0]), num(u[1]), num(u[2]))?;
        }
        writeln!(out, "CELL_DATA {}", grid.element_count())?;
        writeln!(out, "TENSORS stress double")?;
        for s in &snapshot.element_stress {
            // Voigt order xx, yy, zz, yz, xz, xy
            writeln!(out, "{} {} {}", num(s[0]), num(s[5]), num(s[4]))?;
            writeln!(out, "{} {} {}", num(s[5]), num(s[1]), num(s[3]))?;
            writeln!(out, "{} {} {}", num(s[4]), num(s[3]), num(s[2]))?;
            writeln!(out)?;
        }
        out.flush()
    };
    write().map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        let x = 0.1_f64 + 0.2;
        assert_eq!(num(x), "3.0000000000000004e-1");
        assert_eq!(num(x).parse::<f64>().unwrap(), x);
        assert_eq!(num(0.0), "0.0000000000000000e0");
    }

    #[test]
    fn vtk_layout() {
        let grid = BoxGrid::new([1, 1, 1], [1.0; 3]).unwrap();
        let snap = FemSnapshot {
            step: 3,
            time: 0.3,
            displacement: vec![0.0; 24],
            element_stress: vec![[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.vtk");
        write_vtk(&path, &grid, &snap).unwrap();
        let text = fs::read_to_string(path).unwrap();
        assert!(text.contains("DIMENSIONS 2 2 2"));
        assert!(text.contains("POINTS 8 double"));
        assert_eq!(text.lines().filter(|l| l.split(' ').count() == 3).count(), 3 + 8 + 8 + 3);
    }
}
