//! File formats: graph JSON, spin/trajectory/sweep CSV and VTK export.
//!
//! All writers format floats with the shortest round-trip representation
//! and iterate collections in a fixed order, so identical inputs produce
//! byte-identical files.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anisotropy::SweepRow;
use crate::dynamics::TrajectoryState;
use crate::graph::{BondClass, GraphError, MolecularGraph};
use crate::spin::SpinConfiguration;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("json failure: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Graph document: `{ "n": ..., "coords": [[x,y,z]...], "edges": [[i,j]...],
/// "bond_class": ["single"|"double"|"uniform", ...] }`, 0-based indices.
#[derive(Debug, Serialize, Deserialize)]
struct GraphDocument {
    n: usize,
    coords: Vec<[f64; 3]>,
    edges: Vec<[usize; 2]>,
    bond_class: Vec<BondClass>,
}

pub fn graph_to_json(g: &MolecularGraph) -> Result<String, IoError> {
    let doc = GraphDocument {
        n: g.n_vertices(),
        coords: g.coordinates.clone(),
        edges: g.edges.iter().map(|&(i, j)| [i, j]).collect(),
        bond_class: g.bond_class.clone(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn graph_from_json(text: &str) -> Result<MolecularGraph, IoError> {
    let doc: GraphDocument = serde_json::from_str(text)?;
    if doc.coords.len() != doc.n {
        return Err(GraphError::Structure(format!(
            "document declares {} vertices but carries {} coordinates",
            doc.n,
            doc.coords.len()
        ))
        .into());
    }
    let edges = doc.edges.iter().map(|&[i, j]| (i, j)).collect();
    Ok(MolecularGraph::from_parts(doc.coords, edges, doc.bond_class)?)
}

pub fn write_graph_json(path: &Path, g: &MolecularGraph) -> Result<(), IoError> {
    let mut text = graph_to_json(g)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_graph_json(path: &Path) -> Result<MolecularGraph, IoError> {
    graph_from_json(&fs::read_to_string(path)?)
}

/// Spin CSV: `index,x,y,z,nx,ny,nz` (coordinates, then direction).
pub fn spins_to_csv(g: &MolecularGraph, config: &SpinConfiguration) -> String {
    let mut out = String::from("index,x,y,z,nx,ny,nz\n");
    for (i, (p, n)) in g
        .coordinates
        .iter()
        .zip(&config.directions)
        .enumerate()
    {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            i, p[0], p[1], p[2], n[0], n[1], n[2]
        ));
    }
    out
}

pub fn write_spins_csv(
    path: &Path,
    g: &MolecularGraph,
    config: &SpinConfiguration,
) -> Result<(), IoError> {
    fs::write(path, spins_to_csv(g, config))?;
    Ok(())
}

/// Trajectory CSV: `t,energy,norm_drift,total_moment`.
pub fn trajectory_to_csv(traj: &TrajectoryState) -> String {
    let mut out = String::from("t,energy,norm_drift,total_moment\n");
    for i in 0..traj.times.len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            traj.times[i],
            traj.energy_series[i],
            traj.norm_drift_series[i],
            traj.total_moment_series[i]
        ));
    }
    out
}

pub fn write_trajectory_csv(path: &Path, traj: &TrajectoryState) -> Result<(), IoError> {
    fs::write(path, trajectory_to_csv(traj))?;
    Ok(())
}

/// Anisotropy sweep CSV: `delta,lambda_min,splitting,overlap`.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("delta,lambda_min,splitting,overlap\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.delta, r.lambda_min, r.splitting, r.overlap
        ));
    }
    out
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), IoError> {
    fs::write(path, sweep_to_csv(rows))?;
    Ok(())
}

/// Legacy-VTK polydata: the molecule as a point cloud with bond lines and
/// one vector per point, consumable by standard plotting tools.
pub fn spins_to_vtk(g: &MolecularGraph, config: &SpinConfiguration) -> String {
    let n = g.n_vertices();
    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str("spin directions\n");
    out.push_str("ASCII\n");
    out.push_str("DATASET POLYDATA\n");
    out.push_str(&format!("POINTS {n} double\n"));
    for p in &g.coordinates {
        out.push_str(&format!("{} {} {}\n", p[0], p[1], p[2]));
    }
    out.push_str(&format!("LINES {} {}\n", g.n_edges(), 3 * g.n_edges()));
    for &(i, j) in &g.edges {
        out.push_str(&format!("2 {i} {j}\n"));
    }
    out.push_str(&format!("POINT_DATA {n}\n"));
    out.push_str("VECTORS spin double\n");
    for d in &config.directions {
        out.push_str(&format!("{} {} {}\n", d[0], d[1], d[2]));
    }
    out
}

pub fn write_spins_vtk(
    path: &Path,
    g: &MolecularGraph,
    config: &SpinConfiguration,
) -> Result<(), IoError> {
    let mut file = fs::File::create(path)?;
    file.write_all(spins_to_vtk(g, config).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegrationOptions};
    use crate::graph::{build_c60, build_toy, Toy};
    use crate::spin::{ground_state, CouplingModel};

    #[test]
    fn graph_json_round_trip() {
        let g = build_c60().unwrap();
        let text = graph_to_json(&g).unwrap();
        let back = graph_from_json(&text).unwrap();
        assert_eq!(back.n_vertices(), 60);
        assert_eq!(back.edges, g.edges);
        assert_eq!(back.bond_class, g.bond_class);
        for (a, b) in back.coordinates.iter().zip(&g.coordinates) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn graph_json_shape() {
        let g = build_toy(Toy::Tetrahedron).unwrap();
        let text = graph_to_json(&g).unwrap();
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["n"], 4);
        assert_eq!(value["coords"].as_array().unwrap().len(), 4);
        assert_eq!(value["edges"].as_array().unwrap().len(), 6);
        assert_eq!(value["bond_class"][0], "uniform");
    }

    #[test]
    fn graph_json_rejects_corrupt_documents() {
        let g = build_toy(Toy::Ring(5)).unwrap();
        let text = graph_to_json(&g).unwrap();
        let clipped = text.replace("\"n\": 5", "\"n\": 6");
        assert!(graph_from_json(&clipped).is_err());
        assert!(graph_from_json("{}").is_err());
    }

    #[test]
    fn spin_csv_layout() {
        let g = build_toy(Toy::Ring(6)).unwrap();
        let c = CouplingModel::new(1.0, 1.0).unwrap();
        let gs = ground_state(&g, &c).unwrap();
        let csv = spins_to_csv(&g, &gs);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "index,x,y,z,nx,ny,nz");
        assert_eq!(lines.len(), 7);
        assert!(lines[1].starts_with("0,"));
        assert_eq!(lines[1].split(',').count(), 7);
    }

    #[test]
    fn trajectory_csv_layout() {
        let g = build_toy(Toy::Ring(4)).unwrap();
        let c = CouplingModel::new(1.0, 1.0).unwrap();
        let gs = ground_state(&g, &c).unwrap();
        let traj = integrate(
            &g,
            &c,
            &gs.directions,
            0.5,
            1e-3,
            IntegrationOptions { sample_every: 100, ..Default::default() },
        )
        .unwrap();
        let csv = trajectory_to_csv(&traj);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,energy,norm_drift,total_moment");
        assert_eq!(lines.len(), 1 + traj.times.len());
    }

    #[test]
    fn vtk_structure() {
        let g = build_toy(Toy::Cube).unwrap();
        let c = CouplingModel::new(1.0, 1.0).unwrap();
        let gs = ground_state(&g, &c).unwrap();
        let vtk = spins_to_vtk(&g, &gs);
        assert!(vtk.starts_with("# vtk DataFile Version 3.0\n"));
        assert!(vtk.contains("POINTS 8 double\n"));
        assert!(vtk.contains("LINES 12 36\n"));
        assert!(vtk.contains("VECTORS spin double\n"));
        // One coordinate line per point, one vector line per point.
        assert_eq!(vtk.lines().count(), 5 + 8 + 1 + 12 + 2 + 8);
    }

    #[test]
    fn files_round_trip_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let g = build_toy(Toy::Ring(5)).unwrap();
        let path = dir.path().join("ring5.json");
        write_graph_json(&path, &g).unwrap();
        let back = read_graph_json(&path).unwrap();
        assert_eq!(back.edges, g.edges);

        let c = CouplingModel::new(1.0, 1.0).unwrap();
        let gs = ground_state(&g, &c).unwrap();
        let csv_path = dir.path().join("spins.csv");
        write_spins_csv(&csv_path, &g, &gs).unwrap();
        let text = std::fs::read_to_string(&csv_path).unwrap();
        assert_eq!(text, spins_to_csv(&g, &gs));
    }
}
