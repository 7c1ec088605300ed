//! Molecular graphs: the C60 truncated icosahedron and small toy polyhedra.
//!
//! Every downstream computation consumes a [`MolecularGraph`]: vertex
//! coordinates, an undirected edge list with bond classes, and per-vertex
//! neighbor lists. C60 is generated from the icosahedral coordinate orbit,
//! edges are detected by distance thresholding, and bond classes are
//! assigned combinatorially (an edge shared by two hexagons is a double
//! bond) so the idealized geometry still carries classes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spin::CouplingModel;

/// Golden ratio; all icosahedral vertex orbits are built from it.
pub(crate) const PHI: f64 = 1.618033988749895;

/// Edge detection accepts pairs closer than this factor times the minimum
/// inter-vertex distance. Separates both C60 bond lengths (ratio 1.45/1.40)
/// from the next-nearest distance (about 1.6 bond lengths).
const EDGE_DETECTION_FACTOR: f64 = 1.2;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("structural validation failed: {0}")]
    Structure(String),
    #[error("ring size must be at least 3, got {0}")]
    RingTooSmall(usize),
    #[error("face tracing requires a polyhedral graph: {0}")]
    NotPolyhedral(String),
}

/// Bond classification of an edge.
///
/// C60 carries `Single` (pentagon edges) and `Double` (hexagon-hexagon
/// fusions); toy polyhedra are `Uniform`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BondClass {
    Single,
    Double,
    Uniform,
}

/// Geometry variant for the C60 construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum C60Geometry {
    /// All 90 edges of unit length (regular truncated icosahedron).
    Idealized,
    /// Two bond lengths, 1.45 (pentagon edges) and 1.40 (hexagon fusions),
    /// from truncating the icosahedron off the midpoint ratio.
    JahnTeller,
}

/// Toy polyhedra used as analytically tractable references.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Toy {
    /// Complete graph K4 on the regular tetrahedron.
    Tetrahedron,
    /// Cube graph Q3.
    Cube,
    /// Cycle C_k on a planar regular polygon, k >= 3.
    Ring(usize),
}

/// Undirected molecular graph with coordinates and bond classes.
///
/// Constructed through [`build_c60`], [`build_toy`] or [`MolecularGraph::from_parts`];
/// all constructors validate the structural invariants (no self-loops or
/// duplicate edges, neighbor lists consistent with the edge list, connected).
#[derive(Debug, Clone)]
pub struct MolecularGraph {
    /// Per-vertex position in model units.
    pub coordinates: Vec<[f64; 3]>,
    /// Unordered vertex index pairs, stored as (i, j) with i < j, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Bond class per edge, parallel to `edges`.
    pub bond_class: Vec<BondClass>,
    /// Sorted adjacency list per vertex, consistent with `edges`.
    pub neighbor_lists: Vec<Vec<usize>>,
}

impl MolecularGraph {
    /// Assembles a graph from coordinates, edges and bond classes,
    /// rebuilding neighbor lists and validating every invariant.
    pub fn from_parts(
        coordinates: Vec<[f64; 3]>,
        mut edges: Vec<(usize, usize)>,
        bond_class: Vec<BondClass>,
    ) -> Result<Self, GraphError> {
        let n = coordinates.len();
        if n == 0 {
            return Err(GraphError::Structure("graph has no vertices".into()));
        }
        if edges.len() != bond_class.len() {
            return Err(GraphError::Structure(format!(
                "{} edges but {} bond classes",
                edges.len(),
                bond_class.len()
            )));
        }
        for e in edges.iter_mut() {
            if e.0 == e.1 {
                return Err(GraphError::Structure(format!("self-loop at vertex {}", e.0)));
            }
            if e.0 >= n || e.1 >= n {
                return Err(GraphError::Structure(format!(
                    "edge ({}, {}) out of range for {} vertices",
                    e.0, e.1, n
                )));
            }
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        // Canonical edge order: lexicographic, classes carried along.
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.sort_unstable_by_key(|&e| edges[e]);
        let edges: Vec<(usize, usize)> = order.iter().map(|&e| edges[e]).collect();
        let bond_class: Vec<BondClass> = order.iter().map(|&e| bond_class[e]).collect();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::Structure("duplicate edge".into()));
        }
        let mut neighbor_lists = vec![Vec::new(); n];
        for &(i, j) in &edges {
            neighbor_lists[i].push(j);
            neighbor_lists[j].push(i);
        }
        for list in &mut neighbor_lists {
            list.sort_unstable();
        }
        let g = Self {
            coordinates,
            edges,
            bond_class,
            neighbor_lists,
        };
        if !g.is_connected() {
            return Err(GraphError::Structure("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn n_vertices(&self) -> usize {
        self.coordinates.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.neighbor_lists[vertex].len()
    }

    pub fn neighbors(&self, vertex: usize) -> &[usize] {
        &self.neighbor_lists[vertex]
    }

    /// Euclidean length of edge `e` (index into `edges`).
    pub fn edge_length(&self, e: usize) -> f64 {
        let (i, j) = self.edges[e];
        dist(self.coordinates[i], self.coordinates[j])
    }

    fn is_connected(&self) -> bool {
        let n = self.n_vertices();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.neighbor_lists[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }
}

/// Symmetric coupling matrix of the nearest-neighbor graph.
///
/// Entry (i, j) is the bond-class weight when {i, j} is an edge and zero
/// otherwise; the diagonal is zero. For the uniform model this is the 0/1
/// adjacency matrix whose rows each sum to the vertex degree.
#[derive(Debug, Clone)]
pub struct NeighborMatrix {
    n: usize,
    data: Vec<f64>,
}

impl NeighborMatrix {
    /// Wraps a dense row-major square array, rejecting asymmetry above 1e-12.
    pub fn from_dense(n: usize, data: Vec<f64>) -> Result<Self, GraphError> {
        if data.len() != n * n {
            return Err(GraphError::Structure(format!(
                "dense data length {} does not match order {}",
                data.len(),
                n
            )));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (data[i * n + j] - data[j * n + i]).abs() > 1e-12 {
                    return Err(GraphError::Structure(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// y = A x.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.data[i * n..(i + 1) * n];
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.data[i * self.n..(i + 1) * self.n].iter().sum()
    }
}

/// Builds the coupling matrix of `g` with per-bond-class weights from `c`.
pub fn neighbor_matrix(g: &MolecularGraph, c: &CouplingModel) -> NeighborMatrix {
    let n = g.n_vertices();
    let mut data = vec![0.0; n * n];
    for (e, &(i, j)) in g.edges.iter().enumerate() {
        let w = c.bond_weight(g.bond_class[e]);
        data[i * n + j] = w;
        data[j * n + i] = w;
    }
    NeighborMatrix { n, data }
}

/// Builds the idealized C60 truncated icosahedron (unit edge length).
pub fn build_c60() -> Result<MolecularGraph, GraphError> {
    build_c60_with(C60Geometry::Idealized)
}

/// Builds C60 in the requested geometry.
///
/// Vertices are numbered by lexicographic coordinate sort so the output is
/// reproducible; edges come from nearest-neighbor distance thresholding and
/// bond classes from face tracing.
pub fn build_c60_with(geometry: C60Geometry) -> Result<MolecularGraph, GraphError> {
    let mut coords = match geometry {
        C60Geometry::Idealized => c60_orbit_coordinates(),
        C60Geometry::JahnTeller => c60_truncation_coordinates(1.45, 1.40),
    };
    sort_coordinates(&mut coords);
    let edges = detect_edges(&coords);

    let n = coords.len();
    if n != 60 || edges.len() != 90 {
        return Err(GraphError::Structure(format!(
            "expected 60 vertices and 90 edges, got {} and {}",
            n,
            edges.len()
        )));
    }
    let mut neighbor_lists = vec![Vec::new(); n];
    for &(i, j) in &edges {
        neighbor_lists[i].push(j);
        neighbor_lists[j].push(i);
    }
    for list in &mut neighbor_lists {
        list.sort_unstable();
        if list.len() != 3 {
            return Err(GraphError::Structure(format!(
                "vertex degree {} (expected 3)",
                list.len()
            )));
        }
    }

    // Classify bonds off the face structure: hexagon|hexagon fusion => double.
    let faces = trace_faces(&coords, &neighbor_lists)?;
    let bond_class = classify_bonds(&edges, &faces)?;

    let double_count = bond_class.iter().filter(|&&b| b == BondClass::Double).count();
    if double_count != 30 {
        return Err(GraphError::Structure(format!(
            "expected 30 double bonds, found {double_count}"
        )));
    }
    let mut doubles_at = vec![0usize; n];
    for (e, &(i, j)) in edges.iter().enumerate() {
        if bond_class[e] == BondClass::Double {
            doubles_at[i] += 1;
            doubles_at[j] += 1;
        }
    }
    if doubles_at.iter().any(|&d| d != 1) {
        return Err(GraphError::Structure(
            "some vertex is not incident to exactly one double bond".into(),
        ));
    }

    MolecularGraph::from_parts(coords, edges, bond_class)
}

/// Builds a toy polyhedron with uniform bond class.
pub fn build_toy(toy: Toy) -> Result<MolecularGraph, GraphError> {
    match toy {
        Toy::Tetrahedron => {
            // Alternate cube corners, scaled to unit edge.
            let s = 1.0 / (2.0 * std::f64::consts::SQRT_2);
            let coords = vec![
                [s, s, s],
                [s, -s, -s],
                [-s, s, -s],
                [-s, -s, s],
            ];
            let edges = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            let bond_class = vec![BondClass::Uniform; 6];
            MolecularGraph::from_parts(coords, edges, bond_class)
        }
        Toy::Cube => {
            let mut coords = Vec::with_capacity(8);
            for x in [-0.5, 0.5] {
                for y in [-0.5, 0.5] {
                    for z in [-0.5, 0.5] {
                        coords.push([x, y, z]);
                    }
                }
            }
            let mut edges = Vec::with_capacity(12);
            for i in 0..8 {
                for j in (i + 1)..8 {
                    if dist(coords[i], coords[j]) < 1.1 {
                        edges.push((i, j));
                    }
                }
            }
            let bond_class = vec![BondClass::Uniform; edges.len()];
            MolecularGraph::from_parts(coords, edges, bond_class)
        }
        Toy::Ring(k) => {
            if k < 3 {
                return Err(GraphError::RingTooSmall(k));
            }
            let radius = 0.5 / (std::f64::consts::PI / k as f64).sin();
            let coords = (0..k)
                .map(|i| {
                    let a = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                    [radius * a.cos(), radius * a.sin(), 0.0]
                })
                .collect();
            let edges = (0..k).map(|i| (i, (i + 1) % k)).collect();
            let bond_class = vec![BondClass::Uniform; k];
            MolecularGraph::from_parts(coords, edges, bond_class)
        }
    }
}

/// Counts faces by size, tracing the rotation system induced by the
/// coordinates. Rejects inputs that are not polyhedral (any vertex of
/// degree < 3, or a trace that violates the Euler formula).
pub fn face_census(g: &MolecularGraph) -> Result<BTreeMap<usize, usize>, GraphError> {
    let faces = trace_faces(&g.coordinates, &g.neighbor_lists)?;
    let mut census = BTreeMap::new();
    for f in &faces {
        *census.entry(f.len()).or_insert(0) += 1;
    }
    Ok(census)
}

/// The faces themselves, as vertex cycles. Same preconditions as
/// [`face_census`].
pub fn faces(g: &MolecularGraph) -> Result<Vec<Vec<usize>>, GraphError> {
    trace_faces(&g.coordinates, &g.neighbor_lists)
}

// ---------------------------------------------------------------------------
// Coordinate generation
// ---------------------------------------------------------------------------

/// The 60 vertices of the regular truncated icosahedron, scaled to unit
/// edge length: even permutations of (0, +-1, +-3p), (+-1, +-(2+p), +-2p)
/// and (+-p, +-2, +-(2p+1)) with p the golden ratio, halved.
fn c60_orbit_coordinates() -> Vec<[f64; 3]> {
    let base = [
        [0.0, 1.0, 3.0 * PHI],
        [1.0, 2.0 + PHI, 2.0 * PHI],
        [PHI, 2.0, 2.0 * PHI + 1.0],
    ];
    let mut seen: Vec<[i64; 3]> = Vec::new();
    let mut coords = Vec::with_capacity(60);
    for b in base {
        for rot in 0..3 {
            let p = [b[rot % 3], b[(rot + 1) % 3], b[(rot + 2) % 3]];
            for signs in 0..8u32 {
                let q = [
                    if signs & 1 == 0 { p[0] } else { -p[0] },
                    if signs & 2 == 0 { p[1] } else { -p[1] },
                    if signs & 4 == 0 { p[2] } else { -p[2] },
                ];
                let key = coord_key(q);
                if !seen.contains(&key) {
                    seen.push(key);
                    coords.push([0.5 * q[0], 0.5 * q[1], 0.5 * q[2]]);
                }
            }
        }
    }
    debug_assert_eq!(coords.len(), 60);
    coords
}

/// C60 with two bond lengths: each icosahedron edge of length
/// `2*single + double` is cut at `single` from both ends, leaving the
/// hexagon-fusion bond of length `double` in the middle and pentagon
/// bonds of length `single` around each original vertex.
fn c60_truncation_coordinates(single: f64, double: f64) -> Vec<[f64; 3]> {
    // Icosahedron: cyclic permutations of (0, +-1, +-PHI); edge length 2.
    let mut ico = Vec::with_capacity(12);
    for rot in 0..3 {
        for sy in [-1.0, 1.0] {
            for sz in [-1.0, 1.0] {
                let p = [0.0, sy, sz * PHI];
                ico.push([p[(3 - rot) % 3], p[(4 - rot) % 3], p[(5 - rot) % 3]]);
            }
        }
    }
    let scale = (2.0 * single + double) / 2.0;
    for p in &mut ico {
        for c in p.iter_mut() {
            *c *= scale;
        }
    }
    let edge_len = 2.0 * scale;
    let t = single / (2.0 * single + double);
    let mut coords = Vec::with_capacity(60);
    for i in 0..12 {
        for j in 0..12 {
            if i == j {
                continue;
            }
            if (dist(ico[i], ico[j]) - edge_len).abs() < 1e-9 * edge_len {
                coords.push([
                    ico[i][0] + t * (ico[j][0] - ico[i][0]),
                    ico[i][1] + t * (ico[j][1] - ico[i][1]),
                    ico[i][2] + t * (ico[j][2] - ico[i][2]),
                ]);
            }
        }
    }
    debug_assert_eq!(coords.len(), 60);
    coords
}

/// Deterministic vertex numbering: lexicographic sort on coordinates
/// rounded to 1e-9, which is far below any inter-vertex separation.
fn sort_coordinates(coords: &mut [[f64; 3]]) {
    coords.sort_by_key(|&p| coord_key(p));
}

fn coord_key(p: [f64; 3]) -> [i64; 3] {
    [round9(p[0]), round9(p[1]), round9(p[2])]
}

fn round9(x: f64) -> i64 {
    let r = (x * 1e9).round();
    if r == 0.0 {
        0 // collapse -0.0
    } else {
        r as i64
    }
}

/// Connects every pair closer than `EDGE_DETECTION_FACTOR` times the
/// minimum inter-vertex distance.
fn detect_edges(coords: &[[f64; 3]]) -> Vec<(usize, usize)> {
    let n = coords.len();
    let mut min_d = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            min_d = min_d.min(dist(coords[i], coords[j]));
        }
    }
    let threshold = EDGE_DETECTION_FACTOR * min_d;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if dist(coords[i], coords[j]) <= threshold {
                edges.push((i, j));
            }
        }
    }
    edges
}

pub(crate) fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

// ---------------------------------------------------------------------------
// Face tracing
// ---------------------------------------------------------------------------

/// Traces the faces of a convex polyhedral embedding.
///
/// Neighbors of each vertex are ordered by angle around the outward radial
/// direction; faces are the orbits of the induced next-edge permutation on
/// directed edges. The Euler formula V - E + F = 2 is verified.
fn trace_faces(
    coords: &[[f64; 3]],
    neighbor_lists: &[Vec<usize>],
) -> Result<Vec<Vec<usize>>, GraphError> {
    let n = coords.len();
    if let Some(v) = (0..n).find(|&v| neighbor_lists[v].len() < 3) {
        return Err(GraphError::NotPolyhedral(format!(
            "vertex {v} has degree {} < 3",
            neighbor_lists[v].len()
        )));
    }

    let mut centroid = [0.0; 3];
    for p in coords {
        for k in 0..3 {
            centroid[k] += p[k] / n as f64;
        }
    }

    // Cyclic neighbor order per vertex (counterclockwise seen from outside).
    let mut rings: Vec<Vec<usize>> = Vec::with_capacity(n);
    for (v, &coord) in coords.iter().enumerate() {
        let out = normalize(sub(coord, centroid));
        // Tangent frame: pick the axis least aligned with `out`.
        let axis = smallest_component_axis(out);
        let t1 = normalize(cross(out, axis));
        let t2 = cross(out, t1);
        let mut ring: Vec<(f64, usize)> = neighbor_lists[v]
            .iter()
            .map(|&w| {
                let d = sub(coords[w], coords[v]);
                (f64::atan2(dot(d, t2), dot(d, t1)), w)
            })
            .collect();
        ring.sort_by(|a, b| a.0.total_cmp(&b.0));
        rings.push(ring.into_iter().map(|(_, w)| w).collect());
    }

    // Orbit decomposition of directed edges under (u -> v) => (v -> succ(u)).
    let mut visited: BTreeMap<(usize, usize), bool> = BTreeMap::new();
    for (v, nbrs) in neighbor_lists.iter().enumerate() {
        for &w in nbrs {
            visited.insert((v, w), false);
        }
    }
    let n_directed = visited.len();
    let mut faces = Vec::new();
    for v in 0..n {
        for &w in &neighbor_lists[v] {
            if visited[&(v, w)] {
                continue;
            }
            let mut face = Vec::new();
            let (mut a, mut b) = (v, w);
            loop {
                *visited.get_mut(&(a, b)).unwrap() = true;
                face.push(a);
                let ring = &rings[b];
                let pos = ring.iter().position(|&x| x == a).unwrap();
                let c = ring[(pos + 1) % ring.len()];
                a = b;
                b = c;
                if (a, b) == (v, w) {
                    break;
                }
                if face.len() > n_directed {
                    return Err(GraphError::NotPolyhedral(
                        "face trace did not close".into(),
                    ));
                }
            }
            let mut uniq = face.clone();
            uniq.sort_unstable();
            uniq.dedup();
            if uniq.len() != face.len() {
                return Err(GraphError::NotPolyhedral(
                    "face trace revisits a vertex".into(),
                ));
            }
            faces.push(face);
        }
    }

    let e = n_directed / 2;
    if n as i64 - e as i64 + faces.len() as i64 != 2 {
        return Err(GraphError::NotPolyhedral(format!(
            "Euler check failed: V={} E={} F={}",
            n,
            e,
            faces.len()
        )));
    }
    Ok(faces)
}

/// Double bond iff both incident faces are hexagons.
fn classify_bonds(
    edges: &[(usize, usize)],
    faces: &[Vec<usize>],
) -> Result<Vec<BondClass>, GraphError> {
    let mut size_of: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for f in faces {
        let k = f.len();
        for i in 0..k {
            size_of.insert((f[i], f[(i + 1) % k]), k);
        }
    }
    edges
        .iter()
        .map(|&(i, j)| {
            let a = size_of.get(&(i, j));
            let b = size_of.get(&(j, i));
            match (a, b) {
                (Some(&a), Some(&b)) => Ok(if a == 6 && b == 6 {
                    BondClass::Double
                } else {
                    BondClass::Single
                }),
                _ => Err(GraphError::NotPolyhedral(format!(
                    "edge ({i}, {j}) missing from face trace"
                ))),
            }
        })
        .collect()
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(a: [f64; 3]) -> [f64; 3] {
    let n = dot(a, a).sqrt();
    [a[0] / n, a[1] / n, a[2] / n]
}

fn smallest_component_axis(v: [f64; 3]) -> [f64; 3] {
    let abs = [v[0].abs(), v[1].abs(), v[2].abs()];
    if abs[0] <= abs[1] && abs[0] <= abs[2] {
        [1.0, 0.0, 0.0]
    } else if abs[1] <= abs[2] {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    }
}
