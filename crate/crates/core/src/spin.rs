//! Spin configurations: ground-state assembly from the bottom eigenspace,
//! exchange energy, stationarity residuals and frustration diagnostics.
//!
//! A configuration assigns one unit 3-vector per vertex. The exchange
//! energy is E = (J S^2 / 2) sum_i sum_{k in nbr(i)} w_ik n_i . n_k, and
//! for any unit-vector configuration E >= (J S^2 / 2) N lambda_min, so a
//! state that attains the bound is a certified global minimum.

use serde::Serialize;
use thiserror::Error;

use crate::eigen::{degenerate_group, solve_symmetric, EigenError, GroupSelector};
use crate::graph::{face_census, neighbor_matrix, BondClass, GraphError, MolecularGraph};

/// Angular threshold for the greedy sublattice clustering.
const SUBLATTICE_ANGLE_DEG: f64 = 10.0;
/// Unit-norm tolerance accepted on input directions.
const UNIT_INPUT_TOL: f64 = 1e-6;
/// Constancy tolerance on the per-site norm profile of the eigenspace.
const NORM_PROFILE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SpinError {
    #[error("coupling constant J must be positive, got {0}")]
    NonPositiveJ(f64),
    #[error("spin magnitude S must be positive, got {0}")]
    NonPositiveS(f64),
    #[error("bond-class multipliers must be positive, got {0}")]
    NonPositiveMultiplier(f64),
    #[error(
        "bottom eigenspace multiplicity {0} exceeds 3; the eigenvector \
         construction cannot close into 3-component unit vectors"
    )]
    Degeneracy(usize),
    #[error(
        "per-site norm profile of the bottom eigenspace is not constant \
         (variance {variance:.3e}); use the optimizer fallback"
    )]
    NormProfile { variance: f64 },
    #[error("direction at vertex {index} is not unit (norm {norm})")]
    NonUnitDirection { index: usize, norm: f64 },
    #[error("{count} directions supplied for {expected} vertices")]
    DirectionCount { count: usize, expected: usize },
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Exchange coupling: constant J > 0 (antiferromagnetic), spin magnitude S,
/// and relative per-bond-class multipliers.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CouplingModel {
    pub j: f64,
    pub s: f64,
    /// Multiplier on single (pentagon) bonds.
    pub single: f64,
    /// Multiplier on double (hexagon-fusion) bonds.
    pub double: f64,
}

impl CouplingModel {
    pub fn new(j: f64, s: f64) -> Result<Self, SpinError> {
        Self::with_multipliers(j, s, 1.0, 1.0)
    }

    pub fn with_multipliers(
        j: f64,
        s: f64,
        single: f64,
        double: f64,
    ) -> Result<Self, SpinError> {
        if j.is_nan() || j <= 0.0 {
            return Err(SpinError::NonPositiveJ(j));
        }
        if s.is_nan() || s <= 0.0 {
            return Err(SpinError::NonPositiveS(s));
        }
        for m in [single, double] {
            if m.is_nan() || m <= 0.0 {
                return Err(SpinError::NonPositiveMultiplier(m));
            }
        }
        Ok(Self { j, s, single, double })
    }

    /// J S^2, the natural energy unit.
    pub fn energy_scale(&self) -> f64 {
        self.j * self.s * self.s
    }

    pub fn bond_weight(&self, class: BondClass) -> f64 {
        match class {
            BondClass::Single => self.single,
            BondClass::Double => self.double,
            BondClass::Uniform => 1.0,
        }
    }
}

impl Default for CouplingModel {
    /// J = 1 with the carbon sp3 spin magnitude S = 2.
    fn default() -> Self {
        Self { j: 1.0, s: 2.0, single: 1.0, double: 1.0 }
    }
}

/// A spin configuration with its derived scalars.
#[derive(Debug, Clone)]
pub struct SpinConfiguration {
    /// Unit direction per vertex.
    pub directions: Vec<[f64; 3]>,
    /// Exchange energy, computed from the pairwise sum.
    pub energy: f64,
    /// max_i | sum_k w_ik n_k - lambda_i n_i |; for spectrally constructed
    /// states lambda_i is the bottom eigenvalue, otherwise the per-site
    /// Rayleigh coefficient n_i . h_i.
    pub stationarity_residual: f64,
    /// Per-vertex lambda_i = n_i . h_i.
    pub lambda_site: Vec<f64>,
}

impl SpinConfiguration {
    /// Wraps raw directions, validating unit norms and deriving energy,
    /// per-site lambda and the gauge-free stationarity residual.
    pub fn from_directions(
        g: &MolecularGraph,
        c: &CouplingModel,
        directions: Vec<[f64; 3]>,
    ) -> Result<Self, SpinError> {
        check_directions(g, &directions)?;
        let energy = energy(g, c, &directions)?;
        let fields = local_fields(g, c, &directions);
        let lambda_site: Vec<f64> = directions
            .iter()
            .zip(&fields)
            .map(|(n, h)| dot3(*n, *h))
            .collect();
        let stationarity_residual = directions
            .iter()
            .zip(&fields)
            .zip(&lambda_site)
            .map(|((n, h), l)| norm3(sub3(*h, scale3(*n, *l))))
            .fold(0.0f64, f64::max);
        Ok(Self {
            directions,
            energy,
            stationarity_residual,
            lambda_site,
        })
    }
}

/// Constructs the spectral ground state from the bottom eigenspace.
///
/// With multiplicity m <= 3 and a constant per-site norm profile, each
/// vertex receives n_i = sqrt(N/m) (u_i, v_i, w_i) with missing components
/// padded by zero. The per-site norm constancy check is the precise form
/// of the vector-length congruence checkup: over any orthonormal basis of
/// the eigenspace the per-site square sum must equal m/N everywhere.
pub fn ground_state(
    g: &MolecularGraph,
    c: &CouplingModel,
) -> Result<SpinConfiguration, SpinError> {
    let m = neighbor_matrix(g, c);
    let es = solve_symmetric(&m)?;
    let bottom = degenerate_group(&es, GroupSelector::Min)?;
    let mult = bottom.multiplicity;
    if mult > 3 {
        return Err(SpinError::Degeneracy(mult));
    }
    let n = g.n_vertices();

    // Per-site norm profile before scaling.
    let profile: Vec<f64> = (0..n)
        .map(|i| bottom.basis.iter().map(|v| v[i] * v[i]).sum::<f64>())
        .collect();
    let expected = mult as f64 / n as f64;
    let max_dev = profile
        .iter()
        .map(|p| (p - expected).abs())
        .fold(0.0f64, f64::max);
    if max_dev > NORM_PROFILE_TOL {
        let mean = profile.iter().sum::<f64>() / n as f64;
        let variance =
            profile.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / n as f64;
        return Err(SpinError::NormProfile { variance });
    }

    let scale = (n as f64 / mult as f64).sqrt();
    let directions: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let mut d = [0.0; 3];
            for (a, v) in bottom.basis.iter().enumerate() {
                d[a] = scale * v[i];
            }
            d
        })
        .collect();

    let energy = energy(g, c, &directions)?;
    let fields = local_fields(g, c, &directions);
    let lambda = bottom.value;
    let stationarity_residual = directions
        .iter()
        .zip(&fields)
        .map(|(dir, h)| norm3(sub3(*h, scale3(*dir, lambda))))
        .fold(0.0f64, f64::max);
    let lambda_site = directions
        .iter()
        .zip(&fields)
        .map(|(dir, h)| dot3(*dir, *h))
        .collect();
    Ok(SpinConfiguration {
        directions,
        energy,
        stationarity_residual,
        lambda_site,
    })
}

/// Exchange energy of an arbitrary unit-vector configuration:
/// (J S^2 / 2) over ordered pairs, i.e. J S^2 over undirected edges.
pub fn energy(
    g: &MolecularGraph,
    c: &CouplingModel,
    directions: &[[f64; 3]],
) -> Result<f64, SpinError> {
    check_directions(g, directions)?;
    let mut sum = 0.0;
    for (e, &(i, j)) in g.edges.iter().enumerate() {
        sum += c.bond_weight(g.bond_class[e]) * dot3(directions[i], directions[j]);
    }
    Ok(c.energy_scale() * sum)
}

/// The hypothetical minimum assuming every bond could be antiparallel:
/// -(J S^2 / 2) sum_i sum_k w_ik = -J S^2 sum of bond weights.
pub fn hypothetical_minimum(g: &MolecularGraph, c: &CouplingModel) -> f64 {
    let weight_sum: f64 = g
        .bond_class
        .iter()
        .map(|&class| c.bond_weight(class))
        .sum();
    -c.energy_scale() * weight_sum
}

/// Spectral lower bound (J S^2 / 2) N lambda_min for the given couplings.
pub fn spectral_bound(g: &MolecularGraph, c: &CouplingModel) -> Result<f64, SpinError> {
    let m = neighbor_matrix(g, c);
    let es = solve_symmetric(&m)?;
    Ok(0.5 * c.energy_scale() * g.n_vertices() as f64 * es.eigenvalues[0])
}

/// Frustration diagnostics of a configuration on its graph.
#[derive(Debug, Clone, Serialize)]
pub struct FrustrationReport {
    /// Dot product per edge, in graph edge order.
    pub edge_dots: Vec<f64>,
    /// Histogram of edge dots over 20 equal bins spanning [-1, 1].
    pub histogram: Vec<usize>,
    /// (face size, mean bond dot) per face; empty when the graph is not
    /// polyhedral (rings have no face structure to report).
    pub face_mean_dots: Vec<(usize, f64)>,
    /// (E - E_hyp_min) / |E_hyp_min|.
    pub gap_ratio: f64,
}

pub fn frustration_report(
    g: &MolecularGraph,
    c: &CouplingModel,
    config: &SpinConfiguration,
) -> Result<FrustrationReport, SpinError> {
    check_directions(g, &config.directions)?;
    let edge_dots: Vec<f64> = g
        .edges
        .iter()
        .map(|&(i, j)| dot3(config.directions[i], config.directions[j]))
        .collect();
    let mut histogram = vec![0usize; 20];
    for &d in &edge_dots {
        let bin = (((d + 1.0) / 2.0 * 20.0).floor() as isize).clamp(0, 19) as usize;
        histogram[bin] += 1;
    }
    let face_mean_dots = match face_census(g) {
        Ok(_) => faces_mean_dots(g, &config.directions),
        Err(_) => Vec::new(),
    };
    let e = energy(g, c, &config.directions)?;
    let hyp = hypothetical_minimum(g, c);
    let gap_ratio = (e - hyp) / hyp.abs();
    Ok(FrustrationReport {
        edge_dots,
        histogram,
        face_mean_dots,
        gap_ratio,
    })
}

fn faces_mean_dots(g: &MolecularGraph, directions: &[[f64; 3]]) -> Vec<(usize, f64)> {
    let faces = match crate::graph::faces(g) {
        Ok(f) => f,
        Err(_) => return Vec::new(),
    };
    faces
        .iter()
        .map(|f| {
            let k = f.len();
            let mean = (0..k)
                .map(|i| dot3(directions[f[i]], directions[f[(i + 1) % k]]))
                .sum::<f64>()
                / k as f64;
            (k, mean)
        })
        .collect()
}

/// Greedy clustering of directions into near-parallel sublattices.
#[derive(Debug, Clone, Serialize)]
pub struct SublatticeReport {
    /// Vertex indices per cluster, in discovery order.
    pub clusters: Vec<Vec<usize>>,
    /// Net moment (vector sum of directions) per cluster.
    pub cluster_moments: Vec<[f64; 3]>,
    /// Vector sum of all directions.
    pub total_moment: [f64; 3],
}

pub fn sublattice_decomposition(config: &SpinConfiguration) -> SublatticeReport {
    let cos_threshold = SUBLATTICE_ANGLE_DEG.to_radians().cos();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut sums: Vec<[f64; 3]> = Vec::new();
    for (i, &n) in config.directions.iter().enumerate() {
        let mut assigned = false;
        for (c, sum) in sums.iter_mut().enumerate() {
            let rep = normalize3(*sum);
            if dot3(rep, n) >= cos_threshold {
                clusters[c].push(i);
                *sum = add3(*sum, n);
                assigned = true;
                break;
            }
        }
        if !assigned {
            clusters.push(vec![i]);
            sums.push(n);
        }
    }
    let mut total = [0.0; 3];
    for &n in &config.directions {
        total = add3(total, n);
    }
    SublatticeReport {
        clusters,
        cluster_moments: sums,
        total_moment: total,
    }
}

/// Seeded uniform random unit directions, one per vertex index.
pub fn random_directions(n: usize, seed: u64) -> Vec<[f64; 3]> {
    use rand::SeedableRng;
    use rand_distr::Distribution;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| rand_distr::UnitSphere.sample(&mut rng))
        .collect()
}

/// Local field h_i = sum over neighbors of w_ik n_k.
pub(crate) fn local_fields(
    g: &MolecularGraph,
    c: &CouplingModel,
    directions: &[[f64; 3]],
) -> Vec<[f64; 3]> {
    let mut fields = vec![[0.0; 3]; g.n_vertices()];
    for (e, &(i, j)) in g.edges.iter().enumerate() {
        let w = c.bond_weight(g.bond_class[e]);
        fields[i] = add3(fields[i], scale3(directions[j], w));
        fields[j] = add3(fields[j], scale3(directions[i], w));
    }
    fields
}

pub(crate) fn check_directions(
    g: &MolecularGraph,
    directions: &[[f64; 3]],
) -> Result<(), SpinError> {
    if directions.len() != g.n_vertices() {
        return Err(SpinError::DirectionCount {
            count: directions.len(),
            expected: g.n_vertices(),
        });
    }
    for (i, n) in directions.iter().enumerate() {
        let norm = norm3(*n);
        if (norm - 1.0).abs() > UNIT_INPUT_TOL {
            return Err(SpinError::NonUnitDirection { index: i, norm });
        }
    }
    Ok(())
}

// Small 3-vector helpers shared across the crate.
pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub(crate) fn sub3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn normalize3(a: [f64; 3]) -> [f64; 3] {
    let n = norm3(a);
    [a[0] / n, a[1] / n, a[2] / n]
}
