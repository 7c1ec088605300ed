//! Direct energy minimization over the product of unit spheres.
//!
//! An independent oracle for the spectral construction: projected
//! gradient descent with backtracking line search, restarted from seeded
//! random configurations. A result is certified globally optimal when it
//! attains the spectral lower bound (J S^2 / 2) N lambda_min.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::graph::MolecularGraph;
use crate::spin::{
    check_directions, dot3, local_fields, normalize3, scale3, spectral_bound, sub3,
    CouplingModel, SpinConfiguration, SpinError,
};

/// Relative slack on bound attainment for certification.
const CERTIFY_REL_TOL: f64 = 1e-6;
/// Armijo sufficient-decrease constant for the backtracking search.
const ARMIJO_C: f64 = 1e-4;
/// Smallest step the line search will try before giving up on an iterate.
const MIN_STEP: f64 = 1e-16;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("restarts must be at least 1")]
    NoRestarts,
    #[error("gradient tolerance must be positive, got {0}")]
    NonPositiveTol(f64),
    #[error("initial step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error(transparent)]
    Spin(#[from] SpinError),
}

/// Step-size policy for the descent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepSchedule {
    /// Constant step; no line search.
    Fixed,
    /// Backtracking Armijo line search with growth on success.
    Backtracking,
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Initial step size in reduced units (J S^2 factored out).
    pub step: f64,
    /// Convergence threshold on the projected-gradient infinity norm
    /// (largest per-site tangent gradient magnitude).
    pub tol_grad: f64,
    pub seed: u64,
    pub schedule: StepSchedule,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iters: 50_000,
            step: 0.2,
            tol_grad: 1e-10,
            seed: 0,
            schedule: StepSchedule::Backtracking,
        }
    }
}

/// Certification outcome against the spectral lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certification {
    CertifiedGlobal,
    LocalOnly,
}

/// Best configuration over all restarts, with convergence metadata.
#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub config: SpinConfiguration,
    /// Whether the winning restart met the gradient tolerance.
    pub converged: bool,
    /// How many restarts met the gradient tolerance.
    pub restarts_converged: usize,
    /// Index of the winning restart (ties in energy break toward the
    /// smaller index, so the result is schedule-independent).
    pub best_restart: usize,
    pub certification: Certification,
    /// The spectral lower bound the result was certified against.
    pub bound: f64,
}

/// Minimizes the exchange energy over unit spin configurations.
pub fn minimize(
    g: &MolecularGraph,
    c: &CouplingModel,
    cfg: &OptimizerConfig,
) -> Result<MinimizeResult, OptimizeError> {
    if cfg.restarts == 0 {
        return Err(OptimizeError::NoRestarts);
    }
    if cfg.tol_grad.is_nan() || cfg.tol_grad <= 0.0 {
        return Err(OptimizeError::NonPositiveTol(cfg.tol_grad));
    }
    if cfg.step.is_nan() || cfg.step <= 0.0 {
        return Err(OptimizeError::NonPositiveStep(cfg.step));
    }

    let runs: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(g, c, cfg, r))
        .collect();

    let restarts_converged = runs.iter().filter(|r| r.converged).count();
    let (best_restart, best) = runs
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| {
            a.reduced_energy
                .total_cmp(&b.reduced_energy)
                .then(ia.cmp(ib))
        })
        .expect("at least one restart");

    let config = SpinConfiguration::from_directions(g, c, best.directions.clone())?;
    let bound = spectral_bound(g, c)?;
    let certification = certify_energy(config.energy, bound);
    Ok(MinimizeResult {
        converged: best.converged,
        restarts_converged,
        best_restart,
        certification,
        bound,
        config,
    })
}

/// Certifies an existing configuration against the spectral bound of its
/// graph and couplings.
pub fn certify(
    config: &SpinConfiguration,
    g: &MolecularGraph,
    c: &CouplingModel,
) -> Result<Certification, OptimizeError> {
    check_directions(g, &config.directions)?;
    let bound = spectral_bound(g, c)?;
    Ok(certify_energy(config.energy, bound))
}

fn certify_energy(energy: f64, bound: f64) -> Certification {
    if energy <= bound + CERTIFY_REL_TOL * bound.abs() {
        Certification::CertifiedGlobal
    } else {
        Certification::LocalOnly
    }
}

struct RestartOutcome {
    directions: Vec<[f64; 3]>,
    reduced_energy: f64,
    converged: bool,
}

fn run_restart(
    g: &MolecularGraph,
    c: &CouplingModel,
    cfg: &OptimizerConfig,
    restart: usize,
) -> RestartOutcome {
    // Decorrelate restarts while keeping each one fully determined by
    // (seed, restart index).
    let mut rng =
        ChaCha8Rng::seed_from_u64(cfg.seed ^ (restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let n = g.n_vertices();
    let mut state: Vec<[f64; 3]> = (0..n)
        .map(|_| rand_distr::UnitSphere.sample(&mut rng))
        .collect();

    let mut e = reduced_energy(g, c, &state);
    let mut alpha = cfg.step;
    let mut converged = false;
    let mut grad = vec![[0.0; 3]; n];

    // The Armijo test compares energies, so once the demanded decrease
    // alpha * |grad|^2 falls below the float resolution of E it can no
    // longer certify progress; from there a fixed stable step (well under
    // 1/L, L <= 2 * max weighted degree) carries the gradient norm the
    // rest of the way down to tol_grad.
    let polish_step = 0.45
        / (0..n)
            .map(|i| {
                g.neighbors(i)
                    .iter()
                    .map(|&k| c.bond_weight(bond_class_of(g, i, k)))
                    .sum::<f64>()
            })
            .fold(1.0f64, f64::max);
    let mut polishing = false;

    for _ in 0..cfg.max_iters {
        // Tangent gradient of the reduced energy at each site.
        let fields = local_fields(g, c, &state);
        let mut gnorm_inf = 0.0f64;
        let mut gnorm_sq = 0.0f64;
        for i in 0..n {
            let radial = dot3(fields[i], state[i]);
            grad[i] = sub3(fields[i], scale3(state[i], radial));
            let sq = dot3(grad[i], grad[i]);
            gnorm_sq += sq;
            gnorm_inf = gnorm_inf.max(sq.sqrt());
        }
        if gnorm_inf <= cfg.tol_grad {
            converged = true;
            break;
        }

        match cfg.schedule {
            StepSchedule::Fixed => {
                step_onto_spheres(&mut state, &grad, alpha);
            }
            StepSchedule::Backtracking => {
                if !polishing
                    && ARMIJO_C * alpha * gnorm_sq < 8.0 * f64::EPSILON * (1.0 + e.abs())
                {
                    polishing = true;
                }
                if polishing {
                    step_onto_spheres(&mut state, &grad, polish_step);
                } else {
                    let mut accepted = false;
                    while alpha >= MIN_STEP {
                        let mut trial = state.clone();
                        step_onto_spheres(&mut trial, &grad, alpha);
                        let e_trial = reduced_energy(g, c, &trial);
                        if e_trial <= e - ARMIJO_C * alpha * gnorm_sq {
                            state = trial;
                            e = e_trial;
                            alpha = (alpha * 1.5).min(1.0);
                            accepted = true;
                            break;
                        }
                        alpha *= 0.5;
                    }
                    if !accepted {
                        polishing = true;
                    }
                }
            }
        }
    }

    RestartOutcome {
        reduced_energy: reduced_energy(g, c, &state),
        directions: state,
        converged,
    }
}

fn bond_class_of(g: &MolecularGraph, i: usize, k: usize) -> crate::graph::BondClass {
    let key = if i < k { (i, k) } else { (k, i) };
    let e = g.edges.binary_search(&key).expect("neighbor implies edge");
    g.bond_class[e]
}

fn step_onto_spheres(state: &mut [[f64; 3]], grad: &[[f64; 3]], alpha: f64) {
    for (s, d) in state.iter_mut().zip(grad) {
        *s = normalize3(sub3(*s, scale3(*d, alpha)));
    }
}

/// Energy with J S^2 factored out: sum over edges of w_e n_i . n_j.
fn reduced_energy(g: &MolecularGraph, c: &CouplingModel, state: &[[f64; 3]]) -> f64 {
    let mut sum = 0.0;
    for (e, &(i, j)) in g.edges.iter().enumerate() {
        sum += c.bond_weight(g.bond_class[e]) * dot3(state[i], state[j]);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_c60, build_toy, BondClass, MolecularGraph, Toy};
    use crate::spin::{energy, ground_state};

    fn unit_model() -> CouplingModel {
        CouplingModel::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn two_vertex_edge_goes_antiparallel() {
        let g = MolecularGraph::from_parts(
            vec![[0.0; 3], [1.0, 0.0, 0.0]],
            vec![(0, 1)],
            vec![BondClass::Uniform],
        )
        .unwrap();
        let c = unit_model();
        let cfg = OptimizerConfig { restarts: 2, seed: 1, ..Default::default() };
        let res = minimize(&g, &c, &cfg).unwrap();
        assert!((res.config.energy + 1.0).abs() < 1e-9);
        let d = dot3(res.config.directions[0], res.config.directions[1]);
        assert!((d + 1.0).abs() < 1e-9);
        assert_eq!(res.certification, Certification::CertifiedGlobal);
    }

    #[test]
    fn ring5_reaches_spiral_energy() {
        let g = build_toy(Toy::Ring(5)).unwrap();
        let c = unit_model();
        let cfg = OptimizerConfig { restarts: 5, seed: 3, ..Default::default() };
        let res = minimize(&g, &c, &cfg).unwrap();
        let expected = 2.5 * 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
        assert!(
            (res.config.energy - expected).abs() < 1e-6,
            "energy {} vs {}",
            res.config.energy,
            expected
        );
        assert_eq!(res.certification, Certification::CertifiedGlobal);
    }

    #[test]
    fn c60_matches_spectral_bound() {
        let g = build_c60().unwrap();
        let c = unit_model();
        let cfg = OptimizerConfig { restarts: 4, seed: 7, ..Default::default() };
        let res = minimize(&g, &c, &cfg).unwrap();
        let bound = spectral_bound(&g, &c).unwrap();
        assert!(
            (res.config.energy - bound).abs() <= 1e-6 * bound.abs(),
            "optimizer {} vs bound {}",
            res.config.energy,
            bound
        );
        assert_eq!(res.certification, Certification::CertifiedGlobal);
        assert!(res.config.energy >= bound - 1e-9);
    }

    #[test]
    fn cube_radial_state_is_local_only() {
        let g = build_toy(Toy::Cube).unwrap();
        let c = unit_model();
        let radial: Vec<[f64; 3]> =
            g.coordinates.iter().map(|&p| normalize3(p)).collect();
        let config = SpinConfiguration::from_directions(&g, &c, radial).unwrap();
        // Bound is (1/2) * 8 * (-3) = -12; the radial state sits far above.
        assert_eq!(
            certify(&config, &g, &c).unwrap(),
            Certification::LocalOnly
        );
        let bound = spectral_bound(&g, &c).unwrap();
        assert!((bound + 12.0).abs() < 1e-9);
    }

    #[test]
    fn ring6_antiparallel_certified() {
        let g = build_toy(Toy::Ring(6)).unwrap();
        let c = unit_model();
        let gs = ground_state(&g, &c).unwrap();
        assert_eq!(
            certify(&gs, &g, &c).unwrap(),
            Certification::CertifiedGlobal
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let g = build_toy(Toy::Ring(5)).unwrap();
        let c = unit_model();
        let cfg = OptimizerConfig { restarts: 4, seed: 11, ..Default::default() };
        let a = minimize(&g, &c, &cfg).unwrap();
        let b = minimize(&g, &c, &cfg).unwrap();
        assert_eq!(a.best_restart, b.best_restart);
        assert_eq!(a.config.energy.to_bits(), b.config.energy.to_bits());
        for (x, y) in a.config.directions.iter().zip(&b.config.directions) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn never_beats_the_bound() {
        let c = unit_model();
        for (g, seed) in [
            (build_toy(Toy::Tetrahedron).unwrap(), 2u64),
            (build_toy(Toy::Ring(7)).unwrap(), 3),
            (build_toy(Toy::Cube).unwrap(), 4),
        ] {
            let bound = spectral_bound(&g, &c).unwrap();
            let cfg = OptimizerConfig { restarts: 6, seed, ..Default::default() };
            let res = minimize(&g, &c, &cfg).unwrap();
            assert!(
                res.config.energy >= bound - 1e-9,
                "{} beats bound {}",
                res.config.energy,
                bound
            );
        }
    }

    #[test]
    fn config_validation() {
        let g = build_toy(Toy::Ring(4)).unwrap();
        let c = unit_model();
        let bad = OptimizerConfig { restarts: 0, ..Default::default() };
        assert!(matches!(minimize(&g, &c, &bad), Err(OptimizeError::NoRestarts)));
        let bad = OptimizerConfig { tol_grad: 0.0, ..Default::default() };
        assert!(matches!(
            minimize(&g, &c, &bad),
            Err(OptimizeError::NonPositiveTol(_))
        ));
    }

    #[test]
    fn result_energy_matches_pairwise_recompute() {
        let g = build_toy(Toy::Ring(6)).unwrap();
        let c = CouplingModel::new(2.0, 1.5).unwrap();
        let cfg = OptimizerConfig { restarts: 3, seed: 5, ..Default::default() };
        let res = minimize(&g, &c, &cfg).unwrap();
        let recomputed = energy(&g, &c, &res.config.directions).unwrap();
        assert!((recomputed - res.config.energy).abs() <= 1e-12 * recomputed.abs());
    }
}
