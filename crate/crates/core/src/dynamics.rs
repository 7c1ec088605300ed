//! Precession dynamics of the spin system.
//!
//! Each spin precesses around the summed field of its neighbors,
//! dn_i/dt = n_i x sum_k w_ik n_k, with time measured in units of
//! 1/(J S^2) so trajectories are coupling-independent. The flow exactly
//! conserves every |n_i|, the exchange energy and (for symmetric
//! couplings) the total moment, which makes an un-renormalized RK4 run a
//! genuine accuracy test: any drift is integrator error, not physics.

use thiserror::Error;

use crate::graph::MolecularGraph;
use crate::spin::{
    add3, check_directions, cross3, dot3, energy, local_fields, norm3, scale3, sub3,
    CouplingModel, SpinError,
};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("integration span {t_end} is shorter than one step {dt}")]
    SpanTooShort { t_end: f64, dt: f64 },
    #[error(
        "time step {dt} too large for maximum weighted degree {max_degree} \
         (limit {limit})"
    )]
    StepTooLarge { dt: f64, max_degree: f64, limit: f64 },
    #[error(transparent)]
    Spin(#[from] SpinError),
}

/// Controls for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct IntegrationOptions {
    /// Record a snapshot every this many steps (the initial and final
    /// states are always recorded).
    pub sample_every: usize,
    /// Renormalize spins after every step. Off by default so norm
    /// conservation stays a meaningful diagnostic.
    pub renormalize: bool,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self { sample_every: 10, renormalize: false }
    }
}

/// Time series produced by the integrator.
#[derive(Debug, Clone)]
pub struct TrajectoryState {
    /// Sample times, units of 1/(J S^2).
    pub times: Vec<f64>,
    /// Spin directions at each sample.
    pub snapshots: Vec<Vec<[f64; 3]>>,
    /// Exchange energy at each sample.
    pub energy_series: Vec<f64>,
    /// Cumulative max |norm - 1| up to each sample.
    pub norm_drift_series: Vec<f64>,
    /// |sum_i n_i| at each sample.
    pub total_moment_series: Vec<f64>,
    /// Max over all steps and vertices of | |n_i| - 1 |.
    pub norm_drift: f64,
    /// Max over all steps of |E(t) - E(0)| / |E(0)|.
    pub energy_drift: f64,
    /// Max over all steps of |M(t) - M(0)| (vector difference norm).
    pub moment_drift: f64,
}

/// Classic fourth-order Runge-Kutta on the precession flow.
pub fn integrate(
    g: &MolecularGraph,
    c: &CouplingModel,
    initial: &[[f64; 3]],
    t_end: f64,
    dt: f64,
    options: IntegrationOptions,
) -> Result<TrajectoryState, DynamicsError> {
    check_directions(g, initial)?;
    if dt.is_nan() || dt <= 0.0 {
        return Err(DynamicsError::NonPositiveStep(dt));
    }
    if t_end < dt {
        return Err(DynamicsError::SpanTooShort { t_end, dt });
    }
    let max_degree = (0..g.n_vertices())
        .map(|i| weighted_degree(g, c, i))
        .fold(0.0f64, f64::max);
    let limit = 0.1 / max_degree;
    if dt > limit {
        return Err(DynamicsError::StepTooLarge { dt, max_degree, limit });
    }

    let n = g.n_vertices();
    let steps = (t_end / dt).round() as usize;
    let sample_every = options.sample_every.max(1);

    let mut state: Vec<[f64; 3]> = initial.to_vec();
    let e0 = energy(g, c, &state)?;
    let m0 = total_moment(&state);

    let mut traj = TrajectoryState {
        times: Vec::new(),
        snapshots: Vec::new(),
        energy_series: Vec::new(),
        norm_drift_series: Vec::new(),
        total_moment_series: Vec::new(),
        norm_drift: 0.0,
        energy_drift: 0.0,
        moment_drift: 0.0,
    };
    traj.record(0.0, &state, e0);

    let mut k1 = vec![[0.0; 3]; n];
    let mut k2 = vec![[0.0; 3]; n];
    let mut k3 = vec![[0.0; 3]; n];
    let mut k4 = vec![[0.0; 3]; n];
    let mut scratch = vec![[0.0; 3]; n];

    for step in 1..=steps {
        derivative(g, c, &state, &mut k1);
        blend(&state, &k1, 0.5 * dt, &mut scratch);
        derivative(g, c, &scratch, &mut k2);
        blend(&state, &k2, 0.5 * dt, &mut scratch);
        derivative(g, c, &scratch, &mut k3);
        blend(&state, &k3, dt, &mut scratch);
        derivative(g, c, &scratch, &mut k4);
        for i in 0..n {
            for a in 0..3 {
                state[i][a] +=
                    dt / 6.0 * (k1[i][a] + 2.0 * k2[i][a] + 2.0 * k3[i][a] + k4[i][a]);
            }
        }
        if options.renormalize {
            for s in state.iter_mut() {
                let norm = norm3(*s);
                *s = scale3(*s, 1.0 / norm);
            }
        }

        // Conservation bookkeeping every step.
        for s in &state {
            traj.norm_drift = traj.norm_drift.max((norm3(*s) - 1.0).abs());
        }
        let e = raw_energy(g, c, &state);
        traj.energy_drift = traj.energy_drift.max((e - e0).abs() / e0.abs().max(f64::MIN_POSITIVE));
        let m = total_moment(&state);
        traj.moment_drift = traj.moment_drift.max(norm3(sub3(m, m0)));

        if step % sample_every == 0 || step == steps {
            traj.record(step as f64 * dt, &state, e);
        }
    }
    Ok(traj)
}

/// Instantaneous stationarity residual max_i |n_i x h_i| -- the largest
/// precession speed anywhere in the configuration. Zero means every spin
/// is at rest.
pub fn stationarity_test(
    g: &MolecularGraph,
    c: &CouplingModel,
    directions: &[[f64; 3]],
) -> Result<f64, DynamicsError> {
    check_directions(g, directions)?;
    let fields = local_fields(g, c, directions);
    Ok(directions
        .iter()
        .zip(&fields)
        .map(|(n, h)| norm3(cross3(*n, *h)))
        .fold(0.0f64, f64::max))
}

impl TrajectoryState {
    fn record(&mut self, t: f64, state: &[[f64; 3]], e: f64) {
        self.times.push(t);
        self.snapshots.push(state.to_vec());
        self.energy_series.push(e);
        self.norm_drift_series.push(self.norm_drift);
        self.total_moment_series.push(norm3(total_moment(state)));
    }

    /// Largest per-vertex displacement between the first and last snapshot.
    pub fn max_displacement(&self) -> f64 {
        let first = self.snapshots.first();
        let last = self.snapshots.last();
        match (first, last) {
            (Some(a), Some(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| norm3(sub3(*y, *x)))
                .fold(0.0f64, f64::max),
            _ => 0.0,
        }
    }
}

fn derivative(
    g: &MolecularGraph,
    c: &CouplingModel,
    state: &[[f64; 3]],
    out: &mut [[f64; 3]],
) {
    let fields = local_fields(g, c, state);
    for (o, (n, h)) in out.iter_mut().zip(state.iter().zip(&fields)) {
        *o = cross3(*n, *h);
    }
}

fn blend(state: &[[f64; 3]], k: &[[f64; 3]], h: f64, out: &mut [[f64; 3]]) {
    for (o, (s, d)) in out.iter_mut().zip(state.iter().zip(k)) {
        *o = add3(*s, scale3(*d, h));
    }
}

fn total_moment(state: &[[f64; 3]]) -> [f64; 3] {
    state.iter().fold([0.0; 3], |acc, &n| add3(acc, n))
}

fn weighted_degree(g: &MolecularGraph, c: &CouplingModel, i: usize) -> f64 {
    g.edges
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| a == i || b == i)
        .map(|(e, _)| c.bond_weight(g.bond_class[e]))
        .sum()
}

/// Energy without the unit-norm precondition, for drift tracking during
/// integration (norms may wander by integrator error).
fn raw_energy(g: &MolecularGraph, c: &CouplingModel, directions: &[[f64; 3]]) -> f64 {
    let mut sum = 0.0;
    for (e, &(i, j)) in g.edges.iter().enumerate() {
        sum += c.bond_weight(g.bond_class[e]) * dot3(directions[i], directions[j]);
    }
    c.energy_scale() * sum
}
