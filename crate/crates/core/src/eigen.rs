//! Dense symmetric eigensolver with degenerate-eigenspace extraction.
//!
//! Cyclic Jacobi rotations: at n = 60 the matrix is tiny and Jacobi
//! delivers high-accuracy orthogonal eigenvectors directly, which the
//! degenerate-subspace assembly depends on. Eigenvalues come out sorted
//! ascending and pre-clustered into degenerate groups.

use thiserror::Error;

use crate::graph::NeighborMatrix;

/// Off-diagonal Frobenius norm target, relative to the input norm.
const JACOBI_TOL: f64 = 1e-12;
/// Sweep limit; hitting it signals pathological input.
const MAX_SWEEPS: usize = 100;
/// Absolute eigenvalue clustering tolerance. C60 adjacency gaps are
/// O(0.1), so this sits safely between round-off and physical gaps.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("Jacobi iteration did not converge within {0} sweeps")]
    NoConvergence(usize),
    #[error("eigenvalue {0} not present in the spectrum")]
    ValueNotInSpectrum(f64),
    #[error("input vectors are rank deficient")]
    RankDeficient,
    #[error("vector dimensions disagree")]
    DimensionMismatch,
}

/// Full spectrum of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Eigenvalues sorted ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors; `eigenvectors[k]` pairs with `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Partition of indices into degenerate clusters.
    pub groups: Vec<EigenGroup>,
}

/// A cluster of eigenvalues equal within [`DEGENERACY_TOL`].
#[derive(Debug, Clone)]
pub struct EigenGroup {
    /// Representative value (mean of the cluster).
    pub value: f64,
    /// Indices into `eigenvalues`, contiguous and ascending.
    pub indices: Vec<usize>,
}

/// Which degenerate group to extract.
#[derive(Debug, Clone, Copy)]
pub enum GroupSelector {
    /// The group containing the minimum eigenvalue.
    Min,
    /// The group whose representative value matches within [`DEGENERACY_TOL`].
    Value(f64),
}

/// Degenerate eigenspace with a deterministic orthonormal basis.
#[derive(Debug, Clone)]
pub struct DegenerateGroup {
    pub value: f64,
    pub multiplicity: usize,
    pub basis: Vec<Vec<f64>>,
}

/// Solves the full symmetric eigenproblem of a neighbor matrix.
pub fn solve_symmetric(m: &NeighborMatrix) -> Result<EigenSystem, EigenError> {
    let n = m.order();
    let a = m.as_slice();
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((a[i * n + j] - a[j * n + i]).abs());
        }
    }
    if asym > 1e-12 {
        return Err(EigenError::NotSymmetric(asym));
    }
    let (eigenvalues, eigenvectors) = jacobi_symmetric(n, a)?;
    let groups = cluster(&eigenvalues);
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
        groups,
    })
}

/// Cyclic Jacobi on a dense symmetric matrix (row-major, order `n`).
/// Returns eigenvalues ascending with matching orthonormal eigenvectors.
pub(crate) fn jacobi_symmetric(
    n: usize,
    data: &[f64],
) -> Result<(Vec<f64>, Vec<Vec<f64>>), EigenError> {
    let mut a = data.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let norm_f = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = JACOBI_TOL * norm_f;

    let mut converged = norm_f == 0.0 || off_norm(n, &a) <= target;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(EigenError::NoConvergence(MAX_SWEEPS));
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                let app = a[p * n + p];
                let aqq = a[q * n + q];
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[p * n + k] = a[k * n + p];
                        a[k * n + q] = s * akp + c * akq;
                        a[q * n + k] = a[k * n + q];
                    }
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
        sweeps += 1;
        converged = off_norm(n, &a) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let eigenvectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    Ok((eigenvalues, eigenvectors))
}

fn off_norm(n: usize, a: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += 2.0 * a[i * n + j] * a[i * n + j];
        }
    }
    sum.sqrt()
}

/// Chains ascending eigenvalues into groups separated by gaps larger
/// than [`DEGENERACY_TOL`].
fn cluster(eigenvalues: &[f64]) -> Vec<EigenGroup> {
    let mut groups: Vec<EigenGroup> = Vec::new();
    let mut start = 0;
    for i in 1..=eigenvalues.len() {
        let gap_break =
            i == eigenvalues.len() || eigenvalues[i] - eigenvalues[i - 1] > DEGENERACY_TOL;
        if gap_break {
            let indices: Vec<usize> = (start..i).collect();
            let value = indices.iter().map(|&k| eigenvalues[k]).sum::<f64>()
                / indices.len() as f64;
            groups.push(EigenGroup { value, indices });
            start = i;
        }
    }
    groups
}

/// Extracts a degenerate group with a deterministic orthonormal basis.
///
/// The Jacobi basis within a cluster is arbitrary (any rotation of it is
/// equally valid), so the canonical coordinate axes are projected onto the
/// eigenspace and orthonormalized in axis order. That pins the basis for
/// reproducible downstream output.
pub fn degenerate_group(
    es: &EigenSystem,
    which: GroupSelector,
) -> Result<DegenerateGroup, EigenError> {
    let group = match which {
        GroupSelector::Min => es.groups.first().ok_or(EigenError::ValueNotInSpectrum(f64::NAN))?,
        GroupSelector::Value(v) => es
            .groups
            .iter()
            .find(|g| (g.value - v).abs() <= DEGENERACY_TOL)
            .ok_or(EigenError::ValueNotInSpectrum(v))?,
    };
    let cluster: Vec<&Vec<f64>> = group.indices.iter().map(|&k| &es.eigenvectors[k]).collect();
    let m = cluster.len();
    let n = cluster[0].len();

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    for axis in 0..n {
        if basis.len() == m {
            break;
        }
        // Projection of the canonical axis onto the eigenspace.
        let mut w = vec![0.0; n];
        for vk in &cluster {
            let coef = vk[axis];
            for (wi, vi) in w.iter_mut().zip(vk.iter()) {
                *wi += coef * vi;
            }
        }
        for b in &basis {
            let c = dot(&w, b);
            for (wi, bi) in w.iter_mut().zip(b.iter()) {
                *wi -= c * bi;
            }
        }
        let norm = dot(&w, &w).sqrt();
        if norm > 1e-6 {
            for wi in w.iter_mut() {
                *wi /= norm;
            }
            basis.push(w);
        }
    }
    debug_assert_eq!(basis.len(), m, "axis projections failed to span the eigenspace");
    let basis = orthonormalize(&basis)?;
    Ok(DegenerateGroup {
        value: group.value,
        multiplicity: m,
        basis,
    })
}

/// Modified Gram-Schmidt (two passes per vector). The output spans the
/// same subspace with Gram matrix within 1e-12 of identity.
pub fn orthonormalize(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, EigenError> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let n = vectors[0].len();
    if vectors.iter().any(|v| v.len() != n) {
        return Err(EigenError::DimensionMismatch);
    }
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let scale = dot(v, v).sqrt();
        if scale == 0.0 {
            return Err(EigenError::RankDeficient);
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &out {
                let c = dot(&w, b);
                for (wi, bi) in w.iter_mut().zip(b.iter()) {
                    *wi -= c * bi;
                }
            }
        }
        let norm = dot(&w, &w).sqrt();
        if norm <= 1e-12 * scale {
            return Err(EigenError::RankDeficient);
        }
        for wi in w.iter_mut() {
            *wi /= norm;
        }
        out.push(w);
    }
    Ok(out)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_c60, build_toy, neighbor_matrix, Toy};
    use crate::spin::CouplingModel;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn uniform() -> CouplingModel {
        CouplingModel::new(1.0, 1.0).unwrap()
    }

    fn residual_inf(m: &NeighborMatrix, es: &EigenSystem) -> f64 {
        let n = m.order();
        let norm_inf = (0..n)
            .map(|i| (0..n).map(|j| m.get(i, j).abs()).sum::<f64>())
            .fold(0.0f64, f64::max);
        let mut worst = 0.0f64;
        let mut av = vec![0.0; n];
        for (lam, v) in es.eigenvalues.iter().zip(&es.eigenvectors) {
            m.mul_vec(v, &mut av);
            for i in 0..n {
                worst = worst.max((av[i] - lam * v[i]).abs());
            }
        }
        worst / norm_inf
    }

    fn orthonormality_defect(es: &EigenSystem) -> f64 {
        let k = es.eigenvectors.len();
        let mut worst = 0.0f64;
        for a in 0..k {
            for b in a..k {
                let d = dot(&es.eigenvectors[a], &es.eigenvectors[b]);
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((d - target).abs());
            }
        }
        worst
    }

    /// Characteristic polynomial coefficients by Faddeev-LeVerrier,
    /// p(x) = x^n + c[n-1] x^(n-1) + ... + c[0].
    fn char_poly_coefficients(n: usize, a: &[f64]) -> Vec<f64> {
        let mut coeffs = vec![0.0; n];
        let mut mk = vec![0.0; n * n];
        for i in 0..n {
            mk[i * n + i] = 1.0;
        }
        for k in 1..=n {
            let mut prod = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for l in 0..n {
                        s += a[i * n + l] * mk[l * n + j];
                    }
                    prod[i * n + j] = s;
                }
            }
            let trace: f64 = (0..n).map(|i| prod[i * n + i]).sum();
            let c = -trace / k as f64;
            coeffs[n - k] = c;
            for i in 0..n {
                prod[i * n + i] += c;
            }
            mk = prod;
        }
        coeffs
    }

    /// Expands prod_i (x - r_i) into monic coefficients (c[0] constant term).
    fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
        let mut work = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; work.len() + 1];
            for (i, &w) in work.iter().enumerate() {
                next[i] -= r * w;
                next[i + 1] += w;
            }
            work = next;
        }
        work.truncate(roots.len());
        work
    }

    #[test]
    fn k4_spectrum() {
        let g = build_toy(Toy::Tetrahedron).unwrap();
        let m = neighbor_matrix(&g, &uniform());
        let es = solve_symmetric(&m).unwrap();
        let expected = [-1.0, -1.0, -1.0, 3.0];
        for (got, want) in es.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
        assert_eq!(es.groups.len(), 2);
        assert_eq!(es.groups[0].indices.len(), 3);
    }

    #[test]
    fn ring6_spectrum() {
        let g = build_toy(Toy::Ring(6)).unwrap();
        let m = neighbor_matrix(&g, &uniform());
        let es = solve_symmetric(&m).unwrap();
        // 2 cos(2 pi k / 6): {-2, -1, -1, 1, 1, 2}
        let expected = [-2.0, -1.0, -1.0, 1.0, 1.0, 2.0];
        for (got, want) in es.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
        let min = degenerate_group(&es, GroupSelector::Min).unwrap();
        assert_eq!(min.multiplicity, 1);
        assert!((min.value + 2.0).abs() < 1e-12);
    }

    #[test]
    fn c60_bottom_eigenvalue_and_degeneracy() {
        let g = build_c60().unwrap();
        let m = neighbor_matrix(&g, &uniform());
        let es = solve_symmetric(&m).unwrap();
        // Golden-ratio value -(1 + phi).
        assert!((es.eigenvalues[0] + 2.618033988749895).abs() < 5e-4);
        let min = degenerate_group(&es, GroupSelector::Min).unwrap();
        assert_eq!(min.multiplicity, 3);
        // 3-regular graph: top of the spectrum is the all-ones vector at 3.
        assert!((es.eigenvalues[59] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn c60_residuals_and_orthonormality() {
        let g = build_c60().unwrap();
        let m = neighbor_matrix(&g, &uniform());
        let es = solve_symmetric(&m).unwrap();
        assert!(residual_inf(&m, &es) <= 1e-10);
        assert!(orthonormality_defect(&es) <= 1e-10);
    }

    #[test]
    fn trace_identities() {
        for g in [
            build_c60().unwrap(),
            build_toy(Toy::Cube).unwrap(),
            build_toy(Toy::Ring(7)).unwrap(),
        ] {
            let m = neighbor_matrix(&g, &uniform());
            let es = solve_symmetric(&m).unwrap();
            let sum: f64 = es.eigenvalues.iter().sum();
            let sq_sum: f64 = es.eigenvalues.iter().map(|l| l * l).sum();
            assert!(sum.abs() < 1e-9, "eigenvalue sum {sum}");
            assert!(
                (sq_sum - 2.0 * g.n_edges() as f64).abs() < 1e-8,
                "eigenvalue square sum {sq_sum}"
            );
        }
    }

    #[test]
    fn spectrum_invariant_under_permutation() {
        let g = build_c60().unwrap();
        let m = neighbor_matrix(&g, &uniform());
        let n = m.order();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        perm.shuffle(&mut rng);
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = m.get(perm[i], perm[j]);
            }
        }
        let mp = NeighborMatrix::from_dense(n, data).unwrap();
        let es = solve_symmetric(&m).unwrap();
        let esp = solve_symmetric(&mp).unwrap();
        for (a, b) in es.eigenvalues.iter().zip(&esp.eigenvalues) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn jacobi_matches_char_poly_small_graphs() {
        let graphs = vec![
            build_toy(Toy::Tetrahedron).unwrap(),
            build_toy(Toy::Cube).unwrap(),
            build_toy(Toy::Ring(3)).unwrap(),
            build_toy(Toy::Ring(5)).unwrap(),
            build_toy(Toy::Ring(8)).unwrap(),
        ];
        for g in graphs {
            let m = neighbor_matrix(&g, &uniform());
            let n = m.order();
            let es = solve_symmetric(&m).unwrap();
            let expected = char_poly_coefficients(n, m.as_slice());
            let got = poly_from_roots(&es.eigenvalues);
            for (c_got, c_want) in got.iter().zip(&expected) {
                assert!(
                    (c_got - c_want).abs() < 1e-8 * c_want.abs().max(1.0),
                    "coefficient {c_got} vs {c_want} on {} vertices",
                    n
                );
            }
        }
    }

    #[test]
    fn degenerate_group_by_value() {
        let g = build_toy(Toy::Cube).unwrap();
        let m = neighbor_matrix(&g, &uniform());
        let es = solve_symmetric(&m).unwrap();
        let grp = degenerate_group(&es, GroupSelector::Value(1.0)).unwrap();
        assert_eq!(grp.multiplicity, 3);
        assert!(matches!(
            degenerate_group(&es, GroupSelector::Value(0.5)),
            Err(EigenError::ValueNotInSpectrum(_))
        ));
    }

    #[test]
    fn degenerate_basis_is_deterministic_and_orthonormal() {
        let g = build_c60().unwrap();
        let m = neighbor_matrix(&g, &uniform());
        let a = degenerate_group(&solve_symmetric(&m).unwrap(), GroupSelector::Min).unwrap();
        let b = degenerate_group(&solve_symmetric(&m).unwrap(), GroupSelector::Min).unwrap();
        for (va, vb) in a.basis.iter().zip(&b.basis) {
            for (x, y) in va.iter().zip(vb) {
                assert_eq!(x, y);
            }
        }
        for i in 0..3 {
            for j in i..3 {
                let d = dot(&a.basis[i], &a.basis[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((d - target).abs() < 1e-12);
            }
        }
        // Still eigenvectors of the bottom eigenvalue.
        let mut av = vec![0.0; 60];
        for v in &a.basis {
            m.mul_vec(v, &mut av);
            for i in 0..60 {
                assert!((av[i] - a.value * v[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn orthonormalize_idempotent_and_2d() {
        let already = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let out = orthonormalize(&already).unwrap();
        for (v, w) in already.iter().zip(&out) {
            for (a, b) in v.iter().zip(w) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        let skew = vec![vec![1.0, 0.0], vec![1.0, 1.0]];
        let out = orthonormalize(&skew).unwrap();
        assert!((out[0][0] - 1.0).abs() < 1e-12 && out[0][1].abs() < 1e-12);
        assert!(out[1][0].abs() < 1e-12 && (out[1][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthonormalize_rejects_rank_deficiency() {
        let dependent = vec![vec![1.0, 2.0, 0.0], vec![2.0, 4.0, 0.0]];
        assert!(matches!(
            orthonormalize(&dependent),
            Err(EigenError::RankDeficient)
        ));
    }

    #[test]
    fn non_symmetric_rejected() {
        // from_dense refuses to build an asymmetric matrix in the first place.
        assert!(NeighborMatrix::from_dense(2, vec![0.0, 1.0, 0.5, 0.0]).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn random_triples_orthonormalize(seed in 0u64..1000) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let vectors: Vec<Vec<f64>> = (0..3)
                    .map(|_| (0..60).map(|_| rng.random_range(-1.0..1.0)).collect())
                    .collect();
                let out = orthonormalize(&vectors).unwrap();
                for i in 0..3 {
                    for j in i..3 {
                        let d = dot(&out[i], &out[j]);
                        let target = if i == j { 1.0 } else { 0.0 };
                        prop_assert!((d - target).abs() < 1e-12);
                    }
                }
            }

            #[test]
            fn jacobi_on_random_symmetric(seed in 0u64..1000) {
                let n = 8usize;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut data = vec![0.0; n * n];
                for i in 0..n {
                    for j in i..n {
                        let x = rng.random_range(-1.0..1.0);
                        data[i * n + j] = x;
                        data[j * n + i] = x;
                    }
                }
                let m = NeighborMatrix::from_dense(n, data).unwrap();
                let es = solve_symmetric(&m).unwrap();
                prop_assert!(residual_inf(&m, &es) <= 1e-10);
                prop_assert!(orthonormality_defect(&es) <= 1e-10);
                let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
                let sum: f64 = es.eigenvalues.iter().sum();
                prop_assert!((trace - sum).abs() <= 1e-9);
            }
        }
    }
}
