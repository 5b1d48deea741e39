//! Brute-force ground truth: exact SVP/CVP by coefficient enumeration and
//! grid-cell counting for the hypercube covering bound.
//!
//! SVP/CVP guarantees elsewhere in the crate are probabilistic; everything
//! here is exhaustive, so it certifies outcomes at desk scale (n ≤ 10 for
//! enumeration, n ≤ 6 for cell counting).

use std::collections::{HashSet, VecDeque};

use crate::geometry::{lp_norm, log2_ball_volume, NormP};
use crate::lattice::{Basis, LatticePoint};
use crate::sieve::Anchoring;
use crate::{Error, Result};

const MAX_ENUM_CANDIDATES: f64 = 1e9;
const MAX_CELL_COUNT: f64 = 1e8;

/// ℓ2 Gram-Schmidt profile of the float mirror: `‖b*_i‖₂` and the
/// projection coefficients μ.
fn gso_profile(basis: &Basis) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = basis.rank();
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);
    let mut mu = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        let mut v = basis.column_f64(i).to_vec();
        for (j, b) in star.iter().enumerate() {
            let nb: f64 = b.iter().map(|x| x * x).sum();
            if nb == 0.0 {
                continue;
            }
            let m: f64 = basis
                .column_f64(i)
                .iter()
                .zip(b)
                .map(|(x, y)| x * y)
                .sum::<f64>()
                / nb;
            mu[i][j] = m;
            for (vk, bk) in v.iter_mut().zip(b) {
                *vk -= m * bk;
            }
        }
        norms.push(v.iter().map(|x| x * x).sum::<f64>().sqrt());
        star.push(v);
    }
    (norms, mu)
}

/// `‖v‖₂ ≤ factor·‖v‖_p` conversion factor from the norm-equivalence
/// sandwich: `n^{1/2 − 1/p}` for `p ≥ 2` (max norm included), 1 below.
fn l2_conversion(n: usize, p: NormP) -> f64 {
    match p {
        NormP::Finite(q) if q <= 2.0 => 1.0,
        NormP::Finite(q) => (n as f64).powf(0.5 - 1.0 / q),
        NormP::Infinity => (n as f64).sqrt(),
    }
}

/// Coefficient box half-width from the Fincke-Pohst profile bound.
///
/// Any `v = B·z` with `‖v‖₂ ≤ a2` satisfies the top-down recursion
/// `|z_i| ≤ a2/‖b*_i‖ + Σ_{j>i} |μ_{ji}|·C_j`, evaluated numerically with
/// the basis's actual μ so the box stays honest for any input.
fn profile_bound(basis: &Basis, a2: f64) -> u32 {
    let n = basis.rank();
    let (star, mu) = gso_profile(basis);
    let mut per_axis = vec![0.0f64; n];
    for i in (0..n).rev() {
        if star[i] <= 0.0 {
            per_axis[i] = 0.0;
            continue;
        }
        let mut c = a2 / star[i];
        for j in i + 1..n {
            c += mu[j][i].abs() * per_axis[j];
        }
        per_axis[i] = c;
    }
    per_axis
        .iter()
        .fold(1f64, |m, &c| m.max(c.ceil()))
        .min(u32::MAX as f64) as u32
}

/// Provably sufficient coefficient bound for [`enum_svp`], derived from
/// the Gram-Schmidt profile and inflated by the ℓ2 norm-equivalence
/// factor. Intended for LLL-reduced bases, where it stays small.
///
/// A cheap pilot pass over the `[−2, 2]^n` box first sharpens the λ₁
/// upper bound: any nonzero vector it finds caps the radius the full box
/// has to cover.
pub fn default_coeff_bound(basis: &Basis, p: NormP) -> u32 {
    let n = basis.rank();
    let mut lambda_upper = (0..n)
        .map(|i| lp_norm(basis.column_f64(i), p))
        .fold(f64::INFINITY, f64::min);
    if n <= 10 {
        if let Ok((_, pilot)) = enum_svp(basis, p, 2) {
            lambda_upper = lambda_upper.min(pilot);
        }
    }
    let a2 = lambda_upper * l2_conversion(n, p);
    profile_bound(basis, a2).max(1)
}

fn guard_box(n: usize, bound: u32) -> Result<()> {
    let per_axis = 2.0 * bound as f64 + 1.0;
    if per_axis.powi(n as i32) > MAX_ENUM_CANDIDATES {
        return Err(Error::TooLarge(format!(
            "enumeration box (2·{bound}+1)^{n} exceeds {MAX_ENUM_CANDIDATES:.0} candidates"
        )));
    }
    Ok(())
}

/// Exhaustive SVP: enumerates `z ∈ [−coeff_bound, coeff_bound]^n \ {0}`
/// and returns the minimizer of `‖B·z‖_p`. With a bound from
/// [`default_coeff_bound`] on an LLL-reduced basis the result is exactly
/// `λ₁^{(p)}`.
pub fn enum_svp(basis: &Basis, p: NormP, coeff_bound: u32) -> Result<(LatticePoint, f64)> {
    let n = basis.rank();
    guard_box(n, coeff_bound)?;
    let mut best_norm = f64::INFINITY;
    let mut best_z = vec![0i64; n];
    enumerate_box(basis, &vec![0i64; n], coeff_bound, |z, v| {
        if z.iter().all(|&c| c == 0) {
            return;
        }
        let norm = lp_norm(v, p);
        if norm < best_norm {
            best_norm = norm;
            best_z.copy_from_slice(z);
        }
    });
    Ok((LatticePoint::from_i64(&best_z), best_norm))
}

/// Babai nearest-plane point: integer coefficients and the residual
/// `t − B·z₀`, whose projection on every `b*_i` is at most `‖b*_i‖/2`.
fn babai_nearest_plane(basis: &Basis, target: &[f64]) -> (Vec<i64>, Vec<f64>) {
    let n = basis.rank();
    let (_, mu) = gso_profile(basis);
    // rebuild b* vectors for the projections
    let mut star: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = basis.column_f64(i).to_vec();
        for j in 0..i {
            let m = mu[i][j];
            for (vk, bk) in v.iter_mut().zip(&star[j]) {
                *vk -= m * bk;
            }
        }
        star.push(v);
    }
    let mut residual = target.to_vec();
    let mut coeffs = vec![0i64; n];
    for i in (0..n).rev() {
        let nb: f64 = star[i].iter().map(|x| x * x).sum();
        if nb == 0.0 {
            continue;
        }
        let c: f64 = residual.iter().zip(&star[i]).map(|(r, s)| r * s).sum::<f64>() / nb;
        let k = c.round();
        coeffs[i] = k as i64;
        if k != 0.0 {
            for (r, b) in residual.iter_mut().zip(basis.column_f64(i)) {
                *r -= k * b;
            }
        }
    }
    (coeffs, residual)
}

/// Exhaustive CVP: minimizes `‖B·z − t‖_p` over the coefficient box
/// centred on the Babai nearest-plane point of `t`.
pub fn enum_cvp(
    basis: &Basis,
    target: &[f64],
    p: NormP,
    coeff_bound: u32,
) -> Result<(LatticePoint, f64)> {
    let n = basis.rank();
    if target.len() != n {
        return Err(Error::InvalidParameter(format!(
            "target dimension {} does not match rank {n}",
            target.len()
        )));
    }
    guard_box(n, coeff_bound)?;
    let (centre, _) = babai_nearest_plane(basis, target);
    let mut best_norm = f64::INFINITY;
    let mut best_z = centre.clone();
    enumerate_box(basis, &centre, coeff_bound, |z, v| {
        let diff: Vec<f64> = v.iter().zip(target).map(|(a, b)| a - b).collect();
        let d = lp_norm(&diff, p);
        if d < best_norm {
            best_norm = d;
            best_z.copy_from_slice(z);
        }
    });
    Ok((LatticePoint::from_i64(&best_z), best_norm))
}

/// Default coefficient bound for [`enum_cvp`]: any point at least as
/// close as the Babai nearest-plane point satisfies
/// `‖B(z − z₀)‖₂ ≤ conv·‖r₀‖_p + ‖r₀‖₂`, boxed by the profile bound.
pub fn default_cvp_coeff_bound(basis: &Basis, target: &[f64], p: NormP) -> u32 {
    let n = basis.rank();
    let (_, res) = babai_nearest_plane(basis, target);
    let d2 = lp_norm(&res, NormP::L2);
    let dp = lp_norm(&res, p);
    let a2 = d2 + dp * l2_conversion(n, p) + 1e-9;
    profile_bound(basis, a2).max(1)
}

/// Depth-first odometer over `z ∈ centre + [−bound, bound]^n` with partial
/// embeddings, calling `f(z, B·z)` at every leaf.
fn enumerate_box<F: FnMut(&[i64], &[f64])>(
    basis: &Basis,
    centre: &[i64],
    bound: u32,
    mut f: F,
) {
    let n = basis.rank();
    let b = bound as i64;
    let mut z = vec![0i64; n];
    let mut partial = vec![vec![0.0f64; n]; n + 1];
    fn rec<F: FnMut(&[i64], &[f64])>(
        basis: &Basis,
        centre: &[i64],
        b: i64,
        level: usize,
        z: &mut Vec<i64>,
        partial: &mut Vec<Vec<f64>>,
        f: &mut F,
    ) {
        let n = basis.rank();
        if level == n {
            let v = partial[n].clone();
            f(z, &v);
            return;
        }
        for c in centre[level] - b..=centre[level] + b {
            z[level] = c;
            let col = basis.column_f64(level);
            let (head, tail) = partial.split_at_mut(level + 1);
            for k in 0..n {
                tail[0][k] = head[level][k] + c as f64 * col[k];
            }
            rec(basis, centre, b, level + 1, z, partial, f);
        }
    }
    rec(basis, centre, b, 0, &mut z, &mut partial, &mut f);
}

/// Numeric value of the hypercube covering bound
/// `(1+γ)^n · vol(B_p^n(R)) / edge^n` with `edge = γR/n^{1/p}`, the
/// quantity the covering lemma compares cell counts against.
pub fn cell_count_volume_bound(n: usize, radius: f64, gamma: f64, p: NormP) -> f64 {
    let edge = gamma * radius / p.dim_root(n);
    let lg = n as f64 * (1.0 + gamma).log2() + log2_ball_volume(n, radius, p)
        - n as f64 * edge.log2();
    lg.exp2()
}

/// Exact count of grid cells whose closed cube intersects the closed ball
/// `B_p^n(R)`, by flood fill from the origin cell using the
/// nearest-point-in-cube distance. Exponential in `n`; refuses `n > 6` and
/// projected counts above 1e8.
pub fn count_intersecting_cells(
    n: usize,
    radius: f64,
    gamma: f64,
    p: NormP,
    anchoring: Anchoring,
) -> Result<u64> {
    if n == 0 || n > 6 {
        return Err(Error::TooLarge(format!(
            "cell counting is exponential; n must satisfy 1 <= n <= 6 (got {n})"
        )));
    }
    if !(gamma > 0.0 && gamma < 1.0) || !(radius > 0.0) {
        return Err(Error::InvalidParameter(
            "cell counting needs gamma in (0,1) and radius > 0".into(),
        ));
    }
    let projected = cell_count_volume_bound(n, radius, gamma, p);
    if projected > MAX_CELL_COUNT {
        return Err(Error::TooLarge(format!(
            "projected cell count {projected:.3e} exceeds {MAX_CELL_COUNT:.0}"
        )));
    }
    let edge = gamma * radius / p.dim_root(n);
    let half = edge / 2.0;
    let cells_per_axis = (2.0 * radius / edge).ceil() as i64;

    // Closed cube of a cell along one axis.
    let axis_range = |j: i64| -> (f64, f64) {
        match anchoring {
            Anchoring::OriginCentred => (j as f64 * edge - half, j as f64 * edge + half),
            Anchoring::CornerAnchored => (-radius + j as f64 * edge, -radius + (j + 1) as f64 * edge),
        }
    };
    let in_domain = |j: i64| -> bool {
        match anchoring {
            Anchoring::OriginCentred => true,
            Anchoring::CornerAnchored => (0..cells_per_axis).contains(&j),
        }
    };
    let intersects = |cell: &[i64]| -> bool {
        // nearest point of the closed cube to the origin, coordinatewise clamp
        let mut nearest = vec![0.0f64; n];
        for (k, &j) in cell.iter().enumerate() {
            let (lo, hi) = axis_range(j);
            nearest[k] = 0.0f64.clamp(lo, hi);
        }
        lp_norm(&nearest, p) <= radius * (1.0 + 1e-12)
    };

    let origin: Vec<i64> = match anchoring {
        Anchoring::OriginCentred => vec![0; n],
        Anchoring::CornerAnchored => {
            (0..n).map(|_| ((radius / edge).floor() as i64).clamp(0, cells_per_axis - 1)).collect()
        }
    };
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut queue: VecDeque<Vec<i64>> = VecDeque::new();
    debug_assert!(intersects(&origin));
    seen.insert(origin.clone());
    queue.push_back(origin);
    let mut count = 0u64;
    while let Some(cell) = queue.pop_front() {
        count += 1;
        if count as f64 > MAX_CELL_COUNT {
            return Err(Error::TooLarge("cell flood fill exceeded 1e8 cells".into()));
        }
        for k in 0..n {
            for step in [-1i64, 1] {
                let mut next = cell.clone();
                next[k] += step;
                if !in_domain(next[k]) || seen.contains(&next) {
                    continue;
                }
                if intersects(&next) {
                    seen.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{lll_reduce, random_lattice, LatticeKind};
    use proptest::prelude::*;

    #[test]
    fn enum_svp_identity() {
        let b = Basis::identity(4);
        let (z, norm) = enum_svp(&b, NormP::L1, 1).unwrap();
        assert_eq!(norm, 1.0);
        assert!(!z.is_zero());
    }

    #[test]
    fn enum_svp_example_2d() {
        let b = Basis::from_integer_columns(&[vec![2, 0], vec![1, 2]]).unwrap();
        let (_, norm) = enum_svp(&b, NormP::L2, 3).unwrap();
        assert!((norm - 2.0).abs() < 1e-12);
    }

    #[test]
    fn enum_svp_homogeneous() {
        let b = Basis::from_integer_columns(&[vec![3, 1], vec![1, 4]]).unwrap();
        let scaled = Basis::from_integer_columns(&[vec![15, 5], vec![5, 20]]).unwrap();
        let (_, n1) = enum_svp(&b, NormP::L2, 4).unwrap();
        let (_, n5) = enum_svp(&scaled, NormP::L2, 4).unwrap();
        assert!((n5 - 5.0 * n1).abs() < 1e-9 * n5);
    }

    #[test]
    fn enum_svp_unimodular_invariance() {
        let b = Basis::from_integer_columns(&[vec![5, 2, 0], vec![1, 7, 1], vec![0, 3, 4]]).unwrap();
        // apply the unimodular transform c2 += 3·c1, c3 −= c2
        let c1: Vec<i64> = vec![5, 2, 0];
        let c2: Vec<i64> = (0..3).map(|k| [1, 7, 1][k] + 3 * c1[k]).collect();
        let c3: Vec<i64> = (0..3).map(|k| [0, 3, 4][k] - c2[k]).collect();
        let u = Basis::from_integer_columns(&[c1, c2, c3]).unwrap();
        let (_, n0) = enum_svp(&b, NormP::L2, default_coeff_bound(&lll_reduce(&b), NormP::L2).max(6)).unwrap();
        let (_, n1) = enum_svp(&u, NormP::L2, default_coeff_bound(&lll_reduce(&u), NormP::L2).max(6)).unwrap();
        // enumerate on the reduced bases to keep boxes honest
        let (_, r0) = enum_svp(&lll_reduce(&b), NormP::L2, default_coeff_bound(&lll_reduce(&b), NormP::L2)).unwrap();
        let (_, r1) = enum_svp(&lll_reduce(&u), NormP::L2, default_coeff_bound(&lll_reduce(&u), NormP::L2)).unwrap();
        assert!((r0 - r1).abs() < 1e-9);
        assert!(n0 >= r0 - 1e-9 && n1 >= r1 - 1e-9);
    }

    #[test]
    fn enum_refuses_huge_boxes() {
        let b = Basis::identity(8);
        assert!(matches!(enum_svp(&b, NormP::L2, 40), Err(Error::TooLarge(_))));
    }

    #[test]
    fn enum_cvp_examples() {
        // target on the lattice → distance 0
        let b = Basis::from_integer_columns(&[vec![2, 0], vec![1, 2]]).unwrap();
        let t = b.embed_f64(&[3, -2]);
        let (z, d) = enum_cvp(&b, &t, NormP::L2, 2).unwrap();
        assert!(d < 1e-12);
        assert_eq!(z, LatticePoint::from_i64(&[3, -2]));

        // Z², t = (0.4, 0.4) → nearest (0,0), distance √0.32
        let id = Basis::identity(2);
        let (z, d) = enum_cvp(&id, &[0.4, 0.4], NormP::L2, 2).unwrap();
        assert!(z.is_zero());
        assert!((d - 0.32f64.sqrt()).abs() < 1e-12);
    }

    proptest! {
        // CVP distance is invariant under translating t by a lattice vector.
        #[test]
        fn cvp_translation_invariance(tx in -2.0f64..2.0, ty in -2.0f64..2.0,
                                      sx in -3i64..3, sy in -3i64..3) {
            let b = Basis::from_integer_columns(&[vec![2, 1], vec![0, 3]]).unwrap();
            let t = [tx, ty];
            let shift = b.embed_f64(&[sx, sy]);
            let t2 = [tx + shift[0], ty + shift[1]];
            let bound = default_cvp_coeff_bound(&b, &t, NormP::L2).max(
                default_cvp_coeff_bound(&b, &t2, NormP::L2));
            let (_, d1) = enum_cvp(&b, &t, NormP::L2, bound).unwrap();
            let (_, d2) = enum_cvp(&b, &t2, NormP::L2, bound).unwrap();
            prop_assert!((d1 - d2).abs() < 1e-9 * (1.0 + d1.abs()));
        }
    }

    #[test]
    fn default_bound_recovers_lambda1_small_corpus() {
        for seed in 0..8u64 {
            let b = lll_reduce(&random_lattice(4, LatticeKind::Knapsack, 8, seed).unwrap());
            let bound = default_coeff_bound(&b, NormP::L2);
            let (_, norm) = enum_svp(&b, NormP::L2, bound).unwrap();
            // λ₁ can never beat the shortest basis column, and the box
            // includes all unit vectors, so norm ≤ min column norm.
            let min_col = (0..4)
                .map(|i| lp_norm(b.column_f64(i), NormP::L2))
                .fold(f64::INFINITY, f64::min);
            assert!(norm <= min_col + 1e-12);
        }
    }

    #[test]
    fn cell_count_1d() {
        // n=1: intervals of length γR covering [−R, R]
        let count = count_intersecting_cells(1, 1.0, 0.5, NormP::L2, Anchoring::OriginCentred)
            .unwrap();
        // r = 0.25: cells j with (2j−1)·0.25 ≤ 1 → |j| ≤ 2 → 5 cells
        assert_eq!(count, 5);
    }

    #[test]
    fn cell_count_corner_linf_exact() {
        // ⌈2/γ⌉^n cells exactly for the corner-anchored max-norm covering
        let count =
            count_intersecting_cells(2, 1.0, 0.5, NormP::Infinity, Anchoring::CornerAnchored)
                .unwrap();
        assert_eq!(count, 16);
        let count =
            count_intersecting_cells(3, 2.0, 0.3, NormP::Infinity, Anchoring::CornerAnchored)
                .unwrap();
        assert_eq!(count, 7u64.pow(3));
    }

    #[test]
    fn cell_count_within_volume_bound_spot() {
        for &(n, gamma, p) in &[
            (2usize, 0.5f64, NormP::L1),
            (3, 0.5, NormP::L2),
            (2, 0.3, NormP::Infinity),
        ] {
            let count =
                count_intersecting_cells(n, 1.0, gamma, p, Anchoring::OriginCentred).unwrap();
            let bound = cell_count_volume_bound(n, 1.0, gamma, p);
            assert!(
                (count as f64) <= bound * (1.0 + 1e-9),
                "count {count} vs bound {bound} at n={n} gamma={gamma} p={p}"
            );
        }
    }

    #[test]
    fn cell_count_refusals() {
        assert!(count_intersecting_cells(7, 1.0, 0.5, NormP::L2, Anchoring::OriginCentred).is_err());
        assert!(count_intersecting_cells(6, 1.0, 0.01, NormP::L1, Anchoring::OriginCentred).is_err());
    }

    #[test]
    fn oracle_never_beaten_by_shortest_column() {
        for seed in 0..6u64 {
            let b = lll_reduce(&random_lattice(3, LatticeKind::UniformModular, 6, seed).unwrap());
            let (_, lam) = enum_svp(&b, NormP::L1, default_coeff_bound(&b, NormP::L1)).unwrap();
            for i in 0..3 {
                assert!(lam <= lp_norm(b.column_f64(i), NormP::L1) + 1e-12);
            }
        }
    }
}
