//! LLL reduction with δ = 3/4, carried out entirely in exact rational
//! arithmetic. The sieving framework only needs LLL as a black box for its
//! λ₁ estimate and basis conditioning, so the classic textbook procedure
//! is used: size reduction, Lovász check, swap, GSO update.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::Basis;

/// Returns an LLL-reduced basis (δ = 3/4) of the same lattice. The first
/// column of the result satisfies `‖b₁‖_p ≤ 2^{n−1}·λ₁^{(p)}`.
pub fn lll_reduce(basis: &Basis) -> Basis {
    let n = basis.rank();
    let mut cols: Vec<Vec<BigRational>> = basis.columns().to_vec();
    let delta = BigRational::new(3.into(), 4.into());
    let half = BigRational::new(1.into(), 2.into());

    // Gram-Schmidt state: gso[i] = b*_i, mu[i][j] for j < i, norms[i] = ‖b*_i‖².
    let mut gso: Vec<Vec<BigRational>> = vec![Vec::new(); n];
    let mut mu: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n]; n];
    let mut norms: Vec<BigRational> = vec![BigRational::zero(); n];

    let dot = |a: &[BigRational], b: &[BigRational]| -> BigRational {
        a.iter()
            .zip(b)
            .fold(BigRational::zero(), |s, (x, y)| s + x * y)
    };

    let recompute_gso = |cols: &[Vec<BigRational>],
                         gso: &mut Vec<Vec<BigRational>>,
                         mu: &mut Vec<Vec<BigRational>>,
                         norms: &mut Vec<BigRational>,
                         from: usize| {
        for i in from..cols.len() {
            let mut star = cols[i].clone();
            for j in 0..i {
                let m = if norms[j].is_zero() {
                    BigRational::zero()
                } else {
                    dot(&cols[i], &gso[j]) / &norms[j]
                };
                for (s, g) in star.iter_mut().zip(&gso[j]) {
                    *s -= &m * g;
                }
                mu[i][j] = m;
            }
            norms[i] = dot(&star, &star);
            gso[i] = star;
        }
    };

    recompute_gso(&cols, &mut gso, &mut mu, &mut norms, 0);

    let mut k = 1usize;
    while k < n {
        // Size-reduce b_k against b_{k-1}, …, b_0.
        for j in (0..k).rev() {
            if mu[k][j].abs() > half {
                let q = mu[k][j].round();
                for (c, cj) in {
                    let (head, tail) = cols.split_at_mut(k);
                    tail[0].iter_mut().zip(&head[j])
                } {
                    *c -= &q * cj;
                }
                for l in 0..j {
                    let adj = &q * &mu[j][l];
                    mu[k][l] -= adj;
                }
                // mu[j][j] = 1 implicitly, so mu[k][j] drops by q into [-1/2, 1/2]
                mu[k][j] -= q;
            }
        }
        let lovasz_rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &norms[k - 1];
        if norms[k] >= lovasz_rhs {
            k += 1;
        } else {
            cols.swap(k, k - 1);
            recompute_gso(&cols, &mut gso, &mut mu, &mut norms, k - 1);
            k = k.max(2) - 1;
        }
    }

    Basis::from_columns(cols).expect("LLL preserves rank")
}
