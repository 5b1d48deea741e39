//! Exact lattice arithmetic: bases over arbitrary-precision rationals,
//! LLL reduction, reduction modulo the fundamental parallelepiped, the λ₁
//! guess ladder, basis scaling, and random test-lattice generation.

mod io;
mod lll;

pub use io::{format_basis, parse_basis, parse_vector};
pub use lll::lll_reduce;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::geometry::{lp_norm, NormP};
use crate::{Error, Result};

/// A lattice point, held as exact integer coefficients `z` with `v = B·z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePoint {
    pub coeffs: Vec<BigInt>,
}

impl LatticePoint {
    pub fn zero(n: usize) -> Self {
        LatticePoint {
            coeffs: vec![BigInt::zero(); n],
        }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        LatticePoint {
            coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

/// An `n×n` full-rank basis. Columns are exact rationals; a cached
/// double-precision mirror backs all norm computations.
#[derive(Debug, Clone)]
pub struct Basis {
    n: usize,
    cols: Vec<Vec<BigRational>>,
    cols_f64: Vec<Vec<f64>>,
}

impl Basis {
    /// Builds a basis from exact columns, checking squareness and full rank
    /// by exact elimination.
    pub fn from_columns(cols: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = cols.len();
        if n == 0 {
            return Err(Error::InvalidParameter("basis must be non-empty".into()));
        }
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidParameter(
                "basis must be square (full-rank lattices only)".into(),
            ));
        }
        let b = Basis {
            n,
            cols_f64: cols
                .iter()
                .map(|c| c.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
                .collect(),
            cols,
        };
        if b.det().is_zero() {
            return Err(Error::InvalidParameter(
                "basis columns are linearly dependent".into(),
            ));
        }
        Ok(b)
    }

    pub fn from_integer_columns(cols: &[Vec<i64>]) -> Result<Self> {
        Self::from_columns(
            cols.iter()
                .map(|c| c.iter().map(|&x| BigRational::from(BigInt::from(x))).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let cols = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_columns(cols).expect("identity is full rank")
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn column(&self, i: usize) -> &[BigRational] {
        &self.cols[i]
    }

    pub fn columns(&self) -> &[Vec<BigRational>] {
        &self.cols
    }

    pub fn column_f64(&self, i: usize) -> &[f64] {
        &self.cols_f64[i]
    }

    pub fn columns_f64(&self) -> &[Vec<f64>] {
        &self.cols_f64
    }

    /// `max_i ‖b_i‖_p` over the float mirror.
    pub fn max_column_norm(&self, p: NormP) -> f64 {
        self.cols_f64
            .iter()
            .map(|c| lp_norm(c, p))
            .fold(0.0, f64::max)
    }

    /// Exact determinant by fraction-free-ish rational elimination.
    pub fn det(&self) -> BigRational {
        let n = self.n;
        // Row-major copy of the matrix whose columns are the basis vectors.
        let mut m: Vec<Vec<BigRational>> = (0..n)
            .map(|r| (0..n).map(|c| self.cols[c][r].clone()).collect())
            .collect();
        let mut det = BigRational::one();
        for k in 0..n {
            let pivot = (k..n).find(|&r| !m[r][k].is_zero());
            let Some(pr) = pivot else {
                return BigRational::zero();
            };
            if pr != k {
                m.swap(pr, k);
                det = -det;
            }
            det *= m[k][k].clone();
            let inv = m[k][k].recip();
            for r in k + 1..n {
                if m[r][k].is_zero() {
                    continue;
                }
                let f = &m[r][k] * &inv;
                for c in k..n {
                    let sub = &f * &m[k][c];
                    m[r][c] -= sub;
                }
            }
        }
        det
    }

    /// Solves `B·x = rhs` exactly. Panics if the basis is singular, which
    /// the constructor rules out.
    pub fn solve(&self, rhs: &[BigRational]) -> Vec<BigRational> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let mut m: Vec<Vec<BigRational>> = (0..n)
            .map(|r| {
                let mut row: Vec<BigRational> =
                    (0..n).map(|c| self.cols[c][r].clone()).collect();
                row.push(rhs[r].clone());
                row
            })
            .collect();
        for k in 0..n {
            let pr = (k..n)
                .find(|&r| !m[r][k].is_zero())
                .expect("full-rank basis");
            m.swap(pr, k);
            let inv = m[k][k].recip();
            for c in k..=n {
                let v = &m[k][c] * &inv;
                m[k][c] = v;
            }
            for r in 0..n {
                if r == k || m[r][k].is_zero() {
                    continue;
                }
                let f = m[r][k].clone();
                for c in k..=n {
                    let sub = &f * &m[k][c];
                    m[r][c] -= sub;
                }
            }
        }
        (0..n).map(|r| m[r][n].clone()).collect()
    }

    /// `B·z` exactly.
    pub fn embed(&self, z: &LatticePoint) -> Vec<BigRational> {
        assert_eq!(z.coeffs.len(), self.n);
        let mut v = vec![BigRational::zero(); self.n];
        for (c, col) in z.coeffs.iter().zip(&self.cols) {
            if c.is_zero() {
                continue;
            }
            let cr = BigRational::from(c.clone());
            for (vi, bi) in v.iter_mut().zip(col) {
                *vi += &cr * bi;
            }
        }
        v
    }

    /// `B·z` over the float mirror.
    pub fn embed_f64(&self, z: &[i64]) -> Vec<f64> {
        assert_eq!(z.len(), self.n);
        let mut v = vec![0.0; self.n];
        for (&c, col) in z.iter().zip(&self.cols_f64) {
            if c == 0 {
                continue;
            }
            let cf = c as f64;
            for (vi, bi) in v.iter_mut().zip(col) {
                *vi += cf * bi;
            }
        }
        v
    }

    /// Exact coefficients of `v` in this basis, if `v` lies on the lattice.
    pub fn coefficients_of(&self, v: &[BigRational]) -> Option<LatticePoint> {
        let c = self.solve(v);
        let mut coeffs = Vec::with_capacity(self.n);
        for x in c {
            if !x.is_integer() {
                return None;
            }
            coeffs.push(x.to_integer());
        }
        Some(LatticePoint { coeffs })
    }

    /// Basis scaled by an exact rational factor.
    pub fn scale(&self, s: &BigRational) -> Basis {
        let cols = self
            .cols
            .iter()
            .map(|c| c.iter().map(|x| x * s).collect())
            .collect();
        Basis::from_columns(cols).expect("scaling preserves rank")
    }

    /// Inverse of the float mirror by partial-pivot Gauss-Jordan, used for
    /// the solvers' fast parallelepiped reduction.
    pub fn inverse_f64(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        let mut m: Vec<Vec<f64>> = (0..n)
            .map(|r| {
                let mut row: Vec<f64> = (0..n).map(|c| self.cols_f64[c][r]).collect();
                row.extend((0..n).map(|c| if c == r { 1.0 } else { 0.0 }));
                row
            })
            .collect();
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&a, &b| m[a][k].abs().partial_cmp(&m[b][k].abs()).unwrap())
                .unwrap();
            m.swap(piv, k);
            let d = m[k][k];
            for c in 0..2 * n {
                m[k][c] /= d;
            }
            for r in 0..n {
                if r == k {
                    continue;
                }
                let f = m[r][k];
                if f == 0.0 {
                    continue;
                }
                for c in 0..2 * n {
                    m[r][c] -= f * m[k][c];
                }
            }
        }
        (0..n).map(|r| m[r][n..].to_vec()).collect()
    }
}

/// Reduces `x` modulo the fundamental parallelepiped `𝒫(B)`.
///
/// Returns `(y, z)` with `y ∈ 𝒫(B)` and `x − y = B·z`. Coefficients come
/// from the exact rational solve of `B·c = x` followed by a componentwise
/// floor, so the identity `B·z + y = x` is bit-exact for rational `x`.
pub fn mod_parallelepiped(basis: &Basis, x: &[f64]) -> (Vec<f64>, LatticePoint) {
    let xr: Vec<BigRational> = x
        .iter()
        .map(|&v| BigRational::from_float(v).expect("finite coordinate"))
        .collect();
    let (y, z) = mod_parallelepiped_exact(basis, &xr);
    (
        y.iter().map(|v| v.to_f64().unwrap_or(f64::NAN)).collect(),
        z,
    )
}

/// Exact-input variant of [`mod_parallelepiped`].
pub fn mod_parallelepiped_exact(
    basis: &Basis,
    x: &[BigRational],
) -> (Vec<BigRational>, LatticePoint) {
    assert_eq!(x.len(), basis.rank());
    let c = basis.solve(x);
    let z: Vec<BigInt> = c.iter().map(|ci| ci.floor().to_integer()).collect();
    let zp = LatticePoint { coeffs: z };
    let bz = basis.embed(&zp);
    let y: Vec<BigRational> = x.iter().zip(&bz).map(|(xi, bi)| xi - bi).collect();
    (y, zp)
}

/// The λ₁ guess ladder: `λ* = ‖b₁‖_p` of an LLL-reduced basis, descending
/// by the factor `(1 + 1/n)` for `⌈n² ln 2⌉` rungs, enough to cover the
/// LLL `2^{n−1}` approximation gap so that some rung satisfies
/// `λ₁ ≤ λ ≤ (1 + 1/n)·λ₁`.
pub fn lambda_ladder(basis: &Basis, p: NormP) -> Vec<f64> {
    let n = basis.rank();
    let lambda_star = lp_norm(basis.column_f64(0), p);
    let count = ((n * n) as f64 * std::f64::consts::LN_2).ceil() as usize;
    let ratio = 1.0 / (1.0 + 1.0 / n as f64);
    let mut out = Vec::with_capacity(count.max(1));
    let mut guess = lambda_star;
    for _ in 0..count.max(1) {
        out.push(guess);
        guess *= ratio;
    }
    out
}

/// Scales the basis by an exact rational `s` so that the scaled λ₁
/// estimate lands in `[2, 3)`, the standing normalization assumed by the
/// solvers. Returns the scaled basis and `s` so outputs can be un-scaled
/// exactly.
///
/// Rule: estimates already in `[2, 3)` are left alone; otherwise the
/// smallest integer `s = ⌈2/λ⌉` is used when it lands in range, and the
/// exact-rational midpoint rule `s = (5/2)/λ` otherwise.
pub fn normalize_scale(basis: &Basis, lambda_est: f64) -> Result<(Basis, BigRational)> {
    if !(lambda_est > 0.0) || !lambda_est.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "lambda estimate must be positive and finite (got {lambda_est})"
        )));
    }
    let s = if (2.0..3.0).contains(&lambda_est) {
        BigRational::one()
    } else {
        let s_int = (2.0 / lambda_est).ceil();
        let scaled = s_int * lambda_est;
        if s_int >= 1.0 && (2.0..3.0).contains(&scaled) {
            BigRational::from(BigInt::from(s_int as i64))
        } else {
            let lam = BigRational::from_float(lambda_est).expect("finite lambda");
            BigRational::new(BigInt::from(5), BigInt::from(2)) / lam
        }
    };
    Ok((basis.scale(&s), s))
}

/// Families of random full-rank integer test lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    /// Standard q-ary row construction: first row `q·e₁`, row `i ≥ 2` is
    /// `a_i·e₁ + e_i` with `a_i` uniform mod a random prime `q`.
    UniformModular,
    /// Classic knapsack shape: first row `(m, a₂, …, a_n)` with random
    /// `a_i` mod a prime `m`, identity block below. `det = m`.
    Knapsack,
}

impl std::str::FromStr for LatticeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform_modular" | "uniform-modular" | "qary" | "q-ary" => {
                Ok(LatticeKind::UniformModular)
            }
            "knapsack" => Ok(LatticeKind::Knapsack),
            other => Err(Error::InvalidParameter(format!(
                "unknown lattice kind {other:?} (expected uniform_modular or knapsack)"
            ))),
        }
    }
}

/// Deterministically generates a random full-rank integer basis.
/// The same seed yields a bit-identical basis across runs.
pub fn random_lattice(n: usize, kind: LatticeKind, bits: u32, seed: u64) -> Result<Basis> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must satisfy n >= 1".into()));
    }
    if !(2..=48).contains(&bits) {
        return Err(Error::InvalidParameter(
            "bits must satisfy 2 <= bits <= 48".into(),
        ));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let q = random_prime(&mut rng, bits);
    let mut cols = vec![vec![0i64; n]; n];
    match kind {
        LatticeKind::UniformModular => {
            // rows: q·e₁ then a_i·e₁ + e_i ⇒ columns: (q, a₂, …, a_n), e_i.
            cols[0][0] = q as i64;
            for r in 1..n {
                cols[0][r] = rng.random_range(0..q) as i64;
                cols[r][r] = 1;
            }
        }
        LatticeKind::Knapsack => {
            // first row (m, a₂, …, a_n), identity block below.
            cols[0][0] = q as i64;
            for c in 1..n {
                cols[c][0] = rng.random_range(0..q) as i64;
                cols[c][c] = 1;
            }
        }
    }
    Basis::from_integer_columns(&cols)
}

fn random_prime<R: Rng + ?Sized>(rng: &mut R, bits: u32) -> u64 {
    let lo = 1u64 << (bits - 1);
    let hi = 1u64 << bits;
    loop {
        let cand = rng.random_range(lo..hi) | 1;
        if is_prime_u64(cand) {
            return cand;
        }
    }
}

/// Deterministic Miller-Rabin for u64 (the listed witness set is exact for
/// all 64-bit integers).
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_even() {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}
