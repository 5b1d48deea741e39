//! ℓp norms, ℓp ball volumes, uniform sampling inside ℓp balls, and the
//! ball-overlap exponent `c_s`.
//!
//! All comparisons in this module are carried out in floating point with a
//! relative tolerance of 1e-9; exactness elsewhere in the crate is carried
//! by integer lattice coefficients, not by these scalars.

use std::fmt;
use std::str::FromStr;

use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Serialize, Serializer};

use crate::{Error, Result};

/// Relative tolerance for geometric comparisons.
pub const GEOM_REL_TOL: f64 = 1e-9;

/// The norm parameter: a finite exponent `p ≥ 1` or the max norm.
///
/// `p` is a tagged value rather than a sentinel float so that every
/// operation branches on the max-norm limit explicitly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormP {
    Finite(f64),
    Infinity,
}

impl NormP {
    pub const L1: NormP = NormP::Finite(1.0);
    pub const L2: NormP = NormP::Finite(2.0);

    /// Builds a finite-`p` norm, rejecting `p < 1` and non-finite values.
    pub fn finite(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "p must satisfy p >= 1 (got {p})"
            )));
        }
        Ok(NormP::Finite(p))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, NormP::Infinity)
    }

    /// `n^{1/p}`, the factor relating a hypercube edge to its ℓp diameter;
    /// degenerates to 1 for the max norm.
    pub fn dim_root(&self, n: usize) -> f64 {
        match self {
            NormP::Finite(p) => (n as f64).powf(1.0 / p),
            NormP::Infinity => 1.0,
        }
    }
}

impl fmt::Display for NormP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormP::Finite(p) if p.fract() == 0.0 => write!(f, "{}", *p as i64),
            NormP::Finite(p) => write!(f, "{p}"),
            NormP::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for NormP {
    type Err = Error;

    /// Accepts a real `p ≥ 1`, or `inf`/`infinity` (case-insensitive).
    /// `0` also parses as the max norm; it is unambiguous since `p ≥ 1`
    /// otherwise.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "0" {
            return Ok(NormP::Infinity);
        }
        let p: f64 = t
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("cannot parse norm exponent {t:?}")))?;
        NormP::finite(p)
    }
}

impl Serialize for NormP {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `(Σ|v_i|^p)^{1/p}` for finite `p`, `max_i |v_i|` for the max norm.
///
/// The empty vector is a contract violation; callers own the dimension.
pub fn lp_norm<F: Float>(v: &[F], p: NormP) -> F {
    debug_assert!(!v.is_empty(), "norm of an empty vector");
    match p {
        NormP::Infinity => v.iter().fold(F::zero(), |m, &x| m.max(x.abs())),
        NormP::Finite(q) if q == 1.0 => v.iter().fold(F::zero(), |s, &x| s + x.abs()),
        NormP::Finite(q) if q == 2.0 => v.iter().fold(F::zero(), |s, &x| s + x * x).sqrt(),
        NormP::Finite(q) if q.fract() == 0.0 && q <= 8.0 => {
            let e = q as i32;
            let qf = F::from(q).unwrap();
            v.iter()
                .fold(F::zero(), |s, &x| s + x.abs().powi(e))
                .powf(qf.recip())
        }
        NormP::Finite(q) => {
            let q = F::from(q).unwrap();
            v.iter()
                .fold(F::zero(), |s, &x| s + x.abs().powf(q))
                .powf(q.recip())
        }
    }
}

/// ℓp distance between two points of equal dimension.
pub fn lp_distance<F: Float>(a: &[F], b: &[F], p: NormP) -> F {
    debug_assert_eq!(a.len(), b.len());
    match p {
        NormP::Infinity => a
            .iter()
            .zip(b)
            .fold(F::zero(), |m, (&x, &y)| m.max((x - y).abs())),
        NormP::Finite(q) if q == 1.0 => a
            .iter()
            .zip(b)
            .fold(F::zero(), |s, (&x, &y)| s + (x - y).abs()),
        NormP::Finite(q) if q == 2.0 => a
            .iter()
            .zip(b)
            .fold(F::zero(), |s, (&x, &y)| s + (x - y) * (x - y))
            .sqrt(),
        NormP::Finite(q) if q.fract() == 0.0 && q <= 8.0 => {
            let e = q as i32;
            let qf = F::from(q).unwrap();
            a.iter()
                .zip(b)
                .fold(F::zero(), |s, (&x, &y)| s + (x - y).abs().powi(e))
                .powf(qf.recip())
        }
        NormP::Finite(q) => {
            let q = F::from(q).unwrap();
            a.iter()
                .zip(b)
                .fold(F::zero(), |s, (&x, &y)| s + (x - y).abs().powf(q))
                .powf(q.recip())
        }
    }
}

/// Natural log of the gamma function (Lanczos, g = 7, 9 coefficients;
/// relative error ≈ 1e-13 on the positive axis).
pub fn ln_gamma<F: Float>(x: F) -> F {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    let half = F::from(0.5).unwrap();
    let one = F::one();
    if x < half {
        // Reflection: Γ(x)Γ(1−x) = π / sin(πx).
        let pi = F::from(std::f64::consts::PI).unwrap();
        return pi.ln() - (pi * x).sin().abs().ln() - ln_gamma(one - x);
    }
    let x = x - one;
    let mut acc = F::from(0.99999999999980993).unwrap();
    for (i, &c) in COEFFS.iter().enumerate() {
        acc = acc + F::from(c).unwrap() / (x + F::from(i + 1).unwrap());
    }
    let g = F::from(7.5).unwrap();
    let t = x + g;
    let ln_sqrt_2pi = F::from(0.918938533204672741780329736406).unwrap();
    ln_sqrt_2pi + (x + half) * t.ln() - t + acc.ln()
}

/// Base-2 log of `vol(B_p^n(r))`; the overflow-safe companion of
/// [`ball_volume`].
pub fn log2_ball_volume<F: Float>(n: usize, r: F, p: NormP) -> F {
    debug_assert!(n >= 1 && r > F::zero());
    let two = F::from(2.0).unwrap();
    let nf = F::from(n).unwrap();
    match p {
        NormP::Infinity => nf * (two * r).log2(),
        NormP::Finite(q) => {
            let q = F::from(q).unwrap();
            let ln2 = F::from(std::f64::consts::LN_2).unwrap();
            let lg_gamma_unit = ln_gamma(q.recip() + F::one()) / ln2;
            let lg_gamma_dim = ln_gamma(nf / q + F::one()) / ln2;
            nf * ((two * r).log2() + lg_gamma_unit) - lg_gamma_dim
        }
    }
}

/// `vol(B_p^n(r)) = (2 Γ(1/p + 1) r)^n / Γ(n/p + 1)`, and `(2r)^n` for the
/// max norm. Overflows to `inf` for huge `n log r`; use
/// [`log2_ball_volume`] there.
pub fn ball_volume<F: Float>(n: usize, r: F, p: NormP) -> F {
    log2_ball_volume(n, r, p).exp2()
}

/// Draws a point uniformly distributed on `B_p^n(centre, radius)`.
///
/// Finite `p` uses the generalized-normal construction: each coordinate is
/// drawn with density ∝ exp(−|t|^p) (via `|t|^p ~ Gamma(1/p, 1)`), the
/// vector is normalized to the unit ℓp sphere and scaled by `U^{1/n}·r`.
/// For the max norm each coordinate is uniform in `[−r, r]`.
pub fn sample_ball_uniform<R: Rng + ?Sized>(
    rng: &mut R,
    centre: &[f64],
    radius: f64,
    p: NormP,
) -> Vec<f64> {
    debug_assert!(radius > 0.0);
    let n = centre.len();
    match p {
        NormP::Infinity => centre
            .iter()
            .map(|&c| c + radius * (2.0 * rng.random::<f64>() - 1.0))
            .collect(),
        NormP::Finite(q) => {
            let gamma = Gamma::new(1.0 / q, 1.0).expect("valid gamma shape");
            loop {
                let mut g = vec![0.0f64; n];
                for gi in g.iter_mut() {
                    let mag = gamma.sample(rng).powf(1.0 / q);
                    let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    *gi = sign * mag;
                }
                let w = lp_norm(&g, p);
                if w <= 0.0 || !w.is_finite() {
                    continue; // measure-zero degenerate draw
                }
                let scale = radius * rng.random::<f64>().powf(1.0 / n as f64) / w;
                for (gi, &c) in g.iter_mut().zip(centre) {
                    *gi = c + *gi * scale;
                }
                return g;
            }
        }
    }
}

/// The overlap exponent `c_s` with `q ≥ 2^{−c_s·n}`, where `q` is the
/// volume fraction of `B_p(a) ∩ B_p(±u, a)` at `a = ξλ`, `‖u‖_p = λ`.
///
/// Per-norm formulas: generic finite `p` gives `−log₂(1/2 − 1/(4ξ))`,
/// `p = 2` sharpens to `−½·log₂(1 − 1/(4ξ²))`, and the max norm gives
/// `−log₂(1 − 1/(2ξ))`.
///
/// The underlying overlap bound needs `λ < 2a`, i.e. `ξ > 1/2`; solvers
/// only call with `a = ξλ`, so the condition is the caller's obligation
/// and only `ξ` itself is checked here.
pub fn overlap_exponent_cs<F: Float>(xi: F, p: NormP) -> Result<F> {
    let half = F::from(0.5).unwrap();
    if !(xi > half) {
        return Err(Error::InvalidParameter(
            "xi must satisfy xi > 1/2 (overlap fraction vanishes otherwise)".into(),
        ));
    }
    let one = F::one();
    let quarter = F::from(0.25).unwrap();
    let v = match p {
        NormP::Finite(q) if q == 2.0 => {
            return Ok(-half * (one - quarter / (xi * xi)).log2());
        }
        NormP::Infinity => one - half / xi,
        NormP::Finite(_) => half - quarter / xi,
    };
    Ok(-v.log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn norm_examples() {
        assert_eq!(lp_norm(&[3.0, 4.0], NormP::L2), 5.0);
        assert_eq!(lp_norm(&[1.0, -1.0, 1.0, -1.0], NormP::L1), 4.0);
        assert_eq!(lp_norm(&[1.0, -2.0, 3.0], NormP::Infinity), 3.0);
    }

    #[test]
    fn norm_generic_p() {
        // p = 3 with a f32 scalar: (1 + 8 + 27)^{1/3} = 36^{1/3}
        let v: [f32; 3] = [1.0, -2.0, 3.0];
        let got = lp_norm(&v, NormP::Finite(3.0));
        assert!((got - 36f32.powf(1.0 / 3.0)).abs() < 1e-6);
    }

    #[test]
    fn norm_parsing() {
        assert_eq!("inf".parse::<NormP>().unwrap(), NormP::Infinity);
        assert_eq!("INF".parse::<NormP>().unwrap(), NormP::Infinity);
        assert_eq!("0".parse::<NormP>().unwrap(), NormP::Infinity);
        assert_eq!("2".parse::<NormP>().unwrap(), NormP::L2);
        assert!("0.5".parse::<NormP>().is_err());
        assert_eq!(NormP::Finite(2.0).to_string(), "2");
        assert_eq!(NormP::Infinity.to_string(), "inf");
    }

    #[test]
    fn ball_volume_examples() {
        // (2R)^n for the max norm
        assert!((ball_volume(3, 1.0, NormP::Infinity) - 8.0).abs() < 1e-12);
        // unit cross-polytope area = 2
        assert!((ball_volume(2, 1.0, NormP::L1) - 2.0).abs() < 1e-9);
        // unit disc area = π
        assert!((ball_volume(2, 1.0, NormP::L2) - std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        for n in 1..15u32 {
            let fact: f64 = (1..n).map(f64::from).product();
            let got = ln_gamma(n as f64);
            assert!(
                (got - fact.ln()).abs() < 1e-10 * (1.0 + fact.ln().abs()),
                "ln_gamma({n}) = {got}, want {}",
                fact.ln()
            );
        }
    }

    proptest! {
        // vol(B(cR)) = c^n vol(B(R)) to 1e-9 relative.
        #[test]
        fn ball_volume_scaling(n in 1usize..=10, c in 0.1f64..8.0, r in 0.1f64..8.0,
                               pick in 0usize..4) {
            let p = [NormP::L1, NormP::L2, NormP::Finite(3.0), NormP::Infinity][pick];
            let lhs = ball_volume(n, c * r, p);
            let rhs = c.powi(n as i32) * ball_volume(n, r, p);
            prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
        }

        // Norm equivalence sandwich against ℓ2.
        #[test]
        fn norm_equivalence(v in proptest::collection::vec(-100.0f64..100.0, 1..12),
                            pfrac in 0.0f64..1.0, high in proptest::bool::ANY) {
            let n = v.len() as f64;
            let p_val = if high { 2.0 + pfrac * 8.0 } else { 1.0 + pfrac };
            let p = NormP::Finite(p_val);
            let np = lp_norm(&v, p);
            let n2 = lp_norm(&v, NormP::L2);
            let tol = 1e-9 * (np + n2 + 1.0);
            if p_val >= 2.0 {
                prop_assert!(np <= n2 + tol);
                prop_assert!(n2 <= n.sqrt() * np + tol);
            } else {
                prop_assert!(n2 <= np + tol);
                prop_assert!(np <= n.sqrt() * n2 + tol);
            }
        }
    }

    #[test]
    fn sampler_1d_is_uniform_interval() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let mut inside = 0usize;
        let total = 20_000;
        for _ in 0..total {
            let x = sample_ball_uniform(&mut rng, &[0.0], 1.0, NormP::L2);
            assert!(x[0].abs() <= 1.0 + 1e-12);
            if x[0].abs() <= 0.5 {
                inside += 1;
            }
        }
        let frac = inside as f64 / total as f64;
        assert!((frac - 0.5).abs() < 0.02, "1-D half-interval fraction {frac}");
    }

    #[test]
    fn sampler_soundness_and_volume_ratio_linf() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let mut inside = 0usize;
        let total = 100_000;
        for _ in 0..total {
            let x = sample_ball_uniform(&mut rng, &[0.0, 0.0], 1.0, NormP::Infinity);
            assert!(lp_norm(&x, NormP::Infinity) <= 1.0 * (1.0 + 1e-12));
            if lp_norm(&x, NormP::Infinity) <= 0.5 {
                inside += 1;
            }
        }
        // vol ratio (2*0.5)^2 / 2^2 = 0.25
        let frac = inside as f64 / total as f64;
        assert!((frac - 0.25).abs() < 0.01, "fraction {frac}");
    }

    #[test]
    fn sampler_mean_zero_l2() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let total = 100_000;
        let mut sums = [0.0f64; 2];
        for _ in 0..total {
            let x = sample_ball_uniform(&mut rng, &[0.0, 0.0], 1.0, NormP::L2);
            assert!(lp_norm(&x, NormP::L2) <= 1.0 + 1e-12);
            sums[0] += x[0];
            sums[1] += x[1];
        }
        assert!((sums[0] / total as f64).abs() < 0.01);
        assert!((sums[1] / total as f64).abs() < 0.01);
    }

    #[test]
    fn sampler_soundness_various_p() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for &p in &[NormP::L1, NormP::Finite(3.0), NormP::Finite(7.5)] {
            let centre = [1.0, -2.0, 0.5, 0.0];
            for _ in 0..5_000 {
                let x = sample_ball_uniform(&mut rng, &centre, 2.5, p);
                assert!(lp_distance(&x, &centre, p) <= 2.5 * (1.0 + 1e-12));
            }
        }
    }

    /// χ² over the 8 symmetry cells of B_p², each of probability 1/8 for
    /// every p by sign and coordinate-swap symmetry. 7 dof at α = 0.001
    /// rejects above 24.322.
    #[test]
    fn sampler_chi_square_8_cells() {
        let crit = 24.322;
        for (seed, p) in [(10u64, NormP::L1), (11, NormP::L2), (12, NormP::Infinity)] {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let total = 80_000usize;
            let mut counts = [0f64; 8];
            for _ in 0..total {
                let x = sample_ball_uniform(&mut rng, &[0.0, 0.0], 1.0, p);
                let cell = ((x[0] < 0.0) as usize) << 2
                    | ((x[1] < 0.0) as usize) << 1
                    | (x[0].abs() > x[1].abs()) as usize;
                counts[cell] += 1.0;
            }
            let expected = total as f64 / 8.0;
            let chi2: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
            assert!(chi2 < crit, "chi2 = {chi2} for p = {p}");
        }
    }

    #[test]
    fn overlap_exponent_examples() {
        // p = 2, ξ = 1: −½ log2(3/4)
        let got = overlap_exponent_cs(1.0, NormP::L2).unwrap();
        assert!((got - 0.2075187496).abs() < 1e-9);
        // generic p, large ξ → 1
        let got = overlap_exponent_cs(1.0e12, NormP::Finite(3.0)).unwrap();
        assert!((got - 1.0).abs() < 1e-9);
        // generic p, ξ = 0.82: −log2(0.5 − 1/3.28)
        let got = overlap_exponent_cs(0.82, NormP::L1).unwrap();
        assert!((got - 2.3575520046).abs() < 1e-6);
        // max norm, ξ = 0.738: −log2(1 − 1/1.476)
        let got = overlap_exponent_cs(0.738, NormP::Infinity).unwrap();
        assert!((got - 1.6326).abs() < 1e-3, "{got}");
    }

    #[test]
    fn overlap_exponent_rejects_small_xi() {
        assert!(overlap_exponent_cs(0.5, NormP::L2).is_err());
        assert!(overlap_exponent_cs(0.3, NormP::Infinity).is_err());
    }
}
