//! End-to-end drivers: exact SVP, approximate SVP, and approximate CVP via
//! the embedding, plus the pair-budget and iteration-count arithmetic.
//!
//! The pipeline shared by all drivers: LLL-reduce, walk the λ guess
//! ladder, rescale so the guess lands in `[2, 3)`, sample `N` perturbation
//! pairs, run the sieving rounds with `R ← γR + ξλ`, then finish from the
//! surviving lattice vectors. Every returned vector is certified by exact
//! integer coefficients against the input basis.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use crate::exponents::CVP_XI_MARGIN;
use crate::geometry::{lp_norm, overlap_exponent_cs, sample_ball_uniform, NormP};
use crate::lattice::{lambda_ladder, lll_reduce, normalize_scale, Basis, LatticePoint};
use crate::sieve::{
    birthday_prepass, birthday_sieve_iteration, linear_sieve, mixed_sieve, quadratic_sieve,
    BirthdayPlan, GridSpec, PairSet,
};
use crate::{Error, Result};

/// Which sieving procedure drives the rounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SieveVariant {
    Linear,
    Quadratic,
    /// Mixed sieve with big-cube edge multiplier `A`.
    Mixed(f64),
    /// Linear sieve with fixed centre tables and birthday-paradox finish.
    LinearBirthday,
}

impl SieveVariant {
    pub fn name(&self) -> &'static str {
        match self {
            SieveVariant::Linear => "linear",
            SieveVariant::Quadratic => "quadratic",
            SieveVariant::Mixed(_) => "mixed",
            SieveVariant::LinearBirthday => "linear_birthday",
        }
    }

    pub fn cube_scale(&self) -> Option<f64> {
        match self {
            SieveVariant::Mixed(a) => Some(*a),
            _ => None,
        }
    }
}

/// Solver configuration.
#[derive(Debug, Clone)]
pub struct SolveParams {
    pub p: NormP,
    pub gamma: f64,
    pub xi: f64,
    pub variant: SieveVariant,
    /// Hard override of the pair budget; required when the provable budget
    /// saturates.
    pub n_override: Option<u64>,
    pub seed: u64,
    /// Target approximation factor (CVP and approximate SVP).
    pub tau: Option<f64>,
    /// CVP distance-ladder ratio: rungs grow by `(1+alpha)`.
    pub alpha: f64,
    /// Optional externally supplied λ₁ estimate (e.g. from the enumeration
    /// oracle); replaces the guess ladder with a single rung.
    pub lambda_hint: Option<f64>,
    /// Worker threads for the sampling phase. 1 is the deterministic
    /// default; any fixed value is deterministic for a fixed seed.
    pub threads: usize,
    /// Sibling-table count of the birthday prepass.
    pub sibling_count: usize,
    /// Cap on the survivor subsample entering the pairwise-difference
    /// stage.
    pub pairwise_cap: usize,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            p: NormP::L2,
            gamma: 0.6,
            xi: 0.9,
            variant: SieveVariant::Linear,
            n_override: None,
            seed: 0,
            tau: None,
            alpha: 1.0,
            lambda_hint: None,
            threads: 1,
            sibling_count: 1,
            pairwise_cap: 4096,
        }
    }
}

impl SolveParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (0,1) (got {})",
                self.gamma
            )));
        }
        if !(self.xi > 0.5) {
            return Err(Error::InvalidParameter(format!(
                "xi must satisfy xi > 1/2 (got {})",
                self.xi
            )));
        }
        if let SieveVariant::Mixed(a) = self.variant {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "mixed-sieve scale A must be positive (got {a})"
                )));
            }
        }
        if self.threads == 0 {
            return Err(Error::InvalidParameter("threads must be at least 1".into()));
        }
        if self.sibling_count == 0 {
            return Err(Error::InvalidParameter(
                "sibling count must be at least 1".into(),
            ));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be positive (got {})",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Additional window for the CVP driver:
    /// `max(1, τ/2)/2 < ξ < (1−γ)τ/(2−γ) − c′`.
    pub fn validate_cvp(&self) -> Result<f64> {
        self.validate()?;
        let tau = self.tau.ok_or_else(|| {
            Error::InvalidParameter("cvp requires the approximation factor tau".into())
        })?;
        if !(tau > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must satisfy tau > 1 (got {tau})"
            )));
        }
        let lower = 0.5 * 1f64.max(tau / 2.0);
        let upper = (1.0 - self.gamma) * tau / (2.0 - self.gamma) - CVP_XI_MARGIN;
        if upper <= lower {
            return Err(Error::InvalidParameter(format!(
                "empty xi window: need max(1, tau/2)/2 = {lower} < xi < (1-gamma)tau/(2-gamma) - {CVP_XI_MARGIN} = {upper}; \
                 lower gamma or raise tau"
            )));
        }
        if !(self.xi > lower && self.xi < upper) {
            return Err(Error::InvalidParameter(format!(
                "xi must lie in ({lower}, {upper}) for cvp (got {})",
                self.xi
            )));
        }
        Ok(tau)
    }
}

/// Counters of one solver run. For ladder drivers the per-round fields
/// describe the accepted rung (or the last rung tried when nothing was
/// found); `pairs_sampled` accumulates over all rungs.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunStats {
    pub pairs_sampled: u64,
    pub iterations: usize,
    /// Pairs consumed as centres per sieving round (fixed centres per
    /// group for the birthday variant).
    pub centres_per_iter: Vec<u64>,
    /// Pairs lost by the birthday iterations (plus CVP survivors discarded
    /// for an out-of-range embedding coefficient).
    pub lost: u64,
    /// Norm-drift clamps in the birthday group assignment.
    pub clamped: u64,
    /// Pairs alive entering the finishing stage of the accepted rung.
    pub survivors: u64,
    pub rungs_tried: usize,
    /// λ guess accepted by the run (the distance guess `d` for CVP),
    /// in input-basis scale.
    pub lambda_used: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wallclock_ms: Option<u64>,
}

/// A solved instance: exact coefficients, the embedded vector, and its
/// norm (for CVP: the distance to the target).
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub point: LatticePoint,
    pub vector: Vec<f64>,
    pub norm: f64,
    pub stats: RunStats,
}

/// Number of sieving rounds `k = ⌈log_γ(ξ/(n·R0·(1−γ)))⌉` needed to bring
/// the round radius from `R0` down to the fixed point of `R ← γR + ξλ`.
pub fn iteration_count(r0: f64, gamma: f64, xi: f64, n: usize) -> Result<usize> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in (0,1) (got {gamma})"
        )));
    }
    if !(xi > 0.0) || !(r0 > 0.0) || n == 0 {
        return Err(Error::InvalidParameter(
            "iteration count needs xi > 0, R0 > 0 and n >= 1".into(),
        ));
    }
    let ratio = xi / (n as f64 * r0 * (1.0 - gamma));
    if ratio >= 1.0 {
        return Ok(0);
    }
    Ok((ratio.ln() / gamma.ln()).ceil() as usize)
}

/// Exact vs approximate pair-budget formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMode {
    Exact,
    Approx,
}

/// The provable pair budget of one run.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RequiredN {
    /// log2 of the budget.
    pub log2: f64,
    /// Concrete value when it fits below 2^62.
    pub value: Option<u64>,
    /// Set when the budget exceeds 2^62; the caller must then supply an
    /// explicit override.
    pub saturated: bool,
}

/// Provable pair budget: `N ≥ (2/q)(k|C| + 2^{c_b n} + 1)` with
/// `q = 2^{−c_s n}` and `|C| = 2^{c_c n}`; the approximate mode drops the
/// `2^{c_b n}` term, and the birthday variant uses
/// `N ≥ (2/q)(n³k|C| + n·2^{c_b n/2})`.
///
/// The round count `k` inside the formula uses the convention
/// `R0 = 3n²` (the post-normalization radius bound); the drivers recompute
/// `k` from their actual basis.
pub fn required_pairs(
    n: usize,
    gamma: f64,
    xi: f64,
    p: NormP,
    variant: SieveVariant,
    mode: SolveMode,
) -> Result<RequiredN> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must satisfy n >= 1".into()));
    }
    let cs = overlap_exponent_cs(xi, p)?;
    let cc = match variant {
        SieveVariant::Linear | SieveVariant::LinearBirthday => (2.0 + 2.0 / gamma).log2(),
        SieveVariant::Quadratic => (1.0 + 2.0 / gamma).log2(),
        SieveVariant::Mixed(a) => {
            if !(a > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "mixed-sieve scale A must be positive (got {a})"
                )));
            }
            (2.0 + 2.0 / (a * gamma)).log2() + (1.0 + a).log2()
        }
    };
    let cb = (1.0 + 2.0 * xi * (2.0 - gamma) / (1.0 - gamma)).log2();
    let r0 = 3.0 * (n * n) as f64;
    let k = iteration_count(r0, gamma, xi, n)? as f64;
    let nf = n as f64;
    let centres = (cc * nf).exp2();
    let body = match (variant, mode) {
        (SieveVariant::LinearBirthday, _) => {
            nf.powi(3) * k * centres + nf * (cb * nf / 2.0).exp2()
        }
        (_, SolveMode::Exact) => k * centres + (cb * nf).exp2() + 1.0,
        (_, SolveMode::Approx) => k * centres + 1.0,
    };
    let log2 = 1.0 + cs * nf + body.log2();
    if log2 > 62.0 {
        Ok(RequiredN {
            log2,
            value: None,
            saturated: true,
        })
    } else {
        Ok(RequiredN {
            log2,
            value: Some(log2.exp2().ceil() as u64),
            saturated: false,
        })
    }
}

/// Desk-scale budget policy: the provable budget capped at
/// `10·n·(2 + 2/γ)^n`, with an error demanding an explicit override when
/// both saturate.
pub fn default_pair_budget(n: usize, gamma: f64, required: &RequiredN) -> Result<u64> {
    let cap_log2 = (10.0 * n as f64).log2() + n as f64 * (2.0 + 2.0 / gamma).log2();
    if required.saturated && cap_log2 > 62.0 {
        return Err(Error::InvalidParameter(
            "the pair budget exceeds 2^62 at this dimension; supply an explicit N override".into(),
        ));
    }
    let cap = if cap_log2 > 62.0 {
        u64::MAX
    } else {
        cap_log2.exp2().ceil() as u64
    };
    Ok(required.value.unwrap_or(u64::MAX).min(cap).max(64))
}

// --- sampling ---------------------------------------------------------------

/// Samples `count` perturbation pairs: `e` uniform in `B_p(0, radius_e)`,
/// `y = e mod 𝒫(B)` via the float inverse (the integer coefficients make
/// lattice membership exact by construction). Partitioned across worker
/// threads on disjoint rng streams; output is deterministic for a fixed
/// `(seed, stream_base, threads)`.
fn sample_pairs(
    basis: &Basis,
    radius_e: f64,
    p: NormP,
    count: u64,
    seed: u64,
    stream_base: u64,
    threads: usize,
) -> PairSet {
    let n = basis.rank();
    let inv = basis.inverse_f64();
    let cols = basis.columns_f64();
    let worker = |stream: u64, quota: u64| -> PairSet {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_base + stream);
        let mut set = PairSet::with_capacity(n, quota as usize);
        let centre = vec![0.0f64; n];
        let mut y = vec![0.0f64; n];
        let mut z = vec![0i64; n];
        for _ in 0..quota {
            let e = sample_ball_uniform(&mut rng, &centre, radius_e, p);
            for i in 0..n {
                let c: f64 = (0..n).map(|j| inv[i][j] * e[j]).sum();
                z[i] = -(c.floor() as i64);
            }
            y.copy_from_slice(&e);
            for (j, col) in cols.iter().enumerate() {
                let zj = z[j];
                if zj == 0 {
                    continue;
                }
                let zf = zj as f64;
                for (yk, bk) in y.iter_mut().zip(col) {
                    *yk += zf * bk;
                }
            }
            set.push(&e, &y, &z);
        }
        set
    };
    if threads <= 1 {
        return worker(0, count);
    }
    let w = threads as u64;
    let base = count / w;
    let rem = count % w;
    let mut parts: Vec<PairSet> = Vec::with_capacity(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..w)
            .map(|i| {
                let quota = base + u64::from(i < rem);
                let worker = &worker;
                scope.spawn(move || worker(i, quota))
            })
            .collect();
        for h in handles {
            parts.push(h.join().expect("sampling worker"));
        }
    });
    let mut merged = PairSet::with_capacity(n, count as usize);
    for part in &parts {
        for i in 0..part.len() {
            merged.append_from(part, i);
        }
    }
    merged
}

// --- shared pipeline ---------------------------------------------------------

struct RungOutcome {
    /// Coefficients (in the reduced basis) and scaled-norm of the best
    /// vector this rung produced, if any.
    best: Option<(Vec<i64>, f64)>,
    sampled: u64,
    iterations: usize,
    centres_per_iter: Vec<u64>,
    lost: u64,
    clamped: u64,
    survivors: u64,
}

/// Runs sampling plus all sieving rounds for one λ guess on the scaled
/// basis, then the finishing stage (`pairwise`: smallest nonzero pairwise
/// difference; otherwise smallest nonzero survivor).
fn run_rung(
    scaled: &Basis,
    lam: f64,
    params: &SolveParams,
    stream_base: u64,
    pairwise: bool,
) -> Result<RungOutcome> {
    let n = scaled.rank();
    let p = params.p;
    let gamma = params.gamma;
    let xi = params.xi;
    let r0 = n as f64 * scaled.max_column_norm(p);
    let base_k = iteration_count(r0, gamma, xi, n)?;
    // One conditional extra round so the final-radius bound
    // R' = ξ(2−γ)λ/(1−γ) + γξ/(n(1−γ)) holds even when the log is integral.
    let strengthened = {
        let ratio = gamma * xi / (n as f64 * r0 * (1.0 - gamma));
        if ratio >= 1.0 {
            0
        } else {
            (ratio.ln() / gamma.ln()).ceil() as usize
        }
    };
    let k_run = base_k.max(strengthened);

    let required = required_pairs(n, gamma, xi, p, params.variant, if pairwise {
        SolveMode::Exact
    } else {
        SolveMode::Approx
    })?;
    let budget = match params.n_override {
        Some(n_over) => n_over,
        None => default_pair_budget(n, gamma, &required)?,
    };

    let mut pairs = sample_pairs(scaled, xi * lam, p, budget, params.seed, stream_base, params.threads);
    let mut centres_per_iter = Vec::with_capacity(k_run);
    let mut lost = 0u64;
    let mut clamped = 0u64;

    match params.variant {
        SieveVariant::LinearBirthday => {
            let plan = BirthdayPlan::new(
                n,
                r0,
                gamma,
                xi,
                lam,
                p,
                k_run.max(1),
                params.sibling_count,
            )?;
            let (tables, residual) = birthday_prepass(&pairs, &plan)?;
            for g in 0..plan.iterations() {
                centres_per_iter.push(tables.fixed_in_group(g) as u64);
            }
            clamped += tables.clamped;
            pairs = residual;
            for j in 0..plan.iterations() {
                let out = birthday_sieve_iteration(&pairs, &plan, &tables, j)?;
                lost += out.lost;
                clamped += out.clamped;
                pairs = out.pairs;
                pairs.refresh_cache(scaled.columns_f64());
            }
        }
        _ => {
            let mut radius = r0;
            for _ in 0..k_run {
                let outcome = match params.variant {
                    SieveVariant::Linear => {
                        let grid = GridSpec::new(n, radius, gamma, p)?;
                        linear_sieve(&pairs, &grid, xi, lam)?
                    }
                    SieveVariant::Quadratic => {
                        quadratic_sieve(&pairs, radius, gamma, xi, lam, p)?
                    }
                    SieveVariant::Mixed(a) => {
                        let grid = GridSpec::with_cube_scale(n, radius, gamma, a, p)?;
                        mixed_sieve(&pairs, &grid, xi, lam)?
                    }
                    SieveVariant::LinearBirthday => unreachable!(),
                };
                centres_per_iter.push(outcome.centres as u64);
                pairs = outcome.pairs;
                radius = gamma * radius + xi * lam;
                let drift = pairs.refresh_cache(scaled.columns_f64());
                debug_assert!(drift < 1e-6, "cache drift {drift} above refresh threshold");
            }
        }
    }

    let survivors = pairs.len() as u64;
    let best = if pairwise {
        pairwise_minimum(scaled, &pairs, params)
    } else {
        survivor_minimum(scaled, &pairs, p)
    };
    Ok(RungOutcome {
        best,
        sampled: budget,
        iterations: k_run,
        centres_per_iter,
        lost,
        clamped,
        survivors,
    })
}

/// Smallest nonzero `‖B·(z_i − z_j)‖_p` over the (possibly subsampled)
/// survivor set.
fn pairwise_minimum(
    scaled: &Basis,
    pairs: &PairSet,
    params: &SolveParams,
) -> Option<(Vec<i64>, f64)> {
    let n = scaled.rank();
    let p = params.p;
    let count = pairs.len();
    if count == 0 {
        return None;
    }
    // Survivor cap: 2^{c_b n} from the final-ball count, bounded by the
    // configured cost ceiling.
    let cb = (1.0 + 2.0 * params.xi * (2.0 - params.gamma) / (1.0 - params.gamma)).log2();
    let analysis_cap = (cb * n as f64).exp2();
    let cap = if analysis_cap.is_finite() && analysis_cap < params.pairwise_cap as f64 {
        (analysis_cap.ceil() as usize).max(2)
    } else {
        params.pairwise_cap
    };
    let indices: Vec<usize> = if count > cap {
        // deterministic uniform subsample: partial Fisher-Yates on a
        // dedicated rng stream
        let mut rng = ChaCha12Rng::seed_from_u64(params.seed);
        rng.set_stream(u64::MAX);
        let mut idx: Vec<usize> = (0..count).collect();
        for i in 0..cap {
            let j = rng.random_range(i..count);
            idx.swap(i, j);
        }
        idx.truncate(cap);
        idx
    } else {
        (0..count).collect()
    };
    let embeds: Vec<Vec<f64>> = indices.iter().map(|&i| scaled.embed_f64(pairs.z(i))).collect();
    let mut best: Option<(Vec<i64>, f64)> = None;
    let mut diff = vec![0.0f64; n];
    for a in 0..indices.len() {
        for b in a + 1..indices.len() {
            let za = pairs.z(indices[a]);
            let zb = pairs.z(indices[b]);
            if za == zb {
                continue;
            }
            for k in 0..n {
                diff[k] = embeds[a][k] - embeds[b][k];
            }
            let norm = lp_norm(&diff, p);
            if best.as_ref().map_or(true, |(_, bn)| norm < *bn) {
                let dz: Vec<i64> = za.iter().zip(zb).map(|(x, y)| x - y).collect();
                best = Some((dz, norm));
            }
        }
    }
    best
}

/// Smallest nonzero survivor `‖B·z_i‖_p` (approximate-SVP finish).
fn survivor_minimum(scaled: &Basis, pairs: &PairSet, p: NormP) -> Option<(Vec<i64>, f64)> {
    let mut best: Option<(Vec<i64>, f64)> = None;
    for i in 0..pairs.len() {
        let z = pairs.z(i);
        if z.iter().all(|&c| c == 0) {
            continue;
        }
        let v = scaled.embed_f64(z);
        let norm = lp_norm(&v, p);
        if best.as_ref().map_or(true, |(_, bn)| norm < *bn) {
            best = Some((z.to_vec(), norm));
        }
    }
    best
}

// --- drivers -----------------------------------------------------------------

/// Exact SVP (pairwise-difference finish over the sieve survivors).
///
/// The guess ladder is walked from `‖b₁‖_p` downward; a rung that fails
/// falls through to the next, and the walk stops once no lower rung can
/// improve the best certified vector. Returns `NotFound` (exit-code 3 at
/// the CLI) when every rung starves.
pub fn svp_exact(basis: &Basis, params: &SolveParams) -> Result<SolveResult> {
    svp_driver(basis, params, true)
}

/// Approximate SVP: identical pipeline, but the finishing stage returns
/// the smallest nonzero surviving lattice vector, with norm at most
/// `τλ = ξ(2−γ)λ/(1−γ) + o(1)·λ` for the accepted guess λ.
pub fn svp_approx(basis: &Basis, params: &SolveParams) -> Result<SolveResult> {
    if let Some(tau) = params.tau {
        let implied = params.xi * (2.0 - params.gamma) / (1.0 - params.gamma);
        if tau < implied - 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "tau = {tau} is below the factor xi(2-gamma)/(1-gamma) = {implied} implied by (gamma, xi)"
            )));
        }
    }
    svp_driver(basis, params, false)
}

fn svp_driver(basis: &Basis, params: &SolveParams, pairwise: bool) -> Result<SolveResult> {
    params.validate()?;
    let started = std::time::Instant::now();
    let n = basis.rank();
    let p = params.p;
    let reduced = lll_reduce(basis);
    let rungs: Vec<f64> = match params.lambda_hint {
        Some(hint) => {
            if !(hint > 0.0) || !hint.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "lambda hint must be positive (got {hint})"
                )));
            }
            vec![hint * (1.0 + 0.5 / n as f64)]
        }
        None => lambda_ladder(&reduced, p),
    };
    let ladder_ratio = 1.0 + 1.0 / n as f64;
    let tau_factor = params.xi * (2.0 - params.gamma) / (1.0 - params.gamma);

    let mut stats = RunStats::default();
    let mut best: Option<(Vec<i64>, f64, f64)> = None; // (z in reduced basis, norm, lambda)
    for (ri, &lambda_est) in rungs.iter().enumerate() {
        if let Some((_, best_norm, _)) = best {
            // No lower rung can certify an improvement once the guess
            // drops below the best norm (divided by τ for the
            // approximation driver, whose output may exceed its guess).
            let floor = if pairwise {
                best_norm / ladder_ratio
            } else {
                best_norm / (tau_factor * ladder_ratio)
            };
            if lambda_est < floor {
                break;
            }
        }
        let (scaled, scale) = normalize_scale(&reduced, lambda_est)?;
        let scale_f = scale.to_f64().expect("finite scale");
        let lam = lambda_est * scale_f;
        let outcome = run_rung(&scaled, lam, params, (ri as u64) << 32, pairwise)?;
        stats.pairs_sampled += outcome.sampled;
        stats.rungs_tried = ri + 1;
        stats.iterations = outcome.iterations;
        stats.centres_per_iter = outcome.centres_per_iter;
        stats.lost += outcome.lost;
        stats.clamped += outcome.clamped;
        stats.survivors = outcome.survivors;
        if let Some((z, _)) = outcome.best {
            // Coefficients are invariant under the exact scaling, so z is
            // valid for the reduced (unscaled) basis; recompute the norm
            // from the exact embedding.
            let v = reduced.embed_f64(&z);
            let norm = lp_norm(&v, p);
            if best.as_ref().map_or(true, |(_, bn, _)| norm < *bn) {
                best = Some((z, norm, lambda_est));
                stats.lambda_used = Some(lambda_est);
            }
        }
    }

    stats.wallclock_ms = Some(started.elapsed().as_millis() as u64);
    let Some((z, norm, lambda)) = best else {
        return Err(Error::NotFound { stats });
    };
    stats.lambda_used = Some(lambda);
    let point_reduced = LatticePoint::from_i64(&z);
    let v_exact = reduced.embed(&point_reduced);
    let point = basis
        .coefficients_of(&v_exact)
        .expect("reduced basis spans the same lattice");
    debug_assert!(!point.is_zero());
    let vector: Vec<f64> = v_exact.iter().map(|x| x.to_f64().unwrap()).collect();
    Ok(SolveResult {
        point,
        vector,
        norm,
        stats,
    })
}

/// Approximate CVP via the `(n+1)`-dimensional embedding.
///
/// For each distance guess `d` on the `(1+α)` ladder the embedded basis
/// `B′ = [(b_i, 0), (t, τd/2)]` is sieved until `R ≤ ξd/(1−γ)`; survivors
/// with a unit embedding coefficient yield candidate lattice points, and
/// the closest candidate over all rungs is returned (a `2τ`-approximate
/// closest vector when a rung brackets the true distance).
pub fn cvp_approx(basis: &Basis, target: &[f64], params: &SolveParams) -> Result<SolveResult> {
    let tau = params.validate_cvp()?;
    let started = std::time::Instant::now();
    let n = basis.rank();
    if target.len() != n {
        return Err(Error::InvalidParameter(format!(
            "target dimension {} does not match lattice rank {n}",
            target.len()
        )));
    }
    let p = params.p;
    let reduced = lll_reduce(basis);

    // Scale lattice and target together so distances are Ω(1).
    let lambda_star = lp_norm(reduced.column_f64(0), p);
    let (scaled, scale) = normalize_scale(&reduced, lambda_star)?;
    let scale_f = scale.to_f64().expect("finite scale");
    let t_scaled: Vec<f64> = target.iter().map(|&x| x * scale_f).collect();

    let d_max = n as f64 * scaled.max_column_norm(p);
    let mut d = 1.0 + params.alpha;
    let mut stats = RunStats::default();
    let mut best: Option<(Vec<i64>, f64, f64)> = None; // (z over B', distance scaled, d)
    let mut rung_index = 0u64;
    while d <= d_max {
        let embedded = embed_basis(&scaled, &t_scaled, tau * d / 2.0)?;
        let outcome = cvp_rung(&embedded, d, params, rung_index << 32)?;
        stats.pairs_sampled += outcome.sampled;
        stats.rungs_tried += 1;
        stats.iterations = outcome.iterations;
        stats.centres_per_iter = outcome.centres_per_iter;
        stats.lost += outcome.lost;
        stats.clamped += outcome.clamped;
        stats.survivors = outcome.survivors;
        if let Some((z, dist)) = outcome.best {
            if best.as_ref().map_or(true, |(_, bd, _)| dist < *bd) {
                best = Some((z, dist, d));
            }
        }
        d *= 1.0 + params.alpha;
        rung_index += 1;
    }

    stats.wallclock_ms = Some(started.elapsed().as_millis() as u64);
    let Some((z, _, d_used)) = best else {
        return Err(Error::NotFound { stats });
    };
    stats.lambda_used = Some(d_used / scale_f);
    // Lattice coefficients in the reduced basis are the first n entries.
    let point_reduced = LatticePoint::from_i64(&z[..n]);
    let v_exact = reduced.embed(&point_reduced);
    let point = basis
        .coefficients_of(&v_exact)
        .expect("reduced basis spans the same lattice");
    let vector: Vec<f64> = v_exact.iter().map(|x| x.to_f64().unwrap()).collect();
    let diff: Vec<f64> = vector.iter().zip(target).map(|(a, b)| a - b).collect();
    let norm = lp_norm(&diff, p);
    Ok(SolveResult {
        point,
        vector,
        norm,
        stats,
    })
}

/// `B′ = [(b_i, 0), (t, h)]` as an exact basis.
fn embed_basis(basis: &Basis, target: &[f64], h: f64) -> Result<Basis> {
    use num_rational::BigRational;
    use num_traits::Zero;
    let n = basis.rank();
    let mut cols: Vec<Vec<BigRational>> = Vec::with_capacity(n + 1);
    for i in 0..n {
        let mut col = basis.column(i).to_vec();
        col.push(BigRational::zero());
        cols.push(col);
    }
    let mut t_col: Vec<BigRational> = target
        .iter()
        .map(|&x| BigRational::from_float(x).ok_or_else(|| {
            Error::InvalidParameter("target coordinates must be finite".into())
        }))
        .collect::<Result<_>>()?;
    t_col.push(
        BigRational::from_float(h)
            .ok_or_else(|| Error::InvalidParameter("embedding height must be finite".into()))?,
    );
    cols.push(t_col);
    Basis::from_columns(cols)
}

fn cvp_rung(
    embedded: &Basis,
    d: f64,
    params: &SolveParams,
    stream_base: u64,
) -> Result<RungOutcome> {
    let m = embedded.rank(); // n + 1
    let p = params.p;
    let gamma = params.gamma;
    let xi = params.xi;
    let r0 = m as f64 * embedded.max_column_norm(p);
    let required = required_pairs(m, gamma, xi, p, params.variant, SolveMode::Approx)?;
    let budget = match params.n_override {
        Some(n_over) => n_over,
        None => default_pair_budget(m, gamma, &required)?,
    };
    let mut pairs = sample_pairs(embedded, xi * d, p, budget, params.seed, stream_base, params.threads);
    let mut centres_per_iter = Vec::new();
    // The recurrence R ← γR + ξd converges to ξd/(1−γ) without crossing
    // it, so stop within the o(1) relative slack the final bound carries.
    let stop = xi * d / (1.0 - gamma) * (1.0 + 1.0 / m as f64);
    let mut radius = r0;
    let mut iterations = 0usize;
    while radius > stop {
        let outcome = match params.variant {
            SieveVariant::Linear | SieveVariant::LinearBirthday => {
                let grid = GridSpec::new(m, radius, gamma, p)?;
                linear_sieve(&pairs, &grid, xi, d)?
            }
            SieveVariant::Quadratic => quadratic_sieve(&pairs, radius, gamma, xi, d, p)?,
            SieveVariant::Mixed(a) => {
                let grid = GridSpec::with_cube_scale(m, radius, gamma, a, p)?;
                mixed_sieve(&pairs, &grid, xi, d)?
            }
        };
        centres_per_iter.push(outcome.centres as u64);
        pairs = outcome.pairs;
        radius = gamma * radius + xi * d;
        iterations += 1;
        pairs.refresh_cache(embedded.columns_f64());
        if iterations > 10_000 {
            return Err(Error::InvalidParameter(
                "cvp sieve failed to contract; check gamma/xi".into(),
            ));
        }
    }

    // Survivors with a unit embedding coefficient carry lattice points at
    // distance ‖w|_n‖ from ±t; normalize the sign so the candidate is
    // always v with ‖v − t‖ small. Larger coefficients cannot survive the
    // radius bound; they are counted and skipped defensively.
    let survivors = pairs.len() as u64;
    let n = m - 1;
    let mut lost = 0u64;
    let mut best: Option<(Vec<i64>, f64)> = None;
    for i in 0..pairs.len() {
        let z = pairs.z(i);
        let k_embed = z[n];
        if k_embed == 0 {
            continue;
        }
        if k_embed.abs() >= 2 {
            lost += 1;
            continue;
        }
        let mut zc = z.to_vec();
        if k_embed == 1 {
            for c in zc.iter_mut() {
                *c = -*c;
            }
        }
        let v = embedded.embed_f64(&zc);
        let dist = lp_norm(&v[..n], p);
        if best.as_ref().map_or(true, |(_, bd)| dist < *bd) {
            best = Some((zc, dist));
        }
    }
    Ok(RungOutcome {
        best,
        sampled: budget,
        iterations,
        centres_per_iter,
        lost,
        clamped: 0,
        survivors,
    })
}
