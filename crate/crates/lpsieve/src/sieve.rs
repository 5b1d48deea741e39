//! The sieving procedures: the hypercube-bucketed linear sieve, the
//! classic quadratic sieve, the two-level mixed sieve, and the
//! fixed-centre birthday variant.
//!
//! Every sieve maps a set of perturbation pairs `(e, y)` with
//! `y − e = B·z` and `‖y‖_p ≤ R` to a set of pairs bounded by
//! `γR + ξλ`, consuming some pairs as centres. Coefficient vectors are
//! updated exactly (`z′ = z − z_c`), so lattice membership of `y − e`
//! is preserved bit-exactly through any number of rounds.

use std::collections::HashMap;

use crate::geometry::{lp_distance, lp_norm, log2_ball_volume, NormP, GEOM_REL_TOL};
use crate::{Error, Result};

/// Cell addressing tuple: `idx[i]` is the grid interval of coordinate `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellIndex(pub Vec<i64>);

/// Interval layout of the hypercube grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchoring {
    /// One cell centred at the origin; intervals
    /// `…, [−3r, −r), [−r, r), [r, 3r), …` with `r = cell_edge/2`.
    OriginCentred,
    /// Intervals starting at `−R`, covering `[−R, R]` with exactly
    /// `⌈2R/edge⌉` cells per axis. Matches the corner-placed subdivision
    /// that gives the `⌈2/γ⌉^n` count in the max norm.
    CornerAnchored,
}

/// The a-priori hypercube subdivision of `B_p^n(R)` used by one sieving
/// round: cells of edge `γR/n^{1/p}` (`γR` for the max norm), so two
/// points sharing a cell are at ℓp distance at most `γR`.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub n: usize,
    pub radius: f64,
    pub gamma: f64,
    pub p: NormP,
    pub cell_edge: f64,
    pub anchoring: Anchoring,
    /// Edge multiplier A of the mixed sieve's first level (1 for plain grids).
    pub cube_scale: f64,
}

impl GridSpec {
    pub fn new(n: usize, radius: f64, gamma: f64, p: NormP) -> Result<Self> {
        Self::with_anchoring(n, radius, gamma, p, Anchoring::OriginCentred)
    }

    pub fn with_anchoring(
        n: usize,
        radius: f64,
        gamma: f64,
        p: NormP,
        anchoring: Anchoring,
    ) -> Result<Self> {
        Self::build(n, radius, gamma, 1.0, p, anchoring)
    }

    /// Grid of big hypercubes with edge `A·γR/n^{1/p}`, the first level of
    /// the mixed sieve.
    pub fn with_cube_scale(n: usize, radius: f64, gamma: f64, a: f64, p: NormP) -> Result<Self> {
        Self::build(n, radius, gamma, a, p, Anchoring::OriginCentred)
    }

    fn build(
        n: usize,
        radius: f64,
        gamma: f64,
        a: f64,
        p: NormP,
        anchoring: Anchoring,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("grid dimension must be >= 1".into()));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid radius must be positive (got {radius})"
            )));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (0,1) (got {gamma})"
            )));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "cube scale A must be positive (got {a})"
            )));
        }
        let cell_edge = a * gamma * radius / p.dim_root(n);
        Ok(GridSpec {
            n,
            radius,
            gamma,
            p,
            cell_edge,
            anchoring,
            cube_scale: a,
        })
    }

    /// Cells per axis of the corner-anchored covering of `[−R, R]`.
    pub fn cells_per_axis(&self) -> i64 {
        (2.0 * self.radius / self.cell_edge).ceil() as i64
    }

    fn coord_index(&self, x: f64) -> i64 {
        match self.anchoring {
            // x ∈ [(2j−1)r, (2j+1)r) ⇔ j = ⌊x/edge + 1/2⌋ (half-open rule)
            Anchoring::OriginCentred => (x / self.cell_edge + 0.5).floor() as i64,
            Anchoring::CornerAnchored => {
                let m = self.cells_per_axis();
                let j = ((x + self.radius) / self.cell_edge).floor() as i64;
                j.clamp(0, m - 1)
            }
        }
    }

    /// Maps a point to its index tuple in O(n). Caller obligation:
    /// `‖y‖_p ≤ R·(1 + 1e-9)`. Deterministic; two points with equal output
    /// differ by at most `A·γR` in ℓp norm.
    pub fn cell_index(&self, y: &[f64]) -> CellIndex {
        debug_assert_eq!(y.len(), self.n);
        debug_assert!(lp_norm(y, self.p) <= self.radius * (1.0 + 1e-6) * self.cube_scale.max(1.0));
        CellIndex(y.iter().map(|&x| self.coord_index(x)).collect())
    }

    fn cell_index_into(&self, y: &[f64], out: &mut Vec<i64>) {
        out.clear();
        out.extend(y.iter().map(|&x| self.coord_index(x)));
    }
}

/// A set of perturbation pairs in struct-of-arrays layout.
///
/// Each pair holds the float perturbation `e`, the float cache
/// `y = B·z + e`, and exact integer coefficients `z`. The coefficients are
/// machine integers with checked arithmetic: sieving aborts loudly rather
/// than silently wrap, and desk-scale instances stay far from the bound.
#[derive(Debug, Clone, Default)]
pub struct PairSet {
    dim: usize,
    e: Vec<f64>,
    y: Vec<f64>,
    z: Vec<i64>,
}

impl PairSet {
    pub fn new(dim: usize) -> Self {
        PairSet {
            dim,
            e: Vec::new(),
            y: Vec::new(),
            z: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, cap: usize) -> Self {
        PairSet {
            dim,
            e: Vec::with_capacity(cap * dim),
            y: Vec::with_capacity(cap * dim),
            z: Vec::with_capacity(cap * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.e.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.e.is_empty()
    }

    pub fn push(&mut self, e: &[f64], y: &[f64], z: &[i64]) {
        debug_assert!(e.len() == self.dim && y.len() == self.dim && z.len() == self.dim);
        self.e.extend_from_slice(e);
        self.y.extend_from_slice(y);
        self.z.extend_from_slice(z);
    }

    pub fn e(&self, i: usize) -> &[f64] {
        &self.e[i * self.dim..(i + 1) * self.dim]
    }

    pub fn y(&self, i: usize) -> &[f64] {
        &self.y[i * self.dim..(i + 1) * self.dim]
    }

    pub fn z(&self, i: usize) -> &[i64] {
        &self.z[i * self.dim..(i + 1) * self.dim]
    }

    pub fn append_from(&mut self, src: &PairSet, i: usize) {
        self.push(src.e(i), src.y(i), src.z(i));
    }

    /// Appends the pair `(e_i, y_i − c + e_c)` with exact coefficient
    /// update `z′ = z_i − z_c`.
    pub fn append_reduced(&mut self, src: &PairSet, i: usize, c_y: &[f64], c_e: &[f64], c_z: &[i64]) {
        let d = self.dim;
        self.e.extend_from_slice(src.e(i));
        let y = src.y(i);
        for k in 0..d {
            self.y.push(y[k] - c_y[k] + c_e[k]);
        }
        let z = src.z(i);
        for k in 0..d {
            self.z.push(
                z[k].checked_sub(c_z[k])
                    .expect("lattice coefficient overflow in sieve reduction"),
            );
        }
    }

    /// Refreshes the `y` cache from `B·z + e` wherever float drift exceeds
    /// `1e-6`, and returns the largest drift seen.
    pub fn refresh_cache(&mut self, cols_f64: &[Vec<f64>]) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        let mut fresh = vec![0.0f64; d];
        for i in 0..self.len() {
            for f in fresh.iter_mut() {
                *f = 0.0;
            }
            for (k, col) in cols_f64.iter().enumerate() {
                let c = self.z[i * d + k];
                if c == 0 {
                    continue;
                }
                let cf = c as f64;
                for (f, b) in fresh.iter_mut().zip(col) {
                    *f += cf * b;
                }
            }
            let e = &self.e[i * d..(i + 1) * d];
            let y = &mut self.y[i * d..(i + 1) * d];
            let mut drift = 0.0f64;
            for k in 0..d {
                drift = drift.max((y[k] - (fresh[k] + e[k])).abs());
            }
            worst = worst.max(drift);
            if drift > 1e-6 {
                for k in 0..d {
                    y[k] = fresh[k] + e[k];
                }
            }
        }
        worst
    }
}

/// Result of one sieving round: the surviving pairs and the number of
/// pairs consumed as centres.
#[derive(Debug)]
pub struct SieveOutcome {
    pub pairs: PairSet,
    pub centres: usize,
}

fn check_radius(norm: f64, radius: f64, i: usize) -> Result<()> {
    if norm > radius * (1.0 + GEOM_REL_TOL) + 1e-12 {
        return Err(Error::ContractViolation(format!(
            "pair {i} has norm {norm} above the round radius {radius}"
        )));
    }
    Ok(())
}

/// Upper bound, in log2, on the number of grid cells intersecting
/// `B_p^n(R)`: `n·lg(1+γA) + lg vol(B_p(R)) − n·lg(edge)`.
fn log2_cell_bound(grid: &GridSpec) -> f64 {
    grid.n as f64 * (1.0 + grid.gamma * grid.cube_scale).log2()
        + log2_ball_volume(grid.n, grid.radius, grid.p)
        - grid.n as f64 * grid.cell_edge.log2()
}

/// One round of the Linear Sieve.
///
/// Pairs already inside `B_p(γR)` pass through unchanged. Every other pair
/// is mapped in O(n) to its hypercube cell; the first pair in a cell is
/// consumed as that cell's centre, later arrivals are reduced against it.
/// Output pairs satisfy `‖y′‖_p ≤ γR + ξλ` and `|output| = |input| −
/// centres`.
pub fn linear_sieve(s: &PairSet, grid: &GridSpec, xi: f64, lambda: f64) -> Result<SieveOutcome> {
    debug_assert_eq!(s.dim(), grid.n);
    let pass = grid.gamma * grid.radius;
    let out_bound = pass + xi * lambda;
    let mut table: HashMap<Box<[i64]>, u32> = HashMap::new();
    let mut out = PairSet::with_capacity(s.dim(), s.len());
    let mut key = Vec::with_capacity(grid.n);
    for i in 0..s.len() {
        let y = s.y(i);
        let norm = lp_norm(y, grid.p);
        check_radius(norm, grid.radius, i)?;
        if norm <= pass {
            out.append_from(s, i);
            continue;
        }
        grid.cell_index_into(y, &mut key);
        match table.get(key.as_slice()) {
            Some(&c) => {
                let ci = c as usize;
                out.append_reduced(s, i, s.y(ci), s.e(ci), s.z(ci));
                debug_assert!(
                    lp_norm(out.y(out.len() - 1), grid.p) <= out_bound * (1.0 + 1e-9) + 1e-9
                );
            }
            None => {
                table.insert(key.clone().into_boxed_slice(), i as u32);
            }
        }
    }
    if cfg!(debug_assertions) && grid.n <= 12 {
        let bound = log2_cell_bound(grid);
        debug_assert!(
            (table.len() as f64).log2() <= bound + 1e-6,
            "centre table {} exceeds the hypercube-count bound 2^{bound}",
            table.len()
        );
    }
    Ok(SieveOutcome {
        pairs: out,
        centres: table.len(),
    })
}

/// One round of the quadratic AKS-style sieve: a flat centre list, each
/// pair reduced against the first centre within `γR` (insertion order) or
/// consumed as a new centre.
pub fn quadratic_sieve(
    s: &PairSet,
    radius: f64,
    gamma: f64,
    xi: f64,
    lambda: f64,
    p: NormP,
) -> Result<SieveOutcome> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in (0,1) (got {gamma})"
        )));
    }
    let threshold = gamma * radius;
    let out_bound = threshold + xi * lambda;
    let mut centres: Vec<u32> = Vec::new();
    let mut out = PairSet::with_capacity(s.dim(), s.len());
    for i in 0..s.len() {
        let y = s.y(i);
        let norm = lp_norm(y, p);
        check_radius(norm, radius, i)?;
        let hit = centres
            .iter()
            .find(|&&c| lp_distance(y, s.y(c as usize), p) <= threshold);
        match hit {
            Some(&c) => {
                let ci = c as usize;
                out.append_reduced(s, i, s.y(ci), s.e(ci), s.z(ci));
                debug_assert!(lp_norm(out.y(out.len() - 1), p) <= out_bound * (1.0 + 1e-9) + 1e-9);
            }
            None => centres.push(i as u32),
        }
    }
    if cfg!(debug_assertions) && s.dim() <= 10 {
        // packing bound: centres pairwise > γR apart inside B(R)
        let bound = s.dim() as f64 * (1.0 + 2.0 / gamma).log2();
        debug_assert!(
            centres.is_empty() || (centres.len() as f64).log2() <= bound + 1e-6,
            "quadratic centre list {} exceeds the (1+2/γ)^n packing bound",
            centres.len()
        );
    }
    Ok(SieveOutcome {
        pairs: out,
        centres: centres.len(),
    })
}

/// One round of the Mixed Sieve.
///
/// Each pair is first assigned in O(n) to a big hypercube of edge
/// `A·γR/n^{1/p}` (within-cube ℓp diameter at most `AγR`), then reduced by
/// the quadratic procedure restricted to that cube with target radius
/// `γR`. With a single big cube covering everything this degenerates to
/// [`quadratic_sieve`] element for element.
pub fn mixed_sieve(s: &PairSet, big_grid: &GridSpec, xi: f64, lambda: f64) -> Result<SieveOutcome> {
    debug_assert_eq!(s.dim(), big_grid.n);
    let threshold = big_grid.gamma * big_grid.radius;
    let out_bound = threshold + xi * lambda;
    let mut cubes: HashMap<Box<[i64]>, Vec<u32>> = HashMap::new();
    let mut out = PairSet::with_capacity(s.dim(), s.len());
    let mut key = Vec::with_capacity(big_grid.n);
    let mut centre_count = 0usize;
    for i in 0..s.len() {
        let y = s.y(i);
        let norm = lp_norm(y, big_grid.p);
        check_radius(norm, big_grid.radius, i)?;
        big_grid.cell_index_into(y, &mut key);
        let bucket = match cubes.get_mut(key.as_slice()) {
            Some(b) => b,
            None => cubes.entry(key.clone().into_boxed_slice()).or_default(),
        };
        let hit = bucket
            .iter()
            .find(|&&c| lp_distance(y, s.y(c as usize), big_grid.p) <= threshold);
        match hit {
            Some(&c) => {
                let ci = c as usize;
                out.append_reduced(s, i, s.y(ci), s.e(ci), s.z(ci));
                debug_assert!(
                    lp_norm(out.y(out.len() - 1), big_grid.p) <= out_bound * (1.0 + 1e-9) + 1e-9
                );
            }
            None => {
                bucket.push(i as u32);
                centre_count += 1;
                if cfg!(debug_assertions) && big_grid.n <= 10 {
                    // per-cube packing bound (1+A)^n
                    let bound = big_grid.n as f64 * (1.0 + big_grid.cube_scale).log2();
                    debug_assert!(
                        (bucket.len() as f64).log2() <= bound + 1e-6,
                        "cube centre list {} exceeds the (1+A)^n packing bound",
                        bucket.len()
                    );
                }
            }
        }
    }
    Ok(SieveOutcome {
        pairs: out,
        centres: centre_count,
    })
}

/// Iteration plan of the birthday variant: per-iteration radii
/// `R_1 = R`, `R_{j+1} = γR_j + ξλ`, decreasing toward `ξλ/(1−γ)`, and the
/// number of sibling tables per iteration.
#[derive(Debug, Clone)]
pub struct BirthdayPlan {
    pub dim: usize,
    pub radii: Vec<f64>,
    pub sibling_count: usize,
    pub gamma: f64,
    pub xi: f64,
    pub lambda: f64,
    pub p: NormP,
}

impl BirthdayPlan {
    pub fn new(
        dim: usize,
        r0: f64,
        gamma: f64,
        xi: f64,
        lambda: f64,
        p: NormP,
        iterations: usize,
        sibling_count: usize,
    ) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (0,1) (got {gamma})"
            )));
        }
        if iterations == 0 || sibling_count == 0 {
            return Err(Error::InvalidParameter(
                "birthday plan needs at least one iteration and one sibling table".into(),
            ));
        }
        if !(r0 > 0.0) {
            return Err(Error::InvalidParameter("initial radius must be positive".into()));
        }
        let mut radii = Vec::with_capacity(iterations);
        let mut r = r0;
        for _ in 0..iterations {
            radii.push(r);
            r = gamma * r + xi * lambda;
        }
        Ok(BirthdayPlan {
            dim,
            radii,
            sibling_count,
            gamma,
            xi,
            lambda,
            p,
        })
    }

    pub fn iterations(&self) -> usize {
        self.radii.len()
    }

    /// Group of a pair: the smallest ball `B_p(R_j)` containing it.
    /// Norms beyond `R_1` (float drift) clamp to group 0, flagged to the
    /// caller for the run statistics.
    fn group_of(&self, norm: f64) -> (usize, bool) {
        if norm > self.radii[0] * (1.0 + GEOM_REL_TOL) {
            return (0, true);
        }
        let mut g = 0;
        for (j, &r) in self.radii.iter().enumerate() {
            if norm <= r * (1.0 + GEOM_REL_TOL) {
                g = j;
            } else {
                break;
            }
        }
        (g, false)
    }
}

/// A fixed centre pair owned by the birthday tables.
#[derive(Debug, Clone)]
pub struct OwnedPair {
    pub e: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<i64>,
}

/// The per-iteration fixed centre tables produced by the prepass.
#[derive(Debug)]
pub struct FixedCentreTables {
    grids: Vec<GridSpec>,
    /// `tables[group][sibling]`: cell → fixed centre pair.
    tables: Vec<Vec<HashMap<Box<[i64]>, OwnedPair>>>,
    pub fixed_count: usize,
    pub clamped: u64,
}

impl FixedCentreTables {
    pub fn fixed_in_group(&self, group: usize) -> usize {
        self.tables[group].iter().map(|t| t.len()).sum()
    }
}

/// Scans `S` once, consuming pairs as fixed centres: a pair whose norm
/// selects group `j` and whose cell is empty in one of the group's sibling
/// tables fills that slot; everything else is returned as the residual
/// set. Fixed centres are never reduced later.
pub fn birthday_prepass(s: &PairSet, plan: &BirthdayPlan) -> Result<(FixedCentreTables, PairSet)> {
    let grids: Vec<GridSpec> = plan
        .radii
        .iter()
        .map(|&r| GridSpec::new(plan.dim, r, plan.gamma, plan.p))
        .collect::<Result<_>>()?;
    let mut tables: Vec<Vec<HashMap<Box<[i64]>, OwnedPair>>> = plan
        .radii
        .iter()
        .map(|_| (0..plan.sibling_count).map(|_| HashMap::new()).collect())
        .collect();
    let mut residual = PairSet::with_capacity(s.dim(), s.len());
    let mut fixed_count = 0usize;
    let mut clamped = 0u64;
    let mut key = Vec::with_capacity(plan.dim);
    for i in 0..s.len() {
        let y = s.y(i);
        let norm = lp_norm(y, plan.p);
        let (g, was_clamped) = plan.group_of(norm);
        clamped += was_clamped as u64;
        grids[g].cell_index_into(y, &mut key);
        let mut placed = false;
        for table in tables[g].iter_mut() {
            if !table.contains_key(key.as_slice()) {
                table.insert(
                    key.clone().into_boxed_slice(),
                    OwnedPair {
                        e: s.e(i).to_vec(),
                        y: y.to_vec(),
                        z: s.z(i).to_vec(),
                    },
                );
                fixed_count += 1;
                placed = true;
                break;
            }
        }
        if !placed {
            residual.append_from(s, i);
        }
    }
    Ok((
        FixedCentreTables {
            grids,
            tables,
            fixed_count,
            clamped,
        },
        residual,
    ))
}

/// Outcome of one birthday iteration.
#[derive(Debug)]
pub struct BirthdayOutcome {
    pub pairs: PairSet,
    pub lost: u64,
    pub clamped: u64,
}

/// One birthday iteration: each pair is matched against its group's fixed
/// tables only. Matched pairs are reduced exactly as in the linear sieve;
/// unmatched pairs are discarded and counted as lost. No new centres are
/// ever created, which keeps surviving pairs independent and identically
/// distributed given survival.
pub fn birthday_sieve_iteration(
    s: &PairSet,
    plan: &BirthdayPlan,
    tables: &FixedCentreTables,
    iteration: usize,
) -> Result<BirthdayOutcome> {
    debug_assert!(iteration < plan.iterations());
    let mut out = PairSet::with_capacity(s.dim(), s.len());
    let mut lost = 0u64;
    let mut clamped = 0u64;
    let mut key = Vec::with_capacity(plan.dim);
    for i in 0..s.len() {
        let y = s.y(i);
        let norm = lp_norm(y, plan.p);
        let (g, was_clamped) = plan.group_of(norm);
        clamped += was_clamped as u64;
        tables.grids[g].cell_index_into(y, &mut key);
        let mut hit = None;
        for table in &tables.tables[g] {
            if let Some(c) = table.get(key.as_slice()) {
                hit = Some(c);
                break;
            }
        }
        match hit {
            Some(c) => {
                out.append_reduced(s, i, &c.y, &c.e, &c.z);
                debug_assert!({
                    let bound = plan.gamma * tables.grids[g].radius + plan.xi * plan.lambda;
                    lp_norm(out.y(out.len() - 1), plan.p) <= bound * (1.0 + 1e-9) + 1e-9
                });
            }
            None => lost += 1,
        }
    }
    Ok(BirthdayOutcome {
        pairs: out,
        lost,
        clamped,
    })
}
